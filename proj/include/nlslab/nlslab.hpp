#pragma once

#include "version.hpp"
#include "params.hpp"
#include "bessel.hpp"
#include "grid.hpp"
#include "nonlinearity.hpp"
#include "ground_state.hpp"
#include "functionals.hpp"
#include "evolution.hpp"
#include "threshold.hpp"
#include "virial.hpp"
#include "concentration.hpp"
#include "initial_data.hpp"
#include "config.hpp"
#include "trace_io.hpp"
#include "runner.hpp"
#include "verify.hpp"
