#pragma once

namespace nlslab {

inline constexpr const char* version_string = "nlslab 0.3.0";

}
