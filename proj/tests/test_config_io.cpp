#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>

#include "helpers.hpp"
#include "nlslab/config.hpp"
#include "nlslab/trace_io.hpp"
#include "nlslab/version.hpp"

using namespace nlslab;
using Catch::Matchers::ContainsSubstring;

TEST_CASE("config serialization is a fixed point of parsing") {
  RunConfig def;
  def.sync_and_validate();
  std::string s0 = serialize_config(def);
  std::string s1 = serialize_config(parse_config_text(s0));
  CHECK(s0 == s1);

  // a minimal file fills everything else with defaults
  CHECK(serialize_config(parse_config_text("grid.n = 3\n")) == s0);
  CHECK(serialize_config(parse_config_text("")) == s0);

  std::string text =
      "# full of noise\n"
      "\n"
      "grid.num_modes = 128   # inline comment\n"
      "nonlinearity.gamma = 0.25\n"
      "evolution.linear_only = true\n"
      "analysis.virial_m = 5, 10 ,15\n"
      "data.family = ring\n"
      "data.seed = 42\n"
      "delta = 0.2\n"
      "out_dir = elsewhere\n"
      "seed = 7\n";
  RunConfig c = parse_config_text(text);
  CHECK(c.grid.num_modes == 128);
  CHECK(c.evolution.nl.gamma == 0.25);
  CHECK(c.evolution.linear_only);
  CHECK(c.analysis.virial_m == std::vector<double>{5.0, 10.0, 15.0});
  CHECK(c.data.family == "ring");
  CHECK(c.data.seed == 42);
  CHECK(c.delta == 0.2);
  CHECK(c.out_dir == "elsewhere");
  CHECK(c.seed == 7);
  CHECK(serialize_config(parse_config_text(serialize_config(c))) == serialize_config(c));

  // dimension propagates into the nonlinearity and threshold blocks
  RunConfig c4 = parse_config_text("grid.n = 4\n");
  CHECK(c4.evolution.nl.n == 4);
  CHECK(c4.thresholds.n == 4);
}

TEST_CASE("config errors name the key and line") {
  CHECK_THROWS_WITH(parse_config_text("grid.oops = 1\n"),
                    ContainsSubstring("line 1, key 'grid.oops': unknown key"));
  CHECK_THROWS_WITH(parse_config_text("delta = fast\n"),
                    ContainsSubstring("expected a real number, got 'fast'"));
  CHECK_THROWS_WITH(parse_config_text("grid.n = 3.7\n"), ContainsSubstring("expected an integer"));
  CHECK_THROWS_WITH(parse_config_text("evolution.linear_only = yes\n"),
                    ContainsSubstring("expected true/false"));
  CHECK_THROWS_WITH(parse_config_text("analysis.virial_m = ,\n"),
                    ContainsSubstring("comma-separated list"));
  CHECK_THROWS_WITH(parse_config_text("grid.n 3\n"), ContainsSubstring("expected 'key = value'"));
  CHECK_THROWS_WITH(parse_config_text("# one\n\ndelta = bad\n"), ContainsSubstring("line 3"));
  CHECK_THROWS_AS(parse_config_text("delta = 1.5\n"), ConfigError);
  CHECK_THROWS_WITH(parse_config_text("delta = 1.5\n"), ContainsSubstring("(0,1)"));
  CHECK_THROWS_WITH(parse_config_text("analysis.eta1 = -1\n"), ContainsSubstring("positive"));
  CHECK_THROWS(parse_config_text("grid.n = 7\n"));
  CHECK_THROWS_WITH(parse_config("/no/such/config.cfg"), ContainsSubstring("not found"));
}

TEST_CASE("effective tower eta") {
  RunConfig c;
  CHECK(tst::rel(c.tower_eta_effective(), std::pow(0.5, 1.0 / std::sqrt(0.05))) < 1e-15);
  c.analysis.tower_eta = 0.25;
  CHECK(c.tower_eta_effective() == 0.25);
}

TEST_CASE("seventeen digits round every double through text") {
  for (double v : {1.0 / 3.0, 0.05, 1e-300, 6.02214076e23, -7.25, 0.0}) {
    CHECK(std::stod(fmt_g17(v)) == v);
  }
}

TEST_CASE("trace files reload bit for bit") {
  auto b = tst::basis(3, 64);
  RunConfig cfg;
  cfg.grid = b->spec;
  cfg.sync_and_validate();

  Trace tr;
  tr.spec = b->spec;
  tr.params = cfg.evolution;
  tr.status = HaltStatus::KineticEscape;
  tr.halt_time = 0.25;
  tr.trustworthy_horizon = 0.125;
  tr.delta = 0.07;
  SpectralField f0 = to_spectral(tst::gaussian(b, 1.0, 2.0));
  tr.series.times = {0.0, 0.25};
  tr.series.fields = {f0, free_propagator_spectral(f0, 0.25)};

  std::string text = serialize_trace(tr, cfg);
  LoadedTrace lt = parse_trace_text(text);
  CHECK(lt.trace.status == HaltStatus::KineticEscape);
  CHECK(lt.trace.halt_time == 0.25);
  CHECK(lt.trace.trustworthy_horizon == 0.125);
  CHECK(lt.trace.delta == 0.07);
  REQUIRE(lt.trace.series.size() == 2);
  CHECK(lt.trace.series.times[1] == 0.25);
  CHECK(lt.config.grid.num_modes == 64);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 64; ++j) CHECK(lt.trace.series.fields[i].c[j] == tr.series.fields[i].c[j]);

  CHECK(serialize_trace(lt.trace, lt.config) == text);

  // a second status value, via the disk path
  tr.status = HaltStatus::Completed;
  auto path = std::filesystem::temp_directory_path() / "nlslab_trace_roundtrip.csv";
  write_trace(path.string(), tr, cfg);
  LoadedTrace disk = read_trace(path.string());
  CHECK(disk.trace.status == HaltStatus::Completed);
  CHECK(disk.trace.series.size() == 2);
  std::filesystem::remove(path);

  // reports are reconstructed rather than stored
  DensityTables tab(lt.config.evolution.nl);
  recompute_reports(lt.trace, tab);
  REQUIRE(lt.trace.reports.size() == 2);
  CHECK(lt.trace.reports[0].t == 0.0);
  CHECK(lt.trace.reports[0].mass > 0);
  CHECK(tst::rel(lt.trace.reports[1].mass, lt.trace.reports[0].mass) < 1e-12);
}

TEST_CASE("trace parser rejects malformed input") {
  auto b = tst::basis(3, 64);
  RunConfig cfg;
  cfg.grid = b->spec;
  cfg.sync_and_validate();
  Trace tr;
  tr.spec = b->spec;
  SpectralField f0 = to_spectral(tst::gaussian(b, 1.0, 2.0));
  tr.series.times = {0.0, 0.1};
  tr.series.fields = {f0, f0};
  std::string text = serialize_trace(tr, cfg);

  std::string wrong_kind = text;
  wrong_kind.replace(0, 7, "# tarce");
  CHECK_THROWS_WITH(parse_trace_text(wrong_kind), ContainsSubstring("missing trace header"));

  CHECK_THROWS_WITH(parse_trace_text(text + "0.5,1.0,2.0\n"),
                    ContainsSubstring("column count mismatch"));

  std::string short_text = text.substr(0, text.find('\n', text.find('\n') + 1) + 1);
  CHECK_THROWS_WITH(parse_trace_text(short_text), ContainsSubstring("snapshot count mismatch"));

  CHECK_THROWS_WITH(read_trace("/no/such/trace.csv"), ContainsSubstring("not found"));
}

TEST_CASE("artifact headers carry kind, version, and the full config") {
  RunConfig cfg;
  cfg.sync_and_validate();
  std::string h = file_header("energy", cfg);
  CHECK(h.rfind("# energy | ", 0) == 0);
  CHECK_THAT(h, ContainsSubstring(version_string));
  CHECK_THAT(h, ContainsSubstring("config: grid.n = 3;"));
  CHECK(h.find('\n') == std::string::npos);
}
