#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "raqr/cli.hpp"
#include "raqr/config.hpp"
#include "raqr/constants.hpp"
#include "raqr/errors.hpp"

using namespace raqr;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("raqr_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  return p;
}

int cli(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

void write_file(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p) << text;
}

}  // namespace

TEST_CASE("config text round-trips") {
  RunConfig cfg = default_run_config();
  cfg.net.ue_density = 3e-5;
  cfg.net.pathloss_intercept = 2.5e-6;
  cfg.net.correlation = 0.3;
  cfg.sim.trials = 1234;
  cfg.sweep = {AxisKind::density, {1e-6, 1e-5, 1e-4}, 10.0};
  cfg.receivers = {receiver_from_name("rb_optimized"), receiver_from_name("conventional")};
  const std::string text = config_text(cfg);
  const RunConfig back = parse_config(text, "snapshot", default_run_config());
  CHECK(config_text(back) == text);
  CHECK(back.net.ue_density == cfg.net.ue_density);
  CHECK(back.sweep.values == cfg.sweep.values);
  CHECK(fnv1a_64(config_text(back)) == fnv1a_64(text));

  RunConfig custom = default_run_config();
  const std::string custom_text = config_text(parse_config(
      "[receivers]\nnames = custom\n[custom]\nabs_c1 = 0.25\nabs_c3_over_c1 = 50\nc3_phase = 3.141592653589793\n",
      "custom", custom));
  const RunConfig c2 = parse_config(custom_text, "again", default_run_config());
  REQUIRE(c2.receivers.size() == 1);
  CHECK(std::abs(c2.receivers[0].coeffs.c1) == doctest::Approx(0.25));
  CHECK(c2.receivers[0].coeffs.nonlinearity_ratio == doctest::Approx(50.0));
}

TEST_CASE("config diagnostics") {
  const RunConfig base = default_run_config();
  CHECK_THROWS_WITH_AS(parse_config("[network]\nbs_density = abc\n", "f.toml", base),
                       doctest::Contains("f.toml:2:"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("[network]\n\nfoo = 1\n", "f.toml", base),
                       doctest::Contains("f.toml:3: unknown key 'network.foo'"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("[network\n", "f.toml", base), doctest::Contains("f.toml:1:"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("[network]\ncorrelation = 1.5\n", "f.toml", base),
                       doctest::Contains("correlation"), ConfigError);
  CHECK_THROWS_AS(parse_config("[sweep]\naxis = power\n", "f.toml", base), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/raqr.toml", base), ConfigError);
  CHECK(parse_config("# only a comment\n", "f.toml", base).net.bs_density == 1e-5);
}

TEST_CASE("value lists and presets") {
  CHECK(parse_value_list("-10:20:5") == std::vector<double>{-10, -5, 0, 5, 10, 15, 20});
  CHECK(parse_value_list("1e-5, 1e-4") == std::vector<double>{1e-5, 1e-4});
  CHECK(parse_value_list("0:1:0.1").size() == 11);
  CHECK_THROWS_AS(parse_value_list("1:0:1"), ConfigError);
  CHECK_THROWS_AS(parse_value_list("0:1:0"), ConfigError);
  CHECK_THROWS_AS(parse_value_list(""), ConfigError);

  const auto cs = coefficient_preset("cs_optimized");
  CHECK(std::abs(cs.c1) == doctest::Approx(0.327));
  CHECK(cs.nonlinearity_ratio == doctest::Approx(281.0));
  CHECK(coefficient_preset("cs_resonant").nonlinearity_ratio == doctest::Approx(38.0));
  CHECK(std::abs(coefficient_preset("rb_optimized").c1) == doctest::Approx(0.192));
  CHECK(coefficient_preset_names().size() == 3);
  CHECK_THROWS_AS(coefficient_preset("k_optimized"), ConfigError);
  CHECK(atomic_profile("rb_optimized").probe_wavelength == doctest::Approx(780e-9));
  CHECK_THROWS_AS(receiver_from_name("bogus"), ConfigError);
  CHECK(receiver_from_name("conventional").conventional);

  CHECK(fnv1a_64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a_64("a") == 0xaf63dc4c8601ec8cULL);

  const RunConfig d = default_run_config();
  CHECK(d.sweep.values.size() == 31);
  CHECK(d.sweep.values.front() == -10.0);
  CHECK(d.sweep.values.back() == 20.0);
  CHECK(d.net.array_size == 10);
  CHECK(d.sim.trials == 30000);
}

TEST_CASE("exit codes") {
  const fs::path dir = scratch("codes");
  CHECK(cli({}) == kExitConfig);
  CHECK(cli({"launch"}) == kExitConfig);
  CHECK(cli({"coverage", "--sweep", "power", "--out", dir.string()}) == kExitConfig);
  CHECK(cli({"coverage", "--density", "-1", "--out", dir.string()}) == kExitConfig);
  CHECK(cli({"coverage", "--config", "/nonexistent.toml", "--out", dir.string()}) == kExitConfig);
  CHECK(cli({"simulate", "--trials", "50", "--out", dir.string()}) == kExitConfig);
  CHECK(cli({"coverage", "--mr", "600", "--values", "5", "--out", dir.string()}) == kExitNumerical);
  std::string help;
  CHECK(cli({"--help"}, &help) == kExitOk);
  CHECK(help.find("simulate") != std::string::npos);

  const fs::path bad = dir / "bad.toml";
  write_file(bad, "[network]\narray_size = 2.5\n");
  std::string err;
  CHECK(cli({"coverage", "--config", bad.string(), "--out", dir.string()}, nullptr, &err) == kExitConfig);
  CHECK(err.find("bad.toml:2:") != std::string::npos);
}

TEST_CASE("coverage subcommand") {
  const fs::path dir = scratch("coverage");
  REQUIRE(cli({"coverage", "--values", "-10:20:10", "--out", dir.string()}) == kExitOk);
  for (const char* f : {"coverage.csv", "config.toml", "manifest.json"}) CHECK(fs::exists(dir / f));
  const std::string csv = slurp(dir / "coverage.csv");
  CHECK(csv.rfind("# raqr 1.0.0 config_hash=", 0) == 0);
  CHECK(csv.find("seed=1\n") != std::string::npos);
  const auto rows = read_curves_csv((dir / "coverage.csv").string());
  REQUIRE(rows.size() == 8);
  for (std::size_t i = 0; i < 4; ++i) CHECK(rows[i].p_cov >= rows[i + 4].p_cov);

  const auto manifest = read_json(dir / "manifest.json");
  CHECK(manifest["subcommand"] == "coverage");
  CHECK(manifest["overrides"][0] == "--values=-10:20:10");
  CHECK(manifest["outputs"].size() == 2);

  // The snapshot reproduces the run.
  const fs::path again = scratch("coverage_again");
  REQUIRE(cli({"coverage", "--config", (dir / "config.toml").string(), "--out", again.string()}) == kExitOk);
  CHECK(slurp(again / "coverage.csv") == csv);

  const fs::path dens = scratch("density");
  REQUIRE(cli({"coverage", "--sweep", "density", "--values", "1e-6,1e-5,1e-4,1e-3", "--theta-db", "0",
               "--out", dens.string()}) == kExitOk);
  const auto cross = read_json(dens / "crossovers.json");
  REQUIRE(cross.size() == 1);
  CHECK(cross[0]["crossover_density"].get<double>() == doctest::Approx(4.4e-5).epsilon(0.25));

  const fs::path arr = scratch("array");
  REQUIRE(cli({"coverage", "--sweep", "array", "--values", "1,4,8,16,32", "--density", "2e-4",
               "--theta-db", "0", "--out", arr.string()}) == kExitOk);
  const auto ar = read_curves_csv((arr / "coverage.csv").string());
  for (std::size_t i = 1; i < ar.size(); ++i)
    if (ar[i].receiver_mode == ar[i - 1].receiver_mode) CHECK(ar[i].p_cov >= ar[i - 1].p_cov);
}

TEST_CASE("simulate and compare") {
  const fs::path sim = scratch("simulate");
  REQUIRE(cli({"simulate", "--trials", "100", "--values", "-10:20:10", "--density", "1e-4", "--dump",
               "--out", sim.string()}) == kExitOk);
  for (const char* f : {"monte_carlo.csv", "analytic.csv", "gaps.csv", "gap_report.json",
                        "trials_cs_optimized.csv", "trials_conventional.csv"})
    CHECK(fs::exists(sim / f));
  const auto mc = read_curves_csv((sim / "monte_carlo.csv").string());
  CHECK(mc.size() == 8);
  const auto report = read_json(sim / "gap_report.json");

  const fs::path cmp = scratch("compare");
  REQUIRE(cli({"compare", (sim / "analytic.csv").string(), (sim / "monte_carlo.csv").string(), "--out",
               cmp.string()}) == kExitOk);
  CHECK(read_json(cmp / "compare.json")["max_gap"].get<double>() ==
        doctest::Approx(report["max_gap"].get<double>()).epsilon(1e-8));

  const fs::path self = scratch("self");
  REQUIRE(cli({"compare", (sim / "analytic.csv").string(), (sim / "analytic.csv").string(), "--out",
               self.string()}) == kExitOk);
  const auto sj = read_json(self / "compare.json");
  CHECK(sj["max_gap"].get<double>() == 0.0);
  CHECK(sj["mean_gap"].get<double>() == 0.0);

  CHECK(cli({"simulate", "--trials", "100", "--values", "0", "--check", "--max-gap", "1e-12", "--out",
             scratch("check").string()}) == kExitGap);

  const fs::path junk = scratch("junk") / "x.csv";
  write_file(junk, "a,b,c\n1,2,3\n");
  CHECK(cli({"compare", junk.string(), (sim / "analytic.csv").string(), "--out", cmp.string()}) ==
        kExitConfig);
}

TEST_CASE("species comparison through compare") {
  const fs::path cs = scratch("cs"), rb = scratch("rb"), out = scratch("cs_rb");
  REQUIRE(cli({"coverage", "--preset", "cs_optimized", "--density", "1e-3", "--values", "5", "--out",
               cs.string()}) == kExitOk);
  REQUIRE(cli({"coverage", "--preset", "rb_optimized", "--density", "1e-3", "--values", "5", "--out",
               rb.string()}) == kExitOk);
  REQUIRE(cli({"compare", (cs / "coverage.csv").string(), (rb / "coverage.csv").string(), "--out",
               out.string()}) == kExitOk);
  const std::string csv = slurp(out / "compare.csv");
  std::istringstream is(csv);
  std::string header, row;
  std::getline(is, header);
  std::getline(is, row);
  std::vector<std::string> cells;
  std::stringstream ss(row);
  for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
  REQUIRE(cells.size() == 7);
  CHECK(std::stod(cells[4]) == doctest::Approx(0.47).epsilon(0.02 / 0.47));
  CHECK(std::stod(cells[5]) == doctest::Approx(0.73).epsilon(0.02 / 0.73));
  CHECK(std::stod(cells[6]) < 0.0);
}

TEST_CASE("transducer subcommand") {
  const fs::path cfg = scratch("tcfg") / "fast.toml";
  write_file(cfg, "[search]\nn_starts = 2\n");
  const fs::path a = scratch("t1"), b = scratch("t2");
  REQUIRE(cli({"transducer", "--config", cfg.string(), "--grid", "1x1", "--out", a.string()}) == kExitOk);
  REQUIRE(cli({"transducer", "--config", cfg.string(), "--grid", "1x1", "--out", b.string()}) == kExitOk);
  const std::string csv = slurp(a / "landscape.csv");
  CHECK(csv == slurp(b / "landscape.csv"));
  CHECK(slurp(a / "optimum.json") == slurp(b / "optimum.json"));
  int data_rows = 0;
  std::istringstream is(csv);
  for (std::string line; std::getline(is, line);)
    if (!line.empty() && line[0] != '#' && line.rfind("delta_p_hz", 0) != 0) ++data_rows;
  CHECK(data_rows == 1);
  const auto opt = read_json(a / "optimum.json");
  CHECK(opt.contains("abs_c1"));
  CHECK(opt.contains("reference"));
  CHECK(cli({"transducer", "--grid", "3by3", "--out", a.string()}) == kExitConfig);
  CHECK(cli({"optimize", "--preset", "potassium", "--out", a.string()}) == kExitConfig);
}
