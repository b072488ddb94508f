#include <cmath>
#include <sstream>

#include "bvoc/experiments.hpp"
#include "bvoc/presets.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace bvoc;
using namespace bvoc::experiments;

namespace {

AnalysisConfig quick(std::string_view preset, std::size_t trials = 500) {
  auto cfg = presets::get(preset);
  cfg.trials = trials;
  return cfg;
}

std::string csv_of(const SweepResult& r) {
  std::ostringstream ss;
  write_sweep_csv(ss, r);
  return ss.str();
}

std::string error_of(std::string_view json) {
  try {
    config_from_json(json);
  } catch (const std::invalid_argument& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("grid spec") {
  const GridSpec g{0.0, 1.0, 5};
  CHECK(g.values() == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
  CHECK(GridSpec{2.0, 2.0, 1}.values() == std::vector<double>{2.0});
  CHECK_THROWS(GridSpec({1.0, 0.0, 5}).validate("grid"));
  CHECK_THROWS(GridSpec({0.0, 1.0, 0}).validate("grid"));
}

TEST_CASE("config JSON round trip") {
  for (const auto& name : presets::names()) {
    const auto cfg = presets::get(name);
    const auto text = config_to_json(cfg);
    CHECK(config_to_json(config_from_json(text)) == text);
  }
}

TEST_CASE("config diagnostics name the offending field") {
  CHECK(error_of(R"({"kind": "distance", "bogus": 1})").find("bogus") != std::string::npos);
  CHECK(error_of(R"({"kind": "nope"})").find("kind") != std::string::npos);
  CHECK(error_of(R"({"channel": {"u": -1}})").find("channel.u") != std::string::npos);
  CHECK(error_of(R"({"channel": {"u": "fast"}})").find("channel.u") != std::string::npos);
  CHECK(error_of(R"({"trials": 0})").find("trials") != std::string::npos);
  CHECK(error_of(R"({"grid": {"start": 1, "stop": 0.5, "points": 3}})").find("grid") != std::string::npos);
  CHECK(error_of(R"({"kind": "wind", "levels": []})").find("levels") != std::string::npos);
  CHECK(error_of(R"({"leaf": {"P_L": 0}})").find("P_L") != std::string::npos);
  CHECK(error_of("{not json").find("malformed") != std::string::npos);
  CHECK(error_of(R"({"kind": "distance"})").empty());
}

TEST_CASE("reach") {
  const std::vector<double> x{1, 2, 3, 4};
  CHECK(reach(x, std::vector<double>{1.0, 0.5, 0.004, 0.001}) == 2.0);
  CHECK(reach(x, std::vector<double>{2.0, 2.0, 2.0, 2.0}) == 4.0);
  CHECK(reach(x, std::vector<double>{0.0, 0.0, 0.0, 0.0}) == 0.0);
  CHECK(reach(x, std::vector<double>{1.0, 0.2, 0.6, 0.0}, 0.5) == 3.0);
  CHECK_THROWS(reach(std::vector<double>{}, std::vector<double>{}));
}

TEST_CASE("demodulation distance and first crossing helpers") {
  const std::vector<double> x{1, 2, 3, 4};
  CHECK(demod_distance(x, std::vector<double>{1, 1, 0, 1}) == 2.0);
  CHECK(demod_distance(x, std::vector<double>{0, 1, 1, 1}) == 0.0);
  CHECK(demod_distance(x, std::vector<double>{1, 1, 1, 1}) == 4.0);
  CHECK(first_below(x, std::vector<double>{50, 45, 35, 20}, 40.0) == 3.0);
  CHECK_FALSE(first_below(x, std::vector<double>{50, 45, 45, 45}, 40.0).has_value());
}

TEST_CASE("degenerate Monte Carlo reproduces the closed form") {
  auto cfg = presets::get("distance");
  cfg.trials = 1;
  cfg.noise = false;
  const auto r = run_analysis(cfg);
  CHECK(r.column("mean_c_ln") == r.column("c_l"));
  cfg.noise = true;
  cfg.noise_intensity = 0.0;
  CHECK(run_analysis(cfg).column("mean_c_ln") == r.column("c_l"));
}

TEST_CASE("every series has the axis length") {
  for (const auto& name : presets::names()) {
    const auto r = run_analysis(quick(name, 20));
    CHECK_FALSE(r.series.empty());
    for (const auto& s : r.series) CHECK(s.values.size() == r.axis.size());
  }
}

TEST_CASE("results are bit-identical across reruns and thread counts") {
  for (const char* name : {"distance", "noise", "rsk"}) {
    auto cfg = quick(name, 300);
    const auto a = csv_of(run_analysis(cfg));
    cfg.threads = 3;
    CHECK(csv_of(run_analysis(cfg)) == a);
    cfg.seed += 1;
    CHECK(csv_of(run_analysis(cfg)) != a);
  }
}

TEST_CASE("doubling trials moves every mean by less than 3 sigma / sqrt(trials)") {
  auto cfg = quick("noise", 2000);
  const auto a = run_analysis(cfg);
  cfg.trials *= 2;
  const auto b = run_analysis(cfg);
  for (double n : cfg.levels) {
    const auto label = level_label(n);
    const double sigma = a.scalar("sigma_n" + label);
    const auto& ma = a.column("mean_c_ln_n" + label);
    const auto& mb = b.column("mean_c_ln_n" + label);
    for (std::size_t i = 0; i < ma.size(); ++i) CHECK(std::abs(ma[i] - mb[i]) < 3.0 * sigma / std::sqrt(2000.0));
  }
}

TEST_CASE("demodulation distance falls as the threshold rises") {
  const auto r = run_analysis(quick("threshold", 1000));
  double prev = INFINITY;
  for (double f : {0.025, 0.05, 0.125, 0.5}) {
    const double d = r.scalar("demod_distance_t" + level_label(f));
    CHECK(d <= prev);
    prev = d;
  }
}

TEST_CASE("success rate is non-increasing beyond the concentration peak") {
  const auto r = run_analysis(quick("distance", 10000));
  const auto& c = r.column("c_l");
  const auto& rate = r.column("success_rate");
  const auto peak = static_cast<std::size_t>(std::max_element(c.begin(), c.end()) - c.begin());
  for (std::size_t i = peak + 1; i < rate.size(); ++i) CHECK(rate[i] <= rate[i - 1]);
}

TEST_CASE("mean scales linearly with mass in the noiseless limit") {
  auto cfg = presets::get("distance_mass");
  cfg.noise = false;
  cfg.trials = 1;
  const auto r = run_analysis(cfg);
  const auto& base = r.column("mean_c_ln_m1");
  for (double m : {3.0, 5.0, 10.0}) {
    const auto& s = r.column("mean_c_ln_m" + level_label(m));
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(s[i] == doctest::Approx(m * base[i]).epsilon(1e-12));
  }
}

TEST_CASE("SNR without noise is flagged infinite") {
  auto cfg = presets::get("distance_snr");
  cfg.noise = false;
  cfg.trials = 1;
  const auto r = snr_sweep(cfg);
  CHECK(r.has_flag("snr_infinite"));
  CHECK(std::isinf(r.column("snr_db").front()));
  CHECK_THROWS(snr_sweep(presets::get("distance")));
}

TEST_CASE("noise SNR falls strictly with intensity") {
  const auto r = snr_sweep(quick("noise_snr", 4000));
  const auto& snr = r.column("snr_db");
  for (std::size_t i = 1; i < snr.size(); ++i) CHECK(snr[i] < snr[i - 1]);
}

TEST_CASE("delay analyses are closed-form") {
  const auto r = run_analysis(presets::get("wind_delay"));
  CHECK(r.axis_name == "u");
  const auto& d = r.column("delay_advective");
  for (std::size_t i = 0; i < d.size(); ++i) CHECK(d[i] == 10.0 / r.axis[i]);
  const auto dist = run_analysis(presets::get("distance_delay"));
  CHECK(dist.column("delay_diffusive")[10] == dist.axis[10] * dist.axis[10] / 0.1);
}

TEST_CASE("sweep CSV layout") {
  const auto r = run_analysis(quick("distance", 10));
  const auto text = csv_of(r);
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  REQUIRE(line.rfind("# metadata ", 0) == 0);
  const auto meta = nlohmann::json::parse(line.substr(11));
  CHECK(meta["seed"] == kDefaultSeed);
  CHECK(meta["config"]["trials"] == 10);
  CHECK(meta["derived"]["x_a"].get<double>() == r.scalar("x_a"));
  std::getline(in, line);
  CHECK(line == "x,c_l,mean_c_ln,demod,success_rate");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == r.axis.size());

  std::ostringstream tsv;
  write_sweep_csv(tsv, r, '\t');
  CHECK(tsv.str().find("x\tc_l\tmean_c_ln") != std::string::npos);
}

TEST_CASE("x_a is half the noise-free reach unless pinned") {
  auto cfg = quick("distance", 10);
  const auto r = run_analysis(cfg);
  CHECK(r.scalar("x_a") == r.scalar("reach_clean") / 2.0);
  cfg.x_a = 0.3;
  CHECK(run_analysis(cfg).scalar("x_a") == 0.3);
}

TEST_CASE("unknown preset lists the available ones") {
  try {
    presets::get("nope");
    FAIL("expected an exception");
  } catch (const std::out_of_range& e) {
    CHECK(std::string(e.what()).find("distance_snr") != std::string::npos);
  }
}
