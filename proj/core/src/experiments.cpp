#include "bvoc/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "bvoc/csv.hpp"
#include "bvoc/parallel.hpp"
#include "bvoc/rng.hpp"
#include "bvoc/version.hpp"
#include "json.hpp"

namespace bvoc::experiments {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<AnalysisKind, std::string_view>, 11> kKindNames{{
    {AnalysisKind::distance, "distance"},
    {AnalysisKind::distance_snr, "distance_snr"},
    {AnalysisKind::distance_delay, "distance_delay"},
    {AnalysisKind::distance_mass, "distance_mass"},
    {AnalysisKind::wind, "wind"},
    {AnalysisKind::wind_delay, "wind_delay"},
    {AnalysisKind::eddy, "eddy"},
    {AnalysisKind::noise, "noise"},
    {AnalysisKind::noise_snr, "noise_snr"},
    {AnalysisKind::threshold, "threshold"},
    {AnalysisKind::rsk, "rsk"},
}};

constexpr std::array<double, 4> kSnrLevels{40.0, 30.0, 20.0, 10.0};

bool uses_levels(AnalysisKind kind) {
  switch (kind) {
    case AnalysisKind::distance_mass:
    case AnalysisKind::wind:
    case AnalysisKind::eddy:
    case AnalysisKind::noise:
    case AnalysisKind::threshold:
    case AnalysisKind::rsk: return true;
    default: return false;
  }
}

[[noreturn]] void bad_field(std::string_view field, std::string_view what) {
  throw std::invalid_argument(std::string(field) + ": " + std::string(what));
}

void require_positive(double v, std::string_view field) {
  if (!(v > 0.0) || !std::isfinite(v)) bad_field(field, "must be finite and > 0");
}

}  // namespace

std::string_view to_string(AnalysisKind kind) {
  for (const auto& [k, name] : kKindNames)
    if (k == kind) return name;
  return "unknown";
}

AnalysisKind parse_kind(std::string_view name) {
  std::string valid;
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
    valid += valid.empty() ? "" : ", ";
    valid += n;
  }
  throw std::invalid_argument("kind: unknown analysis kind '" + std::string(name) +
                              "' (expected one of " + valid + ")");
}

std::vector<double> GridSpec::values() const {
  std::vector<double> out(points);
  if (points == 1) {
    out[0] = start;
    return out;
  }
  const double step = (stop - start) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) out[i] = start + step * static_cast<double>(i);
  out.back() = stop;
  return out;
}

void GridSpec::validate(std::string_view field) const {
  const std::string f(field);
  if (points < 1) bad_field(f + ".points", "must be >= 1");
  if (!std::isfinite(start) || !std::isfinite(stop)) bad_field(f, "start and stop must be finite");
  if (points > 1 && !(stop > start)) bad_field(f, "stop must be > start");
}

channel::ChannelParams AnalysisConfig::channel() const {
  return channel::ChannelParams{u, channel::Diffusivity::constant(D), h};
}

void AnalysisConfig::validate() const {
  grid.validate("grid");
  if (reference_grid) reference_grid->validate("reference_grid");

  const bool distance_axis = kind != AnalysisKind::wind_delay && kind != AnalysisKind::noise_snr;
  if (distance_axis && !(grid.start > 0.0)) bad_field("grid.start", "distances must be > 0");
  if (kind == AnalysisKind::wind_delay && !(grid.start > 0.0))
    bad_field("grid.start", "wind speeds must be > 0");
  if (kind == AnalysisKind::noise_snr && !(grid.start >= 0.0))
    bad_field("grid.start", "noise intensities must be >= 0");
  if (reference_grid && !(reference_grid->start > 0.0))
    bad_field("reference_grid.start", "distances must be > 0");

  require_positive(u, "channel.u");
  require_positive(D, "channel.D");
  if (!(h >= 0.0) || !std::isfinite(h)) bad_field("channel.h", "must be finite and >= 0");
  leaf.validate();
  if (!std::isfinite(y_r)) bad_field("receiver.y", "must be finite");
  if (!(z_r >= 0.0) || !std::isfinite(z_r)) bad_field("receiver.z", "must be finite and >= 0");
  require_positive(x_r, "receiver.x");
  if (tau_r) require_positive(*tau_r, "receiver.tau_r");
  require_positive(mass, "mass");
  if (!(noise_intensity >= 0.0) || !std::isfinite(noise_intensity))
    bad_field("noise.intensity", "must be finite and >= 0");
  if (x_a) require_positive(*x_a, "noise.x_a");

  if (uses_levels(kind)) {
    if (levels.empty())
      bad_field("levels", "must be non-empty for kind '" + std::string(to_string(kind)) + "'");
    for (double v : levels) {
      if (kind == AnalysisKind::noise) {
        if (!(v >= 0.0) || !std::isfinite(v)) bad_field("levels", "noise intensities must be >= 0");
      } else if (kind == AnalysisKind::threshold) {
        if (!(v > 0.0 && v <= 1.0)) bad_field("levels", "threshold fractions must lie in (0, 1]");
      } else {
        require_positive(v, "levels");
      }
    }
  }
  if (!(threshold_fraction > 0.0 && threshold_fraction <= 1.0))
    bad_field("threshold_fraction", "must lie in (0, 1]");
  if (!(floor_fraction > 0.0 && floor_fraction < 1.0))
    bad_field("floor_fraction", "must lie in (0, 1)");
  try {
    blend.validate();
    window.validate();
  } catch (const std::invalid_argument& e) {
    bad_field("rsk", e.what());
  }
  if (trials < 1) bad_field("trials", "must be >= 1");
}

// ---- JSON ----------------------------------------------------------------

namespace {

class Reader {
 public:
  Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) bad_field(path_.empty() ? "config" : path_, "expected an object");
  }

  void allow(std::initializer_list<std::string_view> keys) const {
    for (const auto& [key, value] : obj_.items()) {
      if (std::find(keys.begin(), keys.end(), key) == keys.end())
        bad_field(field(key), "unknown key");
    }
  }

  const json* find(std::string_view key) const {
    const auto it = obj_.find(std::string(key));
    return it == obj_.end() ? nullptr : &*it;
  }

  void number(std::string_view key, double& out) const {
    if (const json* v = find(key)) {
      if (!v->is_number()) bad_field(field(key), "expected a number");
      out = v->get<double>();
    }
  }

  template <class Int>
  void integer(std::string_view key, Int& out) const {
    if (const json* v = find(key)) {
      if (!v->is_number_integer() || (v->is_number_integer() && !v->is_number_unsigned() &&
                                      v->get<std::int64_t>() < 0))
        bad_field(field(key), "expected a non-negative integer");
      out = v->get<Int>();
    }
  }

  void boolean(std::string_view key, bool& out) const {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) bad_field(field(key), "expected true or false");
      out = v->get<bool>();
    }
  }

  void string(std::string_view key, std::string& out) const {
    if (const json* v = find(key)) {
      if (!v->is_string()) bad_field(field(key), "expected a string");
      out = v->get<std::string>();
    }
  }

  /// Number, or a sentinel string meaning "none".
  void optional_number(std::string_view key, std::optional<double>& out,
                       std::string_view sentinel) const {
    if (const json* v = find(key)) {
      if (v->is_null() || (v->is_string() && v->get<std::string>() == sentinel)) {
        out.reset();
      } else if (v->is_number()) {
        out = v->get<double>();
      } else {
        bad_field(field(key), "expected a number or \"" + std::string(sentinel) + "\"");
      }
    }
  }

  Reader child(std::string_view key) const { return Reader(*find(key), field(key)); }

  std::string field(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

 private:
  const json& obj_;
  std::string path_;
};

GridSpec read_grid(const Reader& r) {
  GridSpec g;
  r.allow({"start", "stop", "points"});
  r.number("start", g.start);
  r.number("stop", g.stop);
  r.integer("points", g.points);
  return g;
}

json grid_json(const GridSpec& g) {
  return json{{"start", g.start}, {"stop", g.stop}, {"points", g.points}};
}

}  // namespace

AnalysisConfig config_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: malformed JSON: ") + e.what());
  }
  const Reader root(doc, "");
  root.allow({"name", "kind", "grid", "reference_grid", "channel", "leaf", "receiver", "mass",
              "noise", "levels", "threshold_fraction", "floor_fraction", "rsk", "trials", "seed",
              "threads"});

  AnalysisConfig c;
  root.string("name", c.name);
  if (root.find("kind")) {
    std::string kind;
    root.string("kind", kind);
    c.kind = parse_kind(kind);
  }
  if (root.find("grid")) c.grid = read_grid(root.child("grid"));
  if (const json* v = root.find("reference_grid"); v && !v->is_null())
    c.reference_grid = read_grid(root.child("reference_grid"));

  if (root.find("channel")) {
    const Reader r = root.child("channel");
    r.allow({"u", "D", "h"});
    r.number("u", c.u);
    r.number("D", c.D);
    r.number("h", c.h);
  }
  if (root.find("leaf")) {
    const Reader r = root.child("leaf");
    r.allow({"P_L", "A_L", "M_L", "K_AW", "K_LW"});
    r.number("P_L", c.leaf.P_L);
    r.number("A_L", c.leaf.A_L);
    r.number("M_L", c.leaf.M_L);
    r.number("K_AW", c.leaf.K_AW);
    r.optional_number("K_LW", c.leaf.K_LW, "none");
  }
  if (root.find("receiver")) {
    const Reader r = root.child("receiver");
    r.allow({"x", "y", "z", "tau_r"});
    r.number("x", c.x_r);
    r.number("y", c.y_r);
    r.number("z", c.z_r);
    r.optional_number("tau_r", c.tau_r, "unbounded");
  }
  root.number("mass", c.mass);
  if (root.find("noise")) {
    const Reader r = root.child("noise");
    r.allow({"enabled", "intensity", "x_a"});
    r.boolean("enabled", c.noise);
    r.number("intensity", c.noise_intensity);
    r.optional_number("x_a", c.x_a, "auto");
  }
  if (const json* v = root.find("levels")) {
    if (!v->is_array()) bad_field("levels", "expected an array of numbers");
    c.levels.clear();
    for (const auto& item : *v) {
      if (!item.is_number()) bad_field("levels", "expected an array of numbers");
      c.levels.push_back(item.get<double>());
    }
  }
  root.number("threshold_fraction", c.threshold_fraction);
  root.number("floor_fraction", c.floor_fraction);
  if (root.find("rsk")) {
    const Reader r = root.child("rsk");
    r.allow({"mass_a", "mass_b", "lo", "hi"});
    r.number("mass_a", c.blend.mass_a);
    r.number("mass_b", c.blend.mass_b);
    r.number("lo", c.window.lo);
    r.number("hi", c.window.hi);
  }
  root.integer("trials", c.trials);
  root.integer("seed", c.seed);
  root.integer("threads", c.threads);
  c.validate();
  return c;
}

namespace {

json config_object(const AnalysisConfig& c) {
  json leaf{{"P_L", c.leaf.P_L}, {"A_L", c.leaf.A_L}, {"M_L", c.leaf.M_L}, {"K_AW", c.leaf.K_AW}};
  if (c.leaf.K_LW) leaf["K_LW"] = *c.leaf.K_LW;
  json j;
  j["name"] = c.name;
  j["kind"] = std::string(to_string(c.kind));
  j["grid"] = grid_json(c.grid);
  if (c.reference_grid) j["reference_grid"] = grid_json(*c.reference_grid);
  j["channel"] = json{{"u", c.u}, {"D", c.D}, {"h", c.h}};
  j["leaf"] = leaf;
  j["receiver"] = json{{"x", c.x_r},
                       {"y", c.y_r},
                       {"z", c.z_r},
                       {"tau_r", c.tau_r ? json(*c.tau_r) : json("unbounded")}};
  j["mass"] = c.mass;
  j["noise"] = json{{"enabled", c.noise},
                    {"intensity", c.noise_intensity},
                    {"x_a", c.x_a ? json(*c.x_a) : json("auto")}};
  j["levels"] = c.levels;
  j["threshold_fraction"] = c.threshold_fraction;
  j["floor_fraction"] = c.floor_fraction;
  j["rsk"] = json{{"mass_a", c.blend.mass_a},
                  {"mass_b", c.blend.mass_b},
                  {"lo", c.window.lo},
                  {"hi", c.window.hi}};
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  return j;
}

}  // namespace

// threads is a runtime knob and is left out so that snapshots (and the CSV
// metadata built from them) do not depend on it.
std::string config_to_json(const AnalysisConfig& config, int indent) {
  return config_object(config).dump(indent);
}

// ---- helpers -------------------------------------------------------------

double reach(std::span<const double> x, std::span<const double> series, double floor_fraction) {
  if (x.size() != series.size()) throw std::invalid_argument("reach: size mismatch");
  if (series.empty()) throw std::invalid_argument("reach: empty series");
  if (!(floor_fraction > 0.0 && floor_fraction < 1.0))
    throw std::invalid_argument("reach: floor_fraction must lie in (0, 1)");
  const double peak = *std::max_element(series.begin(), series.end());
  if (!(peak > 0.0)) return 0.0;
  const double floor = floor_fraction * peak;
  for (std::size_t i = series.size(); i-- > 0;) {
    if (series[i] >= floor) return x[i];
  }
  return 0.0;
}

double demod_distance(std::span<const double> x, std::span<const double> bits) {
  if (x.size() != bits.size()) throw std::invalid_argument("demod_distance: size mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (bits[i] == 0.0) return i == 0 ? 0.0 : x[i - 1];
  }
  return x.empty() ? 0.0 : x.back();
}

std::optional<double> first_below(std::span<const double> axis, std::span<const double> series,
                                  double level) {
  if (axis.size() != series.size()) throw std::invalid_argument("first_below: size mismatch");
  for (std::size_t i = 0; i < axis.size(); ++i) {
    if (series[i] < level) return axis[i];
  }
  return std::nullopt;
}

std::string level_label(double value) { return csv::format_double(value); }

const std::vector<double>& SweepResult::column(std::string_view name) const {
  if (name == axis_name) return axis;
  for (const auto& s : series)
    if (s.name == name) return s.values;
  throw std::out_of_range("no series named '" + std::string(name) + "'");
}

double SweepResult::scalar(std::string_view name) const {
  const auto it = scalars.find(std::string(name));
  if (it == scalars.end()) throw std::out_of_range("no scalar named '" + std::string(name) + "'");
  return it->second;
}

bool SweepResult::has_flag(std::string_view flag) const {
  return std::find(flags.begin(), flags.end(), flag) != flags.end();
}

std::string SweepResult::metadata_json() const {
  json derived = json::object();
  for (const auto& [k, v] : scalars) {
    if (std::isfinite(v))
      derived[k] = v;
    else
      derived[k] = csv::format_double(v);
  }
  json meta;
  meta["name"] = name;
  meta["kind"] = std::string(to_string(kind));
  meta["config"] = config_json.empty() ? json::object() : json::parse(config_json);
  meta["seed"] = meta["config"].value("seed", std::uint64_t{0});
  meta["derived"] = derived;
  meta["flags"] = flags;
  meta["version"] = kVersion;
  return meta.dump();
}

void write_sweep_csv(std::ostream& out, const SweepResult& result, char sep) {
  out << "# metadata " << result.metadata_json() << '\n';
  std::vector<std::string> header{result.axis_name};
  std::vector<std::span<const double>> columns{result.axis};
  for (const auto& s : result.series) {
    header.push_back(s.name);
    columns.emplace_back(s.values);
  }
  csv::write_table(out, header, columns, sep);
}

// ---- Monte Carlo ---------------------------------------------------------

namespace {

struct CurveInput {
  channel::ChannelParams chan;
  double mass = 0.0;
  double intensity = 1.0;
  std::uint64_t series = 0;
};

struct Curve {
  std::vector<double> c_l;
  std::vector<double> mean;
  std::vector<double> noise_power;  ///< mean squared unclamped residual
  receiver::NoiseModel noise;
  double reach_clean = 0.0;
  double x_a = 0.0;
};

std::vector<double> clean_curve(const AnalysisConfig& cfg, const channel::ChannelParams& chan,
                                double mass, std::span<const double> x) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    out[i] = receiver::leaf_concentration(cfg.leaf, chan, mass, {x[i], cfg.y_r, cfg.z_r}, cfg.tau_r);
  return out;
}

/// Noise model for one series: mean from the leaf concentration at x_a, where
/// x_a defaults to half the noise-free reach on the distance reference grid.
receiver::NoiseModel series_noise(const AnalysisConfig& cfg, const channel::ChannelParams& chan,
                                  double mass, double intensity, double& x_a, double& reach_clean) {
  const auto ref_x = (cfg.reference_grid ? *cfg.reference_grid : cfg.grid).values();
  const auto ref_c = clean_curve(cfg, chan, mass, ref_x);
  reach_clean = reach(ref_x, ref_c, cfg.floor_fraction);
  x_a = cfg.x_a ? *cfg.x_a : reach_clean / 2.0;
  if (!cfg.noise || !(x_a > 0.0)) return receiver::NoiseModel::none();
  const double mu = receiver::noise_mean(cfg.leaf, chan, mass, {0.0, cfg.y_r, cfg.z_r}, x_a, cfg.tau_r);
  return receiver::NoiseModel::from_mean(mu, intensity);
}

/// Runs `trials` draws at each point; point i of series s uses substream (seed, s, i).
void monte_carlo(const AnalysisConfig& cfg, std::uint64_t series, std::span<const double> c_l,
                 const std::vector<receiver::NoiseModel>& noise, std::vector<double>& mean,
                 std::vector<double>& noise_power) {
  const std::size_t n = c_l.size();
  mean.assign(n, 0.0);
  noise_power.assign(n, 0.0);
  parallel_for(n, cfg.threads, [&](std::size_t i) {
    const auto& model = noise[i];
    if (model.is_zero()) {
      mean[i] = c_l[i];
      return;
    }
    NormalStream draws(cfg.seed, series, i);
    double sum = 0.0;
    double power = 0.0;
    for (std::size_t t = 0; t < cfg.trials; ++t) {
      const double r = receiver::noise_residual(model, draws());
      sum += std::max(0.0, c_l[i] + r);
      power += r * r;
    }
    mean[i] = sum / static_cast<double>(cfg.trials);
    noise_power[i] = power / static_cast<double>(cfg.trials);
  });
}

Curve run_curve(const AnalysisConfig& cfg, const CurveInput& in, std::span<const double> x) {
  Curve curve;
  curve.noise = series_noise(cfg, in.chan, in.mass, in.intensity, curve.x_a, curve.reach_clean);
  curve.c_l = clean_curve(cfg, in.chan, in.mass, x);
  const std::vector<receiver::NoiseModel> models(x.size(), curve.noise);
  monte_carlo(cfg, in.series, curve.c_l, models, curve.mean, curve.noise_power);
  return curve;
}

/// Fraction of trials demodulated as 1, regenerating the draws of monte_carlo.
std::vector<double> success_rate(const AnalysisConfig& cfg, std::uint64_t series,
                                 std::span<const double> c_l, const receiver::NoiseModel& noise,
                                 double threshold) {
  std::vector<double> out(c_l.size(), 0.0);
  if (!(threshold > 0.0)) return out;
  parallel_for(c_l.size(), cfg.threads, [&](std::size_t i) {
    if (noise.is_zero()) {
      out[i] = receiver::demodulate(c_l[i], threshold);
      return;
    }
    NormalStream draws(cfg.seed, series, i);
    std::size_t ones = 0;
    for (std::size_t t = 0; t < cfg.trials; ++t)
      ones += receiver::demodulate(receiver::add_noise(c_l[i], noise, draws()), threshold);
    out[i] = static_cast<double>(ones) / static_cast<double>(cfg.trials);
  });
  return out;
}

std::vector<double> demod_bits(std::span<const double> mean, double threshold) {
  std::vector<double> bits(mean.size(), 0.0);
  if (!(threshold > 0.0)) return bits;
  for (std::size_t i = 0; i < mean.size(); ++i) bits[i] = receiver::demodulate(mean[i], threshold);
  return bits;
}

double max_of(std::span<const double> v) {
  return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
}

std::vector<double> snr_series(std::span<const double> c_l, std::span<const double> noise_power,
                               SweepResult& result) {
  std::vector<double> out(c_l.size());
  bool infinite = false;
  for (std::size_t i = 0; i < c_l.size(); ++i) {
    if (noise_power[i] > 0.0) {
      out[i] = receiver::snr_db(c_l[i] * c_l[i], noise_power[i]);
    } else {
      out[i] = std::numeric_limits<double>::infinity();
      infinite = true;
    }
  }
  if (infinite) result.flags.emplace_back("snr_infinite");
  return out;
}

void add_noise_scalars(SweepResult& r, const std::string& suffix, const Curve& c) {
  r.scalars["x_a" + suffix] = c.x_a;
  r.scalars["reach_clean" + suffix] = c.reach_clean;
  r.scalars["mu" + suffix] = c.noise.intensity * c.noise.mu;
  r.scalars["sigma" + suffix] = c.noise.intensity * c.noise.sigma;
}

/// Linearly interpolated distance where the SNR first drops below `level`.
std::optional<double> snr_crossing(std::span<const double> x, std::span<const double> snr,
                                   double level) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (snr[i] < level) {
      if (i == 0) return x[0];
      if (!std::isfinite(snr[i - 1])) return x[i - 1];
      const double f = (snr[i - 1] - level) / (snr[i - 1] - snr[i]);
      return x[i - 1] + f * (x[i] - x[i - 1]);
    }
  }
  return std::nullopt;
}

std::string level_name(std::string_view prefix, double level) {
  return std::string(prefix) + level_label(level);
}

void run_distance(const AnalysisConfig& cfg, SweepResult& r) {
  const Curve c = run_curve(cfg, {cfg.channel(), cfg.mass, cfg.noise_intensity, 0}, r.axis);
  const double peak = max_of(c.mean);
  const double threshold = cfg.threshold_fraction * peak;
  const auto bits = demod_bits(c.mean, threshold);
  r.series.push_back({"c_l", c.c_l});
  r.series.push_back({"mean_c_ln", c.mean});
  r.series.push_back({"demod", bits});
  r.series.push_back({"success_rate", success_rate(cfg, 0, c.c_l, c.noise, threshold)});
  add_noise_scalars(r, "", c);
  r.scalars["max_mean_c_ln"] = peak;
  r.scalars["threshold"] = threshold;
  r.scalars["demod_distance"] = demod_distance(r.axis, bits);
  r.scalars["reach"] = reach(r.axis, c.mean, cfg.floor_fraction);
  if (!(peak > 0.0)) r.flags.emplace_back("no_signal");
}

void run_distance_snr(const AnalysisConfig& cfg, SweepResult& r) {
  const Curve c = run_curve(cfg, {cfg.channel(), cfg.mass, cfg.noise_intensity, 0}, r.axis);
  const auto snr = snr_series(c.c_l, c.noise_power, r);
  r.series.push_back({"c_l", c.c_l});
  r.series.push_back({"mean_c_ln", c.mean});
  r.series.push_back({"snr_db", snr});
  add_noise_scalars(r, "", c);
  for (double level : kSnrLevels) {
    if (const auto x = snr_crossing(r.axis, snr, level))
      r.scalars["snr_crossing_" + level_label(level) + "db"] = *x;
  }
}

void run_distance_delay(const AnalysisConfig& cfg, SweepResult& r) {
  const auto chan = cfg.channel();
  std::vector<double> adv(r.axis.size()), dif(r.axis.size()), mix(r.axis.size());
  for (std::size_t i = 0; i < r.axis.size(); ++i) {
    adv[i] = channel::delay(chan, r.axis[i], channel::DelayMode::advective);
    dif[i] = channel::delay(chan, r.axis[i], channel::DelayMode::diffusive);
    mix[i] = channel::delay(chan, r.axis[i], channel::DelayMode::mixed);
  }
  r.series.push_back({"delay_advective", adv});
  r.series.push_back({"delay_diffusive", dif});
  r.series.push_back({"delay_mixed", mix});
}

void run_wind_delay(const AnalysisConfig& cfg, SweepResult& r) {
  std::vector<double> adv(r.axis.size()), mix(r.axis.size());
  for (std::size_t i = 0; i < r.axis.size(); ++i) {
    auto chan = cfg.channel();
    chan.u = r.axis[i];
    adv[i] = channel::delay(chan, cfg.x_r, channel::DelayMode::advective);
    mix[i] = channel::delay(chan, cfg.x_r, channel::DelayMode::mixed);
  }
  r.series.push_back({"delay_advective", adv});
  r.series.push_back({"delay_mixed", mix});
  r.scalars["x_r"] = cfg.x_r;
}

/// One noisy curve per level, with the level applied by `apply`.
template <class Apply>
void run_family(const AnalysisConfig& cfg, SweepResult& r, std::string_view prefix, Apply apply) {
  for (std::size_t j = 0; j < cfg.levels.size(); ++j) {
    CurveInput in{cfg.channel(), cfg.mass, cfg.noise_intensity, j};
    apply(in, cfg.levels[j]);
    const Curve c = run_curve(cfg, in, r.axis);
    const std::string suffix = "_" + level_name(prefix, cfg.levels[j]);
    r.series.push_back({"c_l" + suffix, c.c_l});
    r.series.push_back({"mean_c_ln" + suffix, c.mean});
    r.scalars["reach" + suffix] = reach(r.axis, c.mean, cfg.floor_fraction);
    add_noise_scalars(r, suffix, c);
  }
}

void run_noise_snr(const AnalysisConfig& cfg, SweepResult& r) {
  const auto chan = cfg.channel();
  double x_a = 0.0;
  double reach_clean = 0.0;
  const auto base = series_noise(cfg, chan, cfg.mass, 1.0, x_a, reach_clean);
  const double c_l =
      receiver::leaf_concentration(cfg.leaf, chan, cfg.mass, {cfg.x_r, cfg.y_r, cfg.z_r}, cfg.tau_r);
  const std::vector<double> c_l_col(r.axis.size(), c_l);
  std::vector<receiver::NoiseModel> models;
  for (double m : r.axis) models.push_back(base.scaled(m));
  std::vector<double> mean, power;
  monte_carlo(cfg, 0, c_l_col, models, mean, power);
  const auto snr = snr_series(c_l_col, power, r);
  r.series.push_back({"mean_c_ln", mean});
  r.series.push_back({"noise_power", power});
  r.series.push_back({"snr_db", snr});
  r.scalars["c_l"] = c_l;
  r.scalars["x_r"] = cfg.x_r;
  r.scalars["x_a"] = x_a;
  r.scalars["reach_clean"] = reach_clean;
  r.scalars["mu"] = base.mu;
  r.scalars["sigma"] = base.sigma;
}

void run_threshold(const AnalysisConfig& cfg, SweepResult& r) {
  const Curve c = run_curve(cfg, {cfg.channel(), cfg.mass, cfg.noise_intensity, 0}, r.axis);
  const double peak = max_of(c.mean);
  r.series.push_back({"c_l", c.c_l});
  r.series.push_back({"mean_c_ln", c.mean});
  for (double f : cfg.levels) {
    const std::string suffix = "_" + level_name("t", f);
    const double threshold = f * peak;
    const auto bits = demod_bits(c.mean, threshold);
    r.series.push_back({"demod" + suffix, bits});
    r.series.push_back({"success_rate" + suffix, success_rate(cfg, 0, c.c_l, c.noise, threshold)});
    r.scalars["threshold" + suffix] = threshold;
    r.scalars["demod_distance" + suffix] = demod_distance(r.axis, bits);
  }
  add_noise_scalars(r, "", c);
  r.scalars["max_mean_c_ln"] = peak;
  r.scalars["reach"] = reach(r.axis, c.mean, cfg.floor_fraction);
  if (!(peak > 0.0)) r.flags.emplace_back("no_signal");
}

double verdict_code(rsk::Verdict v) {
  switch (v) {
    case rsk::Verdict::decoded: return 1.0;
    case rsk::Verdict::corrupted: return 0.0;
    case rsk::Verdict::silent: return -1.0;
  }
  return 0.0;
}

void run_rsk(const AnalysisConfig& cfg, SweepResult& r) {
  const auto chan = cfg.channel();
  double x_a = 0.0;
  double reach_clean = 0.0;
  const auto base =
      series_noise(cfg, chan, cfg.blend.mass_a, cfg.noise_intensity, x_a, reach_clean);
  r.scalars["x_a"] = x_a;
  r.scalars["reach_clean"] = reach_clean;
  r.scalars["mu"] = base.intensity * base.mu;
  r.scalars["sigma"] = base.intensity * base.sigma;
  const receiver::ReceiverLocation first{r.axis.front(), cfg.y_r, cfg.z_r};
  r.scalars["noiseless_ratio"] =
      receiver::leaf_concentration(cfg.leaf, chan, cfg.blend.mass_b, first, cfg.tau_r) /
      receiver::leaf_concentration(cfg.leaf, chan, cfg.blend.mass_a, first, cfg.tau_r);

  for (double n : cfg.levels) {
    rsk::BlendSpec blend = cfg.blend;
    blend.noise_mult_a = 1.0;
    blend.noise_mult_b = n;
    auto profile = rsk::rsk_profile(blend, cfg.leaf, chan, base, cfg.window, r.axis, cfg.y_r,
                                    cfg.z_r, cfg.trials, cfg.seed, cfg.tau_r, cfg.threads);
    const std::string suffix = "_" + level_name("n", n);
    std::vector<double> codes(profile.verdict.size());
    for (std::size_t i = 0; i < codes.size(); ++i) codes[i] = verdict_code(profile.verdict[i]);
    r.series.push_back({"mean_c_a" + suffix, profile.mean_a});
    r.series.push_back({"mean_c_b" + suffix, profile.mean_b});
    r.series.push_back({"ratio" + suffix, profile.ratio});
    r.series.push_back({"verdict" + suffix, codes});
    r.scalars["decode_range" + suffix] = profile.decode_range;
    r.rsk_profiles.emplace_back(level_label(n), std::move(profile));
  }
}

}  // namespace

SweepResult run_analysis(const AnalysisConfig& config) {
  config.validate();
  SweepResult r;
  r.name = config.name.empty() ? std::string(to_string(config.kind)) : config.name;
  r.kind = config.kind;
  r.axis = config.grid.values();
  r.config_json = config_to_json(config);
  r.axis_name = "x";

  switch (config.kind) {
    case AnalysisKind::distance: run_distance(config, r); break;
    case AnalysisKind::distance_snr: run_distance_snr(config, r); break;
    case AnalysisKind::distance_delay: run_distance_delay(config, r); break;
    case AnalysisKind::distance_mass:
      run_family(config, r, "m", [&](CurveInput& in, double v) { in.mass = config.mass * v; });
      break;
    case AnalysisKind::wind:
      run_family(config, r, "u", [](CurveInput& in, double v) { in.chan.u = v; });
      break;
    case AnalysisKind::wind_delay:
      r.axis_name = "u";
      run_wind_delay(config, r);
      break;
    case AnalysisKind::eddy:
      run_family(config, r, "D", [](CurveInput& in, double v) {
        in.chan.diffusivity = channel::Diffusivity::constant(v);
      });
      break;
    case AnalysisKind::noise:
      run_family(config, r, "n", [](CurveInput& in, double v) { in.intensity = v; });
      break;
    case AnalysisKind::noise_snr:
      r.axis_name = "intensity";
      run_noise_snr(config, r);
      break;
    case AnalysisKind::threshold: run_threshold(config, r); break;
    case AnalysisKind::rsk: run_rsk(config, r); break;
  }
  return r;
}

SweepResult snr_sweep(const AnalysisConfig& config) {
  if (config.kind != AnalysisKind::distance_snr && config.kind != AnalysisKind::noise_snr)
    throw std::invalid_argument("kind: snr_sweep needs distance_snr or noise_snr");
  return run_analysis(config);
}

}  // namespace bvoc::experiments
