#include "bvoc_cli/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "bvoc/calibration.hpp"
#include "bvoc/channel.hpp"
#include "bvoc/csv.hpp"
#include "bvoc/experiments.hpp"
#include "bvoc/presets.hpp"
#include "bvoc/rsk.hpp"
#include "bvoc/transmitter.hpp"
#include "bvoc/version.hpp"
#include "json.hpp"

namespace bvoc::cli {

namespace fs = std::filesystem;
using nlohmann::json;

const std::vector<FitTarget>& fit_targets() {
  static const std::vector<FitTarget> targets{
      {"herbivory_lox_2", 0.9059},
      {"herbivory_lox_4", 0.9296},
      {"herbivory_lox_8", 0.8692},
      {"herbivory_monoterpene_2", 0.9457},
      {"herbivory_monoterpene_4", 0.9029},
      {"herbivory_monoterpene_8", 0.9215},
      {"methanol", 0.7889},
      {"heat_lox", 0.6232},
  };
  return targets;
}

namespace {

constexpr const char* kManifestName = "manifest.json";

/// Raised for a fit that produced no usable result; maps to kWarning.
struct FitWarning : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::string out = "bvoc_out";
  std::string format = "csv";
  unsigned threads = 1;
};

void add_output_options(CLI::App& cmd, Common& c) {
  cmd.add_option("--out", c.out, "Output directory")->capture_default_str();
  cmd.add_option("--format", c.format, "Table format")
      ->check(CLI::IsMember({"csv", "tsv"}))
      ->capture_default_str();
}

void add_run_options(CLI::App& cmd, Common& c) {
  cmd.add_option("--seed", c.seed,
                 "RNG seed (default " + std::to_string(experiments::kDefaultSeed) + ")");
  cmd.add_option("--trials", c.trials, "Monte Carlo trials per grid point (default 10000)")
      ->check(CLI::PositiveNumber);
  cmd.add_option("--threads", c.threads, "Worker threads, 0 = all cores (results do not change)")
      ->capture_default_str();
  add_output_options(cmd, c);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json_file(const fs::path& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(path.string() + ": malformed JSON: " + e.what());
  }
}

class OutputDir {
 public:
  explicit OutputDir(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  template <class Fn>
  void write(const std::string& name, Fn&& fn) {
    const fs::path path = dir_ / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    fn(out);
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + path.string());
    if (std::find(files_.begin(), files_.end(), name) == files_.end()) files_.push_back(name);
  }

  void write_text(const std::string& name, const std::string& text) {
    write(name, [&](std::ostream& o) { o << text; });
  }

  const fs::path& path() const { return dir_; }
  const std::vector<std::string>& files() const { return files_; }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

json manifest_base(std::string_view command) {
  json m;
  m["tool"] = "bvoc";
  m["version"] = kVersion;
  m["command"] = std::string(command);
  return m;
}

void write_manifest(OutputDir& dir, json manifest, const std::vector<std::string>& inputs) {
  manifest["inputs"] = inputs;
  manifest["outputs"] = dir.files();
  dir.write_text(kManifestName, manifest.dump(2) + "\n");
}

std::string absolute(const std::string& path) {
  return fs::absolute(fs::path(path)).lexically_normal().string();
}

// ---- sweep / rsk ---------------------------------------------------------

experiments::AnalysisConfig resolve_config(const std::string& target, std::vector<std::string>& inputs) {
  const auto names = presets::names();
  if (std::find(names.begin(), names.end(), target) != names.end()) return presets::get(target);
  const fs::path path(target);
  if (path.extension() == ".json" || fs::exists(path)) {
    if (!fs::exists(path)) throw std::invalid_argument("config file not found: " + target);
    inputs.push_back(absolute(target));
    try {
      return experiments::config_from_json(read_file(path));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(target + ": " + e.what());
    }
  }
  // Let the preset lookup produce the "available presets" diagnostic.
  return presets::get(target);
}

void apply_overrides(experiments::AnalysisConfig& cfg, const Common& c) {
  if (c.seed) cfg.seed = *c.seed;
  if (c.trials) cfg.trials = *c.trials;
  cfg.threads = c.threads;
  cfg.validate();
}

std::string file_stem(const experiments::SweepResult& r) {
  std::string s = r.name;
  for (char& ch : s) {
    if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' || ch == '.'))
      ch = '_';
  }
  return s;
}

void write_gnuplot(OutputDir& dir, const experiments::SweepResult& r) {
  for (const auto& s : r.series) {
    dir.write(file_stem(r) + "_" + s.name + ".dat", [&](std::ostream& o) {
      o << "# " << r.axis_name << ' ' << s.name << '\n';
      for (std::size_t i = 0; i < r.axis.size(); ++i)
        o << csv::format_double(r.axis[i]) << ' ' << csv::format_double(s.values[i]) << '\n';
    });
  }
}

void write_result(OutputDir& dir, const experiments::SweepResult& r, const std::string& format,
                  bool gnuplot, bool rsk_tables) {
  const char sep = csv::separator_for(format);
  dir.write(file_stem(r) + "." + format,
            [&](std::ostream& o) { experiments::write_sweep_csv(o, r, sep); });
  if (rsk_tables) {
    for (const auto& [label, profile] : r.rsk_profiles) {
      dir.write(file_stem(r) + "_n" + label + "." + format,
                [&](std::ostream& o) { rsk::write_rsk_csv(o, profile, sep); });
    }
  }
  if (gnuplot) write_gnuplot(dir, r);
}

void summarize(std::ostream& out, const experiments::SweepResult& r) {
  out << r.name << ":";
  for (const auto& [key, value] : r.scalars) {
    if (key.starts_with("reach") || key.starts_with("demod_distance") ||
        key.starts_with("decode_range") || key.starts_with("snr_crossing") || key == "x_a")
      out << ' ' << key << '=' << csv::format_double(value);
  }
  for (const auto& f : r.flags) out << " [" << f << ']';
  out << '\n';
}

/// Runs resolved configs and writes every output plus the manifest.
int run_configs(std::string_view command, const std::vector<experiments::AnalysisConfig>& configs,
                const fs::path& out_dir, const std::string& format, bool gnuplot,
                const std::vector<std::string>& inputs, std::ostream& out) {
  OutputDir dir(out_dir);
  json resolved = json::array();
  for (const auto& cfg : configs) {
    const auto result = experiments::run_analysis(cfg);
    write_result(dir, result, format, gnuplot, command == "rsk");
    resolved.push_back(json::parse(experiments::config_to_json(cfg)));
    summarize(out, result);
  }
  json m = manifest_base(command);
  m["format"] = format;
  m["gnuplot"] = gnuplot;
  m["configs"] = resolved;
  write_manifest(dir, m, inputs);
  return kOk;
}

/// "1/15" -> 15 (B noise relative to A); a bare number is taken as n.
double parse_noise_ratio(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return csv::parse_double(text);
    const double a = csv::parse_double(std::string_view(text).substr(0, slash));
    const double b = csv::parse_double(std::string_view(text).substr(slash + 1));
    if (!(a > 0.0)) throw std::invalid_argument("");
    return b / a;
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("--noise-ratio: expected A/B such as 1/15, got '" + text + "'");
  }
}

// ---- emit ----------------------------------------------------------------

double number_field(const json& obj, const std::string& file, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw std::invalid_argument(file + ": missing field '" + key + "'");
  if (!it->is_number()) throw std::invalid_argument(file + ": field '" + key + "' must be a number");
  return it->get<double>();
}

std::optional<double> optional_field(const json& obj, const std::string& file, const char* key) {
  if (!obj.contains(key)) return std::nullopt;
  return number_field(obj, file, key);
}

void require_object(const json& obj, const std::string& file,
                    std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) throw std::invalid_argument(file + ": expected a JSON object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw std::invalid_argument(file + ": unknown field '" + key + "'");
  }
}

struct StressFile {
  transmitter::StressProfile profile;
  std::optional<double> t0, t1;
};

StressFile read_stress_json(const std::string& file) {
  const json j = read_json_file(file);
  require_object(j, file, {"coefficients", "t0", "t1"});
  const auto it = j.find("coefficients");
  if (it == j.end()) throw std::invalid_argument(file + ": missing field 'coefficients'");
  if (!it->is_array() || it->empty())
    throw std::invalid_argument(file + ": field 'coefficients' must be a non-empty number array");
  std::vector<double> coeffs;
  for (const auto& v : *it) {
    if (!v.is_number())
      throw std::invalid_argument(file + ": field 'coefficients' must be a non-empty number array");
    coeffs.push_back(v.get<double>());
  }
  return {transmitter::StressProfile(coeffs), optional_field(j, file, "t0"),
          optional_field(j, file, "t1")};
}

struct GeneFile {
  transmitter::GeneParams params;
  std::optional<double> g0, dt;
};

GeneFile read_gene_json(const std::string& file) {
  const json j = read_json_file(file);
  require_object(j, file, {"v_max", "k_d", "w", "c", "g0", "dt"});
  GeneFile g;
  g.params.v_max = number_field(j, file, "v_max");
  g.params.k_d = number_field(j, file, "k_d");
  g.params.w = number_field(j, file, "w");
  g.params.c = number_field(j, file, "c");
  g.g0 = optional_field(j, file, "g0");
  g.dt = optional_field(j, file, "dt");
  try {
    g.params.validate();
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(file + ": " + e.what());
  }
  return g;
}

json stress_json(const transmitter::StressProfile& s, double t0, double t1) {
  return json{{"coefficients", s.coefficients()}, {"t0", t0}, {"t1", t1}};
}

json gene_json(const transmitter::GeneParams& p, double g0, double dt) {
  return json{{"v_max", p.v_max}, {"k_d", p.k_d}, {"w", p.w}, {"c", p.c}, {"g0", g0}, {"dt", dt}};
}

struct EmitArgs {
  std::string stress, gene, trace;
  std::vector<double> coefficients;
  std::optional<double> t0, t1, dt, g0, constitutive, epsilon;
};

int cmd_emit(const EmitArgs& a, const Common& c, std::ostream& out) {
  const char sep = csv::separator_for(c.format);
  std::vector<std::string> inputs;
  std::vector<std::string> argv{"emit"};
  transmitter::EmissionTrace trace;
  double epsilon = 0.0;

  if (!a.trace.empty()) {
    std::ifstream in(a.trace, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + a.trace);
    try {
      trace = transmitter::read_trace_csv(in, sep);
    } catch (const std::exception& e) {
      throw std::invalid_argument(a.trace + ": " + e.what());
    }
    inputs.push_back(absolute(a.trace));
    argv.insert(argv.end(), {"--trace", absolute(a.trace)});
    epsilon = a.epsilon.value_or(
        0.01 * std::max(1e-300, *std::max_element(trace.rate.begin(), trace.rate.end())));
  } else {
    if (a.gene.empty()) throw std::invalid_argument("emit: --gene (or --trace) is required");
    if (a.stress.empty() == a.coefficients.empty())
      throw std::invalid_argument("emit: give exactly one of --stress or --coefficients");
    StressFile stress;
    if (!a.stress.empty()) {
      stress = read_stress_json(a.stress);
      inputs.push_back(absolute(a.stress));
      argv.insert(argv.end(), {"--stress", absolute(a.stress)});
    } else {
      stress.profile = transmitter::StressProfile(a.coefficients);
      argv.push_back("--coefficients");
      for (double v : a.coefficients) argv.push_back(csv::format_double(v));
    }
    const GeneFile gene = read_gene_json(a.gene);
    inputs.push_back(absolute(a.gene));
    argv.insert(argv.end(), {"--gene", absolute(a.gene)});

    const double t0 = a.t0 ? *a.t0 : stress.t0.value_or(0.0);
    const double t1 = a.t1 ? *a.t1 : stress.t1.value_or(10.0);
    if (!(t1 > t0)) throw std::invalid_argument("emit: t1 must be > t0");
    const double dt = a.dt ? *a.dt : gene.dt.value_or((t1 - t0) / 1000.0);
    const double g0 = a.g0 ? *a.g0 : gene.g0.value_or(0.0);
    trace = transmitter::simulate_emission(gene.params, stress.profile, t0, t1, dt, g0);
    epsilon = a.epsilon.value_or(transmitter::default_epsilon(gene.params));
    for (auto [flag, v] : {std::pair{"--t0", a.t0}, {"--t1", a.t1}, {"--dt", a.dt}, {"--g0", a.g0}}) {
      if (v) argv.insert(argv.end(), {flag, csv::format_double(*v)});
    }
  }
  if (a.constitutive) argv.insert(argv.end(), {"--constitutive", csv::format_double(*a.constitutive)});
  if (a.epsilon) argv.insert(argv.end(), {"--epsilon", csv::format_double(*a.epsilon)});
  argv.insert(argv.end(), {"--format", c.format});

  // Without an explicit baseline, the rate at the first sample is taken as
  // the constitutive (pre-stress) emission.
  const double constitutive = a.constitutive.value_or(trace.rate.front());
  const auto message = transmitter::extract_message(trace, constitutive, epsilon);

  OutputDir dir(c.out);
  if (a.trace.empty()) {
    dir.write("emission." + c.format, [&](std::ostream& o) { transmitter::write_trace_csv(o, trace, sep); });
  }
  json summary{{"message", message.has_value()},
               {"constitutive_rate", constitutive},
               {"epsilon", epsilon}};
  if (message) {
    summary["mass"] = message->mass;
    summary["tau_b"] = message->tau_b;
    summary["tau_e"] = message->tau_e;
  }
  dir.write_text("summary.json", summary.dump(2) + "\n");
  json m = manifest_base("emit");
  m["argv"] = argv;
  write_manifest(dir, m, inputs);

  if (!message) {
    out << "no message: rate never exceeds the constitutive rate by epsilon\n";
    return kNoMessage;
  }
  out << "M=" << csv::format_double(message->mass) << " tau_b=" << csv::format_double(message->tau_b)
      << " tau_e=" << csv::format_double(message->tau_e) << '\n';
  return kOk;
}

// ---- fit -----------------------------------------------------------------

struct FitArgs {
  std::string emission, stress, stress_csv, target;
  std::optional<std::size_t> degree;
  std::optional<double> v_max;
  double g0 = 0.0;
  std::size_t starts = 4;
};

calibration::TimeSeries read_emission_series(const std::string& file, char sep) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + file);
  csv::Table table;
  try {
    table = csv::read_table(in, sep);
  } catch (const std::exception& e) {
    throw std::invalid_argument(file + ": " + e.what());
  }
  if (table.columns.size() < 2)
    throw std::invalid_argument(file + ": expected at least two columns (time and value)");
  auto pick = [&](std::initializer_list<std::string_view> names, std::size_t fallback) {
    for (auto n : names)
      for (std::size_t i = 0; i < table.header.size(); ++i)
        if (table.header[i] == n) return table.columns[i];
    return table.columns[fallback];
  };
  calibration::TimeSeries s{pick({"time"}, 0), pick({"value", "rate"}, 1)};
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(file + ": " + e.what());
  }
  return s;
}

int cmd_fit(const FitArgs& a, const Common& c, std::ostream& out, std::ostream& err) {
  const char sep = csv::separator_for(c.format);
  std::vector<std::string> inputs{absolute(a.emission)};
  std::vector<std::string> argv{"fit", "--emission", absolute(a.emission)};

  std::optional<FitTarget> target;
  if (!a.target.empty()) {
    for (const auto& t : fit_targets())
      if (a.target == t.name) target = t;
    if (!target) {
      std::string list;
      for (const auto& t : fit_targets()) list += std::string(list.empty() ? "" : ", ") + t.name;
      throw std::invalid_argument("--target: unknown target '" + a.target + "' (available: " + list + ")");
    }
    argv.insert(argv.end(), {"--target", a.target});
  }

  const auto emission = read_emission_series(a.emission, sep);
  transmitter::StressProfile stress;
  std::optional<std::size_t> suggested;
  if (!a.stress.empty() == !a.stress_csv.empty())
    throw std::invalid_argument("fit: give exactly one of --stress or --stress-csv");
  if (!a.stress.empty()) {
    stress = read_stress_json(a.stress).profile;
    inputs.push_back(absolute(a.stress));
    argv.insert(argv.end(), {"--stress", absolute(a.stress)});
  } else {
    const auto samples = read_emission_series(a.stress_csv, sep);
    inputs.push_back(absolute(a.stress_csv));
    argv.insert(argv.end(), {"--stress-csv", absolute(a.stress_csv)});
    std::size_t degree = 0;
    if (a.degree) {
      degree = *a.degree;
      argv.insert(argv.end(), {"--degree", std::to_string(degree)});
    } else {
      degree = calibration::suggest_degree(samples, std::min<std::size_t>(6, samples.size() - 2));
      suggested = degree;
      out << "stress polynomial degree " << degree << " (suggested by AICc; override with --degree)\n";
    }
    try {
      stress = calibration::fit_polynomial(samples, degree);
    } catch (const calibration::DegenerateFit& e) {
      throw FitWarning(std::string("degenerate stress fit: ") + e.what());
    }
  }

  calibration::FitOptions options;
  options.v_max = a.v_max;
  options.g0 = a.g0;
  options.starts = a.starts;
  if (a.v_max) argv.insert(argv.end(), {"--v-max", csv::format_double(*a.v_max)});
  argv.insert(argv.end(), {"--g0", csv::format_double(a.g0), "--starts", std::to_string(a.starts),
                           "--format", c.format});

  calibration::FitReport report;
  try {
    report = calibration::fit_gene_params(emission, stress, options);
  } catch (const calibration::DegenerateFit& e) {
    throw FitWarning(std::string("degenerate fit: ") + e.what());
  }

  const double t0 = emission.times.front();
  const double t1 = emission.times.back();
  const double dt = (t1 - t0) / 1000.0;
  OutputDir dir(c.out);

  json rep;
  rep["params"] = gene_json(report.params, a.g0, dt);
  rep["stress"] = stress_json(report.stress, t0, t1);
  rep["stress_degree"] = report.stress.degree();
  if (suggested) rep["stress_degree_suggested"] = *suggested;
  rep["r2"] = report.r2;
  rep["objective"] = report.objective;
  rep["v_max_from_data"] = report.v_max_from_data;
  rep["converged"] = report.converged;
  rep["evaluations"] = report.evaluations;
  rep["points"] = emission.size();
  if (target) rep["target"] = json{{"name", target->name}, {"r2", target->r2}, {"achieved", report.r2}};
  dir.write_text("fit_report.json", rep.dump(2) + "\n");

  const std::vector<std::string> header{"time", "value", "predicted", "residual"};
  dir.write("fitted_curve." + c.format, [&](std::ostream& o) {
    csv::write_table(o, header, {emission.times, emission.values, report.predicted, report.residuals}, sep);
  });
  dir.write_text("stress.json", stress_json(report.stress, t0, t1).dump(2) + "\n");
  dir.write_text("gene.json", gene_json(report.params, a.g0, dt).dump(2) + "\n");
  json m = manifest_base("fit");
  m["argv"] = argv;
  write_manifest(dir, m, inputs);

  out << "w=" << csv::format_double(report.params.w) << " c=" << csv::format_double(report.params.c)
      << " k_d=" << csv::format_double(report.params.k_d)
      << " v_max=" << csv::format_double(report.params.v_max)
      << " r2=" << csv::format_double(report.r2);
  if (target) out << " (target " << target->name << ": " << csv::format_double(target->r2) << ')';
  out << '\n';
  if (!report.converged) {
    err << "warning: simplex budget exhausted; best-so-far parameters reported\n";
    return kWarning;
  }
  return kOk;
}

// ---- delay ---------------------------------------------------------------

struct DelayArgs {
  double x = 10.0;
  double u = 25.0;
  double D = 0.1;
  std::string mode = "all";
};

int cmd_delay(const DelayArgs& a, const Common& c, bool write_files, std::ostream& out) {
  const channel::ChannelParams chan{a.u, channel::Diffusivity::constant(a.D), 1.0};
  chan.validate();
  if (!(a.x >= 0.0)) throw std::invalid_argument("--x must be >= 0");
  const std::vector<std::pair<std::string, channel::DelayMode>> modes{
      {"advective", channel::DelayMode::advective},
      {"diffusive", channel::DelayMode::diffusive},
      {"mixed", channel::DelayMode::mixed}};
  const char sep = csv::separator_for(c.format);
  std::ostringstream table;
  table << "mode" << sep << "delay_s\n";
  for (const auto& [name, mode] : modes) {
    if (a.mode != "all" && a.mode != name) continue;
    table << name << sep << csv::format_double(channel::delay(chan, a.x, mode)) << '\n';
  }
  out << table.str();
  if (write_files) {
    OutputDir dir(c.out);
    dir.write_text("delay." + c.format, table.str());
    json m = manifest_base("delay");
    m["argv"] = std::vector<std::string>{"delay", "--x", csv::format_double(a.x), "--u",
                                         csv::format_double(a.u), "--D", csv::format_double(a.D),
                                         "--mode", a.mode, "--format", c.format};
    write_manifest(dir, m, {});
  }
  return kOk;
}

// ---- presets / replay ----------------------------------------------------

int cmd_presets(const std::string& show, std::ostream& out) {
  if (!show.empty()) {
    out << experiments::config_to_json(presets::get(show), 2) << '\n';
    return kOk;
  }
  for (const auto& name : presets::names()) {
    const auto cfg = presets::get(name);
    out << name << '\t' << experiments::to_string(cfg.kind) << '\t' << cfg.grid.points << " points ["
        << csv::format_double(cfg.grid.start) << ", " << csv::format_double(cfg.grid.stop) << "]\n";
  }
  return kOk;
}

int replay(const std::string& manifest_path, const std::optional<std::string>& out_override,
           unsigned threads, std::ostream& out, std::ostream& err) {
  const json m = read_json_file(manifest_path);
  if (!m.is_object() || !m.contains("command") || !m["command"].is_string())
    throw std::invalid_argument(manifest_path + ": not a bvoc manifest (missing 'command')");
  const fs::path out_dir =
      out_override ? fs::path(*out_override) : fs::absolute(fs::path(manifest_path)).parent_path();
  const std::string command = m["command"].get<std::string>();

  if (command == "sweep" || command == "rsk") {
    std::vector<experiments::AnalysisConfig> configs;
    for (const auto& cfg : m.at("configs")) {
      configs.push_back(experiments::config_from_json(cfg.dump()));
      configs.back().threads = threads;
    }
    const auto inputs = m.value("inputs", std::vector<std::string>{});
    return run_configs(command, configs, out_dir, m.value("format", std::string("csv")),
                       m.value("gnuplot", false), inputs, out);
  }
  if (!m.contains("argv") || !m["argv"].is_array())
    throw std::invalid_argument(manifest_path + ": manifest has no recorded arguments");
  auto args = m["argv"].get<std::vector<std::string>>();
  args.insert(args.end(), {"--out", out_dir.string()});
  return run(args, out, err);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"bvoc: plant stress signalling over volatile organic compounds", "bvoc"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(0, 1);

  std::string manifest;
  std::optional<std::string> replay_out;
  unsigned replay_threads = 1;
  app.add_option("--from-manifest", manifest, "Re-run the command recorded in a manifest");
  app.add_option("--out", replay_out, "Output directory for --from-manifest (default: the manifest's)");
  app.add_option("--threads", replay_threads, "Worker threads for --from-manifest");

  Common common;

  auto* sweep = app.add_subcommand("sweep", "Run analysis presets or config files");
  std::vector<std::string> targets;
  bool gnuplot = false;
  sweep->add_option("analyses", targets, "Preset names, 'all', or JSON config paths")->required();
  sweep->add_flag("--gnuplot", gnuplot, "Also write two-column .dat files per series");
  add_run_options(*sweep, common);

  auto* rsk_cmd = app.add_subcommand("rsk", "Ratio shift keying decode-range sweep");
  std::string rsk_target = "rsk";
  std::vector<std::string> noise_ratios;
  rsk_cmd->add_option("config", rsk_target, "RSK preset or JSON config")->capture_default_str();
  rsk_cmd->add_option("--noise-ratio", noise_ratios, "A/B noise ratio such as 1/15 (repeatable)");
  rsk_cmd->add_flag("--gnuplot", gnuplot, "Also write two-column .dat files per series");
  add_run_options(*rsk_cmd, common);

  auto* emit = app.add_subcommand("emit", "Simulate stress-induced emission and extract the message");
  EmitArgs emit_args;
  emit->add_option("--stress", emit_args.stress, "Stress JSON {coefficients, t0?, t1?}");
  emit->add_option("--coefficients", emit_args.coefficients, "Stress polynomial a0 a1 ...")->delimiter(',');
  emit->add_option("--gene", emit_args.gene, "Gene JSON {v_max, k_d, w, c, g0?, dt?}");
  emit->add_option("--trace", emit_args.trace, "Summarize an existing time,g,rate trace instead");
  emit->add_option("--t0", emit_args.t0, "Start time");
  emit->add_option("--t1", emit_args.t1, "End time");
  emit->add_option("--dt", emit_args.dt, "RK4 step");
  emit->add_option("--g0", emit_args.g0, "Initial gene product");
  emit->add_option("--constitutive", emit_args.constitutive,
                   "Constitutive rate (default: rate at the first sample)");
  emit->add_option("--epsilon", emit_args.epsilon, "Onset band (default: 1% of v_max)");
  add_output_options(*emit, common);

  auto* fit = app.add_subcommand("fit", "Calibrate stress polynomial and gene parameters");
  FitArgs fit_args;
  fit->add_option("--emission", fit_args.emission, "Emission CSV (time,value)")->required();
  fit->add_option("--stress", fit_args.stress, "Stress JSON with known coefficients");
  fit->add_option("--stress-csv", fit_args.stress_csv, "Stress samples CSV (time,value)");
  fit->add_option("--degree", fit_args.degree, "Stress polynomial degree (default: AICc suggestion)");
  fit->add_option("--v-max", fit_args.v_max, "Fix v_max (default: highest observed rate)");
  fit->add_option("--g0", fit_args.g0, "Gene product at the first sample")->capture_default_str();
  fit->add_option("--starts", fit_args.starts, "Simplex starts")->capture_default_str()->check(CLI::PositiveNumber);
  fit->add_option("--target", fit_args.target, "Compare r2 with a published target");
  add_output_options(*fit, common);

  auto* delay = app.add_subcommand("delay", "Advective, diffusive and mixed delays");
  DelayArgs delay_args;
  delay->add_option("--x", delay_args.x, "Receiver distance (m)")->capture_default_str();
  delay->add_option("--u", delay_args.u, "Wind speed (m/s)")->capture_default_str();
  delay->add_option("--D", delay_args.D, "Eddy diffusivity (m^2/s)")->capture_default_str();
  delay->add_option("--mode", delay_args.mode, "Delay form")
      ->check(CLI::IsMember({"all", "advective", "diffusive", "mixed"}))
      ->capture_default_str();
  auto* delay_out = delay->add_option("--out", common.out, "Also write delay table and manifest here");
  delay->add_option("--format", common.format, "Table format")->check(CLI::IsMember({"csv", "tsv"}));

  auto* list = app.add_subcommand("presets", "List embedded analysis presets");
  std::string show;
  list->add_option("--show", show, "Print one preset as JSON");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (!manifest.empty()) {
      if (!app.get_subcommands().empty())
        throw std::invalid_argument("--from-manifest cannot be combined with a subcommand");
      return replay(manifest, replay_out, replay_threads, out, err);
    }
    if (sweep->parsed()) {
      std::vector<std::string> inputs;
      std::vector<experiments::AnalysisConfig> configs;
      for (const auto& t : targets) {
        if (t == "all") {
          for (const auto& name : presets::names()) configs.push_back(presets::get(name));
        } else {
          configs.push_back(resolve_config(t, inputs));
        }
      }
      for (auto& cfg : configs) apply_overrides(cfg, common);
      return run_configs("sweep", configs, common.out, common.format, gnuplot, inputs, out);
    }
    if (rsk_cmd->parsed()) {
      std::vector<std::string> inputs;
      auto cfg = resolve_config(rsk_target, inputs);
      if (cfg.kind != experiments::AnalysisKind::rsk)
        throw std::invalid_argument(rsk_target + ": kind must be rsk");
      if (!noise_ratios.empty()) {
        cfg.levels.clear();
        for (const auto& r : noise_ratios) cfg.levels.push_back(parse_noise_ratio(r));
      }
      apply_overrides(cfg, common);
      return run_configs("rsk", {cfg}, common.out, common.format, gnuplot, inputs, out);
    }
    if (emit->parsed()) return cmd_emit(emit_args, common, out);
    if (fit->parsed()) return cmd_fit(fit_args, common, out, err);
    if (delay->parsed()) return cmd_delay(delay_args, common, delay_out->count() > 0, out);
    if (list->parsed()) return cmd_presets(show, out);
    out << app.help();
    return kUsageError;
  } catch (const FitWarning& e) {
    err << "warning: " << e.what() << '\n';
    return kWarning;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }
}

}  // namespace bvoc::cli
