#include "tdfs/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "tdfs/propagate.hpp"

namespace tdfs::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using models::ControlMode;
using models::RampVariant;
using models::Transition;

namespace {

template <typename E>
struct EnumName {
  E value;
  const char* name;
};

constexpr EnumName<ModelKind> kModelNames[] = {{ModelKind::Xi, "xi"}, {ModelKind::FiveLevel, "five_level"}};
constexpr EnumName<ControlMode> kModeNames[] = {{ControlMode::NoControl, "no_control"},
                                                {ControlMode::PaperPrinted, "printed"},
                                                {ControlMode::Synthesized, "synthesized"}};
constexpr EnumName<Transition> kTransitionNames[] = {{Transition::Step, "step"}, {Transition::Always, "always"}};
constexpr EnumName<RampVariant> kRampNames[] = {{RampVariant::Printed, "printed"},
                                                {RampVariant::Continuous, "continuous"}};
constexpr EnumName<TimeUnit> kUnitNames[] = {{TimeUnit::OmegaPi, "omega0_t_over_pi"},
                                             {TimeUnit::InverseGamma, "inverse_gamma"}};
constexpr EnumName<Propagator> kPropagatorNames[] = {{Propagator::Lindblad, "lindblad"}, {Propagator::Frame, "frame"}};

template <typename E, std::size_t N>
E enum_from(const json& j, const char* key, const EnumName<E> (&table)[N]) {
  if (!j.is_string()) throw ConfigError(std::string(key) + ": expected a string");
  const auto s = j.get<std::string>();
  for (const auto& e : table) {
    if (s == e.name) return e.value;
  }
  std::string options;
  for (const auto& e : table) options += std::string(options.empty() ? "" : ", ") + e.name;
  throw ConfigError(std::string(key) + ": unknown value '" + s + "' (expected one of " + options + ")");
}

template <typename E, std::size_t N>
const char* enum_name(E v, const EnumName<E> (&table)[N]) {
  for (const auto& e : table) {
    if (e.value == v) return e.name;
  }
  return "?";
}

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [k, v] : j.items()) {
    if (!known.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
  }
}

double number(const json& j, const char* key) {
  if (!j.is_number()) throw ConfigError(std::string(key) + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(std::string(key) + ": must be finite");
  return v;
}

std::size_t count(const json& j, const char* key) {
  if (!j.is_number_integer() || j.get<long long>() < 1) throw ConfigError(std::string(key) + ": expected an integer >= 1");
  return j.get<std::size_t>();
}

void check_writable(const fs::path& p, const char* key) {
  if (p.empty()) throw ConfigError(std::string(key) + ": empty path");
  const fs::path parent = p.has_parent_path() ? p.parent_path() : fs::path(".");
  if (!fs::is_directory(parent)) throw ConfigError(std::string(key) + ": directory " + parent.string() + " does not exist");
  if (fs::is_directory(p)) throw ConfigError(std::string(key) + ": " + p.string() + " is a directory");
}

double gamma_scale(const ExperimentConfig& cfg) { return cfg.model == ModelKind::Xi ? cfg.gamma : cfg.gamma1; }

json dfs_summary(const DfsReport& report) {
  json j = to_json(report);
  j.erase("samples");
  return j;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write " + path.string());
  f << j.dump(2) << '\n';
}

std::string format_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
  reject_unknown(j,
                 {"model", "r", "r1", "r2", "omega0", "gamma", "gamma1", "gamma2", "Omega", "mode", "transition", "ramp",
                  "freeze_printed", "time", "dt", "record_every", "propagator", "output", "verify"},
                 "config");
  ExperimentConfig c;
  if (!j.contains("model")) throw ConfigError("config: missing key 'model'");
  c.model = enum_from(j["model"], "model", kModelNames);
  if (c.model == ModelKind::FiveLevel) c.omega0 = 1.0;

  for (auto [key, dst] : {std::pair{"r", &c.r}, {"r1", &c.r1}, {"r2", &c.r2}, {"omega0", &c.omega0},
                          {"gamma", &c.gamma}, {"gamma1", &c.gamma1}, {"gamma2", &c.gamma2}, {"Omega", &c.Omega}}) {
    if (j.contains(key)) *dst = number(j[key], key);
  }
  if (j.contains("mode")) c.mode = enum_from(j["mode"], "mode", kModeNames);
  if (j.contains("transition")) c.transition = enum_from(j["transition"], "transition", kTransitionNames);
  if (j.contains("ramp")) c.ramp = enum_from(j["ramp"], "ramp", kRampNames);
  if (j.contains("freeze_printed")) {
    if (!j["freeze_printed"].is_boolean()) throw ConfigError("freeze_printed: expected a boolean");
    c.freeze_printed = j["freeze_printed"].get<bool>();
  }
  if (j.contains("time")) {
    const json& t = j["time"];
    reject_unknown(t, {"start", "end", "unit"}, "time");
    if (t.contains("start")) c.start = number(t["start"], "time.start");
    if (t.contains("end")) c.end = number(t["end"], "time.end");
    if (t.contains("unit")) c.unit = enum_from(t["unit"], "time.unit", kUnitNames);
  }
  if (j.contains("dt")) c.dt = number(j["dt"], "dt");
  if (j.contains("record_every")) c.record_every = count(j["record_every"], "record_every");
  if (j.contains("propagator")) c.propagator = enum_from(j["propagator"], "propagator", kPropagatorNames);
  if (j.contains("output")) {
    const json& o = j["output"];
    reject_unknown(o, {"csv", "report"}, "output");
    for (auto [key, dst] : {std::pair{"csv", &c.csv}, {"report", &c.report}}) {
      if (!o.contains(key)) continue;
      if (!o[key].is_string()) throw ConfigError(std::string("output.") + key + ": expected a string");
      *dst = fs::path(o[key].get<std::string>());
    }
  }
  if (j.contains("verify")) {
    const json& v = j["verify"];
    reject_unknown(v, {"grid", "tol"}, "verify");
    if (v.contains("grid")) c.grid = count(v["grid"], "verify.grid");
    if (v.contains("tol")) c.tol = number(v["tol"], "verify.tol");
  }

  for (auto [key, v] : {std::pair{"gamma", c.gamma}, {"gamma1", c.gamma1}, {"gamma2", c.gamma2}}) {
    if (!(v > 0.0)) throw ConfigError(std::string(key) + ": must be positive");
  }
  for (auto [key, v] : {std::pair{"r", c.r}, {"r1", c.r1}, {"r2", c.r2}, {"omega0", c.omega0}}) {
    if (v < 0.0) throw ConfigError(std::string(key) + ": must be non-negative");
  }
  if (c.model == ModelKind::FiveLevel && !(c.omega0 > 0.0)) {
    throw ConfigError("omega0: the five-level model needs omega0 > 0");
  }
  if (c.unit == TimeUnit::OmegaPi && !(c.omega0 > 0.0)) {
    throw ConfigError("time.unit: omega0_t_over_pi needs omega0 > 0");
  }
  if (c.start < 0.0) throw ConfigError("time.start: must be non-negative");
  if (!(c.end > c.start)) throw ConfigError("time: end must exceed start");
  if (c.dt && !(*c.dt > 0.0)) throw ConfigError("dt: must be positive");
  if (!(c.tol > 0.0)) throw ConfigError("verify.tol: must be positive");
  if (c.csv) check_writable(*c.csv, "output.csv");
  if (c.report) check_writable(*c.report, "output.report");
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(f);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return parse_config(j);
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["model"] = enum_name(c.model, kModelNames);
  if (c.model == ModelKind::Xi) {
    j["r"] = c.r;
    j["gamma"] = c.gamma;
    j["freeze_printed"] = c.freeze_printed;
  } else {
    j["r1"] = c.r1;
    j["r2"] = c.r2;
    j["gamma1"] = c.gamma1;
    j["gamma2"] = c.gamma2;
    j["Omega"] = c.Omega;
    j["transition"] = enum_name(c.transition, kTransitionNames);
    j["ramp"] = enum_name(c.ramp, kRampNames);
  }
  j["omega0"] = c.omega0;
  j["mode"] = enum_name(c.mode, kModeNames);
  j["time"] = {{"start", c.start}, {"end", c.end}, {"unit", enum_name(c.unit, kUnitNames)}};
  if (c.dt) j["dt"] = *c.dt;
  j["record_every"] = c.record_every;
  j["propagator"] = enum_name(c.propagator, kPropagatorNames);
  json out = json::object();
  if (c.csv) out["csv"] = c.csv->string();
  if (c.report) out["report"] = c.report->string();
  j["output"] = out;
  j["verify"] = {{"grid", c.grid}, {"tol", c.tol}};
  return j;
}

models::ModelBundle build_model(const ExperimentConfig& c) {
  if (c.model == ModelKind::Xi) return models::xi_model({c.r, c.omega0, c.gamma, c.mode, c.freeze_printed});
  return models::five_level_model(
      {c.r1, c.r2, c.omega0, c.gamma1, c.gamma2, c.Omega, c.transition, c.mode, c.ramp});
}

std::pair<double, double> time_span(const ExperimentConfig& c) {
  const double scale = c.unit == TimeUnit::OmegaPi ? std::numbers::pi / c.omega0 : 1.0 / gamma_scale(c);
  return {c.start * scale, c.end * scale};
}

double default_dt(const ExperimentConfig& c, const models::ModelBundle& bundle) {
  double fastest = c.model == ModelKind::Xi ? c.gamma : std::max(c.gamma1, c.gamma2);
  fastest = std::max(fastest, c.omega0);
  const auto [t0, t1] = time_span(c);
  constexpr int kSamples = 256;
  double max_field = 0.0;
  for (int i = 0; i <= kSamples; ++i) {
    const double t = t0 + (t1 - t0) * i / kSamples;
    max_field = std::max(max_field, bundle.model.hamiltonian(t).cwiseAbs().maxCoeff());
  }
  fastest = std::max(fastest, max_field);
  return 1e-3 / fastest;
}

std::vector<double> verification_grid(const ExperimentConfig& c, const SubspaceTrajectory& sub) {
  const auto [t0, t1] = time_span(c);
  std::vector<double> grid;
  for (std::size_t k = 0; k < sub.segments().size(); ++k) {
    const double lo = std::max(sub.segment(k).begin, t0);
    const double hi = std::min(sub.segment(k).end, t1);
    if (!(hi > lo)) continue;
    for (std::size_t i = 0; i < c.grid; ++i) {
      grid.push_back(lo + (static_cast<double>(i) + 0.5) * (hi - lo) / static_cast<double>(c.grid));
    }
  }
  return grid;
}

void write_csv(std::ostream& out, const Table& table) {
  for (std::size_t i = 0; i < table.header.size(); ++i) out << (i ? "," : "") << table.header[i];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_g(row[i]);
    out << '\n';
  }
}

void write_csv(const fs::path& path, const Table& table) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write " + path.string());
  write_csv(f, table);
}

RunResult simulate(const ExperimentConfig& c) {
  const auto start = std::chrono::steady_clock::now();
  const auto bundle = build_model(c);
  const auto [t0, t1] = time_span(c);
  RunResult res;
  res.dt = c.dt.value_or(default_dt(c, bundle));
  IntegratorConfig ic;
  ic.dt = res.dt;
  ic.record_every = c.record_every;
  const auto rho0 = DensityMatrix::pure(bundle.tracked_states(t0).front());
  res.trajectory = c.propagator == Propagator::Lindblad
                       ? integrate(bundle.model, rho0, t0, t1, ic)
                       : frame_propagate(bundle.model, bundle.subspace, rho0, t0, t1, ic, c.tol);

  const bool two = bundle.tracked_names.size() > 1;
  res.table.header = {"t", "omega0_t_over_pi", "purity", "trace_dev", "min_eig", "pop_DF1"};
  if (two) res.table.header.push_back("pop_DF2");
  res.table.header.push_back("pop_DFS_total");
  const auto& tr = res.trajectory;
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const double t = tr.times[i];
    const auto df = bundle.tracked_states(t);
    std::vector<double> row{t, c.omega0 * t / std::numbers::pi, tr.purity[i], tr.trace_deviation[i],
                            tr.min_eigenvalue[i], population(tr.states[i], df[0])};
    if (two) row.push_back(population(tr.states[i], df[1]));
    const std::size_t seg = bundle.subspace.segment_of(t);
    row.push_back((tr.states[i] * bundle.subspace.projector(seg, t)).trace().real());
    res.table.rows.push_back(std::move(row));
  }

  const auto grid = verification_grid(c, bundle.subspace);
  res.dfs = verify_tdfs(bundle.model, bundle.subspace, grid, c.tol);
  res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  res.report = {{"config", to_json(c)},
                {"dt", res.dt},
                {"span", {t0, t1}},
                {"rows", tr.size()},
                {"purity", {{"min", tr.min_purity()}, {"max", tr.max_purity()}}},
                {"final_trace_deviation", tr.trace_deviation.back()},
                {"dfs", dfs_summary(res.dfs)},
                {"wall_clock_seconds", res.wall_seconds}};
  return res;
}

DfsReport verify(const ExperimentConfig& c) {
  const auto bundle = build_model(c);
  return verify_tdfs(bundle.model, bundle.subspace, verification_grid(c, bundle.subspace), c.tol);
}

int cmd_simulate(const fs::path& config, std::ostream& out, std::ostream& err) {
  ExperimentConfig c;
  try {
    c = load_config(config);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  RunResult res;
  try {
    res = simulate(c);
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  }
  try {
    if (c.csv) write_csv(*c.csv, res.table);
    if (c.report) {
      write_json(*c.report, res.report);
    } else {
      out << res.report.dump(2) << '\n';
    }
  } catch (const ConfigError& e) {
    err << "output error: " << e.what() << '\n';
    return kConfigError;
  }
  return kOk;
}

int cmd_verify(const fs::path& config, std::optional<double> tol, std::ostream& out, std::ostream& err) {
  ExperimentConfig c;
  try {
    c = load_config(config);
    if (tol) {
      if (!(*tol > 0.0)) throw ConfigError("--tol: must be positive");
      c.tol = *tol;
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  DfsReport report;
  try {
    report = verify(c);
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  }
  json j = to_json(report);
  j["config"] = to_json(c);
  try {
    if (c.report) {
      write_json(*c.report, j);
    } else {
      out << j.dump(2) << '\n';
    }
  } catch (const ConfigError& e) {
    err << "output error: " << e.what() << '\n';
    return kConfigError;
  }
  for (const auto& s : report.segments) {
    err << "segment " << s.segment << " [" << s.begin << ", " << s.end << "] dim " << s.dfs_dim
        << ": eigencondition " << (s.eigencondition ? "ok" : "FAIL") << " (" << s.max_eigencondition_residual
        << "), invariance " << (s.invariance ? "ok" : "FAIL") << " (" << s.max_invariance_residual << ")\n";
  }
  err << "verdict: " << (report.verdict() ? "t-DFS" : "not a t-DFS") << '\n';
  return report.verdict() ? kOk : kVerdictFalse;
}

std::vector<std::pair<std::string, ExperimentConfig>> figure_series(const std::string& figure) {
  std::vector<std::pair<std::string, ExperimentConfig>> series;
  if (figure == "fig2a" || figure == "fig2b") {
    ExperimentConfig c;
    c.model = ModelKind::Xi;
    c.r = 1.0;
    c.gamma = 1.0;
    c.omega0 = figure == "fig2a" ? 0.1 : 10.0;
    c.end = 4.0;
    c.mode = ControlMode::Synthesized;
    series.emplace_back("controlled", c);
    c.mode = ControlMode::NoControl;
    series.emplace_back("uncontrolled", c);
  } else if (figure == "fig4a" || figure == "fig4b") {
    ExperimentConfig c;
    c.model = ModelKind::FiveLevel;
    c.omega0 = 1.0;
    c.end = 2.0;
    series.emplace_back("step", c);
    if (figure == "fig4b") {
      c.transition = Transition::Always;
      series.emplace_back("always", c);
    }
  } else {
    throw ConfigError("unknown figure '" + figure + "'");
  }
  // About 2000 rows per series.
  for (auto& [name, c] : series) {
    const double steps = (time_span(c).second - time_span(c).first) / default_dt(c, build_model(c));
    c.record_every = std::max<std::size_t>(1, static_cast<std::size_t>(steps / 2000.0));
  }
  return series;
}

namespace {

std::string gnuplot_script(const std::string& figure) {
  std::ostringstream s;
  s << "# " << figure << ": generated by tdfs reproduce\n"
    << "set terminal pngcairo size 800,500\n"
    << "set output '" << figure << ".png'\n"
    << "set datafile separator ','\n"
    << "set xlabel 'omega_0 t / pi'\n"
    << "set key bottom left\n";
  if (figure == "fig2a" || figure == "fig2b") {
    s << "set ylabel 'P(t)'\n"
      << "plot '" << figure << "_controlled.csv' skip 1 using 2:3 with lines dt 2 lw 2 title 'time-dependent H', \\\n"
      << "     '" << figure << "_uncontrolled.csv' skip 1 using 2:3 with lines lw 2 title 'time-independent H'\n";
  } else if (figure == "fig4a") {
    s << "set ylabel 'population'\n"
      << "plot 'fig4a_step.csv' skip 1 using 2:6 with lines dt 2 lw 2 title 'P_1', \\\n"
      << "     'fig4a_step.csv' skip 1 using 2:7 with lines lw 2 title 'P_2', \\\n"
      << "     'fig4a_step.csv' skip 1 using 2:($6+$7) with lines dt 3 lw 2 title 'P_1+P_2'\n";
  } else {
    s << "set ylabel 'P(t)'\n"
      << "plot 'fig4b_always.csv' skip 1 using 2:3 with lines dt 2 lw 2 title 'T(t) = 1', \\\n"
      << "     'fig4b_step.csv' skip 1 using 2:3 with lines lw 2 title 'T(t) = step'\n";
  }
  return s.str();
}

}  // namespace

int cmd_reproduce(const std::string& figure, const fs::path& outdir, unsigned jobs, std::ostream& out,
                  std::ostream& err) {
  std::vector<std::pair<std::string, ExperimentConfig>> series;
  try {
    series = figure_series(figure);
    fs::create_directories(outdir);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const fs::filesystem_error& e) {
    err << "output error: " << e.what() << '\n';
    return kConfigError;
  }

  std::vector<RunResult> results(series.size());
  try {
    if (jobs > 1) {
      std::vector<std::future<RunResult>> pending;
      for (const auto& [name, c] : series) pending.push_back(std::async(std::launch::async, simulate, c));
      for (std::size_t i = 0; i < pending.size(); ++i) results[i] = pending[i].get();
    } else {
      for (std::size_t i = 0; i < series.size(); ++i) results[i] = simulate(series[i].second);
    }
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  }

  try {
    json summary = json::object();
    for (std::size_t i = 0; i < series.size(); ++i) {
      const std::string stem = figure + "_" + series[i].first;
      write_csv(outdir / (stem + ".csv"), results[i].table);
      summary[series[i].first] = results[i].report;
      out << stem << ": rows " << results[i].table.rows.size() << ", min purity "
          << format_g(results[i].trajectory.min_purity()) << ", t-DFS "
          << (results[i].dfs.verdict() ? "yes" : "no") << '\n';
    }
    write_json(outdir / (figure + "_report.json"), summary);
    std::ofstream gp(outdir / (figure + ".gp"));
    if (!gp) throw ConfigError("cannot write " + (outdir / (figure + ".gp")).string());
    gp << gnuplot_script(figure);
  } catch (const ConfigError& e) {
    err << "output error: " << e.what() << '\n';
    return kConfigError;
  }
  return kOk;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Time-dependent decoherence-free subspace simulator", "tdfs"};
  app.require_subcommand(1);

  std::string config;
  std::optional<double> tol;
  std::string figure;
  std::string outdir = ".";
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());

  auto* sim = app.add_subcommand("simulate", "Integrate a configured model; write CSV and a run report");
  sim->add_option("--config", config, "JSON experiment config")->required();
  auto* ver = app.add_subcommand("verify", "Check the t-DFS conditions on the configured grid");
  ver->add_option("--config", config, "JSON experiment config")->required();
  ver->add_option("--tol", tol, "Residual tolerance (overrides the config)");
  auto* rep = app.add_subcommand("reproduce", "Regenerate the data and gnuplot script of a figure");
  rep->add_option("--figure", figure, "Figure id")->required()->check(CLI::IsMember(kFigures));
  rep->add_option("--outdir", outdir, "Output directory");
  rep->add_option("--jobs", jobs, "Parallel simulations")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  if (sim->parsed()) return cmd_simulate(config, out, err);
  if (ver->parsed()) return cmd_verify(config, tol, out, err);
  return cmd_reproduce(figure, outdir, jobs, out, err);
}

}  // namespace tdfs::cli
