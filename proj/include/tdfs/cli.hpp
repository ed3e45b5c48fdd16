#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tdfs/conditions.hpp"
#include "tdfs/errors.hpp"
#include "tdfs/models.hpp"

/// Command-line front end: JSON experiment configs, CSV trajectories, JSON
/// reports and gnuplot scripts for the two example models.
namespace tdfs::cli {

/// Malformed, inconsistent or unusable experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Stable process exit codes.
enum ExitCode : int { kOk = 0, kVerdictFalse = 1, kConfigError = 2, kNumericalFailure = 3 };

enum class ModelKind { Xi, FiveLevel };
/// omega0 t / pi, or t in units of 1/gamma (gamma1 for the five-level model).
enum class TimeUnit { OmegaPi, InverseGamma };
enum class Propagator { Lindblad, Frame };

struct ExperimentConfig {
  ModelKind model = ModelKind::Xi;
  double r = 1.0;
  double r1 = 1.0;
  double r2 = 1.0;
  double omega0 = 0.1;
  double gamma = 1.0;
  double gamma1 = 1.0;
  double gamma2 = 1.0;
  double Omega = 1.0;
  models::ControlMode mode = models::ControlMode::Synthesized;
  models::Transition transition = models::Transition::Step;
  models::RampVariant ramp = models::RampVariant::Printed;
  bool freeze_printed = false;

  double start = 0.0;
  double end = 4.0;
  TimeUnit unit = TimeUnit::OmegaPi;
  /// Unset: 1e-3 min(1/gamma, 1/omega0, 1/max|H_ij|).
  std::optional<double> dt;
  std::size_t record_every = 1;
  Propagator propagator = Propagator::Lindblad;

  std::optional<std::filesystem::path> csv;
  std::optional<std::filesystem::path> report;

  /// Verification grid: cell midpoints, this many per constant-dimension
  /// segment overlapping the span.
  std::size_t grid = 200;
  double tol = 1e-9;
};

/// Parse and validate; unknown keys are rejected. Raises ConfigError.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& cfg);

models::ModelBundle build_model(const ExperimentConfig& cfg);

/// Span [t0, t1] in absolute time.
std::pair<double, double> time_span(const ExperimentConfig& cfg);
double default_dt(const ExperimentConfig& cfg, const models::ModelBundle& bundle);
std::vector<double> verification_grid(const ExperimentConfig& cfg, const SubspaceTrajectory& sub);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// One line of header, '.' decimal separator, 12 significant digits.
void write_csv(std::ostream& out, const Table& table);
void write_csv(const std::filesystem::path& path, const Table& table);

struct RunResult {
  Trajectory trajectory;
  Table table;
  DfsReport dfs;
  double dt = 0.0;
  double wall_seconds = 0.0;
  nlohmann::json report;
};

/// Integrate from the first tracked dark state over the configured span.
/// Numerical failures propagate as tdfs::Error.
RunResult simulate(const ExperimentConfig& cfg);
DfsReport verify(const ExperimentConfig& cfg);

int cmd_simulate(const std::filesystem::path& config, std::ostream& out, std::ostream& err);
int cmd_verify(const std::filesystem::path& config, std::optional<double> tol, std::ostream& out, std::ostream& err);

inline const std::vector<std::string> kFigures{"fig2a", "fig2b", "fig4a", "fig4b"};

/// Named simulation configs making up a figure.
std::vector<std::pair<std::string, ExperimentConfig>> figure_series(const std::string& figure);
int cmd_reproduce(const std::string& figure, const std::filesystem::path& outdir, unsigned jobs, std::ostream& out,
                  std::ostream& err);

/// Full argv dispatcher used by the executable.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tdfs::cli
