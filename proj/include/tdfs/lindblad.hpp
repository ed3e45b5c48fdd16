#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "tdfs/algebra.hpp"

namespace tdfs {

/// Operator-valued function of time. Evaluated on demand, never cached.
using TimeOperator = std::function<ComplexMatrix(double)>;

/// One dissipation channel: rate * D[F(t)].
struct JumpChannel {
  TimeOperator op;
  double rate = 1.0;
  std::string name;
};

/// Time-dependent Markovian master equation
///
///   d rho/dt = -i[H(t), rho] + sum_a rate_a (F_a rho F_a^+ - 1/2 {F_a^+ F_a, rho}).
///
/// Breakpoints are the instants where any coefficient fails to be smooth.
/// Piecewise definitions must treat a breakpoint as belonging to the piece
/// on its left; integrators evaluate the right piece at nextafter(bp).
class LindbladModel {
 public:
  LindbladModel(std::size_t dim, TimeOperator hamiltonian, std::vector<JumpChannel> channels,
                std::vector<double> breakpoints = {});

  std::size_t dim() const { return dim_; }
  std::size_t channel_count() const { return channels_.size(); }
  const std::vector<JumpChannel>& channels() const { return channels_; }
  const std::vector<double>& breakpoints() const { return breakpoints_; }

  ComplexMatrix hamiltonian(double t) const;
  ComplexMatrix jump(std::size_t channel, double t) const;
  double rate(std::size_t channel) const { return channels_.at(channel).rate; }

  /// Throws if H(t) is not Hermitian within 1e-10 or any operator has the
  /// wrong shape at time t.
  void validate_at(double t) const;

 private:
  std::size_t dim_;
  TimeOperator hamiltonian_;
  std::vector<JumpChannel> channels_;
  std::vector<double> breakpoints_;
};

/// Density matrix checked on construction: Hermitian and unit trace within
/// 1e-10, smallest eigenvalue >= -1e-8.
class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix rho);

  static DensityMatrix pure(const Ket& psi);
  static DensityMatrix maximally_mixed(std::size_t dim);

  const ComplexMatrix& matrix() const { return rho_; }
  std::size_t dim() const { return static_cast<std::size_t>(rho_.rows()); }

 private:
  ComplexMatrix rho_;
};

struct StateDiagnostics {
  double trace_deviation = 0.0;
  double hermiticity_deviation = 0.0;
  double min_eigenvalue = 0.0;
  double purity = 0.0;
};

StateDiagnostics diagnose(const ComplexMatrix& rho);

struct StateTolerance {
  double trace = 1e-8;
  double hermiticity = 1e-8;
  double min_eigenvalue = -1e-8;

  bool accepts(const StateDiagnostics& d) const {
    return d.trace_deviation <= trace && d.hermiticity_deviation <= hermiticity &&
           d.min_eigenvalue >= min_eigenvalue;
  }
};

struct IntegratorConfig {
  double dt = 1e-3;
  bool renormalize_trace = false;
  /// Record every n-th step (the final point is always recorded).
  std::size_t record_every = 1;
  StateTolerance tolerance{};
};

/// States on a time grid together with the observables derived from them.
struct Trajectory {
  std::vector<double> times;
  std::vector<ComplexMatrix> states;
  std::vector<double> purity;
  std::vector<double> trace_deviation;
  std::vector<double> hermiticity_deviation;
  std::vector<double> min_eigenvalue;

  std::size_t size() const { return times.size(); }
  void append(double t, ComplexMatrix rho);
  double min_purity() const;
  double max_purity() const;
};

/// -i[H(t), rho] + sum_a rate_a (F rho F^+ - 1/2 {F^+F, rho}).
ComplexMatrix lindblad_rhs(const LindbladModel& model, double t, const ComplexMatrix& rho);

/// Fixed-step classical RK4 from t0 to t1. Steps are split so that every
/// model breakpoint in (t0, t1) is a grid point. Every recorded state is
/// checked against cfg.tolerance; a violation raises StateInvariantViolated.
Trajectory integrate(const LindbladModel& model, const DensityMatrix& rho0, double t0, double t1,
                     const IntegratorConfig& cfg);

/// [t0, interior breakpoints..., t1], sorted and deduplicated.
std::vector<double> time_pieces(double t0, double t1, std::span<const double> breakpoints);

/// Uniform step count for a piece of length len at nominal step dt.
std::size_t steps_for(double len, double dt);

double purity(const ComplexMatrix& rho);
double population(const ComplexMatrix& rho, const Ket& v);
double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace tdfs
