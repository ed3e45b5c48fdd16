#include "tdfs/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tdfs {

LindbladModel::LindbladModel(std::size_t dim, TimeOperator hamiltonian, std::vector<JumpChannel> channels,
                             std::vector<double> breakpoints)
    : dim_(dim),
      hamiltonian_(std::move(hamiltonian)),
      channels_(std::move(channels)),
      breakpoints_(std::move(breakpoints)) {
  if (dim_ == 0) throw InvalidArgument("LindbladModel: dimension must be positive");
  if (!hamiltonian_) throw InvalidArgument("LindbladModel: missing Hamiltonian");
  for (const auto& ch : channels_) {
    if (!ch.op) throw InvalidArgument("LindbladModel: channel without operator");
    if (!(ch.rate >= 0.0)) throw InvalidArgument("LindbladModel: negative channel rate");
  }
  std::sort(breakpoints_.begin(), breakpoints_.end());
  breakpoints_.erase(std::unique(breakpoints_.begin(), breakpoints_.end()), breakpoints_.end());
}

ComplexMatrix LindbladModel::hamiltonian(double t) const {
  ComplexMatrix h = hamiltonian_(t);
  if (static_cast<std::size_t>(h.rows()) != dim_ || static_cast<std::size_t>(h.cols()) != dim_) {
    throw DimensionMismatch("LindbladModel: Hamiltonian has wrong shape");
  }
  return h;
}

ComplexMatrix LindbladModel::jump(std::size_t channel, double t) const {
  ComplexMatrix f = channels_.at(channel).op(t);
  if (static_cast<std::size_t>(f.rows()) != dim_ || static_cast<std::size_t>(f.cols()) != dim_) {
    throw DimensionMismatch("LindbladModel: jump operator has wrong shape");
  }
  return f;
}

void LindbladModel::validate_at(double t) const {
  const ComplexMatrix h = hamiltonian(t);
  if (hermiticity_deviation(h) > 1e-10) throw InvalidArgument("LindbladModel: Hamiltonian is not Hermitian");
  for (std::size_t k = 0; k < channels_.size(); ++k) (void)jump(k, t);
}

DensityMatrix::DensityMatrix(ComplexMatrix rho) : rho_(std::move(rho)) {
  if (rho_.rows() != rho_.cols() || rho_.rows() == 0) throw NonSquare("DensityMatrix: matrix is not square");
  const auto d = diagnose(rho_);
  if (d.hermiticity_deviation > 1e-10 || d.trace_deviation > 1e-10 || d.min_eigenvalue < -1e-8) {
    throw StateInvariantViolated("DensityMatrix: not a valid density matrix");
  }
}

DensityMatrix DensityMatrix::pure(const Ket& psi) {
  const double n = psi.norm();
  if (!(n > 0.0)) throw InvalidArgument("DensityMatrix::pure: zero vector");
  const Ket u = psi / n;
  return DensityMatrix(u * u.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  return DensityMatrix(ComplexMatrix::Identity(n, n) / static_cast<double>(dim));
}

StateDiagnostics diagnose(const ComplexMatrix& rho) {
  StateDiagnostics d;
  d.trace_deviation = std::abs(rho.trace() - Complex(1.0, 0.0));
  d.hermiticity_deviation = hermiticity_deviation(rho);
  d.min_eigenvalue = hermitian_eigenvalues(rho)(0);
  d.purity = purity(rho);
  return d;
}

void Trajectory::append(double t, ComplexMatrix rho) {
  const auto d = diagnose(rho);
  times.push_back(t);
  states.push_back(std::move(rho));
  purity.push_back(d.purity);
  trace_deviation.push_back(d.trace_deviation);
  hermiticity_deviation.push_back(d.hermiticity_deviation);
  min_eigenvalue.push_back(d.min_eigenvalue);
}

double Trajectory::min_purity() const { return *std::min_element(purity.begin(), purity.end()); }
double Trajectory::max_purity() const { return *std::max_element(purity.begin(), purity.end()); }

ComplexMatrix lindblad_rhs(const LindbladModel& model, double t, const ComplexMatrix& rho) {
  const auto n = static_cast<Eigen::Index>(model.dim());
  if (rho.rows() != n || rho.cols() != n) throw DimensionMismatch("lindblad_rhs: state has wrong dimension");
  const ComplexMatrix h = model.hamiltonian(t);
  ComplexMatrix out = -kI * (h * rho - rho * h);
  for (std::size_t k = 0; k < model.channel_count(); ++k) {
    const double g = model.rate(k);
    if (g == 0.0) continue;
    const ComplexMatrix f = model.jump(k, t);
    const ComplexMatrix fd = f.adjoint();
    const ComplexMatrix fdf = fd * f;
    out += g * (f * rho * fd - 0.5 * (fdf * rho + rho * fdf));
  }
  return out;
}

std::vector<double> time_pieces(double t0, double t1, std::span<const double> breakpoints) {
  std::vector<double> pts{t0};
  for (double b : breakpoints) {
    if (b > t0 && b < t1) pts.push_back(b);
  }
  pts.push_back(t1);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

std::size_t steps_for(double len, double dt) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / dt - 1e-9)));
}

Trajectory integrate(const LindbladModel& model, const DensityMatrix& rho0, double t0, double t1,
                     const IntegratorConfig& cfg) {
  if (!(cfg.dt > 0.0)) throw InvalidArgument("integrate: dt must be positive");
  if (!(t1 > t0)) throw InvalidArgument("integrate: t1 must exceed t0");
  if (rho0.dim() != model.dim()) throw DimensionMismatch("integrate: initial state has wrong dimension");
  model.validate_at(t0);

  const auto& bps = model.breakpoints();
  const auto is_breakpoint = [&](double t) { return std::binary_search(bps.begin(), bps.end(), t); };
  const auto pieces = time_pieces(t0, t1, bps);
  const std::size_t every = std::max<std::size_t>(1, cfg.record_every);

  Trajectory traj;
  ComplexMatrix rho = rho0.matrix();
  const auto record = [&](double t) {
    traj.append(t, rho);
    const auto i = traj.size() - 1;
    const StateDiagnostics d{traj.trace_deviation[i], traj.hermiticity_deviation[i], traj.min_eigenvalue[i],
                             traj.purity[i]};
    if (!cfg.tolerance.accepts(d)) {
      throw StateInvariantViolated("integrate: state invariants violated at t = " + std::to_string(t) +
                                   " (trace dev " + std::to_string(d.trace_deviation) + ", min eig " +
                                   std::to_string(d.min_eigenvalue) + ")");
    }
  };
  record(t0);

  std::size_t step_count = 0;
  for (std::size_t p = 0; p + 1 < pieces.size(); ++p) {
    const double a = pieces[p];
    const double b = pieces[p + 1];
    const std::size_t n = steps_for(b - a, cfg.dt);
    const double h = (b - a) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double ts = a + static_cast<double>(i) * h;
      const double te = (i + 1 == n) ? b : a + static_cast<double>(i + 1) * h;
      const double hs = te - ts;
      const double t_eval = (i == 0 && is_breakpoint(a)) ? std::nextafter(a, b) : ts;

      const ComplexMatrix k1 = lindblad_rhs(model, t_eval, rho);
      const ComplexMatrix k2 = lindblad_rhs(model, ts + 0.5 * hs, rho + 0.5 * hs * k1);
      const ComplexMatrix k3 = lindblad_rhs(model, ts + 0.5 * hs, rho + 0.5 * hs * k2);
      const ComplexMatrix k4 = lindblad_rhs(model, te, rho + hs * k3);
      rho += (hs / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      if (cfg.renormalize_trace) rho /= rho.trace();

      ++step_count;
      const bool last = (p + 2 == pieces.size()) && (i + 1 == n);
      if (last || step_count % every == 0) record(te);
    }
  }
  return traj;
}

double purity(const ComplexMatrix& rho) {
  if (rho.rows() != rho.cols()) throw NonSquare("purity: matrix is not square");
  return (rho * rho).trace().real();
}

double population(const ComplexMatrix& rho, const Ket& v) {
  if (v.size() != rho.rows() || rho.rows() != rho.cols()) throw DimensionMismatch("population: dimension mismatch");
  if (std::abs(v.norm() - 1.0) > 1e-10) throw InvalidArgument("population: ket is not normalized");
  return v.dot(rho * v).real();
}

double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionMismatch("trace_distance: dimension mismatch");
  return 0.5 * hermitian_eigenvalues(a - b).cwiseAbs().sum();
}

}  // namespace tdfs
