#include "tdfs/conditions.hpp"

#include <algorithm>
#include <cmath>

namespace tdfs {
namespace {

std::vector<ComplexMatrix> jumps_at(const LindbladModel& model, double t) {
  std::vector<ComplexMatrix> out;
  out.reserve(model.channel_count());
  for (std::size_t k = 0; k < model.channel_count(); ++k) out.push_back(model.jump(k, t));
  return out;
}

std::vector<ComplexMatrix> jumps_at(std::span<const JumpChannel> channels, double t) {
  std::vector<ComplexMatrix> out;
  out.reserve(channels.size());
  for (const auto& ch : channels) out.push_back(ch.op(t));
  return out;
}

double invariance_residual(const ComplexMatrix& heff, const ComplexMatrix& frame, std::size_t m) {
  const auto n = frame.cols();
  const auto mi = static_cast<Eigen::Index>(m);
  const ComplexMatrix block = frame.rightCols(n - mi).adjoint() * heff * frame.leftCols(mi);
  return block.cwiseAbs().maxCoeff();
}

nlohmann::json complex_json(Complex c) { return {{"re", c.real()}, {"im", c.imag()}}; }

}  // namespace

EigenconditionResult check_eigencondition(std::span<const ComplexMatrix> jumps, std::span<const Ket> basis,
                                          double tol) {
  EigenconditionResult r;
  if (basis.empty()) throw InvalidArgument("check_eigencondition: empty basis");
  for (const auto& f : jumps) {
    const Complex c = basis.front().dot(f * basis.front());
    r.eigenvalues.push_back(c);
    for (const auto& v : basis) {
      const Ket fv = f * v;
      r.residual = std::max(r.residual, (fv - c * v).norm());
      r.spread = std::max(r.spread, std::abs(v.dot(fv) - c));
    }
  }
  r.passed = r.residual <= tol && r.spread <= tol;
  return r;
}

EigenconditionResult check_eigencondition_in(const LindbladModel& model, const SubspaceTrajectory& sub,
                                             std::size_t segment, double t, double tol) {
  const auto jumps = jumps_at(model, t);
  const auto basis = sub.basis(segment, t);
  return check_eigencondition(jumps, basis, tol);
}

EigenconditionResult check_eigencondition(const LindbladModel& model, const SubspaceTrajectory& sub, double t,
                                          double tol) {
  return check_eigencondition_in(model, sub, sub.segment_of(t), t, tol);
}

ComplexMatrix effective_hamiltonian_in(const LindbladModel& model, const SubspaceTrajectory& sub,
                                       std::size_t segment, double t, std::span<const Complex> c,
                                       DerivativeMode mode) {
  if (c.size() != model.channel_count()) throw DimensionMismatch("effective_hamiltonian: one eigenvalue per channel");
  if (sub.dim() != model.dim()) throw DimensionMismatch("effective_hamiltonian: model and subspace dimensions differ");
  ComplexMatrix heff = gauge_operator_in(sub, segment, t, mode) + model.hamiltonian(t);
  for (std::size_t k = 0; k < model.channel_count(); ++k) {
    const ComplexMatrix f = model.jump(k, t);
    heff += (0.5 * kI * model.rate(k)) * (std::conj(c[k]) * f - c[k] * f.adjoint());
  }
  return heff;
}

ComplexMatrix effective_hamiltonian(const LindbladModel& model, const SubspaceTrajectory& sub, double t,
                                    std::span<const Complex> c) {
  return effective_hamiltonian_in(model, sub, sub.segment_of(t), t, c, sub.preferred_mode());
}

ComplexMatrix effective_hamiltonian(const LindbladModel& model, const SubspaceTrajectory& sub, double t) {
  const auto eig = check_eigencondition(model, sub, t);
  return effective_hamiltonian(model, sub, t, eig.eigenvalues);
}

InvarianceResult check_invariance_in(const LindbladModel& model, const SubspaceTrajectory& sub, std::size_t segment,
                                     double t, double tol) {
  const auto eig = check_eigencondition_in(model, sub, segment, t, tol);
  const ComplexMatrix heff = effective_hamiltonian_in(model, sub, segment, t, eig.eigenvalues, sub.preferred_mode());
  InvarianceResult r;
  r.residual = invariance_residual(heff, sub.frame(segment, t), sub.segment(segment).dim);
  r.passed = r.residual <= tol;
  return r;
}

InvarianceResult check_invariance(const LindbladModel& model, const SubspaceTrajectory& sub, double t, double tol) {
  return check_invariance_in(model, sub, sub.segment_of(t), t, tol);
}

ComplexMatrix synthesize_control_in(std::span<const JumpChannel> channels, const SubspaceTrajectory& sub,
                                    std::size_t segment, double t, const SynthesisOptions& opts) {
  const auto basis = sub.basis(segment, t);
  const auto jumps = jumps_at(channels, t);
  const auto eig = check_eigencondition(jumps, basis, opts.tol);
  if (!eig.passed) {
    throw EigenconditionViolated("synthesize_control: basis is not a common eigenspace at t = " + std::to_string(t) +
                                 " (residual " + std::to_string(eig.residual) + ")");
  }

  const auto n = static_cast<Eigen::Index>(sub.dim());
  const ComplexMatrix b = as_columns(basis);
  const ComplexMatrix bd = as_columns(sub.basis_derivative(segment, t, sub.preferred_mode()));
  const ComplexMatrix perp = ComplexMatrix::Identity(n, n) - b * b.adjoint();

  // Rows <Phi_k|H restricted to the complement.
  ComplexMatrix rows = -kI * bd.adjoint();
  for (std::size_t k = 0; k < jumps.size(); ++k) {
    rows -= (0.5 * kI * channels[k].rate * std::conj(eig.eigenvalues[k])) * (b.adjoint() * jumps[k]);
  }
  const ComplexMatrix x = b * rows * perp;
  ComplexMatrix h = x + x.adjoint();

  if (opts.intra_block.size() > 0) {
    if (opts.intra_block.rows() != b.cols() || opts.intra_block.cols() != b.cols()) {
      throw DimensionMismatch("synthesize_control: intra-subspace block has wrong shape");
    }
    if (hermiticity_deviation(opts.intra_block) > 1e-12) {
      throw InvalidArgument("synthesize_control: intra-subspace block is not Hermitian");
    }
    h += b * opts.intra_block * b.adjoint();
  }
  return h;
}

ComplexMatrix synthesize_control(std::span<const JumpChannel> channels, const SubspaceTrajectory& sub, double t,
                                 const SynthesisOptions& opts) {
  return synthesize_control_in(channels, sub, sub.segment_of(t), t, opts);
}

double DfsReport::max_eigencondition_residual() const {
  double m = 0.0;
  for (const auto& s : samples) m = std::max(m, s.eigencondition_residual);
  return m;
}

double DfsReport::max_invariance_residual() const {
  double m = 0.0;
  for (const auto& s : samples) m = std::max(m, s.invariance_residual);
  return m;
}

DfsReport verify_tdfs(const LindbladModel& model, const SubspaceTrajectory& sub, std::span<const double> grid,
                      double tol) {
  DfsReport report;
  report.tolerance = tol;
  std::vector<SegmentVerdict> per_segment(sub.segments().size());
  for (std::size_t k = 0; k < per_segment.size(); ++k) {
    per_segment[k].segment = k;
    per_segment[k].begin = sub.segment(k).begin;
    per_segment[k].end = sub.segment(k).end;
    per_segment[k].dfs_dim = sub.segment(k).dim;
  }

  for (double t : grid) {
    DfsSample s;
    s.t = t;
    s.segment = sub.segment_of(t);
    s.dfs_dim = sub.segment(s.segment).dim;
    const auto eig = check_eigencondition_in(model, sub, s.segment, t, tol);
    s.eigenvalues = eig.eigenvalues;
    s.eigencondition_residual = eig.residual;
    s.eigenvalue_spread = eig.spread;
    s.eigencondition_ok = eig.passed;

    const ComplexMatrix g = gauge_operator_in(sub, s.segment, t, sub.preferred_mode());
    s.gauge_hermiticity_deviation = hermiticity_deviation(g);
    const ComplexMatrix heff =
        effective_hamiltonian_in(model, sub, s.segment, t, eig.eigenvalues, sub.preferred_mode());
    s.invariance_residual = invariance_residual(heff, sub.frame(s.segment, t), s.dfs_dim);
    s.invariance_ok = s.invariance_residual <= tol;

    auto& v = per_segment[s.segment];
    ++v.samples;
    v.max_eigencondition_residual = std::max(v.max_eigencondition_residual, s.eigencondition_residual);
    v.max_eigenvalue_spread = std::max(v.max_eigenvalue_spread, s.eigenvalue_spread);
    v.max_invariance_residual = std::max(v.max_invariance_residual, s.invariance_residual);
    v.eigencondition = v.eigencondition && s.eigencondition_ok;
    v.invariance = v.invariance && s.invariance_ok;
    report.eigencondition = report.eigencondition && s.eigencondition_ok;
    report.invariance = report.invariance && s.invariance_ok;
    report.samples.push_back(std::move(s));
  }
  for (auto& v : per_segment) {
    if (v.samples > 0) report.segments.push_back(v);
  }
  return report;
}

nlohmann::json to_json(const DfsReport& report) {
  nlohmann::json samples = nlohmann::json::array();
  for (const auto& s : report.samples) {
    nlohmann::json c = nlohmann::json::array();
    for (const auto& e : s.eigenvalues) c.push_back(complex_json(e));
    samples.push_back({{"t", s.t},
                       {"segment", s.segment},
                       {"dfs_dim", s.dfs_dim},
                       {"eigenvalues", c},
                       {"eigencondition_residual", s.eigencondition_residual},
                       {"eigenvalue_spread", s.eigenvalue_spread},
                       {"invariance_residual", s.invariance_residual},
                       {"gauge_hermiticity_deviation", s.gauge_hermiticity_deviation},
                       {"eigencondition_ok", s.eigencondition_ok},
                       {"invariance_ok", s.invariance_ok}});
  }
  nlohmann::json segments = nlohmann::json::array();
  for (const auto& v : report.segments) {
    segments.push_back({{"segment", v.segment},
                        {"begin", v.begin},
                        {"end", std::isfinite(v.end) ? nlohmann::json(v.end) : nlohmann::json(nullptr)},
                        {"dfs_dim", v.dfs_dim},
                        {"samples", v.samples},
                        {"max_eigencondition_residual", v.max_eigencondition_residual},
                        {"max_eigenvalue_spread", v.max_eigenvalue_spread},
                        {"max_invariance_residual", v.max_invariance_residual},
                        {"eigencondition", v.eigencondition},
                        {"invariance", v.invariance},
                        {"verdict", v.eigencondition && v.invariance}});
  }
  return {{"tolerance", report.tolerance},
          {"verdict",
           {{"eigencondition", report.eigencondition},
            {"invariance", report.invariance},
            {"tdfs", report.verdict()}}},
          {"max_eigencondition_residual", report.max_eigencondition_residual()},
          {"max_invariance_residual", report.max_invariance_residual()},
          {"segments", segments},
          {"samples", samples}};
}

}  // namespace tdfs
