#include "tdfs/propagate.hpp"

#include <algorithm>

#include <Eigen/SVD>
#include <string>

namespace tdfs {

Trajectory frame_propagate(const LindbladModel& model, const SubspaceTrajectory& sub, const DensityMatrix& rho0,
                           double t0, double t1, const IntegratorConfig& cfg, double tol) {
  if (!(cfg.dt > 0.0)) throw InvalidArgument("frame_propagate: dt must be positive");
  if (!(t1 > t0)) throw InvalidArgument("frame_propagate: t1 must exceed t0");
  if (rho0.dim() != model.dim() || sub.dim() != model.dim()) {
    throw DimensionMismatch("frame_propagate: dimension mismatch");
  }

  std::vector<double> cuts = model.breakpoints();
  for (double b : sub.boundaries()) cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  const auto pieces = time_pieces(t0, t1, cuts);

  // The subspace at t0 seen from the right, i.e. the segment of the first step.
  const double first_mid = 0.5 * (pieces[0] + std::min(pieces[1], pieces[0] + cfg.dt));
  const std::size_t first_segment = sub.segment_of(first_mid);
  const double inside = (rho0.matrix() * sub.projector(first_segment, t0)).trace().real();
  if (inside < 1.0 - 1e-8) {
    throw ConditionsViolated("frame_propagate: initial state is not supported on the subspace (weight " +
                             std::to_string(inside) + ")");
  }

  const std::size_t every = std::max<std::size_t>(1, cfg.record_every);
  Trajectory traj;
  // Total lab-frame propagator, re-projected onto the unitary group each step
  // so that roundoff cannot accumulate into a purity drift.
  const ComplexMatrix rho_init = rho0.matrix();
  ComplexMatrix w = ComplexMatrix::Identity(model.dim(), model.dim());
  traj.append(t0, rho_init);

  std::size_t step_count = 0;
  for (std::size_t p = 0; p + 1 < pieces.size(); ++p) {
    const double a = pieces[p];
    const double b = pieces[p + 1];
    const std::size_t n = steps_for(b - a, cfg.dt);
    const double h = (b - a) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double ts = a + static_cast<double>(i) * h;
      const double te = (i + 1 == n) ? b : a + static_cast<double>(i + 1) * h;
      const double tm = 0.5 * (ts + te);
      const std::size_t seg = sub.segment_of(tm);

      const auto eig = check_eigencondition_in(model, sub, seg, tm, tol);
      if (!eig.passed) {
        throw ConditionsViolated("frame_propagate: eigencondition residual " + std::to_string(eig.residual) +
                                 " at t = " + std::to_string(tm));
      }
      const ComplexMatrix heff = effective_hamiltonian_in(model, sub, seg, tm, eig.eigenvalues, sub.preferred_mode());
      const ComplexMatrix em = sub.frame(seg, tm);
      const auto m = static_cast<Eigen::Index>(sub.segment(seg).dim);
      const double leak = (em.rightCols(em.cols() - m).adjoint() * heff * em.leftCols(m)).cwiseAbs().maxCoeff();
      if (leak > tol) {
        throw ConditionsViolated("frame_propagate: invariance residual " + std::to_string(leak) +
                                 " at t = " + std::to_string(tm));
      }

      const ComplexMatrix ua = frame_unitary_in(sub, seg, ts);
      const ComplexMatrix ub = frame_unitary_in(sub, seg, te);
      const ComplexMatrix um = frame_unitary_in(sub, seg, tm);
      const ComplexMatrix hbar = um * heff * um.adjoint();
      const ComplexMatrix v = matrix_exponential(-kI * (te - ts) * hbar);

      w = (ub.adjoint() * v * ua * w).eval();
      const Eigen::JacobiSVD<ComplexMatrix> svd(w, Eigen::ComputeFullU | Eigen::ComputeFullV);
      w = svd.matrixU() * svd.matrixV().adjoint();
      ComplexMatrix rho = w * rho_init * w.adjoint();
      rho = 0.5 * (rho + rho.adjoint()).eval();

      ++step_count;
      const bool last = (p + 2 == pieces.size()) && (i + 1 == n);
      if (last || step_count % every == 0) traj.append(te, rho);
    }
  }
  return traj;
}

}  // namespace tdfs
