#include "tdfs/subspace.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

namespace tdfs {
namespace {

struct Lowdin {
  ComplexMatrix w;          // projected anchor complement
  ComplexMatrix inv_sqrt;   // (W^+ W)^(-1/2)
  Eigen::VectorXd lambda;   // eigenvalues of W^+ W
  ComplexMatrix vecs;       // eigenvectors of W^+ W
};

Lowdin lowdin(const ComplexMatrix& basis, const ComplexMatrix& anchor) {
  const auto n = basis.rows();
  Lowdin l;
  l.w = (ComplexMatrix::Identity(n, n) - basis * basis.adjoint()) * anchor;
  const ComplexMatrix s = l.w.adjoint() * l.w;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (s + s.adjoint()));
  l.lambda = es.eigenvalues();
  l.vecs = es.eigenvectors();
  if (l.lambda.size() > 0 && l.lambda(0) < 1e-8) {
    throw DegenerateSet("SubspaceTrajectory: complement continuation became singular; re-anchor the segment");
  }
  l.inv_sqrt = l.vecs * l.lambda.cwiseSqrt().cwiseInverse().asDiagonal() * l.vecs.adjoint();
  return l;
}

}  // namespace

SubspaceTrajectory::SubspaceTrajectory(std::size_t dim, std::vector<SubspaceSegment> segments, BasisFunction basis,
                                       BasisFunction derivative, double fd_step)
    : dim_(dim),
      segments_(std::move(segments)),
      basis_(std::move(basis)),
      derivative_(std::move(derivative)),
      fd_step_(fd_step) {
  if (dim_ < 2) throw InvalidArgument("SubspaceTrajectory: dimension must be at least 2");
  if (segments_.empty()) throw InvalidArgument("SubspaceTrajectory: no segments");
  if (!basis_) throw InvalidArgument("SubspaceTrajectory: missing basis function");
  if (!(fd_step_ > 0.0)) throw InvalidArgument("SubspaceTrajectory: finite-difference step must be positive");
  for (std::size_t k = 0; k < segments_.size(); ++k) {
    const auto& s = segments_[k];
    if (!(s.end > s.begin)) throw InvalidArgument("SubspaceTrajectory: empty segment");
    if (s.dim < 1 || s.dim > dim_ - 1) throw InvalidArgument("SubspaceTrajectory: subspace dimension out of range");
    if (k > 0 && s.begin != segments_[k - 1].end) throw InvalidArgument("SubspaceTrajectory: segments are not contiguous");
  }
  anchor_complement_.reserve(segments_.size());
  for (std::size_t k = 0; k < segments_.size(); ++k) {
    const auto b = this->basis(k, segments_[k].begin);
    anchor_complement_.push_back(as_columns(complete_basis(b, dim_)));
  }
}

std::size_t SubspaceTrajectory::segment_of(double t) const {
  if (t < segments_.front().begin || t > segments_.back().end) {
    throw InvalidArgument("SubspaceTrajectory: time " + std::to_string(t) + " outside the trajectory");
  }
  for (std::size_t k = 0; k < segments_.size(); ++k) {
    if (t <= segments_[k].end) return k;
  }
  return segments_.size() - 1;
}

std::vector<double> SubspaceTrajectory::boundaries() const {
  std::vector<double> out;
  for (std::size_t k = 0; k + 1 < segments_.size(); ++k) out.push_back(segments_[k].end);
  return out;
}

std::vector<Ket> SubspaceTrajectory::basis(std::size_t segment, double t) const {
  auto b = basis_(t, segment);
  if (b.size() != segments_.at(segment).dim) {
    throw DimensionMismatch("SubspaceTrajectory: basis function returned " + std::to_string(b.size()) +
                            " kets, segment expects " + std::to_string(segments_[segment].dim));
  }
  for (const auto& k : b) {
    if (static_cast<std::size_t>(k.size()) != dim_) throw DimensionMismatch("SubspaceTrajectory: ket of wrong dimension");
  }
  return b;
}

void SubspaceTrajectory::require_interior(std::size_t segment, double t) const {
  const auto& s = segments_.at(segment);
  if (t - fd_step_ < s.begin || t + fd_step_ > s.end) {
    throw DerivativeUnavailable("SubspaceTrajectory: finite-difference stencil at t = " + std::to_string(t) +
                                " leaves its segment");
  }
}

std::vector<Ket> SubspaceTrajectory::basis_derivative(std::size_t segment, double t, DerivativeMode mode) const {
  if (mode == DerivativeMode::Analytic) {
    if (!derivative_) throw DerivativeUnavailable("SubspaceTrajectory: no analytic derivative supplied");
    auto d = derivative_(t, segment);
    if (d.size() != segments_.at(segment).dim) throw DimensionMismatch("SubspaceTrajectory: derivative count mismatch");
    return d;
  }
  require_interior(segment, t);
  const auto plus = basis(segment, t + fd_step_);
  const auto minus = basis(segment, t - fd_step_);
  std::vector<Ket> d;
  d.reserve(plus.size());
  for (std::size_t j = 0; j < plus.size(); ++j) d.emplace_back((plus[j] - minus[j]) / (2.0 * fd_step_));
  return d;
}

std::vector<Ket> SubspaceTrajectory::complement(std::size_t segment, double t) const {
  const ComplexMatrix b = as_columns(basis(segment, t));
  const auto l = lowdin(b, anchor_complement_.at(segment));
  return columns_of(l.w * l.inv_sqrt);
}

std::vector<Ket> SubspaceTrajectory::complement_derivative(std::size_t segment, double t, DerivativeMode mode) const {
  if (mode == DerivativeMode::FiniteDifference) {
    require_interior(segment, t);
    const auto plus = complement(segment, t + fd_step_);
    const auto minus = complement(segment, t - fd_step_);
    std::vector<Ket> d;
    for (std::size_t j = 0; j < plus.size(); ++j) d.emplace_back((plus[j] - minus[j]) / (2.0 * fd_step_));
    return d;
  }
  // C = W S^(-1/2), S = W^+ W, W = (1 - B B^+) C0. The derivative of S^(-1/2)
  // follows from the Daleckii-Krein formula in the eigenbasis of S.
  const ComplexMatrix b = as_columns(basis(segment, t));
  const ComplexMatrix bd = as_columns(basis_derivative(segment, t, mode));
  const ComplexMatrix& c0 = anchor_complement_.at(segment);
  const auto l = lowdin(b, c0);

  const ComplexMatrix wd = -(bd * b.adjoint() + b * bd.adjoint()) * c0;
  const ComplexMatrix sd = wd.adjoint() * l.w + l.w.adjoint() * wd;
  ComplexMatrix x = l.vecs.adjoint() * sd * l.vecs;
  const auto m = l.lambda.size();
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const double si = std::sqrt(l.lambda(i));
      const double sj = std::sqrt(l.lambda(j));
      x(i, j) *= -1.0 / (si * sj * (si + sj));
    }
  }
  const ComplexMatrix inv_sqrt_dot = l.vecs * x * l.vecs.adjoint();
  return columns_of(wd * l.inv_sqrt + l.w * inv_sqrt_dot);
}

ComplexMatrix SubspaceTrajectory::frame(std::size_t segment, double t) const {
  const auto b = basis(segment, t);
  const ComplexMatrix bm = as_columns(b);
  const auto l = lowdin(bm, anchor_complement_.at(segment));
  ComplexMatrix e(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_));
  e << bm, l.w * l.inv_sqrt;
  const auto n = e.cols();
  if ((e.adjoint() * e - ComplexMatrix::Identity(n, n)).norm() > 1e-10) {
    throw InvalidArgument("SubspaceTrajectory: frame at t = " + std::to_string(t) + " is not orthonormal");
  }
  return e;
}

ComplexMatrix SubspaceTrajectory::frame_derivative(std::size_t segment, double t, DerivativeMode mode) const {
  ComplexMatrix e(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_));
  e << as_columns(basis_derivative(segment, t, mode)), as_columns(complement_derivative(segment, t, mode));
  return e;
}

ComplexMatrix SubspaceTrajectory::projector(std::size_t segment, double t) const {
  const ComplexMatrix b = as_columns(basis(segment, t));
  return b * b.adjoint();
}

ComplexMatrix frame_unitary_in(const SubspaceTrajectory& sub, std::size_t segment, double t) {
  const double anchor = sub.segment(segment).begin;
  return sub.frame(segment, anchor) * sub.frame(segment, t).adjoint();
}

ComplexMatrix frame_unitary(const SubspaceTrajectory& sub, double t, double anchor) {
  const auto sa = sub.segment_of(anchor);
  const auto st = sub.segment_of(t);
  if (sa != st && sub.segment(sa).dim != sub.segment(st).dim) {
    throw DimensionChangeCrossed("frame_unitary: subspace dimension changes between anchor and t");
  }
  if (sa != st) {
    throw DimensionChangeCrossed("frame_unitary: anchor and t lie in different segments");
  }
  return sub.frame(sa, anchor) * sub.frame(st, t).adjoint();
}

ComplexMatrix frame_unitary(const SubspaceTrajectory& sub, double t) {
  return frame_unitary(sub, t, sub.segment(0).begin);
}

ComplexMatrix gauge_operator_in(const SubspaceTrajectory& sub, std::size_t segment, double t, DerivativeMode mode) {
  if (mode == DerivativeMode::FiniteDifference) {
    const double h = sub.fd_step();
    const auto& s = sub.segment(segment);
    if (t - h < s.begin || t + h > s.end) {
      throw DerivativeUnavailable("gauge_operator: finite-difference stencil leaves the segment");
    }
    const ComplexMatrix u = frame_unitary_in(sub, segment, t);
    const ComplexMatrix du = (frame_unitary_in(sub, segment, t + h) - frame_unitary_in(sub, segment, t - h)) / (2.0 * h);
    return kI * u.adjoint() * du;
  }
  // U = E(a) E(t)^+ gives U^+ dU/dt = E(t) dE(t)^+/dt, independent of the anchor.
  const ComplexMatrix e = sub.frame(segment, t);
  const ComplexMatrix ed = sub.frame_derivative(segment, t, mode);
  return kI * e * ed.adjoint();
}

ComplexMatrix gauge_operator(const SubspaceTrajectory& sub, double t, DerivativeMode mode) {
  return gauge_operator_in(sub, sub.segment_of(t), t, mode);
}

ComplexMatrix gauge_operator(const SubspaceTrajectory& sub, double t) {
  return gauge_operator(sub, t, sub.preferred_mode());
}

}  // namespace tdfs
