#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "tdfs/algebra.hpp"

namespace tdfs {

/// Interval of constant subspace dimension. The first segment is closed,
/// later ones are left-open: a boundary instant belongs to the earlier
/// segment.
struct SubspaceSegment {
  double begin = 0.0;
  double end = std::numeric_limits<double>::infinity();
  std::size_t dim = 1;
};

/// Returns the subspace basis (or its time derivative) at time t, evaluated
/// on the given segment. Taking the segment explicitly lets callers evaluate
/// the right-hand limit at a boundary instant.
using BasisFunction = std::function<std::vector<Ket>(double t, std::size_t segment)>;

enum class DerivativeMode { Analytic, FiniteDifference };

/// Moving orthonormal basis {|Phi_j(t)>} of a candidate decoherence-free
/// subspace, plus a continuously completed orthogonal complement.
///
/// The complement on each segment is anchored at the segment start (Gram-
/// Schmidt completion against canonical vectors) and continued in time by
/// projecting the anchor complement out of the current subspace and applying
/// symmetric (Lowdin) orthonormalization, the nearest orthonormal set to
/// the projection. This is a smooth function of t whenever the basis is.
class SubspaceTrajectory {
 public:
  SubspaceTrajectory(std::size_t dim, std::vector<SubspaceSegment> segments, BasisFunction basis,
                     BasisFunction derivative = {}, double fd_step = 1e-5);

  std::size_t dim() const { return dim_; }
  const std::vector<SubspaceSegment>& segments() const { return segments_; }
  const SubspaceSegment& segment(std::size_t k) const { return segments_.at(k); }
  std::size_t segment_of(double t) const;
  /// Boundaries between consecutive segments.
  std::vector<double> boundaries() const;

  bool has_analytic_derivative() const { return static_cast<bool>(derivative_); }
  DerivativeMode preferred_mode() const {
    return derivative_ ? DerivativeMode::Analytic : DerivativeMode::FiniteDifference;
  }
  double fd_step() const { return fd_step_; }

  std::vector<Ket> basis(double t) const { return basis(segment_of(t), t); }
  std::vector<Ket> basis(std::size_t segment, double t) const;
  std::vector<Ket> basis_derivative(std::size_t segment, double t, DerivativeMode mode) const;

  std::vector<Ket> complement(std::size_t segment, double t) const;
  std::vector<Ket> complement_derivative(std::size_t segment, double t, DerivativeMode mode) const;

  /// Columns: basis kets followed by complement kets. Checked orthonormal
  /// within 1e-10.
  ComplexMatrix frame(std::size_t segment, double t) const;
  ComplexMatrix frame_derivative(std::size_t segment, double t, DerivativeMode mode) const;

  /// Projector onto the subspace at t.
  ComplexMatrix projector(std::size_t segment, double t) const;

 private:
  void require_interior(std::size_t segment, double t) const;

  std::size_t dim_;
  std::vector<SubspaceSegment> segments_;
  BasisFunction basis_;
  BasisFunction derivative_;
  double fd_step_;
  std::vector<ComplexMatrix> anchor_complement_;
};

/// U(t) = sum_j |Phi_j(a)><Phi_j(t)| + sum_n |Phi_n^perp(a)><Phi_n^perp(t)| for
/// the anchor a. Raises DimensionChangeCrossed if t and the anchor lie in
/// segments of different dimension.
ComplexMatrix frame_unitary(const SubspaceTrajectory& sub, double t, double anchor);
ComplexMatrix frame_unitary(const SubspaceTrajectory& sub, double t);

/// Frame unitary on one segment, anchored at the segment start.
ComplexMatrix frame_unitary_in(const SubspaceTrajectory& sub, std::size_t segment, double t);

/// G(t) = i U^+(t) dU/dt. Finite-difference mode takes central differences of
/// U with the trajectory's step and raises DerivativeUnavailable if t +- h
/// leaves the segment.
ComplexMatrix gauge_operator(const SubspaceTrajectory& sub, double t, DerivativeMode mode);
ComplexMatrix gauge_operator(const SubspaceTrajectory& sub, double t);
ComplexMatrix gauge_operator_in(const SubspaceTrajectory& sub, std::size_t segment, double t, DerivativeMode mode);

}  // namespace tdfs
