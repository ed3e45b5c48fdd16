#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "json.hpp"
#include "tdfs/lindblad.hpp"
#include "tdfs/subspace.hpp"

namespace tdfs {

struct EigenconditionResult {
  /// c_a = <Phi_1|F_a|Phi_1>, one per channel.
  std::vector<Complex> eigenvalues;
  /// max over j, a of ||F_a|Phi_j> - c_a|Phi_j>||.
  double residual = 0.0;
  /// max over j, a of |<Phi_j|F_a|Phi_j> - c_a|.
  double spread = 0.0;
  bool passed = false;
};

/// Eigencondition on an explicit operator set and basis.
EigenconditionResult check_eigencondition(std::span<const ComplexMatrix> jumps, std::span<const Ket> basis,
                                          double tol);
EigenconditionResult check_eigencondition(const LindbladModel& model, const SubspaceTrajectory& sub, double t,
                                          double tol = 1e-9);
EigenconditionResult check_eigencondition_in(const LindbladModel& model, const SubspaceTrajectory& sub,
                                             std::size_t segment, double t, double tol = 1e-9);

/// H_eff = G(t) + H(t) + (i/2) sum_a rate_a (c_a^* F_a - c_a F_a^+).
ComplexMatrix effective_hamiltonian(const LindbladModel& model, const SubspaceTrajectory& sub, double t,
                                    std::span<const Complex> c);
ComplexMatrix effective_hamiltonian(const LindbladModel& model, const SubspaceTrajectory& sub, double t);
ComplexMatrix effective_hamiltonian_in(const LindbladModel& model, const SubspaceTrajectory& sub,
                                       std::size_t segment, double t, std::span<const Complex> c,
                                       DerivativeMode mode);

struct InvarianceResult {
  /// max over n, j of |<Phi_n^perp|H_eff|Phi_j>|.
  double residual = 0.0;
  bool passed = false;
};

InvarianceResult check_invariance(const LindbladModel& model, const SubspaceTrajectory& sub, double t,
                                  double tol = 1e-9);
InvarianceResult check_invariance_in(const LindbladModel& model, const SubspaceTrajectory& sub, std::size_t segment,
                                     double t, double tol = 1e-9);

struct SynthesisOptions {
  /// Optional Hermitian block acting inside the subspace, in the coordinates
  /// of the basis kets (M x M). Empty means none.
  ComplexMatrix intra_block;
  /// Eigencondition tolerance required before synthesis.
  double tol = 1e-9;
};

/// The Hermitian control Hamiltonian whose subspace-complement block is
///
///   <Phi_k|H|Phi_n^perp> = -i<dPhi_k/dt|Phi_n^perp> - (i/2) sum_a rate_a c_a^* <Phi_k|F_a|Phi_n^perp>,
///
/// with both diagonal blocks zero apart from opts.intra_block. The block is
/// assembled against the complement projector, so it does not depend on the
/// choice of complement basis. Raises EigenconditionViolated when the
/// basis is not a common eigenspace of the jump operators at t.
ComplexMatrix synthesize_control(std::span<const JumpChannel> channels, const SubspaceTrajectory& sub, double t,
                                 const SynthesisOptions& opts = {});
ComplexMatrix synthesize_control_in(std::span<const JumpChannel> channels, const SubspaceTrajectory& sub,
                                    std::size_t segment, double t, const SynthesisOptions& opts = {});

struct DfsSample {
  double t = 0.0;
  std::size_t segment = 0;
  std::size_t dfs_dim = 0;
  std::vector<Complex> eigenvalues;
  double eigencondition_residual = 0.0;
  double eigenvalue_spread = 0.0;
  double invariance_residual = 0.0;
  double gauge_hermiticity_deviation = 0.0;
  bool eigencondition_ok = false;
  bool invariance_ok = false;
};

struct SegmentVerdict {
  std::size_t segment = 0;
  double begin = 0.0;
  double end = 0.0;
  std::size_t dfs_dim = 0;
  std::size_t samples = 0;
  double max_eigencondition_residual = 0.0;
  double max_eigenvalue_spread = 0.0;
  double max_invariance_residual = 0.0;
  bool eigencondition = true;
  bool invariance = true;
};

struct DfsReport {
  double tolerance = 0.0;
  std::vector<DfsSample> samples;
  std::vector<SegmentVerdict> segments;  // only segments that received samples
  bool eigencondition = true;
  bool invariance = true;

  bool verdict() const { return eigencondition && invariance; }
  double max_eigencondition_residual() const;
  double max_invariance_residual() const;
};

/// Runs both checks at every grid time. A condition holds when its residual
/// (and, for the eigencondition, the spread) is at most tol everywhere.
DfsReport verify_tdfs(const LindbladModel& model, const SubspaceTrajectory& sub, std::span<const double> grid,
                      double tol = 1e-9);

nlohmann::json to_json(const DfsReport& report);

}  // namespace tdfs
