#pragma once

#include "tdfs/conditions.hpp"
#include "tdfs/lindblad.hpp"
#include "tdfs/subspace.hpp"

namespace tdfs {

/// Propagates a state supported on the subspace with the unitary generated
/// by the effective Hamiltonian in the rotating frame: each step applies
/// exp(-i Hbar_eff(t_mid) dt) to U rho U^+ and maps back with U^+. The
/// frame is re-anchored at the start of each constant-dimension segment;
/// the lab-frame state is carried across the boundary unchanged.
///
/// Both subspace conditions are checked at every step midpoint against tol
/// and a failure raises ConditionsViolated, as does an initial state with
/// weight outside the subspace beyond 1e-8. Uses cfg.dt and
/// cfg.record_every; the time grid matches integrate() whenever the model
/// breakpoints include the segment boundaries.
Trajectory frame_propagate(const LindbladModel& model, const SubspaceTrajectory& sub, const DensityMatrix& rho0,
                           double t0, double t1, const IntegratorConfig& cfg, double tol = 1e-9);

}  // namespace tdfs
