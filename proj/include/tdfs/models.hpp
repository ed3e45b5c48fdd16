#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tdfs/conditions.hpp"
#include "tdfs/lindblad.hpp"
#include "tdfs/subspace.hpp"

/// The two example systems: a Xi-type three-level atom in a squeezed vacuum
/// with rotating squeezing phase, and a five-level system whose protected
/// subspace grows from one to two dimensions.
///
/// Level ordering (matrix index): three-level {|1>, |0>, |-1>};
/// five-level {|1>, |0>, |-1>, |1'>, |-1'>}.
namespace tdfs::models {

/// Squeezed-vacuum channel F(t) = cosh(r) S + exp(i omega0 t) sinh(r) S^+.
struct SqueezedChannelSpec {
  ComplexMatrix ladder;
  double r = 0.0;
  double omega0 = 0.0;
  double gamma = 1.0;
};

JumpChannel squeezed_channel(const SqueezedChannelSpec& spec);

/// Orthonormal basis of the common kernel of all channel operators at t, in
/// the canonical (echelon, phase-fixed) form of canonical_basis. Raises
/// EmptyKernel when no dark state exists.
std::vector<Ket> dark_states(std::span<const JumpChannel> channels, double t, double tol = 1e-9);

enum class ControlMode { NoControl, PaperPrinted, Synthesized };
enum class Transition { Step, Always };
/// Printed ramp (1 + cos 2 omega0 t) sinh r2, or the halved ramp that is
/// continuous at omega0 t = pi.
enum class RampVariant { Printed, Continuous };

struct ModelBundle {
  LindbladModel model;
  SubspaceTrajectory subspace;
  /// Dark states tracked for population readout (DF1, and DF2 for the
  /// five-level model) at time t.
  std::function<std::vector<Ket>(double)> tracked_states;
  std::vector<std::string> tracked_names;
};

struct XiParams {
  double r = 1.0;
  double omega0 = 0.1;
  double gamma = 1.0;
  ControlMode mode = ControlMode::Synthesized;
  /// PaperPrinted only: hold the printed fields at their t = 0 values.
  bool freeze_printed = false;
};

struct FiveLevelParams {
  double r1 = 1.0;
  double r2 = 1.0;
  double omega0 = 1.0;
  double gamma1 = 1.0;
  double gamma2 = 1.0;
  double Omega = 1.0;
  Transition transition = Transition::Step;
  ControlMode mode = ControlMode::Synthesized;
  RampVariant ramp = RampVariant::Printed;
};

ModelBundle xi_model(const XiParams& p);
ModelBundle five_level_model(const FiveLevelParams& p);

/// S = |1><0| + |0><-1| on the three-level space.
ComplexMatrix xi_ladder();
/// S1 = |1><0| + |0><-1| and S2 = |1'><0| + |0><-1'| on the five-level space.
ComplexMatrix five_level_ladder_unprimed();
ComplexMatrix five_level_ladder_primed();

/// Drive amplitudes as printed for the three-level atom:
/// Omega1 = cosh r e^{i w t}, Omega2 = sinh r, Omega3 = w sinh r cosh r e^{i w t}.
struct XiFields {
  Complex omega1;
  Complex omega2;
  Complex omega3;
};
XiFields printed_xi_fields(double r, double omega0, double t);

/// Printed fields next to the matrix elements <1|H|0>, <0|H|-1>, <1|H|-1> of
/// the synthesized control, and the overlap of the computed dark state with
/// the printed ket c|-1> - e^{i phi} s|1> and with its level-swapped variant
/// c|1> - e^{i phi} s|-1>.
struct XiFieldComparison {
  double t = 0.0;
  XiFields printed;
  XiFields synthesized;
  double overlap_printed_dark = 0.0;
  double overlap_swapped_dark = 0.0;
};
XiFieldComparison compare_xi_fields(double r, double omega0, double gamma, double t);

}  // namespace tdfs::models
