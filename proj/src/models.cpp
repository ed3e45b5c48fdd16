#include "tdfs/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

namespace tdfs::models {
namespace {

constexpr Eigen::Index kP1 = 0, kZero = 1, kM1 = 2, kP1p = 3, kM1p = 4;

ComplexMatrix ladder(Eigen::Index n, Eigen::Index up, Eigen::Index mid, Eigen::Index down) {
  ComplexMatrix s = ComplexMatrix::Zero(n, n);
  s(up, mid) = 1.0;
  s(mid, down) = 1.0;
  return s;
}

// d/dt of c|up> - e^{i w t} s|down>, the canonical dark state of one
// squeezed ladder.
Ket dark_derivative(Eigen::Index n, Eigen::Index down, double r, double omega0, double t) {
  const double s = std::sinh(r) / std::sqrt(std::cosh(2.0 * r));
  Ket d = Ket::Zero(n);
  d(down) = -kI * omega0 * std::exp(kI * omega0 * t) * s;
  return d;
}

void add_hermitian(ComplexMatrix& h, Eigen::Index i, Eigen::Index j, Complex v) {
  h(i, j) += v;
  h(j, i) += std::conj(v);
}

std::vector<Ket> first(std::vector<Ket> v, std::size_t m) {
  v.resize(m);
  return v;
}

}  // namespace

ComplexMatrix xi_ladder() { return ladder(3, kP1, kZero, kM1); }
ComplexMatrix five_level_ladder_unprimed() { return ladder(5, kP1, kZero, kM1); }
ComplexMatrix five_level_ladder_primed() { return ladder(5, kP1p, kZero, kM1p); }

JumpChannel squeezed_channel(const SqueezedChannelSpec& spec) {
  if (!(spec.r >= 0.0)) throw InvalidArgument("squeezed_channel: amplitude r must be non-negative");
  if (!(spec.gamma >= 0.0)) throw InvalidArgument("squeezed_channel: rate must be non-negative");
  if (spec.ladder.rows() != spec.ladder.cols()) throw NonSquare("squeezed_channel: ladder is not square");
  const ComplexMatrix a = std::cosh(spec.r) * spec.ladder;
  const ComplexMatrix b = std::sinh(spec.r) * spec.ladder.adjoint();
  const double w = spec.omega0;
  return JumpChannel{[a, b, w](double t) -> ComplexMatrix { return a + std::exp(kI * (w * t)) * b; }, spec.gamma,
                     "squeezed"};
}

std::vector<Ket> dark_states(std::span<const JumpChannel> channels, double t, double tol) {
  if (channels.empty()) throw InvalidArgument("dark_states: no channels");
  std::vector<ComplexMatrix> ops;
  ops.reserve(channels.size());
  for (const auto& ch : channels) ops.push_back(ch.op(t));
  const std::vector<Complex> zeros(ops.size(), Complex{0.0, 0.0});
  auto kernel = joint_eigenspace(ops, zeros, tol);
  if (kernel.empty()) throw EmptyKernel("dark_states: no common dark state at t = " + std::to_string(t));
  return kernel;
}

XiFields printed_xi_fields(double r, double omega0, double t) {
  const Complex e = std::exp(kI * (omega0 * t));
  return {std::cosh(r) * e, Complex(std::sinh(r), 0.0), omega0 * std::sinh(r) * std::cosh(r) * e};
}

ModelBundle xi_model(const XiParams& p) {
  if (!(p.r >= 0.0)) throw InvalidArgument("xi_model: r must be non-negative");
  if (!(p.gamma > 0.0)) throw InvalidArgument("xi_model: gamma must be positive");

  auto channels = std::make_shared<const std::vector<JumpChannel>>(
      std::vector<JumpChannel>{squeezed_channel({xi_ladder(), p.r, p.omega0, p.gamma})});

  BasisFunction basis = [channels](double t, std::size_t) { return first(dark_states(*channels, t), 1); };
  BasisFunction derivative = [p](double t, std::size_t) {
    return std::vector<Ket>{dark_derivative(3, kM1, p.r, p.omega0, t)};
  };
  const double fd_step = 1e-5 / std::max(std::abs(p.omega0), p.gamma);
  SubspaceTrajectory sub(3, {SubspaceSegment{0.0}}, basis, derivative, fd_step);

  TimeOperator h;
  switch (p.mode) {
    case ControlMode::NoControl:
      h = [](double) -> ComplexMatrix { return ComplexMatrix::Zero(3, 3); };
      break;
    case ControlMode::PaperPrinted:
      h = [p](double t) -> ComplexMatrix {
        const auto f = printed_xi_fields(p.r, p.omega0, p.freeze_printed ? 0.0 : t);
        ComplexMatrix m = ComplexMatrix::Zero(3, 3);
        add_hermitian(m, kP1, kZero, f.omega1);
        add_hermitian(m, kZero, kM1, f.omega2);
        add_hermitian(m, kP1, kM1, f.omega3);
        return m;
      };
      break;
    case ControlMode::Synthesized:
      h = [channels, sub](double t) -> ComplexMatrix { return synthesize_control(*channels, sub, t); };
      break;
  }

  LindbladModel model(3, std::move(h), *channels, {});
  auto tracked = [channels](double t) { return first(dark_states(*channels, t), 1); };
  return ModelBundle{std::move(model), std::move(sub), tracked, {"DF1"}};
}

ModelBundle five_level_model(const FiveLevelParams& p) {
  if (!(p.r1 >= 0.0 && p.r2 >= 0.0)) throw InvalidArgument("five_level_model: squeezing amplitudes must be non-negative");
  if (!(p.omega0 > 0.0 && p.gamma1 > 0.0 && p.gamma2 > 0.0)) {
    throw InvalidArgument("five_level_model: omega0 and rates must be positive");
  }
  const double t_switch = std::numbers::pi / p.omega0;
  const double t_ramp = 0.5 * std::numbers::pi / p.omega0;

  std::vector<JumpChannel> jumps{squeezed_channel({five_level_ladder_unprimed(), p.r1, p.omega0, p.gamma1}),
                                 squeezed_channel({five_level_ladder_primed(), p.r2, p.omega0, p.gamma2})};
  jumps[0].name = "squeezed_unprimed";
  jumps[1].name = "squeezed_primed";
  auto channels = std::make_shared<const std::vector<JumpChannel>>(std::move(jumps));

  const std::vector<SubspaceSegment> segments{{0.0, t_switch, 1},
                                              {t_switch, std::numeric_limits<double>::infinity(), 2}};
  BasisFunction basis = [channels, segments](double t, std::size_t seg) {
    return first(dark_states(*channels, t), segments.at(seg).dim);
  };
  BasisFunction derivative = [p, segments](double t, std::size_t seg) {
    std::vector<Ket> d{dark_derivative(5, kM1, p.r1, p.omega0, t), dark_derivative(5, kM1p, p.r2, p.omega0, t)};
    return first(std::move(d), segments.at(seg).dim);
  };
  const double fd_step = 1e-5 / std::max({p.omega0, p.gamma1, p.gamma2});
  SubspaceTrajectory sub(5, segments, basis, derivative, fd_step);

  TimeOperator h0;
  switch (p.mode) {
    case ControlMode::NoControl:
      h0 = [](double) -> ComplexMatrix { return ComplexMatrix::Zero(5, 5); };
      break;
    case ControlMode::PaperPrinted:
      h0 = [p, t_ramp, t_switch](double t) -> ComplexMatrix {
        const Complex e = std::exp(kI * (p.omega0 * t));
        const double ramp_scale = p.ramp == RampVariant::Continuous ? 0.5 : 1.0;
        double omega2p = 0.0;
        if (t > t_switch) {
          omega2p = std::sinh(p.r2);
        } else if (t >= t_ramp) {
          omega2p = ramp_scale * (1.0 + std::cos(2.0 * p.omega0 * t)) * std::sinh(p.r2);
        }
        ComplexMatrix m = ComplexMatrix::Zero(5, 5);
        add_hermitian(m, kP1, kZero, std::cosh(p.r1) * e);
        add_hermitian(m, kZero, kM1, std::sinh(p.r1));
        add_hermitian(m, kP1, kM1, p.omega0 * std::sinh(p.r1) * std::cosh(p.r1) * std::conj(e));
        add_hermitian(m, kP1p, kZero, std::cosh(p.r2) * e);
        add_hermitian(m, kZero, kM1p, omega2p);
        add_hermitian(m, kP1p, kM1p, p.omega0 * std::sinh(p.r2) * std::cosh(p.r2) * std::conj(e));
        return m;
      };
      break;
    case ControlMode::Synthesized:
      h0 = [channels, sub](double t) -> ComplexMatrix { return synthesize_control(*channels, sub, t); };
      break;
  }

  TimeOperator h = [h0, channels, p, t_switch](double t) -> ComplexMatrix {
    ComplexMatrix m = h0(t);
    const bool on = p.transition == Transition::Always || t > t_switch;
    if (on && p.Omega != 0.0) {
      const auto df = dark_states(*channels, t);
      const ComplexMatrix x = p.Omega * outer(df.at(0), df.at(1));
      m += x + x.adjoint();
    }
    return m;
  };

  std::vector<double> breakpoints{t_switch};
  if (p.mode == ControlMode::PaperPrinted) breakpoints.push_back(t_ramp);
  LindbladModel model(5, std::move(h), *channels, std::move(breakpoints));
  auto tracked = [channels](double t) { return first(dark_states(*channels, t), 2); };
  return ModelBundle{std::move(model), std::move(sub), tracked, {"DF1", "DF2"}};
}

XiFieldComparison compare_xi_fields(double r, double omega0, double gamma, double t) {
  auto bundle = xi_model({r, omega0, gamma, ControlMode::Synthesized, false});
  const ComplexMatrix h = bundle.model.hamiltonian(t);
  XiFieldComparison out;
  out.t = t;
  out.printed = printed_xi_fields(r, omega0, t);
  out.synthesized = {h(kP1, kZero), h(kZero, kM1), h(kP1, kM1)};

  const double c = std::cosh(r) / std::sqrt(std::cosh(2.0 * r));
  const double s = std::sinh(r) / std::sqrt(std::cosh(2.0 * r));
  const Complex e = std::exp(kI * (omega0 * t));
  Ket printed = Ket::Zero(3);
  printed(kM1) = c;
  printed(kP1) = -e * s;
  Ket swapped = Ket::Zero(3);
  swapped(kP1) = c;
  swapped(kM1) = -e * s;
  const Ket dark = bundle.tracked_states(t).front();
  out.overlap_printed_dark = std::abs(printed.dot(dark));
  out.overlap_swapped_dark = std::abs(swapped.dot(dark));
  return out;
}

}  // namespace tdfs::models
