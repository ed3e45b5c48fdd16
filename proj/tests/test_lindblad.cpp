#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "tdfs/lindblad.hpp"
#include "tdfs/models.hpp"

using namespace tdfs;

namespace {

ComplexMatrix projector(Eigen::Index n, Eigen::Index i) {
  ComplexMatrix p = ComplexMatrix::Zero(n, n);
  p(i, i) = 1.0;
  return p;
}

TimeOperator constant(ComplexMatrix m) {
  return [m](double) { return m; };
}

LindbladModel amplitude_damping(double gamma) {
  ComplexMatrix lower = ComplexMatrix::Zero(2, 2);
  lower(0, 1) = 1.0;  // |0><1|
  return LindbladModel(2, constant(ComplexMatrix::Zero(2, 2)), {JumpChannel{constant(lower), gamma, "decay"}});
}

}  // namespace

TEST_CASE("lindblad_rhs of the zero generator vanishes") {
  const LindbladModel model(3, constant(ComplexMatrix::Zero(3, 3)), {});
  std::mt19937_64 rng(1);
  const ComplexMatrix rho = oracle::random_density(rng, 3);
  CHECK(lindblad_rhs(model, 0.3, rho).norm() == 0.0);
}

TEST_CASE("lindblad_rhs of amplitude damping on the excited state") {
  const auto model = amplitude_damping(1.0);
  // By hand: F rho F^+ = |0><0|, {F^+F, rho}/2 = |1><1|.
  const ComplexMatrix expected = projector(2, 0) - projector(2, 1);
  CHECK((lindblad_rhs(model, 0.0, projector(2, 1)) - expected).norm() <= 1e-15);
  CHECK_THROWS_AS(lindblad_rhs(model, 0.0, ComplexMatrix::Zero(3, 3)), DimensionMismatch);
}

TEST_CASE("lindblad_rhs annihilates the three-level dark state without drive") {
  const auto bundle = models::xi_model({1.0, 1.0, 1.0, models::ControlMode::NoControl, false});
  const Ket dark = bundle.subspace.basis(0.0).front();
  CHECK(lindblad_rhs(bundle.model, 0.0, dark * dark.adjoint()).norm() <= 1e-12);
}

TEST_CASE("lindblad_rhs is Hermitian, traceless and linear (property)") {
  std::mt19937_64 rng(2);
  const auto bundle = models::five_level_model({});
  for (int trial = 0; trial < 25; ++trial) {
    const ComplexMatrix r1 = oracle::random_density(rng, 5);
    const ComplexMatrix r2 = oracle::random_density(rng, 5);
    const double t = 0.25 * trial;
    const double a = 0.3 + 0.1 * trial, b = -1.7 + 0.05 * trial;
    const ComplexMatrix d1 = lindblad_rhs(bundle.model, t, r1);
    const ComplexMatrix d2 = lindblad_rhs(bundle.model, t, r2);
    CHECK(hermiticity_deviation(d1) <= 1e-10);
    CHECK(std::abs(d1.trace()) <= 1e-10);
    CHECK((lindblad_rhs(bundle.model, t, a * r1 + b * r2) - (a * d1 + b * d2)).norm() <= 1e-10);
  }
}

TEST_CASE("integrate with zero generator is constant") {
  const LindbladModel model(2, constant(ComplexMatrix::Zero(2, 2)), {});
  const auto rho0 = DensityMatrix::maximally_mixed(2);
  const auto traj = integrate(model, rho0, 0.0, 1.0, {0.1});
  CHECK(traj.size() == 11);
  for (const auto& s : traj.states) CHECK((s - rho0.matrix()).norm() == 0.0);
}

TEST_CASE("integrate reproduces Larmor precession") {
  ComplexMatrix sz = ComplexMatrix::Zero(2, 2), sx = ComplexMatrix::Zero(2, 2);
  sz(0, 0) = 1.0;
  sz(1, 1) = -1.0;
  sx(0, 1) = sx(1, 0) = 1.0;
  const LindbladModel model(2, constant(sz), {});
  Ket plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  const auto traj = integrate(model, DensityMatrix::pure(plus), 0.0, 3.0, {1e-3});
  double worst = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double sx_mean = (traj.states[i] * sx).trace().real();
    worst = std::max(worst, std::abs(sx_mean - std::cos(2.0 * traj.times[i])));
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("integrate reproduces exponential decay") {
  const auto traj = integrate(amplitude_damping(1.0), DensityMatrix(projector(2, 1)), 0.0, 3.0, {1e-3});
  double worst = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    worst = std::max(worst, std::abs(traj.states[i](1, 1).real() - std::exp(-traj.times[i])));
  }
  CHECK(worst <= 1e-8);
  CHECK(traj.max_purity() <= 1.0 + 1e-9);
}

TEST_CASE("integrate splits steps at breakpoints") {
  // H switches on at t = 0.35, which is not a multiple of dt.
  ComplexMatrix sx = ComplexMatrix::Zero(2, 2);
  sx(0, 1) = sx(1, 0) = 1.0;
  const LindbladModel model(
      2, [sx](double t) -> ComplexMatrix { return t > 0.35 ? ComplexMatrix(sx) : ComplexMatrix::Zero(2, 2); }, {},
      {0.35});
  const auto traj = integrate(model, DensityMatrix(projector(2, 0)), 0.0, 1.0, {0.1});
  CHECK(std::find(traj.times.begin(), traj.times.end(), 0.35) != traj.times.end());
  // Exact: population of |1> is sin^2(t - 0.35) after the switch.
  const double p1 = traj.states.back()(1, 1).real();
  CHECK(std::abs(p1 - std::pow(std::sin(0.65), 2)) <= 1e-5);
}

TEST_CASE("integrate converges at fourth order on the three-level model") {
  const auto bundle = models::xi_model({1.0, 1.0, 1.0, models::ControlMode::Synthesized, false});
  const auto rho0 = DensityMatrix(projector(3, 1));
  const auto run = [&](double dt) { return integrate(bundle.model, rho0, 0.0, 2.0, {dt}).states.back(); };
  const double dt = 0.05;
  const ComplexMatrix ref = run(dt / 8.0);
  const double e1 = (run(dt) - ref).norm();
  const double e2 = (run(dt / 2.0) - ref).norm();
  MESSAGE("RK4 error ratio " << e1 / e2);
  CHECK(e1 / e2 >= 12.0);
}

TEST_CASE("integrate rejects bad arguments") {
  const auto model = amplitude_damping(1.0);
  const auto rho0 = DensityMatrix::maximally_mixed(2);
  CHECK_THROWS_AS(integrate(model, rho0, 1.0, 1.0, {0.1}), InvalidArgument);
  CHECK_THROWS_AS(integrate(model, rho0, 0.0, 1.0, {0.0}), InvalidArgument);
  CHECK_THROWS_AS(integrate(model, DensityMatrix::maximally_mixed(3), 0.0, 1.0, {0.1}), DimensionMismatch);
}

TEST_CASE("integrate flags a step that is far too large") {
  // Strong decay with dt * gamma = 5 is outside the RK4 stability region.
  const auto model = amplitude_damping(50.0);
  CHECK_THROWS_AS(integrate(model, DensityMatrix(projector(2, 1)), 0.0, 1.0, {0.1}), StateInvariantViolated);
}

TEST_CASE("purity and population") {
  Ket v(3);
  v << Complex(0.6, 0.0), Complex(0.0, 0.8), 0.0;
  CHECK(purity(v * v.adjoint()) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(purity(DensityMatrix::maximally_mixed(3).matrix()) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = 0.75;
  d(1, 1) = 0.25;
  CHECK(purity(d) == doctest::Approx(0.625).epsilon(1e-15));

  CHECK(population(v * v.adjoint(), v) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(population(v * v.adjoint(), Ket::Unit(3, 2))) <= 1e-15);
  std::mt19937_64 rng(4);
  Ket w = oracle::random_matrix(rng, 5).col(0);
  w.normalize();
  CHECK(population(DensityMatrix::maximally_mixed(5).matrix(), w) == doctest::Approx(0.2).epsilon(1e-14));
  CHECK_THROWS_AS(population(d, v), DimensionMismatch);
}

TEST_CASE("DensityMatrix validation") {
  ComplexMatrix bad = ComplexMatrix::Zero(2, 2);
  bad(0, 0) = 1.2;
  bad(1, 1) = -0.2;
  CHECK_THROWS_AS(DensityMatrix{bad}, StateInvariantViolated);
  ComplexMatrix unnormalized = ComplexMatrix::Identity(2, 2);
  CHECK_THROWS_AS(DensityMatrix{unnormalized}, StateInvariantViolated);
}

TEST_CASE("trace distance") {
  CHECK(trace_distance(projector(2, 0), projector(2, 1)) == doctest::Approx(1.0));
  CHECK(trace_distance(projector(2, 0), projector(2, 0)) == 0.0);
}
