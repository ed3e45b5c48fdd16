#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <numbers>
#include <random>

#include "oracles.hpp"
#include "tdfs/models.hpp"
#include "tdfs/subspace.hpp"

using namespace tdfs;

namespace {

SubspaceTrajectory static_subspace() {
  Ket v(3);
  v << 0.6, Complex(0.0, 0.8), 0.0;
  return SubspaceTrajectory(3, {SubspaceSegment{0.0, 10.0, 1}}, [v](double, std::size_t) { return std::vector<Ket>{v}; });
}

models::ModelBundle xi(double omega0, double r = 1.0) {
  return models::xi_model({r, omega0, 1.0, models::ControlMode::NoControl, false});
}

double unitarity_error(const ComplexMatrix& u) {
  return (u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols())).norm();
}

}  // namespace

TEST_CASE("frame_unitary is the identity at the anchor and for static bases") {
  const auto b = xi(1.0);
  CHECK((frame_unitary(b.subspace, 0.0) - ComplexMatrix::Identity(3, 3)).norm() <= 1e-14);
  const auto s = static_subspace();
  for (double t : {0.0, 0.5, 3.0, 9.0}) CHECK((frame_unitary(s, t) - ComplexMatrix::Identity(3, 3)).norm() <= 1e-14);
}

TEST_CASE("frame_unitary matches direct assembly from the frame kets") {
  const auto b = xi(1.0);
  const double t = 0.5 * std::numbers::pi;
  const auto basis0 = b.subspace.basis(0, 0.0), basis_t = b.subspace.basis(0, t);
  const auto comp0 = b.subspace.complement(0, 0.0), comp_t = b.subspace.complement(0, t);
  ComplexMatrix direct = ComplexMatrix::Zero(3, 3);
  direct += basis0[0] * basis_t[0].adjoint();
  for (std::size_t n = 0; n < comp0.size(); ++n) direct += comp0[n] * comp_t[n].adjoint();
  const ComplexMatrix u = frame_unitary(b.subspace, t);
  CHECK((u - direct).norm() <= 1e-14);
  CHECK(unitarity_error(u) <= 1e-12);

  // The dark state is the hand-solved kernel vector; the complement spans
  // the bright state and |0>.
  CHECK((basis_t[0] - oracle::xi_dark_state(1.0, t)).norm() <= 1e-12);
  const Ket bright = oracle::xi_bright_state(1.0, t);
  double bright_weight = 0.0, zero_weight = 0.0;
  for (const auto& c : comp_t) {
    bright_weight += std::norm(bright.dot(c));
    zero_weight += std::norm(c(1));
  }
  CHECK(bright_weight == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(zero_weight == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("frame_unitary is unitary along the trajectory (property)") {
  const auto b = models::five_level_model({});
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
  for (int i = 0; i < 50; ++i) {
    const double t = u(rng);
    CHECK(unitarity_error(frame_unitary_in(b.subspace, b.subspace.segment_of(t), t)) <= 1e-10);
  }
}

TEST_CASE("frame_unitary refuses to cross a dimension change") {
  const auto b = models::five_level_model({});
  CHECK_NOTHROW(frame_unitary(b.subspace, 1.0));
  CHECK_THROWS_AS(frame_unitary(b.subspace, 4.0), DimensionChangeCrossed);
  CHECK_NOTHROW(frame_unitary(b.subspace, 4.0, std::numbers::pi + 0.1));
}

TEST_CASE("gauge_operator vanishes for a static basis") {
  const auto s = static_subspace();
  CHECK(gauge_operator(s, 2.0).norm() <= 1e-12);
  CHECK(s.preferred_mode() == DerivativeMode::FiniteDifference);
}

TEST_CASE("gauge_operator is Hermitian") {
  const auto b = xi(1.0);
  for (double t : {0.3, 1.0, 2.5}) {
    CHECK(hermiticity_deviation(gauge_operator(b.subspace, t, DerivativeMode::FiniteDifference)) <= 1e-8);
    CHECK(hermiticity_deviation(gauge_operator(b.subspace, t, DerivativeMode::Analytic)) <= 1e-12);
  }
}

TEST_CASE("finite-difference gauge converges at second order to the analytic one") {
  const double t = 0.7;
  const auto analytic = gauge_operator(xi(1.0).subspace, t, DerivativeMode::Analytic);
  // Rebuild the trajectory with explicit finite-difference steps.
  auto error_at = [&](double h) {
    const auto base = xi(1.0).subspace;
    SubspaceTrajectory sub(3, base.segments(), [base](double tt, std::size_t k) { return base.basis(k, tt); }, {}, h);
    return (gauge_operator(sub, t, DerivativeMode::FiniteDifference) - analytic).norm();
  };
  const double e1 = error_at(1e-2), e2 = error_at(5e-3), e3 = error_at(2.5e-3);
  MESSAGE("gauge FD ratios " << e1 / e2 << " " << e2 / e3);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
  CHECK(e2 / e3 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("finite-difference derivatives are unavailable at segment ends") {
  const auto b = xi(1.0);
  CHECK_THROWS_AS(gauge_operator(b.subspace, 0.0, DerivativeMode::FiniteDifference), DerivativeUnavailable);
  const auto f = models::five_level_model({});
  CHECK_THROWS_AS(gauge_operator(f.subspace, std::numbers::pi, DerivativeMode::FiniteDifference),
                  DerivativeUnavailable);
  CHECK_NOTHROW(gauge_operator(f.subspace, std::numbers::pi, DerivativeMode::Analytic));
}

TEST_CASE("analytic complement derivative agrees with finite differences") {
  const auto f = models::five_level_model({});
  for (double t : {0.4, 2.0, 4.0, 5.5}) {
    const auto seg = f.subspace.segment_of(t);
    const auto a = f.subspace.frame_derivative(seg, t, DerivativeMode::Analytic);
    const auto d = f.subspace.frame_derivative(seg, t, DerivativeMode::FiniteDifference);
    CHECK((a - d).norm() <= 1e-8);
  }
}

TEST_CASE("segment lookup treats boundaries as left-closed") {
  const auto f = models::five_level_model({});
  CHECK(f.subspace.segment_of(0.0) == 0);
  CHECK(f.subspace.segment_of(std::numbers::pi) == 0);
  CHECK(f.subspace.segment_of(std::nextafter(std::numbers::pi, 4.0)) == 1);
  CHECK(f.subspace.basis(0, 1.0).size() == 1);
  CHECK(f.subspace.basis(1, 4.0).size() == 2);
  CHECK_THROWS_AS(f.subspace.segment_of(-1.0), InvalidArgument);
}

TEST_CASE("SubspaceTrajectory rejects malformed schedules") {
  auto basis = [](double, std::size_t) { return std::vector<Ket>{Ket::Unit(3, 0)}; };
  CHECK_THROWS_AS(SubspaceTrajectory(3, {}, basis), InvalidArgument);
  CHECK_THROWS_AS(SubspaceTrajectory(3, {SubspaceSegment{0.0, 1.0, 3}}, basis), InvalidArgument);
  CHECK_THROWS_AS(SubspaceTrajectory(3, {SubspaceSegment{0.0, 1.0, 1}, SubspaceSegment{2.0, 3.0, 1}}, basis),
                  InvalidArgument);
  CHECK_THROWS_AS(SubspaceTrajectory(3, {SubspaceSegment{0.0, 1.0, 2}}, basis), DimensionMismatch);
}
