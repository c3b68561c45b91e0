#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <cmath>
#include <complex>

#include <Eigen/Core>

#include "twistbeam/quadrature.hpp"

using namespace twistbeam;
using quadrature::integrate;

namespace {
constexpr double kPi = 3.141592653589793238462643383279503;
}

TEST_CASE("adaptive rule reproduces closed-form integrals") {
  auto poly = integrate([](double x) { return x * x * x; }, 0.0, 1.0, 1e-14,
                        1e-13, 100);
  CHECK(poly.value == doctest::Approx(0.25).epsilon(1e-14));

  auto sine = integrate([](double x) { return std::sin(x); }, 0.0, kPi, 1e-14,
                        1e-13, 200);
  CHECK(sine.value == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(std::abs(sine.value - 2.0) <= sine.error + 1e-15);

  // Gamma(4) with an exponentially small tail beyond the cutoff.
  auto gamma4 = integrate(
      [](double x) { return x * x * x * std::exp(-x); }, 0.0, 40.0, 1e-14,
      1e-13, 500);
  CHECK(gamma4.value == doctest::Approx(6.0).epsilon(1e-12));

  auto oscillatory = integrate(
      [](double x) { return std::sin(x) * std::sin(x); }, 0.0, 20.0 * kPi,
      1e-14, 1e-13, 2000);
  CHECK(oscillatory.value == doctest::Approx(10.0 * kPi).epsilon(1e-12));
}

TEST_CASE("adaptive rule handles complex integrands") {
  auto res = integrate(
      [](double x) { return std::polar(1.0, x); }, 0.0, 1.0, 1e-14, 1e-13,
      100);
  CHECK(res.value.real() == doctest::Approx(std::sin(1.0)).epsilon(1e-13));
  CHECK(res.value.imag() ==
        doctest::Approx(1.0 - std::cos(1.0)).epsilon(1e-13));
}

TEST_CASE("cancelling integrands settle at the roundoff floor") {
  auto odd = integrate([](double x) { return x * x * x; }, -1.0, 1.0, 1e-30,
                       1e-13, 2000);
  CHECK(std::abs(odd.value) < 1e-15);
}

TEST_CASE("subdivision limit raises NumericalError with residual") {
  auto step = [](double x) { return x < 0.70710678 ? 0.0 : 1.0; };
  try {
    integrate(step, 0.0, 1.0, 1e-14, 1e-13, 3);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(e.residual() > 0.0);
  }
}

TEST_CASE("cancellation token aborts integration") {
  std::atomic<bool> cancel{true};
  CHECK_THROWS_AS(integrate([](double x) { return x; }, 0.0, 1.0, 1e-14,
                            1e-13, 100, CancellationToken(&cancel)),
                  OperationCancelled);
}

TEST_CASE("invalid tolerances are rejected") {
  CHECK_THROWS_AS(integrate([](double x) { return x; }, 0.0, 1.0, 0.0, 1e-10,
                            10),
                  std::invalid_argument);
}

TEST_CASE("Gauss-Legendre nodes and weights") {
  const auto rule = quadrature::gauss_legendre(5);
  CHECK(rule.weights.sum() == doctest::Approx(2.0).epsilon(1e-15));
  // degree 2n-1 polynomial integrated exactly; x^9 is odd so the sum is 0
  double odd = (rule.weights * rule.nodes.pow(9)).sum();
  CHECK(std::abs(odd) < 1e-16);
  double even = (rule.weights * rule.nodes.pow(8)).sum();
  CHECK(even == doctest::Approx(2.0 / 9.0).epsilon(1e-14));

  const auto big = quadrature::gauss_legendre(200);
  for (int i = 0; i + 1 < 200; ++i) CHECK(big.nodes[i] < big.nodes[i + 1]);
  double expsum = (big.weights * big.nodes.exp()).sum();
  CHECK(expsum ==
        doctest::Approx(std::exp(1.0) - std::exp(-1.0)).epsilon(1e-14));
}

TEST_CASE("periodic mean is spectrally accurate") {
  auto harmonic = quadrature::periodic_mean(
      [](double p) { return std::polar(1.0, 3.0 * p); }, 1e-12);
  CHECK(std::abs(harmonic) < 1e-12);

  auto rational = quadrature::periodic_mean(
      [](double p) { return 1.0 / (2.0 + std::cos(p)); }, 1e-12);
  CHECK(rational == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));
}

TEST_CASE("periodic mean supports vector integrands") {
  auto v = quadrature::periodic_mean(
      [](double p) {
        Eigen::Vector3cd out;
        out << std::complex<double>(1.0, 0.0), std::polar(1.0, p),
            std::complex<double>(0.0, 2.0);
        return out;
      },
      1e-12);
  CHECK(std::abs(v[0] - std::complex<double>(1.0, 0.0)) < 1e-12);
  CHECK(std::abs(v[1]) < 1e-12);
  CHECK(std::abs(v[2] - std::complex<double>(0.0, 2.0)) < 1e-12);
}

TEST_CASE("periodic mean reports stalled doubling") {
  // |sin(p/2)| is only C0, so doubling converges algebraically and cannot
  // reach a near-roundoff tolerance within a few levels.
  CHECK_THROWS_AS(quadrature::periodic_mean(
                      [](double p) { return std::abs(std::sin(0.5 * p)); },
                      1e-14, 16, 4),
                  NumericalError);
}
