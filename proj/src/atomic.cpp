#include "twistbeam/atomic.hpp"

#include <cmath>
#include <stdexcept>

#include "twistbeam/specfun.hpp"

namespace twistbeam::atomic {
namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
using cplx = std::complex<double>;

cplx ipow_i(int n) {
  switch (((n % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

int pol_to_lambda_prime(PolIndex pol, int Lambda) {
  switch (pol) {
    case PolIndex::kPlusLambda: return Lambda;
    case PolIndex::kZero: return 0;
    default: return -Lambda;
  }
}

}  // namespace

void validate(const AtomicState& state) {
  if (state.n < 1 || state.l < 0 || state.l >= state.n) {
    throw std::invalid_argument("AtomicState: need 0 <= l < n");
  }
  if (std::abs(state.m) > state.l) {
    throw std::invalid_argument("AtomicState: |m| > l");
  }
  if (!(state.Z >= 1.0)) {
    throw std::invalid_argument("AtomicState: Z must be >= 1");
  }
}

GFactorResult g_factor_kinematic(int n_f, int l_f, int m_f, double Z,
                                 int lambda_prime, double kappa, double k_z,
                                 const QuadratureSpec& quad,
                                 CancellationToken token) {
  validate(AtomicState{n_f, l_f, m_f, Z});
  if (std::abs(lambda_prime) > 1) {
    throw std::invalid_argument("g_factor: polarization index must be -1, 0, or 1");
  }
  if (!(kappa >= 0.0) || std::isnan(k_z)) {
    throw std::invalid_argument("g_factor: bad kinematics");
  }

  const double cutoff =
      quad.radial_cutoff > 0.0 ? quad.radial_cutoff : 40.0 * n_f * n_f / Z;
  const specfun::RadialState final_state{n_f, l_f, Z, 1.0};
  const specfun::RadialState ground{1, 0, Z, 1.0};
  const int bessel_order = m_f - lambda_prime;

  // Tolerances for the angular integral nested inside each radial sample.
  QuadratureSpec inner = quad;
  inner.abs_tol = quad.abs_tol;
  inner.rel_tol = 0.1 * quad.rel_tol;

  auto angular = [&](double r) -> cplx {
    auto f = [&](double u) -> cplx {
      const double sin_t = std::sqrt(std::max(0.0, 1.0 - u * u));
      return specfun::bessel_j(bessel_order, kappa * r * sin_t) *
             specfun::spherical_harmonic_polar(l_f, m_f, u) *
             specfun::spherical_harmonic_polar(1, lambda_prime, u) *
             std::polar(1.0, k_z * r * u);
    };
    return quadrature::integrate(f, -1.0, 1.0, inner, token).value;
  };

  auto radial = [&](double r) -> cplx {
    return r * r * specfun::hydrogen_radial(final_state, r) *
           specfun::hydrogen_radial_derivative(ground, r) * angular(r);
  };

  const auto res = quadrature::integrate(radial, 0.0, cutoff, quad, token);
  return {-res.value, res.error};
}

std::complex<double> g_factor(const AtomicState& final_state, PolIndex pol,
                              const beam::BeamParams& beam,
                              const QuadratureSpec& quad,
                              CancellationToken token) {
  if (final_state.n < 2) {
    throw std::invalid_argument("g_factor: transitions start from 1s; need n_f >= 2");
  }
  return g_factor_kinematic(final_state.n, final_state.l, final_state.m,
                            final_state.Z, pol_to_lambda_prime(pol, beam.Lambda),
                            beam.kappa, beam.k_z, quad, token)
      .value;
}

GFactors g_factors(const AtomicState& final_state,
                   const beam::BeamParams& beam, const QuadratureSpec& quad,
                   CancellationToken token) {
  GFactors g;
  g.g_plus = g_factor(final_state, PolIndex::kPlusLambda, beam, quad, token);
  g.g_zero = g_factor(final_state, PolIndex::kZero, beam, quad, token);
  g.g_minus = g_factor(final_state, PolIndex::kMinusLambda, beam, quad, token);
  return g;
}

std::complex<double> brace_combination(const AtomicState& final_state,
                                       const beam::BeamParams& beam,
                                       const QuadratureSpec& quad,
                                       CancellationToken token) {
  const GFactors g = g_factors(final_state, beam, quad, token);
  const double half = 0.5 * beam.theta_k;
  const double c2 = std::cos(half) * std::cos(half);
  const double s2 = std::sin(half) * std::sin(half);
  const cplx i_over_sqrt2{0.0, 1.0 / std::sqrt(2.0)};
  return c2 * g.g_plus + i_over_sqrt2 * std::sin(beam.theta_k) * g.g_zero -
         s2 * g.g_minus;
}

std::complex<double> plane_wave_amplitude(int n_f, int l_f,
                                          const beam::BeamParams& beam,
                                          const QuadratureSpec& quad,
                                          double Z, CancellationToken token) {
  if (n_f <= l_f) {
    throw std::invalid_argument("plane_wave_amplitude: need n_f > l_f");
  }
  // Forward kinematics: the pitch-angle weights collapse to the +Lambda
  // component and the final projection is m_f = Lambda.
  const auto g = g_factor_kinematic(n_f, l_f, beam.Lambda, Z, beam.Lambda,
                                    0.0, beam.omega, quad, token);
  return -std::sqrt(kTwoPi) * ipow_i(-beam.Lambda) * g.value;
}

}  // namespace twistbeam::atomic
