#include "twistbeam/beam.hpp"

#include <cmath>
#include <stdexcept>

#include "twistbeam/specfun.hpp"

namespace twistbeam::beam {
namespace {

constexpr double kPi = 3.141592653589793238462643383279503;
constexpr double kTwoPi = 2.0 * kPi;
using cplx = std::complex<double>;
constexpr cplx kI{0.0, 1.0};

// i^n for any integer n, exact.
cplx ipow_i(int n) {
  switch (((n % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

void validate_point(const CylindricalPoint& p) {
  if (!(p.rho >= 0.0)) {
    throw std::invalid_argument("CylindricalPoint: rho must be >= 0");
  }
}

}  // namespace

BeamParams make_beam(double omega, double theta_k, int m_gamma, int Lambda) {
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    throw std::invalid_argument("make_beam: omega must be positive");
  }
  if (!(theta_k > 0.0 && theta_k < 0.5 * kPi)) {
    throw std::invalid_argument("make_beam: theta_k must lie in (0, pi/2)");
  }
  if (Lambda != 1 && Lambda != -1) {
    throw std::invalid_argument("make_beam: Lambda must be +1 or -1");
  }
  BeamParams p;
  p.omega = omega;
  p.theta_k = theta_k;
  p.kappa = omega * std::sin(theta_k);
  p.k_z = omega * std::cos(theta_k);
  p.m_gamma = m_gamma;
  p.Lambda = Lambda;
  return p;
}

PotentialSample vector_potential(const BeamParams& params,
                                 const CylindricalPoint& p) {
  validate_point(p);
  const int m = params.m_gamma;
  const int L = params.Lambda;
  const double half = 0.5 * params.theta_k;
  const double c2 = std::cos(half) * std::cos(half);
  const double s2 = std::sin(half) * std::sin(half);

  const cplx common = std::sqrt(params.kappa / kTwoPi) *
                      std::polar(1.0, params.k_z * p.z - params.omega * p.t);

  const cplx a_zero = (L / std::sqrt(2.0)) * std::sin(params.theta_k) *
                      specfun::bessel_j(m, params.kappa * p.rho) *
                      std::polar(1.0, m * p.phi);
  const cplx a_co = ipow_i(-L) * c2 *
                    specfun::bessel_j(m - L, params.kappa * p.rho) *
                    std::polar(1.0, (m - L) * p.phi);
  const cplx a_cross = ipow_i(L) * s2 *
                       specfun::bessel_j(m + L, params.kappa * p.rho) *
                       std::polar(1.0, (m + L) * p.phi);

  PotentialSample out;
  out.eta_zero = common * a_zero;
  if (L == 1) {
    out.eta_plus = common * a_co;
    out.eta_minus = common * a_cross;
  } else {
    out.eta_minus = common * a_co;
    out.eta_plus = common * a_cross;
  }
  return out;
}

PotentialSample vector_potential_by_quadrature(const BeamParams& params,
                                               const CylindricalPoint& p,
                                               double abs_tol) {
  validate_point(p);
  const int m = params.m_gamma;
  const int L = params.Lambda;
  const double half = 0.5 * params.theta_k;
  const double c2 = std::cos(half) * std::cos(half);
  const double s2 = std::sin(half) * std::sin(half);
  const double sink = std::sin(params.theta_k);
  const cplx phase_m = ipow_i(-m);  // (-i)^{m_gamma}

  // Superpose tilted plane waves over the cone azimuth. Components are kept
  // on the fixed circular basis (eta_+, eta_-, eta_0).
  auto integrand = [&](double phi_k) -> Eigen::Vector3cd {
    const cplx wave =
        phase_m * std::polar(1.0, m * phi_k) *
        std::polar(1.0, params.kappa * p.rho * std::cos(phi_k - p.phi) +
                            params.k_z * p.z);
    const cplx co = std::polar(1.0, -L * phi_k) * c2;      // along eta_Lambda
    const cplx cross = std::polar(1.0, L * phi_k) * s2;    // along eta_{-Lambda}
    const cplx zero = (L / std::sqrt(2.0)) * sink;
    Eigen::Vector3cd v;
    if (L == 1) {
      v << co * wave, cross * wave, zero * wave;
    } else {
      v << cross * wave, co * wave, zero * wave;
    }
    return v;
  };

  const Eigen::Vector3cd mean = quadrature::periodic_mean(integrand, abs_tol);
  const cplx common = std::sqrt(params.kappa / kTwoPi) *
                      std::polar(1.0, -params.omega * p.t);
  PotentialSample out;
  out.eta_plus = common * mean[0];
  out.eta_minus = common * mean[1];
  out.eta_zero = common * mean[2];
  return out;
}

FieldSample magnetic_field(const BeamParams& params,
                           const CylindricalPoint& p) {
  validate_point(p);
  const int m = params.m_gamma;
  const int L = params.Lambda;
  const double half = 0.5 * params.theta_k;
  const double c2 = std::cos(half) * std::cos(half);
  const double s2 = std::sin(half) * std::sin(half);
  const double j_co = specfun::bessel_j(m - L, params.kappa * p.rho);
  const double j_cross = specfun::bessel_j(m + L, params.kappa * p.rho);
  const double j_m = specfun::bessel_j(m, params.kappa * p.rho);

  const cplx common =
      params.omega * static_cast<double>(L) *
      std::sqrt(params.kappa / (4.0 * kPi)) *
      std::polar(1.0, params.k_z * p.z - params.omega * p.t + m * p.phi);

  FieldSample b;
  b << kI * common * (s2 * j_cross + c2 * j_co),
      common * (s2 * j_cross - c2 * j_co),
      common * std::sin(params.theta_k) * j_m;
  return b;
}

FieldSample electric_field(const BeamParams& params,
                           const CylindricalPoint& p) {
  return kI * magnetic_field(params, p);
}

double flux(const BeamParams& params, double rho) {
  if (!(rho >= 0.0)) throw std::invalid_argument("flux: rho must be >= 0");
  const int m = params.m_gamma;
  const int L = params.Lambda;
  const double half = 0.5 * params.theta_k;
  const double c2 = std::cos(half) * std::cos(half);
  const double s2 = std::sin(half) * std::sin(half);
  const double sink = std::sin(params.theta_k);
  const double j_co = specfun::bessel_j(m - L, params.kappa * rho);
  const double j_cross = specfun::bessel_j(m + L, params.kappa * rho);
  const double j_m = specfun::bessel_j(m, params.kappa * rho);
  const double bracket = c2 * c2 * j_co * j_co + s2 * s2 * j_cross * j_cross +
                         0.5 * sink * sink * j_m * j_m;
  return std::cos(params.theta_k) * params.kappa * params.omega *
         params.omega / kTwoPi * bracket;
}

double flux_from_fields(const BeamParams& params, const CylindricalPoint& p) {
  const FieldSample b = magnetic_field(params, p);
  const FieldSample e = electric_field(params, p);
  return std::cos(params.theta_k) * 0.5 * (e.squaredNorm() + b.squaredNorm());
}

Eigen::Vector3cd to_cartesian(const PotentialSample& a) {
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  Eigen::Vector3cd v;
  v << inv_sqrt2 * (-a.eta_plus + a.eta_minus),
      -kI * inv_sqrt2 * (a.eta_plus + a.eta_minus), a.eta_zero;
  return v;
}

Eigen::Vector3cd cylindrical_to_cartesian(const FieldSample& v, double phi) {
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  Eigen::Vector3cd out;
  out << v[0] * c - v[1] * s, v[0] * s + v[1] * c, v[2];
  return out;
}

}  // namespace twistbeam::beam
