#pragma once

#include <complex>

#include "twistbeam/beam.hpp"
#include "twistbeam/cancellation.hpp"
#include "twistbeam/quadrature.hpp"

namespace twistbeam::atomic {

using quadrature::QuadratureSpec;

struct AtomicState {
  int n;
  int l;
  int m;
  double Z = 1.0;
};

/// Throws std::invalid_argument unless n >= 1, 0 <= l < n, |m| <= l, Z >= 1.
void validate(const AtomicState& state);

/// Which circular polarization component a reduced matrix element couples to,
/// relative to the beam helicity.
enum class PolIndex { kPlusLambda, kZero, kMinusLambda };

/// The three dimensionless atomic factors for a 1s -> (n_f, l_f, m_f)
/// transition, one per polarization component.
struct GFactors {
  std::complex<double> g_plus;
  std::complex<double> g_zero;
  std::complex<double> g_minus;
};

struct GFactorResult {
  std::complex<double> value;
  double error;  // propagated quadrature estimate
};

/// Dimensionless radial-angular integral
///   g = - a0 Int r^2 dr R_{n_f l_f}(r) R'_{10}(r)
///         Int d(cos t) J_{m_f - L'}(kappa r sin t)
///             Y_{l_f m_f}(t, 0) Y_{1 L'}(t, 0) exp(i k_z r cos t)
/// for arbitrary kinematics (kappa, k_z). L' is the polarization index.
/// The radial cutoff defaults to 40 n_f^2 a0 / Z, beyond which the bound
/// states are dead to double precision.
GFactorResult g_factor_kinematic(int n_f, int l_f, int m_f, double Z,
                                 int lambda_prime, double kappa, double k_z,
                                 const QuadratureSpec& quad,
                                 CancellationToken token = {});

/// Single g-factor for a beam. pol selects L' in {+Lambda, 0, -Lambda}.
std::complex<double> g_factor(const AtomicState& final_state, PolIndex pol,
                              const beam::BeamParams& beam,
                              const QuadratureSpec& quad,
                              CancellationToken token = {});

GFactors g_factors(const AtomicState& final_state,
                   const beam::BeamParams& beam, const QuadratureSpec& quad,
                   CancellationToken token = {});

/// The pitch-angle combination entering every transition amplitude:
///   cos^2(theta_k/2) g_{+Lambda} + (i/sqrt(2)) sin(theta_k) g_0
///   - sin^2(theta_k/2) g_{-Lambda}.
/// Proportional to the rotation matrix element d^{l_f}_{m_f Lambda}(theta_k)
/// times an m_f-independent constant.
std::complex<double> brace_combination(const AtomicState& final_state,
                                       const beam::BeamParams& beam,
                                       const QuadratureSpec& quad,
                                       CancellationToken token = {});

/// Photoexcitation amplitude for a plane wave travelling along z with
/// helicity Lambda into (n_f, l_f, m_f = Lambda), from the same machinery in
/// the forward limit (kappa = 0, k_z = omega). Independent of m_gamma and of
/// the target position. The common dimensional prefactor shared with the
/// Bessel-mode amplitude is set to one; it cancels in every reported ratio.
std::complex<double> plane_wave_amplitude(int n_f, int l_f,
                                          const beam::BeamParams& beam,
                                          const QuadratureSpec& quad,
                                          double Z = 1.0,
                                          CancellationToken token = {});

}  // namespace twistbeam::atomic
