#pragma once

#include <complex>

namespace twistbeam::specfun {

inline constexpr int kDefaultMaxBesselOrder = 64;
inline constexpr int kMaxAngularMomentum = 64;

/// Bessel function of the first kind, integer order. Series evaluation near
/// the origin, normalized downward recurrence elsewhere; negative orders and
/// arguments handled through J_{-n}(x) = (-1)^n J_n(x) and J_n(-x) =
/// (-1)^n J_n(x). Accurate to ~1e-12 relative for |x| <= 100.
double bessel_j(int order, double x, int max_order = kDefaultMaxBesselOrder);

/// Index triple for a rotation matrix element d^j_{m_row, m_col}.
struct WignerIndex {
  int j;
  int m_row;
  int m_col;
};

/// Wigner small-d matrix element in the convention pinned by
/// d^1_{0,1}(theta) = -sin(theta)/sqrt(2). Evaluated with the factorial sum
/// formula; exact for the small j used here, supported up to j = 64.
double wigner_small_d(const WignerIndex& idx, double theta);

/// Y_lm(theta, phi) with the Condon-Shortley phase.
std::complex<double> spherical_harmonic(int l, int m, double theta,
                                        double phi);

/// Y_lm at phi = 0 as a function of cos(theta). Real by construction; this is
/// the form that appears in the azimuthally reduced matrix elements.
double spherical_harmonic_polar(int l, int m, double cos_theta);

/// Bound-state quantum numbers of a hydrogen-like atom. Lengths are measured
/// in units of a0 and radial functions carry units a0^{-3/2}.
struct RadialState {
  int n;
  int l;
  double Z = 1.0;
  double a0 = 1.0;
};

/// R_{nl}(r) from the closed associated-Laguerre form.
double hydrogen_radial(const RadialState& state, double r);

/// dR_{nl}/dr, analytic. The ground state reduces to -2 Z^{5/2} e^{-Zr}.
double hydrogen_radial_derivative(const RadialState& state, double r);

}  // namespace twistbeam::specfun
