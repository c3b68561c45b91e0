#pragma once

#include <complex>

#include <Eigen/Core>

#include "twistbeam/quadrature.hpp"

namespace twistbeam::beam {

/// Kinematics and quantum numbers of a Bessel mode. omega is the wavenumber
/// |k|; kappa = omega sin(theta_k) and k_z = omega cos(theta_k) are stored
/// redundantly and kept consistent to 1e-14 relative.
struct BeamParams {
  double omega;
  double theta_k;
  double kappa;
  double k_z;
  int m_gamma;
  int Lambda;  // helicity, +1 or -1
};

/// Validates ranges (Lambda in {-1,+1}, 0 < theta_k < pi/2, omega > 0) and
/// fills in the derived wavenumbers.
BeamParams make_beam(double omega, double theta_k, int m_gamma, int Lambda);

struct CylindricalPoint {
  double rho;
  double phi = 0.0;
  double z = 0.0;
  double t = 0.0;
};

/// Complex amplitudes of the vector potential on the circular basis
///   eta_{+1} = (0, -1, -i, 0)/sqrt(2), eta_{-1} = (0, +1, -i, 0)/sqrt(2),
///   eta_0 = z-hat,
/// with the time component identically zero. Physical fields are
/// amplitude * exp(-i omega t) plus the conjugate.
struct PotentialSample {
  std::complex<double> eta_plus;
  std::complex<double> eta_minus;
  std::complex<double> eta_zero;
  std::complex<double> time_component{0.0, 0.0};
};

/// Complex field amplitudes on the cylindrical basis (rho-hat, phi-hat,
/// z-hat).
using FieldSample = Eigen::Vector3cd;

/// Closed form of the Bessel-mode vector potential: one J_{m_gamma -+ Lambda}
/// sideband per transverse circular component and J_{m_gamma} along z.
PotentialSample vector_potential(const BeamParams& params,
                                 const CylindricalPoint& p);

/// Same quantity evaluated directly as the azimuthal plane-wave superposition
/// that defines the mode, using the trapezoid rule with interval doubling.
/// Serves as the validation oracle for the closed form. Throws NumericalError
/// if the doubling fails to reach abs_tol.
PotentialSample vector_potential_by_quadrature(const BeamParams& params,
                                               const CylindricalPoint& p,
                                               double abs_tol = 1e-10);

FieldSample magnetic_field(const BeamParams& params, const CylindricalPoint& p);

/// E = i B componentwise (the fields are 90 degrees out of phase).
FieldSample electric_field(const BeamParams& params, const CylindricalPoint& p);

/// Canonical energy flux density
///   f(rho) = cos(theta_k) (kappa omega^2 / 2 pi)
///            [cos^4(theta_k/2) J^2_{m-L} + sin^4(theta_k/2) J^2_{m+L}
///             + (sin^2(theta_k)/2) J^2_m](kappa rho).
/// Nonnegative; vanishes on the axis unless |m_gamma| = 1 with the matching
/// helicity sideband at order zero.
double flux(const BeamParams& params, double rho);

/// cos(theta_k) (|E|^2 + |B|^2)/2 evaluated from the complex field
/// amplitudes; equals flux() identically. Squared complex amplitudes are the
/// cycle averages of the squared physical fields, which restores the
/// conventional factor 1/4.
double flux_from_fields(const BeamParams& params, const CylindricalPoint& p);

/// Cartesian components (x, y, z) of a potential sample.
Eigen::Vector3cd to_cartesian(const PotentialSample& a);

/// Cartesian components of a cylindrical-basis field at azimuth phi.
Eigen::Vector3cd cylindrical_to_cartesian(const FieldSample& v, double phi);

}  // namespace twistbeam::beam
