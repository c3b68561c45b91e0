#pragma once

namespace twistbeam::units {

// Atomic units throughout: hbar = m_e = e = 1, lengths in Bohr radii.
// Photon kinematics are carried as wavenumbers in 1/a0.
inline constexpr double kBohrRadiusNm = 0.0529177210903;
inline constexpr double kSpeedOfLightAu = 137.036;

/// Wavenumber (1/a0) of the photon resonant with the 1s -> n_f transition of
/// a hydrogen-like atom of charge Z: E = (Z^2/2)(1 - 1/n_f^2) Hartree.
double resonance_wavenumber(int n_f, double Z = 1.0);

double wavenumber_from_wavelength_nm(double lambda_nm);
double wavelength_nm_from_wavenumber(double omega);

}  // namespace twistbeam::units
