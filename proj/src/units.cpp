#include "twistbeam/units.hpp"

#include <stdexcept>

namespace twistbeam::units {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double resonance_wavenumber(int n_f, double Z) {
  if (n_f < 2) {
    throw std::invalid_argument("resonance_wavenumber: n_f must be >= 2");
  }
  if (!(Z >= 1.0)) {
    throw std::invalid_argument("resonance_wavenumber: Z must be >= 1");
  }
  const double energy = 0.5 * Z * Z * (1.0 - 1.0 / (static_cast<double>(n_f) * n_f));
  return energy / kSpeedOfLightAu;
}

double wavenumber_from_wavelength_nm(double lambda_nm) {
  if (!(lambda_nm > 0.0)) {
    throw std::invalid_argument("wavenumber_from_wavelength_nm: need lambda > 0");
  }
  return kTwoPi * kBohrRadiusNm / lambda_nm;
}

double wavelength_nm_from_wavenumber(double omega) {
  if (!(omega > 0.0)) {
    throw std::invalid_argument("wavelength_nm_from_wavenumber: need omega > 0");
  }
  return kTwoPi / omega * kBohrRadiusNm;
}

}  // namespace twistbeam::units
