#pragma once

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "twistbeam/atomic.hpp"
#include "twistbeam/beam.hpp"

namespace twistbeam::observables {

using quadrature::QuadratureSpec;

/// Position of the vortex axis relative to the nucleus, projected on the
/// transverse plane.
struct TargetGeometry {
  double b;             // impact parameter, in a0
  double phi_b = 0.0;   // azimuth; enters amplitudes as a pure phase
};

enum class FluxKind { kLocal, kIntegrated };

struct FluxConvention {
  FluxKind kind = FluxKind::kLocal;
  double aperture_radius = 0.0;  // 0 = default 10 * (2 pi / kappa); kIntegrated only
};

/// Behaviour of the cross-section ratio at points where the local flux
/// vanishes exactly.
enum class PointClass { kRegular, kFiniteLimit, kZero, kDivergent };

struct RatioPoint {
  double value;
  PointClass tag = PointClass::kRegular;
};

struct RatioCurve {
  Eigen::ArrayXd b_grid;  // strictly increasing, in a0
  Eigen::ArrayXd values;  // nonnegative; +inf at divergent points
  std::vector<PointClass> tags;
  FluxConvention convention;
  beam::BeamParams beam;
  int n_f;
  int l_f;
};

/// Leading small-b / small-pitch exponents of an amplitude and of the
/// locally normalized cross-section ratio.
struct ScalingPrediction {
  int amp_exponent_b;         // |m_gamma - m_f|
  int amp_exponent_theta;     // |m_gamma - Lambda|
  int amp_exponent_omega_a0;  // l_f - 1
  int ratio_exponent;         // -(2 m_gamma - 2)
};

struct FitResult {
  double slope = 0.0;
  double std_error = 0.0;
  bool exact_zero = false;  // set when the data is identically zero
  int n_points = 0;
};

/// Pitch-angle brace combinations for every m_f of a level, plus the
/// plane-wave reference amplitude. The braces carry no dependence on the
/// impact parameter or on m_gamma, so one table serves a whole scan.
struct BraceTable {
  int n_f;
  int l_f;
  double Z;
  beam::BeamParams beam;
  std::vector<std::complex<double>> braces;  // index m_f + l_f
  std::complex<double> pw_amplitude;

  const std::complex<double>& brace(int m_f) const;
};

BraceTable make_brace_table(int n_f, int l_f, const beam::BeamParams& beam,
                            const QuadratureSpec& quad, double Z = 1.0,
                            CancellationToken token = {});

/// Full transition amplitude at impact parameter b: the displacement Bessel
/// factor J_{m_f - m_gamma}(kappa b), the azimuthal phase, and the brace
/// combination, with the shared dimensional prefactor set to one.
std::complex<double> amplitude(const atomic::AtomicState& final_state,
                               const beam::BeamParams& beam,
                               const TargetGeometry& geom,
                               const QuadratureSpec& quad,
                               CancellationToken token = {});

std::complex<double> amplitude_from_table(const BraceTable& table, int m_f,
                                          const TargetGeometry& geom);

/// |amplitude| via the factorized form
///   sqrt(kappa/2 pi) |J_{m_f-m_gamma}(kappa b)| |d^{l_f}_{m_f Lambda}| |M_pw|.
double amplitude_factorized(const atomic::AtomicState& final_state,
                            const beam::BeamParams& beam,
                            const TargetGeometry& geom,
                            std::complex<double> pw_amplitude);

/// Sum over final m_f of |amplitude|^2, unnormalized by flux.
double excitation_rate(int n_f, int l_f, const beam::BeamParams& beam,
                       const TargetGeometry& geom, const QuadratureSpec& quad,
                       double Z = 1.0, CancellationToken token = {});

double excitation_rate_from_table(const BraceTable& table,
                                  const TargetGeometry& geom);

/// Mean of the flux over a disk of the given radius centred on the axis.
double aperture_mean_flux(const beam::BeamParams& beam, double radius);

/// Twisted-to-plane-wave cross-section ratio at impact parameter b.
///
/// Local convention: [rate(b)/f(b)] / [|M_pw|^2 / f_pw] with the plane-wave
/// reference flux f_pw = cos(theta_k) omega^2, the unique normalization for
/// which the ratio is exactly one for dipole (l_f = 1) transitions.
/// Integrated convention: the local value times f(b)/<f>_aperture, evaluated
/// without forming 0/0 at the vortex center. Points where the local flux
/// vanishes exactly are classified instead of divided.
RatioPoint ratio_rtw(int n_f, int l_f, const beam::BeamParams& beam,
                     const TargetGeometry& geom,
                     const FluxConvention& convention,
                     const QuadratureSpec& quad, double Z = 1.0,
                     CancellationToken token = {});

/// Same computation against a prebuilt table; mean_flux is only read under
/// the integrated convention.
RatioPoint ratio_from_table(const BraceTable& table, const TargetGeometry& geom,
                            const FluxConvention& convention,
                            double mean_flux = 0.0);

/// Ratio curve over a b grid. Points are computed concurrently (capped by
/// TWISTBEAM_THREADS) and assembled in grid order.
RatioCurve scan_ratio(int n_f, int l_f, const beam::BeamParams& beam,
                      const FluxConvention& convention,
                      const Eigen::ArrayXd& b_grid, const QuadratureSpec& quad,
                      double Z = 1.0);

ScalingPrediction predict_scaling(int n_f, int l_f, int m_f,
                                  const beam::BeamParams& beam);

/// Exact small-b exponent of the locally normalized ratio from power
/// counting of the rate and flux: -(2 m_gamma - 2) whenever m_gamma <= l_f,
/// and 2 - 2 l_f when the center rate vanishes (m_gamma > l_f).
int ratio_small_b_exponent(int l_f, const beam::BeamParams& beam);

/// Least-squares slope in log-log coordinates with its standard error.
/// Requires at least five strictly positive samples on a strictly increasing
/// grid; identically zero data is classified instead of fitted.
FitResult fit_scaling(const Eigen::ArrayXd& b_grid,
                      const Eigen::ArrayXd& values);

/// Thread count for grid scans: TWISTBEAM_THREADS if set, else the hardware
/// concurrency.
int scan_thread_count();

/// Runs work(0..n-1) on up to scan_thread_count() threads. Any exception is
/// rethrown after all workers have stopped; callers index into preallocated
/// storage, so assembly order is deterministic.
void parallel_for_indices(int n, const std::function<void(int)>& work);

}  // namespace twistbeam::observables
