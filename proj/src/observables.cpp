#include "twistbeam/observables.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <stdexcept>
#include <thread>

#include "twistbeam/specfun.hpp"

namespace twistbeam::observables {
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

void validate_geometry(const TargetGeometry& geom) {
  if (!(geom.b >= 0.0)) {
    throw std::invalid_argument("TargetGeometry: b must be >= 0");
  }
}

// Reference flux that normalizes the plane-wave cross section. This is the
// unique constant for which the locally normalized ratio is exactly one for
// dipole transitions, and it is what the integrated convention is measured
// against as well.
double plane_wave_flux(const beam::BeamParams& beam) {
  return std::cos(beam.theta_k) * beam.omega * beam.omega;
}

double default_aperture(const beam::BeamParams& beam) {
  return 10.0 * kTwoPi / beam.kappa;
}

}  // namespace

const std::complex<double>& BraceTable::brace(int m_f) const {
  if (std::abs(m_f) > l_f) {
    throw std::invalid_argument("BraceTable: |m_f| > l_f");
  }
  return braces[static_cast<std::size_t>(m_f + l_f)];
}

namespace {

BraceTable braces_only(int n_f, int l_f, const beam::BeamParams& beam,
                       const QuadratureSpec& quad, double Z,
                       CancellationToken token) {
  BraceTable table;
  table.n_f = n_f;
  table.l_f = l_f;
  table.Z = Z;
  table.beam = beam;
  table.braces.resize(static_cast<std::size_t>(2 * l_f + 1));
  for (int m_f = -l_f; m_f <= l_f; ++m_f) {
    const atomic::AtomicState fin{n_f, l_f, m_f, Z};
    table.braces[static_cast<std::size_t>(m_f + l_f)] =
        atomic::brace_combination(fin, beam, quad, token);
  }
  return table;
}

}  // namespace

BraceTable make_brace_table(int n_f, int l_f, const beam::BeamParams& beam,
                            const QuadratureSpec& quad, double Z,
                            CancellationToken token) {
  BraceTable table = braces_only(n_f, l_f, beam, quad, Z, token);
  table.pw_amplitude =
      atomic::plane_wave_amplitude(n_f, l_f, beam, quad, Z, token);
  return table;
}

std::complex<double> amplitude_from_table(const BraceTable& table, int m_f,
                                          const TargetGeometry& geom) {
  validate_geometry(geom);
  const beam::BeamParams& bp = table.beam;
  const double j = specfun::bessel_j(m_f - bp.m_gamma, bp.kappa * geom.b);
  return -std::sqrt(bp.kappa) * ipow_i(-bp.Lambda) *
         std::polar(1.0, (bp.m_gamma - m_f) * geom.phi_b) * j *
         table.brace(m_f);
}

std::complex<double> amplitude(const atomic::AtomicState& final_state,
                               const beam::BeamParams& beam,
                               const TargetGeometry& geom,
                               const QuadratureSpec& quad,
                               CancellationToken token) {
  validate_geometry(geom);
  const cplx brace = atomic::brace_combination(final_state, beam, quad, token);
  const double j =
      specfun::bessel_j(final_state.m - beam.m_gamma, beam.kappa * geom.b);
  return -std::sqrt(beam.kappa) * ipow_i(-beam.Lambda) *
         std::polar(1.0, (beam.m_gamma - final_state.m) * geom.phi_b) * j *
         brace;
}

double amplitude_factorized(const atomic::AtomicState& final_state,
                            const beam::BeamParams& beam,
                            const TargetGeometry& geom,
                            std::complex<double> pw_amplitude) {
  atomic::validate(final_state);
  validate_geometry(geom);
  const double j =
      specfun::bessel_j(final_state.m - beam.m_gamma, beam.kappa * geom.b);
  const double d = specfun::wigner_small_d(
      {final_state.l, final_state.m, beam.Lambda}, beam.theta_k);
  return std::sqrt(beam.kappa / kTwoPi) * std::abs(j) * std::abs(d) *
         std::abs(pw_amplitude);
}

double excitation_rate_from_table(const BraceTable& table,
                                  const TargetGeometry& geom) {
  validate_geometry(geom);
  const beam::BeamParams& bp = table.beam;
  double sum = 0.0;
  for (int m_f = -table.l_f; m_f <= table.l_f; ++m_f) {
    const double j = specfun::bessel_j(m_f - bp.m_gamma, bp.kappa * geom.b);
    sum += j * j * std::norm(table.brace(m_f));
  }
  return bp.kappa * sum;
}

double excitation_rate(int n_f, int l_f, const beam::BeamParams& beam,
                       const TargetGeometry& geom, const QuadratureSpec& quad,
                       double Z, CancellationToken token) {
  // no plane-wave reference needed for a bare rate
  return excitation_rate_from_table(
      braces_only(n_f, l_f, beam, quad, Z, token), geom);
}

double aperture_mean_flux(const beam::BeamParams& beam, double radius) {
  if (!(radius > 0.0)) {
    throw std::invalid_argument("aperture_mean_flux: radius must be > 0");
  }
  auto integrand = [&](double rho) { return beam::flux(beam, rho) * rho; };
  const auto res =
      quadrature::integrate(integrand, 0.0, radius, 1e-30, 1e-12, 4000);
  return 2.0 * res.value / (radius * radius);
}

RatioPoint ratio_from_table(const BraceTable& table,
                            const TargetGeometry& geom,
                            const FluxConvention& convention,
                            double mean_flux) {
  validate_geometry(geom);
  const beam::BeamParams& bp = table.beam;
  const double rate = excitation_rate_from_table(table, geom);
  const double pw_ref = std::norm(table.pw_amplitude) / plane_wave_flux(bp);

  if (convention.kind == FluxKind::kIntegrated) {
    if (!(mean_flux > 0.0)) {
      throw std::invalid_argument("ratio_from_table: mean flux must be > 0");
    }
    return {rate / mean_flux / pw_ref, PointClass::kRegular};
  }

  const double f_local = beam::flux(bp, geom.b);
  if (f_local > 0.0) {
    return {rate / f_local / pw_ref, PointClass::kRegular};
  }
  // Exact flux zero (vortex center with |m_gamma| >= 2). An already nonzero
  // rate diverges outright; otherwise the limit follows from power counting.
  if (rate > 0.0) {
    return {std::numeric_limits<double>::infinity(), PointClass::kDivergent};
  }
  const int exponent = ratio_small_b_exponent(table.l_f, bp);
  if (exponent < 0) {
    return {std::numeric_limits<double>::infinity(), PointClass::kDivergent};
  }
  if (exponent > 0) {
    return {0.0, PointClass::kZero};
  }
  // Flat limit: only realized by dipole levels, where the ratio is exactly 1.
  return {1.0, PointClass::kFiniteLimit};
}

RatioPoint ratio_rtw(int n_f, int l_f, const beam::BeamParams& beam,
                     const TargetGeometry& geom,
                     const FluxConvention& convention,
                     const QuadratureSpec& quad, double Z,
                     CancellationToken token) {
  const BraceTable table = make_brace_table(n_f, l_f, beam, quad, Z, token);
  double mean_flux = 0.0;
  if (convention.kind == FluxKind::kIntegrated) {
    const double radius = convention.aperture_radius > 0.0
                              ? convention.aperture_radius
                              : default_aperture(beam);
    mean_flux = aperture_mean_flux(beam, radius);
  }
  return ratio_from_table(table, geom, convention, mean_flux);
}

RatioCurve scan_ratio(int n_f, int l_f, const beam::BeamParams& beam,
                      const FluxConvention& convention,
                      const Eigen::ArrayXd& b_grid, const QuadratureSpec& quad,
                      double Z) {
  if (b_grid.size() == 0) {
    throw std::invalid_argument("scan_ratio: empty b grid");
  }
  for (Eigen::Index i = 0; i + 1 < b_grid.size(); ++i) {
    if (!(b_grid[i] < b_grid[i + 1])) {
      throw std::invalid_argument("scan_ratio: b grid must be strictly increasing");
    }
  }

  RatioCurve curve;
  curve.b_grid = b_grid;
  curve.values.resize(b_grid.size());
  curve.tags.assign(static_cast<std::size_t>(b_grid.size()),
                    PointClass::kRegular);
  curve.convention = convention;
  curve.beam = beam;
  curve.n_f = n_f;
  curve.l_f = l_f;

  const BraceTable table = make_brace_table(n_f, l_f, beam, quad, Z);
  double mean_flux = 0.0;
  if (convention.kind == FluxKind::kIntegrated) {
    const double radius = convention.aperture_radius > 0.0
                              ? convention.aperture_radius
                              : default_aperture(beam);
    mean_flux = aperture_mean_flux(beam, radius);
  }

  parallel_for_indices(static_cast<int>(b_grid.size()), [&](int i) {
    const RatioPoint pt = ratio_from_table(table, TargetGeometry{b_grid[i]},
                                           convention, mean_flux);
    curve.values[i] = pt.value;
    curve.tags[static_cast<std::size_t>(i)] = pt.tag;
  });
  return curve;
}

ScalingPrediction predict_scaling(int n_f, int l_f, int m_f,
                                  const beam::BeamParams& beam) {
  atomic::validate(atomic::AtomicState{n_f, l_f, m_f, 1.0});
  ScalingPrediction p;
  p.amp_exponent_b = std::abs(beam.m_gamma - m_f);
  p.amp_exponent_theta = std::abs(beam.m_gamma - beam.Lambda);
  p.amp_exponent_omega_a0 = l_f - 1;
  p.ratio_exponent = -(2 * beam.m_gamma - 2);
  return p;
}

FitResult fit_scaling(const Eigen::ArrayXd& b_grid,
                      const Eigen::ArrayXd& values) {
  const Eigen::Index n = b_grid.size();
  if (n != values.size()) {
    throw std::invalid_argument("fit_scaling: grid/value size mismatch");
  }
  if (n < 5) {
    throw std::invalid_argument("fit_scaling: need at least 5 points");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(b_grid[i] > 0.0) || (i + 1 < n && !(b_grid[i] < b_grid[i + 1]))) {
      throw std::invalid_argument(
          "fit_scaling: grid must be positive and strictly increasing");
    }
    if (values[i] < 0.0) {
      throw std::invalid_argument("fit_scaling: values must be nonnegative");
    }
  }

  FitResult out;
  out.n_points = static_cast<int>(n);
  if ((values <= 0.0).all()) {
    out.exact_zero = true;
    return out;
  }
  if ((values <= 0.0).any()) {
    throw std::invalid_argument(
        "fit_scaling: mixed zero and positive samples cannot be fitted");
  }

  const Eigen::ArrayXd x = b_grid.log();
  const Eigen::ArrayXd y = values.log();
  const double xm = x.mean();
  const double ym = y.mean();
  const double sxx = ((x - xm) * (x - xm)).sum();
  const double sxy = ((x - xm) * (y - ym)).sum();
  out.slope = sxy / sxx;
  const Eigen::ArrayXd resid = y - ym - out.slope * (x - xm);
  const double ssr = (resid * resid).sum();
  out.std_error = std::sqrt(ssr / (static_cast<double>(n) - 2.0) / sxx);
  return out;
}

int ratio_small_b_exponent(int l_f, const beam::BeamParams& beam) {
  // Leading power of b in the summed rate versus the local flux.
  const int rate_pow = 2 * std::max(std::abs(beam.m_gamma) - l_f, 0);
  const int flux_pow = 2 * std::max(std::abs(beam.m_gamma) - 1, 0);
  return rate_pow - flux_pow;
}

int scan_thread_count() {
  if (const char* env = std::getenv("TWISTBEAM_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for_indices(int n, const std::function<void(int)>& work) {
  const int threads = std::max(1, std::min(scan_thread_count(), n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) work(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error = nullptr;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= n || failed.load(std::memory_order_relaxed)) return;
        try {
          work(i);
        } catch (...) {
          if (!failed.exchange(true)) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace twistbeam::observables
