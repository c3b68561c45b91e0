#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <type_traits>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "twistbeam/cancellation.hpp"
#include "twistbeam/errors.hpp"

namespace twistbeam::quadrature {

/// Tolerances and limits for the adaptive integrators. The default absolute
/// tolerance is far below any quantity of interest, so the relative tolerance
/// governs; a roundoff floor proportional to the L1 norm of the integrand
/// keeps cancelling integrals from subdividing forever.
struct QuadratureSpec {
  double abs_tol = 1e-30;
  double rel_tol = 1e-11;
  int max_subdivisions = 2000;
  double radial_cutoff = 0.0;  // 0 = choose from the bound-state extent
};

namespace detail {

template <class T>
struct is_complex : std::false_type {};
template <class T>
struct is_complex<std::complex<T>> : std::true_type {};

template <class V>
double magnitude(const V& v) {
  if constexpr (std::is_arithmetic_v<V> || is_complex<V>::value) {
    return std::abs(v);
  } else {
    return v.cwiseAbs().maxCoeff();  // Eigen dense expression
  }
}

// Gauss 7 / Kronrod 15 pair on [-1, 1]; nodes are symmetric about zero.
// Even-indexed abscissae carry the embedded Gauss weights.
inline constexpr double kKronrodNodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.000000000000000};
inline constexpr double kKronrodWeights[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
inline constexpr double kGaussWeights[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

template <class V>
struct PanelResult {
  V value{};
  double error = 0.0;    // scaled |K15 - G7| estimate
  double l1_norm = 0.0;  // integral of |f|, used for the roundoff floor
};

// One Gauss-Kronrod 7/15 panel on [a, b].
template <class F, class V = std::invoke_result_t<F, double>>
PanelResult<V> gk15(F&& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  V samples[15];
  samples[14] = f(center);
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kKronrodNodes[i];
    samples[2 * i] = f(center + dx);
    samples[2 * i + 1] = f(center - dx);
  }

  V k15 = kKronrodWeights[7] * samples[14];
  double resabs = kKronrodWeights[7] * magnitude(samples[14]);
  for (int i = 0; i < 7; ++i) {
    const V pair_sum = samples[2 * i] + samples[2 * i + 1];
    k15 = k15 + kKronrodWeights[i] * pair_sum;
    resabs += kKronrodWeights[i] *
              (magnitude(samples[2 * i]) + magnitude(samples[2 * i + 1]));
  }
  V g7 = kGaussWeights[3] * samples[14];
  for (int i = 0; i < 3; ++i) {
    const V pair_sum = samples[2 * (2 * i + 1)] + samples[2 * (2 * i + 1) + 1];
    g7 = g7 + kGaussWeights[i] * pair_sum;
  }

  // Scale-aware error model: the raw |K15 - G7| difference is sharpened
  // against the variation of f about its mean, as in the classic QAG rule.
  const V mean = k15 * 0.5;
  double resasc = kKronrodWeights[7] * magnitude(V(samples[14] - mean));
  for (int i = 0; i < 7; ++i) {
    resasc += kKronrodWeights[i] * (magnitude(V(samples[2 * i] - mean)) +
                                    magnitude(V(samples[2 * i + 1] - mean)));
  }
  resasc *= half;

  PanelResult<V> out;
  out.value = k15 * half;
  out.l1_norm = resabs * half;
  double err = magnitude(V((k15 - g7) * half));
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  out.error = err;
  return out;
}

}  // namespace detail

template <class V>
struct IntegrationResult {
  V value{};
  double error = 0.0;
};

/// Globally adaptive Gauss-Kronrod integration on [a, b]. Splits the interval
/// with the largest error estimate until the total satisfies
///   err <= max(abs_tol, rel_tol * |I|)
/// or the roundoff floor of the accumulated L1 norm is reached. Throws
/// NumericalError (with the residual estimate) if max_subdivisions panels
/// are not enough, and OperationCancelled if the token fires.
template <class F, class V = std::invoke_result_t<F, double>>
IntegrationResult<V> integrate(F&& f, double a, double b, double abs_tol,
                               double rel_tol, int max_subdivisions,
                               CancellationToken token = {}) {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
    throw std::invalid_argument("integrate: tolerances must be positive");
  }
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw std::invalid_argument("integrate: endpoints must be finite");
  }

  struct Panel {
    double a, b;
    detail::PanelResult<V> res;
  };
  std::vector<Panel> panels;
  panels.push_back({a, b, detail::gk15(f, a, b)});

  const double eps = std::numeric_limits<double>::epsilon();
  for (int round = 0; round <= max_subdivisions; ++round) {
    if (token.cancelled()) throw OperationCancelled();

    V total = panels.front().res.value;
    double err_total = panels.front().res.error;
    double l1_total = panels.front().res.l1_norm;
    std::size_t worst = 0;
    for (std::size_t i = 1; i < panels.size(); ++i) {
      total = total + panels[i].res.value;
      err_total += panels[i].res.error;
      l1_total += panels[i].res.l1_norm;
      if (panels[i].res.error > panels[worst].res.error) worst = i;
    }

    const double target =
        std::max({abs_tol, rel_tol * detail::magnitude(total),
                  100.0 * eps * l1_total});
    if (err_total <= target) return {total, err_total};

    if (round == max_subdivisions) {
      throw NumericalError("integrate: subdivision limit reached", err_total);
    }
    Panel p = panels[worst];
    const double mid = 0.5 * (p.a + p.b);
    if (!(mid > p.a && mid < p.b)) {
      throw NumericalError("integrate: interval too small to split",
                           err_total);
    }
    panels[worst] = {p.a, mid, detail::gk15(f, p.a, mid)};
    panels.push_back({mid, p.b, detail::gk15(f, mid, p.b)});
  }
  // unreachable
  throw NumericalError("integrate: internal error", 0.0);
}

template <class F>
auto integrate(F&& f, double a, double b, const QuadratureSpec& spec,
               CancellationToken token = {}) {
  return integrate(std::forward<F>(f), a, b, spec.abs_tol, spec.rel_tol,
                   spec.max_subdivisions, token);
}

/// Fixed Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
  Eigen::ArrayXd nodes;
  Eigen::ArrayXd weights;
};
GaussLegendreRule gauss_legendre(int n);

/// Mean value of a smooth 2*pi-periodic function, computed with the
/// trapezoid rule under interval doubling. Spectrally accurate for smooth
/// integrands; throws NumericalError when doubling stalls above abs_tol.
template <class F, class V = std::invoke_result_t<F, double>>
V periodic_mean(F&& f, double abs_tol, int initial_points = 16,
                int max_doublings = 14) {
  constexpr double two_pi = 6.283185307179586476925286766559;
  int n = initial_points;
  V mean = f(0.0) * 0.0;
  for (int k = 0; k < n; ++k) mean = mean + f(two_pi * k / n);
  mean = mean * (1.0 / n);

  double diff = std::numeric_limits<double>::infinity();
  for (int lvl = 0; lvl < max_doublings; ++lvl) {
    V mid = f(two_pi * 0.5 / n) * 0.0;
    for (int k = 0; k < n; ++k) mid = mid + f(two_pi * (k + 0.5) / n);
    mid = mid * (1.0 / n);
    const V refined = (mean + mid) * 0.5;
    diff = detail::magnitude(V(refined - mean));
    mean = refined;
    n *= 2;
    if (lvl >= 1 && diff < abs_tol) return mean;
  }
  throw NumericalError("periodic_mean: doubling failed to converge", diff);
}

}  // namespace twistbeam::quadrature
