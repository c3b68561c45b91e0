#include "twistbeam/specfun.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace twistbeam::specfun {
namespace {

constexpr double kPi = 3.141592653589793238462643383279503;

// n! as double for n <= 170; built once, thread-safe.
const std::array<double, 171>& factorial_table() {
  static const std::array<double, 171> table = [] {
    std::array<double, 171> t{};
    t[0] = 1.0;
    for (int i = 1; i <= 170; ++i) t[i] = t[i - 1] * i;
    return t;
  }();
  return table;
}

double factorial(int n) { return factorial_table()[n]; }

// log(n!) for the large-j rotation elements whose factorial products
// overflow double.
const std::array<double, 171>& log_factorial_table() {
  static const std::array<double, 171> table = [] {
    std::array<double, 171> t{};
    t[0] = 0.0;
    for (int i = 1; i <= 170; ++i) t[i] = t[i - 1] + std::log(i);
    return t;
  }();
  return table;
}

double log_factorial(int n) { return log_factorial_table()[n]; }

double ipow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

// Ascending series about the origin; safe for x <= 8 where the largest term
// stays within ~3 decades of the result.
double bessel_series(int n, double x) {
  const double q = -0.25 * x * x;
  double term = ipow(0.5 * x, n) / factorial(n);
  double sum = term;
  for (int k = 1; k < 400; ++k) {
    term *= q / (static_cast<double>(k) * (n + k));
    sum += term;
    if (std::abs(term) <= 1e-18 * std::abs(sum) + 1e-300) break;
  }
  return sum;
}

// Normalized downward recurrence (Miller's algorithm) seeded far above the
// turning point; the even-order sum J_0 + 2 J_2 + 2 J_4 + ... = 1 fixes the
// scale.
double bessel_miller(int n, double x) {
  const int base = std::max(n, static_cast<int>(x));
  const int start = base + 18 + static_cast<int>(12.0 * std::cbrt(base + 1.0));

  double next = 0.0;    // J_{k+1}
  double cur = 1e-30;   // J_k (arbitrary scale)
  double norm = (start % 2 == 0) ? 2.0 * cur : 0.0;
  double jn = (start == n) ? cur : 0.0;

  for (int k = start; k >= 1; --k) {
    double prev = (2.0 * k / x) * cur - next;  // J_{k-1}
    next = cur;
    cur = prev;
    const int idx = k - 1;
    if (idx == n) jn = cur;
    if (idx == 0) {
      norm += cur;
    } else if (idx % 2 == 0) {
      norm += 2.0 * cur;
    }
    if (std::abs(cur) > 1e250) {
      cur *= 1e-250;
      next *= 1e-250;
      norm *= 1e-250;
      jn *= 1e-250;
    }
  }
  return jn / norm;
}

}  // namespace

double bessel_j(int order, double x, int max_order) {
  if (std::isnan(x)) throw std::invalid_argument("bessel_j: x is NaN");
  if (std::abs(order) > max_order) {
    throw std::invalid_argument("bessel_j: |order| " +
                                std::to_string(std::abs(order)) +
                                " above cap " + std::to_string(max_order));
  }
  int n = order;
  double sign = 1.0;
  if (n < 0) {
    n = -n;
    if (n % 2 != 0) sign = -sign;
  }
  double ax = x;
  if (ax < 0.0) {
    ax = -ax;
    if (n % 2 != 0) sign = -sign;
  }
  if (ax == 0.0) return n == 0 ? 1.0 : 0.0;
  const double value = (ax <= 8.0) ? bessel_series(n, ax) : bessel_miller(n, ax);
  return sign * value;
}

double wigner_small_d(const WignerIndex& idx, double theta) {
  if (idx.j < 0 || idx.j > kMaxAngularMomentum) {
    throw std::invalid_argument("wigner_small_d: j out of range");
  }
  if (std::abs(idx.m_row) > idx.j || std::abs(idx.m_col) > idx.j) {
    throw std::invalid_argument("wigner_small_d: |m| exceeds j");
  }
  if (!(theta >= 0.0 && theta <= kPi)) {
    throw std::invalid_argument("wigner_small_d: theta outside [0, pi]");
  }
  // Orientation fixed by the pin d^1_{0,1} = -sin(theta)/sqrt(2): the sum
  // formula below runs over (mp, m) = (m_col, m_row).
  const int j = idx.j;
  const int mp = idx.m_col;
  const int m = idx.m_row;

  const double c = std::cos(0.5 * theta);
  const double s = std::sin(0.5 * theta);
  const int s_min = std::max(0, m - mp);
  const int s_max = std::min(j + m, j - mp);

  if (j <= 40) {
    // exact factorial arithmetic; products stay finite in this range
    const double pref = std::sqrt(factorial(j + mp) * factorial(j - mp) *
                                  factorial(j + m) * factorial(j - m));
    double sum = 0.0;
    for (int k = s_min; k <= s_max; ++k) {
      const double denom = factorial(j + m - k) * factorial(k) *
                           factorial(mp - m + k) * factorial(j - mp - k);
      const double parity = ((mp - m + k) % 2 == 0) ? 1.0 : -1.0;
      sum += parity * ipow(c, 2 * j + m - mp - 2 * k) *
             ipow(s, mp - m + 2 * k) / denom;
    }
    return pref * sum;
  }

  // log-space combination for large j where the factorial products overflow
  const double log_pref = 0.5 * (log_factorial(j + mp) + log_factorial(j - mp) +
                                 log_factorial(j + m) + log_factorial(j - m));
  double sum = 0.0;
  for (int k = s_min; k <= s_max; ++k) {
    const int cp = 2 * j + m - mp - 2 * k;
    const int sp = mp - m + 2 * k;
    if ((c == 0.0 && cp > 0) || (s == 0.0 && sp > 0)) continue;
    double lg = log_pref - log_factorial(j + m - k) - log_factorial(k) -
                log_factorial(mp - m + k) - log_factorial(j - mp - k);
    if (c > 0.0) lg += cp * std::log(c);
    if (s > 0.0) lg += sp * std::log(s);
    const double parity = ((mp - m + k) % 2 == 0) ? 1.0 : -1.0;
    sum += parity * std::exp(lg);
  }
  return sum;
}

namespace {

// Associated Legendre P_l^m with the Condon-Shortley phase, m >= 0.
double legendre_p(int l, int m, double x) {
  double somx2 = std::sqrt(std::max(0.0, (1.0 - x) * (1.0 + x)));
  double pmm = 1.0;
  for (int i = 1; i <= m; ++i) pmm *= -(2.0 * i - 1.0) * somx2;
  if (l == m) return pmm;
  double pmmp1 = x * (2.0 * m + 1.0) * pmm;
  if (l == m + 1) return pmmp1;
  double pll = 0.0;
  for (int ll = m + 2; ll <= l; ++ll) {
    pll = (x * (2.0 * ll - 1.0) * pmmp1 - (ll + m - 1.0) * pmm) / (ll - m);
    pmm = pmmp1;
    pmmp1 = pll;
  }
  return pll;
}

}  // namespace

double spherical_harmonic_polar(int l, int m, double cos_theta) {
  if (l < 0 || l > kMaxAngularMomentum) {
    throw std::invalid_argument("spherical_harmonic: l out of range");
  }
  if (std::abs(m) > l) {
    throw std::invalid_argument("spherical_harmonic: |m| > l");
  }
  const int am = std::abs(m);
  const double norm = std::sqrt((2.0 * l + 1.0) / (4.0 * kPi) *
                                factorial(l - am) / factorial(l + am));
  double value = norm * legendre_p(l, am, cos_theta);
  // Y_{l,-m}(theta, 0) = (-1)^m Y_{l,m}(theta, 0)
  if (m < 0 && am % 2 != 0) value = -value;
  return value;
}

std::complex<double> spherical_harmonic(int l, int m, double theta,
                                        double phi) {
  const double polar = spherical_harmonic_polar(l, m, std::cos(theta));
  return polar * std::polar(1.0, m * phi);
}

namespace {

void validate_radial(const RadialState& s) {
  if (s.n < 1 || s.l < 0 || s.l >= s.n) {
    throw std::invalid_argument("hydrogen_radial: need 0 <= l <= n-1, n >= 1");
  }
  if (!(s.Z >= 1.0)) throw std::invalid_argument("hydrogen_radial: Z < 1");
  if (!(s.a0 > 0.0)) throw std::invalid_argument("hydrogen_radial: a0 <= 0");
}

// Generalized Laguerre L^{(alpha)}_k(x) by the three-term recurrence.
double laguerre(int k, int alpha, double x) {
  if (k == 0) return 1.0;
  double lm1 = 1.0;
  double lc = 1.0 + alpha - x;
  for (int i = 2; i <= k; ++i) {
    const double ln = ((2.0 * i - 1.0 + alpha - x) * lc -
                       (i - 1.0 + alpha) * lm1) / i;
    lm1 = lc;
    lc = ln;
  }
  return lc;
}

double radial_norm(const RadialState& s) {
  return std::pow(2.0 * s.Z / (s.n * s.a0), 1.5) *
         std::sqrt(factorial(s.n - s.l - 1) /
                   (2.0 * s.n * factorial(s.n + s.l)));
}

}  // namespace

double hydrogen_radial(const RadialState& s, double r) {
  validate_radial(s);
  if (r < 0.0 || std::isnan(r)) {
    throw std::invalid_argument("hydrogen_radial: r must be >= 0");
  }
  const double x = 2.0 * s.Z * r / (s.n * s.a0);
  return radial_norm(s) * std::exp(-0.5 * x) * ipow(x, s.l) *
         laguerre(s.n - s.l - 1, 2 * s.l + 1, x);
}

double hydrogen_radial_derivative(const RadialState& s, double r) {
  validate_radial(s);
  if (r < 0.0 || std::isnan(r)) {
    throw std::invalid_argument("hydrogen_radial_derivative: r must be >= 0");
  }
  const double scale = 2.0 * s.Z / (s.n * s.a0);  // dx/dr
  const double x = scale * r;
  const int k = s.n - s.l - 1;
  const double lag = laguerre(k, 2 * s.l + 1, x);
  // d/dx [e^{-x/2} x^l L] = e^{-x/2} (-x^l L / 2 + l x^{l-1} L + x^l L')
  // with L' = -L^{(alpha+1)}_{k-1}.
  double dbody = -0.5 * ipow(x, s.l) * lag;
  if (s.l > 0) dbody += s.l * ipow(x, s.l - 1) * lag;
  if (k > 0) dbody -= ipow(x, s.l) * laguerre(k - 1, 2 * s.l + 2, x);
  return radial_norm(s) * scale * std::exp(-0.5 * x) * dbody;
}

}  // namespace twistbeam::specfun
