#include "hybridcov/specfun.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hybridcov::specfun {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;
constexpr int kMaxIter = 100000;

// Series for P(a, x), valid for x < a + 1.
double lower_series(double a, double x) {
  double ap = a;
  double del = 1.0 / a;
  double sum = del;
  for (int n = 0; n < kMaxIter; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * kEps) {
      return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
  }
  throw std::runtime_error("reg_lower_gamma: series failed to converge");
}

// Modified Lentz continued fraction for Q(a, x), valid for x >= a + 1.
double upper_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) {
      return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
    }
  }
  throw std::runtime_error("reg_upper_gamma: continued fraction failed to converge");
}

void check_gamma_args(const char* who, double a, double x) {
  if (!(a > 0.0) || !std::isfinite(a)) throw std::domain_error(std::string(who) + ": a must be positive");
  if (!(x >= 0.0)) throw std::domain_error(std::string(who) + ": x must be nonnegative");
}

// Coefficients of 1/Gamma(z) = sum_k c_k z^k (Abramowitz & Stegun 6.1.34).
constexpr double kRecipGamma[] = {
    1.0,
    0.5772156649015329,
    -0.6558780715202538,
    -0.0420026350340952,
    0.1665386113822915,
    -0.0421977345555443,
    -0.0096219715278770,
    0.0072189432466630,
    -0.0011651675918591,
    -0.0002152416741149,
    0.0001280502823882,
    -0.0000201348547807,
    -0.0000012504934821,
    0.0000011330272320,
    -0.0000002056338417,
    0.0000000061160950,
    0.0000000050020075,
    -0.0000000011812746,
    0.0000000001043427,
    0.0000000000077823,
    -0.0000000000036968,
    0.0000000000005100,
    -0.0000000000000206,
    -0.0000000000000054,
    0.0000000000000014,
    0.0000000000000001,
};

// Temme's auxiliary functions for |mu| <= 1/2:
//   gam1 = (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu)
//   gam2 = (1/Gamma(1-mu) + 1/Gamma(1+mu)) / 2
// 1/Gamma(1+z) = sum_k c_{k+1} z^k, so the even and odd parts separate.
void temme_gammas(double mu, double& gam1, double& gam2) {
  const double mu2 = mu * mu;
  constexpr int n = static_cast<int>(std::size(kRecipGamma));
  double odd = 0.0;   // sum over c_1, c_3, ... -> gam2
  double even = 0.0;  // sum over c_2, c_4, ... -> -gam1
  for (int k = n - 1; k >= 0; --k) {
    if (k % 2 == 0) {
      odd = odd * mu2 + kRecipGamma[k];
    } else {
      even = even * mu2 + kRecipGamma[k];
    }
  }
  gam1 = -even;
  gam2 = odd;
}

// Returns exp(x) K_nu(x) and exp(x) K_{nu+1}(x) for |nu| <= 1/2.
void temme_k(double mu, double x, double& k_mu, double& k_mu1) {
  const double mu2 = mu * mu;
  if (x < 2.0) {
    // Temme's series.
    const double x2 = 0.5 * x;
    const double pimu = std::numbers::pi * mu;
    const double fact = std::fabs(pimu) < kEps ? 1.0 : pimu / std::sin(pimu);
    double d = -std::log(x2);
    double e = mu * d;
    const double fact2 = std::fabs(e) < kEps ? 1.0 : std::sinh(e) / e;
    double gam1 = 0.0;
    double gam2 = 0.0;
    temme_gammas(mu, gam1, gam2);
    const double gampl = gam2 - mu * gam1;  // 1/Gamma(1+mu)
    const double gammi = gam2 + mu * gam1;  // 1/Gamma(1-mu)
    double ff = fact * (gam1 * std::cosh(e) + gam2 * fact2 * d);
    double sum = ff;
    e = std::exp(e);
    double p = 0.5 * e / gampl;
    double q = 0.5 / (e * gammi);
    double c = 1.0;
    d = x2 * x2;
    double sum1 = p;
    int i = 1;
    for (; i < kMaxIter; ++i) {
      ff = (i * ff + p + q) / (i * static_cast<double>(i) - mu2);
      c *= d / i;
      p /= i - mu;
      q /= i + mu;
      const double del = c * ff;
      sum += del;
      const double del1 = c * (p - i * ff);
      sum1 += del1;
      if (std::fabs(del) < std::fabs(sum) * kEps) break;
    }
    if (i == kMaxIter) throw std::runtime_error("bessel_k: series failed to converge");
    const double scale = std::exp(x);
    k_mu = sum * scale;
    k_mu1 = sum1 * (2.0 / x) * scale;
    return;
  }
  // Steed's continued fraction (CF2) with Temme's normalisation.
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d;
  double delh = d;
  double q1 = 0.0;
  double q2 = 1.0;
  const double a1 = 0.25 - mu2;
  double q = a1;
  double c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  int i = 2;
  for (; i < kMaxIter; ++i) {
    a -= 2.0 * (i - 1);
    c = -a * c / i;
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::fabs(dels / s) < kEps) break;
  }
  if (i == kMaxIter) throw std::runtime_error("bessel_k: continued fraction failed to converge");
  h = a1 * h;
  k_mu = std::sqrt(std::numbers::pi / (2.0 * x)) / s;
  k_mu1 = k_mu * (mu + x + 0.5 - h) / x;
}

}  // namespace

double gamma_fn(double a) {
  if (!(a > 0.0) || !std::isfinite(a)) throw std::domain_error("gamma_fn: a must be positive");
  const double g = std::tgamma(a);
  if (!std::isfinite(g)) throw std::overflow_error("gamma_fn: result overflows");
  return g;
}

double reg_lower_gamma(double a, double x) {
  check_gamma_args("reg_lower_gamma", a, x);
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return lower_series(a, x);
  return 1.0 - upper_fraction(a, x);
}

double reg_upper_gamma(double a, double x) {
  check_gamma_args("reg_upper_gamma", a, x);
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return 1.0 - lower_series(a, x);
  return upper_fraction(a, x);
}

namespace {

// t^(a-1) exp(-t - c/t) divided by its maximum over the integration range,
// so that the absolute tolerance stays meaningful for tiny integrals.
struct ScaledIntegrand {
  double a;
  double c;
  double log_peak;

  double log_value(double t) const { return (a - 1.0) * std::log(t) - t - c / t; }
  double operator()(double t) const { return t <= 0.0 ? 0.0 : std::exp(log_value(t) - log_peak); }
};

// Location of the unique maximum of t^(a-1) exp(-t - c/t) for c > 0.
double peak_location(double a, double c) {
  const double m = a - 1.0;
  const double r = std::sqrt(m * m + 4.0 * c);
  return m >= 0.0 ? 0.5 * (m + r) : 2.0 * c / (r - m);
}

// True when the integral over any range with maximum exp(log_peak) near
// t = peak is below the smallest double.
bool underflows(double log_peak, double peak) {
  return log_peak + std::log(std::max(1.0, peak)) + 8.0 < std::log(std::numeric_limits<double>::denorm_min());
}

void check_gen_args(const char* name, double a, double b, double c) {
  if (!(a > 0.0) || !std::isfinite(a)) throw std::domain_error(std::string(name) + ": a must be positive");
  if (!(b >= 0.0) || !(c >= 0.0) || !std::isfinite(b) || !std::isfinite(c)) {
    throw std::domain_error(std::string(name) + ": b and c must be finite and nonnegative");
  }
}

}  // namespace

double gen_inc_gamma(double a, double b, double c, const QuadratureSettings& settings) {
  check_gen_args("gen_inc_gamma", a, b, c);
  if (c == 0.0) {
    if (b == 0.0) return gamma_fn(a);
    return gamma_fn(a) * reg_upper_gamma(a, b);
  }

  ScaledIntegrand f{a, c, 0.0};
  const double peak = std::max(b, peak_location(a, c));
  f.log_peak = f.log_value(peak);
  if (underflows(f.log_peak, peak)) return 0.0;

  // Split at the larger of b and sqrt(c) so the tail panel starts at or
  // beyond the bulk.
  const double split = std::max(b, std::sqrt(c));
  double sum = 0.0;
  if (split > b) sum += integrate(f, b, split, settings).value;
  sum += integrate_to_infinity(f, split, settings).value;
  return std::exp(f.log_peak) * sum;
}

double lower_gen_inc_gamma(double a, double b, double c, const QuadratureSettings& settings) {
  check_gen_args("lower_gen_inc_gamma", a, b, c);
  if (b == 0.0) return 0.0;
  if (c == 0.0) return gamma_fn(a) * reg_lower_gamma(a, b);

  const double split = std::sqrt(c);
  // With b far past the bulk of the integrand the complement of a small
  // upper tail is cheaper and avoids one panel spanning [split, b].
  if (split < b && b > 2.0 * std::max(split, a) + 40.0) {
    const double full = 2.0 * std::exp(0.5 * a * std::log(c) + std::log(bessel_k_scaled(a, 2.0 * split)) - 2.0 * split);
    return full - gen_inc_gamma(a, b, c, settings);
  }

  ScaledIntegrand f{a, c, 0.0};
  f.log_peak = f.log_value(std::min(b, peak_location(a, c)));
  double sum = 0.0;
  if (split >= b) {
    sum = integrate(f, 0.0, b, settings).value;
  } else {
    sum = integrate(f, 0.0, split, settings).value + integrate(f, split, b, settings).value;
  }
  return std::exp(f.log_peak) * sum;
}

double erfcx(double x) {
  if (std::isnan(x)) return x;
  if (x < 2.0) {
    if (x < -26.0) return std::numeric_limits<double>::infinity();
    return std::exp(x * x) * std::erfc(x);
  }
  // Continued fraction 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))), modified Lentz.
  constexpr double tiny = 1e-300;
  double f = x;
  double c = x;
  double d = 0.0;
  for (int k = 1; k < 500; ++k) {
    const double ak = 0.5 * k;
    d = x + ak * d;
    d = d == 0.0 ? 1.0 / tiny : 1.0 / d;
    c = x + ak / c;
    if (c == 0.0) c = tiny;
    const double delta = c * d;
    f *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  return 1.0 / (f * std::sqrt(std::numbers::pi));
}

double lower_gen_inc_gamma_half(double a, double b, double c) {
  check_gen_args("lower_gen_inc_gamma_half", a, b, c);
  if (a != 0.5 && a != 1.5) throw std::domain_error("lower_gen_inc_gamma_half: a must be 1/2 or 3/2");
  if (b == 0.0) return 0.0;
  if (c == 0.0) return gamma_fn(a) * reg_lower_gamma(a, b);
  const double s = std::sqrt(b);
  const double q = std::sqrt(c);
  const double r = q / s;
  const double e = std::exp(-b - c / b);
  // A = exp(-2q) erfc(r - s), B = exp(2q) erfc(r + s).
  const double big_a = r >= s ? erfcx(r - s) * e : 2.0 * std::exp(-2.0 * q) - erfcx(s - r) * e;
  const double big_b = erfcx(r + s) * e;
  const double half = 0.5 * std::sqrt(std::numbers::pi) * (big_a - big_b);
  if (a == 0.5) return half;
  // L(3/2) = L(1/2)/2 + c L(-1/2) - sqrt(b) exp(-b - c/b), c L(-1/2) = sqrt(pi) q (A + B) / 2.
  return 0.5 * half + 0.5 * std::sqrt(std::numbers::pi) * q * (big_a + big_b) - s * e;
}

double bessel_k_scaled(double nu, double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw std::domain_error("bessel_k: x must be positive and finite");
  if (!std::isfinite(nu)) throw std::domain_error("bessel_k: nu must be finite");
  nu = std::fabs(nu);
  const int nl = static_cast<int>(nu + 0.5);
  const double mu = nu - nl;
  double k_mu = 0.0;
  double k_mu1 = 0.0;
  temme_k(mu, x, k_mu, k_mu1);
  // Forward recurrence K_{m+1} = K_{m-1} + (2m/x) K_m is stable for K.
  for (int i = 1; i <= nl; ++i) {
    const double next = (mu + i) * (2.0 / x) * k_mu1 + k_mu;
    k_mu = k_mu1;
    k_mu1 = next;
  }
  if (!std::isfinite(k_mu)) throw std::overflow_error("bessel_k: result overflows");
  return k_mu;
}

double bessel_k(double nu, double x) {
  const double scaled = bessel_k_scaled(nu, x);
  const double value = scaled * std::exp(-x);
  if (value == 0.0 || value < std::numeric_limits<double>::min()) {
    throw std::underflow_error("bessel_k: result underflows the double range");
  }
  return value;
}

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal_quantile: p must lie in (0, 1)");
  // Acklam's rational approximation followed by one Halley step.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                 1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                 6.680131188771972e+01, -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                 -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  double x = 0.0;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Refine against the upper or lower tail, whichever keeps precision.
  const double e = p < 0.5 ? 0.5 * std::erfc(-x / std::numbers::sqrt2) - p
                           : (1.0 - p) - 0.5 * std::erfc(x / std::numbers::sqrt2);
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

}  // namespace hybridcov::specfun
