#pragma once

#include <cmath>
#include <limits>
#include <numbers>

// Standard-normal helpers shared by the domain drifts and the likelihood
// bounds. Tail quantities go through erfc (or its log asymptotics) so CDF
// differences stay accurate far from the mean.
namespace bridgekit::gauss {

inline double pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

inline double cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// Survival function P(X > x).
inline double sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

// log P(X > x), finite for x up to ~1e8 via the tail expansion.
inline double log_sf(double x) {
  if (x < 15.0) return std::log(sf(x));
  const double x2 = x * x;
  // log(phi(x)/x) + log(1 - 1/x^2 + 3/x^4 - ...)
  return -0.5 * x2 - std::log(x) - 0.5 * std::log(2.0 * std::numbers::pi) +
         std::log1p(-1.0 / x2 + 3.0 / (x2 * x2));
}

inline double log_cdf(double x) { return log_sf(-x); }

// P(lo < X < hi), computed on the tail-safe side.
inline double cdf_diff(double lo, double hi) {
  if (lo >= hi) return 0.0;
  if (lo > 0.0) return sf(lo) - sf(hi);
  if (hi < 0.0) return cdf(hi) - cdf(lo);
  return cdf(hi) - cdf(lo);
}

// log P(lo < X < hi); -inf when the mass underflows entirely.
inline double log_cdf_diff(double lo, double hi) {
  if (lo >= hi) return -std::numeric_limits<double>::infinity();
  if (lo <= 0.0 && hi >= 0.0) return std::log(cdf_diff(lo, hi));
  // Both bounds on the same side: work in the tail via log_sf.
  double la, lb;  // la = log of the larger tail mass
  if (lo > 0.0) {
    la = log_sf(lo);
    lb = log_sf(hi);
  } else {
    la = log_sf(-hi);
    lb = log_sf(-lo);
  }
  if (la == -std::numeric_limits<double>::infinity()) return la;
  const double r = lb - la;
  return la + std::log1p(-std::exp(r));
}

// log N(x; mu, var)
inline double log_pdf(double x, double mu, double var) {
  const double d = x - mu;
  return -0.5 * d * d / var - 0.5 * std::log(2.0 * std::numbers::pi * var);
}

}  // namespace bridgekit::gauss
