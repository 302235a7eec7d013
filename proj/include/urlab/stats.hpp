// Small statistics helpers: sample moments, Welch's two-sample t-test,
// a chi-squared goodness-of-fit p-value, and a binomial 3-sigma check.
#pragma once

#include <cmath>
#include <span>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>

namespace urlab {

struct SampleMoments {
  double mean = 0.0;
  double sd = 0.0;
  std::size_t n = 0;
};

inline SampleMoments sample_moments(std::span<const double> xs) {
  SampleMoments m;
  m.n = xs.size();
  if (m.n == 0) return m;
  double sum = 0.0;
  for (double x : xs) sum += x;
  m.mean = sum / static_cast<double>(m.n);
  if (m.n > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - m.mean) * (x - m.mean);
    m.sd = std::sqrt(ss / static_cast<double>(m.n - 1));
  }
  return m;
}

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  double p_one_sided = 1.0;  // H1: mean(a) > mean(b)
  double p_two_sided = 1.0;
};

inline WelchResult welch_t_test(std::span<const double> a, std::span<const double> b) {
  const SampleMoments ma = sample_moments(a);
  const SampleMoments mb = sample_moments(b);
  if (ma.n < 2 || mb.n < 2) throw std::invalid_argument("welch_t_test: need >= 2 samples per group");
  const double va = ma.sd * ma.sd / static_cast<double>(ma.n);
  const double vb = mb.sd * mb.sd / static_cast<double>(mb.n);
  WelchResult r;
  const double diff = ma.mean - mb.mean;
  if (va + vb == 0.0) {
    // degenerate: both samples constant
    r.t = diff == 0.0 ? 0.0 : (diff > 0.0 ? 1.0 : -1.0) * std::numeric_limits<double>::infinity();
    r.df = static_cast<double>(ma.n + mb.n - 2);
    r.p_one_sided = diff > 0.0 ? 0.0 : 1.0;
    r.p_two_sided = diff == 0.0 ? 1.0 : 0.0;
    return r;
  }
  r.t = diff / std::sqrt(va + vb);
  r.df = (va + vb) * (va + vb) /
         (va * va / static_cast<double>(ma.n - 1) + vb * vb / static_cast<double>(mb.n - 1));
  const boost::math::students_t dist(r.df);
  r.p_one_sided = boost::math::cdf(boost::math::complement(dist, r.t));
  r.p_two_sided = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t)));
  return r;
}

// Pearson chi-squared goodness of fit against expected counts.
inline double chi_squared_gof_pvalue(std::span<const double> observed,
                                     std::span<const double> expected) {
  if (observed.size() != expected.size() || observed.size() < 2)
    throw std::invalid_argument("chi_squared_gof_pvalue: bad bins");
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (expected[i] <= 0.0) throw std::invalid_argument("chi_squared_gof_pvalue: non-positive expectation");
    const double d = observed[i] - expected[i];
    stat += d * d / expected[i];
  }
  const boost::math::chi_squared dist(static_cast<double>(observed.size() - 1));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

// |p_hat - p| within 3 standard deviations of a Binomial(n, p) proportion.
inline bool binomial_within_3sigma(std::int64_t successes, std::int64_t n, double p) {
  const double p_hat = static_cast<double>(successes) / static_cast<double>(n);
  const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
  return std::abs(p_hat - p) <= 3.0 * sigma;
}

}  // namespace urlab
