#include "wlr/stats.hpp"

#include <cmath>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

namespace wlr {

double mean(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("mean: empty input");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double sample_sd(std::span<const double> xs) {
  if (xs.size() < 2) throw std::invalid_argument("sample_sd: need at least two values");
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw std::invalid_argument("paired_t_test: samples must be the same length");
  if (a.size() < 2) throw std::invalid_argument("paired_t_test: need at least two pairs");
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  const double md = mean(d);
  const double sd = sample_sd(d);
  if (sd == 0.0)
    throw DegenerateVariance("paired_t_test: zero variance in differences");
  const double n = static_cast<double>(d.size());
  TTestResult res;
  res.t = md / (sd / std::sqrt(n));
  res.df = n - 1.0;
  boost::math::students_t dist(res.df);
  res.p_two_sided = 2.0 * boost::math::cdf(dist, -std::abs(res.t));
  return res;
}

double normal_cdf(double x) {
  static const boost::math::normal dist;
  return boost::math::cdf(dist, x);
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("normal_quantile: p must lie in (0, 1)");
  static const boost::math::normal dist;
  return boost::math::quantile(dist, p);
}

}  // namespace wlr
