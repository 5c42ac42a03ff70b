#include "rep/stats.hpp"

#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>

namespace rep::stats {

namespace {

double upper_tail(double statistic, int dof) {
  if (dof <= 0) return 1.0;
  const boost::math::chi_squared dist(dof);
  return boost::math::cdf(boost::math::complement(dist, statistic));
}

}  // namespace

ChiSquare uniformity(std::span<const long> counts) {
  if (counts.size() < 2) throw std::invalid_argument("uniformity test needs at least two categories");
  double total = 0.0;
  for (long c : counts) total += static_cast<double>(c);
  if (total <= 0.0) throw std::invalid_argument("uniformity test on an empty histogram");
  const double expected = total / static_cast<double>(counts.size());
  ChiSquare r;
  for (long c : counts) r.statistic += (static_cast<double>(c) - expected) * (static_cast<double>(c) - expected) / expected;
  r.dof = static_cast<int>(counts.size()) - 1;
  r.p_value = upper_tail(r.statistic, r.dof);
  return r;
}

ChiSquare two_sample(std::span<const long> a, std::span<const long> b) {
  if (a.size() != b.size()) throw std::invalid_argument("histograms have different sizes");
  double na = 0.0;
  double nb = 0.0;
  for (long c : a) na += static_cast<double>(c);
  for (long c : b) nb += static_cast<double>(c);
  if (na <= 0.0 || nb <= 0.0) throw std::invalid_argument("two-sample test on an empty histogram");
  const double ka = std::sqrt(nb / na);
  const double kb = std::sqrt(na / nb);
  ChiSquare r;
  int used = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double ai = static_cast<double>(a[i]);
    const double bi = static_cast<double>(b[i]);
    if (ai + bi == 0.0) continue;
    ++used;
    const double d = ka * ai - kb * bi;
    r.statistic += d * d / (ai + bi);
  }
  r.dof = used - 1;
  r.p_value = upper_tail(r.statistic, r.dof);
  return r;
}

}  // namespace rep::stats
