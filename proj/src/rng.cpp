#include "homwit/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace homwit::rng {

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint64_t derive(std::uint64_t base, std::uint64_t tag, std::uint64_t index) {
  return mix(mix(base ^ tag) + index);
}

double Stream::uniform01() {
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double Stream::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform01() - 1.0;
    v = 2.0 * uniform01() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  have_spare_ = true;
  return u * f;
}

std::uint64_t Stream::poisson(double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw std::invalid_argument("poisson: mean must be finite and non-negative");
  }
  if (mean == 0.0) return 0;

  const double u = uniform01();
  const auto k0 = static_cast<std::uint64_t>(mean);
  const double logp0 =
      static_cast<double>(k0) * std::log(mean) - mean - std::lgamma(static_cast<double>(k0) + 1.0);
  const double p0 = std::exp(logp0);

  // Enumerate k0, k0-1, k0+1, k0-2, ... with exact pmf values until the
  // cumulative mass passes u. Any fixed enumeration order yields the exact
  // marginal distribution.
  double acc = p0;
  if (u <= acc) return k0;

  double p_lo = p0;
  double p_hi = p0;
  std::uint64_t k_lo = k0;
  std::uint64_t k_hi = k0;
  while (true) {
    bool advanced = false;
    if (k_lo > 0) {
      p_lo *= static_cast<double>(k_lo) / mean;
      --k_lo;
      acc += p_lo;
      if (u <= acc) return k_lo;
      advanced = true;
    }
    p_hi *= mean / static_cast<double>(k_hi + 1);
    ++k_hi;
    acc += p_hi;
    if (u <= acc) return k_hi;
    if (p_hi > 0.0) advanced = true;

    // u can exceed the accumulated mass only through rounding in the extreme
    // tail; return the largest enumerated value in that case.
    if (!advanced || (acc >= 1.0 - 1e-15 && p_hi < 1e-18 && p_lo < 1e-18)) {
      return k_hi;
    }
  }
}

std::vector<std::uint64_t> multinomial(Stream& stream, std::uint64_t n,
                                       std::span<const double> probs) {
  if (probs.empty()) {
    throw std::invalid_argument("multinomial: empty probability vector");
  }
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw std::invalid_argument("multinomial: probabilities must be finite and >= 0");
    }
    total += p;
  }
  if (total <= 0.0) {
    throw std::invalid_argument("multinomial: probabilities sum to zero");
  }

  std::vector<double> cdf(probs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i] / total;
    cdf[i] = acc;
  }
  cdf.back() = 1.0;

  std::vector<std::uint64_t> counts(probs.size(), 0);
  for (std::uint64_t e = 0; e < n; ++e) {
    const double u = stream.uniform01();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const std::size_t idx = static_cast<std::size_t>(it - cdf.begin());
    ++counts[std::min(idx, counts.size() - 1)];
  }
  return counts;
}

}  // namespace homwit::rng
