#include "steer/strategies.hpp"

#include <algorithm>
#include <stdexcept>

namespace steer {

int DeterministicStrategy::respond(int x) const {
  if (x < 1 || x > settings)
    throw std::out_of_range("DeterministicStrategy: setting out of range");
  return outcomes[x - 1];
}

int DeterministicStrategy::no_click_count() const {
  return static_cast<int>(std::count(outcomes.begin(), outcomes.end(), 0));
}

std::vector<DeterministicStrategy> enumerate_strategies(int m, int d,
                                                        bool include_no_click) {
  if (m < 1 || d < 2)
    throw std::invalid_argument("enumerate_strategies: need m >= 1, d >= 2");
  const int alphabet = include_no_click ? d + 1 : d;
  std::int64_t count = 1;
  for (int i = 0; i < m; ++i) {
    count *= alphabet;
    if (count > kEnumerationCap)
      throw std::length_error("enumerate_strategies: cap exceeded");
  }

  const int lo = include_no_click ? 0 : 1;
  std::vector<DeterministicStrategy> out;
  out.reserve(static_cast<std::size_t>(count));
  std::vector<int> cur(m, lo);
  for (std::int64_t k = 0; k < count; ++k) {
    out.push_back({m, d, include_no_click, cur});
    // lexicographic increment, least significant position last
    for (int i = m - 1; i >= 0; --i) {
      if (++cur[i] <= d) break;
      cur[i] = lo;
    }
  }
  return out;
}

std::vector<ProductStrategy> enumerate_product_strategies(int m, int d,
                                                          bool include_no_click) {
  auto single = enumerate_strategies(m, d, include_no_click);
  const std::int64_t sq =
      static_cast<std::int64_t>(single.size()) * static_cast<std::int64_t>(single.size());
  if (sq > kEnumerationCap)
    throw std::length_error("enumerate_product_strategies: cap exceeded");
  std::vector<ProductStrategy> out;
  out.reserve(static_cast<std::size_t>(sq));
  for (const auto& a : single)
    for (const auto& b : single) out.push_back({a, b});
  return out;
}

}  // namespace steer
