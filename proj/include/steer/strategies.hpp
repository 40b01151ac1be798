#ifndef STEER_STRATEGIES_HPP
#define STEER_STRATEGIES_HPP

#include <cstdint>
#include <vector>

namespace steer {

// Deterministic response function: outcomes[x-1] is the answer to setting x.
// Outcome 0 is the no-click event; conclusive outcomes are 1..d.
struct DeterministicStrategy {
  int settings = 0;
  int outcomes_per_setting = 0;  // d, conclusive alphabet size
  bool includes_no_click = false;
  std::vector<int> outcomes;

  int respond(int x) const;                  // x in 1..settings
  int no_click_count() const;
  bool indicator(int a, int x) const { return respond(x) == a; }
};

struct ProductStrategy {
  DeterministicStrategy alice;
  DeterministicStrategy bob;

  bool indicator(int a, int b, int x, int y) const {
    return alice.indicator(a, x) && bob.indicator(b, y);
  }
};

inline constexpr std::int64_t kEnumerationCap = 1000000;

// All d^m strategies (or (d+1)^m with the no-click outcome), in
// lexicographic order of the outcome lists. Throws past the cap.
std::vector<DeterministicStrategy> enumerate_strategies(int m, int d,
                                                        bool include_no_click);

// Cartesian product of two single-party enumerations, Alice-major order.
std::vector<ProductStrategy> enumerate_product_strategies(int m, int d,
                                                          bool include_no_click);

}  // namespace steer

#endif
