#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace hifde {

using Index = std::int32_t;
using IndexList = std::vector<Index>;

// Level of the factorization hierarchy. Integer levels hold interior cell
// elimination; fractional levels (l + 1/2, l + 1/3, l + 2/3) hold
// skeletonization of edges or faces.
struct LevelTag {
  int whole = 0;
  int num = 0;
  int den = 1;

  double value() const { return whole + static_cast<double>(num) / den; }
  bool is_integer() const { return num == 0; }
  std::string str() const;

  friend bool operator==(const LevelTag& a, const LevelTag& b) {
    return (a <=> b) == 0;
  }
  friend std::strong_ordering operator<=>(const LevelTag& a,
                                          const LevelTag& b) {
    // compare whole + num/den exactly
    const std::int64_t lhs =
        (static_cast<std::int64_t>(a.whole) * a.den + a.num) * b.den;
    const std::int64_t rhs =
        (static_cast<std::int64_t>(b.whole) * b.den + b.num) * a.den;
    return lhs <=> rhs;
  }
};

// Raised when a diagonal block cannot be factored: a numerically zero pivot,
// or (in SPD mode) a block that is not positive definite.
class FactorizationError : public std::runtime_error {
 public:
  enum class Kind { kSingular, kIndefinite };

  FactorizationError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

}  // namespace hifde
