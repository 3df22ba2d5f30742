#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace heapabs {

/// Cardinality interval [lo, hi] over the naturals, hi possibly infinite.
class Interval {
 public:
  static constexpr std::uint64_t kInf = std::numeric_limits<std::uint64_t>::max();

  constexpr Interval() = default;
  constexpr Interval(std::uint64_t lo, std::uint64_t hi) : lo_(lo), hi_(hi) {
    if (lo > hi) throw std::invalid_argument("Interval: lo > hi");
  }

  static constexpr Interval exactly(std::uint64_t n) { return {n, n}; }
  static constexpr Interval at_least(std::uint64_t n) { return {n, kInf}; }

  constexpr std::uint64_t lo() const { return lo_; }
  constexpr std::uint64_t hi() const { return hi_; }
  constexpr bool unbounded() const { return hi_ == kInf; }

  constexpr bool contains(std::uint64_t n) const { return lo_ <= n && n <= hi_; }
  constexpr bool contains(const Interval& other) const {
    return lo_ <= other.lo_ && other.hi_ <= hi_;
  }

  constexpr bool operator==(const Interval&) const = default;

 private:
  std::uint64_t lo_ = 0;
  std::uint64_t hi_ = 0;
};

namespace detail {
constexpr std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
  if (a == Interval::kInf || b == Interval::kInf) return Interval::kInf;
  return a > Interval::kInf - b ? Interval::kInf : a + b;
}
}  // namespace detail

/// [a,b] + [c,d] = [a+c, b+d], with infinity absorbing.
constexpr Interval operator+(const Interval& a, const Interval& b) {
  return {detail::saturating_add(a.lo(), b.lo()), detail::saturating_add(a.hi(), b.hi())};
}

/// Least interval containing both.
constexpr Interval hull(const Interval& a, const Interval& b) {
  return {std::min(a.lo(), b.lo()), std::max(a.hi(), b.hi())};
}

/// Hull of `prior` and `next`, with the upper bound pushed to infinity when
/// it grew past `prior`'s. Lower bounds are never widened.
constexpr Interval widen(const Interval& prior, const Interval& next) {
  const Interval h = hull(prior, next);
  return h.hi() > prior.hi() ? Interval(h.lo(), Interval::kInf) : h;
}

inline std::ostream& operator<<(std::ostream& os, const Interval& i) {
  os << '[' << i.lo() << ',';
  if (i.unbounded())
    os << "inf";
  else
    os << i.hi();
  return os << ']';
}

}  // namespace heapabs
