#pragma once

#include <algorithm>
#include <ostream>
#include <vector>

#include "length.hpp"

namespace slpfold {

/// {t·step + offset : 0 <= t <= count}, or the empty set. Singletons have
/// step 0.
struct ArithmeticProgression {
  Length step = 0;
  Length count = 0;
  Length offset = 0;
  bool empty = true;

  static ArithmeticProgression none() { return {}; }
  static ArithmeticProgression single(Length x) { return {0, 0, x, false}; }
  static ArithmeticProgression make(Length step, Length count, Length offset) {
    if (count == 0 || step == 0) return single(offset);
    return {step, count, offset, false};
  }

  std::size_t size() const { return empty ? 0 : static_cast<std::size_t>(count) + 1; }
  Length min() const { return offset; }
  Length max() const { return offset + step * count; }
  Length at(Length t) const { return offset + step * t; }
  bool contains(Length x) const {
    if (empty || x < offset || x > max()) return false;
    return step == 0 ? x == offset : (x - offset) % step == 0;
  }
  std::vector<Length> elements() const {
    std::vector<Length> out;
    for (Length t = 0; !empty && t <= count; ++t) out.push_back(at(t));
    return out;
  }
  /// Elements <= bound.
  ArithmeticProgression up_to(Length bound) const {
    if (empty || bound < offset) return none();
    if (step == 0) return *this;
    return make(step, std::min(count, (bound - offset) / step), offset);
  }
  /// Elements >= bound.
  ArithmeticProgression from(Length bound) const {
    if (empty || bound > max()) return none();
    if (bound <= offset) return *this;
    const Length skip = (bound - offset + step - 1) / step;
    return make(step, count - skip, offset + skip * step);
  }
  ArithmeticProgression shifted_down(Length d) const {
    if (empty) return *this;
    return make(step, count, offset - d);
  }

  bool operator==(const ArithmeticProgression& o) const {
    if (empty || o.empty) return empty == o.empty;
    return offset == o.offset && count == o.count && (count == 0 || step == o.step);
  }
};

/// Union of two disjoint progressions whose union is known to be a
/// progression.
inline ArithmeticProgression ap_union(const ArithmeticProgression& a, const ArithmeticProgression& b) {
  if (a.empty) return b;
  if (b.empty) return a;
  std::vector<Length> first;
  for (const auto* p : {&a, &b})
    for (Length t = 0; t <= std::min<Length>(p->count, 1); ++t) first.push_back(p->at(t));
  std::sort(first.begin(), first.end());
  first.erase(std::unique(first.begin(), first.end()), first.end());
  const Length lo = first[0];
  const Length hi = std::max(a.max(), b.max());
  if (first.size() == 1) return ArithmeticProgression::single(lo);
  const Length step = first[1] - first[0];
  return ArithmeticProgression::make(step, (hi - lo) / step, lo);
}

inline std::ostream& operator<<(std::ostream& os, const ArithmeticProgression& p) {
  if (p.empty) return os << "ap(empty)";
  return os << "ap(" << p.step << "," << p.count << "," << p.offset << ")";
}

}  // namespace slpfold
