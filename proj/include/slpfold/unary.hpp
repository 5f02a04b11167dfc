#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <ostream>
#include <set>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "error.hpp"
#include "length.hpp"

namespace slpfold {

/// Set of naturals exceptions ∪ { n0 + period·t + r : t ≥ 0, r ∈ residues }.
/// With period 0 the second part is the finite set n0 + residues.
///
/// Canonical form (established by normalize()):
///  - empty set: everything zero/empty;
///  - finite set: period 0, n0 = min, 0 ∈ residues, no exceptions;
///  - infinite set: minimal period, residues < period with 0 ∈ residues,
///    n0 the least member from which the set is purely periodic and the
///    rest listed as exceptions (all below n0).
struct UnaryLang {
  Length n0 = 0;
  Length period = 0;
  std::set<Length> residues;
  std::set<Length> exceptions;

  bool empty() const noexcept { return residues.empty() && exceptions.empty(); }
  bool finite() const noexcept { return period == 0 || residues.empty(); }

  bool contains(Length x) const {
    if (exceptions.count(x)) return true;
    if (residues.empty() || x < n0) return false;
    const Length d = x - n0;
    if (period == 0) return residues.count(d) > 0;
    return residues.count(d % period) > 0;
  }

  /// Least member, if any.
  std::optional<Length> min() const {
    std::optional<Length> m;
    if (!exceptions.empty()) m = *exceptions.begin();
    if (!residues.empty()) {
      const Length r = n0 + *residues.begin();
      if (!m || r < *m) m = r;
    }
    return m;
  }

  static UnaryLang none() { return {}; }
  static UnaryLang single(Length x) { return make({}, x, 0, {0}); }
  /// a^{n0}·(a^period)^*
  static UnaryLang star(Length n0, Length period) { return make({}, n0, period, {0}); }
  static UnaryLang make(std::set<Length> exceptions, Length n0, Length period, std::set<Length> residues) {
    UnaryLang u;
    u.exceptions = std::move(exceptions);
    u.n0 = n0;
    u.period = period;
    u.residues = std::move(residues);
    u.normalize();
    return u;
  }

  void normalize();

  bool operator==(const UnaryLang&) const = default;
};

inline void UnaryLang::normalize() {
  if (period == 0 || residues.empty()) {
    std::set<Length> all = exceptions;
    for (Length r : residues) all.insert(add_len(n0, r));
    *this = {};
    if (all.empty()) return;
    n0 = *all.begin();
    for (Length x : all) residues.insert(x - n0);
    return;
  }
  // Residues are taken modulo the period.
  {
    std::set<Length> r;
    for (Length x : residues) r.insert(x % period);
    residues = std::move(r);
  }
  // Minimal period: gcd of all shifts fixing the residue set.
  Length p = period;
  const Length r0 = *residues.begin();
  for (Length r : residues) {
    const Length d = r - r0;
    if (d == 0) continue;
    bool fixes = true;
    for (Length s : residues)
      if (!residues.count((s + d) % period)) {
        fixes = false;
        break;
      }
    if (fixes) p = std::gcd(p, d);
  }
  if (p != period) {
    std::set<Length> r;
    for (Length x : residues) r.insert(x % p);
    residues = std::move(r);
    period = p;
  }
  auto periodic = [&](Length x) { return x >= n0 && residues.count((x - n0) % period) > 0; };
  for (auto it = exceptions.begin(); it != exceptions.end();) {
    if (*it < n0) {
      ++it;
    } else if (periodic(*it)) {
      it = exceptions.erase(it);
    } else {
      throw PreconditionError("exceptional member inside the periodic range");
    }
  }
  auto member = [&](Length x) { return exceptions.count(x) > 0 || periodic(x); };
  // Threshold: one past the largest x < n0 where x and x + period disagree.
  Length threshold = 0;
  auto consider = [&](Length x) {
    if (x < n0 && member(x) != member(x + period)) threshold = std::max(threshold, x + 1);
  };
  for (Length e : exceptions) {
    consider(e);
    if (e >= period) consider(e - period);
  }
  for (Length r : residues) {
    // x + period lands on n0 + r.
    if (n0 + r >= period) consider(n0 + r - period);
  }
  std::set<Length> keep;
  for (Length e : exceptions)
    if (e < threshold) keep.insert(e);
  // Least member at or above the threshold.
  Length start = n0 + *residues.begin();
  for (Length e : exceptions)
    if (e >= threshold && e < start) start = e;
  std::set<Length> shifted;
  for (Length r : residues) shifted.insert((n0 % period + r + period - start % period) % period);
  exceptions = std::move(keep);
  residues = std::move(shifted);
  n0 = start;
}

inline std::ostream& operator<<(std::ostream& os, const UnaryLang& u) {
  os << "n0=" << u.n0 << " n=" << u.period << " residues={";
  bool first = true;
  for (Length r : u.residues) os << (first ? "" : ",") << r, first = false;
  os << '}';
  if (!u.exceptions.empty()) {
    os << " exceptions={";
    first = true;
    for (Length e : u.exceptions) os << (first ? "" : ",") << e, first = false;
    os << '}';
  }
  return os;
}

namespace detail {

using BigInt = boost::multiprecision::cpp_int;

// x ≡ a (mod m), x ≡ b (mod n): the least solution in [0, lcm), if any.
inline std::optional<BigInt> crt(BigInt a, BigInt m, BigInt b, BigInt n) {
  const BigInt g = gcd(m, n);
  if ((b - a) % g != 0) return std::nullopt;
  // Extended Euclid on m/g, n/g.
  BigInt m1 = m / g, n1 = n / g;
  BigInt old_r = m1, r = n1, old_s = 1, s = 0;
  while (r != 0) {
    const BigInt q = old_r / r;
    BigInt t = old_r - q * r;
    old_r = r;
    r = t;
    t = old_s - q * s;
    old_s = s;
    s = t;
  }
  // old_s·m1 ≡ 1 (mod n1)
  const BigInt l = m1 * n;
  BigInt k = ((b - a) / g) * old_s % n1;
  if (k < 0) k += n1;
  BigInt x = (a + m * k) % l;
  if (x < 0) x += l;
  return x;
}

}  // namespace detail

/// Intersection of two unary languages, by congruence solving on the
/// periodic parts and a scan of the exceptional members.
inline UnaryLang unary_intersection(const UnaryLang& a, const UnaryLang& b) {
  if (a.empty() || b.empty()) return UnaryLang::none();
  auto list_finite = [](const UnaryLang& u) {
    std::set<Length> s = u.exceptions;
    for (Length r : u.residues) s.insert(u.n0 + r);
    return s;
  };
  if (a.finite() || b.finite()) {
    const UnaryLang& f = a.finite() ? a : b;
    const UnaryLang& o = a.finite() ? b : a;
    std::set<Length> out;
    for (Length x : list_finite(f))
      if (o.contains(x)) out.insert(x);
    return UnaryLang::make(std::move(out), 0, 0, {});
  }
  std::set<Length> exc;
  for (Length x : a.exceptions)
    if (b.contains(x)) exc.insert(x);
  for (Length x : b.exceptions)
    if (a.contains(x)) exc.insert(x);
  using detail::BigInt;
  const BigInt lcm = BigInt(a.period) / gcd(BigInt(a.period), BigInt(b.period)) * BigInt(b.period);
  if (lcm > BigInt(kMaxLength)) throw RangeError("period of the intersection exceeds the length range");
  const Length l = static_cast<Length>(lcm);
  const Length start = std::max(a.n0, b.n0);
  std::set<Length> res;
  for (Length ra : a.residues)
    for (Length rb : b.residues) {
      auto x = detail::crt(BigInt(a.n0) + ra, BigInt(a.period), BigInt(b.n0) + rb, BigInt(b.period));
      if (!x) continue;
      BigInt off = (*x - BigInt(start)) % lcm;
      if (off < 0) off += lcm;
      res.insert(static_cast<Length>(off));
    }
  return UnaryLang::make(std::move(exc), start, l, std::move(res));
}

/// {t : l + k·t ∈ u}.
inline UnaryLang unary_preimage(const UnaryLang& u, Length l, Length k) {
  if (k == 0) throw PreconditionError("preimage under a zero step");
  const UnaryLang on = unary_intersection(u, UnaryLang::star(l, k));
  std::set<Length> exc, res;
  for (Length e : on.exceptions) exc.insert((e - l) / k);
  if (on.residues.empty()) return UnaryLang::make(std::move(exc), 0, 0, {});
  const Length first = on.n0;  // ≡ l (mod k)
  if (on.period == 0) {
    for (Length r : on.residues) exc.insert((first + r - l) / k);
    return UnaryLang::make(std::move(exc), 0, 0, {});
  }
  for (Length r : on.residues) res.insert(r / k);
  return UnaryLang::make(std::move(exc), (first - l) / k, on.period / k, std::move(res));
}

}  // namespace slpfold
