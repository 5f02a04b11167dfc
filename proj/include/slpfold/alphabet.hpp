#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "error.hpp"

namespace slpfold {

using Letter = std::uint32_t;

/// Terminal alphabet. In involutive mode every base letter `a` comes with a
/// formal inverse `a^`; the two are stored at ids 2k and 2k+1 so that the
/// involution is `id ^ 1`. Plain mode has no inverses.
class Alphabet {
 public:
  Alphabet() = default;

  static Alphabet involutive(const std::vector<std::string>& base) {
    Alphabet a;
    a.involutive_ = true;
    for (const auto& b : base) {
      a.add_name(b);
      a.add_name(b + "^");
    }
    return a;
  }

  static Alphabet plain(const std::vector<std::string>& letters) {
    Alphabet a;
    a.involutive_ = false;
    for (const auto& l : letters) a.add_name(l);
    return a;
  }

  bool is_involutive() const noexcept { return involutive_; }
  std::size_t size() const noexcept { return names_.size(); }
  std::size_t base_size() const noexcept { return involutive_ ? names_.size() / 2 : names_.size(); }

  Letter inverse(Letter x) const {
    if (!involutive_) throw UnsupportedAlphabet("inverse requires an involutive alphabet");
    return x ^ 1u;
  }

  /// Base letter of `x` in involutive mode (x itself when x is already positive).
  Letter positive(Letter x) const noexcept { return involutive_ ? (x & ~1u) : x; }

  const std::string& name(Letter x) const { return names_.at(x); }

  std::optional<Letter> find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// Names of the base letters, in declaration order.
  std::vector<std::string> base_names() const {
    std::vector<std::string> out;
    for (Letter x = 0; x < names_.size(); x += involutive_ ? 2 : 1) out.push_back(names_[x]);
    return out;
  }

  bool operator==(const Alphabet& o) const { return involutive_ == o.involutive_ && names_ == o.names_; }

 private:
  void add_name(const std::string& n) {
    if (n.empty()) throw ParseError("empty letter name", 0);
    if (index_.count(n)) throw ParseError("duplicate letter '" + n + "'", 0);
    index_.emplace(n, static_cast<Letter>(names_.size()));
    names_.push_back(n);
  }

  bool involutive_ = true;
  std::vector<std::string> names_;
  std::unordered_map<std::string, Letter> index_;
};

}  // namespace slpfold
