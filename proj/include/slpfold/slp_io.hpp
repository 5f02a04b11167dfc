#pragma once

#include <cctype>
#include <charconv>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "grammar.hpp"

namespace slpfold {

namespace io {

inline std::vector<std::string> tokens(std::string_view line) {
  if (auto h = line.find('#'); h != std::string_view::npos) line = line.substr(0, h);
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::vector<std::string> lines(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i <= text.size()) {
    std::size_t j = text.find('\n', i);
    if (j == std::string_view::npos) j = text.size();
    std::string l(text.substr(i, j - i));
    if (!l.empty() && l.back() == '\r') l.pop_back();
    out.push_back(std::move(l));
    i = j + 1;
  }
  return out;
}

inline bool valid_name(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'')) return false;
  return true;
}

inline std::optional<std::int64_t> parse_int(std::string_view s) {
  std::int64_t v = 0;
  if (!s.empty() && s[0] == '+') s.remove_prefix(1);
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
  return v;
}

// Resolves a possibly negative index against length n.
inline Length resolve_index(std::int64_t v, Length n, std::size_t line) {
  if (v >= 0) {
    if (static_cast<Length>(v) > n) throw ParseError("truncation index " + std::to_string(v) + " out of range", line);
    return static_cast<Length>(v);
  }
  const Length back = static_cast<Length>(-(v + 1)) + 1;
  if (back > n) throw ParseError("truncation index " + std::to_string(v) + " out of range", line);
  return n - back;
}

/// Name table shared by one parse: local rule names shadow nothing outside it.
struct Scope {
  std::unordered_map<std::string, RuleId> rules;
  std::unordered_set<std::string> declared;  // every rule name in the file, for forward references
};

/// Parses `Name`, `Name[i:j]` or a letter into a symbol of `g`.
inline Symbol parse_symbol(const Grammar& g, const Scope& scope, const std::string& tok, std::size_t line) {
  const auto br = tok.find('[');
  if (br == std::string::npos) {
    if (auto x = g.alphabet().find(tok)) return Symbol::of(*x);
    auto it = scope.rules.find(tok);
    if (it != scope.rules.end()) return Symbol::of(g.whole(it->second));
    if (scope.declared.count(tok)) throw ParseError("forward reference to rule '" + tok + "'", line);
    throw ParseError("unknown symbol '" + tok + "'", line);
  }
  if (tok.back() != ']') throw ParseError("malformed truncation '" + tok + "'", line);
  const std::string name = tok.substr(0, br);
  const std::string inner = tok.substr(br + 1, tok.size() - br - 2);
  const auto colon = inner.find(':');
  if (colon == std::string::npos) throw ParseError("malformed truncation '" + tok + "'", line);
  auto it = scope.rules.find(name);
  if (it == scope.rules.end()) {
    if (scope.declared.count(name)) throw ParseError("forward reference to rule '" + name + "'", line);
    throw ParseError("unknown rule '" + name + "'", line);
  }
  const Length n = g.rule(it->second).length;
  Length i = 0, j = n;
  const std::string a = inner.substr(0, colon), b = inner.substr(colon + 1);
  if (!a.empty()) {
    auto v = parse_int(a);
    if (!v) throw ParseError("bad index '" + a + "'", line);
    i = resolve_index(*v, n, line);
  }
  if (!b.empty()) {
    auto v = parse_int(b);
    if (!v) throw ParseError("bad index '" + b + "'", line);
    j = resolve_index(*v, n, line);
  }
  if (i > j) throw ParseError("truncation [" + inner + "] is empty-reversed", line);
  return Symbol::of(Ref{it->second, i, j});
}

inline Alphabet parse_alphabet(const std::vector<std::string>& t, std::size_t line) {
  std::vector<std::string> names(t.begin() + 1, t.end());
  for (const auto& n : names)
    if (n.find('^') != std::string::npos || n.find('[') != std::string::npos)
      throw ParseError("bad letter name '" + n + "'", line);
  try {
    return t[0] == "alphabet" ? Alphabet::involutive(names) : Alphabet::plain(names);
  } catch (const ParseError& e) {
    throw ParseError(e.what(), line);
  }
}

// Gives rule `r` the name `n` in the grammar when it is free.
inline void try_name(Grammar& g, RuleId r, const std::string& n) {
  if (g.rule(r).name.empty() && !g.find_rule(n)) g.set_name(r, n);
}

/// Parses rule/root lines of an .slp body into `g`. `alphabet` lines must
/// agree with g's alphabet. Returns the root (last rule if no root line).
inline Ref parse_slp_lines(Grammar& g, const std::vector<std::string>& ls, std::size_t first_line,
                           bool alphabet_given, bool allow_empty = false) {
  Scope scope;
  for (const auto& l : ls) {
    auto t = tokens(l);
    if (t.size() >= 2 && t[0] == "rule") scope.declared.insert(t[1]);
  }
  std::optional<Ref> root;
  std::optional<RuleId> last_rule;
  bool have_alphabet = alphabet_given;
  for (std::size_t k = 0; k < ls.size(); ++k) {
    const std::size_t line = first_line + k;
    auto t = tokens(ls[k]);
    if (t.empty()) continue;
    if (t[0] == "alphabet" || t[0] == "plain_alphabet") {
      if (parse_alphabet(t, line) != g.alphabet()) throw ParseError("alphabet differs from the one in use", line);
      have_alphabet = true;
      continue;
    }
    if (!have_alphabet) throw ParseError("expected 'alphabet' before '" + t[0] + "'", line);
    if (t[0] == "rule") {
      if (t.size() < 3 || t[2] != "=") throw ParseError("expected 'rule <Name> = <symbols>'", line);
      const std::string& name = t[1];
      if (!valid_name(name)) throw ParseError("bad rule name '" + name + "'", line);
      if (g.alphabet().find(name)) throw ParseError("rule name '" + name + "' clashes with a letter", line);
      if (scope.rules.count(name)) throw ParseError("duplicate rule '" + name + "'", line);
      std::vector<Symbol> body;
      for (std::size_t s = 3; s < t.size(); ++s) {
        if (t[s] == name || t[s].rfind(name + "[", 0) == 0)
          throw ParseError("forward reference to rule '" + name + "' (self-reference)", line);
        body.push_back(parse_symbol(g, scope, t[s], line));
      }
      RuleId r;
      try {
        r = g.add_rule(body);
      } catch (const RangeError& e) {
        throw ParseError(e.what(), line);
      }
      scope.rules.emplace(name, r);
      try_name(g, r, name);
      last_rule = r;
    } else if (t[0] == "root") {
      if (t.size() != 2) throw ParseError("expected 'root <Name>'", line);
      if (root) throw ParseError("duplicate root", line);
      Symbol s = parse_symbol(g, scope, t[1], line);
      root = s.is_letter ? Ref{g.add_rule({s}), 0, 1} : s.ref;
    } else {
      throw ParseError("unknown directive '" + t[0] + "'", line);
    }
  }
  if (root) return *root;
  if (last_rule) return g.whole(*last_rule);
  if (allow_empty) return g.empty_ref();
  throw ParseError("no rules", first_line);
}

}  // namespace io

struct SlpFile {
  std::shared_ptr<Grammar> grammar;
  Ref root;
};

/// Parses .slp text into a fresh grammar.
/// With `allow_empty` a file without rules yields the empty root.
inline SlpFile parse_slp(std::string_view text, bool allow_empty = false) {
  const auto ls = io::lines(text);
  for (std::size_t k = 0; k < ls.size(); ++k) {
    auto t = io::tokens(ls[k]);
    if (t.empty()) continue;
    if (t[0] != "alphabet" && t[0] != "plain_alphabet")
      throw ParseError("expected 'alphabet' before '" + t[0] + "'", k + 1);
    auto g = std::make_shared<Grammar>(io::parse_alphabet(t, k + 1));
    std::vector<std::string> rest(ls.begin() + static_cast<std::ptrdiff_t>(k) + 1, ls.end());
    Ref root = io::parse_slp_lines(*g, rest, k + 2, true, allow_empty);
    return SlpFile{g, root};
  }
  throw ParseError("empty input", 0);
}

/// Parses .slp text into an existing grammar with the same alphabet.
inline Ref parse_slp_into(Grammar& g, std::string_view text) {
  return io::parse_slp_lines(g, io::lines(text), 1, false);
}

namespace io {

/// Stable printable names for a set of rules.
class Namer {
 public:
  explicit Namer(const Grammar& g) : g_(g) {}

  const std::string& operator()(RuleId r) {
    auto it = names_.find(r);
    if (it != names_.end()) return it->second;
    std::string n = g_.rule(r).name;
    if (n.empty() || !valid_name(n) || g_.alphabet().find(n) || used_.count(n)) {
      n = "R" + std::to_string(r);
      while (used_.count(n) || g_.alphabet().find(n)) n = "_" + n;
    }
    used_.insert(n);
    return names_.emplace(r, n).first->second;
  }

  std::string symbol(Ref x) {
    const std::string& n = (*this)(x.rule);
    if (x == g_.whole(x.rule)) return n;
    return n + "[" + std::to_string(x.start) + ":" + std::to_string(x.end) + "]";
  }

 private:
  const Grammar& g_;
  std::unordered_map<RuleId, std::string> names_;
  std::set<std::string> used_;
};

inline std::string alphabet_line(const Alphabet& a) {
  std::string s = a.is_involutive() ? "alphabet" : "plain_alphabet";
  for (const auto& n : a.base_names()) s += " " + n;
  return s;
}

inline void write_rules(std::ostream& os, const Grammar& g, std::span<const Ref> roots, Namer& name) {
  for (RuleId r : g.reachable(roots)) {
    if (r == 0) continue;
    os << "rule " << name(r) << " =";
    for (const Symbol& s : g.rule(r).body) {
      os << ' ';
      if (s.is_letter)
        os << g.alphabet().name(s.letter);
      else
        os << name.symbol(s.ref);
    }
    os << '\n';
  }
}

}  // namespace io

/// Writes the rules reachable from `root` in .slp syntax.
inline std::string serialize_slp(const Grammar& g, Ref root) {
  std::ostringstream os;
  os << io::alphabet_line(g.alphabet()) << '\n';
  io::Namer name(g);
  if (root.empty()) {
    os << "rule _empty =\nroot _empty\n";
    return os.str();
  }
  const Ref roots[1] = {root};
  io::write_rules(os, g, roots, name);
  os << "root " << name.symbol(root) << '\n';
  return os.str();
}

}  // namespace slpfold
