#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>

#include "automaton.hpp"
#include "automaton_ops.hpp"
#include "slp_io.hpp"

namespace slpfold {

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ParseError("cannot read '" + p.string() + "'", 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace io {

inline Scope scope_of(const Grammar& g) {
  Scope s;
  for (RuleId r = 1; r < g.size(); ++r)
    if (!g.rule(r).name.empty()) s.rules.emplace(g.rule(r).name, r);
  return s;
}

inline Ref parse_label(Grammar& g, const Scope& scope, const std::string& tok, std::size_t line) {
  const Symbol s = parse_symbol(g, scope, tok, line);
  return s.is_letter ? g.letter(s.letter) : s.ref;
}

}  // namespace io

/// Parses .caut text. `base_dir` resolves `grammar <path>` lines.
inline Automaton parse_automaton(std::string_view text, const std::filesystem::path& base_dir = ".") {
  const auto ls = io::lines(text);
  std::shared_ptr<Grammar> g;
  std::unordered_map<std::string, StateId> states;
  std::vector<std::string> names;
  std::optional<std::string> initial;
  std::vector<std::pair<std::string, std::size_t>> finals;
  struct Pending {
    std::vector<std::string> t;
    std::size_t line;
  };
  std::vector<Pending> trans;
  for (std::size_t k = 0; k < ls.size(); ++k) {
    const std::size_t line = k + 1;
    auto t = io::tokens(ls[k]);
    if (t.empty()) continue;
    if (t[0] == "states") {
      for (std::size_t i = 1; i < t.size(); ++i) {
        if (!states.emplace(t[i], static_cast<StateId>(names.size())).second)
          throw ParseError("duplicate state '" + t[i] + "'", line);
        names.push_back(t[i]);
      }
    } else if (t[0] == "initial") {
      if (t.size() != 2) throw ParseError("expected 'initial <state>'", line);
      initial = t[1];
    } else if (t[0] == "final") {
      for (std::size_t i = 1; i < t.size(); ++i) finals.push_back({t[i], line});
    } else if (t[0] == "grammar") {
      if (g) throw ParseError("duplicate grammar", line);
      if (t.size() != 2) throw ParseError("expected 'grammar inline' or 'grammar <path>'", line);
      if (t[1] == "inline") {
        std::size_t e = k + 1;
        while (e < ls.size() && !(io::tokens(ls[e]).size() == 1 && io::tokens(ls[e])[0] == "end")) ++e;
        if (e == ls.size()) throw ParseError("inline grammar without 'end'", line);
        std::string body;
        for (std::size_t i = k + 1; i < e; ++i) body += ls[i] + "\n";
        try {
          g = parse_slp(body, true).grammar;
        } catch (const ParseError& err) {
          throw ParseError(std::string("in inline grammar: ") + err.what(), err.line() ? err.line() + line : line);
        }
        k = e;
      } else {
        const auto path = base_dir / t[1];
        try {
          g = parse_slp(read_file(path), true).grammar;
        } catch (const ParseError& err) {
          throw ParseError(path.string() + ": " + err.what(), line);
        }
      }
    } else if (t[0] == "trans") {
      trans.push_back({t, line});
    } else {
      throw ParseError("unknown directive '" + t[0] + "'", line);
    }
  }
  if (!g) throw ParseError("missing grammar", 0);
  if (names.empty()) throw ParseError("missing states", 0);
  auto state = [&](const std::string& n, std::size_t line) {
    auto it = states.find(n);
    if (it == states.end()) throw ParseError("unknown state '" + n + "'", line);
    return it->second;
  };
  bool involutive = g->alphabet().is_involutive();
  if (!trans.empty()) involutive = trans.front().t.size() == 8;
  Automaton a(g, involutive);
  a.add_states(names.size());
  a.set_state_names(names);
  a.set_initial(initial ? state(*initial, 0) : 0);
  for (const auto& [n, line] : finals) a.add_final(state(n, line));
  const io::Scope scope = io::scope_of(*g);
  for (const auto& p : trans) {
    const auto& t = p.t;
    if (involutive) {
      if (t.size() != 8 || t[4] != "inv") throw ParseError("expected 'trans p X q inv q Y p'", p.line);
      const StateId s1 = state(t[1], p.line), d1 = state(t[3], p.line);
      const StateId s2 = state(t[5], p.line), d2 = state(t[7], p.line);
      const Ref x = io::parse_label(*g, scope, t[2], p.line), y = io::parse_label(*g, scope, t[6], p.line);
      if (s2 != d1 || d2 != s1) throw InvolutionError("line " + std::to_string(p.line) + ": partner is not reversed");
      if (x.empty() || y.empty()) throw ParseError("empty transition label", p.line);
      if (!equals(*g, y, g->inverse(x)))
        throw InvolutionError("line " + std::to_string(p.line) + ": partner label is not the inverse word");
      a.add_pair(s1, x, d1, y);
    } else {
      if (t.size() != 4) throw ParseError("expected 'trans p X q'", p.line);
      const Ref x = io::parse_label(*g, scope, t[2], p.line);
      if (x.empty()) throw ParseError("empty transition label", p.line);
      a.add_transition(state(t[1], p.line), x, state(t[3], p.line));
    }
  }
  return a;
}

inline Automaton load_automaton(const std::filesystem::path& p) {
  return parse_automaton(read_file(p), p.parent_path().empty() ? "." : p.parent_path());
}

inline std::string serialize_automaton(const Automaton& a) {
  const Grammar& g = a.grammar();
  std::ostringstream os;
  os << "states";
  for (StateId q = 0; q < a.num_states(); ++q) os << ' ' << a.state_name(q);
  os << "\ninitial " << a.state_name(a.initial()) << "\nfinal";
  for (StateId q : a.finals()) os << ' ' << a.state_name(q);
  os << "\ngrammar inline\n" << io::alphabet_line(g.alphabet()) << '\n';
  auto is_letter = [&](Ref x) {
    const auto& body = g.rule(x.rule).body;
    return x == g.whole(x.rule) && body.size() == 1 && body[0].is_letter;
  };
  std::vector<Ref> roots;
  for (const auto& tr : a.transitions())
    if (!is_letter(tr.label)) roots.push_back(tr.label);
  io::Namer name(g);
  io::write_rules(os, g, roots, name);
  os << "end\n";
  auto label = [&](Ref x) {
    if (is_letter(x)) return g.alphabet().name(g.rule(x.rule).body[0].letter);
    return name.symbol(x);
  };
  for (std::size_t t = 0; t < a.num_transitions(); ++t) {
    const Transition& tr = a.transition(static_cast<TransId>(t));
    if (a.involutive()) {
      if (tr.inv < t) continue;
      const Transition& iv = a.transition(tr.inv);
      os << "trans " << a.state_name(tr.src) << ' ' << label(tr.label) << ' ' << a.state_name(tr.dst) << " inv "
         << a.state_name(iv.src) << ' ' << label(iv.label) << ' ' << a.state_name(iv.dst) << '\n';
    } else {
      os << "trans " << a.state_name(tr.src) << ' ' << label(tr.label) << ' ' << a.state_name(tr.dst) << '\n';
    }
  }
  return os.str();
}

/// Graphviz rendering; labels up to `spell_limit` letters are spelled out,
/// longer ones are shown as `<rule>(<length>)`.
inline std::string to_dot(const Automaton& a, const std::string& title = "A", Length spell_limit = 24) {
  const Grammar& g = a.grammar();
  io::Namer name(g);
  std::ostringstream os;
  os << "digraph \"" << title << "\" {\n  rankdir=LR;\n  __start [shape=point];\n";
  for (StateId q = 0; q < a.num_states(); ++q)
    os << "  \"" << a.state_name(q) << "\" [shape=" << (a.is_final(q) ? "doublecircle" : "circle") << "];\n";
  os << "  __start -> \"" << a.state_name(a.initial()) << "\";\n";
  for (std::size_t t = 0; t < a.num_transitions(); ++t) {
    const Transition& tr = a.transition(static_cast<TransId>(t));
    if (a.involutive() && tr.inv < t) continue;
    std::string lab = tr.label.length() <= spell_limit ? g.to_string(tr.label, spell_limit, "")
                                                       : name.symbol(tr.label) + "(" + std::to_string(tr.label.length()) + ")";
    os << "  \"" << a.state_name(tr.src) << "\" -> \"" << a.state_name(tr.dst) << "\" [label=\"" << lab
       << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace slpfold
