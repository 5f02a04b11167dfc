#pragma once

// Command implementations behind the slpfold executable. Each command
// returns its exit code and writes one result line to `out`.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <slpfold/automaton_io.hpp>
#include <slpfold/slp_io.hpp>
#include <slpfold/subgroup.hpp>

#include "oracle/naive_automata.hpp"

namespace slpfold::cli {

enum Exit : int { kYes = 0, kNo = 1, kInputError = 2, kBudget = 3 };

struct Options {
  std::uint64_t budget = kDefaultBudget;
  bool naive = false;
};

namespace detail {

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error("cannot write '" + p.string() + "'");
  f << text;
  if (!f) throw Error("failed writing '" + p.string() + "'");
}

// The first file fixes the alphabet, the others are parsed into the same grammar.
inline std::pair<std::shared_ptr<Grammar>, std::vector<Ref>> load_words(const std::vector<std::string>& files) {
  if (files.empty()) throw PreconditionError("no input words");
  SlpFile first = parse_slp(read_file(files[0]), true);
  std::vector<Ref> refs{first.root};
  for (std::size_t k = 1; k < files.size(); ++k) refs.push_back(parse_slp_into(*first.grammar, read_file(files[k])));
  return {first.grammar, refs};
}

inline Ref load_word_into(const Automaton& a, const std::string& file) {
  return parse_slp_into(a.grammar(), read_file(file));
}

inline StallingsAutomaton as_stallings(Automaton a) {
  if (!a.involutive()) throw PreconditionError("subgroup automaton must be involutive");
  if (!is_deterministic(a)) throw PreconditionError("subgroup automaton must be deterministic");
  if (a.finals() != std::vector<StateId>{a.initial()})
    throw PreconditionError("subgroup automaton must have the initial state as its only final state");
  return StallingsAutomaton{std::move(a), 0, {}};
}

inline void check_naive_size(const Automaton& a, Ref w, const Options& o) {
  Length total = w.length();
  for (const auto& tr : a.transitions()) total = add_len(total, tr.label.length());
  if (total > o.budget)
    throw BudgetExceeded("naive check needs " + std::to_string(total) + " letters, budget is " +
                         std::to_string(o.budget));
}

inline std::string stats_line(const FoldStats& s) {
  return "folds=" + std::to_string(s.folds_total) + " bound=" + s.bound.str() + " k=" +
         std::to_string(s.k_initial) + " n=" + s.n_initial.str();
}

}  // namespace detail

inline int cmd_build(const std::vector<std::string>& gens, const std::string& out_path, const Options& o,
                     std::ostream& out, const FoldObserver& observer = {}) {
  auto [g, refs] = detail::load_words(gens);
  const StallingsAutomaton h = build_stallings(g, refs, observer, o.budget);
  if (!out_path.empty()) detail::write_file(out_path, serialize_automaton(h.automaton));
  out << detail::stats_line(h.stats) << '\n';
  return kYes;
}

inline int cmd_member(const std::string& aut, const std::string& word, bool subgroup, const Options& o,
                      std::ostream& out) {
  const Automaton a = load_automaton(aut);
  Ref w = detail::load_word_into(a, word);
  if (subgroup) w = free_reduce(a.grammar(), w);
  bool yes;
  if (o.naive) {
    detail::check_naive_size(a, w, o);
    yes = naive::member(naive::spell_out(a), naive::expand(a.grammar(), w, o.budget));
  } else {
    yes = member(a, w, o.budget);
  }
  out << "member=" << (yes ? "true" : "false") << '\n';
  return yes ? kYes : kNo;
}

inline int cmd_prefix(const std::string& aut, const std::string& word, const Options& o, std::ostream& out) {
  const Automaton a = load_automaton(aut);
  const Ref w = detail::load_word_into(a, word);
  std::optional<Length> i;
  if (o.naive) {
    detail::check_naive_size(a, w, o);
    if (auto k = naive::max_prefix(naive::spell_out(a), naive::expand(a.grammar(), w, o.budget))) i = *k;
  } else {
    i = max_prefix(a, w, o.budget);
  }
  out << "max_prefix=" << (i ? std::to_string(*i) : "none") << '\n';
  return i ? kYes : kNo;
}

inline int cmd_coset(const std::string& aut, const std::string& word, const std::string& out_path,
                     const Options& o, std::ostream& out) {
  const StallingsAutomaton h = detail::as_stallings(load_automaton(aut));
  const Ref w = detail::load_word_into(h.automaton, word);
  const Ref x = coset_representative(h, w, o.budget);
  const std::string text = serialize_slp(h.automaton.grammar(), x);
  if (out_path.empty()) {
    out << text;
  } else {
    detail::write_file(out_path, text);
    out << "length=" << x.length() << '\n';
  }
  return kYes;
}

inline int cmd_cyclic(const std::string& aut, const std::string& word, const std::string& out_path,
                      const Options& o, std::ostream& out) {
  const StallingsAutomaton h = detail::as_stallings(load_automaton(aut));
  const Ref w = detail::load_word_into(h.automaton, word);
  const CyclicIntersection c = cyclic_intersection(h, w, o.budget);
  if (!out_path.empty()) detail::write_file(out_path, serialize_slp(h.automaton.grammar(), c.x));
  out << "m=" << c.m << '\n';
  return c.m > 0 ? kYes : kNo;
}

inline int cmd_intersect(const std::string& aut, const std::string& u_file, const std::string& v_file,
                         const Options& o, std::ostream& out) {
  const Automaton a = load_automaton(aut);
  const Ref u = detail::load_word_into(a, u_file), v = detail::load_word_into(a, v_file);
  const PeriodicLang p = periodic_intersection(a, u, v, o.budget);
  out << "u=" << u.length() << " v=" << v.length() << ' ' << p << '\n';
  return p.empty() ? kNo : kYes;
}

inline int cmd_eval(const std::string& word, Length max_len, std::ostream& out) {
  const SlpFile f = parse_slp(read_file(word), true);
  f.grammar->eval(f.root, max_len);
  out << f.grammar->to_string(f.root, max_len, " ") << '\n';
  return kYes;
}

/// Writes trace_<step>.dot after every fold, trace_0.dot for the input of the
/// first fold and trace_final.dot for the result.
inline int cmd_trace(const std::vector<std::string>& gens, const std::filesystem::path& dir, Length spell_limit,
                     const Options& o, std::ostream& out) {
  std::filesystem::create_directories(dir);
  auto [g, refs] = detail::load_words(gens);
  bool first = true;
  const FoldObserver dump = [&](const FoldEvent& e) {
    if (first) {
      detail::write_file(dir / "trace_0.dot", to_dot(e.before, "step 0", spell_limit));
      first = false;
    }
    const std::string title = "step " + std::to_string(e.step) + " level " + std::to_string(e.level) +
                              (e.complete ? " complete" : " incomplete");
    detail::write_file(dir / ("trace_" + std::to_string(e.step) + ".dot"), to_dot(e.after, title, spell_limit));
  };
  const StallingsAutomaton h = build_stallings(g, refs, dump, o.budget);
  detail::write_file(dir / "trace_final.dot", to_dot(h.automaton, "final", spell_limit));
  out << detail::stats_line(h.stats) << '\n';
  return kYes;
}

}  // namespace slpfold::cli
