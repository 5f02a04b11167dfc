#pragma once

#include <CLI11.hpp>

#include "commands.hpp"

namespace slpfold::cli {

/// Parses `args` (without the program name) and runs one command.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Compressed Stallings folding for subgroups of free groups", "slpfold"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--budget", o.budget, "step budget of the run engine and letter cap of --naive")
      ->check(CLI::PositiveNumber);
  app.add_flag("--naive", o.naive, "answer member/prefix by decompressing everything");

  std::vector<std::string> gens;
  std::string aut, word, u_file, v_file, out_path, dot_dir;
  Length max_len = 4096, spell_limit = 24;
  bool subgroup = false;
  std::function<int()> action;

  auto* build = app.add_subcommand("build", "Stallings automaton of <gens.slp...>");
  build->add_option("gens", gens)->required()->check(CLI::ExistingFile);
  build->add_option("-o,--out", out_path, "output .caut")->required();
  build->callback([&] { action = [&] { return cmd_build(gens, out_path, o, out); }; });

  auto* mem = app.add_subcommand("member", "word(W) in L(A)");
  mem->add_option("automaton", aut)->required()->check(CLI::ExistingFile);
  mem->add_option("word", word)->required()->check(CLI::ExistingFile);
  mem->add_flag("--reduce", subgroup, "freely reduce W first (subgroup membership)");
  mem->callback([&] { action = [&] { return cmd_member(aut, word, subgroup, o, out); }; });

  auto* pre = app.add_subcommand("prefix", "longest prefix of word(W) in L(A)");
  pre->add_option("automaton", aut)->required()->check(CLI::ExistingFile);
  pre->add_option("word", word)->required()->check(CLI::ExistingFile);
  pre->callback([&] { action = [&] { return cmd_prefix(aut, word, o, out); }; });

  auto* coset = app.add_subcommand("coset", "shortest X with W in H.X");
  coset->add_option("automaton", aut)->required()->check(CLI::ExistingFile);
  coset->add_option("word", word)->required()->check(CLI::ExistingFile);
  coset->add_option("-o,--out", out_path, "output .slp (default: standard output)");
  coset->callback([&] { action = [&] { return cmd_coset(aut, word, out_path, o, out); }; });

  auto* cyc = app.add_subcommand("cyclic", "least m with W^m in H");
  cyc->add_option("automaton", aut)->required()->check(CLI::ExistingFile);
  cyc->add_option("word", word)->required()->check(CLI::ExistingFile);
  cyc->add_option("-o,--out", out_path, "output .slp for the reduced W^m");
  cyc->callback([&] { action = [&] { return cmd_cyclic(aut, word, out_path, o, out); }; });

  auto* inter = app.add_subcommand("intersect", "exponents m with U.V^m in L(A)");
  inter->add_option("automaton", aut)->required()->check(CLI::ExistingFile);
  inter->add_option("u", u_file)->required()->check(CLI::ExistingFile);
  inter->add_option("v", v_file)->required()->check(CLI::ExistingFile);
  inter->callback([&] { action = [&] { return cmd_intersect(aut, u_file, v_file, o, out); }; });

  auto* ev = app.add_subcommand("eval", "spell out word(W)");
  ev->add_option("word", word)->required()->check(CLI::ExistingFile);
  ev->add_option("--max-len", max_len, "longest word to print");
  ev->callback([&] { action = [&] { return cmd_eval(word, max_len, out); }; });

  auto* tr = app.add_subcommand("trace", "build with a DOT snapshot after every fold");
  tr->add_option("gens", gens)->required()->check(CLI::ExistingFile);
  tr->add_option("--dot-dir", dot_dir)->required();
  tr->add_option("--spell-limit", spell_limit, "longest label spelled out in DOT");
  tr->callback([&] { action = [&] { return cmd_trace(gens, dot_dir, spell_limit, o, out); }; });

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kYes;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kYes;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
  try {
    return action();
  } catch (const BudgetExceeded& e) {
    err << "budget exceeded: " << e.what() << '\n';
    return kBudget;
  } catch (const std::length_error& e) {
    err << "budget exceeded: " << e.what() << '\n';
    return kBudget;
  } catch (const InvariantViolation& e) {
    err << "internal error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
}

}  // namespace slpfold::cli
