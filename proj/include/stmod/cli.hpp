#pragma once

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stmod/brute_oracle.hpp"
#include "stmod/deflation.hpp"
#include "stmod/meo_analysis.hpp"
#include "stmod/modulus.hpp"
#include "stmod/multigraph.hpp"
#include "stmod/partitions.hpp"
#include "stmod/report.hpp"

namespace stmod::cli {

enum ExitCode : int { kOk = 0, kInputError = 2, kNoConvergence = 3, kDisagreement = 4 };

struct Options {
  std::string input;
  double tol = 1e-8;
  std::optional<std::size_t> max_iter;
  std::string format = "json";
  std::uint64_t seed = 1;
  std::size_t cap = kOracleTreeCap;
  std::size_t count = 1;
  std::string out;
  bool hierarchy = false;
};

inline Multigraph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read input file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return from_edge_list(buf.str());
}

inline SolverConfig solver_config(const Options& o) {
  SolverConfig cfg;
  cfg.tolerance = o.tol;
  cfg.max_iterations = o.max_iter;
  return cfg;
}

namespace detail {

inline std::string elapsed_line(std::chrono::steady_clock::time_point start) {
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return "elapsed: " + report::fixed(ms, 3) + " ms\n";
}

// Runs one subcommand; returns the report body and the exit code.
inline std::pair<std::string, int> dispatch(const std::string& command, const Options& o) {
  const auto start = std::chrono::steady_clock::now();
  const bool json = o.format == "json";
  const Multigraph g = load_graph(o.input);
  const SolverConfig cfg = solver_config(o);
  auto finish = [&](const report::Json& j, const std::string& text) {
    return json ? j.dump(2) + "\n" : text + elapsed_line(start);
  };

  if (command == "solve") {
    const ModulusResult r = solve(g, cfg);
    return {finish(report::solve_json(g, r), report::solve_text(g, r)), kOk};
  }
  if (command == "deflate") {
    const DeflationHierarchy h = deflate(g, cfg);
    return {finish(report::hierarchy_json(g, h), report::hierarchy_text(g, h)), kOk};
  }
  if (command == "partition") {
    const ModulusResult r = solve(g, cfg);
    const FeasiblePartition p = min_feasible_partition(g, r);
    report::Json j = report::header("partition", g);
    j["max_eta"] = report::sig12(r.eta_star.max());
    j["partition"] = report::partition_json(g, p);
    return {finish(j, report::partition_text(g, p, r.eta_star.max())), kOk};
  }
  if (command == "oracle") {
    OracleConfig oc;
    oc.tree_cap = o.cap;
    oc.solver = cfg;
    const OracleReport r = cross_check(g, oc);
    return {finish(report::oracle_json(g, r), report::oracle_text(g, r)), r.all_agree() ? kOk : kDisagreement};
  }
  if (command == "sample") {
    const ModulusResult r = solve(g, cfg);
    const auto trees = sample_trees(r.mu, o.seed, o.count);
    report::Json j = report::header("sample", g);
    j["seed"] = o.seed;
    report::Json samples = report::Json::array();
    std::string text;
    for (const auto& t : trees) {
      samples.push_back(report::ids(t.edges()));
      for (EdgeId e : t) text += (e == *t.begin() ? "" : " ") + report::edge_name(g, e);
      text += "\n";
    }
    j["samples"] = std::move(samples);
    return {finish(j, text), kOk};
  }
  if (command == "export-dot") {
    if (o.hierarchy) return {report::export_dot(g, deflate(g, cfg)), kOk};
    return {report::export_dot(g, solve(g, cfg)), kOk};
  }
  throw InputError("unknown subcommand '" + command + "'");
}

}  // namespace detail

/// Entry point; args exclude the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spanning-tree modulus, minimum expected overlap and deflation", "stmod"};
  app.require_subcommand(1, 1);
  Options o;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--input", o.input, "Edge-list file")->required();
    sub->add_option("--tol", o.tol, "Solver tolerance")->capture_default_str();
    sub->add_option("--max-iter", o.max_iter, "Outer iteration cap (default 10*|E|)");
    sub->add_option("--format", o.format, "Report format")
        ->check(CLI::IsMember({"json", "text"}))
        ->capture_default_str();
    sub->add_option("--out", o.out, "Write the report to this file instead of standard output");
  };
  std::vector<std::pair<std::string, std::string>> commands = {
      {"solve", "Compute Mod2, MEO, eta* and an optimal tree pmf"},
      {"deflate", "Compute the deflation hierarchy"},
      {"partition", "Minimum feasible partition read off eta*"},
      {"oracle", "Cross-check the solver against brute-force oracles"},
      {"sample", "Draw trees from the optimal pmf"},
      {"export-dot", "Graphviz rendering with edges grouped by eta*"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub);
    if (name == "oracle") sub->add_option("--cap", o.cap, "Spanning-tree cap")->capture_default_str();
    if (name == "sample") {
      sub->add_option("--seed", o.seed, "Random seed")->capture_default_str();
      sub->add_option("--count", o.count, "Number of trees")->capture_default_str();
    }
    if (name == "export-dot") sub->add_flag("--hierarchy", o.hierarchy, "Bucket by deflation level");
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const auto [body, code] = detail::dispatch(command, o);
    if (o.out.empty()) {
      out << body;
    } else {
      std::ofstream file(o.out, std::ios::binary);
      if (!file) throw InputError("cannot write output file '" + o.out + "'");
      file << body;
    }
    if (code == kDisagreement) err << "stmod: oracle disagreement\n";
    return code;
  } catch (const InputError& e) {
    err << "stmod: " << e.what() << "\n";
    return kInputError;
  } catch (const OracleDisagreement& e) {
    err << "stmod: " << e.what() << "\n";
    return kDisagreement;
  } catch (const Error& e) {
    err << "stmod: " << e.what() << "\n";
    return kNoConvergence;
  }
}

inline int run(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, out, err);
}

}  // namespace stmod::cli
