#include "delta_lab/cli/run.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

int main(int argc, char** argv) {
  using delta_lab::cli::RunConfig;
  RunConfig cfg;
  CLI::App app{"Delta and Daugavet point laboratory"};
  app.require_subcommand(1);

  auto common = [&cfg](CLI::App* sub) {
    sub->add_option("--space", cfg.space, "l1 | ck | muntz | sum");
    sub->add_option("--point", cfg.point, "point as inline JSON or @file");
    sub->add_option("--target", cfg.target, "second point: witness target or L1 functional");
    sub->add_option("--poly", cfg.poly, "Muntz polynomial text, e.g. '0.5t - 0.2t^4'");
    sub->add_option("--eps", cfg.eps, "eps (comma list for crosscheck)");
    sub->add_option("--delta", cfg.delta, "delta");
    sub->add_option("--tol", cfg.tol, "numeric tolerance");
    sub->add_option("--norm", cfg.norm, "l1 | l2 | linf | lp:p | poly:[(a,b),...]");
    sub->add_option("--ladder", cfg.ladder, "squares | power:p | explicit:l1,l2,...");
    sub->add_option("--seed", cfg.seed, "sampling seed");
    sub->add_option("--cap", cfg.cap, "search cap");
    sub->add_option("--format", cfg.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--out", cfg.out, "output file");
    sub->add_flag("--timings", cfg.timings, "include wall time in the report");
  };

  auto* certify = app.add_subcommand("certify", "decide Daugavet / Delta membership with a certificate");
  common(certify);
  certify->add_option("--samples", cfg.samples, "far candidates for the Muntz separation check");
  auto* witness = app.add_subcommand("witness", "build and re-verify a witness family");
  common(witness);
  witness->add_option("--m", cfg.m, "family size for sequence witnesses");
  auto* decompose = app.add_subcommand("decompose", "convex decomposition into Daugavet points");
  common(decompose);
  auto* sums = app.add_subcommand("sums", "absolute sums: octahedrality, property (alpha), constructions");
  common(sums);
  sums->add_option("--check", cfg.check, "octahedral | alpha | dirichlet | refute | lift | construct")->required();
  sums->add_option("--weights", cfg.weights, "comma-separated weights for dirichlet");
  sums->add_option("--samples", cfg.samples, "sampled far points for the refute hull check");
  sums->add_option("--grid", cfg.grid, "quarter-sphere grid size (at least 4096)");
  auto* bern = app.add_subcommand("bernstein", "lower estimate of the Bernstein constant");
  common(bern);
  bern->add_option("--terms", cfg.terms, "number of ladder terms");
  bern->add_option("--s", cfg.s, "right end of [0, s]");
  bern->add_option("--grid", cfg.grid, "LP grid size");
  auto* cross = app.add_subcommand("crosscheck", "theorem vs. vertex enumeration vs. projections");
  common(cross);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }
  cfg.command = app.get_subcommands().front()->get_name();

  const auto report = delta_lab::cli::run(cfg);
  const std::string text = delta_lab::cli::render(report, cfg.format);
  if (cfg.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(cfg.out);
    if (!out) {
      std::cerr << "cannot write " << cfg.out << "\n";
      return 1;
    }
    out << text;
  }
  if (report.exit_code != 0) std::cerr << report.message << "\n";
  return report.exit_code;
}
