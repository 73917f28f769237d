// Command-line runner: one subcommand per module operation, output as a
// versioned JSON run record or CSV rows.

#include <fstream>
#include <iostream>
#include <list>

#include <CLI11.hpp>

#include "bellgames/errors.hpp"
#include "bellgames/harness/acceptance.hpp"
#include "bellgames/harness/dispatch.hpp"
#include "bellgames/harness/run_config.hpp"

namespace bh = bellgames::harness;

namespace {

/// Raw flag storage for one leaf subcommand; only options actually given end
/// up in the RunConfig, so config-file values survive.
struct Flags {
  std::string command, subcommand;
  int n = 0, k = 0, restarts = 0, m = 0, seeds = 0;
  double c = 0, R = 0, eps = 0, step = 0, beta = 0, gamma_sq = 0;
  std::size_t samples = 0, workers = 0;
  std::uint64_t seed = 0;
  std::string policy, method, mode, out, format, config_path;
  std::vector<double> grid_betas, grid_gamma_sqs;
  CLI::App* app = nullptr;

  bool given(const char* name) const {
    const CLI::Option* opt = app->get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  }

  bh::RunConfig to_config() const {
    bh::RunConfig cfg;
    cfg.command = command;
    cfg.subcommand = subcommand;
    if (given("--n")) cfg.n = n;
    if (given("--k")) cfg.k = k;
    if (given("--c")) cfg.c = c;
    if (given("--policy")) cfg.policy = policy;
    if (given("--samples")) cfg.samples = samples;
    if (given("--restarts")) cfg.restarts = restarts;
    if (given("--method")) cfg.method = method;
    if (given("--mode")) cfg.mode = mode;
    if (given("--m")) cfg.m = m;
    if (given("--seeds")) cfg.seeds = seeds;
    if (given("--R")) cfg.R = R;
    if (given("--eps")) cfg.eps = eps;
    if (given("--step")) cfg.step = step;
    if (given("--beta")) cfg.beta = beta;
    if (given("--gamma-sq")) cfg.gamma_sq = gamma_sq;
    cfg.grid_betas = grid_betas;
    cfg.grid_gamma_sqs = grid_gamma_sqs;
    if (given("--seed")) cfg.seed = seed;
    if (given("--workers")) cfg.workers = workers;
    if (given("--out")) cfg.out = out;
    return cfg;
  }
};

void add_common(CLI::App* app, Flags& f) {
  app->add_option("--seed", f.seed, "root seed (required for stochastic runs)");
  app->add_option("--workers", f.workers, "worker threads (default: BELLGAMES_WORKERS or hardware)");
  app->add_option("--config", f.config_path, "JSON config file; flags override its fields")->check(CLI::ExistingFile);
  app->add_option("--format", f.format, "output format")->check(CLI::IsMember({"json", "csv"}));
  app->add_option("--out", f.out, "write output here instead of stdout");
}

CLI::App* leaf(CLI::App* parent, std::list<Flags>& all, const std::string& command, const std::string& name,
               const std::string& help) {
  Flags& f = all.emplace_back();
  f.command = command;
  f.subcommand = name;
  f.app = parent->add_subcommand(name, help);
  add_common(f.app, f);
  return f.app;
}

Flags& last(std::list<Flags>& all) { return all.back(); }

int run(const Flags& f) {
  bh::RunConfig flags = f.to_config();
  bh::RunConfig cfg = flags;
  bool format_given = f.given("--format");
  if (!f.config_path.empty()) {
    const bh::RunConfig file = bh::load_config_file(f.config_path);
    flags.format = format_given ? bh::output_format_from_string(f.format) : file.format;
    cfg = bh::merge_configs(file, flags);
  } else if (format_given) {
    cfg.format = bh::output_format_from_string(f.format);
  }

  std::ofstream file_out;
  std::ostream* out = &std::cout;
  if (cfg.out) {
    file_out.open(*cfg.out);
    if (!file_out) throw bellgames::ValidationError("cannot write to '" + *cfg.out + "'");
    out = &file_out;
  }

  const bh::RunRecord record = bh::dispatch(cfg);
  if (cfg.format == bh::OutputFormat::csv)
    *out << bh::to_csv(record);
  else
    *out << bh::to_json(record).dump(2) << '\n';
  // criterion summary on stderr keeps stdout machine-readable
  if (cfg.command == "accept")
    for (const auto& row : record.rows)
      std::cerr << (row["passed"].get<bool>() ? "[PASS] " : "[FAIL] ") << row["id"] << ' '
                << row["name"].get<std::string>() << "  " << row["detail"].get<std::string>() << '\n';
  return bh::exit_status(record);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bellgames: nonlocal game experiments"};
  app.require_subcommand(1);
  std::list<Flags> leaves;

  auto* jp = app.add_subcommand("jp", "random Gaussian-vector game")->require_subcommand(1);
  auto jp_params = [&](CLI::App* a, bool needs_n) {
    Flags& f = last(leaves);
    if (needs_n) a->add_option("--n", f.n, "inputs per player");
    a->add_option("--k", f.k, "vector dimension (outputs are k + 1)");
    a->add_option("--c", f.c, "delta constant");
    a->add_option("--policy", f.policy, "delta policy")->check(CLI::IsMember({"fixed-c", "adaptive"}));
  };
  jp_params(leaf(jp, leaves, "jp", "build", "sample an instance"), true);
  {
    auto* a = leaf(jp, leaves, "jp", "value", "classical or entangled value of an instance");
    jp_params(a, true);
    a->add_option("--method", last(leaves).method)
        ->check(CLI::IsMember({"exact", "alternating", "first-coord", "quantum", "closed-form"}));
    a->add_option("--restarts", last(leaves).restarts, "alternating restarts");
  }
  {
    auto* a = leaf(jp, leaves, "jp", "probe-expectation", "Monte Carlo mean of the closed-form term");
    a->add_option("--k", last(leaves).k, "vector dimension");
    a->add_option("--samples", last(leaves).samples, "sample count");
  }
  {
    auto* a = leaf(jp, leaves, "jp", "violation", "entangled over classical bias, one row per seed");
    jp_params(a, true);
    a->add_option("--method", last(leaves).method, "classical baseline")
        ->check(CLI::IsMember({"exact", "alternating", "first-coord"}));
    a->add_option("--restarts", last(leaves).restarts, "alternating restarts");
    a->add_option("--seeds", last(leaves).seeds, "number of instances");
  }

  auto* coset = app.add_subcommand("coset", "Hadamard coset game")->require_subcommand(1);
  {
    auto* a = leaf(coset, leaves, "coset", "build", "coset structure and default strategy parameters");
    a->add_option("--n", last(leaves).n, "string length (power of two)");
  }
  {
    auto* a = leaf(coset, leaves, "coset", "value", "classical heuristic or entangled value");
    Flags& f = last(leaves);
    a->add_option("--n", f.n, "string length (power of two)");
    a->add_option("--method", f.method)->check(CLI::IsMember({"weight-heuristic", "quantum", "optimize"}));
    a->add_option("--mode", f.mode, "entangled evaluator")->check(CLI::IsMember({"exact", "reduced", "mc"}));
    a->add_option("--samples", f.samples, "Monte Carlo samples");
    a->add_option("--beta", f.beta, "remainder weight in the measurement vectors");
    a->add_option("--gamma-sq", f.gamma_sq, "squared weight of the extra state coordinate");
  }
  {
    auto* a = leaf(coset, leaves, "coset", "optimize", "grid search over strategy parameters");
    Flags& f = last(leaves);
    a->add_option("--n", f.n, "string length (power of two)");
    a->add_option("--grid-betas", f.grid_betas, "beta grid")->delimiter(',');
    a->add_option("--grid-gamma-sqs", f.grid_gamma_sqs, "gamma^2 grid")->delimiter(',');
  }

  auto* maxent = app.add_subcommand("maxent", "maximally entangled strategy analysis")->require_subcommand(1);
  {
    auto* a = leaf(maxent, leaves, "maxent", "audit", "inequality chain on random projector strategies");
    Flags& f = last(leaves);
    a->add_option("--n", f.n, "string length (power of two)");
    a->add_option("--m", f.m, "projector rank");
    a->add_option("--seeds", f.seeds, "number of strategies");
  }

  auto* claims = app.add_subcommand("claims", "Gaussian tail and entropy probes")->require_subcommand(1);
  {
    auto* a = leaf(claims, leaves, "claims", "norm-tail", "P(|g| > sqrt(8k ln R)) against R^-k");
    Flags& f = last(leaves);
    a->add_option("--k", f.k, "dimension");
    a->add_option("--R", f.R, "R >= 2");
    a->add_option("--samples", f.samples, "sample count");
  }
  {
    auto* a = leaf(claims, leaves, "claims", "inner-tail", "P(|<x,y>| > threshold) against eps");
    Flags& f = last(leaves);
    a->add_option("--k", f.k, "dimension");
    a->add_option("--eps", f.eps, "eps in (0, 1)");
    a->add_option("--samples", f.samples, "sample count");
  }
  {
    auto* a = leaf(claims, leaves, "claims", "entropy-gap", "1 - H(p) >= (2 / ln 2)(p - 1/2)^2 on a grid");
    a->add_option("--step", last(leaves).step, "grid step");
  }

  auto* accept = app.add_subcommand("accept", "acceptance suite")->require_subcommand(1);
  leaf(accept, leaves, "accept", "smoke", "fast subset");
  leaf(accept, leaves, "accept", "full", "every criterion");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    for (const Flags& f : leaves)
      if (f.app->parsed()) return run(f);
  } catch (const bellgames::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
