#include "bellgames/harness/dispatch.hpp"

#include <chrono>
#include <cmath>

#include "bellgames/coset/coset_game.hpp"
#include "bellgames/errors.hpp"
#include "bellgames/game/game.hpp"
#include "bellgames/harness/acceptance.hpp"
#include "bellgames/jp/jp_game.hpp"
#include "bellgames/jp/serialize.hpp"
#include "bellgames/maxent/maxent.hpp"
#include "bellgames/numerics/entropy.hpp"
#include "bellgames/numerics/parallel.hpp"
#include "bellgames/numerics/tail_claims.hpp"

namespace bellgames::harness {
namespace {

using nlohmann::ordered_json;

jp::JpInstance make_jp(const RunConfig& c, const RngStream& stream) {
  const auto policy = jp::delta_policy_from_string(c.policy.value_or("adaptive"));
  return jp::build_jp(*c.n, *c.k, c.c.value_or(jp::kDefaultC), policy, stream.child(StreamTag::instance));
}

ordered_json report_row(const ValueReport& r) {
  ordered_json row;
  row["method"] = r.method;
  row["value"] = r.value;
  row["bias"] = r.bias;
  if (r.half_width) row["half_width"] = *r.half_width;
  return row;
}

void jp_build(const RunConfig& c, RunRecord& rec) {
  const auto inst = make_jp(c, RngStream(*c.seed));
  const auto wd = jp::jp_well_defined(inst);
  ordered_json row;
  row["n"] = inst.n;
  row["k"] = inst.k;
  row["c"] = inst.c;
  row["policy"] = jp::to_string(inst.policy);
  row["delta"] = inst.delta;
  row["delta_formula"] = std::isfinite(inst.delta_formula) ? ordered_json(inst.delta_formula) : ordered_json(nullptr);
  row["max_abs_inner"] = jp::max_abs_inner(inst);
  if (c.format == OutputFormat::json) row["instance"] = jp::to_json(inst);
  rec.rows.push_back(row);
  rec.checks.emplace_back("well_defined", wd.ok);
}

void jp_value(const RunConfig& c, RunRecord& rec) {
  const std::string method = c.method.value_or("exact");
  const RngStream root(c.seed.value_or(0));
  const auto inst = make_jp(c, root);
  ValueReport report;
  if (method == "exact") {
    report = classical_value_exact(jp::jp_as_game(inst)).report;
  } else if (method == "alternating") {
    report = classical_value_alternating(jp::jp_as_game(inst), c.restarts.value_or(50), root.child(StreamTag::restarts))
                 .report;
  } else if (method == "first-coord") {
    const auto strategy = jp::jp_first_coordinate_strategy(inst);
    report = ValueReport::make(jp::jp_value_bilinear(inst, strategy), "jp-first-coordinate");
  } else if (method == "quantum") {
    const auto q = jp::build_jp_quantum(inst);
    rec.checks.emplace_back("povms_valid", q.valid);
    if (!q.valid) throw ValidationError("quantum strategy invalid at " + q.offending_input.value_or("?"));
    report = quantum_value(jp::jp_as_game(inst), q.strategy);
  } else if (method == "closed-form") {
    report = jp::jp_quantum_value_closed_form(inst);
  } else {
    throw ValidationError("unknown jp value method '" + method +
                          "' (expected exact, alternating, first-coord, quantum or closed-form)");
  }
  ordered_json row = report_row(report);
  row["n"] = inst.n;
  row["k"] = inst.k;
  row["delta"] = inst.delta;
  rec.rows.push_back(row);
}

void jp_probe(const RunConfig& c, RunRecord& rec) {
  const auto probe = jp::jp_expectation_probe(*c.k, c.samples.value_or(100'000), RngStream(*c.seed).child(StreamTag::probe));
  const double target = std::sqrt(static_cast<double>(*c.k));
  ordered_json row;
  row["k"] = *c.k;
  row["samples"] = probe.samples;
  row["mean"] = probe.mean;
  row["std_err"] = probe.std_err;
  row["target"] = target;
  rec.rows.push_back(row);
  rec.checks.emplace_back("within_3_std_err", std::abs(probe.mean - target) <= 3.0 * probe.std_err);
}

void jp_violation(const RunConfig& c, RunRecord& rec) {
  const auto method = jp::classical_method_from_string(c.method.value_or("alternating"));
  const int seeds = c.seeds.value_or(1);
  const RngStream root(*c.seed);
  for (int s = 0; s < seeds; ++s) {
    const RngStream stream = root.child(static_cast<std::uint64_t>(s));
    const auto inst = make_jp(c, stream);
    const auto v = jp::jp_violation_report(inst, method, c.restarts.value_or(50), stream.child(StreamTag::restarts));
    ordered_json row;
    row["seed_index"] = s;
    row["n"] = inst.n;
    row["k"] = inst.k;
    row["classical_method"] = jp::to_string(v.method);
    row["entangled_bias"] = v.entangled_bias;
    row["classical_bias"] = v.classical_bias;
    row["ratio"] = v.ratio ? ordered_json(*v.ratio) : ordered_json(nullptr);
    row["povms_valid"] = v.povms_valid;
    rec.rows.push_back(row);
  }
}

coset::CosetStrategyParams params_from(const RunConfig& c, int n) {
  if (!c.beta && !c.gamma_sq) return coset::CosetStrategyParams::defaults(n);
  return coset::CosetStrategyParams::from_gamma_sq(n, c.gamma_sq.value_or(0.5), c.beta.value_or(1.0));
}

void coset_build(const RunConfig& c, RunRecord& rec) {
  const coset::CosetInstance inst(*c.n);
  const auto params = coset::CosetStrategyParams::defaults(inst.n());
  ordered_json row;
  row["n"] = inst.n();
  row["log_n"] = inst.log_n();
  row["coset_count"] = inst.coset_count();
  ordered_json codewords = ordered_json::array();
  for (const auto& w : inst.codewords()) codewords.push_back(w.to_hex());
  if (c.format == OutputFormat::json) row["codewords"] = codewords;
  row["alpha"] = params.alpha;
  row["gamma"] = params.gamma;
  row["beta"] = params.beta;
  row["mu"] = coset::povm_normalisation(inst.n(), params.beta);
  row["remainder_probability"] = coset::remainder_probability(inst.n(), params);
  rec.rows.push_back(row);
}

void coset_optimize(const RunConfig& c, RunRecord& rec) {
  const coset::CosetInstance inst(*c.n);
  coset::ParamGrid grid = coset::default_param_grid();
  if (!c.grid_betas.empty()) grid.betas = c.grid_betas;
  if (!c.grid_gamma_sqs.empty()) grid.gamma_sqs = c.grid_gamma_sqs;
  const auto best = coset::optimize_coset_params(inst, grid);
  ordered_json row = report_row(best.report);
  row["n"] = inst.n();
  row["beta"] = best.params.beta;
  row["gamma_sq"] = best.params.gamma * best.params.gamma;
  row["alpha"] = best.params.alpha;
  row["bias_sqrt_n"] = best.report.bias * std::sqrt(static_cast<double>(inst.n()));
  rec.rows.push_back(row);
}

void coset_value(const RunConfig& c, RunRecord& rec) {
  const std::string method = c.method.value_or("quantum");
  if (method == "optimize") return coset_optimize(c, rec);
  const coset::CosetInstance inst(*c.n);
  ValueReport report;
  ordered_json row;
  if (method == "weight-heuristic") {
    coset::WeightHeuristicOptions opt;
    if (c.samples) opt.samples = *c.samples;
    opt.seed = c.seed.value_or(0);
    report = coset::weight_heuristic_value(inst, opt);
    row = report_row(report);
    const double n = inst.n();
    row["bias_n_over_log2n"] = report.bias * n / std::log2(n);
  } else if (method == "quantum") {
    const auto params = params_from(c, inst.n());
    coset::CosetValueOptions opt;
    if (c.samples) opt.samples = *c.samples;
    opt.seed = c.seed.value_or(0);
    report = coset::coset_quantum_value(inst, params, coset::eval_mode_from_string(c.mode.value_or("reduced")), opt);
    row = report_row(report);
    row["beta"] = params.beta;
    row["gamma_sq"] = params.gamma * params.gamma;
    row["bias_sqrt_n"] = report.bias * std::sqrt(static_cast<double>(inst.n()));
  } else {
    throw ValidationError("unknown coset value method '" + method + "' (expected weight-heuristic, quantum or optimize)");
  }
  row["n"] = inst.n();
  rec.rows.push_back(row);
}

void maxent_audit(const RunConfig& c, RunRecord& rec) {
  const int seeds = c.seeds.value_or(20);
  const int m = c.m.value_or(1);
  const RngStream root(*c.seed);
  bool all = true;
  for (int s = 0; s < seeds; ++s) {
    const auto strategy = maxent::random_projector_strategy(*c.n, m, root.child(static_cast<std::uint64_t>(s)));
    const auto r = maxent::audit_strategy(strategy);
    ordered_json row;
    row["seed_index"] = s;
    row["n"] = *c.n;
    row["m"] = m;
    row["value_direct"] = r.value_direct;
    row["value_fourier"] = r.value_fourier;
    row["cs_bound"] = r.cs_bound;
    row["weight_alice"] = r.weight_alice;
    row["weight_bob"] = r.weight_bob;
    row["I_AM"] = r.audit_alice.I_AM;
    row["bitwise_sum"] = r.audit_alice.bitwise_sum;
    row["bound_2ln2logn"] = r.bound_2ln2logn;
    row["all_links_pass"] = r.all_links_pass();
    all = all && r.all_links_pass();
    rec.rows.push_back(row);
  }
  rec.checks.emplace_back("all_links_pass", all);
}

void tail_row(const TailProbeResult& r, RunRecord& rec) {
  ordered_json row;
  row["k"] = r.k;
  row["parameter"] = r.parameter;
  row["threshold"] = r.threshold;
  row["samples"] = r.samples;
  row["hits"] = r.hits;
  row["hit_frequency"] = r.hit_frequency;
  row["bound"] = r.bound;
  rec.rows.push_back(row);
}

void claims(const RunConfig& c, RunRecord& rec) {
  if (c.subcommand == "norm-tail") {
    const auto r = norm_tail_probe(*c.k, *c.R, c.samples.value_or(100'000), RngStream(*c.seed));
    tail_row(r, rec);
    const double slack = 3.0 * std::sqrt(r.bound * (1.0 - r.bound) / static_cast<double>(r.samples));
    rec.checks.emplace_back("within_bound", r.hit_frequency <= r.bound + slack);
  } else if (c.subcommand == "inner-tail") {
    const auto r = inner_tail_probe(*c.k, *c.eps, c.samples.value_or(100'000), RngStream(*c.seed));
    tail_row(r, rec);
    rec.checks.emplace_back("within_bound", r.hit_frequency <= r.bound);
  } else {
    const double step = c.step.value_or(1e-4);
    const auto points = static_cast<std::size_t>(std::llround(1.0 / step));
    double min_gap = 1.0;
    std::size_t failures = 0;
    for (std::size_t i = 0; i <= points; ++i) {
      const auto g = entropy_gap_check(std::min(1.0, static_cast<double>(i) * step));
      min_gap = std::min(min_gap, g.lhs - g.rhs);
      if (!g.holds) ++failures;
    }
    const auto half = entropy_gap_check(0.5);
    ordered_json row;
    row["step"] = step;
    row["points"] = points + 1;
    row["min_gap"] = min_gap;
    row["failures"] = failures;
    row["residual_at_half"] = std::abs(half.lhs - half.rhs);
    rec.rows.push_back(row);
    rec.checks.emplace_back("holds_everywhere", failures == 0);
  }
}

void accept(const RunConfig& c, RunRecord& rec) {
  const auto summary = run_acceptance(tier_from_string(c.subcommand), c.seed.value_or(kAcceptanceSeed));
  for (const auto& r : summary.results) {
    ordered_json row;
    row["id"] = r.id;
    row["name"] = r.name;
    row["passed"] = r.passed;
    row["seconds"] = r.seconds;
    row["detail"] = r.detail;
    if (c.format == OutputFormat::json) row["metrics"] = r.metrics;
    rec.rows.push_back(row);
    rec.checks.emplace_back("criterion_" + std::to_string(r.id), r.passed);
  }
}

}  // namespace

RunRecord dispatch(const RunConfig& config) {
  validate(config);
  if (config.workers) set_worker_count(*config.workers);
  RunRecord rec;
  rec.config = config;
  const auto start = std::chrono::steady_clock::now();
  const std::string& cmd = config.command;
  const std::string& sub = config.subcommand;
  if (cmd == "jp") {
    if (sub == "build") jp_build(config, rec);
    else if (sub == "value") jp_value(config, rec);
    else if (sub == "probe-expectation") jp_probe(config, rec);
    else jp_violation(config, rec);
  } else if (cmd == "coset") {
    if (sub == "build") coset_build(config, rec);
    else if (sub == "value") coset_value(config, rec);
    else coset_optimize(config, rec);
  } else if (cmd == "maxent") {
    maxent_audit(config, rec);
  } else if (cmd == "claims") {
    claims(config, rec);
  } else {
    accept(config, rec);
  }
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

int exit_status(const RunRecord& record) { return record.all_checks_pass() ? 0 : 2; }

}  // namespace bellgames::harness
