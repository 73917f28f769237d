#include "bellgames/jp/jp_game.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "bellgames/errors.hpp"
#include "bellgames/numerics/parallel.hpp"

namespace bellgames::jp {
namespace {

constexpr double kBoundarySlack = 1e-12;

/// k x k matrix whose column a is vecs[a].
Matrix basis_matrix(const std::vector<Vector>& vecs) {
  Matrix m(vecs.front().size(), static_cast<Eigen::Index>(vecs.size()));
  for (std::size_t a = 0; a < vecs.size(); ++a) m.col(static_cast<Eigen::Index>(a)) = vecs[a];
  return m;
}

double closed_form_term(double s, int k) {
  const double w = s / std::sqrt(2.0 * k) + 1.0 / std::numbers::sqrt2;
  return s * w * w;
}

/// Sum over all (x, y, a, b) of closed_form_term(<u, v>).
double closed_form_sum(const JpInstance& inst) {
  std::vector<Matrix> us, vs;
  for (const auto& ux : inst.u) us.push_back(basis_matrix(ux));
  for (const auto& vy : inst.v) vs.push_back(basis_matrix(vy));
  const auto n = static_cast<std::size_t>(inst.n);
  return deterministic_sum(n * n, [&](std::size_t p) {
    const Matrix s = us[p / n].transpose() * vs[p % n];
    double acc = 0.0;
    for (Eigen::Index b = 0; b < s.cols(); ++b)
      for (Eigen::Index a = 0; a < s.rows(); ++a) acc += closed_form_term(s(a, b), inst.k);
    return acc;
  }, 8);
}

Vector side_sum(const std::vector<std::vector<Vector>>& vecs, const std::vector<int>& map, int pass, int k) {
  Vector total = Vector::Zero(k);
  for (std::size_t x = 0; x < map.size(); ++x)
    if (map[x] != pass) total += vecs[x][static_cast<std::size_t>(map[x])];
  return total;
}

std::vector<int> respond(const std::vector<std::vector<Vector>>& own, const Vector& other_sum, int pass) {
  std::vector<int> out(own.size(), pass);
  for (std::size_t x = 0; x < own.size(); ++x) {
    double best = 0.0;
    for (std::size_t a = 0; a < own[x].size(); ++a) {
      const double score = own[x][a].dot(other_sum);
      if (score > best) {
        best = score;
        out[x] = static_cast<int>(a);
      }
    }
  }
  return out;
}

}  // namespace

std::string to_string(DeltaPolicy policy) { return policy == DeltaPolicy::fixed_c ? "fixed-c" : "adaptive"; }

DeltaPolicy delta_policy_from_string(const std::string& name) {
  if (name == "fixed-c") return DeltaPolicy::fixed_c;
  if (name == "adaptive") return DeltaPolicy::adaptive;
  throw DomainError("unknown delta policy: " + name);
}

double delta_formula(int n, int k, double c) {
  if (n < 1 || k < 1) throw DomainError("delta_formula: n and k must be positive");
  const double log_n = std::log(static_cast<double>(n));
  if (log_n == 0.0) return std::numeric_limits<double>::infinity();
  return c / std::sqrt(k * log_n);
}

double max_abs_inner(const JpInstance& inst) {
  Matrix all_u(inst.k, inst.n * inst.k), all_v(inst.k, inst.n * inst.k);
  for (int x = 0; x < inst.n; ++x)
    for (int a = 0; a < inst.k; ++a) {
      all_u.col(x * inst.k + a) = inst.u[static_cast<std::size_t>(x)][static_cast<std::size_t>(a)];
      all_v.col(x * inst.k + a) = inst.v[static_cast<std::size_t>(x)][static_cast<std::size_t>(a)];
    }
  return (all_u.transpose() * all_v).cwiseAbs().maxCoeff();
}

JpInstance build_jp(int n, int k, double c, DeltaPolicy policy, const RngStream& stream) {
  if (k < 1 || n < 1) throw DomainError("build_jp: n and k must be positive");
  if (static_cast<double>(n) < std::sqrt(static_cast<double>(k)) || static_cast<double>(n) > std::ldexp(1.0, k))
    throw DomainError("build_jp: need sqrt(k) <= n <= 2^k, got n=" + std::to_string(n) + ", k=" + std::to_string(k));
  if (!(c > 0.0)) throw DomainError("build_jp: c must be positive");
  if (policy == DeltaPolicy::fixed_c && n < 2) throw DomainError("build_jp: fixed-c policy needs n >= 2 (ln 1 = 0)");

  JpInstance inst;
  inst.n = n;
  inst.k = k;
  inst.c = c;
  inst.policy = policy;
  inst.root_seed = stream.root_seed();
  inst.stream_path = stream.path();
  inst.delta_formula = delta_formula(n, k, c);

  auto sample_side = [&](StreamTag tag) {
    std::vector<std::vector<Vector>> side(static_cast<std::size_t>(n));
    const RngStream player = stream.child(tag);
    for (int x = 0; x < n; ++x)
      for (int a = 0; a < k; ++a) {
        RngStream rng = player.child(static_cast<std::uint64_t>(x)).child(static_cast<std::uint64_t>(a));
        side[static_cast<std::size_t>(x)].push_back(gaussian_vector(static_cast<std::size_t>(k), rng));
      }
    return side;
  };
  inst.u = sample_side(StreamTag::alice);
  inst.v = sample_side(StreamTag::bob);

  inst.delta = inst.delta_formula;
  if (policy == DeltaPolicy::adaptive) inst.delta = std::min(inst.delta_formula, 0.5 / max_abs_inner(inst));
  return inst;
}

double jp_payoff(const JpInstance& inst, int x, int y, int a, int b) {
  if (x < 0 || x >= inst.n || y < 0 || y >= inst.n || a < 0 || a > inst.k || b < 0 || b > inst.k)
    throw DomainError("jp_payoff: index out of range");
  if (a == inst.pass() || b == inst.pass()) return 0.5;
  const double p = 0.5 + inst.delta * inst.u[static_cast<std::size_t>(x)][static_cast<std::size_t>(a)].dot(
                                          inst.v[static_cast<std::size_t>(y)][static_cast<std::size_t>(b)]);
  // the adaptive cap puts the extreme pair exactly on 0 or 1, up to rounding
  if (p < 0.0 && p > -kBoundarySlack) return 0.0;
  if (p > 1.0 && p < 1.0 + kBoundarySlack) return 1.0;
  return p;
}

WellDefined jp_well_defined(const JpInstance& inst) {
  WellDefined w;
  w.max_abs = inst.delta * max_abs_inner(inst);
  w.ok = w.max_abs <= 0.5 + kBoundarySlack;
  return w;
}

TwoPlayerGame jp_as_game(const JpInstance& inst) {
  const auto check = jp_well_defined(inst);
  if (!check.ok)
    throw ValidationError("JP instance is not well defined: max delta |<u, v>| = " + std::to_string(check.max_abs));
  const GameShape shape{inst.n, inst.n, inst.outputs(), inst.outputs()};
  return TwoPlayerGame::from_function(
      shape, [&](int x, int y, int a, int b) { return jp_payoff(inst, x, y, a, b); }, "jp");
}

double jp_value_bilinear(const JpInstance& inst, const DeterministicStrategy& s) {
  const Vector alice_sum = side_sum(inst.u, s.alice, inst.pass(), inst.k);
  const Vector bob_sum = side_sum(inst.v, s.bob, inst.pass(), inst.k);
  return 0.5 + inst.delta / (static_cast<double>(inst.n) * inst.n) * alice_sum.dot(bob_sum);
}

DeterministicStrategy jp_best_response_alice(const JpInstance& inst, const DeterministicStrategy& current) {
  DeterministicStrategy out = current;
  out.alice = respond(inst.u, side_sum(inst.v, current.bob, inst.pass(), inst.k), inst.pass());
  return out;
}

DeterministicStrategy jp_best_response_bob(const JpInstance& inst, const DeterministicStrategy& current) {
  DeterministicStrategy out = current;
  out.bob = respond(inst.v, side_sum(inst.u, current.alice, inst.pass(), inst.k), inst.pass());
  return out;
}

ResponseSearch jp_best_response_search(const JpInstance& inst, DeterministicStrategy start) {
  ResponseSearch result;
  result.strategy = start;
  result.value = jp_value_bilinear(inst, start);
  const int max_rounds = inst.n * (inst.k + 1) + 1;
  DeterministicStrategy current = std::move(start);
  for (int round = 1; round <= max_rounds; ++round) {
    DeterministicStrategy next = jp_best_response_bob(inst, jp_best_response_alice(inst, current));
    result.rounds = round;
    const double value = jp_value_bilinear(inst, next);
    if (value > result.value) {
      result.value = value;
      result.strategy = next;
    }
    if (next == current) {
      result.converged = true;
      break;
    }
    current = std::move(next);
  }
  return result;
}

DeterministicStrategy jp_first_coordinate_strategy(const JpInstance& inst) {
  auto pick = [](const std::vector<std::vector<Vector>>& side) {
    std::vector<int> out;
    for (const auto& vecs : side) {
      int best = 0;
      for (std::size_t a = 1; a < vecs.size(); ++a)
        if (vecs[a][0] > vecs[static_cast<std::size_t>(best)][0]) best = static_cast<int>(a);
      out.push_back(best);
    }
    return out;
  };
  return DeterministicStrategy{pick(inst.u), pick(inst.v)};
}

JpInstance swap_players(const JpInstance& inst) {
  JpInstance out = inst;
  std::swap(out.u, out.v);
  return out;
}

InputCheck jp_input_check(const JpInstance& inst, bool alice, int input) {
  const auto& vecs = (alice ? inst.u : inst.v).at(static_cast<std::size_t>(input));
  const int k = inst.k;
  Matrix z(k + 1, k);
  for (int a = 0; a < k; ++a) {
    z.col(a).head(k) = vecs[static_cast<std::size_t>(a)];
    z(k, a) = 1.0;
  }
  InputCheck check;
  const Matrix gram = symmetrized(z * z.transpose());
  check.gram_top_eigenvalue = largest_eigenvalue_sym(gram);
  check.sigma_max = largest_singular_value(z);
  const Matrix remainder = symmetrized(Matrix::Identity(k + 1, k + 1) - gram / (10.0 * k));
  check.remainder_min_eigenvalue = smallest_eigenvalue_sym(remainder);
  check.valid = check.remainder_min_eigenvalue >= -kPovmTolerance;
  return check;
}

JpQuantumStrategy build_jp_quantum(const JpInstance& inst) {
  const int k = inst.k;
  JpQuantumStrategy out;
  out.strategy.schmidt = Vector::Constant(k + 1, 1.0 / std::sqrt(2.0 * k));
  out.strategy.schmidt[k] = 1.0 / std::numbers::sqrt2;

  auto povms_for = [&](const std::vector<std::vector<Vector>>& side) {
    std::vector<std::vector<Matrix>> povms;
    for (const auto& vecs : side) {
      std::vector<Matrix> povm;
      Matrix total = Matrix::Zero(k + 1, k + 1);
      for (const auto& vec : vecs) {
        Vector tilde(k + 1);
        tilde.head(k) = vec;
        tilde[k] = 1.0;
        Matrix element = tilde * tilde.transpose() / (10.0 * k);
        total += element;
        povm.push_back(std::move(element));
      }
      povm.push_back(symmetrized(Matrix::Identity(k + 1, k + 1) - total));
      povms.push_back(std::move(povm));
    }
    return povms;
  };
  out.strategy.alice_povms = povms_for(inst.u);
  out.strategy.bob_povms = povms_for(inst.v);

  out.valid = true;
  for (int x = 0; x < inst.n; ++x) {
    out.alice_checks.push_back(jp_input_check(inst, true, x));
    if (!out.alice_checks.back().valid && out.valid) {
      out.valid = false;
      out.offending_input = "alice:" + std::to_string(x);
    }
  }
  for (int y = 0; y < inst.n; ++y) {
    out.bob_checks.push_back(jp_input_check(inst, false, y));
    if (!out.bob_checks.back().valid && out.valid) {
      out.valid = false;
      out.offending_input = "bob:" + std::to_string(y);
    }
  }
  return out;
}

ValueReport jp_quantum_value_closed_form(const JpInstance& inst) {
  const double scale = inst.delta / (100.0 * inst.k * inst.k * static_cast<double>(inst.n) * inst.n);
  return ValueReport::make(0.5 + scale * closed_form_sum(inst), "quantum-closed-form");
}

double jp_closed_form_term_mean(const JpInstance& inst) {
  const double count = static_cast<double>(inst.n) * inst.n * inst.k * inst.k;
  return closed_form_sum(inst) / count;
}

ProbeMean jp_expectation_probe(int k, std::size_t samples, const RngStream& stream) {
  if (k < 1) throw DomainError("jp_expectation_probe: k must be >= 1");
  if (samples < 100) throw DomainError("jp_expectation_probe: need at least 100 samples");
  constexpr std::size_t block = 4096;
  const RngStream base = stream.child(StreamTag::samples);
  struct Moments {
    double sum = 0.0;
    double sum_sq = 0.0;
  };
  const Moments m = deterministic_reduce<Moments>(
      samples, block,
      [&](std::size_t begin, std::size_t end) {
        RngStream rng = base.child(begin / block);
        Moments local;
        for (std::size_t i = begin; i < end; ++i) {
          double s = 0.0;
          for (int j = 0; j < k; ++j) {
            const double uj = rng.gaussian();
            s += uj * rng.gaussian();
          }
          const double t = closed_form_term(s, k);
          local.sum += t;
          local.sum_sq += t * t;
        }
        return local;
      },
      [](Moments a, Moments b) { return Moments{a.sum + b.sum, a.sum_sq + b.sum_sq}; }, Moments{});
  const auto count = static_cast<double>(samples);
  ProbeMean out;
  out.samples = samples;
  out.mean = m.sum / count;
  const double variance = std::max(0.0, (m.sum_sq - count * out.mean * out.mean) / (count - 1.0));
  out.std_err = std::sqrt(variance / count);
  return out;
}

std::string to_string(ClassicalMethod method) {
  switch (method) {
    case ClassicalMethod::exact:
      return "exact";
    case ClassicalMethod::alternating:
      return "alternating";
    case ClassicalMethod::first_coordinate:
      return "first-coord";
  }
  return "unknown";
}

ClassicalMethod classical_method_from_string(const std::string& name) {
  if (name == "exact") return ClassicalMethod::exact;
  if (name == "alternating") return ClassicalMethod::alternating;
  if (name == "first-coord") return ClassicalMethod::first_coordinate;
  throw DomainError("unknown classical method: " + name);
}

ViolationReport jp_violation_report(const JpInstance& inst, ClassicalMethod method, int restarts,
                                    const RngStream& stream) {
  ViolationReport report;
  report.method = method;
  report.entangled_bias = jp_quantum_value_closed_form(inst).bias;
  report.povms_valid = build_jp_quantum(inst).valid;
  switch (method) {
    case ClassicalMethod::exact:
      report.classical_bias = classical_bias_exact(jp_as_game(inst)).report.bias;
      break;
    case ClassicalMethod::alternating:
      report.classical_bias = classical_value_alternating(jp_as_game(inst), restarts, stream).report.bias;
      break;
    case ClassicalMethod::first_coordinate:
      report.classical_bias = std::abs(jp_value_bilinear(inst, jp_first_coordinate_strategy(inst)) - 0.5);
      break;
  }
  if (report.classical_bias > 0.0) report.ratio = report.entangled_bias / report.classical_bias;
  return report;
}

}  // namespace bellgames::jp
