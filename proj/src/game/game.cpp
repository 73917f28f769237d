#include "bellgames/game/game.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "bellgames/errors.hpp"
#include "bellgames/numerics/parallel.hpp"

namespace bellgames {
namespace {

void require_shape(const GameShape& s) {
  if (s.inputs_alice < 1 || s.inputs_bob < 1 || s.outputs_alice < 1 || s.outputs_bob < 1)
    throw DomainError("game shape must have at least one input and one output per player");
}

bool better(double candidate, double incumbent, Direction direction) {
  return direction == Direction::maximize ? candidate > incumbent : candidate < incumbent;
}

std::string describe(const GameShape& s) {
  std::ostringstream os;
  os << s.inputs_alice << "x" << s.inputs_bob << " inputs, " << s.outputs_alice << "x" << s.outputs_bob
     << " outputs";
  return os.str();
}

}  // namespace

std::size_t GameShape::table_size() const {
  return static_cast<std::size_t>(inputs_alice) * inputs_bob * outputs_alice * outputs_bob;
}

TwoPlayerGame::TwoPlayerGame(GameShape shape, std::vector<double> payoff, std::string generator)
    : shape_(shape), payoff_(std::move(payoff)), generator_(std::move(generator)) {
  require_shape(shape_);
  if (payoff_.size() != shape_.table_size())
    throw DimensionError("payoff table has " + std::to_string(payoff_.size()) + " entries, shape needs " +
                         std::to_string(shape_.table_size()));
  for (double p : payoff_)
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("payoff outside [0, 1]: " + std::to_string(p));
}

TwoPlayerGame TwoPlayerGame::from_function(GameShape shape, const PayoffFn& payoff, std::string generator) {
  require_shape(shape);
  if (shape.table_size() > kMaxTableSize)
    throw RefusedError("payoff table for " + describe(shape) + " has " + std::to_string(shape.table_size()) +
                       " entries, above the limit of " + std::to_string(kMaxTableSize));
  std::vector<double> table;
  table.reserve(shape.table_size());
  for (int x = 0; x < shape.inputs_alice; ++x)
    for (int y = 0; y < shape.inputs_bob; ++y)
      for (int a = 0; a < shape.outputs_alice; ++a)
        for (int b = 0; b < shape.outputs_bob; ++b) table.push_back(payoff(x, y, a, b));
  return TwoPlayerGame(shape, std::move(table), std::move(generator));
}

double TwoPlayerGame::payoff_checked(int x, int y, int a, int b) const {
  if (x < 0 || x >= shape_.inputs_alice || y < 0 || y >= shape_.inputs_bob || a < 0 || a >= shape_.outputs_alice ||
      b < 0 || b >= shape_.outputs_bob)
    throw DomainError("payoff index out of range");
  return payoff(x, y, a, b);
}

TwoPlayerGame TwoPlayerGame::complemented() const {
  std::vector<double> flipped(payoff_.size());
  for (std::size_t i = 0; i < payoff_.size(); ++i) flipped[i] = 1.0 - payoff_[i];
  return TwoPlayerGame(shape_, std::move(flipped), generator_ + "+complement");
}

void validate_strategy(const TwoPlayerGame& game, const DeterministicStrategy& strategy) {
  const auto& s = game.shape();
  if (static_cast<int>(strategy.alice.size()) != s.inputs_alice ||
      static_cast<int>(strategy.bob.size()) != s.inputs_bob)
    throw ValidationError("strategy input count does not match the game");
  for (int a : strategy.alice)
    if (a < 0 || a >= s.outputs_alice) throw ValidationError("alice output out of range: " + std::to_string(a));
  for (int b : strategy.bob)
    if (b < 0 || b >= s.outputs_bob) throw ValidationError("bob output out of range: " + std::to_string(b));
}

ValueReport ValueReport::make(double value, std::string method, std::optional<double> half_width) {
  ValueReport r;
  r.value = value;
  r.bias = std::abs(value - 0.5);
  r.method = std::move(method);
  r.half_width = half_width;
  return r;
}

PovmReport validate_povm(const std::vector<Matrix>& elements, double tol) {
  if (elements.empty()) throw DimensionError("POVM has no elements");
  const Eigen::Index dim = elements.front().rows();
  Matrix total = Matrix::Zero(dim, dim);
  PovmReport report;
  report.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (const auto& e : elements) {
    if (e.rows() != dim || e.cols() != dim) throw DimensionError("POVM elements have mismatched dimensions");
    report.min_eigenvalue = std::min(report.min_eigenvalue, smallest_eigenvalue_sym(e));
    total += e;
  }
  report.completeness_defect = (total - Matrix::Identity(dim, dim)).cwiseAbs().maxCoeff();
  report.is_valid = report.min_eigenvalue >= -tol && report.completeness_defect <= tol;
  return report;
}

void validate_quantum_strategy(const TwoPlayerGame& game, const QuantumStrategy& strategy, double tol) {
  const auto& s = game.shape();
  const Eigen::Index dim = strategy.dimension();
  if (dim < 1) throw ValidationError("empty Schmidt vector");
  if ((strategy.schmidt.array() < 0.0).any()) throw ValidationError("Schmidt coefficients must be nonnegative");
  const double norm_defect = std::abs(strategy.schmidt.squaredNorm() - 1.0);
  if (norm_defect > 1e-12) throw ValidationError("Schmidt vector not normalised: |sum lambda^2 - 1| = " +
                                                 std::to_string(norm_defect));
  auto check_side = [&](const std::vector<std::vector<Matrix>>& povms, int inputs, int outputs, const char* who) {
    if (static_cast<int>(povms.size()) != inputs)
      throw ValidationError(std::string(who) + " POVM count does not match the game inputs");
    for (std::size_t x = 0; x < povms.size(); ++x) {
      if (static_cast<int>(povms[x].size()) != outputs)
        throw ValidationError(std::string(who) + " POVM for input " + std::to_string(x) + " has wrong outcome count");
      for (const auto& e : povms[x])
        if (e.rows() != dim || e.cols() != dim) throw DimensionError(std::string(who) + " POVM dimension mismatch");
      const auto report = validate_povm(povms[x], tol);
      if (!report.is_valid) {
        std::ostringstream os;
        os << who << " POVM for input " << x << " invalid: min eigenvalue " << report.min_eigenvalue
           << ", completeness defect " << report.completeness_defect;
        throw ValidationError(os.str());
      }
    }
  };
  check_side(strategy.alice_povms, s.inputs_alice, s.outputs_alice, "alice");
  check_side(strategy.bob_povms, s.inputs_bob, s.outputs_bob, "bob");
}

double quantum_outcome_prob(const Vector& schmidt, const Matrix& a, const Matrix& b) {
  const Eigen::Index d = schmidt.size();
  if (a.rows() != d || a.cols() != d || b.rows() != d || b.cols() != d)
    throw DimensionError("quantum_outcome_prob: dimension mismatch");
  const Matrix weighted = schmidt.asDiagonal() * a * schmidt.asDiagonal();
  return weighted.cwiseProduct(b).sum();
}

ValueReport classical_value_det(const TwoPlayerGame& game, const DeterministicStrategy& strategy) {
  validate_strategy(game, strategy);
  const auto& s = game.shape();
  const double total = deterministic_sum(static_cast<std::size_t>(s.inputs_alice), [&](std::size_t x) {
    double row = 0.0;
    for (int y = 0; y < s.inputs_bob; ++y)
      row += game.payoff(static_cast<int>(x), y, strategy.alice[x], strategy.bob[static_cast<std::size_t>(y)]);
    return row;
  }, 64);
  return ValueReport::make(total / (static_cast<double>(s.inputs_alice) * s.inputs_bob), "classical-deterministic");
}

double strategy_space_size(const GameShape& shape) {
  return std::pow(static_cast<double>(shape.outputs_alice), shape.inputs_alice) *
         std::pow(static_cast<double>(shape.outputs_bob), shape.inputs_bob);
}

std::vector<int> best_response_alice(const TwoPlayerGame& game, const std::vector<int>& bob, Direction direction) {
  const auto& s = game.shape();
  if (static_cast<int>(bob.size()) != s.inputs_bob) throw ValidationError("bob map has wrong length");
  std::vector<int> alice(static_cast<std::size_t>(s.inputs_alice), 0);
  for (int x = 0; x < s.inputs_alice; ++x) {
    double best = 0.0;
    for (int a = 0; a < s.outputs_alice; ++a) {
      double score = 0.0;
      for (int y = 0; y < s.inputs_bob; ++y) score += game.payoff(x, y, a, bob[static_cast<std::size_t>(y)]);
      if (a == 0 || better(score, best, direction)) {
        best = score;
        alice[static_cast<std::size_t>(x)] = a;
      }
    }
  }
  return alice;
}

std::vector<int> best_response_bob(const TwoPlayerGame& game, const std::vector<int>& alice, Direction direction) {
  const auto& s = game.shape();
  if (static_cast<int>(alice.size()) != s.inputs_alice) throw ValidationError("alice map has wrong length");
  std::vector<int> bob(static_cast<std::size_t>(s.inputs_bob), 0);
  for (int y = 0; y < s.inputs_bob; ++y) {
    double best = 0.0;
    for (int b = 0; b < s.outputs_bob; ++b) {
      double score = 0.0;
      for (int x = 0; x < s.inputs_alice; ++x) score += game.payoff(x, y, alice[static_cast<std::size_t>(x)], b);
      if (b == 0 || better(score, best, direction)) {
        best = score;
        bob[static_cast<std::size_t>(y)] = b;
      }
    }
  }
  return bob;
}

ClassicalOptimum classical_value_exact(const TwoPlayerGame& game, double guard, Direction direction) {
  const auto& s = game.shape();
  const double space = strategy_space_size(s);
  if (space > guard) {
    std::ostringstream os;
    os << "exact enumeration over " << space << " deterministic strategies exceeds the guard of " << guard;
    throw RefusedError(os.str());
  }
  const auto alice_maps = static_cast<std::size_t>(std::pow(static_cast<double>(s.outputs_alice), s.inputs_alice));

  auto decode = [&](std::size_t index) {
    std::vector<int> alice(static_cast<std::size_t>(s.inputs_alice));
    for (auto& a : alice) {
      a = static_cast<int>(index % static_cast<std::size_t>(s.outputs_alice));
      index /= static_cast<std::size_t>(s.outputs_alice);
    }
    return alice;
  };

  struct Candidate {
    double score;
    std::size_t index;
  };
  const double sentinel = direction == Direction::maximize ? -std::numeric_limits<double>::infinity()
                                                           : std::numeric_limits<double>::infinity();
  auto pick = [&](const Candidate& lhs, const Candidate& rhs) {
    if (better(rhs.score, lhs.score, direction)) return rhs;
    if (rhs.score == lhs.score && rhs.index < lhs.index) return rhs;
    return lhs;
  };

  const Candidate best = deterministic_reduce<Candidate>(
      alice_maps, 256,
      [&](std::size_t begin, std::size_t end) {
        Candidate local{sentinel, begin};
        std::vector<int> alice = decode(begin);
        for (std::size_t t = begin; t < end; ++t) {
          if (t != begin) {
            // increment the mixed-radix counter in place
            for (auto& a : alice) {
              if (++a < s.outputs_alice) break;
              a = 0;
            }
          }
          double score = 0.0;
          for (int y = 0; y < s.inputs_bob; ++y) {
            double best_col = 0.0;
            for (int b = 0; b < s.outputs_bob; ++b) {
              double col = 0.0;
              for (int x = 0; x < s.inputs_alice; ++x) col += game.payoff(x, y, alice[static_cast<std::size_t>(x)], b);
              if (b == 0 || better(col, best_col, direction)) best_col = col;
            }
            score += best_col;
          }
          local = pick(local, Candidate{score, t});
        }
        return local;
      },
      pick, Candidate{sentinel, std::numeric_limits<std::size_t>::max()});

  DeterministicStrategy strategy;
  strategy.alice = decode(best.index);
  strategy.bob = best_response_bob(game, strategy.alice, direction);
  ClassicalOptimum out{classical_value_det(game, strategy), strategy};
  out.report.method = direction == Direction::maximize ? "classical-exact-max" : "classical-exact-min";
  return out;
}

ClassicalOptimum classical_bias_exact(const TwoPlayerGame& game, double guard) {
  auto hi = classical_value_exact(game, guard, Direction::maximize);
  auto lo = classical_value_exact(game, guard, Direction::minimize);
  return lo.report.bias > hi.report.bias ? lo : hi;
}

ClassicalOptimum classical_value_alternating(const TwoPlayerGame& game, int restarts, const RngStream& stream) {
  if (restarts < 1) throw DomainError("alternating search needs at least one restart");
  const auto& s = game.shape();
  const std::size_t max_rounds =
      static_cast<std::size_t>(s.inputs_alice + s.inputs_bob) * static_cast<std::size_t>(s.outputs_alice + s.outputs_bob) + 1;

  std::optional<ClassicalOptimum> best;
  for (Direction direction : {Direction::maximize, Direction::minimize}) {
    const RngStream dir_stream = stream.child(StreamTag::restarts).child(direction == Direction::maximize ? 0u : 1u);
    for (int r = 0; r < restarts; ++r) {
      RngStream rng = dir_stream.child(static_cast<std::uint64_t>(r));
      DeterministicStrategy current;
      current.bob.resize(static_cast<std::size_t>(s.inputs_bob));
      for (auto& b : current.bob) b = static_cast<int>(rng.below(static_cast<std::uint64_t>(s.outputs_bob)));
      std::optional<double> previous;
      for (std::size_t round = 0; round < max_rounds; ++round) {
        current.alice = best_response_alice(game, current.bob, direction);
        current.bob = best_response_bob(game, current.alice, direction);
        const double value = classical_value_det(game, current).value;
        if (previous && !better(value, *previous, direction)) break;
        previous = value;
      }
      auto report = classical_value_det(game, current);
      if (!best || report.bias > best->report.bias) best = ClassicalOptimum{report, current};
    }
  }
  best->report.method = "classical-alternating";
  return *best;
}

ValueReport quantum_value(const TwoPlayerGame& game, const QuantumStrategy& strategy) {
  validate_quantum_strategy(game, strategy);
  const auto& s = game.shape();
  const Vector& lambda = strategy.schmidt;

  std::vector<std::vector<Matrix>> weighted(strategy.alice_povms.size());
  for (std::size_t x = 0; x < weighted.size(); ++x)
    for (const auto& e : strategy.alice_povms[x]) weighted[x].push_back(lambda.asDiagonal() * e * lambda.asDiagonal());

  const std::size_t pairs = static_cast<std::size_t>(s.inputs_alice) * static_cast<std::size_t>(s.inputs_bob);
  const double total = deterministic_sum(pairs, [&](std::size_t p) {
    const int x = static_cast<int>(p / static_cast<std::size_t>(s.inputs_bob));
    const int y = static_cast<int>(p % static_cast<std::size_t>(s.inputs_bob));
    double acc = 0.0;
    for (int a = 0; a < s.outputs_alice; ++a)
      for (int b = 0; b < s.outputs_bob; ++b) {
        const double prob = weighted[static_cast<std::size_t>(x)][static_cast<std::size_t>(a)]
                                .cwiseProduct(strategy.bob_povms[static_cast<std::size_t>(y)][static_cast<std::size_t>(b)])
                                .sum();
        acc += prob * game.payoff(x, y, a, b);
      }
    return acc;
  }, 16);
  return ValueReport::make(total / static_cast<double>(pairs), "quantum-exact");
}

TwoPlayerGame chsh_game() {
  return TwoPlayerGame::from_function(
      GameShape{2, 2, 2, 2}, [](int x, int y, int a, int b) { return (a ^ b) == (x & y) ? 1.0 : 0.0; }, "chsh");
}

QuantumStrategy chsh_optimal_strategy() {
  auto projectors = [](double theta) {
    Vector dir(2);
    dir << std::cos(theta), std::sin(theta);
    Matrix p0 = dir * dir.transpose();
    Matrix p1 = Matrix::Identity(2, 2) - p0;
    return std::vector<Matrix>{p0, p1};
  };
  constexpr double pi = std::numbers::pi;
  QuantumStrategy q;
  q.schmidt = Vector::Constant(2, 1.0 / std::numbers::sqrt2);
  q.alice_povms = {projectors(0.0), projectors(pi / 4.0)};
  q.bob_povms = {projectors(pi / 8.0), projectors(-pi / 8.0)};
  return q;
}

}  // namespace bellgames
