#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bellgames/numerics/linalg.hpp"
#include "bellgames/numerics/rng.hpp"

namespace bellgames {

struct GameShape {
  int inputs_alice = 0;
  int inputs_bob = 0;
  int outputs_alice = 0;
  int outputs_bob = 0;

  std::size_t table_size() const;
  bool operator==(const GameShape&) const = default;
};

/// Finite two-player game with uniformly distributed input pairs. The payoff
/// is the winning probability of (a, b) on (x, y) and lies in [0, 1].
class TwoPlayerGame {
 public:
  using PayoffFn = std::function<double(int x, int y, int a, int b)>;

  /// Largest payoff table the dense representation accepts.
  static constexpr std::size_t kMaxTableSize = std::size_t{1} << 27;

  /// Table laid out row-major as [x][y][a][b].
  TwoPlayerGame(GameShape shape, std::vector<double> payoff, std::string generator = "table");
  static TwoPlayerGame from_function(GameShape shape, const PayoffFn& payoff, std::string generator = "function");

  const GameShape& shape() const { return shape_; }
  const std::string& generator() const { return generator_; }
  const std::vector<double>& table() const { return payoff_; }

  double payoff(int x, int y, int a, int b) const {
    return payoff_[index(x, y, a, b)];
  }
  /// Payoff with range checking; throws DomainError on bad indices.
  double payoff_checked(int x, int y, int a, int b) const;

  /// Same shape, payoff replaced by 1 - payoff.
  TwoPlayerGame complemented() const;

 private:
  std::size_t index(int x, int y, int a, int b) const {
    return ((static_cast<std::size_t>(x) * shape_.inputs_bob + y) * shape_.outputs_alice + a) * shape_.outputs_bob + b;
  }

  GameShape shape_;
  std::vector<double> payoff_;
  std::string generator_;
};

struct DeterministicStrategy {
  std::vector<int> alice;  ///< alice[x] = output on input x
  std::vector<int> bob;

  bool operator==(const DeterministicStrategy&) const = default;
};

/// Throws ValidationError when the maps do not fit the game.
void validate_strategy(const TwoPlayerGame& game, const DeterministicStrategy& strategy);

/// Winning probability with its bias |value - 1/2|.
struct ValueReport {
  double value = 0.5;
  double bias = 0.0;
  std::string method;
  /// Confidence half-width for sampled values (three standard errors).
  std::optional<double> half_width;

  static ValueReport make(double value, std::string method, std::optional<double> half_width = std::nullopt);
};

/// Bipartite pure state sum_i schmidt[i] |i,i> with one POVM per input per player.
struct QuantumStrategy {
  Vector schmidt;
  std::vector<std::vector<Matrix>> alice_povms;  ///< [x][a]
  std::vector<std::vector<Matrix>> bob_povms;    ///< [y][b]

  Eigen::Index dimension() const { return schmidt.size(); }
};

struct PovmReport {
  bool is_valid = false;
  double min_eigenvalue = 0.0;
  double completeness_defect = 0.0;  ///< max |sum_a E_a - I|
};

inline constexpr double kPovmTolerance = 1e-9;

/// PSD and completeness check. Throws DimensionError on mismatched sizes.
PovmReport validate_povm(const std::vector<Matrix>& elements, double tol = kPovmTolerance);

/// Throws ValidationError unless the Schmidt vector is normalised and every
/// POVM is valid and shaped for `game`.
void validate_quantum_strategy(const TwoPlayerGame& game, const QuantumStrategy& strategy,
                               double tol = kPovmTolerance);

/// <psi| A (x) B |psi> for |psi> = sum_i lambda_i |i,i>, computed as
/// trace((diag(lambda) A diag(lambda)) B^T).
double quantum_outcome_prob(const Vector& schmidt, const Matrix& a, const Matrix& b);

ValueReport classical_value_det(const TwoPlayerGame& game, const DeterministicStrategy& strategy);

enum class Direction { maximize, minimize };

struct ClassicalOptimum {
  ValueReport report;
  DeterministicStrategy strategy;
};

inline constexpr double kDefaultEnumerationGuard = 1e7;

/// outputs_alice^inputs_alice * outputs_bob^inputs_bob, as a double.
double strategy_space_size(const GameShape& shape);

/// Exact optimum over all deterministic strategies. Alice's maps are
/// enumerated; Bob plays the exact best response to each. Refuses with
/// RefusedError when strategy_space_size exceeds `guard`.
ClassicalOptimum classical_value_exact(const TwoPlayerGame& game, double guard = kDefaultEnumerationGuard,
                                       Direction direction = Direction::maximize);

/// Both directions of classical_value_exact; keeps the one with larger bias.
ClassicalOptimum classical_bias_exact(const TwoPlayerGame& game, double guard = kDefaultEnumerationGuard);

/// Best response of one player against a fixed map of the other. Ties go to
/// the lowest output index.
std::vector<int> best_response_alice(const TwoPlayerGame& game, const std::vector<int>& bob, Direction direction);
std::vector<int> best_response_bob(const TwoPlayerGame& game, const std::vector<int>& alice, Direction direction);

/// Alternating best-response search from `restarts` random starts in each
/// direction. Returns the visited strategy of largest bias; a lower bound on
/// the classical bias.
ClassicalOptimum classical_value_alternating(const TwoPlayerGame& game, int restarts, const RngStream& stream);

/// Exact entangled value: average over inputs of sum_{a,b} P(a,b) payoff.
/// Throws ValidationError if the strategy fails validate_quantum_strategy.
ValueReport quantum_value(const TwoPlayerGame& game, const QuantumStrategy& strategy);

/// Outputs a, b in {0,1} win iff a xor b == x and y.
TwoPlayerGame chsh_game();
/// Maximally entangled qubit pair with measurement angles 0, pi/4 and +-pi/8.
QuantumStrategy chsh_optimal_strategy();

}  // namespace bellgames
