#pragma once

#include <json.hpp>

#include "bellgames/game/game.hpp"

namespace bellgames {

/// JSON schemas (all matrices row-major, flattened):
///   game:      {"schema": "bellgames.game/1", "generator": str,
///               "shape": {"inputs_alice", "inputs_bob", "outputs_alice", "outputs_bob"},
///               "payoff": [x][y][a][b] flattened}
///   strategy:  {"schema": "bellgames.deterministic_strategy/1", "alice": [...], "bob": [...]}
///   quantum:   {"schema": "bellgames.quantum_strategy/1", "dimension": D, "schmidt": [...],
///               "alice_povms": [[D*D doubles per outcome] per input], "bob_povms": ...}
inline constexpr const char* kGameSchema = "bellgames.game/1";
inline constexpr const char* kDeterministicSchema = "bellgames.deterministic_strategy/1";
inline constexpr const char* kQuantumSchema = "bellgames.quantum_strategy/1";

nlohmann::json to_json(const TwoPlayerGame& game);
TwoPlayerGame game_from_json(const nlohmann::json& j);

nlohmann::json to_json(const DeterministicStrategy& strategy);
DeterministicStrategy deterministic_strategy_from_json(const nlohmann::json& j);

nlohmann::json to_json(const QuantumStrategy& strategy);
QuantumStrategy quantum_strategy_from_json(const nlohmann::json& j);

nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j, Eigen::Index dim);

void require_schema(const nlohmann::json& j, const char* schema);

}  // namespace bellgames
