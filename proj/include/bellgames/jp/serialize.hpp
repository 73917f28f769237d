#pragma once

#include <json.hpp>

#include "bellgames/jp/jp_game.hpp"

namespace bellgames::jp {

/// {"schema": "bellgames.jp_instance/1", "n", "k", "c", "delta", "delta_formula",
///  "policy": "fixed-c" | "adaptive", "root_seed", "stream_path": [...],
///  "u": [x][a][coordinate], "v": [y][b][coordinate]}
inline constexpr const char* kInstanceSchema = "bellgames.jp_instance/1";

nlohmann::json to_json(const JpInstance& inst);
JpInstance instance_from_json(const nlohmann::json& j);

}  // namespace bellgames::jp
