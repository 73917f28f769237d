#include "bellgames/game/serialize.hpp"

#include <string>

#include "bellgames/errors.hpp"

namespace bellgames {

using nlohmann::json;

void require_schema(const json& j, const char* schema) {
  if (!j.is_object() || !j.contains("schema") || j.at("schema") != schema)
    throw ValidationError(std::string("expected a document with schema ") + schema);
}

json matrix_to_json(const Matrix& m) {
  json flat = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) flat.push_back(m(i, j));
  return flat;
}

Matrix matrix_from_json(const json& j, Eigen::Index dim) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != dim * dim)
    throw DimensionError("matrix entry count does not match dimension " + std::to_string(dim));
  Matrix m(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index k = 0; k < dim; ++k) m(i, k) = j[static_cast<std::size_t>(i * dim + k)].get<double>();
  return m;
}

json to_json(const TwoPlayerGame& game) {
  const auto& s = game.shape();
  return json{{"schema", kGameSchema},
              {"generator", game.generator()},
              {"shape",
               {{"inputs_alice", s.inputs_alice},
                {"inputs_bob", s.inputs_bob},
                {"outputs_alice", s.outputs_alice},
                {"outputs_bob", s.outputs_bob}}},
              {"payoff", game.table()}};
}

TwoPlayerGame game_from_json(const json& j) {
  require_schema(j, kGameSchema);
  const auto& sj = j.at("shape");
  GameShape shape{sj.at("inputs_alice").get<int>(), sj.at("inputs_bob").get<int>(), sj.at("outputs_alice").get<int>(),
                  sj.at("outputs_bob").get<int>()};
  return TwoPlayerGame(shape, j.at("payoff").get<std::vector<double>>(), j.value("generator", std::string("table")));
}

json to_json(const DeterministicStrategy& strategy) {
  return json{{"schema", kDeterministicSchema}, {"alice", strategy.alice}, {"bob", strategy.bob}};
}

DeterministicStrategy deterministic_strategy_from_json(const json& j) {
  require_schema(j, kDeterministicSchema);
  return DeterministicStrategy{j.at("alice").get<std::vector<int>>(), j.at("bob").get<std::vector<int>>()};
}

json to_json(const QuantumStrategy& strategy) {
  auto side = [](const std::vector<std::vector<Matrix>>& povms) {
    json out = json::array();
    for (const auto& povm : povms) {
      json elements = json::array();
      for (const auto& e : povm) elements.push_back(matrix_to_json(e));
      out.push_back(std::move(elements));
    }
    return out;
  };
  return json{{"schema", kQuantumSchema},
              {"dimension", strategy.dimension()},
              {"schmidt", std::vector<double>(strategy.schmidt.data(), strategy.schmidt.data() + strategy.schmidt.size())},
              {"alice_povms", side(strategy.alice_povms)},
              {"bob_povms", side(strategy.bob_povms)}};
}

QuantumStrategy quantum_strategy_from_json(const json& j) {
  require_schema(j, kQuantumSchema);
  const auto dim = j.at("dimension").get<Eigen::Index>();
  const auto lambda = j.at("schmidt").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(lambda.size()) != dim) throw DimensionError("schmidt length differs from dimension");
  QuantumStrategy q;
  q.schmidt = Eigen::Map<const Vector>(lambda.data(), dim);
  auto side = [dim](const json& sj) {
    std::vector<std::vector<Matrix>> povms;
    for (const auto& elements : sj) {
      std::vector<Matrix> povm;
      for (const auto& e : elements) povm.push_back(matrix_from_json(e, dim));
      povms.push_back(std::move(povm));
    }
    return povms;
  };
  q.alice_povms = side(j.at("alice_povms"));
  q.bob_povms = side(j.at("bob_povms"));
  return q;
}

}  // namespace bellgames
