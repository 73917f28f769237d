#include "bellgames/jp/serialize.hpp"

#include <cmath>

#include "bellgames/errors.hpp"
#include "bellgames/game/serialize.hpp"

namespace bellgames::jp {

using nlohmann::json;

json to_json(const JpInstance& inst) {
  auto side = [](const std::vector<std::vector<Vector>>& vecs) {
    json out = json::array();
    for (const auto& row : vecs) {
      json r = json::array();
      for (const auto& v : row) r.push_back(std::vector<double>(v.data(), v.data() + v.size()));
      out.push_back(std::move(r));
    }
    return out;
  };
  json j{{"schema", kInstanceSchema},
         {"n", inst.n},
         {"k", inst.k},
         {"c", inst.c},
         {"delta", inst.delta},
         {"policy", to_string(inst.policy)},
         {"root_seed", inst.root_seed},
         {"stream_path", inst.stream_path},
         {"u", side(inst.u)},
         {"v", side(inst.v)}};
  // JSON has no infinity; n = 1 leaves delta_formula null
  j["delta_formula"] = std::isfinite(inst.delta_formula) ? json(inst.delta_formula) : json(nullptr);
  return j;
}

JpInstance instance_from_json(const json& j) {
  require_schema(j, kInstanceSchema);
  JpInstance inst;
  inst.n = j.at("n").get<int>();
  inst.k = j.at("k").get<int>();
  inst.c = j.at("c").get<double>();
  inst.delta = j.at("delta").get<double>();
  inst.delta_formula = delta_formula(inst.n, inst.k, inst.c);
  inst.policy = delta_policy_from_string(j.at("policy").get<std::string>());
  inst.root_seed = j.at("root_seed").get<std::uint64_t>();
  inst.stream_path = j.at("stream_path").get<std::vector<std::uint64_t>>();
  auto side = [&](const json& sj) {
    std::vector<std::vector<Vector>> out;
    if (static_cast<int>(sj.size()) != inst.n) throw DimensionError("instance vector table has wrong input count");
    for (const auto& row : sj) {
      std::vector<Vector> r;
      if (static_cast<int>(row.size()) != inst.k) throw DimensionError("instance vector table has wrong output count");
      for (const auto& entries : row) {
        const auto values = entries.get<std::vector<double>>();
        if (static_cast<int>(values.size()) != inst.k) throw DimensionError("instance vector has wrong dimension");
        r.push_back(Eigen::Map<const Vector>(values.data(), inst.k));
      }
      out.push_back(std::move(r));
    }
    return out;
  };
  inst.u = side(j.at("u"));
  inst.v = side(j.at("v"));
  return inst;
}

}  // namespace bellgames::jp
