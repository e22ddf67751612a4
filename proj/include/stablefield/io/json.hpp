#ifndef STABLEFIELD_IO_JSON_HPP
#define STABLEFIELD_IO_JSON_HPP

#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

#include "stablefield/sas_core.hpp"

namespace stablefield::io {

using Json = nlohmann::ordered_json;

/// Non-finite doubles have no JSON form; they are written as strings.
inline Json number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

inline Json to_json(const RealizationMeta& m) {
  Json j;
  j["seed"] = m.seed;
  j["stream"] = m.stream;
  j["method"] = m.method;
  j["truncation"] = m.truncation;
  j["truncated_mass"] = m.truncated_mass ? number(*m.truncated_mass) : Json(nullptr);
  j["tail_estimate"] = m.tail_estimate ? number(*m.tail_estimate) : Json(nullptr);
  return j;
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace stablefield::io

#endif  // STABLEFIELD_IO_JSON_HPP
