#pragma once

#include <string>

#include "json.hpp"
#include "tvind/core.hpp"
#include "tvind/metrics.hpp"

namespace tvind {

inline nlohmann::json to_json(const FiniteDistribution& dist) {
  return nlohmann::json{{"support", dist.support()}, {"mass", dist.mass()}};
}

inline FiniteDistribution distribution_from_json(const nlohmann::json& j) {
  return FiniteDistribution(j.at("support").get<std::vector<ItemId>>(),
                            j.at("mass").get<std::vector<double>>());
}

inline nlohmann::json to_json(const Hypothesis& h) { return h.to_bit_string(); }

inline Hypothesis hypothesis_from_json(const nlohmann::json& j) {
  return Hypothesis::from_bit_string(j.get<std::string>());
}

inline nlohmann::json to_json(const Dataset& sample) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& ex : sample) out.push_back({ex.point, ex.label});
  return out;
}

inline Dataset dataset_from_json(const nlohmann::json& j) {
  Dataset out;
  for (const auto& pair : j) {
    out.push_back(Example{pair.at(0).get<std::uint32_t>(),
                          static_cast<std::uint8_t>(pair.at(1).get<int>())});
  }
  return out;
}

inline nlohmann::json to_json(const Estimate& e) {
  return nlohmann::json{{"value", e.value}, {"ci3", e.ci}};
}

inline nlohmann::json to_json(const StabilityReport& r) {
  return nlohmann::json{{"replicability", to_json(r.replicability)},
                        {"expected_tv", to_json(r.expected_tv)},
                        {"fixed_prior_tv", to_json(r.fixed_prior)},
                        {"alpha_level", r.alpha_level},
                        {"beta_rate", to_json(r.beta_rate)},
                        {"trials", r.trials},
                        {"sample_size", r.sample_size},
                        {"seed", r.seed_hex}};
}

}  // namespace tvind
