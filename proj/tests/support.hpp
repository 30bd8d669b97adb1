#pragma once

#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include "occupancy/core.hpp"

namespace testing {

inline occupancy::EnsembleSpec make_spec(std::initializer_list<const char*> energies, std::vector<double> weights,
                                         const char* cap, occupancy::Regime regime,
                                         std::optional<double> c = std::nullopt) {
  occupancy::EnsembleSpec spec;
  for (const char* e : energies) spec.energies.push_back(occupancy::Rational::parse(e));
  spec.weights = std::move(weights);
  spec.energy_cap = occupancy::Rational::parse(cap);
  spec.regime = regime;
  if (regime == occupancy::Regime::Proportional) spec.c = c.value_or(1.0);
  spec.schedule = occupancy::default_schedule(regime, spec.c.value_or(1.0));
  return occupancy::validate_spec(std::move(spec));
}

// g = (1/2, 1/2), e = (1, 2): the two-level instance with closed-form answers.
inline occupancy::EnsembleSpec two_level(const char* cap, occupancy::Regime regime) {
  return make_spec({"1", "2"}, {0.5, 0.5}, cap, regime);
}

}  // namespace testing
