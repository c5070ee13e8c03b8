#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "tvind/random.hpp"

namespace tvind {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

/// Runs the full acceptance suite: every headline guarantee with its pinned
/// constants and tolerances, one result per criterion.
std::vector<CriterionResult> run_acceptance(const Seed& seed, std::size_t jobs);

/// One criterion by id (1-based); throws on unknown ids.
CriterionResult run_criterion(int id, const Seed& seed, std::size_t jobs);

}  // namespace tvind
