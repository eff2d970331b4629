#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qtflux/torus_model.hpp"

namespace qtflux::verify {

enum class Level { fast, full };

struct Options {
  Level level = Level::full;
  std::uint64_t seed = 20240521;
  unsigned threads = 1;
};

struct CheckResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

// Checks 9 and 10 (the (N, r) ladders) run only at Level::full.
std::vector<CheckResult> run_all(const Options& options);
CheckResult run_check(int id, const Options& options);
std::vector<int> check_ids(Level level);

// Rank-2 torus model with a pure-point eigenvalue at ζ = 1 coupled to both
// perturbation vectors; `pp_charge` is the charge on that eigenvector.
engine::TorusSpec pure_point_reference_spec(std::size_t grid, std::uint64_t seed,
                                            double pp_charge = 1.0);

}  // namespace qtflux::verify
