#pragma once

// Small generated spaces shared by the unit tests and the acceptance runner.

#include <string>
#include <vector>

#include "lmx/space.hpp"

namespace fixtures {

struct Named {
  std::string name;
  lmx::FiniteSpace space;
};

/// First-type spaces with 1..max_levels levels and entries in 1..max_entry
/// (non-decreasing sequences only).
std::vector<Named> first_type_family(int max_levels, int max_entry);
/// Prime first-type spaces on prefixes of (1, 1, 2).
std::vector<Named> first_prime_family();
/// Layered block spaces at (2,2,2), l = 1, 2, and their r = inf variants at p = q = 2.
std::vector<Named> second_type_family();
/// Combined spaces on prefixes of up to three of the spaces above.
std::vector<Named> combined_family();

/// Every family above, in a fixed order.
std::vector<Named> oracle_family();

std::vector<lmx::BigInt> big(const std::vector<int>& v);

}  // namespace fixtures
