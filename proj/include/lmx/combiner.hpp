#pragma once

#include <vector>

#include "lmx/space.hpp"

namespace lmx {

/// Glues finitely many spaces into one of total measure 1: component n is
/// rescaled to diameter <= 1, its measure shrunk so that twice its total is
/// at most the lightest point of component n-1, and points of different
/// components sit at distance 2. The result records the components and scales.
FiniteSpace combine(const std::vector<FiniteSpace>& components);

struct ChainLink {
  std::size_t index = 0;    // link between component index and index + 1
  ExtReal lightest_point;   // min over x in X'_index of mu'({x})
  ExtReal twice_next_total; // 2 mu'(X'_{index+1})
  bool holds = false;
};

struct OrderingNote {
  std::vector<ExtReal> measure_scale;  // normalized s_n
  std::vector<double> metric_scale;
  std::vector<ChainLink> chain;
};

/// Measure-decay chain of the combined construction in the given order.
OrderingNote ordering_note(const std::vector<FiniteSpace>& components);

}  // namespace lmx
