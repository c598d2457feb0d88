#include "lmx/combiner.hpp"

#include <algorithm>

namespace lmx {

namespace {

using Members = std::vector<std::pair<std::size_t, BigInt>>;
using RawProfile = std::vector<std::pair<double, Members>>;

ExtReal lightest_weight(const FiniteSpace& s) {
  ExtReal w = s.cell(0).weight;
  for (const auto& c : s.cells()) w = min(w, c.weight);
  return w;
}

struct Scales {
  std::vector<double> metric;
  std::vector<ExtReal> measure;  // normalized
};

Scales compute_scales(const std::vector<FiniteSpace>& components) {
  if (components.empty()) throw Error(ErrorCode::EmptyList, "nothing to combine");
  Scales sc;
  std::vector<ExtReal> raw;
  for (std::size_t n = 0; n < components.size(); ++n) {
    const FiniteSpace& comp = components[n];
    if (comp.cell_count() == 0 || comp.total_measure().is_zero()) {
      throw Error(ErrorCode::DegenerateComponent, "component " + std::to_string(n) + " has zero measure");
    }
    for (const auto& c : comp.cells()) {
      if (c.weight.is_zero() || c.count < 1) {
        throw Error(ErrorCode::DegenerateComponent, "component " + std::to_string(n) + " has a massless cell");
      }
    }
    const double diam = comp.diameter();
    sc.metric.push_back(diam > 0 ? 1.0 / diam : 1.0);
    if (n == 0) {
      raw.push_back(ExtReal::one());
    } else {
      const FiniteSpace& prev = components[n - 1];
      raw.push_back(raw.back() * lightest_weight(prev) / (ExtReal(2.0) * comp.total_measure()));
    }
  }
  std::vector<ExtReal> masses;
  for (std::size_t n = 0; n < components.size(); ++n) masses.push_back(raw[n] * components[n].total_measure());
  const ExtReal total = sum_largest_first(std::move(masses));
  for (const auto& s : raw) sc.measure.push_back(s / total);
  return sc;
}

}  // namespace

FiniteSpace combine(const std::vector<FiniteSpace>& components) {
  const Scales sc = compute_scales(components);
  std::vector<Cell> cells;
  std::vector<std::size_t> first;
  for (std::size_t n = 0; n < components.size(); ++n) {
    first.push_back(cells.size());
    for (const auto& c : components[n].cells()) {
      Cell cell = c;
      cell.id = "c" + std::to_string(n) + ":" + c.id;
      cell.weight = c.weight * sc.measure[n];
      cell.tags.push_back("component=" + std::to_string(n));
      if (cell.split == SplitRule::Positional) cell.split = SplitRule::None;
      cells.push_back(std::move(cell));
    }
  }
  Members all;
  for (std::size_t c = 0; c < cells.size(); ++c) all.emplace_back(c, cells[c].count);

  std::vector<RawProfile> raw;
  for (std::size_t n = 0; n < components.size(); ++n) {
    const FiniteSpace comp = to_cellular(components[n]);
    for (std::size_t c = 0; c < comp.cell_count(); ++c) {
      RawProfile prof;
      for (const auto& ball : comp.profile(c).balls) {
        Members ms;
        for (const auto& m : ball.members) ms.emplace_back(first[n] + m.cell, m.count);
        prof.emplace_back(ball.radius * sc.metric[n], std::move(ms));
      }
      prof.emplace_back(2.0, all);
      raw.push_back(std::move(prof));
    }
  }
  FiniteSpace out = FiniteSpace::cellular(std::move(cells), std::move(raw));

  // (a) rescaled diameters, (b) measure decay, (c) unit total.
  for (std::size_t n = 0; n < components.size(); ++n) {
    if (components[n].diameter() * sc.metric[n] > 1.0 + 1e-12) {
      throw Error(ErrorCode::Inconsistent, "rescaled diameter exceeds 1");
    }
  }
  if (ExtReal::rel_diff(out.total_measure(), ExtReal::one()) > 1e-12) {
    throw Error(ErrorCode::Inconsistent, "combined measure is not normalized");
  }
  auto info = std::make_shared<CombinedInfo>();
  info->components = components;
  info->metric_scale = sc.metric;
  info->measure_scale = sc.measure;
  info->first_cell = first;
  return out.with_combined(std::move(info)).with_generator(GeneratorKind::Combined);
}

OrderingNote ordering_note(const std::vector<FiniteSpace>& components) {
  OrderingNote note;
  if (components.empty()) return note;
  const Scales sc = compute_scales(components);
  note.measure_scale = sc.measure;
  note.metric_scale = sc.metric;
  for (std::size_t n = 0; n + 1 < components.size(); ++n) {
    ChainLink link;
    link.index = n;
    link.lightest_point = lightest_weight(components[n]) * sc.measure[n];
    link.twice_next_total = ExtReal(2.0) * components[n + 1].total_measure() * sc.measure[n + 1];
    // Equality is the intended case; allow rounding in the last bits.
    link.holds = link.twice_next_total <= link.lightest_point ||
                 ExtReal::rel_diff(link.twice_next_total, link.lightest_point) < 1e-12;
    note.chain.push_back(link);
  }
  return note;
}

}  // namespace lmx
