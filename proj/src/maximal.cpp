#include "lmx/maximal.hpp"

#include <algorithm>
#include <numeric>

namespace lmx {

namespace {

MaximalResult maximal_dense(const FiniteSpace& space, const CellFunction& f) {
  const std::size_t n = space.cell_count();
  MaximalResult res{CellFunction{std::vector<ExtReal>(n)}, std::vector<double>(n, 0.0),
                    std::vector<bool>(n, true)};
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return space.distance(i, a) < space.distance(i, b); });
    ExtReal best = f.values[i];
    double best_r = 0.0;
    ExtReal num, den;
    for (std::size_t t = 0; t < n;) {
      const double rho = space.distance(i, order[t]);
      while (t < n && space.distance(i, order[t]) == rho) {
        const Cell& c = space.cell(order[t]);
        num += c.weight * f.values[order[t]];
        den += c.weight;
        ++t;
      }
      if (rho == 0.0) continue;
      const ExtReal avg = num / den;
      if (avg > best) {
        best = avg;
        best_r = rho;
        res.attained_by_f[i] = false;
      }
    }
    res.mf.values[i] = best;
    res.argmax_radius[i] = best_r;
  }
  return res;
}

ExtReal ball_integral(const FiniteSpace& space, const Ball& ball, const CellFunction& f) {
  std::vector<ExtReal> terms;
  terms.reserve(ball.members.size());
  for (const auto& m : ball.members) {
    const ExtReal& v = f.values[m.cell];
    if (!v.is_zero()) terms.push_back(m.count_x * space.cell(m.cell).weight * v);
  }
  return sum_largest_first(std::move(terms));
}

}  // namespace

MaximalResult maximal_function(const FiniteSpace& space, const CellFunction& f) {
  if (f.values.size() != space.cell_count()) {
    throw Error(ErrorCode::MissingCell, "function does not cover every cell");
  }
  if (space.is_dense()) return maximal_dense(space, f);
  const std::size_t n = space.cell_count();
  MaximalResult res{CellFunction{std::vector<ExtReal>(n)}, std::vector<double>(n, 0.0),
                    std::vector<bool>(n, true)};
  for (std::size_t c = 0; c < n; ++c) {
    ExtReal best = f.values[c];
    double best_r = 0.0;
    for (const auto& ball : space.profile(c).balls) {
      if (ball.radius == 0.0) continue;
      const ExtReal avg = ball_integral(space, ball, f) / ball.mass;
      if (avg > best) {
        best = avg;
        best_r = ball.radius;
        res.attained_by_f[c] = false;
      }
    }
    res.mf.values[c] = best;
    res.argmax_radius[c] = best_r;
  }
  return res;
}

Decomposition prop1_decompose(const FiniteSpace& combined, const CellFunction& f) {
  const auto& info = combined.combined();
  if (!info) throw Error(ErrorCode::NotCombined, "space carries no combiner provenance");
  if (f.values.size() != combined.cell_count()) {
    throw Error(ErrorCode::MissingCell, "function does not cover every cell");
  }
  Decomposition d;
  d.local.values.resize(combined.cell_count());
  for (std::size_t k = 0; k < info->components.size(); ++k) {
    const FiniteSpace& comp = info->components[k];
    const std::size_t first = info->first_cell[k];
    CellFunction part{std::vector<ExtReal>(f.values.begin() + static_cast<std::ptrdiff_t>(first),
                                           f.values.begin() + static_cast<std::ptrdiff_t>(first + comp.cell_count()))};
    const auto local = maximal_function(comp, part);
    std::copy(local.mf.values.begin(), local.mf.values.end(),
              d.local.values.begin() + static_cast<std::ptrdiff_t>(first));
  }
  d.global = l1_norm(combined, f) / combined.total_measure();
  d.combined = maximal_function(combined, f).mf;
  for (std::size_t i = 0; i < combined.cell_count(); ++i) {
    const ExtReal rhs = max(d.local.values[i], d.global);
    d.max_rel_dev = std::max(d.max_rel_dev, ExtReal::rel_diff(d.combined.values[i], rhs));
  }
  d.holds = d.max_rel_dev <= 1e-12;
  return d;
}

CellFunction certificate_majorant(const FiniteSpace& space, const CellFunction& f) {
  if (f.values.size() != space.cell_count()) {
    throw Error(ErrorCode::MissingCell, "function does not cover every cell");
  }
  if (space.is_dense()) throw Error(ErrorCode::UnknownKind, "majorants need a generated cellular space");
  const std::size_t n = space.cell_count();
  const ExtReal glob = l1_norm(space, f) / space.total_measure();
  CellFunction out{std::vector<ExtReal>(n)};
  const ExtReal two(2.0);

  switch (space.generator()) {
    case GeneratorKind::FirstType: {
      ExtReal f0;
      for (std::size_t c = 0; c < n; ++c) {
        if (space.cell(c).has_tag("x_0")) f0 = f.values[c];
      }
      for (std::size_t c = 0; c < n; ++c) {
        const Cell& cell = space.cell(c);
        ExtReal m0;
        if (!cell.has_tag("x_0")) m0 = f0 / ExtReal::pow2(cell.tag_value("level").value_or(0));
        // The ball {x_0, x} averages to at most f(x) + f(x_0)/2^j.
        out.values[c] = max(max(f.values[c] + m0, two * m0), glob);
      }
      return out;
    }
    case GeneratorKind::FirstTypePrime: {
      const ExtReal total = l1_norm(space, f);
      for (std::size_t c = 0; c < n; ++c) {
        const auto& balls = space.profile(c).balls;
        ExtReal m0;
        if (!space.cell(c).has_tag("x_0") && balls.size() > 1) m0 = total / balls[1].mass;
        out.values[c] = max(max(f.values[c], m0), glob);
      }
      return out;
    }
    case GeneratorKind::SecondType:
    case GeneratorKind::SecondTypePrime: {
      ExtReal sup_upper;
      for (std::size_t c = 0; c < n; ++c) {
        if (space.cell(c).has_tag("upper")) sup_upper = max(sup_upper, f.values[c]);
      }
      for (std::size_t c = 0; c < n; ++c) {
        const Cell& cell = space.cell(c);
        const auto& balls = space.profile(c).balls;
        ExtReal m0;
        if (cell.has_tag("lower")) {
          m0 = sup_upper;
        } else if (balls.size() > 1) {
          std::vector<ExtReal> terms;
          for (const auto& m : balls[1].members) {
            if (space.cell(m.cell).has_tag("lower")) {
              terms.push_back(m.count_x * space.cell(m.cell).weight * f.values[m.cell]);
            }
          }
          m0 = f.values[c] + sum_largest_first(std::move(terms)) / balls[1].mass;
        }
        out.values[c] = max(max(f.values[c], m0), glob);
      }
      return out;
    }
    default:
      throw Error(ErrorCode::UnknownKind, "no majorant for generator '" + std::string(to_string(space.generator())) + "'");
  }
}

}  // namespace lmx
