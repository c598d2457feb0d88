#include "lmx/space.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace lmx {

namespace {

using RawBall = std::pair<double, std::vector<std::pair<std::size_t, BigInt>>>;
using RawProfile = std::vector<RawBall>;

std::string big_str(const BigInt& n) { return n.str(); }

std::size_t to_size(const BigInt& n, const char* what) {
  if (n < 0 || n > BigInt(std::numeric_limits<std::size_t>::max())) {
    throw Error(ErrorCode::CapExceeded, std::string(what) + " does not fit in memory");
  }
  return n.convert_to<std::size_t>();
}

// Count of `target` inside the ball of `profile` at the largest radius <= rho.
BigInt count_at(const BallProfile& profile, std::size_t target, double rho) {
  const Ball* best = nullptr;
  for (const auto& b : profile.balls) {
    if (b.radius <= rho) best = &b;
    else break;
  }
  return best ? best->count_of(target) : BigInt(0);
}

RawProfile raw_of(const BallProfile& profile) {
  RawProfile out;
  for (const auto& b : profile.balls) {
    std::vector<std::pair<std::size_t, BigInt>> members;
    for (const auto& m : b.members) members.emplace_back(m.cell, m.count);
    out.emplace_back(b.radius, std::move(members));
  }
  return out;
}

std::vector<RawProfile> raw_of(const FiniteSpace& space) {
  std::vector<RawProfile> out;
  for (const auto& p : space.profiles()) out.push_back(raw_of(p));
  return out;
}

}  // namespace

std::string_view to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::None: return "none";
    case GeneratorKind::FirstType: return "first";
    case GeneratorKind::FirstTypePrime: return "first-prime";
    case GeneratorKind::SecondType: return "second";
    case GeneratorKind::SecondTypePrime: return "second-prime";
    case GeneratorKind::Combined: return "combined";
  }
  return "none";
}

GeneratorKind generator_kind_from_string(std::string_view name) {
  for (auto k : {GeneratorKind::None, GeneratorKind::FirstType, GeneratorKind::FirstTypePrime,
                 GeneratorKind::SecondType, GeneratorKind::SecondTypePrime, GeneratorKind::Combined}) {
    if (to_string(k) == name) return k;
  }
  throw Error(ErrorCode::UnknownKind, "unknown generator kind '" + std::string(name) + "'");
}

bool Cell::has_tag(std::string_view tag) const {
  return std::find(tags.begin(), tags.end(), tag) != tags.end();
}

std::optional<long long> Cell::tag_value(std::string_view key) const {
  for (const auto& t : tags) {
    if (t.size() > key.size() && t.compare(0, key.size(), key) == 0 && t[key.size()] == '=') {
      return std::stoll(t.substr(key.size() + 1));
    }
  }
  return std::nullopt;
}

BigInt Ball::count_of(std::size_t cell) const {
  auto it = std::lower_bound(members.begin(), members.end(), cell,
                             [](const BallMember& m, std::size_t c) { return m.cell < c; });
  if (it != members.end() && it->cell == cell) return it->count;
  return BigInt(0);
}

bool ValidationReport::has(std::string_view invariant) const {
  return std::any_of(violations.begin(), violations.end(),
                     [&](const Violation& v) { return v.invariant == invariant; });
}

FiniteSpace FiniteSpace::dense(std::vector<std::string> ids, std::vector<ExtReal> weights,
                               std::vector<double> distances) {
  const std::size_t n = ids.size();
  if (weights.size() != n || distances.size() != n * n) {
    throw Error(ErrorCode::Inconsistent, "dense space: ids, weights and matrix sizes disagree");
  }
  FiniteSpace s;
  s.kind_ = SpaceKind::Dense;
  s.cells_.reserve(n);
  std::vector<ExtReal> masses;
  for (std::size_t i = 0; i < n; ++i) {
    s.cells_.push_back(Cell{std::move(ids[i]), BigInt(1), weights[i], {}, SplitRule::None});
    masses.push_back(weights[i]);
  }
  s.matrix_ = std::move(distances);
  s.total_ = sum_largest_first(std::move(masses));
  s.index_ids();
  return s;
}

FiniteSpace FiniteSpace::cellular(std::vector<Cell> cells, std::vector<RawProfile> raw_profiles) {
  const std::size_t n = cells.size();
  if (raw_profiles.size() != n) {
    throw Error(ErrorCode::Inconsistent, "cellular space: one ball profile per cell required");
  }
  FiniteSpace s;
  s.kind_ = SpaceKind::Cellular;
  s.cells_ = std::move(cells);
  s.profiles_.resize(n);
  for (std::size_t c = 0; c < n; ++c) {
    auto& raw = raw_profiles[c];
    std::stable_sort(raw.begin(), raw.end(),
                     [](const RawBall& a, const RawBall& b) { return a.first < b.first; });
    BallProfile& prof = s.profiles_[c];
    for (auto& [radius, members] : raw) {
      if (!std::isfinite(radius) || radius < 0) {
        throw Error(ErrorCode::Inconsistent, "cell " + s.cells_[c].id + ": bad radius");
      }
      Ball ball;
      ball.radius = radius;
      std::sort(members.begin(), members.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      std::vector<ExtReal> parts;
      for (auto& [idx, cnt] : members) {
        if (idx >= n) throw Error(ErrorCode::Inconsistent, "ball member index out of range");
        if (cnt < 0) throw Error(ErrorCode::Inconsistent, "negative ball count");
        if (cnt == 0) continue;
        if (!ball.members.empty() && ball.members.back().cell == idx) {
          throw Error(ErrorCode::Inconsistent, "duplicate ball member " + s.cells_[idx].id);
        }
        ExtReal cx = ExtReal::from_int(cnt);
        parts.push_back(cx * s.cells_[idx].weight);
        ball.members.push_back(BallMember{idx, std::move(cnt), cx});
      }
      ball.mass = sum_largest_first(std::move(parts));
      if (!prof.balls.empty()) {
        const Ball& prev = prof.balls.back();
        const bool same = prev.members.size() == ball.members.size() &&
                          std::equal(prev.members.begin(), prev.members.end(), ball.members.begin(),
                                     [](const BallMember& a, const BallMember& b) {
                                       return a.cell == b.cell && a.count == b.count;
                                     });
        if (same) continue;
      }
      prof.balls.push_back(std::move(ball));
    }
  }
  std::vector<ExtReal> masses;
  for (const auto& cell : s.cells_) masses.push_back(ExtReal::from_int(cell.count) * cell.weight);
  s.total_ = sum_largest_first(std::move(masses));
  s.index_ids();
  return s;
}

void FiniteSpace::index_ids() {
  id_index_.clear();
  id_index_.reserve(cells_.size());
  for (std::size_t i = 0; i < cells_.size(); ++i) id_index_.emplace_back(cells_[i].id, i);
  std::sort(id_index_.begin(), id_index_.end());
  for (std::size_t i = 1; i < id_index_.size(); ++i) {
    if (id_index_[i].first == id_index_[i - 1].first) {
      throw Error(ErrorCode::Inconsistent, "duplicate cell id " + id_index_[i].first);
    }
  }
}

std::optional<std::size_t> FiniteSpace::find_cell(std::string_view id) const {
  auto it = std::lower_bound(id_index_.begin(), id_index_.end(), id,
                             [](const auto& e, std::string_view k) { return e.first < k; });
  if (it != id_index_.end() && it->first == id) return it->second;
  return std::nullopt;
}

std::size_t FiniteSpace::cell_index(std::string_view id) const {
  if (auto i = find_cell(id)) return *i;
  throw Error(ErrorCode::MissingCell, "no cell '" + std::string(id) + "'");
}

BigInt FiniteSpace::point_count() const {
  BigInt n = 0;
  for (const auto& c : cells_) n += c.count;
  return n;
}

double FiniteSpace::diameter() const {
  double d = 0.0;
  if (is_dense()) {
    for (double x : matrix_) d = std::max(d, x);
  } else {
    for (const auto& p : profiles_) {
      if (!p.balls.empty()) d = std::max(d, p.balls.back().radius);
    }
  }
  return d;
}

FiniteSpace FiniteSpace::with_generator(GeneratorKind kind) const {
  FiniteSpace s = *this;
  s.generator_ = kind;
  return s;
}

FiniteSpace FiniteSpace::with_positional(std::shared_ptr<const PositionalModel> model) const {
  FiniteSpace s = *this;
  s.positional_ = std::move(model);
  return s;
}

FiniteSpace FiniteSpace::with_combined(std::shared_ptr<const CombinedInfo> info) const {
  FiniteSpace s = *this;
  s.combined_ = std::move(info);
  return s;
}

ValidationReport validate_space(const FiniteSpace& space) {
  ValidationReport rep;
  auto add = [&](std::string inv, std::string detail) {
    rep.violations.push_back(Violation{std::move(inv), std::move(detail)});
  };
  const auto& cells = space.cells();
  for (const auto& c : cells) {
    if (c.count < 1) add("measure", "cell " + c.id + " has count " + big_str(c.count));
    if (c.weight.is_zero()) add("measure", "cell " + c.id + " has zero weight");
  }

  if (space.is_dense()) {
    const std::size_t n = cells.size();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const double d = space.distance(i, j);
        if (!std::isfinite(d) || d < 0) {
          add("identity", "distance " + cells[i].id + "," + cells[j].id + " is not a finite nonnegative number");
        } else if ((i == j) != (d == 0.0)) {
          add("identity", "distance " + cells[i].id + "," + cells[j].id + " vanishes off the diagonal or not on it");
        }
        if (d != space.distance(j, i) && i < j) {
          add("symmetry", "d(" + cells[i].id + "," + cells[j].id + ") != d(" + cells[j].id + "," + cells[i].id + ")");
        }
      }
    }
    std::size_t triangle_reports = 0;
    for (std::size_t i = 0; i < n && triangle_reports < 8; ++i) {
      for (std::size_t k = 0; k < n && triangle_reports < 8; ++k) {
        const double dik = space.distance(i, k);
        for (std::size_t j = 0; j < n; ++j) {
          if (space.distance(i, j) > dik + space.distance(k, j)) {
            add("triangle", "d(" + cells[i].id + "," + cells[j].id + ") exceeds the path through " + cells[k].id);
            ++triangle_reports;
            break;
          }
        }
      }
    }
    return rep;
  }

  const auto& profiles = space.profiles();
  if (profiles.size() != cells.size()) {
    add("profile", "profile count differs from cell count");
    return rep;
  }
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto& balls = profiles[c].balls;
    const std::string& id = cells[c].id;
    if (balls.empty()) {
      add("profile", "cell " + id + " has no balls");
      continue;
    }
    const Ball& first = balls.front();
    if (first.radius != 0.0 || first.members.size() != 1 || first.members[0].cell != c ||
        first.members[0].count != 1) {
      add("singleton", "cell " + id + ": radius-0 ball is not the center alone");
    }
    for (std::size_t b = 0; b < balls.size(); ++b) {
      if (b > 0 && !(balls[b].radius > balls[b - 1].radius)) {
        add("radius", "cell " + id + ": radii not strictly increasing");
      }
      for (const auto& m : balls[b].members) {
        if (m.count > cells[m.cell].count) {
          add("bound", "cell " + id + ": ball holds more points of " + cells[m.cell].id + " than exist");
        }
        if (b > 0 && m.count < balls[b - 1].count_of(m.cell)) {
          add("monotone", "cell " + id + ": count of " + cells[m.cell].id + " decreases");
        }
      }
      if (b > 0) {
        for (const auto& m : balls[b - 1].members) {
          if (balls[b].count_of(m.cell) < m.count) {
            add("monotone", "cell " + id + ": " + cells[m.cell].id + " leaves a larger ball");
          }
        }
      }
    }
    const Ball& last = balls.back();
    for (std::size_t d = 0; d < cells.size(); ++d) {
      if (last.count_of(d) != cells[d].count) {
        add("coverage", "cell " + id + ": last ball misses points of " + cells[d].id);
        break;
      }
    }
    // Double counting of pairs at distance <= rho.
    for (const auto& ball : balls) {
      for (const auto& m : ball.members) {
        const BigInt back = count_at(profiles[m.cell], c, ball.radius);
        if (cells[c].count * m.count != cells[m.cell].count * back) {
          std::ostringstream os;
          os << "cells " << id << " and " << cells[m.cell].id << " disagree on pairs within radius " << ball.radius;
          add("symmetry", os.str());
        }
      }
    }
  }
  return rep;
}

std::vector<std::size_t> dense_offsets(const FiniteSpace& space) {
  std::vector<std::size_t> off;
  std::size_t acc = 0;
  for (const auto& c : space.cells()) {
    off.push_back(acc);
    acc += to_size(c.count, "cell count");
  }
  return off;
}

FiniteSpace realize_dense(const FiniteSpace& space, std::size_t point_cap) {
  if (space.is_dense()) return space;
  const BigInt total = space.point_count();
  if (total > BigInt(point_cap)) {
    throw Error(ErrorCode::CapExceeded, "space has " + big_str(total) + " points, cap is " + std::to_string(point_cap));
  }
  const auto& cells = space.cells();
  const std::size_t k = cells.size();
  const std::size_t n = total.convert_to<std::size_t>();
  const auto off = dense_offsets(space);
  std::vector<double> mat(n * n, -1.0);

  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t d = c; d < k; ++d) {
      const std::size_t C = cells[c].count.convert_to<std::size_t>();
      const std::size_t D = cells[d].count.convert_to<std::size_t>();
      std::set<double> radii;
      for (const auto& b : space.profile(c).balls) radii.insert(b.radius);
      for (const auto& b : space.profile(d).balls) radii.insert(b.radius);
      std::size_t prev_blocks = 0;
      for (double rho : radii) {
        const std::size_t ncd = count_at(space.profile(c), d, rho).convert_to<std::size_t>();
        const std::size_t ndc = count_at(space.profile(d), c, rho).convert_to<std::size_t>();
        if (C * ncd != D * ndc) {
          throw Error(ErrorCode::Inconsistent, "cells " + cells[c].id + " and " + cells[d].id + " disagree on pair counts");
        }
        if (ncd == 0) continue;
        if (D % ncd != 0 || ncd > D) {
          throw Error(ErrorCode::Inconsistent, "cells " + cells[c].id + " and " + cells[d].id + " cannot be matched in blocks");
        }
        const std::size_t blocks = D / ncd;
        if (prev_blocks != 0 && prev_blocks % blocks != 0) {
          throw Error(ErrorCode::Inconsistent, "blocks of " + cells[c].id + " and " + cells[d].id + " do not nest");
        }
        prev_blocks = blocks;
        for (std::size_t a = 0; a < C; ++a) {
          const std::size_t blk = a / ndc;
          for (std::size_t y = blk * ncd; y < (blk + 1) * ncd; ++y) {
            double& slot = mat[(off[c] + a) * n + off[d] + y];
            if (slot < 0) {
              slot = rho;
              mat[(off[d] + y) * n + off[c] + a] = rho;
            }
          }
        }
      }
    }
  }
  for (double x : mat) {
    if (x < 0) throw Error(ErrorCode::Inconsistent, "ball profiles leave a pair of points without a distance");
  }
  std::vector<std::string> ids;
  std::vector<ExtReal> weights;
  ids.reserve(n);
  for (const auto& c : cells) {
    const std::size_t C = c.count.convert_to<std::size_t>();
    for (std::size_t a = 0; a < C; ++a) {
      ids.push_back(C == 1 ? c.id : c.id + "#" + std::to_string(a));
      weights.push_back(c.weight);
    }
  }
  return FiniteSpace::dense(std::move(ids), std::move(weights), std::move(mat));
}

FiniteSpace to_cellular(const FiniteSpace& space) {
  if (!space.is_dense()) return space;
  const std::size_t n = space.cell_count();
  std::vector<Cell> cells = space.cells();
  std::vector<RawProfile> raw(n);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return space.distance(i, a) < space.distance(i, b); });
    std::vector<std::pair<std::size_t, BigInt>> members;
    for (std::size_t t = 0; t < n;) {
      const double rho = space.distance(i, order[t]);
      while (t < n && space.distance(i, order[t]) == rho) members.emplace_back(order[t++], BigInt(1));
      raw[i].emplace_back(rho, members);
    }
  }
  return FiniteSpace::cellular(std::move(cells), std::move(raw)).with_generator(space.generator());
}

namespace {

FiniteSpace split_interchangeable(const FiniteSpace& space, std::size_t c, const BigInt& gamma) {
  const auto& cells = space.cells();
  const BigInt& C = cells[c].count;
  const BigInt rest = C - gamma;
  // New indices: cells before c unchanged, c -> (c, c+1), later cells shift by one.
  auto remap = [&](std::size_t i) { return i <= c ? i : i + 1; };
  std::vector<Cell> out_cells;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i != c) {
      out_cells.push_back(cells[i]);
      continue;
    }
    Cell a = cells[i], b = cells[i];
    a.id += ":a";
    a.count = gamma;
    b.id += ":b";
    b.count = rest;
    out_cells.push_back(std::move(a));
    out_cells.push_back(std::move(b));
  }

  auto translate = [&](const BallProfile& prof, int self) {
    // self: -1 for another cell, 0 for the ":a" part, 1 for the ":b" part
    RawProfile raw;
    for (const auto& ball : prof.balls) {
      std::vector<std::pair<std::size_t, BigInt>> members;
      for (const auto& m : ball.members) {
        if (m.cell != c) {
          members.emplace_back(remap(m.cell), m.count);
          continue;
        }
        if (m.count == C) {
          members.emplace_back(c, gamma);
          members.emplace_back(c + 1, rest);
        } else if (self >= 0 && m.count == 1) {
          members.emplace_back(c + static_cast<std::size_t>(self), BigInt(1));
        } else {
          throw Error(ErrorCode::IllegalSplit, "cell " + cells[c].id + " is seen partially; its points are not interchangeable");
        }
      }
      raw.emplace_back(ball.radius, std::move(members));
    }
    return raw;
  };

  std::vector<RawProfile> raw;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i != c) {
      raw.push_back(translate(space.profile(i), -1));
    } else {
      raw.push_back(translate(space.profile(i), 0));
      raw.push_back(translate(space.profile(i), 1));
    }
  }
  return FiniteSpace::cellular(std::move(out_cells), std::move(raw)).with_generator(space.generator());
}

}  // namespace

FiniteSpace split_cell(const FiniteSpace& space, std::string_view cell_id, const BigInt& gamma) {
  if (space.is_dense()) throw Error(ErrorCode::IllegalSplit, "dense spaces have no cells to split");
  const std::size_t c = space.cell_index(cell_id);
  const Cell& cell = space.cell(c);
  if (gamma < 1 || gamma >= cell.count) {
    throw Error(ErrorCode::IllegalSplit, "gamma must lie in [1, " + big_str(cell.count) + ") for cell " + cell.id);
  }
  switch (cell.split) {
    case SplitRule::None:
      throw Error(ErrorCode::IllegalSplit, "cell " + cell.id + " declares no legal split");
    case SplitRule::Interchangeable:
      return split_interchangeable(space, c, gamma);
    case SplitRule::Positional: {
      const auto& model = space.positional();
      const auto level = cell.tag_value("level");
      if (!model || !level || model->split) {
        throw Error(ErrorCode::IllegalSplit, "cell " + cell.id + " cannot be split in this space");
      }
      PositionalModel next = *model;
      next.split = std::make_pair(static_cast<std::size_t>(*level - 1), gamma);
      return build_positional(next).with_generator(space.generator());
    }
  }
  throw Error(ErrorCode::IllegalSplit, "unknown split rule");
}

FiniteSpace scale_space(const FiniteSpace& space, double metric_factor, const ExtReal& measure_factor) {
  if (!(metric_factor > 0) || !std::isfinite(metric_factor) || measure_factor.is_zero()) {
    throw Error(ErrorCode::BadParams, "scale factors must be positive and finite");
  }
  if (space.is_dense()) {
    std::vector<std::string> ids;
    std::vector<ExtReal> weights;
    for (const auto& c : space.cells()) {
      ids.push_back(c.id);
      weights.push_back(c.weight * measure_factor);
    }
    std::vector<double> mat = space.matrix();
    for (double& x : mat) x *= metric_factor;
    return FiniteSpace::dense(std::move(ids), std::move(weights), std::move(mat)).with_generator(space.generator());
  }
  std::vector<Cell> cells = space.cells();
  for (auto& c : cells) c.weight = c.weight * measure_factor;
  auto raw = raw_of(space);
  for (auto& prof : raw) {
    for (auto& ball : prof) ball.first *= metric_factor;
  }
  FiniteSpace out = FiniteSpace::cellular(std::move(cells), std::move(raw)).with_generator(space.generator());
  if (const auto& model = space.positional()) {
    auto scaled = std::make_shared<PositionalModel>(*model);
    for (auto& w : scaled->lower_weights) w = w * measure_factor;
    for (auto& w : scaled->upper_weights) w = w * measure_factor;
    scaled->radius_scale *= metric_factor;
    out = out.with_positional(std::move(scaled));
  }
  return out;
}

FiniteSpace build_positional(const PositionalModel& model) {
  const std::size_t L = model.lower_counts.size();
  if (L == 0 || model.upper_counts.size() != L || model.lower_weights.size() != L ||
      model.upper_weights.size() != L) {
    throw Error(ErrorCode::Inconsistent, "positional model: level lists differ in length");
  }
  const BigInt H = model.lower_counts.back();
  std::vector<BigInt> step(L);
  for (std::size_t k = 0; k < L; ++k) {
    if (model.lower_counts[k] < 1 || H % model.lower_counts[k] != 0) {
      throw Error(ErrorCode::Inconsistent, "positional model: lower counts must divide the finest level");
    }
    step[k] = H / model.lower_counts[k];
    if ((model.upper_counts[k] * step[k]) % H != 0) {
      throw Error(ErrorCode::NonIntegerSplit, "positional model: upper level is not a multiple of its lower level");
    }
  }
  std::optional<BigInt> theta;
  if (model.split) {
    const auto& [level, gamma] = *model.split;
    if (level >= L || gamma < 1 || gamma >= model.lower_counts[level]) {
      throw Error(ErrorCode::IllegalSplit, "positional split out of range");
    }
    theta = gamma * step[level];
  }

  // Breakpoints (numerators over H) shared by both cells of level k.
  std::vector<std::vector<BigInt>> bps(L);
  for (std::size_t k = 0; k < L; ++k) {
    std::set<BigInt> s{BigInt(0), H};
    if (theta) {
      for (std::size_t mu = 0; mu <= k; ++mu) {
        const BigInt f = (*theta / step[mu]) * step[mu];
        s.insert(f);
        s.insert(f == *theta ? f : f + step[mu]);
      }
    }
    bps[k].assign(s.begin(), s.end());
  }

  struct Seg {
    std::size_t level;
    bool upper;
    BigInt a, b;
  };
  std::vector<Cell> cells;
  std::vector<Seg> segs;
  for (int upper = 0; upper < 2; ++upper) {
    for (std::size_t k = 0; k < L; ++k) {
      const auto& bp = bps[k];
      const std::size_t parts = bp.size() - 1;
      const std::string base = (upper ? "T°_" : "T_") + std::to_string(k + 1);
      for (std::size_t s = 0; s < parts; ++s) {
        Cell cell;
        cell.id = parts == 1 ? base : base + ":" + std::to_string(s);
        const BigInt len = bp[s + 1] - bp[s];
        const BigInt& per_level = upper ? model.upper_counts[k] : model.lower_counts[k];
        cell.count = len * per_level / H;
        cell.weight = upper ? model.upper_weights[k] : model.lower_weights[k];
        cell.tags = {upper ? "upper" : "lower", "level=" + std::to_string(k + 1), base};
        if (parts > 1) cell.tags.push_back("part=" + std::to_string(s));
        if (theta && !upper && model.split->first == k) {
          cell.tags.push_back(bp[s] < *theta ? "split=in" : "split=out");
        }
        cell.split = (!upper && !theta) ? SplitRule::Positional : SplitRule::None;
        cells.push_back(std::move(cell));
        segs.push_back(Seg{k, upper != 0, bp[s], bp[s + 1]});
      }
    }
  }

  auto overlap = [](const BigInt& a, const BigInt& b, const BigInt& c, const BigInt& d) {
    const BigInt lo = std::max(a, c), hi = std::min(b, d);
    return hi > lo ? BigInt(hi - lo) : BigInt(0);
  };

  const std::size_t n = cells.size();
  std::vector<RawProfile> raw(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Seg& si = segs[i];
    std::vector<std::pair<std::size_t, BigInt>> near{{i, BigInt(1)}};
    for (std::size_t j = 0; j < n; ++j) {
      const Seg& sj = segs[j];
      if (si.upper == sj.upper) continue;
      if (!si.upper) {
        if (sj.level < si.level) continue;
        // Each lower point owns one interval of length step; count its upper neighbours.
        const BigInt first = overlap(si.a, si.a + step[si.level], sj.a, sj.b);
        const BigInt last = overlap(si.b - step[si.level], si.b, sj.a, sj.b);
        if (first != last) throw Error(ErrorCode::Inconsistent, "positional segment is not homogeneous");
        const BigInt num = first * model.upper_counts[sj.level];
        if (num % H != 0) throw Error(ErrorCode::NonIntegerSplit, "fractional neighbour count");
        if (num != 0) near.emplace_back(j, num / H);
      } else {
        if (sj.level > si.level) continue;
        if (sj.a <= si.a && si.b <= sj.b) {
          near.emplace_back(j, BigInt(1));
        } else if (overlap(si.a, si.b, sj.a, sj.b) != 0) {
          throw Error(ErrorCode::Inconsistent, "upper segment straddles a lower segment boundary");
        }
      }
    }
    std::vector<std::pair<std::size_t, BigInt>> all;
    for (std::size_t j = 0; j < n; ++j) all.emplace_back(j, cells[j].count);
    raw[i].emplace_back(0.0, std::vector<std::pair<std::size_t, BigInt>>{{i, BigInt(1)}});
    raw[i].emplace_back(model.radius_scale, std::move(near));
    raw[i].emplace_back(2.0 * model.radius_scale, std::move(all));
  }
  return FiniteSpace::cellular(std::move(cells), std::move(raw))
      .with_positional(std::make_shared<PositionalModel>(model));
}

}  // namespace lmx
