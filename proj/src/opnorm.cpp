#include "lmx/opnorm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "lmx/maximal.hpp"
#include "lmx/sequences.hpp"

namespace lmx {

namespace {

constexpr double kTie = 1e-12;
constexpr long double kNegInf = -std::numeric_limits<long double>::infinity();

bool better(const ExtReal& candidate, const ExtReal& incumbent) {
  return candidate > incumbent * ExtReal(1.0 + kTie);
}

bool is_zero_function(const CellFunction& f) {
  return std::all_of(f.values.begin(), f.values.end(), [](const ExtReal& v) { return v.is_zero(); });
}

// Running maximum over candidates with the first-wins tie rule.
struct Tracker {
  ConstantEstimate est;
  bool any = false;

  void offer(Witness w, bool counted = false) {
    if (!counted) ++est.evaluations;
    if (!any || better(w.ratio, est.lower)) {
      est.lower = w.ratio;
      est.best = std::move(w);
      any = true;
    }
  }
};

Witness indicator_witness(const FiniteSpace& space, const std::vector<std::string>& ids,
                          const AdmissibleTriple& t, std::string method, std::string label) {
  Witness w;
  w.f = CellFunction::indicator(space, ids);
  w.ratio = witness_ratio(space, w.f, t);
  w.space = space;
  w.method = std::move(method);
  w.label = std::move(label);
  return w;
}

std::string join(const std::vector<std::string>& parts) {
  std::string s = "{";
  for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? "," : "") + parts[i];
  return s + "}";
}

bool has_positional_split(const FiniteSpace& space) {
  if (!space.positional()) return false;
  return std::any_of(space.cells().begin(), space.cells().end(),
                     [](const Cell& c) { return c.split == SplitRule::Positional; });
}

// Initial segments of each splittable lower level, cut at the grid positions.
template <typename Visit>
void for_each_level_split(const FiniteSpace& space, Visit visit) {
  if (!has_positional_split(space)) return;
  for (const auto& cell : space.cells()) {
    if (cell.split != SplitRule::Positional) continue;
    for (const auto& gamma : split_grid(cell.count)) {
      const FiniteSpace s = split_cell(space, cell.id, gamma);
      std::vector<std::string> in;
      for (const auto& c : s.cells()) {
        if (c.has_tag("split=in")) in.push_back(c.id);
      }
      visit(s, in, cell.id + "[0," + gamma.str() + ")");
    }
  }
}

std::uint64_t level_split_count(const FiniteSpace& space) {
  std::uint64_t n = 0;
  if (!has_positional_split(space)) return 0;
  for (const auto& cell : space.cells()) {
    if (cell.split == SplitRule::Positional) n += split_grid(cell.count).size();
  }
  return n;
}

[[noreturn]] void over_budget(std::uint64_t budget) {
  throw Error(ErrorCode::BudgetExceeded, "candidate family exceeds the budget of " + std::to_string(budget));
}

ConstantEstimate dense_subsets(const FiniteSpace& space, const AdmissibleTriple& t, std::uint64_t budget) {
  const std::size_t n = space.cell_count();
  if (n >= 63 || (std::uint64_t{1} << n) - 1 > budget) over_budget(budget);
  Tracker tr;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask >> i & 1) ids.push_back(space.cell(i).id);
    }
    tr.offer(indicator_witness(space, ids, t, "subset", join(ids)));
  }
  tr.est.exact = true;
  return tr.est;
}

ConstantEstimate positional_family(const FiniteSpace& space, const AdmissibleTriple& t, std::uint64_t budget) {
  const std::size_t n = space.cell_count();
  const std::uint64_t splits = level_split_count(space);
  if (n >= 63 || (std::uint64_t{1} << n) - 1 > budget || (std::uint64_t{1} << n) - 1 + splits > budget) {
    over_budget(budget);
  }
  Tracker tr;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask >> i & 1) ids.push_back(space.cell(i).id);
    }
    tr.offer(indicator_witness(space, ids, t, "subset", join(ids)));
  }
  for_each_level_split(space, [&](const FiniteSpace& s, const std::vector<std::string>& in, const std::string& label) {
    tr.offer(indicator_witness(s, in, t, "split", label));
  });
  return tr.est;
}

// Mixed-radix enumeration of how many points each cell contributes.
ConstantEstimate cellular_counts(const FiniteSpace& space, const AdmissibleTriple& t, std::uint64_t budget) {
  const std::size_t n = space.cell_count();
  std::vector<std::uint64_t> radix(n);
  bool exhaustive = true;
  long double family = 1;
  for (std::size_t i = 0; i < n; ++i) {
    const Cell& c = space.cell(i);
    if (c.split == SplitRule::Interchangeable && c.count > 1) {
      if (c.count > BigInt(budget)) over_budget(budget);
      radix[i] = static_cast<std::uint64_t>(c.count) + 1;
    } else {
      radix[i] = 2;
      if (c.count > 1) exhaustive = false;
    }
    family *= static_cast<long double>(radix[i]);
    if (family - 1 > static_cast<long double>(budget)) over_budget(budget);
  }
  Tracker tr;
  std::vector<std::uint64_t> digit(n, 0);
  while (true) {
    std::size_t i = 0;
    while (i < n && ++digit[i] == radix[i]) digit[i++] = 0;
    if (i == n) break;
    FiniteSpace s = space;
    std::vector<std::string> ids, parts;
    for (std::size_t c = 0; c < n; ++c) {
      if (digit[c] == 0) continue;
      const Cell& cell = space.cell(c);
      const BigInt gamma = radix[c] == 2 ? cell.count : BigInt(digit[c]);
      if (gamma == cell.count) {
        ids.push_back(cell.id);
        parts.push_back(cell.id);
      } else {
        s = split_cell(s, cell.id, gamma);
        ids.push_back(cell.id + ":a");
        parts.push_back(cell.id + "x" + gamma.str());
      }
    }
    tr.offer(indicator_witness(s, ids, t, s.cell_count() == n ? "subset" : "split", join(parts)));
  }
  tr.est.exact = exhaustive;
  return tr.est;
}

AdmissibleTriple restricted_triple(double p, double r) {
  AdmissibleTriple t{p, 1.0, r};
  t.check();
  return t;
}

// Uniform double in [0,1) from the raw generator, identical on every platform.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1p-53; }

CellFunction from_logs(const std::vector<long double>& lv) {
  CellFunction f;
  for (auto x : lv) f.values.push_back(std::isinf(x) ? ExtReal::zero() : ExtReal::from_log2(x));
  return f;
}

std::vector<long double> to_logs(const CellFunction& f) {
  std::vector<long double> lv;
  for (const auto& v : f.values) lv.push_back(v.is_zero() ? kNegInf : v.log2());
  return lv;
}

}  // namespace

ExtReal witness_ratio(const FiniteSpace& space, const CellFunction& f, const AdmissibleTriple& triple) {
  triple.check();
  if (f.values.size() != space.cell_count()) throw Error(ErrorCode::Inconsistent, "function does not match the space");
  if (is_zero_function(f)) throw Error(ErrorCode::ZeroFunction, "witness function vanishes identically");
  const MaximalResult m = maximal_function(space, f);
  return lorentz_norm(space, m.mf, triple.p, triple.r) / lorentz_norm(space, f, triple.p, triple.q);
}

ExtReal recheck(const Witness& w, const AdmissibleTriple& triple) { return witness_ratio(w.space, w.f, triple); }

std::vector<BigInt> split_grid(const BigInt& count) {
  std::vector<BigInt> g;
  if (count <= 1) return g;
  if (count <= 64) {
    for (BigInt k = 1; k < count; ++k) g.push_back(k);
    return g;
  }
  const unsigned top = static_cast<unsigned>(msb(BigInt(count - 1)));
  std::vector<unsigned> exps;
  constexpr unsigned kSteps = 24;
  if (top <= kSteps) {
    for (unsigned k = 0; k <= top; ++k) exps.push_back(k);
  } else {
    for (unsigned i = 0; i <= kSteps; ++i) exps.push_back(static_cast<unsigned>((std::uint64_t{i} * top + kSteps / 2) / kSteps));
  }
  for (unsigned k : exps) {
    const BigInt a = BigInt(1) << k;
    if (a < count) g.push_back(a);
    if (count - a >= 1) g.push_back(count - a);
  }
  g.push_back(count / 2);
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

ConstantEstimate restricted_constant_exact(const FiniteSpace& space, double p, double r, std::uint64_t subset_budget) {
  const AdmissibleTriple t = restricted_triple(p, r);
  ConstantEstimate est;
  if (space.is_dense()) {
    est = dense_subsets(space, t, subset_budget);
  } else if (space.positional()) {
    est = positional_family(space, t, subset_budget);
  } else {
    est = cellular_counts(space, t, subset_budget);
  }
  est.triple = t;
  return est;
}

ConstantEstimate restricted_single_level(const FiniteSpace& space, double p, double r) {
  const AdmissibleTriple t = restricted_triple(p, r);
  Tracker tr;
  for (const auto& c : space.cells()) tr.offer(indicator_witness(space, {c.id}, t, "subset", c.id));
  for_each_level_split(space, [&](const FiniteSpace& s, const std::vector<std::string>& in, const std::string& label) {
    tr.offer(indicator_witness(s, in, t, "split", label));
  });
  if (!space.positional() && !space.is_dense()) {
    for (const auto& c : space.cells()) {
      if (c.split != SplitRule::Interchangeable) continue;
      for (const auto& gamma : split_grid(c.count)) {
        const FiniteSpace s = split_cell(space, c.id, gamma);
        tr.offer(indicator_witness(s, {c.id + ":a"}, t, "split", c.id + "x" + gamma.str()));
      }
    }
  }
  tr.est.triple = t;
  return tr.est;
}

std::vector<Witness> builtin_witnesses(const FiniteSpace& space, const AdmissibleTriple& triple) {
  std::vector<Witness> out;
  auto add = [&](CellFunction f, std::string label) {
    Witness w;
    w.ratio = witness_ratio(space, f, triple);
    w.f = std::move(f);
    w.space = space;
    w.method = "builtin";
    w.label = std::move(label);
    out.push_back(std::move(w));
  };
  add(CellFunction::constant(space, ExtReal::one()), "chi_X");
  if (space.find_cell("x_0")) add(CellFunction::indicator(space, {"x_0"}), "chi_{x_0}");
  if (const auto& model = space.positional()) {
    CellFunction g = CellFunction::constant(space, ExtReal::zero());
    for (std::size_t c = 0; c < space.cell_count(); ++c) {
      const Cell& cell = space.cell(c);
      const auto level = cell.tag_value("level");
      if (cell.has_tag("lower") && level) {
        g.values[c] = ExtReal::one() / model->lower_weights.at(static_cast<std::size_t>(*level - 1));
      }
    }
    add(std::move(g), "sum_i chi_{T_i}/m_i");
  }
  constexpr std::size_t kSingleCells = 64;
  if (space.cell_count() <= kSingleCells) {
    for (const auto& c : space.cells()) add(CellFunction::indicator(space, {c.id}), "chi_{" + c.id + "}");
  }
  return out;
}

ConstantEstimate search_constant(const FiniteSpace& space, const AdmissibleTriple& triple, std::uint64_t budget,
                                 std::uint64_t seed) {
  triple.check();
  Tracker tr;
  for (auto& w : builtin_witnesses(space, triple)) tr.offer(std::move(w));
  tr.est.triple = triple;
  if (budget == 0) return tr.est;

  const std::size_t n = space.cell_count();
  std::mt19937_64 rng(seed);
  std::uint64_t left = budget;
  constexpr int kRestarts = 4;

  auto evaluate = [&](const std::vector<long double>& lv, ExtReal& out) {
    CellFunction f = from_logs(lv);
    if (is_zero_function(f)) return false;
    --left;
    out = witness_ratio(space, f, triple);
    ++tr.est.evaluations;
    return true;
  };

  for (int restart = 0; restart < kRestarts && left > 0; ++restart) {
    std::uint64_t quota = restart + 1 == kRestarts ? left : std::min<std::uint64_t>(left, budget / kRestarts);
    const std::uint64_t stop = left - quota;
    std::vector<long double> lv;
    if (restart == 0) {
      lv = to_logs(tr.est.best.f);
    } else {
      lv.resize(n);
      for (auto& x : lv) x = unit(rng) < 0.25 ? kNegInf : -8.0L * unit(rng);
      if (std::all_of(lv.begin(), lv.end(), [](long double x) { return std::isinf(x); })) lv[rng() % n] = 0;
    }
    ExtReal cur;
    if (!evaluate(lv, cur)) continue;
    long double step = 4;
    while (step >= 1.0L / 64 && left > stop) {
      bool improved = false;
      for (std::size_t c = 0; c < n && left > stop; ++c) {
        long double top = kNegInf;
        for (auto x : lv) top = std::max(top, x);
        std::vector<long double> moves;
        if (std::isinf(lv[c])) {
          moves = {top, top - step};
        } else {
          moves = {lv[c] + step, lv[c] - step, kNegInf};
        }
        for (long double mv : moves) {
          if (left <= stop) break;
          std::vector<long double> trial = lv;
          trial[c] = mv;
          ExtReal val;
          if (!evaluate(trial, val)) continue;
          if (better(val, cur)) {
            cur = val;
            lv = std::move(trial);
            improved = true;
          }
        }
      }
      if (!improved) step /= 2;
    }
    Witness w;
    w.f = from_logs(lv);
    w.ratio = cur;
    w.space = space;
    w.method = "search";
    w.label = "ascent restart " + std::to_string(restart);
    tr.offer(std::move(w), true);
  }
  return tr.est;
}

ExtReal lemma_formula(LemmaKind kind, const std::vector<BigInt>& params, double p, double r) {
  if (params.empty()) throw Error(ErrorCode::BadParams, "empty sequence");
  for (const auto& m : params) {
    if (m < 1) throw Error(ErrorCode::BadParams, "sequence entries must be positive");
  }
  if (!(p >= 1) || std::isinf(p) || !(r >= 1)) throw Error(ErrorCode::BadParams, "need 1 <= p < inf and r >= 1");
  const bool r_inf = std::isinf(r);
  if (kind == LemmaKind::L1) {
    std::vector<ExtReal> terms;
    long double best = kNegInf;
    for (std::size_t j = 1; j <= params.size(); ++j) {
      const long double base = static_cast<long double>(j) * (1.0L / p - 1.0L) + log2_big(params[j - 1]) / p;
      if (r_inf) {
        best = std::max(best, base);
      } else {
        terms.push_back(ExtReal::from_log2(base * r));
      }
    }
    if (r_inf) return ExtReal::from_log2(best);
    return sum_largest_first(std::move(terms)).pow(1.0L / r);
  }
  const std::size_t l = params.size();
  if (l == 1) return ExtReal::zero();
  if (r_inf) return ExtReal::one();
  std::vector<ExtReal> terms;
  for (std::size_t j = 0; j + 1 < l; ++j) terms.push_back(ExtReal::from_log2(-r * log2_big(params[j])));
  return sum_largest_first(std::move(terms)).pow(1.0L / r);
}

TrendReport trend_fit(const std::vector<TrendPoint>& points) {
  if (points.size() < 3) throw Error(ErrorCode::DegenerateSweep, "need at least 3 sweep points");
  TrendReport rep;
  std::vector<long double> x, y;
  for (const auto& pt : points) {
    if (pt.estimate.is_zero() || pt.formula.is_zero()) {
      throw Error(ErrorCode::DegenerateSweep, "sweep values must be positive");
    }
    TrendRow row{pt.parameter, pt.estimate, pt.formula, (pt.estimate / pt.formula).to_double()};
    rep.rows.push_back(row);
    x.push_back(pt.formula.log2());
    y.push_back(pt.estimate.log2());
  }
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  if (*hi - *lo < 1e-9L * std::max(1.0L, std::fabs(*hi))) {
    throw Error(ErrorCode::DegenerateSweep, "formula is constant over the sweep");
  }
  long double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  long double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  rep.slope = static_cast<double>(sxy / sxx);
  double rmin = rep.rows[0].ratio, rmax = rmin;
  for (const auto& row : rep.rows) {
    rmin = std::min(rmin, row.ratio);
    rmax = std::max(rmax, row.ratio);
  }
  rep.band = rmax / rmin;
  return rep;
}

}  // namespace lmx
