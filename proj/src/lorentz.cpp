#include "lmx/lorentz.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace lmx {

namespace {

void check_exponents(double p, double q) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw Error(ErrorCode::BadExponent, "p must lie in [1, inf)");
  if (!(q >= 1.0)) throw Error(ErrorCode::BadExponent, "q must lie in [1, inf]");
}

std::string fmt_exp(double x) {
  if (std::isinf(x)) return "inf";
  std::ostringstream os;
  os << x;
  return os.str();
}

}  // namespace

CellFunction CellFunction::constant(const FiniteSpace& space, const ExtReal& c) {
  return CellFunction{std::vector<ExtReal>(space.cell_count(), c)};
}

CellFunction CellFunction::indicator(const FiniteSpace& space, const std::vector<std::string>& ids) {
  CellFunction f{std::vector<ExtReal>(space.cell_count())};
  for (const auto& id : ids) f.values[space.cell_index(id)] = ExtReal::one();
  return f;
}

CellFunction CellFunction::from_map(const FiniteSpace& space, const std::map<std::string, ExtReal>& values) {
  CellFunction f{std::vector<ExtReal>(space.cell_count())};
  std::vector<bool> seen(space.cell_count(), false);
  for (const auto& [id, v] : values) {
    const std::size_t i = space.cell_index(id);
    f.values[i] = v;
    seen[i] = true;
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i]) throw Error(ErrorCode::MissingCell, "function has no value for cell " + space.cell(i).id);
  }
  return f;
}

std::map<std::string, ExtReal> CellFunction::to_map(const FiniteSpace& space) const {
  std::map<std::string, ExtReal> out;
  for (std::size_t i = 0; i < values.size(); ++i) out.emplace(space.cell(i).id, values[i]);
  return out;
}

std::vector<ExtReal> DistributionProfile::cumulative() const {
  std::vector<ExtReal> w;
  ExtReal acc;
  for (const auto& l : levels) {
    acc += l.mass;
    w.push_back(acc);
  }
  return w;
}

ExtReal DistributionProfile::distribution(const ExtReal& t) const {
  ExtReal acc;
  for (const auto& l : levels) {
    if (!(l.value > t)) break;
    acc += l.mass;
  }
  return acc;
}

ExtReal DistributionProfile::rearrangement(const ExtReal& t) const {
  ExtReal acc;
  for (const auto& l : levels) {
    acc += l.mass;
    if (t < acc) return l.value;
  }
  return ExtReal();
}

void AdmissibleTriple::check() const {
  const bool l1 = p == 1.0 && q == 1.0 && r >= 1.0;
  const bool lorentz = p > 1.0 && std::isfinite(p) && q >= 1.0 && q <= r;
  if (!l1 && !lorentz) throw Error(ErrorCode::BadTriple, "triple " + str() + " is not admissible");
}

std::string AdmissibleTriple::str() const {
  return "(" + fmt_exp(p) + "," + fmt_exp(q) + "," + fmt_exp(r) + ")";
}

DistributionProfile distribution_profile(const FiniteSpace& space, const CellFunction& f) {
  if (f.values.size() != space.cell_count()) {
    throw Error(ErrorCode::MissingCell, "function covers " + std::to_string(f.values.size()) + " of " +
                                            std::to_string(space.cell_count()) + " cells");
  }
  std::vector<std::size_t> order(f.values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return f.values[b] < f.values[a]; });
  DistributionProfile prof;
  for (std::size_t k = 0; k < order.size();) {
    const ExtReal v = f.values[order[k]];
    if (v.is_zero()) break;
    std::vector<ExtReal> parts;
    while (k < order.size() && f.values[order[k]] == v) {
      const Cell& c = space.cell(order[k]);
      parts.push_back(ExtReal::from_int(c.count) * c.weight);
      ++k;
    }
    prof.levels.push_back(Level{v, sum_largest_first(std::move(parts))});
  }
  return prof;
}

std::pair<ExtReal, ExtReal> lorentz_norm_forms(const DistributionProfile& profile, double p, double q) {
  check_exponents(p, q);
  if (std::isinf(q)) throw Error(ErrorCode::BadExponent, "closed forms need q < inf");
  if (profile.levels.empty()) return {ExtReal(), ExtReal()};
  const auto W = profile.cumulative();
  const long double qp = static_cast<long double>(q) / p;
  const std::size_t m = profile.levels.size();
  std::vector<ExtReal> df_terms, fs_terms;
  for (std::size_t i = 0; i < m; ++i) {
    const ExtReal& v = profile.levels[i].value;
    const ExtReal next = i + 1 < m ? profile.levels[i + 1].value : ExtReal();
    df_terms.push_back(W[i].pow(qp) * pow_diff(v, next, q));
    const ExtReal prev = i > 0 ? W[i - 1] : ExtReal();
    fs_terms.push_back(v.pow(q) * pow_diff(W[i], prev, qp));
  }
  const ExtReal scale = ExtReal(p / q).pow(1.0L / q);
  return {scale * sum_largest_first(std::move(df_terms)).pow(1.0L / q),
          scale * sum_largest_first(std::move(fs_terms)).pow(1.0L / q)};
}

ExtReal lorentz_norm(const DistributionProfile& profile, double p, double q) {
  check_exponents(p, q);
  if (profile.levels.empty()) return ExtReal();
  if (std::isinf(q)) {
    const auto W = profile.cumulative();
    ExtReal best;
    for (std::size_t i = 0; i < W.size(); ++i) {
      best = max(best, profile.levels[i].value * W[i].pow(1.0L / p));
    }
    return best;
  }
  const auto [df, fs] = lorentz_norm_forms(profile, p, q);
  if (ExtReal::rel_diff(df, fs) > std::ldexp(1.0, -40)) {
    throw Error(ErrorCode::Inconsistent, "Lorentz norm closed forms disagree: " + df.str() + " vs " + fs.str());
  }
  return df;
}

ExtReal lorentz_norm(const FiniteSpace& space, const CellFunction& f, double p, double q) {
  return lorentz_norm(distribution_profile(space, f), p, q);
}

ExtReal l1_norm(const DistributionProfile& profile) {
  std::vector<ExtReal> terms;
  for (const auto& l : profile.levels) terms.push_back(l.value * l.mass);
  return sum_largest_first(std::move(terms));
}

ExtReal l1_norm(const FiniteSpace& space, const CellFunction& f) {
  return l1_norm(distribution_profile(space, f));
}

}  // namespace lmx
