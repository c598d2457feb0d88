#include "lmx/generators.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "lmx/lorentz.hpp"

namespace lmx {

namespace {

using Members = std::vector<std::pair<std::size_t, BigInt>>;
using RawProfile = std::vector<std::pair<double, Members>>;

std::string show(const BigInt& n) {
  if (n < BigInt(1) << 64) return n.str();
  std::ostringstream os;
  os.precision(12);
  os << "2^" << static_cast<double>(log2_big(n));
  return os.str();
}

std::string show_pow(const std::vector<Power>& ps) {
  std::ostringstream os;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (i) os << "*";
    os << show(ps[i].base);
    if (ps[i].exponent != 1.0) os << "^" << ps[i].exponent;
  }
  return os.str();
}

void check_sequence(const std::vector<BigInt>& m, const char* name) {
  if (m.empty()) throw Error(ErrorCode::BadSequence, std::string(name) + " is empty");
  for (std::size_t j = 0; j < m.size(); ++j) {
    if (m[j] < 1) throw Error(ErrorCode::BadSequence, std::string(name) + " has a nonpositive entry");
    if (j > 0 && m[j] < m[j - 1]) throw Error(ErrorCode::BadSequence, std::string(name) + " is not non-decreasing");
  }
}

ConstraintCheck check_ge(std::string id, const std::vector<Power>& lhs, const std::vector<Power>& rhs) {
  return {std::move(id), powers_ge(lhs, rhs), show_pow(lhs) + " >= " + show_pow(rhs)};
}

ConstraintCheck check_gt(std::string id, const std::vector<Power>& lhs, const std::vector<Power>& rhs) {
  return {std::move(id), powers_gt(lhs, rhs), show_pow(lhs) + " > " + show_pow(rhs)};
}

std::string idx(const char* tag, std::size_t i) { return std::string(tag) + " i=" + std::to_string(i + 1); }

// Exponent of l in the upper weights of the r < inf construction.
double level_exponent(double p, double r) { return p / ((p - 1) * r); }

void check_second_triple(double p, double q, double r) {
  if (!(p > 1) || !std::isfinite(p) || !(q > 1) || !(q <= r) || !std::isfinite(r)) {
    std::ostringstream os;
    os << "(" << p << "," << q << "," << r << ") needs 1 < p < inf and 1 < q <= r < inf";
    throw Error(ErrorCode::BadTriple, os.str());
  }
}

// m and h shared by both second-type constructions: m_1 = h_1 = 1,
// m_{i+1} >= 2 m_i h_i minimal with ceil(m^{p-1}) >= h_i, h_{i+1} the least
// multiple of h_i with m^{p-1} <= h < 2 m^{p-1}.
void synth_mh(double p, std::size_t l, SequencePlan& plan) {
  const double e = p - 1;
  plan.m = {BigInt(1)};
  plan.h = {BigInt(1)};
  for (std::size_t i = 0; i + 1 < l; ++i) {
    const BigInt& mi = plan.m[i];
    const BigInt& hi = plan.h[i];
    BigInt m = 2 * mi * hi;
    if (hi > 1) {
      // ceil(m^{p-1}) >= h_i  <=>  m^{p-1} > h_i - 1
      BigInt need = ceil_quotient({{hi - 1, 1.0 / e}}, {});
      if (powers_gt({{need, e}}, {{hi - 1, 1.0}}) != Status::Holds) ++need;
      if (need > m) m = need;
    }
    for (int tries = 0;; ++tries) {
      if (tries > 1000) throw Error(ErrorCode::Infeasible, "no m within budget at level " + std::to_string(i + 2));
      const BigInt k = ceil_quotient({{m, e}}, {{hi, 1.0}});
      const BigInt h = k * hi;
      if (powers_gt({{BigInt(2), 1.0}, {m, e}}, {{h, 1.0}}) == Status::Holds &&
          powers_ge({{h, 1.0}}, {{m, e}}) == Status::Holds) {
        plan.m.push_back(m);
        plan.h.push_back(h);
        break;
      }
      ++m;
    }
  }
}

void certify_mh(const SequencePlan& plan, std::vector<ConstraintCheck>& out, const char* prime) {
  const double e = plan.p - 1;
  const std::size_t l = plan.l;
  auto name = [&](const char* roman) { return std::string("(") + roman + prime + ")"; };
  for (std::size_t i = 0; i + 1 < l; ++i) {
    const bool divides = plan.h[i + 1] % plan.h[i] == 0;
    out.push_back({idx(name("i").c_str(), i), divides ? Status::Holds : Status::Fails,
                   show(plan.h[i + 1]) + " / " + show(plan.h[i])});
    out.push_back(check_ge(idx(name("ii").c_str(), i), {{plan.m[i + 1], 1.0}},
                           {{BigInt(2), 1.0}, {plan.m[i], 1.0}, {plan.h[i], 1.0}}));
  }
  for (std::size_t i = 0; i < l; ++i) {
    out.push_back(check_ge(idx(name("iii").c_str(), i) + " lower", {{plan.h[i], 1.0}}, {{plan.m[i], e}}));
    out.push_back(check_gt(idx(name("iii").c_str(), i) + " upper", {{BigInt(2), 1.0}, {plan.m[i], e}},
                           {{plan.h[i], 1.0}}));
  }
}

}  // namespace

std::string_view to_string(PlanKind kind) {
  switch (kind) {
    case PlanKind::First: return "first";
    case PlanKind::FirstPrime: return "first-prime";
    case PlanKind::Second: return "second";
    case PlanKind::SecondPrime: return "second-prime";
  }
  return "first";
}

PlanKind plan_kind_from_string(std::string_view name) {
  for (auto k : {PlanKind::First, PlanKind::FirstPrime, PlanKind::Second, PlanKind::SecondPrime}) {
    if (to_string(k) == name) return k;
  }
  throw Error(ErrorCode::UnknownKind, "unknown plan kind '" + std::string(name) + "'");
}

bool SequencePlan::certified() const {
  if (certificate.empty()) return false;
  for (const auto& c : certificate) {
    if (c.status != Status::Holds) return false;
  }
  return true;
}

std::string SequencePlan::failures() const {
  std::string out;
  for (const auto& c : certificate) {
    if (c.status != Status::Holds) {
      out += c.id + " " + std::string(to_string(c.status)) + ": " + c.witness + "\n";
    }
  }
  return out;
}

std::vector<ConstraintCheck> certify(const SequencePlan& plan) {
  std::vector<ConstraintCheck> out;
  const std::size_t l = plan.l;
  auto sized = [&](const std::vector<BigInt>& v) { return v.size() == l; };
  switch (plan.kind) {
    case PlanKind::First: {
      out.push_back({"length", sized(plan.m) && l >= 1 ? Status::Holds : Status::Fails, std::to_string(plan.m.size())});
      for (std::size_t j = 0; j < plan.m.size(); ++j) {
        const bool ok = plan.m[j] >= 1 && (j == 0 || plan.m[j] >= plan.m[j - 1]);
        out.push_back({"non-decreasing j=" + std::to_string(j + 1), ok ? Status::Holds : Status::Fails, show(plan.m[j])});
      }
      break;
    }
    case PlanKind::FirstPrime: {
      out.push_back({"length", sized(plan.m) && sized(plan.h) && l >= 1 ? Status::Holds : Status::Fails,
                     std::to_string(plan.m.size())});
      if (!sized(plan.m) || !sized(plan.h)) break;
      out.push_back({"m'_1 = 1", plan.m[0] == 1 ? Status::Holds : Status::Fails, show(plan.m[0])});
      for (std::size_t j = 0; j < l; ++j) {
        const bool ok = plan.m[j] >= 1 && (j == 0 || plan.m[j] >= plan.m[j - 1]);
        out.push_back({"non-decreasing j=" + std::to_string(j + 1), ok ? Status::Holds : Status::Fails, show(plan.m[j])});
        out.push_back({"h positive j=" + std::to_string(j + 1), plan.h[j] >= 1 ? Status::Holds : Status::Fails, show(plan.h[j])});
      }
      for (std::size_t j = 0; j + 1 < l; ++j) {
        const bool inc = plan.h[j + 1] > plan.h[j];
        out.push_back({"h increasing j=" + std::to_string(j + 1), inc ? Status::Holds : Status::Fails,
                       show(plan.h[j]) + " < " + show(plan.h[j + 1])});
        if (!inc || plan.h[j + 1] > 1000000) continue;
        const BigInt lhs = (BigInt(1) << plan.h[j + 1].convert_to<unsigned>()) / plan.m[j + 1];
        const BigInt rhs = BigInt(1) << plan.h[j].convert_to<unsigned>();
        out.push_back({"(3) j=" + std::to_string(j + 1), lhs > rhs ? Status::Holds : Status::Fails,
                       "floor(2^" + show(plan.h[j + 1]) + "/" + show(plan.m[j + 1]) + ") = " + show(lhs) + " > " + show(rhs)});
      }
      break;
    }
    case PlanKind::Second: {
      const bool shape = l >= 1 && sized(plan.m) && sized(plan.h) && sized(plan.alpha) && sized(plan.beta);
      out.push_back({"length", shape ? Status::Holds : Status::Fails, std::to_string(l)});
      if (!shape) break;
      const double e = plan.p - 1;
      certify_mh(plan, out, "");
      out.push_back(check_ge("(iv)", {{BigInt(l), level_exponent(plan.p, plan.r)}, {plan.alpha[0], 1.0}},
                             {{BigInt(2), 1.0}, {plan.m[l - 1], 1.0}, {plan.h[l - 1], 1.0}}));
      for (std::size_t i = 0; i + 1 < l; ++i) {
        out.push_back(check_ge(idx("(v)", i), {{plan.alpha[i + 1], 1.0}},
                               {{BigInt(2), 1.0}, {plan.alpha[i], 1.0}, {plan.beta[i], 1.0}}));
      }
      for (std::size_t i = 0; i < l; ++i) {
        out.push_back(check_ge(idx("(vi)", i) + " lower", {{plan.beta[i], 1.0}, {plan.h[i], 1.0}}, {{plan.alpha[i], e}}));
        out.push_back(check_gt(idx("(vi)", i) + " upper", {{BigInt(2), 1.0}, {plan.alpha[i], e}},
                               {{plan.beta[i], 1.0}, {plan.h[i], 1.0}}));
      }
      break;
    }
    case PlanKind::SecondPrime: {
      const bool shape = l >= 1 && sized(plan.m) && sized(plan.h) && sized(plan.beta) && plan.alpha_scalar >= 1;
      out.push_back({"length", shape ? Status::Holds : Status::Fails, std::to_string(l)});
      if (!shape) break;
      const double e = plan.p - 1;
      certify_mh(plan, out, "'");
      for (std::size_t i = 0; i < l; ++i) {
        out.push_back(check_ge(idx("(iv')", i), {{plan.alpha_scalar, 1.0}},
                               {{BigInt(2), 1.0}, {plan.m[i], 1.0}, {plan.h[i], 1.0}}));
      }
      for (std::size_t j = 0; j < l; ++j) {
        const BigInt jj(j + 1);
        // j^{p-2} <= alpha^{1-p} beta'_j h'_j <= 2 j^{p-2}
        out.push_back(check_ge(idx("(v')", j) + " lower", {{plan.beta[j], 1.0}, {plan.h[j], 1.0}},
                               {{jj, plan.p - 2}, {plan.alpha_scalar, e}}));
        out.push_back(check_ge(idx("(v')", j) + " upper", {{BigInt(2), 1.0}, {jj, plan.p - 2}, {plan.alpha_scalar, e}},
                               {{plan.beta[j], 1.0}, {plan.h[j], 1.0}}));
      }
      break;
    }
  }
  return out;
}

SequencePlan plan_first_type(const std::vector<BigInt>& m) {
  check_sequence(m, "m");
  SequencePlan plan;
  plan.kind = PlanKind::First;
  plan.l = m.size();
  plan.m = m;
  plan.certificate = certify(plan);
  return plan;
}

FiniteSpace gen_first_type(const std::vector<BigInt>& m) {
  check_sequence(m, "m");
  const std::size_t l = m.size();
  if (l > 60000) throw Error(ErrorCode::BadSequence, "too many levels");
  std::vector<Cell> cells;
  cells.push_back(Cell{"x_0", BigInt(1), ExtReal::one(), {"x_0"}, SplitRule::Interchangeable});
  for (std::size_t j = 1; j <= l; ++j) {
    cells.push_back(Cell{"S_" + std::to_string(j), m[j - 1], ExtReal::pow2(static_cast<std::int64_t>(j)),
                         {"level=" + std::to_string(j), "S_" + std::to_string(j)}, SplitRule::Interchangeable});
  }
  Members all;
  for (std::size_t c = 0; c < cells.size(); ++c) all.emplace_back(c, cells[c].count);
  std::vector<RawProfile> raw(cells.size());
  raw[0] = {{0.0, {{0, BigInt(1)}}}, {1.0, all}};
  for (std::size_t j = 1; j <= l; ++j) {
    raw[j] = {{0.0, {{j, BigInt(1)}}}, {1.0, {{0, BigInt(1)}, {j, BigInt(1)}}}, {2.0, all}};
  }
  return FiniteSpace::cellular(std::move(cells), std::move(raw)).with_generator(GeneratorKind::FirstType);
}

std::pair<FiniteSpace, SequencePlan> gen_first_type_prime(const std::vector<BigInt>& m_prime) {
  check_sequence(m_prime, "m'");
  if (m_prime[0] != 1) throw Error(ErrorCode::BadSequence, "m'_1 must equal 1");
  const std::size_t l = m_prime.size();
  SequencePlan plan;
  plan.kind = PlanKind::FirstPrime;
  plan.l = l;
  plan.m = m_prime;
  plan.h = {BigInt(1)};
  for (std::size_t j = 0; j + 1 < l; ++j) {
    const unsigned hj = plan.h[j].convert_to<unsigned>();
    const BigInt floor_target = BigInt(1) << hj;
    unsigned h = hj + 1;
    while ((BigInt(1) << h) / m_prime[j + 1] <= floor_target) {
      if (++h > 1000000) throw Error(ErrorCode::BadSequence, "no exponent h within budget");
    }
    plan.h.emplace_back(h);
  }
  plan.certificate = certify(plan);

  std::vector<Cell> cells;
  cells.push_back(Cell{"x_0", BigInt(1), ExtReal::one(), {"x_0"}, SplitRule::Interchangeable});
  std::vector<std::size_t> head(l), tail(l, SIZE_MAX);
  for (std::size_t j = 0; j < l; ++j) {
    const std::string level = std::to_string(j + 1);
    const BigInt size = BigInt(1) << plan.h[j].convert_to<unsigned>();
    const BigInt a = size / m_prime[j];
    head[j] = cells.size();
    cells.push_back(Cell{"S_" + level + ".head", a, ExtReal::one(), {"level=" + level, "S_" + level, "head"},
                         SplitRule::Interchangeable});
    if (size - a > 0) {
      tail[j] = cells.size();
      cells.push_back(Cell{"S_" + level + ".tail", size - a, ExtReal::one(), {"level=" + level, "S_" + level, "tail"},
                           SplitRule::Interchangeable});
    }
  }
  auto full = [&](Members& ms, std::size_t c) {
    if (c != SIZE_MAX) ms.emplace_back(c, cells[c].count);
  };
  Members all;
  for (std::size_t c = 0; c < cells.size(); ++c) all.emplace_back(c, cells[c].count);
  std::vector<RawProfile> raw(cells.size());
  raw[0] = {{0.0, {{0, BigInt(1)}}}, {1.0, all}};
  for (std::size_t j = 0; j < l; ++j) {
    // Unit-distance neighbours: x_0, the tail of the level below, the whole
    // level, and for tail points also the whole level above.
    Members near{{0, BigInt(1)}};
    if (j > 0) full(near, tail[j - 1]);
    full(near, head[j]);
    full(near, tail[j]);
    raw[head[j]] = {{0.0, {{head[j], BigInt(1)}}}, {1.0, near}, {2.0, all}};
    if (tail[j] != SIZE_MAX) {
      if (j + 1 < l) {
        full(near, head[j + 1]);
        full(near, tail[j + 1]);
      }
      raw[tail[j]] = {{0.0, {{tail[j], BigInt(1)}}}, {1.0, near}, {2.0, all}};
    }
  }
  auto space = FiniteSpace::cellular(std::move(cells), std::move(raw)).with_generator(GeneratorKind::FirstTypePrime);
  return {std::move(space), std::move(plan)};
}

SequencePlan synth_second_type(double p, double q, double r, std::size_t l) {
  check_second_triple(p, q, r);
  if (l < 1) throw Error(ErrorCode::BadParams, "l must be positive");
  SequencePlan plan;
  plan.kind = PlanKind::Second;
  plan.l = l;
  plan.p = p;
  plan.q = q;
  plan.r = r;
  synth_mh(p, l, plan);
  const double e = p - 1;
  const double le = level_exponent(p, r);

  auto alpha_ok = [&](const BigInt& a, std::size_t i) {
    // alpha_i^{1-p} h_i < 2
    return powers_gt({{BigInt(2), 1.0}, {a, e}}, {{plan.h[i], 1.0}});
  };
  auto next_alpha = [&](BigInt lo, std::size_t i) {
    return smallest_holding(std::move(lo), [&](const BigInt& a) { return alpha_ok(a, i); });
  };
  // (iv): l^{p/((p-1)r)} alpha_1 >= 2 m_l h_l
  BigInt a1 = ceil_quotient({{BigInt(2), 1.0}, {plan.m[l - 1], 1.0}, {plan.h[l - 1], 1.0}}, {{BigInt(l), le}});
  plan.alpha.push_back(next_alpha(a1, 0));
  for (std::size_t i = 0; i < l; ++i) {
    const BigInt& a = plan.alpha[i];
    BigInt b = ceil_quotient({{a, e}}, {{plan.h[i], 1.0}});
    if (powers_gt({{BigInt(2), 1.0}, {a, e}}, {{b, 1.0}, {plan.h[i], 1.0}}) != Status::Holds) {
      throw Error(ErrorCode::Infeasible, "(vi) has no beta at level " + std::to_string(i + 1));
    }
    plan.beta.push_back(b);
    if (i + 1 < l) plan.alpha.push_back(next_alpha(2 * a * b, i + 1));
  }
  plan.certificate = certify(plan);
  return plan;
}

SequencePlan synth_second_type_prime(double p, double q, std::size_t l) {
  if (!(p > 1) || !std::isfinite(p) || !(q > 1) || !std::isfinite(q)) {
    throw Error(ErrorCode::BadTriple, "the r = inf construction needs p, q in (1, inf)");
  }
  if (l < 1) throw Error(ErrorCode::BadParams, "l must be positive");
  SequencePlan plan;
  plan.kind = PlanKind::SecondPrime;
  plan.l = l;
  plan.p = p;
  plan.q = q;
  plan.r = kInf;
  synth_mh(p, l, plan);
  const double e = p - 1;
  BigInt alpha = 1;
  for (std::size_t i = 0; i < l; ++i) alpha = std::max(alpha, BigInt(2 * plan.m[i] * plan.h[i]));
  // alpha^{p-1} >= h'_j j^{2-p}
  for (std::size_t j = 0; j < l; ++j) {
    alpha = std::max(alpha, ceil_quotient({{plan.h[j], 1.0 / e}, {BigInt(j + 1), (2 - p) / e}}, {}));
  }
  plan.alpha_scalar = alpha;
  for (std::size_t j = 0; j < l; ++j) {
    const BigInt jj(j + 1);
    BigInt b = ceil_quotient({{jj, p - 2}, {alpha, e}}, {{plan.h[j], 1.0}});
    if (powers_ge({{BigInt(2), 1.0}, {jj, p - 2}, {alpha, e}}, {{b, 1.0}, {plan.h[j], 1.0}}) != Status::Holds) {
      throw Error(ErrorCode::Infeasible, "(v') has no beta' at level " + std::to_string(j + 1));
    }
    plan.beta.push_back(b);
  }
  plan.certificate = certify(plan);
  return plan;
}

FiniteSpace gen_second_type(const SequencePlan& plan) {
  if (plan.kind != PlanKind::Second) throw Error(ErrorCode::UncertifiedPlan, "plan is not of the r < inf kind");
  const auto checks = certify(plan);
  for (const auto& c : checks) {
    if (c.status != Status::Holds) throw Error(ErrorCode::UncertifiedPlan, c.id + " " + std::string(to_string(c.status)));
  }
  PositionalModel model;
  const ExtReal scale = ExtReal(static_cast<double>(plan.l)).pow(level_exponent(plan.p, plan.r));
  for (std::size_t i = 0; i < plan.l; ++i) {
    model.lower_counts.push_back(plan.h[i]);
    model.upper_counts.push_back(plan.h[i] * plan.beta[i]);
    model.lower_weights.push_back(ExtReal::from_int(plan.m[i]));
    model.upper_weights.push_back(scale * ExtReal::from_int(plan.alpha[i]));
  }
  return build_positional(model).with_generator(GeneratorKind::SecondType);
}

FiniteSpace gen_second_type_prime(const SequencePlan& plan) {
  if (plan.kind != PlanKind::SecondPrime) throw Error(ErrorCode::UncertifiedPlan, "plan is not of the r = inf kind");
  const auto checks = certify(plan);
  for (const auto& c : checks) {
    if (c.status != Status::Holds) throw Error(ErrorCode::UncertifiedPlan, c.id + " " + std::string(to_string(c.status)));
  }
  PositionalModel model;
  const ExtReal alpha = ExtReal::from_int(plan.alpha_scalar);
  for (std::size_t i = 0; i < plan.l; ++i) {
    model.lower_counts.push_back(plan.h[i]);
    model.upper_counts.push_back(plan.h[i] * plan.beta[i]);
    model.lower_weights.push_back(ExtReal::from_int(plan.m[i]));
    model.upper_weights.push_back(ExtReal::from_int(static_cast<std::int64_t>(i + 1)) * alpha);
  }
  return build_positional(model).with_generator(GeneratorKind::SecondTypePrime);
}

std::pair<FiniteSpace, SequencePlan> synth_and_gen_second_type_prime(double p, double q, std::size_t l) {
  SequencePlan plan = synth_second_type_prime(p, q, l);
  FiniteSpace space = gen_second_type_prime(plan);
  return {std::move(space), std::move(plan)};
}

FiniteSpace gen_from_plan(const SequencePlan& plan) {
  switch (plan.kind) {
    case PlanKind::First: return gen_first_type(plan.m);
    case PlanKind::FirstPrime: return gen_first_type_prime(plan.m).first;
    case PlanKind::Second: return gen_second_type(plan);
    case PlanKind::SecondPrime: return gen_second_type_prime(plan);
  }
  throw Error(ErrorCode::UnknownKind, "unknown plan kind");
}

}  // namespace lmx
