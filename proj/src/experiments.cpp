#include "lmx/experiments.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <optional>
#include <random>
#include <thread>

#include "lmx/combiner.hpp"
#include "lmx/generators.hpp"
#include "lmx/maximal.hpp"
#include "lmx/sequences.hpp"

namespace lmx {

namespace {

// Divergence: monotone growth with at least this factor per sweep step.
constexpr double kMinStepGrowth = 1.15;
// Boundedness: max/min over the sweep below this band.
constexpr double kBoundedBand = 1.3;
// Formula against the partial sums sum_{i<=n} i^{-r/r0}.
constexpr double kPartialSumBand = 2.0;
// Combined-space witnesses are evaluated up to this many components.
constexpr long long kCombineCap = 16;
// Layered-space restricted constants across l.
constexpr double kRestrictedBand = 8.0;
constexpr double kSlopeSlack = 0.2;
// Glued-space constant against the largest component constant.
constexpr double kSandwichBand = 4.0;
constexpr int kDecompositionSamples = 20;

template <typename R, typename F>
std::vector<R> parallel_map(std::size_t n, F f) {
  std::vector<R> out(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        out[i] = f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned workers = std::min<std::size_t>(worker_count(), std::max<std::size_t>(n, 1));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::string format_r(double r) { return std::isinf(r) ? "inf" : format_double(r); }

Check make_check(std::string name, bool passed, std::string detail) {
  return Check{std::move(name), passed, std::move(detail)};
}

// Per-step growth factors of a positive series.
std::vector<double> step_factors(const std::vector<ExtReal>& v) {
  std::vector<double> f;
  for (std::size_t i = 1; i < v.size(); ++i) f.push_back((v[i] / v[i - 1]).to_double());
  return f;
}

double band_of(const std::vector<ExtReal>& v) {
  ExtReal lo = v.at(0), hi = v.at(0);
  for (const auto& x : v) {
    lo = min(lo, x);
    hi = max(hi, x);
  }
  return (hi / lo).to_double();
}

Check divergence_check(const std::string& name, const std::vector<ExtReal>& v) {
  const auto f = step_factors(v);
  bool ok = !f.empty();
  std::string detail = "step factors";
  for (double x : f) {
    ok = ok && x >= kMinStepGrowth;
    detail += " " + format_double(x);
  }
  return make_check(name, ok, detail + " (need >= " + format_double(kMinStepGrowth) + ")");
}

Check bounded_check(const std::string& name, const std::vector<ExtReal>& v, double tol) {
  const double b = band_of(v);
  return make_check(name, b < tol, "band " + format_double(b) + " (need < " + format_double(tol) + ")");
}

Json checks_to_json(const std::vector<Check>& checks) {
  Json a = Json::array();
  for (const auto& c : checks) a.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  return a;
}

Json trend_to_json(const TrendReport& t) {
  Json rows = Json::array();
  for (const auto& r : t.rows) {
    rows.push_back({{"parameter", r.parameter},
                    {"estimate", format_value(r.estimate)},
                    {"formula", format_value(r.formula)},
                    {"ratio", r.ratio}});
  }
  return {{"slope", t.slope}, {"band", t.band}, {"rows", std::move(rows)}};
}

Json witness_to_json(const Witness& w) {
  return {{"method", w.method},
          {"label", w.label},
          {"ratio", format_value(w.ratio)},
          {"function", function_to_json(w.space, w.f)}};
}

std::vector<BigInt> to_bigs(std::initializer_list<int> v) {
  std::vector<BigInt> out;
  for (int x : v) out.emplace_back(x);
  return out;
}

void finish(ExperimentResult& res) {
  res.sidecar["config"] = config_to_json(res.config);
  res.sidecar["checks"] = checks_to_json(res.checks);
}

}  // namespace

bool ExperimentResult::ok() const {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

unsigned worker_count() {
  if (const char* env = std::getenv("LMX_WORKERS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string format_double(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string format_value(const ExtReal& x) {
  if (x.is_zero()) return "0";
  const long double lg = x.log2();
  if (lg > -1000 && lg < 1000) return format_double(x.to_double());
  return "2^" + format_double(static_cast<double>(lg));
}

std::string to_csv(const Table& table) {
  auto line = [](const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) s += ',';
      const std::string& c = cells[i];
      if (c.find_first_of(",\"\n") == std::string::npos) {
        s += c;
      } else {
        s += '"';
        for (char ch : c) s += ch == '"' ? std::string("\"\"") : std::string(1, ch);
        s += '"';
      }
    }
    return s + '\n';
  };
  std::string out = line(table.columns);
  for (const auto& r : table.rows) out += line(r);
  return out;
}

Table table_from_csv(const std::string& text) {
  std::vector<std::vector<std::string>> lines;
  std::vector<std::string> cur;
  std::string cell;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cell += ch;
      }
      continue;
    }
    any = true;
    if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      cur.push_back(std::move(cell));
      cell.clear();
    } else if (ch == '\n') {
      cur.push_back(std::move(cell));
      cell.clear();
      lines.push_back(std::move(cur));
      cur.clear();
      any = false;
    } else {
      cell += ch;
    }
  }
  if (quoted) throw Error(ErrorCode::Parse, "unterminated quote in CSV");
  if (any || !cell.empty()) {
    cur.push_back(std::move(cell));
    lines.push_back(std::move(cur));
  }
  if (lines.empty()) throw Error(ErrorCode::Parse, "empty CSV");
  Table t;
  t.columns = std::move(lines[0]);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].size() != t.columns.size()) throw Error(ErrorCode::Parse, "CSV row has the wrong number of fields");
    t.rows.push_back(std::move(lines[i]));
  }
  return t;
}

Json table_to_json(const Table& table) { return {{"columns", table.columns}, {"rows", table.rows}}; }

Table table_from_json(const Json& j) {
  Table t;
  t.columns = j.at("columns").get<std::vector<std::string>>();
  t.rows = j.at("rows").get<std::vector<std::vector<std::string>>>();
  return t;
}

Json config_to_json(const ExperimentConfig& c) {
  Json r = Json::array();
  for (double x : c.r_grid) r.push_back(exponent_to_json(x));
  return {{"id", c.id},
          {"p0", exponent_to_json(c.p0)},
          {"q0", exponent_to_json(c.q0)},
          {"r0", exponent_to_json(c.r0)},
          {"sweep", c.sweep},
          {"r_grid", std::move(r)},
          {"budget", c.budget},
          {"seed", c.seed},
          {"component_files", c.component_files}};
}

ExperimentConfig config_from_json(const Json& j) {
  ExperimentConfig c;
  c.id = j.at("id").get<std::string>();
  c.p0 = exponent_from_json(j.at("p0"));
  c.q0 = exponent_from_json(j.at("q0"));
  c.r0 = exponent_from_json(j.at("r0"));
  c.sweep = j.at("sweep").get<std::vector<long long>>();
  for (const auto& x : j.at("r_grid")) c.r_grid.push_back(exponent_from_json(x));
  c.budget = j.at("budget").get<std::uint64_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.component_files = j.value("component_files", std::vector<std::string>{});
  return c;
}

Json result_to_json(const ExperimentResult& result) {
  Json j = result.sidecar;
  j["table"] = table_to_json(result.table);
  j["ok"] = result.ok();
  return j;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  if (config.id == "thm1-u" || config.id == "thm1-v") return exp_theorem1(config);
  if (config.id == "thm2") return exp_theorem2(config);
  if (config.id == "remark1") return exp_remark1(config);
  if (config.id == "remark2") return exp_remark2(config);
  if (config.id == "prop1") return exp_prop1_sandwich(config);
  throw Error(ErrorCode::UnknownKind, "unknown experiment '" + config.id + "'");
}

Thm1Case theorem1_case(double p0, double q0, double r0, bool v_variant) {
  const bool r_fin = std::isfinite(r0);
  if (p0 > 1 && std::isfinite(p0)) {
    if (r_fin) return v_variant ? Thm1Case::V1 : Thm1Case::U1;
    return v_variant ? Thm1Case::V2 : Thm1Case::U2;
  }
  if (p0 == 1 && q0 == 1) {
    if (r_fin) return v_variant ? Thm1Case::V3 : Thm1Case::U3;
    return v_variant ? Thm1Case::V4 : Thm1Case::U4;
  }
  throw Error(ErrorCode::BadCase, "no construction for p0 = " + format_double(p0) + ", q0 = " + format_double(q0));
}

namespace {

std::vector<long long> checked_sweep(const std::vector<long long>& given, std::vector<long long> fallback) {
  std::vector<long long> s = given.empty() ? std::move(fallback) : given;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] < 1 || (i > 0 && s[i] <= s[i - 1])) {
      throw Error(ErrorCode::BadParams, "sweep must be strictly increasing positive integers");
    }
  }
  return s;
}

FiniteSpace thm1_space(const Thm1Sequence& seq) {
  if (seq.target == GeneratorKind::FirstTypePrime) return gen_first_type_prime(seq.values).first;
  return gen_first_type(seq.values);
}

ExtReal thm1_formula(const Thm1Sequence& seq, double p0, double r) {
  if (seq.target == GeneratorKind::FirstTypePrime) return lemma_formula(LemmaKind::L2, seq.values, 1.0, r);
  return lemma_formula(LemmaKind::L1, seq.values, p0, r);
}

// Random nonnegative cell function, values 2^u with u in [-8, 0] and a
// quarter of the cells zero; never identically zero.
CellFunction random_function(std::size_t cells, std::mt19937_64& rng) {
  auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1p-53; };
  CellFunction f;
  bool any = false;
  for (std::size_t c = 0; c < cells; ++c) {
    if (unit() < 0.25) {
      f.values.push_back(ExtReal::zero());
    } else {
      f.values.push_back(ExtReal::from_log2(-8.0L * unit()));
      any = true;
    }
  }
  if (!any) f.values[rng() % cells] = ExtReal::one();
  return f;
}

}  // namespace

ExperimentResult exp_theorem1(const ExperimentConfig& config) {
  ExperimentResult res;
  res.config = config;
  const bool v = config.id == "thm1-v";
  const double p0 = config.p0, q0 = config.q0, r0 = config.r0;
  const Thm1Case cs = theorem1_case(p0, q0, r0, v);
  const auto sweep = checked_sweep(config.sweep, {4, 16, 64, 256});
  std::vector<double> rs = config.r_grid;
  if (rs.empty()) rs = std::isfinite(r0) ? std::vector<double>{r0, r0 + 1} : std::vector<double>{std::max(q0, 2.0), kInf};
  for (double r : rs) {
    if (!(r >= q0)) throw Error(ErrorCode::BadParams, "every r must be at least q0");
  }
  res.config.sweep = sweep;
  res.config.r_grid = rs;

  struct Point {
    Thm1Sequence seq;
    std::vector<ExtReal> formula, witness, combined;
  };
  auto points = parallel_map<Point>(sweep.size(), [&](std::size_t k) {
    const long long n = sweep[k];
    Point pt;
    pt.seq = thm1_sequences(cs, p0, q0, r0, static_cast<int>(n));
    const FiniteSpace space = thm1_space(pt.seq);
    const CellFunction chi = CellFunction::indicator(space, {"x_0"});
    std::optional<FiniteSpace> glued;
    if (n <= kCombineCap) {
      std::vector<FiniteSpace> comps;
      for (long long j = 1; j <= n; ++j) comps.push_back(thm1_space(thm1_sequences(cs, p0, q0, r0, static_cast<int>(j))));
      glued = combine(comps);
    }
    for (double r : rs) {
      const AdmissibleTriple t{p0, q0, r};
      pt.formula.push_back(thm1_formula(pt.seq, p0, r));
      pt.witness.push_back(witness_ratio(space, chi, t));
      if (glued) {
        const std::string id = "c" + std::to_string(n - 1) + ":x_0";
        pt.combined.push_back(witness_ratio(*glued, CellFunction::indicator(*glued, {id}), t));
      }
    }
    return pt;
  });

  res.table.columns = {"case", "n", "r", "i0", "formula", "witness_ratio", "combined_ratio"};
  for (std::size_t ri = 0; ri < rs.size(); ++ri) {
    for (std::size_t k = 0; k < sweep.size(); ++k) {
      const Point& pt = points[k];
      res.table.rows.push_back({std::string(to_string(cs)), std::to_string(sweep[k]), format_r(rs[ri]),
                                std::to_string(pt.seq.i0), format_value(pt.formula[ri]), format_value(pt.witness[ri]),
                                pt.combined.empty() ? "" : format_value(pt.combined[ri])});
    }
  }

  Json trends = Json::array();
  for (std::size_t ri = 0; ri < rs.size(); ++ri) {
    const double r = rs[ri];
    std::vector<ExtReal> formula;
    std::vector<TrendPoint> tp;
    for (std::size_t k = 0; k < sweep.size(); ++k) {
      formula.push_back(points[k].formula[ri]);
      tp.push_back({static_cast<double>(sweep[k]), points[k].witness[ri], points[k].formula[ri]});
    }
    const bool diverges = v ? r < r0 : r <= r0;
    const std::string tag = "r=" + format_r(r);
    if (diverges) {
      res.checks.push_back(divergence_check("formula diverges " + tag, formula));
    } else {
      res.checks.push_back(bounded_check("formula bounded " + tag, formula, kBoundedBand));
    }
    if (cs == Thm1Case::U1 && diverges) {
      std::vector<ExtReal> rel;
      for (std::size_t k = 0; k < sweep.size(); ++k) {
        std::vector<ExtReal> terms;
        for (long long i = 1; i <= sweep[k]; ++i) terms.push_back(ExtReal::from_log2(-(r / r0) * std::log2(static_cast<long double>(i))));
        rel.push_back(formula[k] / sum_largest_first(std::move(terms)).pow(1.0L / r));
      }
      res.checks.push_back(bounded_check("formula tracks partial sums " + tag, rel, kPartialSumBand));
    }
    Json entry = {{"r", exponent_to_json(r)}};
    try {
      entry["witness_vs_formula"] = trend_to_json(trend_fit(tp));
    } catch (const Error& e) {
      entry["witness_vs_formula"] = e.what();
    }
    trends.push_back(std::move(entry));
  }
  res.sidecar["trends"] = std::move(trends);
  Json seqs = Json::array();
  for (std::size_t k = 0; k < sweep.size(); ++k) {
    Json s = Json::array();
    for (const auto& x : points[k].seq.values) s.push_back(x.str());
    seqs.push_back({{"n", sweep[k]}, {"i0", points[k].seq.i0}, {"values", std::move(s)}, {"witness", "chi_{x_0}"}});
  }
  res.sidecar["sequences"] = std::move(seqs);
  finish(res);
  return res;
}

ExperimentResult exp_theorem2(const ExperimentConfig& config) {
  ExperimentResult res;
  res.config = config;
  const double p0 = config.p0, q0 = config.q0, r0 = config.r0;
  const AdmissibleTriple triple{p0, q0, r0};
  triple.check();
  if (!(q0 > 1) || !(p0 > 1)) throw Error(ErrorCode::BadTriple, "needs p0 > 1 and q0 in (1, inf]");
  const bool prime = std::isinf(r0);
  const auto sweep = checked_sweep(config.sweep, prime ? std::vector<long long>{1, 2, 4} : std::vector<long long>{1, 2, 4, 8});
  res.config.sweep = sweep;

  struct Point {
    SequencePlan plan;
    BigInt points;
    std::size_t cells = 0;
    ConstantEstimate restricted;
    Witness g;
  };
  auto pts = parallel_map<Point>(sweep.size(), [&](std::size_t k) {
    const auto l = static_cast<std::size_t>(sweep[k]);
    Point pt;
    FiniteSpace space;
    if (prime) {
      auto [s, plan] = synth_and_gen_second_type_prime(p0, q0, l);
      space = std::move(s);
      pt.plan = std::move(plan);
    } else {
      pt.plan = synth_second_type(p0, q0, r0, l);
      space = gen_second_type(pt.plan);
    }
    pt.points = space.point_count();
    pt.cells = space.cell_count();
    pt.restricted = restricted_single_level(space, p0, r0);
    for (auto& w : builtin_witnesses(space, triple)) {
      if (w.label == "sum_i chi_{T_i}/m_i") pt.g = std::move(w);
    }
    return pt;
  });

  res.table.columns = {"l", "cells", "log2_points", "restricted_q1", "restricted_witness", "g_ratio"};
  std::vector<ExtReal> restricted;
  std::vector<TrendPoint> tp;
  Json wit = Json::array();
  for (std::size_t k = 0; k < sweep.size(); ++k) {
    const Point& pt = pts[k];
    res.table.rows.push_back({std::to_string(sweep[k]), std::to_string(pt.cells), format_double(static_cast<double>(log2_big(pt.points))),
                              format_value(pt.restricted.lower), pt.restricted.best.label, format_value(pt.g.ratio)});
    restricted.push_back(pt.restricted.lower);
    tp.push_back({static_cast<double>(sweep[k]), pt.g.ratio, ExtReal(static_cast<double>(sweep[k]))});
    wit.push_back({{"l", sweep[k]},
                   {"restricted", witness_to_json(pt.restricted.best)},
                   {"g", witness_to_json(pt.g)},
                   {"plan", plan_to_json(pt.plan)}});
  }
  res.checks.push_back(bounded_check("restricted q=1 constants bounded", restricted, kRestrictedBand));
  const double target = (std::isinf(q0) ? 1.0 : 1.0 - 1.0 / q0) - kSlopeSlack;
  if (sweep.size() >= 3) {
    const TrendReport fit = trend_fit(tp);
    res.checks.push_back(make_check("g-ratio grows in l", fit.slope >= target,
                                    "log-log slope " + format_double(fit.slope) + " (need >= " + format_double(target) + ")"));
    res.sidecar["g_trend"] = trend_to_json(fit);
  } else {
    res.checks.push_back(make_check("g-ratio grows in l", false, "needs at least 3 sweep points"));
  }
  res.sidecar["witnesses"] = std::move(wit);
  finish(res);
  return res;
}

ExperimentResult exp_remark1(const ExperimentConfig& config) {
  ExperimentResult res;
  res.config = config;
  const double q = config.q0, r = config.r0;
  if (!(q > 1) || std::isinf(q) || !(r >= 1)) throw Error(ErrorCode::BadParams, "needs q in (1, inf) and r >= 1");
  const auto sweep = checked_sweep(config.sweep, {4, 16, 64});
  res.config.sweep = sweep;

  struct Point {
    ExtReal norm_f, norm_mf, ratio, average, half_harmonic;
    bool above_average = true;
  };
  auto pts = parallel_map<Point>(sweep.size(), [&](std::size_t k) {
    const auto K = static_cast<std::size_t>(sweep[k]);
    std::vector<std::string> ids;
    std::vector<ExtReal> w;
    std::vector<double> dist(K * K, 1.0);
    CellFunction f;
    std::vector<ExtReal> halves;
    for (std::size_t i = 1; i <= K; ++i) {
      ids.push_back("A_" + std::to_string(i));
      w.push_back(ExtReal::pow2(-2 * static_cast<std::int64_t>(i)));
      f.values.push_back(ExtReal::pow2(2 * static_cast<std::int64_t>(i)) / ExtReal(static_cast<double>(i)));
      halves.push_back(ExtReal(0.5 / static_cast<double>(i)));
      dist[(i - 1) * K + (i - 1)] = 0.0;
    }
    const FiniteSpace space = FiniteSpace::dense(ids, w, dist);
    Point pt;
    const CellFunction mf = maximal_function(space, f).mf;
    pt.norm_f = lorentz_norm(space, f, 1.0, q);
    pt.norm_mf = lorentz_norm(space, mf, 1.0, r);
    pt.ratio = pt.norm_mf / pt.norm_f;
    pt.average = l1_norm(space, f) / space.total_measure();
    pt.half_harmonic = sum_largest_first(std::move(halves));
    for (const auto& v : mf.values) pt.above_average = pt.above_average && v >= pt.average * ExtReal(1 - 1e-12);
    return pt;
  });

  res.table.columns = {"K", "norm_f_1q", "norm_Mf_1r", "ratio", "average", "half_harmonic"};
  std::vector<ExtReal> norms, ratios;
  bool above = true, lower = true;
  const ExtReal c_r = std::isinf(r) ? ExtReal::one() : ExtReal(1.0 / r).pow(1.0L / r);
  for (std::size_t k = 0; k < sweep.size(); ++k) {
    const Point& pt = pts[k];
    res.table.rows.push_back({std::to_string(sweep[k]), format_value(pt.norm_f), format_value(pt.norm_mf),
                              format_value(pt.ratio), format_value(pt.average), format_value(pt.half_harmonic)});
    norms.push_back(pt.norm_f);
    ratios.push_back(pt.ratio);
    above = above && pt.above_average;
    lower = lower && pt.norm_mf >= c_r * pt.half_harmonic * ExtReal(1 - 1e-12);
  }
  res.checks.push_back(make_check("Mf >= ||f||_1/mu(X) pointwise", above, ""));
  res.checks.push_back(make_check("||Mf||_{1,r} >= c_r sum 1/(2k)", lower, "c_r = (1/r)^(1/r)"));
  res.checks.push_back(bounded_check("||f||_{1,q} bounded", norms, 1.5));
  bool monotone = true;
  for (double x : step_factors(ratios)) monotone = monotone && x > 1;
  res.checks.push_back(make_check("ratio increases with K", monotone && ratios.size() > 1, ""));
  finish(res);
  return res;
}

ExperimentResult exp_remark2(const ExperimentConfig& config) {
  ExperimentResult res;
  res.config = config;
  const AdmissibleTriple triple{config.p0, config.q0, config.r0};
  triple.check();
  const double kMetric = 7.0;
  const ExtReal kMeasure(3.0);
  std::vector<std::pair<std::string, FiniteSpace>> family = {
      {"first(1,1)", gen_first_type(to_bigs({1, 1}))},
      {"first(1,2,3)", gen_first_type(to_bigs({1, 2, 3}))},
      {"first-prime(1,1,2)", gen_first_type_prime(to_bigs({1, 1, 2})).first},
      {"second(2,2,2;l=2)", gen_second_type(synth_second_type(2, 2, 2, 2))},
  };
  struct Point {
    double mf_dev = 0, norm_dev = 0, constant_dev = 0;
    std::string label, label_scaled;
  };
  auto pts = parallel_map<Point>(family.size(), [&](std::size_t k) {
    const FiniteSpace& s = family[k].second;
    const FiniteSpace t = scale_space(s, kMetric, kMeasure);
    std::mt19937_64 rng(config.seed + k);
    Point pt;
    const ExtReal factor = kMeasure.pow(1.0L / triple.p);
    for (int i = 0; i < kDecompositionSamples; ++i) {
      const CellFunction f = random_function(s.cell_count(), rng);
      const auto a = maximal_function(s, f).mf, b = maximal_function(t, f).mf;
      for (std::size_t c = 0; c < a.values.size(); ++c) pt.mf_dev = std::max(pt.mf_dev, ExtReal::rel_diff(a.values[c], b.values[c]));
      pt.norm_dev = std::max(pt.norm_dev, ExtReal::rel_diff(lorentz_norm(t, f, triple.p, triple.q),
                                                            factor * lorentz_norm(s, f, triple.p, triple.q)));
    }
    const auto e0 = restricted_constant_exact(s, triple.p, triple.r, config.budget);
    const auto e1 = restricted_constant_exact(t, triple.p, triple.r, config.budget);
    pt.constant_dev = ExtReal::rel_diff(e0.lower, e1.lower);
    pt.label = e0.best.label;
    pt.label_scaled = e1.best.label;
    return pt;
  });
  res.table.columns = {"space", "maximal_dev", "norm_scale_dev", "constant_dev", "witness", "witness_scaled"};
  for (std::size_t k = 0; k < family.size(); ++k) {
    const Point& pt = pts[k];
    const std::string& name = family[k].first;
    res.table.rows.push_back({name, format_double(pt.mf_dev), format_double(pt.norm_dev), format_double(pt.constant_dev),
                              pt.label, pt.label_scaled});
    res.checks.push_back(make_check("maximal invariant " + name, pt.mf_dev <= 1e-12, format_double(pt.mf_dev)));
    res.checks.push_back(make_check("norm scales by 3^(1/p) " + name, pt.norm_dev <= 1e-12, format_double(pt.norm_dev)));
    res.checks.push_back(make_check("restricted constant invariant " + name,
                                    pt.constant_dev <= 1e-12 && pt.label == pt.label_scaled, format_double(pt.constant_dev)));
  }
  finish(res);
  return res;
}

ExperimentResult exp_prop1_sandwich(const ExperimentConfig& config) {
  ExperimentResult res;
  res.config = config;
  const double p = config.p0, r = config.r0;
  std::vector<FiniteSpace> comps;
  if (config.component_files.empty()) {
    comps = {gen_first_type(to_bigs({1})), gen_first_type(to_bigs({1, 2}))};
  } else {
    for (const auto& path : config.component_files) comps.push_back(space_from_json(read_json_file(path)));
  }
  const FiniteSpace glued = combine(comps);
  std::vector<FiniteSpace> all = comps;
  all.push_back(glued);
  auto ests = parallel_map<ConstantEstimate>(all.size(), [&](std::size_t k) {
    return restricted_constant_exact(all[k], p, r, config.budget);
  });

  res.table.columns = {"space", "cells", "points", "restricted", "exact", "witness"};
  ExtReal best_component;
  Json wit = Json::array();
  for (std::size_t k = 0; k < all.size(); ++k) {
    const bool is_glued = k + 1 == all.size();
    const std::string name = is_glued ? "combined" : "component " + std::to_string(k);
    res.table.rows.push_back({name, std::to_string(all[k].cell_count()), all[k].point_count().str(),
                              format_value(ests[k].lower), ests[k].exact ? "true" : "false", ests[k].best.label});
    if (!is_glued) best_component = max(best_component, ests[k].lower);
    wit.push_back({{"space", name}, {"witness", witness_to_json(ests[k].best)}});
  }
  const ExtReal glued_c = ests.back().lower;
  const double band = (max(glued_c, best_component) / min(glued_c, best_component)).to_double();
  res.checks.push_back(make_check("sandwich band", band < kSandwichBand,
                                  "band " + format_double(band) + " (need < " + format_double(kSandwichBand) + ")"));

  std::mt19937_64 rng(config.seed);
  double worst = 0;
  bool holds = true;
  for (int i = 0; i < kDecompositionSamples; ++i) {
    const Decomposition d = prop1_decompose(glued, random_function(glued.cell_count(), rng));
    worst = std::max(worst, d.max_rel_dev);
    holds = holds && d.holds;
  }
  res.checks.push_back(make_check("decomposition identity", holds, "max deviation " + format_double(worst)));
  const Decomposition one = prop1_decompose(glued, CellFunction::constant(glued, ExtReal::one()));
  bool unit = one.holds;
  for (const auto& v : one.combined.values) unit = unit && ExtReal::rel_diff(v, ExtReal::one()) <= 1e-12;
  res.checks.push_back(make_check("constant function", unit, ""));
  res.sidecar["witnesses"] = std::move(wit);
  finish(res);
  return res;
}

}  // namespace lmx
