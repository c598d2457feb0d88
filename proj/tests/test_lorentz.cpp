#include <doctest.h>

#include <cmath>
#include <random>

#include "lmx/lorentz.hpp"
#include "oracle.hpp"

using namespace lmx;

namespace {

// Dense space of unrelated points with the given weights, all at distance 1.
FiniteSpace atoms(const std::vector<double>& w) {
  std::vector<std::string> ids;
  std::vector<ExtReal> ws;
  std::vector<double> d(w.size() * w.size(), 1.0);
  for (std::size_t i = 0; i < w.size(); ++i) {
    ids.push_back("a" + std::to_string(i));
    ws.emplace_back(w[i]);
    d[i * w.size() + i] = 0;
  }
  return FiniteSpace::dense(ids, ws, d);
}

CellFunction values(const std::vector<double>& v) {
  CellFunction f;
  for (double x : v) f.values.emplace_back(x);
  return f;
}

}  // namespace

TEST_SUITE("lorentz") {
  TEST_CASE("distribution profile merges equal values") {
    auto s = atoms({0.5, 0.25});
    auto prof = distribution_profile(s, values({3, 1}));
    REQUIRE(prof.levels.size() == 2);
    CHECK(prof.levels[0].value.to_double() == 3);
    CHECK(prof.levels[0].mass.to_double() == 0.5);
    CHECK(prof.distribution(ExtReal(2.0)).to_double() == 0.5);
    CHECK(prof.distribution(ExtReal(0.5)).to_double() == 0.75);
    CHECK(prof.rearrangement(ExtReal(0.6)).to_double() == 1);
    CHECK(l1_norm(prof).to_double() == 1.75);

    auto c = distribution_profile(atoms({1, 2, 3}), values({4, 4, 4}));
    REQUIRE(c.levels.size() == 1);
    CHECK(c.levels[0].mass.to_double() == 6);

    auto z = distribution_profile(s, values({0, 0}));
    CHECK(z.levels.empty());
    CHECK(z.distribution(ExtReal::zero()).is_zero());
    CHECK(l1_norm(z).is_zero());
  }

  TEST_CASE("norm examples") {
    CHECK(lorentz_norm(atoms({3}), values({2}), 2, 2).to_double() == doctest::Approx(std::sqrt(12.0)).epsilon(1e-15));
    CHECK(lorentz_norm(atoms({1, 3}), values({2, 1}), 2, kInf).to_double() == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(lorentz_norm(atoms({1}), values({1}), 2, 1).to_double() == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(l1_norm(atoms({1}), values({5})).to_double() == 5);
  }

  TEST_CASE("indicator identity on an exponent grid") {
    for (double p : {1.0, 1.5, 2.0, 3.0, 8.0}) {
      for (double q : {1.0, 1.5, 2.0, 4.0, kInf}) {
        for (long long a : {1LL, 3LL, 1000LL, 1LL << 40}) {
          CAPTURE(p);
          CAPTURE(q);
          CAPTURE(a);
          const FiniteSpace s = FiniteSpace::cellular({{"A", BigInt(a), ExtReal::one(), {}, SplitRule::None}},
                                                      {{{0.0, {{0, BigInt(1)}}}, {1.0, {{0, BigInt(a)}}}}});
          const ExtReal got = lorentz_norm(s, CellFunction::constant(s, ExtReal::one()), p, q);
          // Compared in log2, where the identity is a sum of exponents.
          const long double factor = std::isinf(q) ? 0.0L : std::log2((long double)p / q) / q;
          const long double want = factor + std::log2((long double)a) / p;
          CHECK(std::fabs(got.log2() - want) < 1e-14L);
        }
      }
    }
  }

  TEST_CASE("huge measures keep exact exponents") {
    const FiniteSpace s = FiniteSpace::cellular({{"A", BigInt(1), ExtReal::pow2(1 << 16), {}, SplitRule::None}},
                                                {{{0.0, {{0, BigInt(1)}}}}});
    const ExtReal n = lorentz_norm(s, CellFunction::constant(s, ExtReal::one()), 2, 2);
    CHECK(n.log2() == doctest::Approx(double(1 << 15)));
  }

  TEST_CASE("both closed forms and the quadrature agree") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0, 1);
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t n = 1 + trial % 6;
      std::vector<double> w, v;
      for (std::size_t i = 0; i < n; ++i) {
        w.push_back(std::exp2(8 * u(rng) - 4));
        v.push_back(std::exp2(8 * u(rng) - 4));
      }
      const auto s = atoms(w);
      const auto prof = distribution_profile(s, values(v));
      const double p = 1 + 3 * u(rng);
      const double q = 1 + 3 * u(rng);
      const auto [df, fs] = lorentz_norm_forms(prof, p, q);
      CHECK(ExtReal::rel_diff(df, fs) < 1e-12);
      std::vector<long double> wl(w.begin(), w.end()), vl(v.begin(), v.end());
      CHECK(oracle::rel(fs.to_long_double(), oracle::lorentz(wl, vl, p, q)) < 1e-9);
      CHECK(oracle::rel(fs.to_long_double(), oracle::lorentz_exact(wl, vl, p, q)) < 1e-12);
      CHECK(oracle::rel(lorentz_norm(prof, p, kInf).to_long_double(), oracle::lorentz(wl, vl, p, INFINITY)) < 1e-12);
    }
  }

  TEST_CASE("homogeneity and measure scaling") {
    auto s = atoms({1, 2, 5});
    auto f = values({3, 1, 0.5});
    for (double q : {1.0, 2.0, kInf}) {
      CellFunction g = f;
      for (auto& x : g.values) x = x * ExtReal(8.0);
      CHECK(ExtReal::rel_diff(lorentz_norm(s, g, 2, q), lorentz_norm(s, f, 2, q) * ExtReal(8.0)) < 1e-15);
      auto t = scale_space(s, 1.0, ExtReal(3.0));
      CHECK(ExtReal::rel_diff(lorentz_norm(t, f, 2, q), lorentz_norm(s, f, 2, q) * ExtReal(3.0).pow(0.5)) < 1e-14);
    }
  }

  TEST_CASE("triple admissibility") {
    CHECK_NOTHROW((AdmissibleTriple{1, 1, 1}.check()));
    CHECK_NOTHROW((AdmissibleTriple{2, 1, kInf}.check()));
    CHECK_THROWS_AS((AdmissibleTriple{2, 3, 2}.check()), Error);
    CHECK_NOTHROW((AdmissibleTriple{1, 1, 2}.check()));
    CHECK_THROWS_AS((AdmissibleTriple{1, 2, 2}.check()), Error);
    CHECK_THROWS_AS((AdmissibleTriple{kInf, 1, 1}.check()), Error);
  }

  TEST_CASE("from_map rejects unknown and missing ids") {
    auto s = atoms({1, 1});
    CHECK_THROWS_AS(CellFunction::from_map(s, {{"a0", ExtReal::one()}}), Error);
    CHECK_THROWS_AS(CellFunction::from_map(s, {{"a0", ExtReal::one()}, {"a1", ExtReal::one()}, {"zz", ExtReal::one()}}),
                    Error);
    CHECK_THROWS_AS(CellFunction::indicator(s, {"nope"}), Error);
  }
}
