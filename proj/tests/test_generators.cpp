#include <doctest.h>

#include <cmath>
#include <functional>

#include "fixtures.hpp"
#include "lmx/combiner.hpp"
#include "lmx/generators.hpp"
#include "lmx/lorentz.hpp"
#include "lmx/sequences.hpp"
#include "lmx/space_io.hpp"

using namespace lmx;
using fixtures::big;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::Parse;
}

}  // namespace

TEST_SUITE("generators") {
  TEST_CASE("first-type weights") {
    auto s = gen_first_type(big({1, 1}));
    CHECK(s.point_count() == 3);
    CHECK(s.cell(0).weight.to_double() == 1);
    CHECK(s.cell(1).weight.to_double() == 2);
    CHECK(s.cell(2).weight.to_double() == 4);
    CHECK(s.total_measure().to_double() == 7);
    auto one = gen_first_type(big({1}));
    CHECK(one.point_count() == 2);
    CHECK(code_of([] { gen_first_type(big({2, 1})); }) == ErrorCode::BadSequence);
  }

  TEST_CASE("prime first-type exponents and counts") {
    auto [s, plan] = gen_first_type_prime(big({1, 2}));
    CHECK(plan.h == big({1, 3}));
    CHECK(plan.certified());
    CHECK(s.point_count() == 11);
    CHECK(s.cell(s.cell_index("S_1.head")).count == 2);
    CHECK_FALSE(s.find_cell("S_1.tail"));
    CHECK(s.cell(s.cell_index("S_2.head")).count == 4);
    CHECK(s.cell(s.cell_index("S_2.tail")).count == 4);
    auto [t, tp] = gen_first_type_prime(big({1}));
    CHECK(t.point_count() == 3);
    CHECK(code_of([] { gen_first_type_prime(big({2, 2})); }) == ErrorCode::BadSequence);
  }

  TEST_CASE("greedy synthesis of the layered block plan") {
    auto plan = synth_second_type(2, 2, 2, 2);
    CHECK(plan.m == big({1, 2}));
    CHECK(plan.h == big({1, 2}));
    CHECK(plan.alpha == big({4, 32}));
    CHECK(plan.beta == big({4, 16}));
    CHECK(plan.certified());
    auto s = gen_second_type(plan);
    CHECK(s.point_count() == 39);

    auto p1 = synth_second_type(2, 2, 2, 1);
    CHECK(p1.m == big({1}));
    CHECK(p1.h == big({1}));
    CHECK(p1.alpha[0] >= 2);
    CHECK(p1.beta[0] == p1.alpha[0]);
    CHECK(gen_second_type(p1).point_count() == 1 + p1.beta[0]);

    CHECK(code_of([] { synth_second_type(1, 1, 2, 2); }) == ErrorCode::BadTriple);
  }

  TEST_CASE("tampered plan is rejected") {
    auto plan = synth_second_type(2, 2, 2, 2);
    plan.alpha[1] = 3;
    plan.certificate = certify(plan);
    CHECK_FALSE(plan.certified());
    CHECK_FALSE(plan.failures().empty());
    CHECK(code_of([&] { gen_second_type(plan); }) == ErrorCode::UncertifiedPlan);
  }

  TEST_CASE("r = inf variant") {
    auto plan = synth_second_type_prime(2, 2, 2);
    CHECK(plan.m == big({1, 2}));
    CHECK(plan.h == big({1, 2}));
    CHECK(plan.alpha_scalar == 8);
    CHECK(plan.beta == big({8, 4}));
    CHECK(plan.certified());
    CHECK(code_of([] { synth_second_type_prime(2, 1, 2); }) == ErrorCode::BadTriple);
  }

  TEST_CASE("certificates hold across a grid") {
    for (double p : {1.5, 2.0, 3.0}) {
      for (double q : {1.5, 2.0}) {
        for (std::size_t l = 1; l <= 4; ++l) {
          CAPTURE(p);
          CAPTURE(q);
          CAPTURE(l);
          CHECK(synth_second_type(p, q, std::max(q, 2.0), l).certified());
          CHECK(synth_second_type_prime(p, q, l).certified());
        }
      }
    }
  }

  TEST_CASE("plan JSON survives a round trip") {
    auto plan = synth_second_type(2, 2, 2, 3);
    auto back = plan_from_json(plan_to_json(plan));
    CHECK(back.m == plan.m);
    CHECK(back.alpha == plan.alpha);
    CHECK(back.beta == plan.beta);
    CHECK(certify(back).size() == plan.certificate.size());
    CHECK(gen_from_plan(back).point_count() == gen_from_plan(plan).point_count());
  }
}

TEST_SUITE("sequences") {
  TEST_CASE("case 1 prefix") {
    auto s = thm1_sequences(Thm1Case::U1, 2, 1, 2, 5);
    CHECK(s.values == big({2, 2, 3, 4, 7}));
    CHECK(s.i0 == 0);
    CHECK(s.target == GeneratorKind::FirstType);
  }

  TEST_CASE("case 3 prefix") {
    auto s = thm1_sequences(Thm1Case::U3, 1, 1, 2, 9);
    CHECK(s.values == big({1, 1, 1, 2, 2, 2, 2, 2, 3}));
    CHECK(s.target == GeneratorKind::FirstTypePrime);
  }

  TEST_CASE("wrong case for the exponents") {
    CHECK(code_of([] { thm1_sequences(Thm1Case::U1, 1, 1, 2, 5); }) == ErrorCode::BadCase);
    CHECK(code_of([] { thm1_sequences(Thm1Case::U3, 2, 1, 2, 5); }) == ErrorCode::BadCase);
  }

  TEST_CASE("every case yields a non-decreasing sequence a generator accepts") {
    struct Row {
      Thm1Case c;
      double p, q, r;
    };
    for (const Row& row : {Row{Thm1Case::U1, 2, 1, 2}, Row{Thm1Case::V1, 2, 1, 2}, Row{Thm1Case::U2, 2, 1, kInf},
                           Row{Thm1Case::V2, 2, 1, kInf}, Row{Thm1Case::U3, 1, 1, 2}, Row{Thm1Case::V3, 1, 1, 2},
                           Row{Thm1Case::U4, 1, 1, kInf}, Row{Thm1Case::V4, 1, 1, kInf}}) {
      for (int n : {1, 4, 16}) {
        CAPTURE(to_string(row.c));
        CAPTURE(n);
        auto s = thm1_sequences(row.c, row.p, row.q, row.r, n);
        REQUIRE(s.values.size() == static_cast<std::size_t>(n));
        for (std::size_t i = 1; i < s.values.size(); ++i) CHECK(s.values[i - 1] <= s.values[i]);
        if (s.target == GeneratorKind::FirstTypePrime) {
          CHECK(s.values[0] == 1);
          CHECK_NOTHROW(gen_first_type_prime(s.values));
        } else {
          CHECK_NOTHROW(gen_first_type(s.values));
        }
      }
    }
  }

  TEST_CASE("exact power comparisons") {
    CHECK(powers_ge({{BigInt(4), 0.5}}, {{BigInt(2), 1.0}}) == Status::Holds);
    CHECK(powers_gt({{BigInt(4), 0.5}}, {{BigInt(2), 1.0}}) == Status::Fails);
    CHECK(powers_gt({{BigInt(27), 1.0 / 3}}, {{BigInt(2), 1.0}}) == Status::Holds);
    CHECK(ceil_quotient({{BigInt(10), 1.0}}, {{BigInt(3), 1.0}}) == 4);
    CHECK(integer_root(BigInt(1000), 3) == 10);
    CHECK(integer_root(BigInt(999), 3) == 9);
    CHECK(smallest_holding(BigInt(1), [](const BigInt& x) { return x * x >= 50 ? Status::Holds : Status::Fails; }) ==
          8);
  }
}

TEST_SUITE("combiner") {
  TEST_CASE("two unit pairs") {
    auto two = FiniteSpace::dense({"a", "b"}, {ExtReal::one(), ExtReal::one()}, {0, 1, 1, 0});
    auto c = combine({two, two});
    CHECK(validate_space(c).ok());
    REQUIRE(c.cell_count() == 4);
    const double want[] = {0.4, 0.4, 0.1, 0.1};
    for (std::size_t i = 0; i < 4; ++i) CHECK(c.cell(i).weight.to_double() == doctest::Approx(want[i]).epsilon(1e-15));
    CHECK(realize_dense(c, 10).distance(0, 2) == 2.0);
    CHECK(c.total_measure().to_double() == doctest::Approx(1.0).epsilon(1e-15));

    auto note = ordering_note({two, two});
    REQUIRE(note.chain.size() == 1);
    CHECK(note.chain[0].holds);
    CHECK(note.chain[0].lightest_point.to_double() == doctest::Approx(0.4));
    CHECK(note.chain[0].twice_next_total.to_double() == doctest::Approx(0.4));
  }

  TEST_CASE("three equal components decay geometrically") {
    auto two = FiniteSpace::dense({"a", "b"}, {ExtReal::one(), ExtReal::one()}, {0, 1, 1, 0});
    auto note = ordering_note({two, two, two});
    REQUIRE(note.measure_scale.size() == 3);
    CHECK(ExtReal::rel_diff(note.measure_scale[1] / note.measure_scale[0], ExtReal(0.25)) < 1e-15);
    CHECK(ExtReal::rel_diff(note.measure_scale[2] / note.measure_scale[1], ExtReal(0.25)) < 1e-15);
    CHECK(ordering_note({}).chain.empty());
  }

  TEST_CASE("single component is a normalized copy") {
    auto s = gen_first_type(big({1, 1}));
    auto c = combine({s});
    CHECK(c.point_count() == 3);
    CHECK(ExtReal::rel_diff(c.total_measure(), ExtReal::one()) < 1e-15);
    CHECK(c.diameter() <= 1.0);
  }

  TEST_CASE("errors") {
    CHECK(code_of([] { combine({}); }) == ErrorCode::EmptyList);
  }

  TEST_CASE("combined generated spaces stay valid and metric-conditioned") {
    for (const auto& [name, space] : fixtures::combined_family()) {
      CAPTURE(name);
      CHECK(validate_space(space).ok());
      CHECK(space.generator() == GeneratorKind::Combined);
      CHECK(ExtReal::rel_diff(space.total_measure(), ExtReal::one()) < 1e-14);
      const auto& info = *space.combined();
      for (const auto& link : ordering_note(info.components).chain) CHECK(link.holds);
    }
  }
}
