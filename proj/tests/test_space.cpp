#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "lmx/generators.hpp"
#include "lmx/space.hpp"
#include "lmx/space_io.hpp"

using namespace lmx;

TEST_SUITE("space") {
  TEST_CASE("ext_real arithmetic stays exact on powers of two") {
    const ExtReal big = ExtReal::pow2(1 << 20);
    CHECK((big * big).log2() == doctest::Approx(double(1 << 21)));
    CHECK((big / big) == ExtReal::one());
    CHECK(ExtReal::from_int(BigInt(12)).to_double() == 12.0);
    CHECK(ExtReal(3.0).pow(0.5).to_double() == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));
    CHECK(ExtReal::zero().pow(2).is_zero());
    CHECK(ExtReal::zero().pow(0) == ExtReal::one());
    CHECK((ExtReal(5.0) - ExtReal(2.0)).to_double() == 3.0);
    CHECK((ExtReal(1.0) - ExtReal(2.0)).is_zero());
    CHECK(ExtReal(1.5).scaled_pow2(-3).to_double() == 1.5 / 8);
    CHECK(ExtReal::rel_diff(ExtReal::zero(), ExtReal::zero()) == 0.0);
    CHECK(ExtReal::from_log2(-100000).to_double() == 0.0);
  }

  TEST_CASE("sum_largest_first ignores input order") {
    std::vector<ExtReal> a{ExtReal(1e-17), ExtReal(1.0), ExtReal(1e-17), ExtReal(3.0)};
    std::vector<ExtReal> b{a[3], a[0], a[1], a[2]};
    CHECK(sum_largest_first(a) == sum_largest_first(b));
  }

  TEST_CASE("two-point dense space is valid") {
    auto s = FiniteSpace::dense({"a", "b"}, {ExtReal(1.0), ExtReal(1.0)}, {0, 1, 1, 0});
    CHECK(validate_space(s).ok());
    CHECK(s.point_count() == 2);
    CHECK(s.total_measure().to_double() == 2.0);
  }

  TEST_CASE("asymmetric matrix reports symmetry") {
    auto s = FiniteSpace::dense({"a", "b"}, {ExtReal(1.0), ExtReal(1.0)}, {0, 1, 2, 0});
    CHECK(validate_space(s).has("symmetry"));
  }

  TEST_CASE("profile missing a cell reports coverage") {
    std::vector<Cell> cells{{"a", BigInt(1), ExtReal::one(), {}, SplitRule::None},
                            {"b", BigInt(1), ExtReal::one(), {}, SplitRule::None}};
    auto s = FiniteSpace::cellular(cells, {{{0.0, {{0, BigInt(1)}}}, {1.0, {{0, BigInt(1)}, {1, BigInt(1)}}}},
                                           {{0.0, {{1, BigInt(1)}}}}});
    CHECK(validate_space(s).has("coverage"));
  }

  TEST_CASE("first-type realization has the expected metric") {
    auto d = realize_dense(gen_first_type(fixtures::big({1, 1})), 100);
    REQUIRE(d.cell_count() == 3);
    CHECK(d.distance(0, 1) == 1.0);
    CHECK(d.distance(0, 2) == 1.0);
    CHECK(d.distance(1, 2) == 2.0);
    CHECK(validate_space(d).ok());
  }

  TEST_CASE("layered block space realizes to 39 valid points") {
    auto s = gen_second_type(synth_second_type(2, 2, 2, 2));
    CHECK(s.point_count() == 39);
    auto d = realize_dense(s, 100);
    CHECK(d.cell_count() == 39);
    CHECK(validate_space(d).ok());
    CHECK_THROWS_AS(realize_dense(s, 10), Error);
  }

  TEST_CASE("one-point cellular space realizes to one point") {
    auto s = FiniteSpace::cellular({{"x", BigInt(1), ExtReal(2.0), {}, SplitRule::None}}, {{{0.0, {{0, BigInt(1)}}}}});
    auto d = realize_dense(s, 10);
    CHECK(d.cell_count() == 1);
    CHECK(d.cell(0).weight == ExtReal(2.0));
  }

  TEST_CASE("positional split of the upper level") {
    auto s = gen_second_type(synth_second_type(2, 2, 2, 2));
    auto t = split_cell(s, "T_2", BigInt(1));
    CHECK(validate_space(t).ok());
    CHECK(t.point_count() == s.point_count());
    std::vector<BigInt> parts;
    for (const auto& c : t.cells()) {
      if (c.has_tag("T°_2")) parts.push_back(c.count);
    }
    REQUIRE(parts.size() == 2);
    CHECK(parts[0] == 16);
    CHECK(parts[1] == 16);
    CHECK_THROWS_AS(split_cell(t, "T_1", BigInt(1)), Error);
  }

  TEST_CASE("split with gamma equal to the count is rejected") {
    auto s = gen_first_type(fixtures::big({1, 3}));
    try {
      split_cell(s, "S_2", BigInt(3));
      FAIL("expected IllegalSplit");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::IllegalSplit);
    }
  }

  TEST_CASE("interchangeable split keeps profile shapes") {
    auto [s, plan] = gen_first_type_prime(fixtures::big({1, 2}));
    auto t = split_cell(s, "S_1.head", BigInt(1));
    CHECK(validate_space(t).ok());
    CHECK(t.point_count() == s.point_count());
    const auto a = t.cell_index("S_1.head:a");
    const auto orig = s.cell_index("S_1.head");
    CHECK(t.profile(a).balls.size() == s.profile(orig).balls.size());
    for (std::size_t i = 0; i < t.profile(a).balls.size(); ++i) {
      CHECK(t.profile(a).balls[i].radius == s.profile(orig).balls[i].radius);
      CHECK(t.profile(a).balls[i].mass == s.profile(orig).balls[i].mass);
    }
  }

  TEST_CASE("dense and cellular conversions agree on every generated space") {
    for (const auto& [name, space] : fixtures::oracle_family()) {
      CAPTURE(name);
      CHECK(validate_space(space).ok());
      auto d = realize_dense(space, 1000);
      CHECK(validate_space(d).ok());
      CHECK(d.point_count() == space.point_count());
      CHECK(ExtReal::rel_diff(d.total_measure(), space.total_measure()) < 1e-14);
      auto c = to_cellular(d);
      CHECK(validate_space(c).ok());
    }
  }

  TEST_CASE("space JSON round trip keeps exact weights") {
    for (const auto& [name, space] : fixtures::oracle_family()) {
      if (name.rfind("first(", 0) == 0 && space.cell_count() > 3) continue;
      CAPTURE(name);
      auto back = space_from_json(space_to_json(space));
      REQUIRE(back.cell_count() == space.cell_count());
      for (std::size_t i = 0; i < space.cell_count(); ++i) {
        CHECK(back.cell(i).id == space.cell(i).id);
        CHECK(back.cell(i).count == space.cell(i).count);
        CHECK(back.cell(i).weight == space.cell(i).weight);
        CHECK(back.profile(i).balls.size() == space.profile(i).balls.size());
      }
      CHECK(back.generator() == space.generator());
      CHECK(space_to_json(back).dump() == space_to_json(space).dump());
    }
  }

  TEST_CASE("malformed JSON is a parse error") {
    try {
      space_from_json(Json::parse(R"({"kind":"cellular","cells":[{"id":"a"}]})"));
      FAIL("expected Parse");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Parse);
    }
  }
}
