#include <doctest.h>

#include <random>

#include "rigidlab/families.hpp"

using namespace rigidlab;

namespace {

SequenceFamily polys(std::initializer_list<std::initializer_list<long>> ps) {
  std::vector<IntVec> v;
  for (auto p : ps) v.push_back(int_vec(p));
  return SequenceFamily::polynomial(std::move(v));
}

Lattice span(std::initializer_list<std::initializer_list<long>> rs, std::size_t dim) {
  IntMat m;
  for (auto r : rs) m.push_back(int_vec(r));
  return canonicalize(m, dim);
}

SequenceFamily table(std::size_t len, std::vector<long (*)(long)> fs) {
  std::vector<IntVec> values;
  for (auto f : fs) {
    IntVec col;
    for (std::size_t n = 1; n <= len; ++n) col.push_back(f(static_cast<long>(n)));
    values.push_back(std::move(col));
  }
  return SequenceFamily::explicit_table(std::move(values));
}

}  // namespace

TEST_SUITE("families") {

TEST_CASE("evaluation") {
  CHECK(evaluate(polys({{0, 1}, {0, 0, 1}}), 3) == int_vec({3, 9}));
  CHECK(evaluate(polys({{1, 1}, {2, 0, 1}}), 2) == int_vec({3, 6}));
  auto sqrt2 = parse_multiplier("1.41421356");
  CHECK(evaluate(SequenceFamily::beatty({sqrt2}, true), 5) == int_vec({7}));
  CHECK(eval_poly(int_vec({0, -1, 0, 2}), -3) == -51);
}

TEST_CASE("multiplier parsing") {
  auto m = parse_multiplier("1.4142");
  CHECK(m.value == Rat(7071, 5000));
  CHECK(m.error == Rat(1, 10000));
  m = parse_multiplier("22/7");
  CHECK(m.value == Rat(22, 7));
  CHECK(m.error == 0);
  CHECK(parse_multiplier("-3").value == -3);
  CHECK_THROWS_AS(parse_multiplier("1.2.3"), Error);
  CHECK_THROWS_AS(parse_multiplier("x"), Error);
}

TEST_CASE("relation groups") {
  CHECK(relation_group(polys({{0, 1}, {0, 2}})) == span({{2, -1}}, 2));
  CHECK(relation_group(polys({{1, 1}, {2, 0, 1}})).is_trivial());
  Lattice A = relation_group(polys({{0, 6}, {0, 10}, {0, 15}}));
  CHECK(A.rank() == 2);
  CHECK(member(A, int_vec({5, -3, 0})));
  CHECK(member(A, int_vec({0, 3, -2})));
  CHECK(relation_group(SequenceFamily::beatty({parse_multiplier("1.4142"), parse_multiplier("1.7320")}, true))
            .is_trivial());
  auto t = table(20, {[](long n) { return n; }, [](long n) { return 2 * n; }});
  try {
    relation_group(t);
    FAIL("explicit table without relations must be undecidable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UndecidableFromSamples);
  }
}

TEST_CASE("adequacy") {
  CHECK(is_adequate(polys({{0, 1}, {0, 2}})).adequate);
  Adequacy a = is_adequate(polys({{1, 1}, {0, 1}}));
  CHECK_FALSE(a.adequate);
  REQUIRE(a.certificate);
  CHECK((*a.certificate == int_vec({1, -1}) || *a.certificate == int_vec({-1, 1})));
  CHECK(is_adequate(polys({{1, 1}, {2, 0, 1}, {3, 0, 0, 1}})).adequate);
}

TEST_CASE("reduction of (2n, 3n)") {
  Reduction r = reduce_family(polys({{0, 2}, {0, 3}}), span({{3, -2}}, 2));
  CHECK(r.family.indices == std::vector<std::size_t>{0});
  CHECK(r.family.relation[0] == int_vec({1}));
  CHECK(r.family.denominator[0] == 1);
  CHECK(r.family.relation[1] == int_vec({3}));
  CHECK(r.family.denominator[1] == 2);
  CHECK(r.family.M == 2);
  CHECK(r.image_group.is_trivial());
}

TEST_CASE("reduction of (n, 2n)") {
  Lattice G = lattice_sum(span({{2, -1}}, 2), span({{0, 1}}, 2));
  Reduction r = reduce_family(polys({{0, 1}, {0, 2}}), G);
  CHECK(r.family.indices == std::vector<std::size_t>{0});
  CHECK(r.family.M == 1);
  CHECK(r.image_group == span({{2}}, 1));
  CHECK_THROWS_AS(reduce_family(polys({{0, 1}, {0, 2}}), Lattice(2)), Error);
}

TEST_CASE("reduction replays as polynomial identities") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<long> coef(-4, 4);
  for (int it = 0; it < 100; ++it) {
    // A few independent polynomials plus rational combinations of them.
    std::size_t base = 1 + rng() % 2, extra = 1 + rng() % 2;
    std::vector<IntVec> ps;
    for (std::size_t i = 0; i < base; ++i) {
      IntVec p(4, 0);
      p[i + 1] = 1 + static_cast<long>(rng() % 3);
      for (std::size_t d = i + 2; d < 4; ++d) p[d] = coef(rng);
      ps.push_back(p);
    }
    for (std::size_t e = 0; e < extra; ++e) {
      IntVec p(4, 0);
      for (std::size_t i = 0; i < base; ++i) {
        long c = coef(rng);
        for (std::size_t d = 0; d < 4; ++d) p[d] += c * ps[i][d];
      }
      if (std::all_of(p.begin(), p.end(), [](const Int& x) { return x == 0; })) p[1] = 7;
      ps.push_back(p);
    }
    SequenceFamily fam = SequenceFamily::polynomial(ps);
    if (!is_adequate(fam).adequate) continue;
    Lattice A = relation_group(fam);
    Lattice G = lattice_sum(A, canonicalize({unit_vector(fam.size(), 0)}, fam.size()));
    Reduction r = reduce_family(fam, G);
    const auto& red = r.family;
    for (long n = 1; n <= 6; ++n) {
      IntVec v = evaluate(fam, n);
      for (std::size_t j = 0; j < fam.size(); ++j) {
        Int lhs = 0;
        for (std::size_t k = 0; k < red.c(); ++k) lhs += red.relation[j][k] * v[red.indices[k]];
        REQUIRE(lhs == red.denominator[j] * v[j]);
      }
    }
    // G maps into the image group; relations map to zero.
    for (const auto& d : G.basis()) CHECK(member(r.image_group, apply_image_map(red, d)));
    for (const auto& a : A.basis()) {
      IntVec w = apply_image_map(red, a);
      CHECK(std::all_of(w.begin(), w.end(), [](const Int& x) { return x == 0; }));
    }
  }
}

TEST_CASE("subfamilies") {
  SequenceFamily fam = polys({{0, 1}, {0, 0, 1}, {0, 1, 1}});
  SequenceFamily sub = subfamily(fam, {0, 2});
  CHECK(sub.size() == 2);
  CHECK(evaluate(sub, 4) == int_vec({4, 20}));
}

TEST_CASE("relation detection on tables") {
  auto lin = table(100, {[](long n) { return n; }, [](long n) { return 2 * n; }});
  CHECK(detect_relations(lin, 3, 20) == span({{2, -1}}, 2));
  auto sq = table(100, {[](long n) { return n; }, [](long n) { return n * n; }});
  CHECK(detect_relations(sq, 3, 20).is_trivial());
  auto osc = table(100, {[](long n) { return n; }, [](long n) { return n + (n % 2 == 0 ? 1L : -1L); }});
  CHECK(detect_relations(osc, 1, 20).is_trivial());
  CHECK_THROWS_AS(detect_relations(lin, 3, 200), Error);
}

TEST_CASE("explicit tables with supplied relations") {
  auto t = SequenceFamily::explicit_table({int_vec({1, 2, 3}), int_vec({2, 4, 6})}, span({{2, -1}}, 2));
  CHECK(relation_group(t) == span({{2, -1}}, 2));
  CHECK(relation_group_user_asserted(t));
}

}  // TEST_SUITE
