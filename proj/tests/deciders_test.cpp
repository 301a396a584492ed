#include <doctest.h>

#include <random>
#include <set>

#include "oracles.hpp"
#include "rigidlab/deciders.hpp"

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

std::set<IndexSet> feasible_sets(const SequenceFamily& fam) {
  std::set<IndexSet> out;
  for (const auto& v : all_splits(fam))
    if (v.feasible) out.insert(v.F);
  return out;
}

const SequenceFamily n_2n = polys({{0, 1}, {0, 2}});
const SequenceFamily n_n2 = polys({{0, 1}, {0, 0, 1}});
const SequenceFamily b6_10_15 = polys({{0, 6}, {0, 10}, {0, 15}});

}  // namespace

TEST_SUITE("deciders") {

TEST_CASE("rigidity groups") {
  CHECK(is_rigidity_group(span({{2, -1}}, 2), n_2n));
  CHECK_FALSE(is_rigidity_group(Lattice(2), n_2n));
  CHECK(is_rigidity_group(Lattice::full(2), n_2n));
  CHECK(is_rigidity_group(Lattice::full(3), b6_10_15));
}

TEST_CASE("single splits of (n, 2n)") {
  SplitVerdict v = split_feasible(n_2n, {1});
  CHECK(v.feasible);
  CHECK_FALSE(v.witness);
  v = split_feasible(n_2n, {0});
  CHECK_FALSE(v.feasible);
  REQUIRE(v.witness);
  CHECK(v.witness->j == 1);
  CHECK(abs(v.witness->a[1]) == 1);
  CHECK(abs(v.witness->a[0]) == 2);
  CHECK(witness_valid(relation_group(n_2n), v.F, *v.witness));
  CHECK(split_feasible(n_2n, {}).feasible);
  CHECK_THROWS_AS(split_feasible(n_2n, {2}), Error);
}

TEST_CASE("split tables") {
  CHECK(feasible_sets(n_2n) == std::set<IndexSet>{{}, {1}, {0, 1}});
  CHECK(feasible_sets(b6_10_15).size() == 8);
  CHECK(feasible_sets(n_n2).size() == 4);
  std::vector<IntVec> many(21, int_vec({0, 1}));
  CHECK_THROWS_AS(all_splits(SequenceFamily::polynomial(many)), Error);
}

TEST_CASE("interpolation condition") {
  InterpolationVerdict v = interpolation_condition(b6_10_15);
  CHECK(v.holds);
  CHECK(v.adequate);
  v = interpolation_condition(n_2n);
  CHECK_FALSE(v.holds);
  REQUIRE(v.witness);
  CHECK(v.witness->j == 1);
  CHECK(witness_valid(relation_group(n_2n), {0}, *v.witness));
  CHECK(interpolation_condition(n_n2).holds);
  v = interpolation_condition(polys({{1, 1}, {0, 1}}));
  CHECK_FALSE(v.adequate);
  CHECK_FALSE(v.holds);
}

TEST_CASE("polynomial group condition") {
  CHECK(poly_group_condition(n_2n, {1}));
  CHECK_FALSE(poly_group_condition(n_2n, {0}));
  CHECK_FALSE(poly_group_condition(polys({{0, 1}, {0, 0, 1}, {0, 1, 1}}), {0, 1}));
  CHECK_THROWS_AS(poly_group_condition(polys({{1, 1}, {0, 1}}), {0}), Error);
}

TEST_CASE("split witness groups") {
  CHECK(split_witness_group(n_2n, {1}) == span({{2, 0}, {0, 1}}, 2));
  CHECK(split_witness_group(n_n2, {0, 1}) == Lattice::full(2));
  CHECK(split_witness_group(n_n2, {}) == span({{2, 0}, {0, 2}}, 2));
  CHECK_THROWS_AS(split_witness_group(n_2n, {0}), Error);
  for (const auto& fam : {n_2n, n_n2, b6_10_15})
    for (const auto& v : all_splits(fam, true)) {
      CHECK(v.feasible == v.H.has_value());
      if (v.H) CHECK(witness_group_valid(relation_group(fam), v.F, *v.H));
    }
}

TEST_CASE("checkers reject bad certificates") {
  Lattice A = relation_group(n_2n);
  CHECK_FALSE(witness_valid(A, {0}, SplitWitness{int_vec({2, -1}), 0}));
  CHECK_FALSE(witness_valid(A, {0}, SplitWitness{int_vec({1, -1}), 1}));
  CHECK_FALSE(witness_group_valid(A, {1}, Lattice::full(2)));
  CHECK(witness_group_valid(A, {1}, span({{2, -1}, {0, 1}}, 2)));
}

TEST_CASE("interpolation matches the full split table") {
  std::mt19937_64 rng(21);
  for (int it = 0; it < 60; ++it) {
    SequenceFamily fam = oracle::random_family(rng, true);
    InterpolationVerdict v = interpolation_condition(fam);
    auto splits = all_splits(fam);
    bool all = std::all_of(splits.begin(), splits.end(), [](const SplitVerdict& s) { return s.feasible; });
    CHECK(v.holds == all);
  }
}

TEST_CASE("deciders agree with the element scan") {
  std::mt19937_64 rng(22);
  for (int it = 0; it < 30; ++it) {
    SequenceFamily fam = oracle::random_family(rng, it % 2 == 0);
    auto elements = oracle::relation_elements(fam, 10);
    for (const auto& a : elements) REQUIRE(oracle::annihilates(fam, a));
    Lattice A = relation_group(fam);
    for (const auto& v : all_splits(fam)) {
      CHECK(v.feasible == oracle::split_by_scan(elements, v.F));
      if (!v.feasible) CHECK(witness_valid(A, v.F, *v.witness));
      if (fam.zero_constant_terms()) CHECK(poly_group_condition(fam, v.F) == v.feasible);
    }
  }
}

}  // TEST_SUITE
