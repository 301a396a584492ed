#include <doctest.h>

#include <cmath>
#include <random>

#include "rigidlab/measure.hpp"

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

AtomicMeasure uniform_on(unsigned long q) { return AtomicMeasure::uniform_grid(q); }

std::vector<IntVec> box(std::size_t l, long b) {
  std::vector<IntVec> out;
  IntVec a(l, -b);
  while (true) {
    out.push_back(a);
    std::size_t i = 0;
    while (i < l && a[i] == b) a[i++] = -b;
    if (i == l) break;
    ++a[i];
  }
  return out;
}

}  // namespace

TEST_SUITE("measure") {

TEST_CASE("single sequence schedule") {
  SequenceFamily fam = polys({{0, 1}});
  Schedule s = build_schedule(fam, 1);
  REQUIRE(s.depth() == 1);
  CHECK(s.n[0] == 2);  // step 2 (k!)^2 at level 1
  CHECK(check_schedule(s, fam).all_pass());
}

TEST_CASE("schedules pass their own check and fail when perturbed") {
  SequenceFamily fam = polys({{0, 1}, {0, 0, 1}});
  for (std::size_t K : {3u, 4u, 5u}) {
    Schedule s = build_schedule(fam, K);
    REQUIRE(s.depth() == K);
    ScheduleReport r = check_schedule(s, fam);
    CHECK(r.all_pass());
    for (std::size_t k = 1; k < K; ++k) CHECK(s.n[k] > s.n[k - 1]);
    for (std::size_t k = 0; k < K; ++k) CHECK(s.n[k] % factorial(static_cast<unsigned>(k + 1)) == 0);

    Schedule bad = s;
    bad.alpha[K - 1][0] *= 2;
    ScheduleReport rb = check_schedule(bad, fam);
    CHECK_FALSE(rb.all_pass());
    CHECK((!rb.window.pass || !rb.diagonal.pass));
  }
  CHECK(check_schedule(Schedule{}, fam).all_pass());
  CHECK_THROWS_AS(build_schedule(polys({{0, 1}, {0, 2}}), 3), Error);
}

TEST_CASE("cell weights") {
  CellMeasure full = cell_weights(Lattice::full(3), 4);
  CHECK(full.weight({0, 0, 0}) == 1);
  CHECK(full.total() == 1);

  CellMeasure two = cell_weights(span({{2}}, 1), 2);
  CHECK(two.weight({0}) == Rat(1, 2));
  CHECK(two.weight({1}) == Rat(1, 2));

  CellMeasure nine = cell_weights(span({{3, 0}, {0, 3}}, 2), 3);
  CHECK(nine.finite_weights.size() == 9);
  for (unsigned long a : {0ul, 2ul, 4ul})
    for (unsigned long b : {0ul, 2ul, 4ul}) CHECK(nine.weight({a, b}) == Rat(1, 9));
  CHECK(nine.weight({1, 0}) == 0);

  std::mt19937_64 rng(31);
  std::uniform_int_distribution<long> e(-4, 4);
  for (int it = 0; it < 60; ++it) {
    std::size_t dim = 1 + rng() % 3;
    IntMat m(dim, IntVec(dim));
    for (auto& row : m)
      for (auto& x : row) x = e(rng);
    Lattice G = canonicalize(m, dim);
    if (!index_in_ambient(G)) continue;
    for (unsigned k = 1; k <= 4; ++k) CHECK(cell_weights(G, k).total() == 1);
  }
  CHECK(cell_weights(lattice_sum(span({{2, 0}}, 2), Lattice(2)), 3).total() == 1);
}

TEST_CASE("sampling") {
  SequenceFamily one = polys({{0, 1}});
  Schedule s = build_schedule(one, 2);
  AtomicMeasure delta = sample_sigma(Lattice::full(1), s, 500, 1);
  auto atoms = delta.atoms();
  REQUIRE(atoms.size() == 1);
  CHECK(atoms[0].x == 0);
  CHECK(sample_sigma(span({{2}}, 1), s, 1, 1).atoms().size() == 1);

  const std::size_t N = 10000;
  AtomicMeasure m = sample_sigma(span({{2}}, 1), s, N, 42);
  REQUIRE(m.factored());
  std::size_t ones = 0;
  for (std::size_t i = 0; i < N; ++i) ones += m.digits()[i * 2 + 1];
  CHECK(std::abs(static_cast<double>(ones) - N / 2.0) <= 3 * std::sqrt(N / 4.0));

  AtomicMeasure again = sample_sigma(span({{2}}, 1), s, N, 42);
  CHECK(again.digits() == m.digits());
}

TEST_CASE("Fourier coefficients") {
  CHECK(std::abs(fourier_coefficient(AtomicMeasure::dirac(0), 17) - 1.0) < 1e-15);
  AtomicMeasure half = uniform_on(2);
  CHECK(std::abs(fourier_coefficient(half, 3)) < 1e-12);
  CHECK(std::abs(fourier_coefficient(half, 4) - 1.0) < 1e-12);
  AtomicMeasure third = uniform_on(3);
  CHECK(std::abs(fourier_coefficient(third, 3) - 1.0) < 1e-12);
  CHECK(std::abs(fourier_coefficient(third, 1)) < 1e-12);
  Int huge("123456789012345678901234567890");
  CHECK(std::abs(fourier_coefficient(third, huge * 3) - 1.0) < 1e-12);
}

TEST_CASE("pushforward") {
  AtomicMeasure third = uniform_on(3);
  auto same = pushforward_scale(third, 1).atoms();
  CHECK(same.size() == 3);
  auto p = pushforward_scale(uniform_on(2), 2).atoms();
  REQUIRE(p.size() == 1);
  CHECK(p[0].x == 0);
  CHECK(p[0].w == 1);
  CHECK(pushforward_scale(third, 3).atoms().size() == 1);

  std::mt19937_64 rng(32);
  std::uniform_int_distribution<long> num(0, 96);
  for (int it = 0; it < 50; ++it) {
    std::vector<Atom> atoms;
    for (int i = 0; i < 6; ++i) atoms.push_back({ratio(num(rng), 97), Rat(1 + num(rng) % 5)});
    AtomicMeasure m = AtomicMeasure::from_atoms(atoms);
    long M = 1 + static_cast<long>(rng() % 12);
    AtomicMeasure pm = pushforward_scale(m, M);
    Rat total = 0;
    for (const auto& a : pm.atoms()) total += a.w;
    CHECK(total == 1);
    CHECK(std::abs(fourier_coefficient(m, 0) - 1.0) < 1e-12);
    for (long t = -5; t <= 5; ++t)
      CHECK(std::abs(fourier_coefficient(pm, t) - fourier_coefficient(m, M * t)) < 1e-12);
  }

  SequenceFamily fam = polys({{0, 1}, {0, 0, 1}});
  Schedule s = build_schedule(fam, 3);
  AtomicMeasure drawn = sample_sigma(span({{2, 0}, {0, 3}}, 2), s, 2000, 5);
  AtomicMeasure scaled = pushforward_scale(drawn, 6);
  for (long t : {1L, 7L, 1000003L})
    CHECK(std::abs(fourier_coefficient(scaled, t) - fourier_coefficient(drawn, 6 * t)) < 1e-12);
}

TEST_CASE("dichotomy checks") {
  SequenceFamily fam = polys({{0, 1}, {0, 0, 1}});
  Schedule s = build_schedule(fam, 3);
  DichotomyReport r = verify_dichotomy(AtomicMeasure::dirac(0), s, fam, Lattice::full(2), 2, 1e-12);
  CHECK(r.pass);
  CHECK(r.max_deviation_top == 0);
  for (const auto& row : r.rows) {
    bool zero = std::all_of(row.a.begin(), row.a.end(), [](const Int& x) { return x == 0; });
    if (zero) CHECK(row.deviation < 1e-15);
  }

  SequenceFamily one = polys({{0, 1}});
  Lattice G = span({{2}}, 1);
  GroupMeasure gm = build_measure_for_group(one, G, 5, 100000, 42);
  DichotomyReport d = verify_dichotomy(gm.measure, gm.schedule, one, G, 3, 0.15);
  CHECK(d.pass);
  CHECK(d.max_deviation_top <= 0.15);
}

TEST_CASE("measures for groups") {
  SequenceFamily fam = polys({{0, 1}, {0, 0, 1}});
  GroupMeasure gm = build_measure_for_group(fam, span({{2, 0}, {0, 3}}, 2), 3, 1000, 1);
  CHECK(gm.reduction.family.M == 1);
  CHECK(gm.reduction.family.c() == 2);

  SequenceFamily lin = polys({{0, 1}, {0, 2}});
  Lattice G = lattice_sum(span({{2, -1}}, 2), span({{0, 1}}, 2));
  GroupMeasure red = build_measure_for_group(lin, G, 3, 1000, 1);
  CHECK(red.reduction.family.c() == 1);
  CHECK(red.reduction.image_group == span({{2}}, 1));
  CHECK(check_schedule(red.schedule, subfamily(lin, red.reduction.family.indices)).all_pass());
  CHECK_THROWS_AS(build_measure_for_group(lin, Lattice(2), 3, 1000, 1), Error);
}

TEST_CASE("dichotomy through a reduction") {
  SequenceFamily lin = polys({{0, 1}, {0, 2}});
  Lattice G = lattice_sum(span({{2, -1}}, 2), span({{0, 1}}, 2));
  GroupMeasure gm = build_measure_for_group(lin, G, 5, 100000, 42);
  DichotomyReport d = verify_dichotomy(gm.measure, gm.schedule, lin, G, 2, 0.15);
  CHECK(d.pass);
  for (const auto& row : d.rows)
    if (row.level == 5) CHECK(row.target == character_integral(G, row.a));
}

TEST_CASE("uniformity at the last level") {
  SequenceFamily fam = polys({{0, 1}, {0, 0, 1}});
  const std::size_t K = 4;
  Schedule s = build_schedule(fam, K);
  std::mt19937_64 rng(33);
  auto directions = box(2, 2);
  for (int it = 0; it < 100; ++it) {
    std::vector<std::vector<unsigned long>> omega(K);
    for (std::size_t k = 0; k < K; ++k) {
      std::uniform_int_distribution<unsigned long> cell(0, factorial(static_cast<unsigned>(k + 1)).get_ui() - 1);
      omega[k] = {cell(rng), cell(rng)};
    }
    for (const auto& a : directions) REQUIRE(uniformity_distance(s, fam, omega, a) <= uniformity_bound(s, fam, a));
  }
}

TEST_CASE("circle norm") {
  CHECK(circle_norm(Rat(3, 4)) == Rat(1, 4));
  CHECK(circle_norm(Rat(-7, 3)) == Rat(1, 3));
  CHECK(circle_norm(Rat(5)) == 0);
}

}  // TEST_SUITE
