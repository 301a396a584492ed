#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "rigidlab/dynamics.hpp"

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

const CircleSet two_thirds = CircleSet::arc(0, Rat(2, 3));
constexpr double kInf = std::numeric_limits<double>::infinity();

Rat power(const Rat& x, unsigned e) {
  Rat out = 1;
  for (unsigned i = 0; i < e; ++i) out *= x;
  return out;
}

// Every set in play is a union of arcs with endpoints in (1/3)Z, so sampling
// midpoints 1/6, 1/2, 5/6 integrates the y variable exactly.
Rat thirds_oracle(unsigned ell) {
  Rat total = 0;
  std::size_t count = 0;
  std::vector<unsigned> digit(ell, 0);
  while (true) {
    if (digit.size() < 2 || (2 * digit[0]) % 3 == digit[1]) {
      ++count;
      for (Rat y : {Rat(1, 6), Rat(1, 2), Rat(5, 6)}) {
        bool in = two_thirds.contains(y);
        for (unsigned j = 0; j < ell && in; ++j) in = two_thirds.contains(frac(y + ratio(digit[j], 3)));
        if (in) total += Rat(1, 3);
      }
    }
    std::size_t i = 0;
    while (i < ell && digit[i] == 2) digit[i++] = 0;
    if (i == ell) break;
    ++digit[i];
  }
  return total / count;
}

CorrelationPattern identity_pattern(std::size_t ell) {
  CorrelationPattern p;
  for (std::size_t j = 0; j < ell; ++j) {
    p.finite.push_back(unit_vector(ell, j));
    p.free.push_back({});
  }
  return p;
}

CircleSet random_set(std::mt19937_64& rng, unsigned long q) {
  std::vector<Interval> parts;
  for (unsigned long k = 0; k < q; ++k)
    if (rng() % 2) parts.push_back({ratio(k, q), ratio(k + 1, q)});
  return CircleSet::from_intervals(parts);
}

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("circle sets") {
  CircleSet s = CircleSet::from_intervals({{Rat(1, 2), Rat(3, 4)}, {0, Rat(1, 4)}, {Rat(1, 4), Rat(1, 3)}});
  REQUIRE(s.intervals().size() == 2);
  CHECK(s.measure() == Rat(7, 12));
  CHECK(s.contains(Rat(1, 4)));
  CHECK_FALSE(s.contains(Rat(1, 3)));
  CHECK(s.contains(Rat(-1, 2)));
  CHECK(s.contains(0.6));
  CHECK(CircleSet::full().measure() == 1);
  CHECK(CircleSet().measure() == 0);
  CHECK(s == CircleSet::from_intervals(s.intervals()));
}

TEST_CASE("overlaps") {
  CHECK(overlap_measure(two_thirds, {Rat(1, 3), Rat(2, 3)}) == 0);
  CHECK(overlap_measure(two_thirds, {Rat(1, 3)}) == Rat(1, 3));
  CHECK(overlap_measure(two_thirds, {}) == Rat(2, 3));
  CHECK(std::abs(overlap_measure({{0.0, 2.0 / 3}}, {1.0 / 3}) - 1.0 / 3) < 1e-12);
}

TEST_CASE("skew correlations") {
  SkewSystem third{AtomicMeasure::dirac(Rat(1, 3))};
  CHECK(skew_correlation_exact(third, two_thirds, {1, 2}) == 0);
  SkewSystem zero{AtomicMeasure::dirac(0)};
  CHECK(skew_correlation_exact(zero, two_thirds, {5, 17}) == Rat(2, 3));
  CHECK(skew_correlation_exact(third, two_thirds, {0, 0}) == Rat(2, 3));
  Estimate e = skew_correlation(third, two_thirds, {1, 2});
  CHECK(std::abs(e.value) < 1e-12);
  CHECK(e.std_error == 0);
}

TEST_CASE("T-invariance") {
  std::mt19937_64 rng(41);
  for (int it = 0; it < 100; ++it) {
    std::vector<Atom> atoms;
    for (int i = 0; i < 4; ++i) atoms.push_back({ratio(static_cast<long>(rng() % 30), 30), 1});
    SkewSystem sys{AtomicMeasure::from_atoms(atoms)};
    CircleSet B = random_set(rng, 6);
    std::vector<Int> shifts;
    for (int i = 0; i < 3; ++i) shifts.push_back(static_cast<long>(rng() % 20) - 10);
    std::vector<Int> padded = shifts;
    padded.insert(padded.begin(), 0);
    CHECK(skew_correlation_exact(sys, B, shifts) == skew_correlation_exact(sys, B, padded));
  }
}

TEST_CASE("exact correlations match the finite Haar average") {
  std::mt19937_64 rng(42);
  for (unsigned long q = 1; q <= 12; ++q) {
    SkewSystem sys{AtomicMeasure::uniform_grid(q)};
    std::vector<RatVec> reps;
    for (unsigned long k = 0; k < q; ++k) reps.push_back({ratio(k, q)});
    for (int it = 0; it < 10; ++it) {
      CircleSet B = random_set(rng, 1 + rng() % 8);
      std::vector<Int> shifts;
      CorrelationPattern p;
      for (int i = 0; i < 3; ++i) {
        long s = static_cast<long>(rng() % 15) - 7;
        shifts.push_back(s);
        p.finite.push_back(int_vec({s}));
        p.free.push_back({});
      }
      CHECK(skew_correlation_exact(sys, B, shifts) == haar_correlation_limit(reps, B, p));
    }
  }
}

TEST_CASE("Haar limits") {
  for (unsigned ell = 2; ell <= 8; ++ell) {
    Rat limit = haar_correlation_limit(thirds_points(ell), two_thirds, identity_pattern(ell));
    CHECK(limit == Rat(Int(1) << (ell - 1), Int(3) * power(3, ell - 1).get_num()));
    CHECK(limit == thirds_oracle(ell));
  }
  CorrelationPattern free1;
  free1.finite = {IntVec{}};
  free1.free = {int_vec({1})};
  free1.free_count = 1;
  CircleSet B = CircleSet::arc(Rat(1, 5), Rat(1, 2));
  CHECK(haar_correlation_limit({RatVec{}}, B, free1) == B.measure() * B.measure());
  CorrelationPattern three = free1;
  three.free_count = 3;
  CHECK_THROWS_AS(haar_correlation_limit({RatVec{}}, B, three), Error);
}

TEST_CASE("strip integrals") {
  CircleSet half = CircleSet::arc(0, Rat(1, 2));
  CHECK(strip_integral(half, {0}, {1}) == Rat(1, 4));
  CHECK(strip_integral(half, {}, {}) == Rat(1, 2));
  CircleSet tenth = CircleSet::arc(0, Rat(1, 10));
  CHECK(strip_integral(tenth, {0, 0}, {1, 2}) == Rat(1, 200));
}

TEST_CASE("finite sum tails") {
  auto sums = [](const FSTail& t) {
    std::vector<long> out;
    for (const auto& s : t.sums) out.push_back(s.get_si());
    std::sort(out.begin(), out.end());
    return out;
  };
  std::vector<Int> g{1, 2, 4};
  CHECK(sums(fs_tail(g, 0)) == std::vector<long>{1, 2, 3, 4, 5, 6, 7});
  CHECK(sums(fs_tail(g, 1)) == std::vector<long>{2, 4, 6});
  CHECK(sums(fs_tail({6, 24, 120}, 0)) == std::vector<long>{6, 24, 30, 120, 126, 144, 150});
  FSTail t = fs_tail(g, 1);
  for (std::size_t i = 0; i < t.alphas.size(); ++i) {
    Int s = 0;
    for (auto a : t.alphas[i]) s += g[a - 1];
    CHECK(s == t.sums[i]);
  }
  CHECK_THROWS_AS(fs_tail({2, 1}, 0), Error);
}

TEST_CASE("scan rows reproduce on re-evaluation") {
  SequenceFamily fam = polys({{0, 1}, {0, 0, 1}});
  GroupMeasure gm = build_measure_for_group(fam, span({{2, 0}, {0, 3}}, 2), 4, 5000, 3);
  std::vector<Int> gens = gm.schedule.n;
  std::vector<IntVec> shifts = {int_vec({0, 1}), int_vec({0, 0, 1})};
  ScanResult r = fs_scan(gm.measure, gens, shifts, two_thirds, Rat(7, 27), 3);
  CHECK(r.rows.size() == 15);
  for (const auto& row : r.rows) {
    ScanRow again = rescan(gm.measure, gens, shifts, two_thirds, Rat(7, 27), row.alpha);
    CHECK(again.correlation == row.correlation);
    CHECK(again.n_alpha == row.n_alpha);
    CHECK(again.verdict == row.verdict);
  }

  ScanResult hits = fs_scan(AtomicMeasure::dirac(0), gens, shifts, two_thirds, Rat(1, 2), 3);
  CHECK_FALSE(hits.k0);
  for (const auto& row : hits.rows) CHECK(row.verdict == "HIT");
}

TEST_CASE("Behrend sets") {
  BehrendSet one = behrend_set(1);
  CHECK(one.set == CircleSet::arc(0, Rat(1, 10)));
  auto [integral, bound] = verify_behrend(one.set, 1);
  CHECK(integral == Rat(1, 200));
  CHECK(bound == Rat(1, 20));

  BehrendSet three = behrend_set(3);
  auto [i3, b3] = verify_behrend(three.set, 3);
  CHECK(i3 <= b3);
  CHECK(i3 == three.integral);
  CHECK(b3 == power(three.set.measure(), 3) / 2);

  CHECK(verify_behrend(CircleSet(), 2) == std::pair<Rat, Rat>{0, 0});
  auto [full_i, full_b] = verify_behrend(CircleSet::full(), 3);
  CHECK(full_i == 1);
  CHECK(full_b == Rat(1, 2));
  CHECK(full_i > full_b);

  for (const auto& B : {one.set, three.set, CircleSet::arc(Rat(1, 7), Rat(5, 9))}) {
    GridCheck g = behrend_grid_quadrature(B);
    CHECK(std::abs(g.estimate - verify_behrend(B, 1).first.get_d()) <= g.error_bound);
  }
}

TEST_CASE("Gaussian pair masses") {
  const RealInterval neg{-kInf, 0};
  CHECK(std::abs(gaussian_pair_mass(0.5, neg, neg) - 1.0 / 3) < 1e-8);
  const RealInterval I{-1, 0}, J{0.3, 2};
  CHECK(std::abs(gaussian_pair_mass(0, I, J) - normal_mass(I) * normal_mass(J)) < 1e-8);
  CHECK(std::abs(gaussian_pair_mass(1, I, I) - normal_mass(I)) < 1e-12);
  CHECK(std::abs(gaussian_pair_mass(-1, neg, neg)) < 1e-12);
  const RealInterval line{-kInf, kInf};
  CHECK(std::abs(gaussian_pair_mass(0.3, line, line) - 1) < 1e-8);
  double prev = -1;
  for (int i = -9; i <= 9; ++i) {
    double rho = i / 10.0;
    double m = gaussian_pair_mass(rho, neg, neg);
    CHECK(std::abs(m - (0.25 + std::asin(rho) / (2 * M_PI))) < 1e-8);
    CHECK(m > prev);
    prev = m;
  }
}

TEST_CASE("Gaussian transfer") {
  SequenceFamily one = polys({{0, 1}});
  Schedule s = build_schedule(one, 3);
  TransferReport r = verify_gaussian_transfer(AtomicMeasure::dirac(0), s, one, Lattice::full(1), {-1, 0}, 1e-12);
  CHECK(r.pass);
  for (const auto& row : r.rows) CHECK(row.rigid);

  Lattice G = span({{2}}, 1);
  GroupMeasure gm = build_measure_for_group(one, G, 5, 20000, 4);
  TransferReport full = verify_gaussian_transfer(gm.measure, gm.schedule, one, G, {-kInf, kInf}, 1e-8, {int_vec({1}), int_vec({2})});
  CHECK(full.pass);
}

TEST_CASE("cor65 ledger") {
  DemoOptions opt;
  opt.scan = false;
  opt.samples = 2000;
  Cor65Report r2 = cor65_demo({int_vec({0, 1}), int_vec({0, 0, 1})}, opt);
  CHECK(r2.limit == Rat(2, 9));
  CHECK(r2.nu_power == Rat(8, 27));
  CHECK(r2.gap == Rat(2, 27));
  CHECK(r2.epsilon == Rat(1, 27));
  CHECK(r2.threshold == Rat(7, 27));
  CHECK(r2.limit_matches_closed_form);
  CHECK(r2.gap_at_least_two_epsilon);
  CHECK(index_in_ambient(r2.G).has_value());

  Cor65Report r3 = cor65_demo({int_vec({0, 1}), int_vec({0, 0, 1}), int_vec({0, 0, 0, 1})}, opt);
  CHECK(r3.limit == Rat(4, 27));
  CHECK(r3.nu_power == Rat(16, 81));
  CHECK(r3.gap == Rat(4, 81));
  CHECK(r3.epsilon == Rat(1, 81));

  CHECK_THROWS_AS(cor65_demo({int_vec({0, 1}), int_vec({0, 2})}, opt), Error);
}

TEST_CASE("degree condition") {
  CHECK_NOTHROW(check_degree_condition(int_vec({0, 1, 1}), int_vec({0, 3, 2})));
  CHECK_THROWS_AS(check_degree_condition(int_vec({0, 1, 1}), int_vec({0, 3, 1})), Error);
  CHECK_THROWS_AS(check_degree_condition(int_vec({0, 0, 1}), int_vec({0, 0, 2})), Error);
  CHECK_THROWS_AS(check_degree_condition(int_vec({0, 0, 1}), int_vec({0, 0, 1, 1})), Error);
}

TEST_CASE("cor67 limits") {
  CircleSet tenth = CircleSet::arc(0, Rat(1, 10));
  // y1 = 0 contributes mu(B)^2, y1 = 1/2 leaves B and B - 1/2 disjoint.
  CHECK(cor67_limit(tenth, 2) == Rat(1, 200));
  CHECK(cor67_limit(CircleSet(), 5) == 0);
  Rat uniform = strip_integral(tenth, {0, 0}, {1, 2}) * tenth.measure();
  CHECK(abs(Rat(cor67_limit(tenth, 997) - uniform)) <= ratio(6, 10 * 2 * 997));
}

}  // TEST_SUITE
