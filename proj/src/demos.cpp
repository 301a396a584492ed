#include <algorithm>
#include <cmath>

#include "rigidlab/dynamics.hpp"

namespace rigidlab {

namespace {

std::size_t degree(const IntVec& p) {
  std::size_t d = 0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] != 0) d = i;
  return d;
}

bool is_zero(const IntVec& p) {
  return std::all_of(p.begin(), p.end(), [](const Int& c) { return c == 0; });
}

// Coordinates of p in the monomial basis n, n^2, ..., n^D.
IntVec monomial_coords(const IntVec& p, std::size_t D) {
  IntVec c(D, 0);
  for (std::size_t s = 1; s < p.size() && s <= D; ++s) c[s - 1] = p[s];
  return c;
}

SequenceFamily monomials(std::size_t D) {
  std::vector<IntVec> polys;
  for (std::size_t s = 1; s <= D; ++s) {
    IntVec p(s + 1, 0);
    p[s] = 1;
    polys.push_back(std::move(p));
  }
  return SequenceFamily::polynomial(std::move(polys));
}

Rat power(const Rat& x, unsigned e) {
  Rat r = 1;
  for (unsigned i = 0; i < e; ++i) r *= x;
  return r;
}

bool in_rational_span(const Lattice& L, const IntVec& v) {
  IntMat rows = L.basis();
  rows.push_back(v);
  return canonicalize(rows, L.ambient_dim()).rank() == L.rank();
}

// Builds the measure, takes the first `generators` schedule indices, and scans.
struct Pipeline {
  Schedule schedule;
  std::vector<Int> generators;
  std::optional<ScanResult> scan;
};

Pipeline run_pipeline(const SequenceFamily& fam, const Lattice& G, const std::vector<IntVec>& shifts,
                      const CircleSet& B, const Rat& threshold, const DemoOptions& opt) {
  if (opt.generators == 0) fail(ErrorCode::Precondition, "need at least one generator");
  const std::size_t depth = std::max(opt.depth, opt.generators);
  SchedulePolicy policy;
  // Every later index absorbs the diagonal targets of the earlier levels.
  policy.base_modulus = factorial(static_cast<unsigned>(depth)) * factorial(static_cast<unsigned>(depth));
  policy.modulus_from = 3;
  GroupMeasure gm = build_measure_for_group(fam, G, depth, opt.samples, opt.seed, policy);
  Pipeline out;
  out.schedule = gm.schedule;
  out.generators.assign(gm.schedule.n.begin(), gm.schedule.n.begin() + static_cast<long>(opt.generators));
  if (opt.scan) out.scan = fs_scan(gm.measure, out.generators, shifts, B, threshold, opt.k0_max);
  return out;
}

}  // namespace

std::vector<RatVec> thirds_points(std::size_t ell) {
  if (ell < 2) fail(ErrorCode::Precondition, "need at least two coordinates");
  std::vector<RatVec> pts;
  std::vector<unsigned> a(ell - 1, 0);  // a_0, a_3, ..., a_ell
  while (true) {
    RatVec y(ell, 0);
    y[0] = ratio(a[0], 3);
    y[1] = frac(ratio(2 * a[0], 3));
    for (std::size_t s = 2; s < ell; ++s) y[s] = ratio(a[s - 1], 3);
    pts.push_back(std::move(y));
    std::size_t i = 0;
    while (i < a.size() && a[i] == 2) a[i++] = 0;
    if (i == a.size()) break;
    ++a[i];
  }
  return pts;
}

Cor65Report cor65_demo(const std::vector<IntVec>& polys, const DemoOptions& opt) {
  const std::size_t ell = polys.size();
  if (ell < 2) fail(ErrorCode::Precondition, "need at least two polynomials");
  std::size_t D = 0;
  for (const auto& p : polys) {
    if (is_zero(p)) fail(ErrorCode::Precondition, "zero polynomial");
    if (p[0] != 0) fail(ErrorCode::Precondition, "polynomials must have zero constant term");
    D = std::max(D, degree(p));
  }
  std::vector<IntVec> c;
  for (const auto& p : polys) c.push_back(monomial_coords(p, D));
  if (canonicalize(c, D).rank() != ell) fail(ErrorCode::Precondition, "polynomials are linearly dependent");

  Cor65Report rep;
  rep.polys = polys;
  IntMat gens;
  IntVec first(D);
  for (std::size_t s = 0; s < D; ++s) first[s] = -2 * c[0][s] + c[1][s];
  gens.push_back(first);
  for (const auto& v : c) {
    IntVec w = v;
    for (auto& x : w) x *= 3;
    gens.push_back(std::move(w));
  }
  rep.G_prime = canonicalize(gens, D);
  rep.G = rep.G_prime;
  if (!index_in_ambient(rep.G_prime)) {
    // Pad with 3 e_t for coordinates t outside the rational span, ascending.
    for (std::size_t t = 0; t < D && rep.G.rank() < D; ++t) {
      IntVec e = unit_vector(D, t);
      if (in_rational_span(rep.G, e)) continue;
      rep.padding.push_back(t);
      IntMat rows = rep.G.basis();
      for (auto& x : e) x *= 3;
      rows.push_back(std::move(e));
      rep.G = canonicalize(rows, D);
    }
    if (!index_in_ambient(rep.G)) fail(ErrorCode::SearchExhausted, "no padding coordinates complete the group");
  }

  // H = {a : sum_j a_j c_j in G'}: kernel of [c; -basis(G')] projected to the first ell coordinates.
  IntMat stacked = c;
  for (const auto& g : rep.G_prime.basis()) {
    IntVec w = g;
    for (auto& x : w) x = -x;
    stacked.push_back(std::move(w));
  }
  Lattice K = kernel(stacked, stacked.size(), D);
  IntMat proj;
  for (const auto& v : K.basis()) proj.emplace_back(v.begin(), v.begin() + static_cast<long>(ell));
  rep.H = canonicalize(proj, ell);

  const CircleSet B = CircleSet::arc(0, Rat(2, 3));
  TorusSubgroup ann = annihilator(rep.H);
  if (ann.torus_directions.rank() != 0) fail(ErrorCode::UnsupportedShape, "combination group has infinite index");
  rep.limit_points = ann.finite_reps.size();
  CorrelationPattern pattern;
  for (std::size_t j = 0; j < ell; ++j) {
    pattern.finite.push_back(unit_vector(ell, j));
    pattern.free.emplace_back();
  }
  rep.limit = haar_correlation_limit(ann.finite_reps, B, pattern);
  rep.nu_power = power(Rat(2, 3), static_cast<unsigned>(ell + 1));
  rep.gap = rep.nu_power - rep.limit;
  rep.epsilon = Rat(1) / power(Rat(3), static_cast<unsigned>(ell + 1));
  rep.threshold = rep.nu_power - rep.epsilon;
  rep.limit_matches_closed_form = rep.limit == power(Rat(2), static_cast<unsigned>(ell - 1)) /
                                                   power(Rat(3), static_cast<unsigned>(ell));
  rep.gap_at_least_two_epsilon = rep.gap >= 2 * rep.epsilon;

  rep.requested_depth = opt.depth;
  rep.measure_depth = std::max(opt.depth, opt.generators);
  Pipeline pl = run_pipeline(monomials(D), rep.G, polys, B, rep.threshold, opt);
  rep.schedule = std::move(pl.schedule);
  rep.generators = std::move(pl.generators);
  rep.scan = std::move(pl.scan);
  return rep;
}

void check_degree_condition(const IntVec& p, const IntVec& q) {
  if (is_zero(p) || is_zero(q)) fail(ErrorCode::Precondition, "polynomials must be nonzero");
  if (p[0] != 0 || (!q.empty() && q[0] != 0)) fail(ErrorCode::Precondition, "polynomials must have zero constant term");
  const std::size_t dp = degree(p), dq = degree(q);
  if (dp != dq) fail(ErrorCode::Precondition, "deg p = " + std::to_string(dp) + " differs from deg q = " + std::to_string(dq));
  IntVec diff(std::max(p.size(), q.size()), 0);
  for (std::size_t i = 0; i < diff.size(); ++i)
    diff[i] = 2 * (i < p.size() ? p[i] : Int(0)) - (i < q.size() ? q[i] : Int(0));
  if (is_zero(diff)) fail(ErrorCode::Precondition, "2p - q vanishes");
  const std::size_t dd = degree(diff);
  if (dd >= dp) fail(ErrorCode::Precondition, "deg(2p - q) must be below deg p");
  if (dd == 0) fail(ErrorCode::Precondition, "deg(2p - q) must be positive");
}

Cor66Report cor66_demo(const IntVec& p, const IntVec& q, unsigned ell, const DemoOptions& opt) {
  check_degree_condition(p, q);
  Cor66Report rep;
  rep.p = p;
  rep.q = q;
  rep.degree = degree(p);
  rep.difference.assign(std::max(p.size(), q.size()), 0);
  for (std::size_t i = 0; i < rep.difference.size(); ++i)
    rep.difference[i] = 2 * (i < p.size() ? p[i] : Int(0)) - (i < q.size() ? q[i] : Int(0));
  while (rep.difference.size() > 1 && rep.difference.back() == 0) rep.difference.pop_back();
  rep.ell = ell;
  rep.behrend = behrend_set(ell);
  const CircleSet& B = rep.behrend.set;
  std::tie(rep.limit, rep.bound) = verify_behrend(B, ell);
  // Low coordinates rigid, top coordinate free: factors y + tau and y + 2 tau.
  CorrelationPattern pattern{{IntVec{}, IntVec{}}, {int_vec({1}), int_vec({2})}, 1};
  rep.limit_matches_behrend = haar_correlation_limit({RatVec{}}, B, pattern) == rep.limit;
  rep.threshold = power(B.measure(), ell);

  const std::size_t N = rep.degree;
  IntMat low;
  for (std::size_t s = 0; s + 1 < N; ++s) low.push_back(unit_vector(N, s));
  Pipeline pl = run_pipeline(monomials(N), canonicalize(low, N), {p, q}, B, rep.threshold, opt);
  rep.schedule = std::move(pl.schedule);
  rep.generators = std::move(pl.generators);
  rep.scan = std::move(pl.scan);
  return rep;
}

Rat cor67_limit(const CircleSet& B, unsigned long p) {
  if (p == 0) fail(ErrorCode::Precondition, "modulus must be positive");
  std::vector<RatVec> reps;
  for (unsigned long k = 0; k < p; ++k) reps.push_back({ratio(k, p)});
  CorrelationPattern pattern{{int_vec({1}), int_vec({2}), int_vec({0})}, {int_vec({0}), int_vec({0}), int_vec({1})}, 1};
  return haar_correlation_limit(reps, B, pattern);
}

Cor67Report cor67_demo(unsigned ell, const std::vector<unsigned long>& primes, const DemoOptions& opt) {
  for (std::size_t i = 0; i < primes.size(); ++i) {
    if (primes[i] < 2) fail(ErrorCode::Precondition, "moduli must be primes");
    for (unsigned long d = 2; d * d <= primes[i]; ++d)
      if (primes[i] % d == 0) fail(ErrorCode::Precondition, std::to_string(primes[i]) + " is not prime");
    if (i > 0 && primes[i] <= primes[i - 1]) fail(ErrorCode::Precondition, "primes must increase");
  }
  Cor67Report rep;
  rep.ell = ell;
  rep.behrend = behrend_set(ell);
  const CircleSet& B = rep.behrend.set;
  const Rat mu = B.measure();
  rep.uniform_limit = mu * rep.behrend.integral;
  rep.bound = mu * rep.behrend.bound;
  rep.uniform_within_bound = rep.uniform_limit <= rep.bound;
  rep.threshold = power(mu, ell);
  const double arcs = static_cast<double>(B.intervals().size());
  const std::vector<IntVec> shifts{int_vec({0, 1}), int_vec({0, 2}), int_vec({0, 0, 1})};
  for (auto p : primes) {
    Cor67Level lv;
    lv.prime = p;
    lv.limit = cor67_limit(B, p);
    lv.riemann_gap = std::abs(Rat(lv.limit - rep.uniform_limit).get_d());
    // z -> mu(B ∩ B - z ∩ B - 2z) is Lipschitz with constant at most 6 * (number of arcs).
    lv.riemann_bound = mu.get_d() * 6 * arcs / (2 * static_cast<double>(p));
    lv.below_threshold = lv.limit < rep.threshold;
    if (lv.below_threshold && !rep.witness_prime) rep.witness_prime = p;
    if (opt.scan) {
      Lattice G = canonicalize({int_vec({static_cast<long>(p), 0})}, 2);
      Pipeline pl = run_pipeline(monomials(2), G, shifts, B, rep.threshold, opt);
      lv.generators = std::move(pl.generators);
      lv.scan = std::move(pl.scan);
    }
    rep.levels.push_back(std::move(lv));
  }
  return rep;
}

}  // namespace rigidlab
