#include <algorithm>
#include <cmath>
#include <map>

#include "rigidlab/dynamics.hpp"

namespace rigidlab {

namespace {

constexpr std::size_t kMaxDigitVectors = 4096;
constexpr unsigned long kMaxRadix = 16;
constexpr unsigned kMaxLength = 12;

// Progression-free digit vectors: all of {0,1}^L when d <= 2, else the most populated
// sphere |v|^2 = r in {0..d-1}^L (smallest r on ties).
std::vector<std::vector<unsigned>> digit_vectors(unsigned d, unsigned L) {
  if (d <= 2) {
    std::vector<std::vector<unsigned>> out;
    if (std::pow(static_cast<double>(d), L) > static_cast<double>(kMaxDigitVectors)) return out;
    std::vector<unsigned> v(L, 0);
    while (true) {
      out.push_back(v);
      unsigned i = 0;
      while (i < L && v[i] + 1 == d) v[i++] = 0;
      if (i == L) break;
      ++v[i];
    }
    return out;
  }
  std::map<unsigned long, double> counts{{0, 1.0}};
  for (unsigned i = 0; i < L; ++i) {
    std::map<unsigned long, double> next;
    for (const auto& [r, c] : counts)
      for (unsigned x = 0; x < d; ++x) next[r + x * x] += c;
    counts = std::move(next);
  }
  unsigned long best_r = 0;
  double best = 0;
  for (const auto& [r, c] : counts)
    if (c > best) {
      best = c;
      best_r = r;
    }
  std::vector<std::vector<unsigned>> out;
  if (best > static_cast<double>(kMaxDigitVectors)) return out;
  std::vector<unsigned> v(L, 0);
  // Depth-first enumeration with remaining-radius pruning.
  auto rec = [&](auto&& self, unsigned pos, unsigned long left) -> void {
    if (pos == L) {
      if (left == 0) out.push_back(v);
      return;
    }
    const unsigned long room = static_cast<unsigned long>(L - pos - 1) * (d - 1) * (d - 1);
    for (unsigned x = 0; x < d && x * x <= left; ++x) {
      if (left - x * x > room) continue;
      v[pos] = x;
      self(self, pos + 1, left - x * x);
    }
  };
  rec(rec, 0, best_r);
  return out;
}

CircleSet embed(const std::vector<std::vector<unsigned>>& vectors, unsigned long q, unsigned L) {
  Int P = 1;
  for (unsigned i = 0; i < L; ++i) P *= q;
  std::vector<Interval> arcs;
  for (const auto& v : vectors) {
    Int a = 0;
    for (unsigned x : v) a = a * q + x;
    arcs.push_back(Interval{ratio(a, P), ratio(a + 1, P)});
  }
  return CircleSet::from_intervals(std::move(arcs));
}

}  // namespace

std::pair<Rat, Rat> verify_behrend(const CircleSet& B, unsigned ell) {
  Rat integral = strip_integral(B, {Rat(0), Rat(0)}, {Int(1), Int(2)});
  Rat mu = B.measure();
  Rat bound = 1;
  for (unsigned i = 0; i < ell; ++i) bound *= mu;
  return {integral, bound / 2};
}

// Decimal single-digit candidate first, then radix q, length L in order of q^L.
BehrendSet behrend_set(unsigned ell) {
  if (ell == 0) fail(ErrorCode::Precondition, "ell must be at least 1");
  struct Candidate {
    double log_size;
    unsigned long q;
    unsigned L;
  };
  std::vector<Candidate> cands{{std::log(10.0), 10, 1}};
  for (unsigned long q = 2; q <= kMaxRadix; ++q)
    for (unsigned L = 1; L <= kMaxLength; ++L)
      if (!(q == 10 && L == 1)) cands.push_back({L * std::log(static_cast<double>(q)), q, L});
  std::stable_sort(cands.begin() + 1, cands.end(), [](const Candidate& a, const Candidate& b) {
    return a.log_size < b.log_size || (a.log_size == b.log_size && a.q < b.q);
  });
  for (const auto& c : cands) {
    const unsigned d = static_cast<unsigned>((c.q + 1) / 2);
    auto vectors = digit_vectors(d, c.L);
    if (vectors.empty()) continue;
    CircleSet B = embed(vectors, c.q, c.L);
    // Each arc alone contributes len^2/2, a lower bound for the integral.
    Rat mu = B.measure(), power = 1, diagonal = 0;
    for (unsigned i = 0; i < ell; ++i) power *= mu;
    for (const auto& iv : B.intervals()) diagonal += (iv.hi - iv.lo) * (iv.hi - iv.lo) / 2;
    if (diagonal > power / 2) continue;
    auto [integral, bound] = verify_behrend(B, ell);
    if (integral <= bound) return BehrendSet{std::move(B), c.q, c.L, vectors.size(), integral, bound};
  }
  fail(ErrorCode::SearchExhausted, "no digit construction within radix " + std::to_string(kMaxRadix) +
                                       " and " + std::to_string(kMaxDigitVectors) +
                                       " digit vectors satisfies the inequality for ell = " + std::to_string(ell));
}

namespace {

// Does the closed arc [a, b] (b - a < 1) meet B, and is it inside B up to endpoints?
struct ArcProbe {
  std::vector<std::pair<double, double>> arcs;
  bool meets(double a, double b) const {
    const double w = b - a;
    a -= std::floor(a);
    if (a + w <= 1) return meets_plain(a, a + w);
    return meets_plain(a, 1) || meets_plain(0, a + w - 1);
  }
  bool member(double x) const {
    x -= std::floor(x);
    auto it = std::upper_bound(arcs.begin(), arcs.end(), x, [](double v, const auto& iv) { return v < iv.first; });
    return it != arcs.begin() && x < std::prev(it)->second;
  }
  bool meets_plain(double a, double b) const {
    auto it = std::lower_bound(arcs.begin(), arcs.end(), a, [](const auto& iv, double v) { return iv.second < v; });
    return it != arcs.end() && it->first <= b;
  }
  bool inside_plain(double a, double b) const {
    auto it = std::upper_bound(arcs.begin(), arcs.end(), a, [](double v, const auto& iv) { return v < iv.first; });
    if (it == arcs.begin()) return false;
    --it;
    return it->first <= a && b <= it->second;
  }
  bool inside(double a, double b) const {
    const double w = b - a;
    a -= std::floor(a);
    if (a + w <= 1) return inside_plain(a, a + w);
    return inside_plain(a, 1) && inside_plain(0, a + w - 1);
  }
};

}  // namespace

GridCheck behrend_grid_quadrature(const CircleSet& B, std::size_t grid) {
  ArcProbe probe;
  for (const auto& iv : B.intervals()) probe.arcs.emplace_back(iv.lo.get_d(), iv.hi.get_d());
  const double h = 1.0 / static_cast<double>(grid);
  const double pad = 1e-12;
  double hits = 0, unsure = 0;
  for (std::size_t i = 0; i < grid; ++i) {
    const double y0 = i * h;
    for (std::size_t j = 0; j < grid; ++j) {
      const double z0 = j * h;
      const double lo[3] = {y0, y0 + z0, y0 + 2 * z0};
      const double len[3] = {h, 2 * h, 3 * h};
      bool could_be_one = true, surely_one = true;
      for (int f = 0; f < 3 && could_be_one; ++f) {
        if (!probe.meets(lo[f] - pad, lo[f] + len[f] + pad)) could_be_one = false;
        if (!probe.inside(lo[f] - pad, lo[f] + len[f] + pad)) surely_one = false;
      }
      if (could_be_one && !surely_one) unsure += 1;
      const double y = y0 + h / 2, z = z0 + h / 2;
      if (probe.member(y) && probe.member(y + z) && probe.member(y + 2 * z)) hits += 1;
    }
  }
  return GridCheck{hits * h * h, unsure * h * h};
}

}  // namespace rigidlab
