#include "rigidlab/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "rigidlab/parallel.hpp"

namespace rigidlab {

namespace {

template <class T>
T frac_of(const T& x) {
  if constexpr (std::is_same_v<T, double>) {
    return x - std::floor(x);
  } else {
    return frac(x);
  }
}

template <class T>
using Arcs = std::vector<std::pair<T, T>>;

// (B - u) mod 1 as sorted arcs.
template <class T>
void shift_arcs(const Arcs<T>& B, const T& u, Arcs<T>& out) {
  out.clear();
  for (const auto& [lo, hi] : B) {
    T a = frac_of<T>(lo - u);
    T b = a + (hi - lo);
    if (b <= 1) {
      out.emplace_back(a, b);
    } else {
      out.emplace_back(a, T(1));
      out.emplace_back(T(0), b - 1);
    }
  }
  std::sort(out.begin(), out.end());
}

template <class T>
void intersect_arcs(const Arcs<T>& a, const Arcs<T>& b, Arcs<T>& out) {
  out.clear();
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const T& lo = std::max(a[i].first, b[j].first);
    const T& hi = std::min(a[i].second, b[j].second);
    if (lo < hi) out.emplace_back(lo, hi);
    if (a[i].second < b[j].second)
      ++i;
    else
      ++j;
  }
}

template <class T>
T overlap_generic(const Arcs<T>& B, const std::vector<T>& offsets, Arcs<T>& cur, Arcs<T>& shifted, Arcs<T>& next) {
  cur = B;
  for (const auto& u : offsets) {
    if (cur.empty()) break;
    shift_arcs(B, u, shifted);
    intersect_arcs(cur, shifted, next);
    std::swap(cur, next);
  }
  T total = 0;
  for (const auto& [lo, hi] : cur) total += hi - lo;
  return total;
}

Arcs<Rat> rat_arcs(const CircleSet& B) {
  Arcs<Rat> out;
  for (const auto& iv : B.intervals()) out.emplace_back(iv.lo, iv.hi);
  return out;
}

Arcs<double> double_arcs(const CircleSet& B) {
  Arcs<double> out;
  for (const auto& iv : B.intervals()) out.emplace_back(iv.lo.get_d(), iv.hi.get_d());
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

CircleSet CircleSet::from_intervals(std::vector<Interval> intervals) {
  std::vector<Interval> kept;
  for (auto& iv : intervals) {
    if (iv.lo < 0 || iv.hi > 1 || iv.lo > iv.hi) fail(ErrorCode::Precondition, "arc endpoints must satisfy 0 <= lo <= hi <= 1");
    if (iv.lo < iv.hi) kept.push_back(std::move(iv));
  }
  std::sort(kept.begin(), kept.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  CircleSet s;
  for (auto& iv : kept) {
    if (!s.arcs_.empty()) {
      if (iv.lo < s.arcs_.back().hi) fail(ErrorCode::Precondition, "arcs overlap");
      if (iv.lo == s.arcs_.back().hi) {
        s.arcs_.back().hi = iv.hi;
        continue;
      }
    }
    s.arcs_.push_back(std::move(iv));
  }
  return s;
}

CircleSet CircleSet::arc(const Rat& lo, const Rat& hi) { return from_intervals({Interval{lo, hi}}); }

Rat CircleSet::measure() const {
  Rat m = 0;
  for (const auto& iv : arcs_) m += iv.hi - iv.lo;
  return m;
}

bool CircleSet::contains(const Rat& x) const {
  Rat y = frac(x);
  auto it = std::upper_bound(arcs_.begin(), arcs_.end(), y, [](const Rat& v, const Interval& iv) { return v < iv.lo; });
  return it != arcs_.begin() && y < std::prev(it)->hi;
}

bool CircleSet::contains(double x) const {
  double y = x - std::floor(x);
  for (const auto& iv : arcs_)
    if (y >= iv.lo.get_d() && y < iv.hi.get_d()) return true;
  return false;
}

bool CircleSet::operator==(const CircleSet& o) const {
  if (arcs_.size() != o.arcs_.size()) return false;
  for (std::size_t i = 0; i < arcs_.size(); ++i)
    if (arcs_[i].lo != o.arcs_[i].lo || arcs_[i].hi != o.arcs_[i].hi) return false;
  return true;
}

Rat overlap_measure(const CircleSet& B, const std::vector<Rat>& offsets) {
  Arcs<Rat> cur, shifted, next;
  return overlap_generic(rat_arcs(B), offsets, cur, shifted, next);
}

double overlap_measure(const std::vector<std::pair<double, double>>& B, const std::vector<double>& offsets) {
  thread_local Arcs<double> cur, shifted, next;
  return overlap_generic(B, offsets, cur, shifted, next);
}

Rat skew_correlation_exact(const SkewSystem& sys, const CircleSet& B, const std::vector<Int>& shifts) {
  const AtomicMeasure& m = sys.base;
  if (m.factored()) fail(ErrorCode::Precondition, "exact correlation needs an explicit atom list");
  std::vector<std::vector<Rat>> ph;
  for (const auto& s : shifts) ph.push_back(m.exact_phases(s));
  const auto atoms = m.atoms();
  Rat total = 0;
  std::vector<Rat> offs(shifts.size());
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    for (std::size_t j = 0; j < shifts.size(); ++j) offs[j] = ph[j][i];
    total += atoms[i].w * overlap_measure(B, offs);
  }
  return total;
}

namespace {

Estimate correlate_phases(const AtomicMeasure& m, const Arcs<double>& arcs, const std::vector<std::vector<double>>& ph) {
  const std::vector<double> w = m.weights();
  const std::size_t n = w.size();
  std::vector<double> offs(ph.size());
  double sum = 0, sum2 = 0, wsum = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < ph.size(); ++j) offs[j] = ph[j][i];
    double f = overlap_measure(arcs, offs);
    sum += w[i] * f;
    sum2 += w[i] * f * f;
    wsum += w[i];
  }
  Estimate e;
  e.value = sum / wsum;
  if (m.factored() && n > 1) {
    double var = std::max(0.0, sum2 / wsum - e.value * e.value) * static_cast<double>(n) / static_cast<double>(n - 1);
    e.std_error = std::sqrt(var / static_cast<double>(n));
  }
  return e;
}

}  // namespace

Estimate skew_correlation(const SkewSystem& sys, const CircleSet& B, const std::vector<Int>& shifts) {
  std::vector<std::vector<double>> ph;
  for (const auto& s : shifts) ph.push_back(sys.base.phases(s));
  return correlate_phases(sys.base, double_arcs(B), ph);
}

// ---------------------------------------------------------------------------
// Exact areas over [0,1)^2 in coordinates (y, tau).

namespace {

struct Pt {
  Rat y, t;
};
using Polygon = std::vector<Pt>;

// Keeps the part where y + m*tau - bound has the sign of `keep_above`.
Polygon clip(const Polygon& P, const Int& m, const Rat& bound, bool keep_above) {
  Polygon out;
  const std::size_t n = P.size();
  auto value = [&](const Pt& p) {
    Rat v = p.y + m * p.t - bound;
    return keep_above ? v : Rat(-v);
  };
  for (std::size_t i = 0; i < n; ++i) {
    const Pt& a = P[i];
    const Pt& b = P[(i + 1) % n];
    Rat va = value(a), vb = value(b);
    if (va >= 0) out.push_back(a);
    if ((va > 0 && vb < 0) || (va < 0 && vb > 0)) {
      Rat s = va / (va - vb);
      out.push_back(Pt{a.y + s * (b.y - a.y), a.t + s * (b.t - a.t)});
    }
  }
  return out;
}

Rat area(const Polygon& P) {
  Rat twice = 0;
  for (std::size_t i = 0; i < P.size(); ++i) {
    const Pt& a = P[i];
    const Pt& b = P[(i + 1) % P.size()];
    twice += a.y * b.t - b.y * a.t;
  }
  if (twice < 0) twice = -twice;
  return twice / 2;
}

struct StripWalker {
  const std::vector<Interval>& arcs;
  const std::vector<Rat>& c;
  const std::vector<Int>& m;

  Rat walk(const Polygon& P, std::size_t factor) const {
    if (P.size() < 3) return 0;
    if (factor == c.size()) return area(P);
    Rat lo_v, hi_v;
    for (std::size_t i = 0; i < P.size(); ++i) {
      Rat v = P[i].y + m[factor] * P[i].t + c[factor];
      if (i == 0 || v < lo_v) lo_v = v;
      if (i == 0 || v > hi_v) hi_v = v;
    }
    if (lo_v == hi_v) return 0;
    Int k_lo, k_hi;
    mpz_fdiv_q(k_lo.get_mpz_t(), lo_v.get_num_mpz_t(), lo_v.get_den_mpz_t());
    mpz_fdiv_q(k_hi.get_mpz_t(), hi_v.get_num_mpz_t(), hi_v.get_den_mpz_t());
    Rat total = 0;
    for (Int k = k_lo; k <= k_hi; ++k) {
      // arcs [lo+k, hi+k) meeting (lo_v, hi_v)
      Rat from = lo_v - k, to = hi_v - k;
      auto it = std::upper_bound(arcs.begin(), arcs.end(), from, [](const Rat& v, const Interval& iv) { return v < iv.hi; });
      for (; it != arcs.end() && it->lo < to; ++it) {
        Polygon Q = clip(P, m[factor], it->lo + k - c[factor], true);
        Q = clip(Q, m[factor], it->hi + k - c[factor], false);
        total += walk(Q, factor + 1);
      }
    }
    return total;
  }
};

}  // namespace

Rat strip_integral(const CircleSet& B, const std::vector<Rat>& c, const std::vector<Int>& m) {
  if (c.size() != m.size()) fail(ErrorCode::DimensionMismatch, "one slope per offset expected");
  if (B.empty()) return 0;
  std::vector<Rat> cc{Rat(0)};
  std::vector<Int> mm{Int(0)};
  // Fixed factors first: they prune the square into vertical strips.
  for (std::size_t j = 0; j < c.size(); ++j)
    if (m[j] == 0) {
      cc.push_back(frac(c[j]));
      mm.push_back(0);
    }
  for (std::size_t j = 0; j < c.size(); ++j)
    if (m[j] != 0) {
      cc.push_back(frac(c[j]));
      mm.push_back(m[j]);
    }
  Polygon square{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  StripWalker w{B.intervals(), cc, mm};
  return w.walk(square, 0);
}

Rat haar_correlation_limit(const std::vector<RatVec>& reps, const CircleSet& B, const CorrelationPattern& pattern) {
  const std::size_t factors = pattern.finite.size();
  if (pattern.free.size() != factors) fail(ErrorCode::DimensionMismatch, "pattern rows disagree");
  if (pattern.free_count > 2) fail(ErrorCode::UnsupportedShape, "at most 2 free coordinates supported");
  if (reps.empty()) fail(ErrorCode::Precondition, "need at least one finite representative");
  for (const auto& row : pattern.free)
    if (row.size() != pattern.free_count) fail(ErrorCode::DimensionMismatch, "free coefficient width");
  for (const auto& row : pattern.finite)
    if (row.size() != reps[0].size()) fail(ErrorCode::DimensionMismatch, "finite coefficient width");

  // A factor alone on its free coordinate integrates to mu(B).
  std::vector<std::size_t> users(pattern.free_count, 0);
  for (const auto& row : pattern.free)
    for (std::size_t f = 0; f < pattern.free_count; ++f)
      if (row[f] != 0) ++users[f];
  std::vector<int> role(factors, 0);  // 0 fixed, 1 solo, 2 coupled
  std::optional<std::size_t> coupled;
  for (std::size_t j = 0; j < factors; ++j) {
    std::vector<std::size_t> used;
    for (std::size_t f = 0; f < pattern.free_count; ++f)
      if (pattern.free[j][f] != 0) used.push_back(f);
    if (used.empty()) continue;
    if (used.size() == 1 && users[used[0]] == 1) {
      role[j] = 1;
      continue;
    }
    for (auto f : used) {
      if (coupled && *coupled != f) fail(ErrorCode::UnsupportedShape, "free coordinates are coupled");
      coupled = f;
    }
    if (used.size() > 1) fail(ErrorCode::UnsupportedShape, "free coordinates are coupled");
    role[j] = 2;
  }
  const Rat mu = B.measure();
  Rat total = 0;
  for (const auto& h : reps) {
    std::vector<Rat> fixed_offsets;
    std::vector<Rat> c;
    std::vector<Int> m;
    Rat factor = 1;
    for (std::size_t j = 0; j < factors; ++j) {
      Rat off = 0;
      for (std::size_t i = 0; i < h.size(); ++i) off += pattern.finite[j][i] * h[i];
      switch (role[j]) {
        case 0:
          fixed_offsets.push_back(frac(off));
          c.push_back(frac(off));
          m.push_back(0);
          break;
        case 1:
          factor *= mu;
          break;
        default:
          c.push_back(frac(off));
          m.push_back(pattern.free[j][*coupled]);
      }
    }
    total += factor * (coupled ? strip_integral(B, c, m) : overlap_measure(B, fixed_offsets));
  }
  return total / Rat(static_cast<unsigned long>(reps.size()));
}

// ---------------------------------------------------------------------------

FSTail fs_tail(const std::vector<Int>& generators, std::size_t k0) {
  const std::size_t m = generators.size();
  if (k0 >= m) fail(ErrorCode::Precondition, "tail start must be below the generator count");
  if (m - k0 > 20) fail(ErrorCode::CapExceeded, "at most 2^20 finite sums");
  for (std::size_t i = 1; i < m; ++i)
    if (generators[i] <= generators[i - 1]) fail(ErrorCode::Precondition, "generators must increase");
  FSTail tail;
  tail.generators = generators;
  tail.k0 = k0;
  const std::size_t width = m - k0;
  for (unsigned long mask = 1; mask < (1UL << width); ++mask) {
    std::vector<std::size_t> alpha;
    Int sum = 0;
    for (std::size_t i = 0; i < width; ++i)
      if (mask >> i & 1UL) {
        alpha.push_back(k0 + i + 1);
        sum += generators[k0 + i];
      }
    tail.alphas.push_back(std::move(alpha));
    tail.sums.push_back(std::move(sum));
  }
  return tail;
}

namespace {

std::string verdict_for(double value, double se, double thr) {
  if (value + 3 * se < thr) return "MISS";
  if (value - 3 * se > thr) return "HIT";
  return "INCONCLUSIVE";
}

}  // namespace

ScanRow rescan(const AtomicMeasure& m, const std::vector<Int>& generators, const std::vector<IntVec>& shift_polys,
               const CircleSet& B, const Rat& threshold, const std::vector<std::size_t>& alpha) {
  ScanRow row;
  row.alpha = alpha;
  row.n_alpha = 0;
  for (auto k : alpha) row.n_alpha += generators.at(k - 1);
  std::vector<std::vector<double>> ph;
  for (const auto& p : shift_polys) ph.push_back(m.phases(eval_poly(p, row.n_alpha)));
  Estimate e = correlate_phases(m, double_arcs(B), ph);
  row.correlation = e.value;
  row.std_error = e.std_error;
  row.verdict = verdict_for(e.value, e.std_error, threshold.get_d());
  return row;
}

ScanResult fs_scan(const AtomicMeasure& m, const std::vector<Int>& generators,
                   const std::vector<IntVec>& shift_polys, const CircleSet& B, const Rat& threshold,
                   std::size_t k0_max) {
  FSTail all = fs_tail(generators, 0);
  ScanResult res;
  res.threshold = threshold;
  res.rows.resize(all.alphas.size());
  parallel_for(all.alphas.size(), [&](std::size_t i) {
    res.rows[i] = rescan(m, generators, shift_polys, B, threshold, all.alphas[i]);
  });
  for (std::size_t k0 = 0; k0 <= k0_max && k0 < generators.size(); ++k0) {
    bool all_miss = true;
    for (const auto& r : res.rows)
      if (r.alpha.front() > k0 && r.verdict != "MISS") all_miss = false;
    if (all_miss) {
      res.k0 = k0;
      break;
    }
  }
  const std::size_t start = res.k0 ? *res.k0 : std::min(k0_max, generators.size() - 1);
  for (const auto& r : res.rows) {
    if (r.alpha.front() <= start) continue;
    ++res.tail_size;
    if (r.verdict == "INCONCLUSIVE") ++res.tail_inconclusive;
  }
  return res;
}

}  // namespace rigidlab
