#include "rigidlab/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "rigidlab/deciders.hpp"
#include "rigidlab/parallel.hpp"

namespace rigidlab {

using u128 = unsigned __int128;

Int factorial(unsigned k) {
  Int f;
  mpz_fac_ui(f.get_mpz_t(), k);
  return f;
}

Rat circle_norm(const Rat& x) {
  Rat f = frac(x);
  Rat g = 1 - f;
  return f < g ? f : g;
}

namespace {

Int abs_int(const Int& v) { return v < 0 ? Int(-v) : v; }

Rat phi_bound(const SequenceFamily& fam, const Int& n) {
  Int best = 0;
  for (const auto& v : evaluate(fam, n))
    if (abs_int(v) > best) best = abs_int(v);
  return Rat(best + 1);
}

Int lcm(const Int& a, const Int& b) {
  Int r;
  mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

void note(PropertyCheck& p, const Rat& margin, bool ok, const std::string& where) {
  if (!ok) p.pass = false;
  if (!p.worst_margin || margin < *p.worst_margin) {
    p.worst_margin = margin;
    p.worst_at = where;
  }
}

std::string at(std::size_t k, std::size_t j) { return "k=" + std::to_string(k) + ",j=" + std::to_string(j + 1); }

}  // namespace

Schedule build_schedule(const SequenceFamily& fam, std::size_t K, const SchedulePolicy& policy) {
  if (!relation_group(fam).is_trivial())
    fail(ErrorCode::Precondition, "schedule needs an asymptotically independent family");
  if (policy.base_modulus <= 0) fail(ErrorCode::Precondition, "base modulus must be positive");
  const std::size_t l = fam.size();
  const bool poly = fam.kind() == FamilyKind::Polynomial;

  // Constant terms leak into later levels: C * alpha must stay below 1/(K^2 K!).
  Int C0 = 0;
  if (poly)
    for (const auto& p : fam.polys())
      if (abs_int(p[0]) > C0) C0 = abs_int(p[0]);

  Schedule s;
  Int prev_n = 1;
  std::size_t spent = 0;
  for (std::size_t k = 1; k <= K; ++k) {
    const Int f = factorial(static_cast<unsigned>(k));
    const Rat half_gap(1, 2 * f * f);
    const Rat target = frac(Rat(1, f) + half_gap);
    Rat cap = 1 / (Rat(f) * Rat(Int(1) << static_cast<unsigned>(k)) * phi_bound(fam, prev_n));
    if (C0 > 0) {
      Rat lookahead(1, 2 * C0 * Int(K * K) * factorial(static_cast<unsigned>(K)));
      if (lookahead < cap) cap = lookahead;
    }
    Int step = poly ? Int(2 * f * f) : f;
    if (poly)
      for (const auto& row : s.alpha)
        for (const auto& a : row) step = lcm(step, a.get_den());
    if (k >= policy.modulus_from) step = lcm(step, policy.base_modulus);

    auto alphas_for = [&](const IntVec& vals, RatVec& out) {
      out.assign(l, 0);
      for (std::size_t j = 0; j < l; ++j) {
        if (vals[j] == 0) return false;
        Rat a = vals[j] > 0 ? Rat(target / vals[j]) : Rat((1 - target) / Rat(-vals[j]));
        if (a > cap) return false;
        out[j] = a;
      }
      return true;
    };

    Int t = prev_n / step + 1;
    RatVec alpha;
    // Grow geometrically until every sequence is large enough for the window.
    while (true) {
      if (++spent > policy.search_budget)
        fail(ErrorCode::SearchExhausted, "search budget exhausted at level " + std::to_string(k));
      if (alphas_for(evaluate(fam, step * t), alpha)) break;
      t *= 2;
    }
    for (;; ++t) {
      if (++spent > policy.search_budget)
        fail(ErrorCode::SearchExhausted, "search budget exhausted at level " + std::to_string(k) +
                                             " (window met, cross or earlier-level residuals failing)");
      const Int n = step * t;
      IntVec vals = evaluate(fam, n);
      if (!alphas_for(vals, alpha)) continue;
      bool ok = true;
      for (std::size_t j = 0; j < l && ok; ++j)
        for (std::size_t jp = 0; jp < l && ok; ++jp)
          if (j != jp && !(circle_norm(vals[j] * alpha[jp]) < half_gap)) ok = false;
      const Rat earlier_gap(1, Int(k * k) * f);
      for (std::size_t s0 = 0; s0 < s.alpha.size() && ok; ++s0)
        for (std::size_t j = 0; j < l && ok; ++j)
          for (std::size_t jp = 0; jp < l && ok; ++jp)
            if (!(circle_norm(vals[j] * s.alpha[s0][jp]) < earlier_gap)) ok = false;
      if (!ok) continue;
      s.n.push_back(n);
      s.alpha.push_back(alpha);
      prev_n = n;
      break;
    }
  }
  return s;
}

ScheduleReport check_schedule(const Schedule& s, const SequenceFamily& fam) {
  ScheduleReport rep;
  if (s.alpha.size() != s.n.size()) fail(ErrorCode::DimensionMismatch, "schedule levels disagree");
  const std::size_t l = fam.size();
  Int prev = 1;
  for (std::size_t k = 1; k <= s.depth(); ++k) {
    const Int& n = s.n[k - 1];
    const RatVec& a = s.alpha[k - 1];
    if (a.size() != l) fail(ErrorCode::DimensionMismatch, "schedule width differs from family");
    const Int f = factorial(static_cast<unsigned>(k));
    if (n <= 0 || (k > 1 && n <= prev) || n % f != 0) rep.indices_ok = false;
    const Rat cap = 1 / (Rat(f) * Rat(Int(1) << static_cast<unsigned>(k)) * phi_bound(fam, k == 1 ? Int(1) : prev));
    const Rat half_gap(1, 2 * f * f);
    const Rat centre = Rat(1, f) + half_gap;
    const Rat earlier_gap(1, Int(k * k) * f);
    IntVec vals = evaluate(fam, n);
    for (std::size_t j = 0; j < l; ++j) {
      Rat m = std::min<Rat>(a[j], cap - a[j]);
      note(rep.window, m, a[j] > 0 && a[j] <= cap, at(k, j));
      Rat d = half_gap - circle_norm(vals[j] * a[j] - centre);
      note(rep.diagonal, d, d > 0, at(k, j));
      for (std::size_t jp = 0; jp < l; ++jp) {
        if (jp == j) continue;
        Rat c = half_gap - circle_norm(vals[j] * a[jp]);
        note(rep.cross, c, c > 0, at(k, j));
      }
      for (std::size_t s0 = 0; s0 + 1 < k; ++s0)
        for (std::size_t jp = 0; jp < l; ++jp) {
          Rat e = earlier_gap - circle_norm(vals[j] * s.alpha[s0][jp]);
          note(rep.earlier, e, e > 0, at(k, j));
        }
    }
    prev = n;
  }
  return rep;
}

HaarCells haar_cells(const Lattice& G, std::size_t rep_cap) {
  HaarCells hc;
  hc.dim = G.ambient_dim();
  for (std::size_t r = 0; r < hc.dim; ++r) {
    bool vanishes = std::all_of(G.basis().begin(), G.basis().end(), [&](const IntVec& b) { return b[r] == 0; });
    (vanishes ? hc.torus_coords : hc.finite_coords).push_back(r);
  }
  if (hc.finite_coords.empty()) {
    hc.reps.push_back({});
    return hc;
  }
  IntMat proj;
  for (const auto& b : G.basis()) {
    IntVec p;
    for (auto r : hc.finite_coords) p.push_back(b[r]);
    proj.push_back(std::move(p));
  }
  Lattice G0 = canonicalize(proj, hc.finite_coords.size());
  if (!index_in_ambient(G0))
    fail(ErrorCode::UnsupportedShape, "group is neither finite index nor of product shape");
  hc.reps = annihilator(G0, rep_cap).finite_reps;
  return hc;
}

Rat CellMeasure::weight(const std::vector<unsigned long>& cell) const {
  std::vector<unsigned long> key;
  for (auto r : finite_coords) key.push_back(cell.at(r));
  auto it = finite_weights.find(key);
  if (it == finite_weights.end()) return 0;
  Rat w = it->second;
  const Int f = factorial(level);
  for (std::size_t i = 0; i < torus_coords.size(); ++i) w /= f;
  return w;
}

Rat CellMeasure::total() const {
  Rat t = 0;
  for (const auto& [cell, w] : finite_weights) t += w;
  return t;
}

CellMeasure cell_weights(const Lattice& G, unsigned k, std::size_t rep_cap) {
  if (k == 0) fail(ErrorCode::Precondition, "cell level starts at 1");
  HaarCells hc = haar_cells(G, rep_cap);
  CellMeasure cm;
  cm.level = k;
  cm.finite_coords = hc.finite_coords;
  cm.torus_coords = hc.torus_coords;
  const Int f = factorial(k);
  const Rat each(1, static_cast<unsigned long>(hc.reps.size()));
  for (const auto& y : hc.reps) {
    std::vector<unsigned long> cell;
    for (const auto& v : y) {
      Int c = v.get_num() * f / v.get_den();  // floor, v >= 0
      cell.push_back(c.get_ui());
    }
    cm.finite_weights[cell] += each;
  }
  return cm;
}

// ---------------------------------------------------------------------------

AtomicMeasure AtomicMeasure::from_atoms(std::vector<Atom> atoms) {
  Rat total = 0;
  for (auto& a : atoms) {
    if (a.w <= 0) fail(ErrorCode::Precondition, "atom weights must be positive");
    a.x = frac(a.x);
    total += a.w;
  }
  if (atoms.empty()) fail(ErrorCode::Precondition, "measure needs at least one atom");
  std::sort(atoms.begin(), atoms.end(), [](const Atom& p, const Atom& q) { return p.x < q.x; });
  AtomicMeasure m;
  for (auto& a : atoms) {
    if (!m.atoms_.empty() && m.atoms_.back().x == a.x)
      m.atoms_.back().w += a.w;
    else
      m.atoms_.push_back(std::move(a));
  }
  if (total != 1)
    for (auto& a : m.atoms_) a.w /= total;
  return m;
}

AtomicMeasure AtomicMeasure::dirac(const Rat& x) { return from_atoms({Atom{x, 1}}); }

AtomicMeasure AtomicMeasure::uniform_grid(unsigned long q) {
  if (q == 0) fail(ErrorCode::Precondition, "grid size must be positive");
  std::vector<Atom> atoms;
  for (unsigned long k = 0; k < q; ++k) atoms.push_back(Atom{ratio(k, q), Rat(1, q)});
  return from_atoms(std::move(atoms));
}

AtomicMeasure AtomicMeasure::from_draws(std::vector<Rat> multipliers, std::vector<std::uint32_t> digits,
                                        Int scale) {
  if (multipliers.empty() || digits.empty() || digits.size() % multipliers.size() != 0)
    fail(ErrorCode::DimensionMismatch, "digit table does not match multipliers");
  AtomicMeasure m;
  m.draws_ = std::make_shared<const Draws>(Draws{std::move(multipliers), std::move(digits), std::move(scale)});
  return m;
}

std::size_t AtomicMeasure::size() const {
  return draws_ ? draws_->digits.size() / draws_->multipliers.size() : atoms_.size();
}

std::vector<double> AtomicMeasure::weights() const {
  if (draws_) return std::vector<double>(size(), 1.0 / static_cast<double>(size()));
  std::vector<double> w;
  for (const auto& a : atoms_) w.push_back(a.w.get_d());
  return w;
}

std::vector<double> AtomicMeasure::positions() const { return phases(1); }

Int AtomicMeasure::scale() const { return draws_ ? draws_->scale : Int(1); }

const std::vector<Rat>& AtomicMeasure::multipliers() const {
  static const std::vector<Rat> none;
  return draws_ ? draws_->multipliers : none;
}

const std::vector<std::uint32_t>& AtomicMeasure::digits() const {
  static const std::vector<std::uint32_t> none;
  return draws_ ? draws_->digits : none;
}

namespace {

// floor(frac(x) * 2^128)
u128 to_fixed(const Rat& x) {
  Int r;
  mpz_fdiv_r(r.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  r <<= 128;
  r /= x.get_den();
  std::uint64_t limbs[2] = {0, 0};
  std::size_t count = 0;
  mpz_export(limbs, &count, -1, sizeof(std::uint64_t), 0, 0, r.get_mpz_t());
  return (static_cast<u128>(limbs[1]) << 64) | limbs[0];
}

double fixed_to_double(u128 v) {
  return std::ldexp(static_cast<double>(static_cast<std::uint64_t>(v >> 64)), -64) +
         std::ldexp(static_cast<double>(static_cast<std::uint64_t>(v)), -128);
}

double rat_phase(const Int& t, const Rat& x) {
  Int r = t * x.get_num();
  mpz_fdiv_r(r.get_mpz_t(), r.get_mpz_t(), x.get_den_mpz_t());
  double v = ratio(r, x.get_den()).get_d();
  return v >= 1.0 ? 0.0 : v;
}

}  // namespace

std::vector<double> AtomicMeasure::phases(const Int& t) const {
  if (!draws_) {
    std::vector<double> out;
    out.reserve(atoms_.size());
    for (const auto& a : atoms_) out.push_back(rat_phase(t, a.x));
    return out;
  }
  const auto& d = *draws_;
  const std::size_t width = d.multipliers.size();
  std::vector<u128> tau(width);
  const Int ts = t * d.scale;
  for (std::size_t s = 0; s < width; ++s) tau[s] = to_fixed(ts * d.multipliers[s]);
  const std::size_t n = size();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t* row = d.digits.data() + i * width;
    u128 acc = 0;
    for (std::size_t s = 0; s < width; ++s) acc += static_cast<u128>(row[s]) * tau[s];
    double v = fixed_to_double(acc);
    out[i] = v >= 1.0 ? 0.0 : v;
  }
  return out;
}

std::vector<Rat> AtomicMeasure::exact_phases(const Int& t) const {
  if (draws_) fail(ErrorCode::Precondition, "exact phases need an explicit atom list");
  std::vector<Rat> out;
  out.reserve(atoms_.size());
  for (const auto& a : atoms_) out.push_back(frac(t * a.x));
  return out;
}

std::vector<Atom> AtomicMeasure::atoms() const {
  if (!draws_) return atoms_;
  const auto& d = *draws_;
  const std::size_t width = d.multipliers.size();
  Int D = 1;
  for (const auto& m : d.multipliers) D = lcm(D, m.get_den());
  IntVec u(width);
  for (std::size_t s = 0; s < width; ++s) {
    u[s] = d.multipliers[s].get_num() * (D / d.multipliers[s].get_den()) * d.scale;
    mpz_fdiv_r(u[s].get_mpz_t(), u[s].get_mpz_t(), D.get_mpz_t());
  }
  const std::size_t n = size();
  std::vector<Int> nums(n);
  for (std::size_t i = 0; i < n; ++i) {
    Int acc = 0;
    for (std::size_t s = 0; s < width; ++s) acc += d.digits[i * width + s] * u[s];
    mpz_fdiv_r(acc.get_mpz_t(), acc.get_mpz_t(), D.get_mpz_t());
    nums[i] = std::move(acc);
  }
  std::sort(nums.begin(), nums.end());
  std::vector<Atom> out;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && nums[j] == nums[i]) ++j;
    Rat x(nums[i], D);
    x.canonicalize();
    out.push_back(Atom{x, ratio(static_cast<unsigned long>(j - i), static_cast<unsigned long>(n))});
    i = j;
  }
  return out;
}

AtomicMeasure AtomicMeasure::scaled(const Int& M) const {
  if (M <= 0) fail(ErrorCode::Precondition, "pushforward factor must be positive");
  if (draws_) return from_draws(draws_->multipliers, draws_->digits, draws_->scale * M);
  std::vector<Atom> moved = atoms_;
  for (auto& a : moved) a.x *= M;
  return from_atoms(std::move(moved));
}

AtomicMeasure pushforward_scale(const AtomicMeasure& m, const Int& M) { return m.scaled(M); }

std::complex<double> fourier_coefficient(const AtomicMeasure& m, const Int& t) {
  std::vector<double> ph = m.phases(t);
  std::vector<double> w = m.weights();
  double re = 0, im = 0;
  for (std::size_t i = 0; i < ph.size(); ++i) {
    double ang = 2 * std::numbers::pi * ph[i];
    re += w[i] * std::cos(ang);
    im += w[i] * std::sin(ang);
  }
  return {re, im};
}

AtomicMeasure sample_sigma(const Lattice& G, const Schedule& s, std::size_t N, std::uint64_t seed,
                           std::size_t rep_cap) {
  if (N == 0) fail(ErrorCode::Precondition, "sample count must be positive");
  const std::size_t K = s.depth();
  if (K == 0) return AtomicMeasure::dirac(0);
  if (K > 12) fail(ErrorCode::CapExceeded, "cell indices need depth <= 12");
  const std::size_t c = G.ambient_dim();
  if (s.alpha[0].size() != c) fail(ErrorCode::DimensionMismatch, "group dimension differs from schedule");
  HaarCells hc = haar_cells(G, rep_cap);
  const std::size_t width = K * c;

  // cells[level][rep][finite coordinate]
  std::vector<std::vector<std::vector<std::uint32_t>>> cells(K);
  std::vector<std::uint32_t> fact(K);
  for (std::size_t k = 1; k <= K; ++k) {
    const Int f = factorial(static_cast<unsigned>(k));
    fact[k - 1] = static_cast<std::uint32_t>(f.get_ui());
    for (const auto& y : hc.reps) {
      std::vector<std::uint32_t> cell;
      for (const auto& v : y) cell.push_back(static_cast<std::uint32_t>(Int(v.get_num() * f / v.get_den()).get_ui()));
      cells[k - 1].push_back(std::move(cell));
    }
  }
  std::vector<Rat> mult;
  for (const auto& row : s.alpha)
    for (const auto& a : row) mult.push_back(a);

  std::vector<std::uint32_t> digits(N * width, 0);
  constexpr std::size_t kChunk = 4096;
  const std::size_t chunks = (N + kChunk - 1) / kChunk;
  parallel_for(chunks, [&](std::size_t ch) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(ch)};
    std::mt19937_64 rng(seq);
    std::uniform_int_distribution<std::size_t> pick(0, hc.reps.size() - 1);
    const std::size_t end = std::min(N, (ch + 1) * kChunk);
    for (std::size_t i = ch * kChunk; i < end; ++i) {
      std::uint32_t* row = digits.data() + i * width;
      for (std::size_t k = 0; k < K; ++k) {
        const auto& cell = cells[k][pick(rng)];
        for (std::size_t q = 0; q < hc.finite_coords.size(); ++q) row[k * c + hc.finite_coords[q]] = cell[q];
        std::uniform_int_distribution<std::uint32_t> free(0, fact[k] - 1);
        for (auto r : hc.torus_coords) row[k * c + r] = free(rng);
      }
    }
  });
  return AtomicMeasure::from_draws(std::move(mult), std::move(digits));
}

DichotomyReport verify_dichotomy(const AtomicMeasure& m, const Schedule& s, const SequenceFamily& fam,
                                 const Lattice& G, long coeff_bound, double tol, std::size_t levels) {
  const std::size_t l = fam.size();
  if (G.ambient_dim() != l) fail(ErrorCode::DimensionMismatch, "group dimension differs from family");
  if (coeff_bound < 0) fail(ErrorCode::Precondition, "coefficient bound must be nonnegative");
  DichotomyReport rep;
  const std::size_t K = s.depth();
  const std::vector<double> w = m.weights();
  const std::size_t first = K > levels ? K - levels + 1 : 1;
  for (std::size_t k = first; k <= K; ++k) {
    IntVec vals = evaluate(fam, s.n[k - 1]);
    std::vector<std::vector<double>> theta;
    for (const auto& v : vals) theta.push_back(m.phases(v));
    IntVec a(l, -coeff_bound);
    while (true) {
      double re = 0, im = 0;
      for (std::size_t i = 0; i < w.size(); ++i) {
        double ph = 0;
        for (std::size_t j = 0; j < l; ++j) ph += a[j].get_si() * theta[j][i];
        ph -= std::floor(ph);
        re += w[i] * std::cos(2 * std::numbers::pi * ph);
        im += w[i] * std::sin(2 * std::numbers::pi * ph);
      }
      const int target = character_integral(G, a);
      const double dev = std::abs(std::complex<double>(re - target, im));
      rep.rows.push_back(DichotomyRow{k, a, std::hypot(re, im), target, dev});
      if (k == K) rep.max_deviation_top = std::max(rep.max_deviation_top, dev);
      std::size_t j = 0;
      while (j < l && a[j] == coeff_bound) a[j++] = -coeff_bound;
      if (j == l) break;
      ++a[j];
    }
  }
  rep.pass = K > 0 && rep.max_deviation_top <= tol;
  if (K == 0) rep.pass = true;
  return rep;
}

Rat uniformity_distance(const Schedule& s, const SequenceFamily& fam,
                        const std::vector<std::vector<unsigned long>>& omega, const IntVec& a) {
  const std::size_t K = s.depth();
  const std::size_t l = fam.size();
  if (K == 0 || omega.size() != K) fail(ErrorCode::DimensionMismatch, "one cell vector per level expected");
  IntVec vals = evaluate(fam, s.n[K - 1]);
  Int t = 0;
  for (std::size_t j = 0; j < l; ++j) t += a[j] * vals[j];
  Rat g = 0;
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t r = 0; r < l; ++r) g += Rat(omega[k][r]) * s.alpha[k][r];
  const Int f = factorial(static_cast<unsigned>(K));
  Rat target = 0;
  for (std::size_t j = 0; j < l; ++j) target += ratio(a[j] * omega[K - 1][j], f);
  return circle_norm(t * g - target);
}

Rat uniformity_bound(const Schedule& s, const SequenceFamily& fam, const IntVec& a) {
  const std::size_t K = s.depth();
  const std::size_t l = fam.size();
  if (K == 0) return 0;
  IntVec vals = evaluate(fam, s.n[K - 1]);
  const Int fK = factorial(static_cast<unsigned>(K));
  const Rat half_gap(1, 2 * fK * fK);
  const Rat centre = Rat(1, fK) + half_gap;
  Rat total = 0;
  for (std::size_t j = 0; j < l; ++j) {
    if (a[j] == 0) continue;
    Rat per = 0;
    for (std::size_t k = 1; k < K; ++k) {
      const Int top = factorial(static_cast<unsigned>(k)) - 1;
      for (std::size_t r = 0; r < l; ++r) per += top * circle_norm(vals[j] * s.alpha[k - 1][r]);
    }
    for (std::size_t r = 0; r < l; ++r) {
      if (r == j) continue;
      per += (fK - 1) * circle_norm(vals[j] * s.alpha[K - 1][r]);
    }
    per += (fK - 1) * (circle_norm(vals[j] * s.alpha[K - 1][j] - centre) + half_gap);
    total += abs_int(a[j]) * per;
  }
  return total;
}

GroupMeasure build_measure_for_group(const SequenceFamily& fam, const Lattice& G, std::size_t K,
                                     std::size_t N, std::uint64_t seed, const SchedulePolicy& policy) {
  if (fam.kind() != FamilyKind::Polynomial)
    fail(ErrorCode::Precondition, "measure construction implemented for polynomial families");
  if (!is_rigidity_group(G, fam)) fail(ErrorCode::Precondition, "group does not contain the relation group");
  Reduction red = reduce_family(fam, G);
  SequenceFamily sub = subfamily(fam, red.family.indices);
  Schedule sched = build_schedule(sub, K, policy);
  AtomicMeasure rho = sample_sigma(red.image_group, sched, N, seed);
  return GroupMeasure{pushforward_scale(rho, red.family.M), std::move(sched), std::move(red)};
}

}  // namespace rigidlab
