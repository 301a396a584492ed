#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rigidlab/measure.hpp"

namespace rigidlab {

struct Interval {
  Rat lo;
  Rat hi;  // half-open [lo, hi)
};

// Finite union of disjoint half-open arcs of [0,1), kept sorted with touching arcs merged.
class CircleSet {
 public:
  CircleSet() = default;
  static CircleSet from_intervals(std::vector<Interval> intervals);
  static CircleSet arc(const Rat& lo, const Rat& hi);  // [lo, hi) in [0,1]
  static CircleSet full() { return arc(0, 1); }

  const std::vector<Interval>& intervals() const { return arcs_; }
  bool empty() const { return arcs_.empty(); }
  Rat measure() const;
  bool contains(const Rat& x) const;  // x reduced mod 1
  bool contains(double x) const;
  bool operator==(const CircleSet& o) const;

 private:
  std::vector<Interval> arcs_;
};

// Lebesgue measure of {y : y in B and y + offsets[j] in B for all j}.
Rat overlap_measure(const CircleSet& B, const std::vector<Rat>& offsets);
double overlap_measure(const std::vector<std::pair<double, double>>& B, const std::vector<double>& offsets);

// nu = base x Lebesgue, T(x, y) = (x, y + x); sets are A = T x B.
struct SkewSystem {
  AtomicMeasure base;
};

struct Estimate {
  double value = 0;
  double std_error = 0;  // zero for explicit atoms
};

// sum_i w_i mu(B ∩ (B - s_1 x_i) ∩ ...). Exact form needs an explicit atom list.
Rat skew_correlation_exact(const SkewSystem& sys, const CircleSet& B, const std::vector<Int>& shifts);
Estimate skew_correlation(const SkewSystem& sys, const CircleSet& B, const std::vector<Int>& shifts);

// Factor j of the integrand is 1_B(y + <finite[j], h> + <free[j], tau>); a leading 1_B(y) is implicit.
struct CorrelationPattern {
  std::vector<IntVec> finite;
  std::vector<IntVec> free;
  std::size_t free_count = 0;
};
// Average over the finite reps h; free coordinates are independent uniform.
Rat haar_correlation_limit(const std::vector<RatVec>& reps, const CircleSet& B, const CorrelationPattern& pattern);

// Exact double integral over (y, tau) in [0,1)^2 of prod_j 1_B(y + c_j + m_j tau), with the
// implicit 1_B(y) factor.
Rat strip_integral(const CircleSet& B, const std::vector<Rat>& c, const std::vector<Int>& m);

struct FSTail {
  std::vector<Int> generators;
  std::size_t k0 = 0;
  std::vector<std::vector<std::size_t>> alphas;  // 1-based generator indices, ascending
  std::vector<Int> sums;
};
FSTail fs_tail(const std::vector<Int>& generators, std::size_t k0);

struct ScanRow {
  std::vector<std::size_t> alpha;  // 1-based
  Int n_alpha;
  double correlation = 0;
  double std_error = 0;
  std::string verdict;  // MISS (below threshold), HIT (above), INCONCLUSIVE
};
struct ScanResult {
  Rat threshold;
  std::vector<ScanRow> rows;  // every nonempty subset of the generators
  std::optional<std::size_t> k0;  // smallest tail start with all MISS
  std::size_t tail_size = 0;
  std::size_t tail_inconclusive = 0;
};
// Correlation of A with its shifts by p_j(n_alpha); a MISS needs value + 3 se < threshold.
ScanResult fs_scan(const AtomicMeasure& m, const std::vector<Int>& generators,
                   const std::vector<IntVec>& shift_polys, const CircleSet& B, const Rat& threshold,
                   std::size_t k0_max);
ScanRow rescan(const AtomicMeasure& m, const std::vector<Int>& generators, const std::vector<IntVec>& shift_polys,
               const CircleSet& B, const Rat& threshold, const std::vector<std::size_t>& alpha);

// Union of arcs B with triple-correlation integral <= mu(B)^ell / 2.
struct BehrendSet {
  CircleSet set;
  unsigned long radix = 0;
  unsigned length = 0;
  std::size_t digit_vectors = 0;
  Rat integral;
  Rat bound;
};
BehrendSet behrend_set(unsigned ell);
std::pair<Rat, Rat> verify_behrend(const CircleSet& B, unsigned ell);
struct GridCheck {
  double estimate = 0;
  double error_bound = 0;
};
GridCheck behrend_grid_quadrature(const CircleSet& B, std::size_t grid = 2000);

// Gaussian masses.
struct RealInterval {
  double lo;
  double hi;
};
double normal_mass(const RealInterval& I);
double gaussian_pair_mass(double rho, const RealInterval& I, const RealInterval& J);

struct TransferRow {
  std::size_t level;
  IntVec a;
  bool rigid;
  double rho;
  double mass;
  double target;
  double deviation;
};
struct TransferReport {
  std::vector<TransferRow> rows;
  double max_deviation_top = 0;
  bool pass = false;
};
// Frequencies sum_j a_j phi_j(n_k) for each direction a (unit vectors by default).
TransferReport verify_gaussian_transfer(const AtomicMeasure& m, const Schedule& s, const SequenceFamily& fam,
                                        const Lattice& G, const RealInterval& I, double tol,
                                        std::vector<IntVec> directions = {}, std::size_t levels = 3);

// Demos.
struct DemoOptions {
  std::size_t depth = 5;
  std::size_t samples = 100000;
  std::uint64_t seed = 42;
  std::size_t generators = 10;
  std::size_t k0_max = 13;  // clipped to generators - 1
  bool scan = true;
};

struct Cor65Report {
  std::vector<IntVec> polys;
  Lattice G_prime{1};
  std::vector<std::size_t> padding;  // 0-based coordinates t_s
  Lattice G{1};
  Lattice H{1};  // combinations of the polynomials landing in G
  std::size_t limit_points = 0;
  Rat limit, nu_power, gap, epsilon, threshold;
  bool limit_matches_closed_form = false;
  bool gap_at_least_two_epsilon = false;
  std::size_t requested_depth = 0;
  std::size_t measure_depth = 0;
  Schedule schedule;
  std::vector<Int> generators;
  std::optional<ScanResult> scan;
};
Cor65Report cor65_demo(const std::vector<IntVec>& polys, const DemoOptions& opt);
// Points with y_2 = 2 y_1 and every coordinate in {0, 1/3, 2/3}.
std::vector<RatVec> thirds_points(std::size_t ell);

struct Cor66Report {
  IntVec p, q, difference;
  std::size_t degree = 0;
  unsigned ell = 0;
  BehrendSet behrend;
  Rat limit, bound, threshold;
  bool limit_matches_behrend = false;
  Schedule schedule;
  std::vector<Int> generators;
  std::optional<ScanResult> scan;
};
void check_degree_condition(const IntVec& p, const IntVec& q);
Cor66Report cor66_demo(const IntVec& p, const IntVec& q, unsigned ell, const DemoOptions& opt);

struct Cor67Level {
  unsigned long prime = 0;
  Rat limit;
  double riemann_gap = 0;   // |limit - uniform value|
  double riemann_bound = 0; // Lipschitz bound for that gap
  bool below_threshold = false;
  std::vector<Int> generators;
  std::optional<ScanResult> scan;
};
struct Cor67Report {
  unsigned ell = 0;
  BehrendSet behrend;
  Rat uniform_limit, bound, threshold;
  bool uniform_within_bound = false;
  std::vector<Cor67Level> levels;
  std::optional<unsigned long> witness_prime;  // first prime whose limit is below the threshold
};
Rat cor67_limit(const CircleSet& B, unsigned long p);
Cor67Report cor67_demo(unsigned ell, const std::vector<unsigned long>& primes, const DemoOptions& opt);

}  // namespace rigidlab
