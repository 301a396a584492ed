#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rigidlab/families.hpp"

namespace rigidlab {

Int factorial(unsigned k);

struct Schedule {
  std::vector<Int> n;             // n[k-1] = n_k
  std::vector<RatVec> alpha;      // alpha[k-1][j]
  std::size_t depth() const { return n.size(); }
};

struct SchedulePolicy {
  std::size_t search_budget = 1000000;  // candidate indices over all levels
  Int base_modulus = 1;                 // extra divisor of n_k from level `modulus_from`
  std::size_t modulus_from = 1;
};

// One property family: pass flag and the smallest slack (bound minus value).
struct PropertyCheck {
  bool pass = true;
  std::optional<Rat> worst_margin;  // nullopt when vacuous
  std::string worst_at;             // "k=..,j=.." of the worst item
};

struct ScheduleReport {
  PropertyCheck window;      // alpha in (0, 1/(k! 2^k Phi(n_{k-1}))]
  PropertyCheck diagonal;    // ||phi_j(n_k) a_k^j - (1/k! + 1/(2 k!^2))|| < 1/(2 k!^2)
  PropertyCheck cross;       // ||phi_j(n_k) a_k^j'|| < 1/(2 k!^2), j != j'
  PropertyCheck earlier;     // ||phi_j(n_k) a_s^j'|| < 1/(k^2 k!), s < k
  bool indices_ok = true;    // increasing, positive, k! | n_k
  bool all_pass() const {
    return window.pass && diagonal.pass && cross.pass && earlier.pass && indices_ok;
  }
};

Schedule build_schedule(const SequenceFamily& fam, std::size_t K, const SchedulePolicy& policy = {});
ScheduleReport check_schedule(const Schedule& s, const SequenceFamily& fam);

// Haar measure of the annihilator, split as finite reps on some coordinates
// times Lebesgue on the coordinates where G vanishes identically.
struct HaarCells {
  std::size_t dim = 0;
  std::vector<std::size_t> finite_coords;
  std::vector<std::size_t> torus_coords;
  std::vector<RatVec> reps;  // over finite_coords
};
HaarCells haar_cells(const Lattice& G, std::size_t rep_cap = kDefaultRepCap);

struct CellMeasure {
  unsigned level = 0;
  std::vector<std::size_t> finite_coords;
  std::vector<std::size_t> torus_coords;
  std::map<std::vector<unsigned long>, Rat> finite_weights;  // cells over finite_coords
  Rat weight(const std::vector<unsigned long>& cell) const;  // full-dimensional cell
  Rat total() const;
};
CellMeasure cell_weights(const Lattice& G, unsigned k, std::size_t rep_cap = kDefaultRepCap);

struct Atom {
  Rat x;
  Rat w;
};

// Finite probability measure on the circle. Either an explicit atom list or
// N equally weighted draws x_i = scale * sum_s digit_{i,s} * multiplier_s mod 1.
class AtomicMeasure {
 public:
  AtomicMeasure() = default;
  static AtomicMeasure from_atoms(std::vector<Atom> atoms);  // reduces mod 1, merges, sorts
  static AtomicMeasure dirac(const Rat& x);
  static AtomicMeasure uniform_grid(unsigned long q);  // atoms k/q
  static AtomicMeasure from_draws(std::vector<Rat> multipliers, std::vector<std::uint32_t> digits,
                                  Int scale = 1);

  bool factored() const { return static_cast<bool>(draws_); }
  std::size_t size() const;  // atoms, or draws when factored
  std::vector<double> weights() const;
  std::vector<double> positions() const;
  // frac(t * x_i) for every atom or draw, error below 2^-60 before rounding.
  std::vector<double> phases(const Int& t) const;
  std::vector<Rat> exact_phases(const Int& t) const;  // explicit atoms only
  // Sorted, merged exact atoms; materializes draws.
  std::vector<Atom> atoms() const;
  Int scale() const;
  const std::vector<Rat>& multipliers() const;
  const std::vector<std::uint32_t>& digits() const;
  AtomicMeasure scaled(const Int& M) const;

 private:
  struct Draws {
    std::vector<Rat> multipliers;
    std::vector<std::uint32_t> digits;  // row-major: draw x multiplier
    Int scale;
  };
  std::vector<Atom> atoms_;
  std::shared_ptr<const Draws> draws_;
};

AtomicMeasure sample_sigma(const Lattice& G, const Schedule& s, std::size_t N, std::uint64_t seed,
                           std::size_t rep_cap = kDefaultRepCap);
std::complex<double> fourier_coefficient(const AtomicMeasure& m, const Int& t);
AtomicMeasure pushforward_scale(const AtomicMeasure& m, const Int& M);

struct DichotomyRow {
  std::size_t level;
  IntVec a;
  double modulus;
  int target;
  double deviation;
};
struct DichotomyReport {
  std::vector<DichotomyRow> rows;
  double max_deviation_top = 0;
  bool pass = false;
};
// Top `levels` levels of the schedule; frequencies from fam evaluated at n_k.
DichotomyReport verify_dichotomy(const AtomicMeasure& m, const Schedule& s, const SequenceFamily& fam,
                                 const Lattice& G, long coeff_bound, double tol,
                                 std::size_t levels = 3);

// Circle distance between t * g(omega) and sum_j a_j omega_j(K)/K!, t = sum_j a_j phi_j(n_K).
// omega[s-1][r] is the level-s cell of coordinate r.
Rat uniformity_distance(const Schedule& s, const SequenceFamily& fam,
                        const std::vector<std::vector<unsigned long>>& omega, const IntVec& a);
Rat uniformity_bound(const Schedule& s, const SequenceFamily& fam, const IntVec& a);

struct GroupMeasure {
  AtomicMeasure measure;
  Schedule schedule;  // on the independent subfamily
  Reduction reduction;
};
GroupMeasure build_measure_for_group(const SequenceFamily& fam, const Lattice& G, std::size_t K,
                                     std::size_t N, std::uint64_t seed,
                                     const SchedulePolicy& policy = {});

Rat circle_norm(const Rat& x);  // distance to the nearest integer

}  // namespace rigidlab
