#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <gmpxx.h>

#include "rigidlab/errors.hpp"

namespace rigidlab {

using Int = mpz_class;
using Rat = mpq_class;
using IntVec = std::vector<Int>;
using RatVec = std::vector<Rat>;
using IntMat = std::vector<IntVec>;  // row-major

IntVec int_vec(std::initializer_list<long> xs);
IntVec unit_vector(std::size_t dim, std::size_t i);

// Subgroup of Z^dim stored in row Hermite normal form: pivots positive,
// entries above a pivot reduced into [0, pivot). Equal subgroups have equal bases.
class Lattice {
 public:
  explicit Lattice(std::size_t ambient_dim);  // trivial lattice
  static Lattice full(std::size_t ambient_dim);

  std::size_t ambient_dim() const { return dim_; }
  std::size_t rank() const { return basis_.size(); }
  const IntMat& basis() const { return basis_; }
  bool is_trivial() const { return basis_.empty(); }

  bool operator==(const Lattice& o) const { return dim_ == o.dim_ && basis_ == o.basis_; }

 private:
  friend Lattice canonicalize(const IntMat& vectors, std::size_t ambient_dim);
  std::size_t dim_;
  IntMat basis_;
};

// d_1 | d_2 | ... | d_r with left * B * right = diag(d) for the r x dim basis matrix B.
struct QuotientDecomposition {
  std::vector<Int> invariant_factors;
  std::size_t free_rank = 0;
  IntMat left;
  IntMat right;
};

struct TorusSubgroup {
  std::size_t ambient_dim = 0;
  std::vector<RatVec> finite_reps;  // coordinates in [0,1)
  Lattice torus_directions{1};
};

inline constexpr std::size_t kDefaultRepCap = 1000000;

Lattice canonicalize(const IntMat& vectors, std::size_t ambient_dim);
bool member(const Lattice& L, const IntVec& v);
// {a : a^T M = 0} for an l x m matrix M (l rows); saturated.
Lattice kernel(const IntMat& M, std::size_t rows, std::size_t cols);
// Elements of L vanishing off `support` (0-based coordinates).
Lattice intersect_coordinate_subspace(const Lattice& L, const std::vector<std::size_t>& support);
Int coordinate_image_gcd(const Lattice& L, std::size_t j);
Lattice lattice_sum(const Lattice& a, const Lattice& b);
std::optional<Int> index_in_ambient(const Lattice& L);  // nullopt = infinite
QuotientDecomposition smith_decomposition(const Lattice& L);
Lattice finite_index_extension(const Lattice& G, const IntMat& excluded);
TorusSubgroup annihilator(const Lattice& G, std::size_t rep_cap = kDefaultRepCap);
int character_integral(const Lattice& G, const IntVec& a);

// Coefficients c with sum_i c_i * basis_i = v, when v is a member.
std::optional<IntVec> coordinates_in_basis(const Lattice& L, const IntVec& v);

IntMat mat_mul(const IntMat& a, const IntMat& b);
Int dot(const IntVec& a, const IntVec& b);
Rat frac(const Rat& x);  // representative in [0,1)
Rat ratio(const Int& num, const Int& den);  // canonical num/den, den != 0

}  // namespace rigidlab
