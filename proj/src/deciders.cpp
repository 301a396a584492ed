#include "rigidlab/deciders.hpp"

#include <algorithm>

#include "rigidlab/parallel.hpp"

namespace rigidlab {

namespace {

bool contains(const IndexSet& F, std::size_t i) { return std::find(F.begin(), F.end(), i) != F.end(); }

void check_subset(const IndexSet& F, std::size_t l) {
  for (auto i : F)
    if (i >= l) fail(ErrorCode::DimensionMismatch, "subset index out of range");
}

// Element of L with a_j = gcd of the j-coordinates, via extended gcd over the basis.
IntVec gcd_combination(const Lattice& L, std::size_t j) {
  IntVec acc(L.ambient_dim(), 0);
  Int g = 0;
  for (const auto& row : L.basis()) {
    if (row[j] == 0) continue;
    Int ng, s, t;
    mpz_gcdext(ng.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), g.get_mpz_t(), row[j].get_mpz_t());
    for (std::size_t c = 0; c < acc.size(); ++c) acc[c] = s * acc[c] + t * row[c];
    g = ng;
  }
  return acc;
}

}  // namespace

IndexSet subset_from_mask(std::size_t l, unsigned long mask) {
  IndexSet F;
  for (std::size_t i = 0; i < l; ++i)
    if (mask >> i & 1UL) F.push_back(i);
  return F;
}

bool is_rigidity_group(const Lattice& G, const SequenceFamily& fam) {
  Lattice A = relation_group(fam);
  if (A.ambient_dim() != G.ambient_dim())
    fail(ErrorCode::DimensionMismatch, "group dimension differs from family");
  return std::all_of(A.basis().begin(), A.basis().end(), [&](const IntVec& a) { return member(G, a); });
}

SplitVerdict split_feasible(const Lattice& A, const IndexSet& F) {
  const std::size_t l = A.ambient_dim();
  check_subset(F, l);
  SplitVerdict v;
  v.F = F;
  std::sort(v.F.begin(), v.F.end());
  v.feasible = true;
  for (std::size_t j = 0; j < l && v.feasible; ++j) {
    if (contains(v.F, j)) continue;
    IndexSet S = v.F;
    S.push_back(j);
    Lattice slice = intersect_coordinate_subspace(A, S);
    if (coordinate_image_gcd(slice, j) == 1) {
      v.feasible = false;
      v.witness = SplitWitness{gcd_combination(slice, j), j};
    }
  }
  return v;
}

SplitVerdict split_feasible(const SequenceFamily& fam, const IndexSet& F) {
  SplitVerdict v = split_feasible(relation_group(fam), F);
  v.user_asserted = relation_group_user_asserted(fam);
  return v;
}

std::vector<SplitVerdict> all_splits(const SequenceFamily& fam, bool with_witness_groups) {
  const std::size_t l = fam.size();
  if (l > kMaxSplitDimension)
    fail(ErrorCode::CapExceeded, "subset table needs l <= 20; query subsets individually");
  Lattice A = relation_group(fam);
  bool asserted = relation_group_user_asserted(fam);
  const std::size_t count = std::size_t{1} << l;
  std::vector<SplitVerdict> out(count);
  parallel_for(count, [&](std::size_t mask) {
    SplitVerdict v = split_feasible(A, subset_from_mask(l, mask));
    v.user_asserted = asserted;
    if (with_witness_groups && v.feasible) v.H = split_witness_group(A, v.F);
    out[mask] = std::move(v);
  });
  return out;
}

InterpolationVerdict interpolation_condition(const SequenceFamily& fam) {
  InterpolationVerdict v;
  Lattice A = relation_group(fam);
  v.user_asserted = relation_group_user_asserted(fam);
  if (fam.kind() == FamilyKind::Explicit) {
    v.adequate = true;  // carried by the asserted relation lattice
  } else {
    Adequacy adq = is_adequate(fam);
    v.adequate = adq.adequate;
    v.adequacy_certificate = adq.certificate;
  }
  if (!v.adequate) return v;
  for (std::size_t j = 0; j < A.ambient_dim(); ++j) {
    if (coordinate_image_gcd(A, j) == 1) {
      v.witness = SplitWitness{gcd_combination(A, j), j};
      return v;
    }
  }
  v.holds = true;
  return v;
}

bool poly_group_condition(const SequenceFamily& fam, const IndexSet& F) {
  if (fam.kind() != FamilyKind::Polynomial || !fam.zero_constant_terms())
    fail(ErrorCode::Precondition, "polynomial-group condition needs zero constant terms");
  check_subset(F, fam.size());
  IntMat coeffs = coefficient_matrix(fam);
  const std::size_t d = coeffs[0].size() - 1;
  IntMat span;
  for (auto i : F) span.emplace_back(coeffs[i].begin() + 1, coeffs[i].end());
  Lattice P = canonicalize(span, d);
  for (std::size_t j = 0; j < fam.size(); ++j) {
    if (contains(F, j)) continue;
    if (member(P, IntVec(coeffs[j].begin() + 1, coeffs[j].end()))) return false;
  }
  return true;
}

Lattice split_witness_group(const Lattice& A, const IndexSet& F) {
  const std::size_t l = A.ambient_dim();
  SplitVerdict v = split_feasible(A, F);
  if (!v.feasible) fail(ErrorCode::Precondition, "split is infeasible; no witness group exists");
  IntMat gens = A.basis();
  IntMat excluded;
  for (std::size_t i = 0; i < l; ++i) {
    if (contains(v.F, i))
      gens.push_back(unit_vector(l, i));
    else
      excluded.push_back(unit_vector(l, i));
  }
  return finite_index_extension(canonicalize(gens, l), excluded);
}

Lattice split_witness_group(const SequenceFamily& fam, const IndexSet& F) {
  return split_witness_group(relation_group(fam), F);
}

bool witness_valid(const Lattice& A, const IndexSet& F, const SplitWitness& w) {
  if (w.a.size() != A.ambient_dim() || !member(A, w.a)) return false;
  if (contains(F, w.j) || abs(w.a[w.j]) != 1) return false;
  for (std::size_t i = 0; i < w.a.size(); ++i)
    if (i != w.j && w.a[i] != 0 && !contains(F, i)) return false;
  return true;
}

bool witness_group_valid(const Lattice& A, const IndexSet& F, const Lattice& H) {
  if (H.ambient_dim() != A.ambient_dim() || !index_in_ambient(H)) return false;
  for (const auto& a : A.basis())
    if (!member(H, a)) return false;
  for (std::size_t j = 0; j < H.ambient_dim(); ++j)
    if (member(H, unit_vector(H.ambient_dim(), j)) != contains(F, j)) return false;
  return true;
}

}  // namespace rigidlab
