#pragma once

// Independent reference computations shared by the unit and acceptance tests.

#include <algorithm>
#include <random>
#include <vector>

#include "rigidlab/deciders.hpp"

namespace rigidlab::oracle {

// l polynomials (degree <= 4, |coeff| <= 5) built from a few random cores and small integer
// combinations of them, so relation groups are usually nontrivial.
inline SequenceFamily random_family(std::mt19937_64& rng, bool zero_constants) {
  std::uniform_int_distribution<long> small(-2, 2), len(2, 4);
  const std::size_t l = static_cast<std::size_t>(len(rng));
  const std::size_t cores = 1 + rng() % l;
  std::vector<IntVec> ps;
  auto ok = [](const IntVec& p) {
    bool nonzero = false;
    for (const auto& c : p) {
      if (abs(c) > 5) return false;
      nonzero = nonzero || c != 0;
    }
    return nonzero;
  };
  while (ps.size() < cores) {
    IntVec p(5, 0);
    for (std::size_t d = zero_constants ? 1 : 0; d < 5; ++d) p[d] = small(rng);
    if (ok(p)) ps.push_back(p);
  }
  const std::vector<IntVec> core = ps;
  while (ps.size() < l) {
    IntVec p(5, 0);
    for (const auto& c : core) {
      long k = small(rng);
      for (std::size_t d = 0; d < 5; ++d) p[d] += k * c[d];
    }
    if (ok(p)) ps.push_back(p);
  }
  std::shuffle(ps.begin(), ps.end(), rng);
  return SequenceFamily::polynomial(ps);
}

inline bool annihilates(const SequenceFamily& fam, const IntVec& a) {
  IntVec sum(5, 0);
  for (std::size_t j = 0; j < fam.size(); ++j)
    for (std::size_t d = 0; d < fam.polys()[j].size(); ++d) sum[d] += a[j] * fam.polys()[j][d];
  return std::all_of(sum.begin(), sum.end(), [](const Int& x) { return x == 0; });
}

// All combinations of the relation basis with coefficients in [-bound, bound].
inline std::vector<IntVec> relation_elements(const SequenceFamily& fam, long bound) {
  Lattice A = relation_group(fam);
  const std::size_t l = fam.size(), r = A.rank();
  std::vector<IntVec> out;
  std::vector<long> c(r, -bound);
  while (true) {
    IntVec a(l, 0);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < l; ++j) a[j] += c[i] * A.basis()[i][j];
    out.push_back(std::move(a));
    std::size_t i = 0;
    while (i < r && c[i] == bound) c[i++] = -bound;
    if (i == r) break;
    ++c[i];
  }
  return out;
}

// Feasible iff no scanned element a has supp(a) \ F = {j} with |a_j| = 1.
inline bool split_by_scan(const std::vector<IntVec>& elements, const IndexSet& F) {
  for (const auto& a : elements) {
    std::size_t outside = 0, j = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i] != 0 && !std::binary_search(F.begin(), F.end(), i)) {
        ++outside;
        j = i;
      }
    if (outside == 1 && abs(a[j]) == 1) return false;
  }
  return true;
}

}  // namespace rigidlab::oracle
