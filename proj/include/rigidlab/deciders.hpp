#pragma once

#include <optional>
#include <vector>

#include "rigidlab/families.hpp"

namespace rigidlab {

using IndexSet = std::vector<std::size_t>;  // sorted, 0-based

struct SplitWitness {
  IntVec a;       // element of the relation group
  std::size_t j;  // the single coordinate of supp(a) outside F; a_j = 1
};

struct SplitVerdict {
  IndexSet F;
  bool feasible = false;
  std::optional<SplitWitness> witness;  // set iff infeasible
  std::optional<Lattice> H;             // optional finite-index witness when feasible
  bool user_asserted = false;
};

struct InterpolationVerdict {
  bool holds = false;
  bool adequate = false;
  std::optional<SplitWitness> witness;
  std::optional<IntVec> adequacy_certificate;
  bool user_asserted = false;
};

inline constexpr std::size_t kMaxSplitDimension = 20;

bool is_rigidity_group(const Lattice& G, const SequenceFamily& fam);
SplitVerdict split_feasible(const SequenceFamily& fam, const IndexSet& F);
SplitVerdict split_feasible(const Lattice& A, const IndexSet& F);
// Verdicts ordered by subset bitmask (bit i set iff coordinate i in F).
std::vector<SplitVerdict> all_splits(const SequenceFamily& fam, bool with_witness_groups = false);
InterpolationVerdict interpolation_condition(const SequenceFamily& fam);
bool poly_group_condition(const SequenceFamily& fam, const IndexSet& F);
Lattice split_witness_group(const SequenceFamily& fam, const IndexSet& F);
Lattice split_witness_group(const Lattice& A, const IndexSet& F);

bool witness_valid(const Lattice& A, const IndexSet& F, const SplitWitness& w);
bool witness_group_valid(const Lattice& A, const IndexSet& F, const Lattice& H);

IndexSet subset_from_mask(std::size_t l, unsigned long mask);

}  // namespace rigidlab
