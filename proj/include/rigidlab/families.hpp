#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rigidlab/lattice.hpp"

namespace rigidlab {

enum class FamilyKind { Polynomial, Beatty, Explicit };

struct BeattyMultiplier {
  Rat value;
  Rat error;  // |true alpha - value| <= error
};

class SequenceFamily {
 public:
  static SequenceFamily polynomial(std::vector<IntVec> coefficient_vectors);
  static SequenceFamily beatty(std::vector<BeattyMultiplier> alphas, bool independent);
  // values[j][n-1] = phi_j(n)
  static SequenceFamily explicit_table(std::vector<IntVec> values,
                                       std::optional<Lattice> relations = std::nullopt);

  FamilyKind kind() const { return kind_; }
  std::size_t size() const;
  const std::vector<IntVec>& polys() const { return polys_; }
  const std::vector<BeattyMultiplier>& alphas() const { return alphas_; }
  const std::vector<IntVec>& values() const { return values_; }
  const std::optional<Lattice>& user_relations() const { return user_relations_; }
  std::size_t max_degree() const;
  bool zero_constant_terms() const;

 private:
  FamilyKind kind_ = FamilyKind::Polynomial;
  std::vector<IntVec> polys_;  // ascending coefficients, trailing zeros trimmed
  std::vector<BeattyMultiplier> alphas_;
  std::vector<IntVec> values_;
  std::optional<Lattice> user_relations_;
};

// Parses "1.4142", "-3", "22/7". Decimal strings carry error 10^-digits.
BeattyMultiplier parse_multiplier(const std::string& text);

Int eval_poly(const IntVec& coeffs, const Int& n);
IntVec evaluate(const SequenceFamily& fam, const Int& n);

// Rows: polynomials; columns: degrees 0..max_degree.
IntMat coefficient_matrix(const SequenceFamily& fam);

Lattice relation_group(const SequenceFamily& fam);
bool relation_group_user_asserted(const SequenceFamily& fam);

struct Adequacy {
  bool adequate = false;
  std::optional<IntVec> certificate;
  std::string reason;
};
Adequacy is_adequate(const SequenceFamily& fam);

struct ReducedFamily {
  std::vector<std::size_t> indices;  // 0-based, ascending
  std::vector<IntVec> relation;      // relation[j] in Z^c
  std::vector<Int> denominator;      // b_j > 0
  Int M;
  IntMat image_map;  // c x l, column j = (M / b_j) * relation[j]
  std::size_t c() const { return indices.size(); }
};

struct Reduction {
  ReducedFamily family;
  Lattice image_group;  // lattice in Z^c
};
Reduction reduce_family(const SequenceFamily& fam, const Lattice& G);
SequenceFamily subfamily(const SequenceFamily& fam, const std::vector<std::size_t>& indices);
// W * d
IntVec apply_image_map(const ReducedFamily& red, const IntVec& d);

// Span of the integer vectors with entries in [-bound, bound] annihilating the
// last `window` rows of the table. Sample-based; never a proof.
Lattice detect_relations(const SequenceFamily& fam, long coeff_bound, std::size_t window);

}  // namespace rigidlab
