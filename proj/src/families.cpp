#include "rigidlab/families.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace rigidlab {

namespace {

void trim(IntVec& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

bool is_constant(const IntVec& p) { return p.size() <= 1; }

// Whether some nonzero a in [-box, box]^l has |sum a_j alpha_j| within the
// accumulated truncation error, i.e. a relation the stored digits cannot rule out.
bool has_small_relation(const std::vector<BeattyMultiplier>& alphas) {
  const std::size_t l = alphas.size();
  long box = 10;
  while (box > 1 && std::pow(2.0 * box + 1.0, static_cast<double>(l)) > 2e6) --box;
  std::vector<long> a(l, -box);
  while (true) {
    bool nonzero = std::any_of(a.begin(), a.end(), [](long x) { return x != 0; });
    if (nonzero) {
      Rat s = 0, err = 0;
      for (std::size_t j = 0; j < l; ++j) {
        s += alphas[j].value * a[j];
        err += alphas[j].error * std::labs(a[j]);
      }
      if (abs(s) <= err) return true;
    }
    std::size_t i = 0;
    while (i < l && a[i] == box) a[i++] = -box;
    if (i == l) break;
    ++a[i];
  }
  return false;
}

// Solves sum_r x_r cols[r] = target over Q; cols are independent.
std::optional<RatVec> solve_rational(const std::vector<IntVec>& cols, const IntVec& target,
                                     std::size_t height) {
  const std::size_t c = cols.size();
  std::vector<RatVec> m(height, RatVec(c + 1, 0));
  for (std::size_t i = 0; i < height; ++i) {
    for (std::size_t r = 0; r < c; ++r) m[i][r] = i < cols[r].size() ? cols[r][i] : Int(0);
    m[i][c] = i < target.size() ? target[i] : Int(0);
  }
  std::size_t row = 0;
  std::vector<std::size_t> pivot_col;
  for (std::size_t col = 0; col < c && row < height; ++col) {
    std::size_t p = row;
    while (p < height && m[p][col] == 0) ++p;
    if (p == height) continue;
    std::swap(m[p], m[row]);
    for (std::size_t i = 0; i < height; ++i) {
      if (i == row || m[i][col] == 0) continue;
      Rat f = m[i][col] / m[row][col];
      for (std::size_t k = col; k <= c; ++k) m[i][k] -= f * m[row][k];
    }
    pivot_col.push_back(col);
    ++row;
  }
  for (std::size_t i = row; i < height; ++i)
    if (m[i][c] != 0) return std::nullopt;
  RatVec x(c, 0);
  for (std::size_t i = 0; i < row; ++i) x[pivot_col[i]] = m[i][c] / m[i][pivot_col[i]];
  return x;
}

}  // namespace

SequenceFamily SequenceFamily::polynomial(std::vector<IntVec> coefficient_vectors) {
  if (coefficient_vectors.empty()) fail(ErrorCode::Precondition, "family must be nonempty");
  SequenceFamily f;
  f.kind_ = FamilyKind::Polynomial;
  for (auto& p : coefficient_vectors) {
    trim(p);
    if (is_constant(p)) fail(ErrorCode::Precondition, "constant polynomial in family");
  }
  f.polys_ = std::move(coefficient_vectors);
  return f;
}

SequenceFamily SequenceFamily::beatty(std::vector<BeattyMultiplier> alphas, bool independent) {
  if (alphas.empty()) fail(ErrorCode::Precondition, "family must be nonempty");
  if (!independent)
    fail(ErrorCode::Precondition, "Beatty multipliers must be asserted rationally independent");
  for (const auto& a : alphas)
    if (abs(a.value) <= a.error) fail(ErrorCode::Precondition, "Beatty multiplier may be zero");
  if (has_small_relation(alphas))
    fail(ErrorCode::Precondition, "Beatty multipliers admit a small integer relation");
  SequenceFamily f;
  f.kind_ = FamilyKind::Beatty;
  f.alphas_ = std::move(alphas);
  return f;
}

SequenceFamily SequenceFamily::explicit_table(std::vector<IntVec> values,
                                              std::optional<Lattice> relations) {
  if (values.empty()) fail(ErrorCode::Precondition, "family must be nonempty");
  for (const auto& row : values)
    if (row.size() != values[0].size() || row.empty())
      fail(ErrorCode::Precondition, "explicit table must be rectangular and nonempty");
  if (relations && relations->ambient_dim() != values.size())
    fail(ErrorCode::DimensionMismatch, "relation lattice dimension differs from family size");
  SequenceFamily f;
  f.kind_ = FamilyKind::Explicit;
  f.values_ = std::move(values);
  f.user_relations_ = std::move(relations);
  return f;
}

std::size_t SequenceFamily::size() const {
  switch (kind_) {
    case FamilyKind::Polynomial: return polys_.size();
    case FamilyKind::Beatty: return alphas_.size();
    case FamilyKind::Explicit: return values_.size();
  }
  return 0;
}

std::size_t SequenceFamily::max_degree() const {
  std::size_t d = 0;
  for (const auto& p : polys_) d = std::max(d, p.size() - 1);
  return d;
}

bool SequenceFamily::zero_constant_terms() const {
  return std::all_of(polys_.begin(), polys_.end(), [](const IntVec& p) { return p[0] == 0; });
}

BeattyMultiplier parse_multiplier(const std::string& text) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  if (s.empty()) throw ParseError("empty multiplier", 0);
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    Rat r;
    if (r.set_str(s, 10) != 0 || r.get_den() == 0) throw ParseError("bad rational '" + s + "'", 0);
    r.canonicalize();
    return {r, 0};
  }
  std::size_t pos = 0;
  bool neg = false;
  if (s[pos] == '+' || s[pos] == '-') neg = s[pos++] == '-';
  std::string digits;
  std::size_t frac_digits = 0;
  bool seen_dot = false;
  for (; pos < s.size(); ++pos) {
    char ch = s[pos];
    if (ch == '.' && !seen_dot) {
      seen_dot = true;
    } else if (std::isdigit(static_cast<unsigned char>(ch))) {
      digits += ch;
      if (seen_dot) ++frac_digits;
    } else {
      throw ParseError("unexpected character in multiplier", pos);
    }
  }
  if (digits.empty()) throw ParseError("multiplier has no digits", pos);
  Int num(digits, 10);
  Int den;
  mpz_ui_pow_ui(den.get_mpz_t(), 10, frac_digits);
  Rat value(neg ? Int(-num) : num, den);
  value.canonicalize();
  Rat error = frac_digits == 0 ? Rat(0) : Rat(Int(1), den);
  return {value, error};
}

Int eval_poly(const IntVec& coeffs, const Int& n) {
  Int acc = 0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * n + *it;
  return acc;
}

IntVec evaluate(const SequenceFamily& fam, const Int& n) {
  if (n < 1) fail(ErrorCode::Precondition, "sequence index must be positive");
  IntVec out;
  switch (fam.kind()) {
    case FamilyKind::Polynomial:
      for (const auto& p : fam.polys()) out.push_back(eval_poly(p, n));
      break;
    case FamilyKind::Beatty:
      for (const auto& a : fam.alphas()) {
        Rat x = a.value * n;
        Rat slack = a.error * n;
        Int lo, hi;
        Rat xl = x - slack, xh = x + slack;
        mpz_fdiv_q(lo.get_mpz_t(), xl.get_num_mpz_t(), xl.get_den_mpz_t());
        mpz_fdiv_q(hi.get_mpz_t(), xh.get_num_mpz_t(), xh.get_den_mpz_t());
        if (lo != hi || (slack != 0 && xh == Rat(hi)))
          fail(ErrorCode::PrecisionInsufficient,
               "floor of n*alpha not certified at n=" + n.get_str());
        out.push_back(lo);
      }
      break;
    case FamilyKind::Explicit: {
      if (n > fam.values()[0].size())
        fail(ErrorCode::Precondition, "index beyond explicit table length");
      std::size_t i = n.get_ui() - 1;
      for (const auto& row : fam.values()) out.push_back(row[i]);
      break;
    }
  }
  return out;
}

IntMat coefficient_matrix(const SequenceFamily& fam) {
  if (fam.kind() != FamilyKind::Polynomial)
    fail(ErrorCode::Precondition, "coefficient matrix needs a polynomial family");
  std::size_t width = fam.max_degree() + 1;
  IntMat m;
  for (const auto& p : fam.polys()) {
    IntVec row(width, 0);
    std::copy(p.begin(), p.end(), row.begin());
    m.push_back(std::move(row));
  }
  return m;
}

Lattice relation_group(const SequenceFamily& fam) {
  switch (fam.kind()) {
    case FamilyKind::Polynomial: {
      IntMat m = coefficient_matrix(fam);
      return kernel(m, m.size(), m[0].size());
    }
    case FamilyKind::Beatty:
      return Lattice(fam.size());
    case FamilyKind::Explicit:
      if (!fam.user_relations())
        fail(ErrorCode::UndecidableFromSamples,
             "explicit family has no asserted relation lattice; use detect_relations");
      return *fam.user_relations();
  }
  fail(ErrorCode::Precondition, "unknown family kind");
}

bool relation_group_user_asserted(const SequenceFamily& fam) {
  return fam.kind() == FamilyKind::Explicit;
}

Adequacy is_adequate(const SequenceFamily& fam) {
  Adequacy out;
  switch (fam.kind()) {
    case FamilyKind::Explicit:
      fail(ErrorCode::UndecidableFromSamples, "adequacy of sampled sequences is undecidable");
    case FamilyKind::Beatty:
      out.adequate = true;
      out.reason = "independent nonzero multipliers";
      return out;
    case FamilyKind::Polynomial:
      break;
  }
  IntMat full = coefficient_matrix(fam);
  const std::size_t l = full.size();
  Lattice exact = kernel(full, l, full[0].size());
  IntMat growing;
  for (const auto& row : full) growing.emplace_back(row.begin() + 1, row.end());
  Lattice tail = kernel(growing, l, growing[0].size());
  for (const auto& v : tail.basis()) {
    if (!member(exact, v)) {
      out.adequate = false;
      out.certificate = v;
      out.reason = "combination tends to a nonzero constant";
      return out;
    }
  }
  out.adequate = true;
  out.reason = "every integer combination is zero or unbounded";
  return out;
}

Reduction reduce_family(const SequenceFamily& fam, const Lattice& G) {
  if (fam.kind() != FamilyKind::Polynomial)
    fail(ErrorCode::Precondition, "reduction implemented for polynomial families");
  const std::size_t l = fam.size();
  if (G.ambient_dim() != l) fail(ErrorCode::DimensionMismatch, "group dimension differs from family");
  Adequacy adq = is_adequate(fam);
  if (!adq.adequate) fail(ErrorCode::Precondition, "family is not adequate");
  Lattice A = relation_group(fam);
  for (const auto& a : A.basis())
    if (!member(G, a)) fail(ErrorCode::Precondition, "group does not contain the relation group");

  IntMat coeffs = coefficient_matrix(fam);
  const std::size_t height = coeffs[0].size();
  ReducedFamily red;
  std::vector<IntVec> chosen;
  for (std::size_t j = 0; j < l; ++j) {
    IntMat trial = chosen;
    trial.push_back(coeffs[j]);
    if (canonicalize(trial, height).rank() > chosen.size()) {
      chosen.push_back(coeffs[j]);
      red.indices.push_back(j);
    }
  }
  const std::size_t c = chosen.size();
  red.M = 1;
  for (std::size_t j = 0; j < l; ++j) {
    auto x = solve_rational(chosen, coeffs[j], height);
    if (!x) fail(ErrorCode::Precondition, "internal: dependent polynomial not in span");
    Int lcm = 1;
    for (const auto& q : *x) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), q.get_den_mpz_t());
    IntVec b(c);
    Int g = lcm;
    for (std::size_t r = 0; r < c; ++r) {
      Rat scaled = (*x)[r] * lcm;
      b[r] = scaled.get_num();
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), b[r].get_mpz_t());
    }
    for (auto& v : b) v /= g;
    red.relation.push_back(std::move(b));
    red.denominator.push_back(lcm / g);
    red.M *= red.denominator.back();
  }
  red.image_map.assign(c, IntVec(l, 0));
  for (std::size_t j = 0; j < l; ++j) {
    Int scale = red.M / red.denominator[j];
    for (std::size_t r = 0; r < c; ++r) red.image_map[r][j] = scale * red.relation[j][r];
  }
  IntMat images;
  for (const auto& g : G.basis()) images.push_back(apply_image_map(red, g));
  Reduction out{std::move(red), canonicalize(images, c)};
  return out;
}

IntVec apply_image_map(const ReducedFamily& red, const IntVec& d) {
  IntVec a(red.c(), 0);
  for (std::size_t r = 0; r < red.c(); ++r) a[r] = dot(red.image_map[r], d);
  return a;
}

SequenceFamily subfamily(const SequenceFamily& fam, const std::vector<std::size_t>& indices) {
  switch (fam.kind()) {
    case FamilyKind::Polynomial: {
      std::vector<IntVec> ps;
      for (auto i : indices) ps.push_back(fam.polys().at(i));
      return SequenceFamily::polynomial(std::move(ps));
    }
    case FamilyKind::Beatty: {
      std::vector<BeattyMultiplier> as;
      for (auto i : indices) as.push_back(fam.alphas().at(i));
      return SequenceFamily::beatty(std::move(as), true);
    }
    case FamilyKind::Explicit: {
      std::vector<IntVec> vs;
      for (auto i : indices) vs.push_back(fam.values().at(i));
      return SequenceFamily::explicit_table(std::move(vs));
    }
  }
  fail(ErrorCode::Precondition, "unknown family kind");
}

Lattice detect_relations(const SequenceFamily& fam, long coeff_bound, std::size_t window) {
  if (fam.kind() != FamilyKind::Explicit)
    fail(ErrorCode::Precondition, "relation detection applies to explicit tables");
  const std::size_t l = fam.size();
  const std::size_t len = fam.values()[0].size();
  if (window == 0 || window > len) fail(ErrorCode::Precondition, "window longer than table");
  if (coeff_bound < 0) fail(ErrorCode::Precondition, "coefficient bound must be nonnegative");
  if (std::pow(2.0 * coeff_bound + 1.0, static_cast<double>(l)) > 1e7)
    fail(ErrorCode::CapExceeded, "coefficient box too large for exhaustive scan");
  IntMat m(l, IntVec(window));
  for (std::size_t j = 0; j < l; ++j)
    for (std::size_t i = 0; i < window; ++i) m[j][i] = fam.values()[j][len - window + i];
  Lattice window_kernel = kernel(m, l, window);
  if (window_kernel.is_trivial()) return window_kernel;
  IntMat found;
  IntVec a(l, -coeff_bound);
  while (true) {
    if (member(window_kernel, a)) found.push_back(a);
    std::size_t i = 0;
    while (i < l && a[i] == coeff_bound) a[i++] = -coeff_bound;
    if (i == l) break;
    ++a[i];
  }
  return canonicalize(found, l);
}

}  // namespace rigidlab
