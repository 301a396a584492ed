#include "rigidlab/lattice.hpp"

#include <algorithm>
#include <utility>

namespace rigidlab {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DIMENSION_MISMATCH";
    case ErrorCode::Precondition: return "PRECONDITION_VIOLATION";
    case ErrorCode::CapExceeded: return "CAP_EXCEEDED";
    case ErrorCode::SearchExhausted: return "SEARCH_EXHAUSTED";
    case ErrorCode::UndecidableFromSamples: return "UNDECIDABLE_FROM_SAMPLES";
    case ErrorCode::PrecisionInsufficient: return "PRECISION_INSUFFICIENT";
    case ErrorCode::UnsupportedShape: return "UNSUPPORTED_SHAPE";
    case ErrorCode::Parse: return "PARSE_ERROR";
    case ErrorCode::Io: return "IO_ERROR";
  }
  return "UNKNOWN";
}

IntVec int_vec(std::initializer_list<long> xs) {
  IntVec v;
  v.reserve(xs.size());
  for (long x : xs) v.emplace_back(x);
  return v;
}

IntVec unit_vector(std::size_t dim, std::size_t i) {
  IntVec v(dim, 0);
  v.at(i) = 1;
  return v;
}

Lattice::Lattice(std::size_t ambient_dim) : dim_(ambient_dim) {
  if (ambient_dim == 0) fail(ErrorCode::Precondition, "ambient dimension must be positive");
}

Lattice Lattice::full(std::size_t ambient_dim) {
  IntMat id;
  for (std::size_t i = 0; i < ambient_dim; ++i) id.push_back(unit_vector(ambient_dim, i));
  return canonicalize(id, ambient_dim);
}

namespace {

void axpy(IntVec& dst, const Int& q, const IntVec& src) {
  if (q == 0) return;
  for (std::size_t c = 0; c < dst.size(); ++c)
    if (src[c] != 0) dst[c] -= q * src[c];
}

void negate(IntVec& v) {
  for (auto& x : v) x = -x;
}

// Row echelon with reduced entries above pivots. Row operations are mirrored on
// `track` when given. Returns the number of nonzero rows (they come first).
std::size_t hermite(IntMat& A, std::size_t cols, IntMat* track) {
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols && row < A.size(); ++col) {
    while (true) {
      std::size_t best = A.size();
      for (std::size_t i = row; i < A.size(); ++i) {
        if (A[i][col] == 0) continue;
        if (best == A.size() || abs(A[i][col]) < abs(A[best][col])) best = i;
      }
      if (best == A.size()) break;
      if (best != row) {
        std::swap(A[best], A[row]);
        if (track) std::swap((*track)[best], (*track)[row]);
      }
      bool clean = true;
      for (std::size_t i = row + 1; i < A.size(); ++i) {
        if (A[i][col] == 0) continue;
        Int q;
        mpz_fdiv_q(q.get_mpz_t(), A[i][col].get_mpz_t(), A[row][col].get_mpz_t());
        axpy(A[i], q, A[row]);
        if (track) axpy((*track)[i], q, (*track)[row]);
        if (A[i][col] != 0) clean = false;
      }
      if (clean) break;
    }
    if (A[row][col] == 0) continue;
    if (A[row][col] < 0) {
      negate(A[row]);
      if (track) negate((*track)[row]);
    }
    for (std::size_t i = 0; i < row; ++i) {
      Int q;
      mpz_fdiv_q(q.get_mpz_t(), A[i][col].get_mpz_t(), A[row][col].get_mpz_t());
      axpy(A[i], q, A[row]);
      if (track) axpy((*track)[i], q, (*track)[row]);
    }
    ++row;
  }
  return row;
}

std::size_t pivot_of(const IntVec& row) {
  for (std::size_t c = 0; c < row.size(); ++c)
    if (row[c] != 0) return c;
  return row.size();
}

IntMat identity(std::size_t n) {
  IntMat id(n, IntVec(n, 0));
  for (std::size_t i = 0; i < n; ++i) id[i][i] = 1;
  return id;
}

void check_dim(const Lattice& L, const IntVec& v) {
  if (v.size() != L.ambient_dim())
    fail(ErrorCode::DimensionMismatch, "vector length " + std::to_string(v.size()) +
                                           " does not match ambient dimension " +
                                           std::to_string(L.ambient_dim()));
}

}  // namespace

Lattice canonicalize(const IntMat& vectors, std::size_t ambient_dim) {
  Lattice out(ambient_dim);
  IntMat A;
  for (const auto& v : vectors) {
    if (v.size() != ambient_dim)
      fail(ErrorCode::DimensionMismatch, "vector length " + std::to_string(v.size()) +
                                             " does not match ambient dimension " +
                                             std::to_string(ambient_dim));
    if (std::any_of(v.begin(), v.end(), [](const Int& x) { return x != 0; })) A.push_back(v);
  }
  std::size_t r = hermite(A, ambient_dim, nullptr);
  A.resize(r);
  out.basis_ = std::move(A);
  return out;
}

std::optional<IntVec> coordinates_in_basis(const Lattice& L, const IntVec& v) {
  check_dim(L, v);
  IntVec rest = v;
  IntVec coeffs(L.rank(), 0);
  for (std::size_t i = 0; i < L.rank(); ++i) {
    const IntVec& row = L.basis()[i];
    std::size_t p = pivot_of(row);
    for (std::size_t c = 0; c < p; ++c)
      if (rest[c] != 0) return std::nullopt;
    if (!mpz_divisible_p(rest[p].get_mpz_t(), row[p].get_mpz_t())) return std::nullopt;
    coeffs[i] = rest[p] / row[p];
    axpy(rest, coeffs[i], row);
  }
  for (const auto& x : rest)
    if (x != 0) return std::nullopt;
  return coeffs;
}

bool member(const Lattice& L, const IntVec& v) { return coordinates_in_basis(L, v).has_value(); }

Lattice kernel(const IntMat& M, std::size_t rows, std::size_t cols) {
  if (M.size() != rows) fail(ErrorCode::DimensionMismatch, "matrix row count mismatch");
  for (const auto& r : M)
    if (r.size() != cols) fail(ErrorCode::DimensionMismatch, "ragged matrix");
  IntMat A = M;
  IntMat U = identity(rows);
  std::size_t r = hermite(A, cols, &U);
  IntMat ker(U.begin() + static_cast<std::ptrdiff_t>(r), U.end());
  return canonicalize(ker, rows);
}

Lattice intersect_coordinate_subspace(const Lattice& L, const std::vector<std::size_t>& support) {
  std::vector<bool> inside(L.ambient_dim(), false);
  for (auto s : support) {
    if (s >= L.ambient_dim()) fail(ErrorCode::DimensionMismatch, "support index out of range");
    inside[s] = true;
  }
  if (L.is_trivial()) return L;
  std::vector<std::size_t> off;
  for (std::size_t c = 0; c < L.ambient_dim(); ++c)
    if (!inside[c]) off.push_back(c);
  if (off.empty()) return L;
  IntMat restricted;
  for (const auto& row : L.basis()) {
    IntVec r;
    for (auto c : off) r.push_back(row[c]);
    restricted.push_back(std::move(r));
  }
  Lattice coeffs = kernel(restricted, L.rank(), off.size());
  IntMat gens;
  for (const auto& c : coeffs.basis()) {
    IntVec v(L.ambient_dim(), 0);
    for (std::size_t i = 0; i < L.rank(); ++i) axpy(v, -c[i], L.basis()[i]);
    gens.push_back(std::move(v));
  }
  return canonicalize(gens, L.ambient_dim());
}

Int coordinate_image_gcd(const Lattice& L, std::size_t j) {
  if (j >= L.ambient_dim()) fail(ErrorCode::DimensionMismatch, "coordinate out of range");
  Int g = 0;
  for (const auto& row : L.basis()) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), row[j].get_mpz_t());
  return g;
}

Lattice lattice_sum(const Lattice& a, const Lattice& b) {
  if (a.ambient_dim() != b.ambient_dim())
    fail(ErrorCode::DimensionMismatch, "lattice sum of different ambient dimensions");
  IntMat rows = a.basis();
  rows.insert(rows.end(), b.basis().begin(), b.basis().end());
  return canonicalize(rows, a.ambient_dim());
}

std::optional<Int> index_in_ambient(const Lattice& L) {
  if (L.rank() < L.ambient_dim()) return std::nullopt;
  Int idx = 1;
  for (const auto& row : L.basis()) idx *= row[pivot_of(row)];
  return idx;
}

QuotientDecomposition smith_decomposition(const Lattice& L) {
  const std::size_t r = L.rank(), n = L.ambient_dim();
  IntMat D = L.basis();
  IntMat left = identity(r), right = identity(n);
  auto col_axpy = [](IntMat& m, std::size_t dst, const Int& q, std::size_t src) {
    for (auto& row : m) row[dst] -= q * row[src];
  };
  auto col_swap = [](IntMat& m, std::size_t a, std::size_t b) {
    for (auto& row : m) std::swap(row[a], row[b]);
  };
  for (std::size_t t = 0; t < r; ++t) {
    while (true) {
      std::size_t bi = r, bj = n;
      for (std::size_t i = t; i < r; ++i)
        for (std::size_t j = t; j < n; ++j)
          if (D[i][j] != 0 && (bi == r || abs(D[i][j]) < abs(D[bi][bj]))) bi = i, bj = j;
      if (bi == r) break;
      std::swap(D[t], D[bi]);
      std::swap(left[t], left[bi]);
      col_swap(D, t, bj);
      col_swap(right, t, bj);
      bool clean = true;
      for (std::size_t i = t + 1; i < r; ++i) {
        if (D[i][t] == 0) continue;
        Int q = D[i][t] / D[t][t];
        axpy(D[i], q, D[t]);
        axpy(left[i], q, left[t]);
        if (D[i][t] != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < n; ++j) {
        if (D[t][j] == 0) continue;
        Int q = D[t][j] / D[t][t];
        col_axpy(D, j, q, t);
        col_axpy(right, j, q, t);
        if (D[t][j] != 0) clean = false;
      }
      if (!clean) continue;
      std::size_t bad = r;
      for (std::size_t i = t + 1; i < r && bad == r; ++i)
        for (std::size_t j = t + 1; j < n; ++j)
          if (!mpz_divisible_p(D[i][j].get_mpz_t(), D[t][t].get_mpz_t())) {
            bad = i;
            break;
          }
      if (bad == r) break;
      for (std::size_t c = 0; c < n; ++c) D[t][c] += D[bad][c];
      for (std::size_t c = 0; c < r; ++c) left[t][c] += left[bad][c];
    }
    if (D[t][t] < 0) {
      negate(D[t]);
      negate(left[t]);
    }
  }
  QuotientDecomposition q;
  for (std::size_t t = 0; t < r; ++t) q.invariant_factors.push_back(D[t][t]);
  q.free_rank = n - r;
  q.left = std::move(left);
  q.right = std::move(right);
  return q;
}

Lattice finite_index_extension(const Lattice& G, const IntMat& excluded) {
  for (const auto& x : excluded) {
    check_dim(G, x);
    if (member(G, x))
      fail(ErrorCode::Precondition, "excluded vector lies in the lattice; no extension exists");
  }
  const std::size_t dim = G.ambient_dim();
  constexpr long kMaxModulus = 1000000;
  for (long N = 2; N <= kMaxModulus; ++N) {
    IntMat gens = G.basis();
    for (std::size_t i = 0; i < dim; ++i) {
      IntVec e(dim, 0);
      e[i] = N;
      gens.push_back(std::move(e));
    }
    Lattice H = canonicalize(gens, dim);
    if (std::none_of(excluded.begin(), excluded.end(), [&](const IntVec& x) { return member(H, x); }))
      return H;
  }
  fail(ErrorCode::SearchExhausted, "no modulus up to 10^6 separates the excluded vectors");
}

TorusSubgroup annihilator(const Lattice& G, std::size_t rep_cap) {
  const std::size_t n = G.ambient_dim();
  QuotientDecomposition q = smith_decomposition(G);
  Int count = 1;
  for (const auto& d : q.invariant_factors) count *= d;
  if (count > rep_cap)
    fail(ErrorCode::CapExceeded, "annihilator has " + count.get_str() + " finite representatives");

  TorusSubgroup out;
  out.ambient_dim = n;
  IntMat gt(n, IntVec(G.rank(), 0));
  for (std::size_t i = 0; i < G.rank(); ++i)
    for (std::size_t c = 0; c < n; ++c) gt[c][i] = G.basis()[i][c];
  out.torus_directions = G.rank() == 0 ? Lattice::full(n) : kernel(gt, n, G.rank());

  const auto& d = q.invariant_factors;
  std::vector<unsigned long> digit(d.size(), 0);
  const unsigned long total = count.get_ui();
  out.finite_reps.reserve(total);
  for (unsigned long idx = 0; idx < total; ++idx) {
    RatVec y(n, 0);
    for (std::size_t t = 0; t < d.size(); ++t) {
      if (digit[t] == 0) continue;
      Rat z = ratio(Int(digit[t]), d[t]);
      for (std::size_t c = 0; c < n; ++c)
        if (q.right[c][t] != 0) y[c] += z * q.right[c][t];
    }
    for (auto& yc : y) yc = frac(yc);
    out.finite_reps.push_back(std::move(y));
    for (std::size_t t = 0; t < d.size(); ++t) {
      if (++digit[t] < d[t].get_ui()) break;
      digit[t] = 0;
    }
  }
  return out;
}

int character_integral(const Lattice& G, const IntVec& a) { return member(G, a) ? 1 : 0; }

IntMat mat_mul(const IntMat& a, const IntMat& b) {
  if (a.empty()) return {};
  std::size_t inner = b.size();
  std::size_t cols = b.empty() ? 0 : b[0].size();
  IntMat out(a.size(), IntVec(cols, 0));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != inner) fail(ErrorCode::DimensionMismatch, "matrix product shape mismatch");
    for (std::size_t k = 0; k < inner; ++k) {
      if (a[i][k] == 0) continue;
      for (std::size_t j = 0; j < cols; ++j) out[i][j] += a[i][k] * b[k][j];
    }
  }
  return out;
}

Int dot(const IntVec& a, const IntVec& b) {
  if (a.size() != b.size()) fail(ErrorCode::DimensionMismatch, "dot product length mismatch");
  Int s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Rat frac(const Rat& x) {
  Int fl;
  mpz_fdiv_q(fl.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return x - Rat(fl);
}

Rat ratio(const Int& num, const Int& den) {
  Rat r(num, den);
  r.canonicalize();
  return r;
}

}  // namespace rigidlab
