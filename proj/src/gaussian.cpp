#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rigidlab/dynamics.hpp"

namespace rigidlab {

namespace {

constexpr double kTail = 40.0;  // standard normal mass beyond is far below 1e-300

double cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }
double pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2 * std::numbers::pi); }

double clamp_tail(double x) { return std::clamp(x, -kTail, kTail); }

// P(X <= a, Y <= b) for correlation rho with |rho| < 1.
double quadrant(double rho, double a, double b) {
  a = clamp_tail(a);
  b = clamp_tail(b);
  if (a <= -kTail || b <= -kTail) return 0.0;
  if (b >= kTail) return cdf(a);
  if (a >= kTail) return cdf(b);
  const double s = std::sqrt((1 - rho) * (1 + rho));
  auto f = [&](double x) { return pdf(x) * cdf((b - rho * x) / s); };
  using Q = boost::math::quadrature::gauss_kronrod<double, 31>;
  // The integrand steps near x = b / rho; split there when it lies inside.
  std::vector<double> cuts{-kTail};
  if (rho != 0) {
    double step = b / rho;
    if (step > -kTail && step < a) cuts.push_back(step);
  }
  cuts.push_back(a);
  double total = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) total += Q::integrate(f, cuts[i], cuts[i + 1], 20, 1e-13);
  return total;
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

double normal_mass(const RealInterval& I) {
  if (!(I.lo <= I.hi)) fail(ErrorCode::Precondition, "interval endpoints out of order");
  return clamp01(cdf(I.hi) - cdf(I.lo));
}

double gaussian_pair_mass(double rho, const RealInterval& I, const RealInterval& J) {
  if (!(std::abs(rho) <= 1)) fail(ErrorCode::Precondition, "correlation must lie in [-1, 1]");
  if (!(I.lo <= I.hi) || !(J.lo <= J.hi)) fail(ErrorCode::Precondition, "interval endpoints out of order");
  if (rho == 1) {
    double lo = std::max(I.lo, J.lo), hi = std::min(I.hi, J.hi);
    return lo < hi ? normal_mass({lo, hi}) : 0.0;
  }
  if (rho == -1) {
    // Y = -X: X in I and -X in J.
    double lo = std::max(I.lo, -J.hi), hi = std::min(I.hi, -J.lo);
    return lo < hi ? normal_mass({lo, hi}) : 0.0;
  }
  double m = quadrant(rho, I.hi, J.hi) - quadrant(rho, I.lo, J.hi) - quadrant(rho, I.hi, J.lo) +
             quadrant(rho, I.lo, J.lo);
  return clamp01(m);
}

TransferReport verify_gaussian_transfer(const AtomicMeasure& m, const Schedule& s, const SequenceFamily& fam,
                                        const Lattice& G, const RealInterval& I, double tol,
                                        std::vector<IntVec> directions, std::size_t levels) {
  const std::size_t l = fam.size();
  if (G.ambient_dim() != l) fail(ErrorCode::DimensionMismatch, "group dimension differs from family");
  if (directions.empty())
    for (std::size_t j = 0; j < l; ++j) directions.push_back(unit_vector(l, j));
  const double p = normal_mass(I);
  TransferReport rep;
  const std::size_t K = s.depth();
  const std::size_t first = K > levels ? K - levels + 1 : 1;
  for (std::size_t k = first; k <= K; ++k) {
    IntVec vals = evaluate(fam, s.n[k - 1]);
    for (const auto& a : directions) {
      if (a.size() != l) fail(ErrorCode::DimensionMismatch, "direction length differs from family");
      Int t = dot(a, vals);
      double rho = std::clamp(fourier_coefficient(m, t).real(), -1.0, 1.0);
      bool rigid = character_integral(G, a) == 1;
      double mass = gaussian_pair_mass(rho, I, I);
      double target = rigid ? p : p * p;
      double dev = std::abs(mass - target);
      rep.rows.push_back(TransferRow{k, a, rigid, rho, mass, target, dev});
      if (k == K) rep.max_deviation_top = std::max(rep.max_deviation_top, dev);
    }
  }
  rep.pass = rep.max_deviation_top <= tol;
  return rep;
}

}  // namespace rigidlab
