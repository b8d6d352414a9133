#include "gravipose/sturm.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <span>
#include <stdexcept>

namespace gravipose {

namespace {

constexpr double kChainStopEps = 1e-13;

Poly normalized(Poly p) {
  p.trim();
  const double m = p.max_abs();
  if (m > 0.0) p *= 1.0 / m;
  return p;
}

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

SturmSequence::SturmSequence(const Poly& p) {
  chain_.push_back(normalized(p));
  if (chain_.front().degree() < 1) return;
  chain_.push_back(normalized(poly_derivative(chain_.front())));
  // Members are trimmed, so size() - 1 is the degree and the leading
  // coefficient is nonzero.
  std::vector<double> r;
  while (chain_.back().size() > 1) {
    const std::span<const double> a = chain_[chain_.size() - 2].coeffs();
    const std::span<const double> d = chain_.back().coeffs();
    const std::size_t dd = d.size() - 1;
    r.assign(a.begin(), a.end());
    for (std::size_t k = a.size() - 1 - dd + 1; k-- > 0;) {
      const double f = r[k + dd] / d[dd];
      for (std::size_t j = 0; j < dd; ++j) r[k + j] -= f * d[j];
    }
    r.resize(dd);
    double m = 0.0;
    for (double& v : r) {
      v = -v;
      m = std::max(m, std::abs(v));
    }
    // Previous members have unit max-coefficient.
    if (m <= kChainStopEps) break;
    chain_.push_back(normalized(Poly(r)));
  }
}

int SturmSequence::sign_changes(double x) const {
  int changes = 0;
  int last = 0;
  for (const Poly& q : chain_) {
    const int s = sign_of(q.eval(x));
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

double cauchy_root_bound(const Poly& p) {
  const int n = p.degree();
  if (n < 1) return 0.0;
  const double lead = std::abs(p[n]);
  double m = 0.0;
  for (int k = 0; k < n; ++k) m = std::max(m, std::abs(p[k]) / lead);
  return 1.0 + m;
}

double fujiwara_root_bound(const Poly& p) {
  const int n = p.degree();
  if (n < 1) return 0.0;
  const double lead = std::abs(p[n]);
  double m = 0.0;
  for (int k = 1; k <= n; ++k) {
    double r = std::abs(p[n - k]) / lead;
    if (k == n) r *= 0.5;
    m = std::max(m, std::pow(r, 1.0 / k));
  }
  return 2.0 * m;
}

namespace {

struct RootFinder {
  const Poly& p;
  const SturmSequence& seq;
  double eps;
  std::vector<double>& roots;

  double width_limit(double x) const { return std::max(eps, 4.0 * DBL_EPSILON * std::abs(x)); }

  double refine(double a, double b) const {
    double fa = p.eval(a);
    const double fb = p.eval(b);
    if (fb == 0.0) return b;
    if (sign_of(fa) * sign_of(fb) < 0) {
      // Newton inside the bracket, bisection whenever the step leaves it or
      // the previous step is not shrinking fast enough.
      double x = 0.5 * (a + b);
      double dx_old = b - a;
      for (int it = 0; it < 200; ++it) {
        double fx, dfx, d2;
        p.eval3(x, fx, dfx, d2);
        if (fx == 0.0) return x;
        if (sign_of(fx) == sign_of(fa)) {
          a = x;
        } else {
          b = x;
        }
        double xn = dfx != 0.0 ? x - fx / dfx : a - 1.0;
        if (!(xn > a && xn < b) || std::abs(2.0 * fx) > std::abs(dx_old * dfx)) xn = 0.5 * (a + b);
        dx_old = xn - x;
        x = xn;
        if (std::abs(dx_old) <= width_limit(x) || b - a <= width_limit(x)) break;
      }
      return x;
    } else {
      // No sign change: even multiplicity or tangency; bisect on root counts.
      int na = seq.sign_changes(a);
      while (b - a > width_limit(0.5 * (a + b))) {
        const double mid = 0.5 * (a + b);
        const int nm = seq.sign_changes(mid);
        if (na - nm > 0) {
          b = mid;
        } else {
          a = mid;
          na = nm;
        }
      }
    }
    return 0.5 * (a + b);
  }

  // Returns false when the chain contradicts itself (a negative count, a
  // midpoint count outside its bracket, a sign change with no root counted).
  // Rounding does that when roots cluster far from the expansion point.
  bool isolate(double a, double b, int va, int vb, int depth) {
    const int count = va - vb;
    if (count < 0) return false;
    if (count == 0) return sign_of(p.eval(a)) * sign_of(p.eval(b)) >= 0;
    if (count == 1) {
      roots.push_back(refine(a, b));
      return true;
    }
    if (b - a <= width_limit(0.5 * (a + b)) || depth > 200) {
      roots.push_back(0.5 * (a + b));
      return true;
    }
    const double mid = 0.5 * (a + b);
    const int vm = seq.sign_changes(mid);
    if (vm > va || vm < vb) return false;
    return isolate(a, mid, va, vm, depth + 1) && isolate(mid, b, vm, vb, depth + 1);
  }
};

constexpr int kMaxLocalDepth = 12;

void polish(const Poly& q, std::vector<double>& roots) {
  const Poly dq = poly_derivative(q);
  for (double& x : roots) {
    const double fx = q.eval(x);
    const double dfx = dq.eval(x);
    if (fx == 0.0 || dfx == 0.0) continue;
    const double x1 = x - fx / dfx;
    if (std::isfinite(x1) && std::abs(q.eval(x1)) < std::abs(fx)) x = x1;
  }
}

// Last resort on a tiny interval: sign changes on a uniform grid.
void scan_sign_changes(const Poly& q, double a, double b, double eps, std::vector<double>& out) {
  constexpr int kCells = 64;
  double x0 = a, f0 = q.eval(a);
  for (int i = 1; i <= kCells; ++i) {
    const double x1 = a + (b - a) * i / kCells;
    const double f1 = q.eval(x1);
    if (f1 == 0.0) {
      out.push_back(x1);
    } else if (sign_of(f0) * sign_of(f1) < 0) {
      double lo = x0, hi = x1, flo = f0;
      while (hi - lo > std::max(eps, 4.0 * DBL_EPSILON * std::abs(lo))) {
        const double m = 0.5 * (lo + hi), fm = q.eval(m);
        if (sign_of(fm) == sign_of(flo)) {
          lo = m;
          flo = fm;
        } else {
          hi = m;
        }
      }
      out.push_back(0.5 * (lo + hi));
    }
    x0 = x1;
    f0 = f1;
  }
}

// Roots of q in (a, b] from a chain built on q(m + h v), v in [-1, 1], which
// is well scaled for roots near the interval. Halves the interval while the
// chain stays inconsistent.
void local_roots(const Poly& q, double a, double b, double eps, int depth, std::vector<double>& out) {
  const double m = 0.5 * (a + b), h = 0.5 * (b - a);
  const Poly r = poly_scale_argument(poly_shift(q, m), h).trimmed();
  if (r.degree() < 1) return;
  const SturmSequence seq(r);
  std::vector<double> v;
  RootFinder finder{r, seq, eps / h, v};
  if (finder.isolate(-1.0, 1.0, seq.sign_changes(-1.0), seq.sign_changes(1.0), 0)) {
    for (double x : v) out.push_back(m + h * x);
  } else if (depth < kMaxLocalDepth) {
    local_roots(q, a, m, eps, depth + 1, out);
    local_roots(q, m, b, eps, depth + 1, out);
  } else {
    scan_sign_changes(q, a, b, eps, out);
  }
}

}  // namespace

std::vector<double> sturm_real_roots_in(const Poly& p, double lo, double hi, double refine_eps) {
  if (p.degree() < 1) throw std::invalid_argument("sturm_real_roots: degree must be at least 1");
  if (!(lo < hi)) throw std::invalid_argument("sturm_real_roots_in: need lo < hi");
  const Poly q = p.trimmed();
  const SturmSequence seq(q);

  std::vector<double> roots;
  RootFinder finder{q, seq, refine_eps, roots};
  if (!finder.isolate(lo, hi, seq.sign_changes(lo), seq.sign_changes(hi), 0)) {
    roots.clear();
    local_roots(q, lo, hi, refine_eps, 0, roots);
  }
  polish(q, roots);
  std::sort(roots.begin(), roots.end());
  return roots;
}

std::vector<double> sturm_real_roots(const Poly& p, double refine_eps) {
  if (p.degree() < 1) throw std::invalid_argument("sturm_real_roots: degree must be at least 1");
  const Poly q = p.trimmed();
  // Both are valid bounds; a small outward margin keeps roots off the ends.
  const double bound = 1.0 + 1.01 * std::min(cauchy_root_bound(q), fujiwara_root_bound(q));
  return sturm_real_roots_in(q, -bound, bound, refine_eps);
}

namespace {

std::vector<double> keep_tangent(const Poly& p, const std::vector<double>& stationary, double rel_tol) {
  std::vector<double> out;
  for (double x : stationary) {
    double scale = 0.0, xp = 1.0;
    for (std::size_t k = 0; k < p.size(); ++k, xp *= std::abs(x)) scale += std::abs(p[k]) * xp;
    if (std::abs(p.eval(x)) <= rel_tol * scale) out.push_back(x);
  }
  return out;
}

}  // namespace

std::vector<double> sturm_tangent_points(const Poly& p, double rel_tol) {
  const Poly dp = poly_derivative(p);
  if (dp.trimmed().degree() < 1) return {};
  return keep_tangent(p, sturm_real_roots(dp), rel_tol);
}

std::vector<double> sturm_tangent_points_in(const Poly& p, double lo, double hi, double rel_tol) {
  const Poly dp = poly_derivative(p);
  if (dp.trimmed().degree() < 1) return {};
  return keep_tangent(p, sturm_real_roots_in(dp, lo, hi), rel_tol);
}

}  // namespace gravipose
