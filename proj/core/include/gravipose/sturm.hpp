#pragma once

#include <vector>

#include "gravipose/poly.hpp"

namespace gravipose {

inline constexpr double kSturmRefineEps = 1e-12;

/// Sturm chain p0 = p, p1 = p', p_{k+1} = -rem(p_{k-1}, p_k), each member
/// rescaled to unit max-coefficient. The chain stops early once a remainder
/// drops below 1e-13 of the current scale; the last member then plays the
/// role of gcd(p, p') and multiple roots are counted once.
class SturmSequence {
 public:
  explicit SturmSequence(const Poly& p);

  /// Number of sign changes of the chain at x (zeros skipped).
  int sign_changes(double x) const;

  /// Distinct real roots in the half-open interval (a, b].
  int count_roots(double a, double b) const { return sign_changes(a) - sign_changes(b); }

  const std::vector<Poly>& chain() const { return chain_; }

 private:
  std::vector<Poly> chain_;
};

/// Cauchy bound 1 + max_k |c_k / c_n|; every real root lies in [-bound, bound].
double cauchy_root_bound(const Poly& p);

/// Fujiwara bound 2 max_k |c_{n-k} / c_n|^{1/k} (the last term halved);
/// usually much tighter than the Cauchy bound.
double fujiwara_root_bound(const Poly& p);

/// All distinct real roots of p, ascending, isolated with a Sturm sequence and
/// refined to width refine_eps (bracketed Newton with bisection fallback, or
/// bisection on root counts at even-multiplicity roots), then polished with
/// one Newton step that is kept only if it lowers |p|. Requires deg p >= 1.
std::vector<double> sturm_real_roots(const Poly& p, double refine_eps = kSturmRefineEps);

/// Distinct real roots of p in (lo, hi], same refinement as above.
std::vector<double> sturm_real_roots_in(const Poly& p, double lo, double hi,
                                        double refine_eps = kSturmRefineEps);

inline constexpr double kTangencyTol = 1e-8;

/// Real roots x of p' with |p(x)| <= rel_tol * sum_k |c_k| |x|^k: places where
/// p touches zero without a reliable sign change (near-multiple roots).
std::vector<double> sturm_tangent_points(const Poly& p, double rel_tol = kTangencyTol);

/// Tangent points restricted to (lo, hi].
std::vector<double> sturm_tangent_points_in(const Poly& p, double lo, double hi,
                                            double rel_tol = kTangencyTol);

}  // namespace gravipose
