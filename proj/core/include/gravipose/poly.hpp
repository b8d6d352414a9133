#pragma once

#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace gravipose {

/// Relative threshold used when reporting the degree of a polynomial.
inline constexpr double kPolyTrimEps = 1e-12;

/// Dense univariate polynomial with real coefficients in ascending powers,
/// coeffs()[k] multiplies y^k.
///
/// Storage is never trimmed implicitly; degree() ignores trailing
/// coefficients with |c| <= kPolyTrimEps * max|c|. The zero polynomial has
/// degree -1.
class Poly {
 public:
  Poly() = default;
  explicit Poly(std::vector<double> coeffs) : c_(std::move(coeffs)) {}
  Poly(std::initializer_list<double> coeffs) : c_(coeffs) {}

  static Poly constant(double c) { return Poly{c}; }
  static Poly monomial(int power, double c = 1.0);

  int degree() const;
  bool is_zero() const { return degree() < 0; }

  /// Coefficient k, zero when k is past the stored length.
  double operator[](int k) const {
    return k >= 0 && k < static_cast<int>(c_.size()) ? c_[k] : 0.0;
  }
  std::span<const double> coeffs() const { return c_; }
  std::size_t size() const { return c_.size(); }

  double leading() const;
  double max_abs() const;

  double eval(double y) const;
  /// Value, first and second derivative at y in one Horner pass.
  void eval3(double y, double& value, double& d1, double& d2) const;

  /// Copy with coefficients past degree() dropped.
  Poly trimmed() const;
  void trim();

  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(double s);

  std::string to_string() const;

 private:
  std::vector<double> c_;
};

Poly operator+(Poly a, const Poly& b);
Poly operator-(Poly a, const Poly& b);
Poly operator-(Poly a);
Poly operator*(Poly a, double s);
Poly operator*(double s, Poly a);
Poly operator*(const Poly& a, const Poly& b);

Poly poly_mul(const Poly& a, const Poly& b);
Poly poly_derivative(const Poly& a);

/// a(y + s), computed by repeated synthetic division.
Poly poly_shift(const Poly& a, double s);

/// Maps p(y) to p(s * y).
Poly poly_scale_argument(const Poly& a, double s);

struct PolyDivision {
  Poly quotient;
  Poly remainder;
};

/// Euclidean long division: a = q * d + r with deg r < deg d.
/// Throws std::invalid_argument when d is zero.
PolyDivision poly_divmod(const Poly& a, const Poly& d);

inline constexpr double kExactDivideEps = 1e-8;

struct ExactQuotient {
  Poly quotient;
  /// max|r| / max|a|, kept for diagnostics.
  double remainder_ratio = 0.0;
};

/// Division that is exact by construction. Throws NotDivisible when
/// max|remainder| > div_eps * max(max|a|, ref_scale). Pass the magnitude of
/// the terms that formed `a` as ref_scale when `a` may cancel to rounding
/// noise (a rank-deficient minor, say).
ExactQuotient poly_exact_divide(const Poly& a, const Poly& d,
                                double div_eps = kExactDivideEps, double ref_scale = 0.0);

/// delta = 1 + y^2.
inline Poly delta_poly() { return Poly{1.0, 0.0, 1.0}; }
/// 1 + y^2 written in v, where y = shift + scale * v.
inline Poly delta_poly(double shift, double scale = 1.0) {
  return Poly{1.0 + shift * shift, 2.0 * shift * scale, scale * scale};
}

}  // namespace gravipose
