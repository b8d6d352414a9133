#include "gravipose/poly.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "gravipose/error.hpp"

namespace gravipose {

Poly Poly::monomial(int power, double c) {
  std::vector<double> v(static_cast<std::size_t>(power) + 1, 0.0);
  v.back() = c;
  return Poly(std::move(v));
}

double Poly::max_abs() const {
  double m = 0.0;
  for (double c : c_) m = std::max(m, std::abs(c));
  return m;
}

int Poly::degree() const {
  const double cut = kPolyTrimEps * max_abs();
  for (int k = static_cast<int>(c_.size()) - 1; k >= 0; --k) {
    if (std::abs(c_[k]) > cut) return k;
  }
  return -1;
}

double Poly::leading() const {
  const int d = degree();
  return d < 0 ? 0.0 : c_[d];
}

double Poly::eval(double y) const {
  double v = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) v = v * y + *it;
  return v;
}

void Poly::eval3(double y, double& value, double& d1, double& d2) const {
  value = d1 = d2 = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
    d2 = d2 * y + 2.0 * d1;
    d1 = d1 * y + value;
    value = value * y + *it;
  }
}

Poly Poly::trimmed() const {
  Poly out = *this;
  out.trim();
  return out;
}

void Poly::trim() { c_.resize(static_cast<std::size_t>(degree() + 1)); }

Poly& Poly::operator+=(const Poly& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0.0);
  for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0.0);
  for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] -= o.c_[k];
  return *this;
}

Poly& Poly::operator*=(double s) {
  for (double& c : c_) c *= s;
  return *this;
}

std::string Poly::to_string() const {
  std::ostringstream os;
  os.precision(17);
  os << "[";
  for (std::size_t k = 0; k < c_.size(); ++k) os << (k ? ", " : "") << c_[k];
  os << "]";
  return os.str();
}

Poly operator+(Poly a, const Poly& b) { return a += b; }
Poly operator-(Poly a, const Poly& b) { return a -= b; }
Poly operator-(Poly a) { return a *= -1.0; }
Poly operator*(Poly a, double s) { return a *= s; }
Poly operator*(double s, Poly a) { return a *= s; }

Poly poly_mul(const Poly& a, const Poly& b) {
  const int da = a.degree();
  const int db = b.degree();
  if (da < 0 || db < 0) return Poly{};
  std::vector<double> out(static_cast<std::size_t>(da + db + 1), 0.0);
  const auto ca = a.coeffs();
  const auto cb = b.coeffs();
  for (int i = 0; i <= da; ++i) {
    for (int j = 0; j <= db; ++j) out[i + j] += ca[i] * cb[j];
  }
  return Poly(std::move(out));
}

Poly operator*(const Poly& a, const Poly& b) { return poly_mul(a, b); }

Poly poly_derivative(const Poly& a) {
  const int d = a.degree();
  if (d <= 0) return Poly{};
  std::vector<double> out(static_cast<std::size_t>(d));
  for (int k = 1; k <= d; ++k) out[k - 1] = k * a[k];
  return Poly(std::move(out));
}

Poly poly_shift(const Poly& a, double s) {
  std::vector<double> c(a.coeffs().begin(), a.coeffs().end());
  const int n = static_cast<int>(c.size());
  // Taylor shift (Horner scheme applied n times).
  for (int i = 0; i < n; ++i) {
    for (int k = n - 2; k >= i; --k) c[k] += s * c[k + 1];
  }
  return Poly(std::move(c));
}

Poly poly_scale_argument(const Poly& a, double s) {
  std::vector<double> c(a.coeffs().begin(), a.coeffs().end());
  double f = 1.0;
  for (double& v : c) {
    v *= f;
    f *= s;
  }
  return Poly(std::move(c));
}

PolyDivision poly_divmod(const Poly& a, const Poly& d) {
  const int dd = d.degree();
  if (dd < 0) throw std::invalid_argument("poly_divmod: division by zero polynomial");
  const int da = a.degree();
  if (da < dd) return {Poly{}, a.trimmed()};

  std::vector<double> r(a.coeffs().begin(), a.coeffs().begin() + da + 1);
  std::vector<double> q(static_cast<std::size_t>(da - dd + 1), 0.0);
  const double lead = d[dd];
  for (int k = da - dd; k >= 0; --k) {
    const double f = r[k + dd] / lead;
    q[k] = f;
    r[k + dd] = 0.0;
    for (int j = 0; j < dd; ++j) r[k + j] -= f * d[j];
  }
  r.resize(static_cast<std::size_t>(dd));
  return {Poly(std::move(q)), Poly(std::move(r))};
}

ExactQuotient poly_exact_divide(const Poly& a, const Poly& d, double div_eps, double ref_scale) {
  const double scale = std::max(a.max_abs(), ref_scale);
  if (scale == 0.0) return {Poly{}, 0.0};
  auto [q, r] = poly_divmod(a, d);
  const double ratio = r.max_abs() / scale;
  if (ratio > div_eps) {
    std::ostringstream os;
    os << "exact division left relative remainder " << ratio << " (tolerance " << div_eps << ")";
    throw NotDivisible(os.str(), ratio);
  }
  return {std::move(q), ratio};
}

}  // namespace gravipose
