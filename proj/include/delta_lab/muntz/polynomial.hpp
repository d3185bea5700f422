#pragma once

#include "delta_lab/error.hpp"
#include "delta_lab/muntz/exp_sum.hpp"
#include "delta_lab/muntz/ladder.hpp"
#include "delta_lab/numeric.hpp"

#include <cctype>
#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace delta_lab::muntz {

/// p(t) = sum a_k t^{lambda_k} over finitely many ladder positions k.
template <Scalar T>
class MuntzPolynomial {
 public:
  MuntzPolynomial() = default;

  MuntzPolynomial(ExponentLadder ladder, const std::vector<std::pair<Index, T>>& terms) : ladder_(std::move(ladder)) {
    for (const auto& [k, a] : terms) {
      require(ladder_.valid_index(k), ErrorCode::InvalidArgument, "index " + k.str() + " is not on the ladder");
      terms_[k] += a;
    }
    prune();
  }

  static MuntzPolynomial monomial(const ExponentLadder& ladder, const Index& k, T coeff = T(1)) {
    return MuntzPolynomial(ladder, {{k, std::move(coeff)}});
  }

  const ExponentLadder& ladder() const { return ladder_; }
  const std::map<Index, T>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  T coefficient(const Index& k) const {
    auto it = terms_.find(k);
    return it == terms_.end() ? T(0) : it->second;
  }

  ExpSum exp_sum() const {
    std::vector<Term> t;
    for (const auto& [k, a] : terms_) t.push_back({ladder_.lambda(k), delta_lab::to_double(a)});
    return ExpSum(std::move(t));
  }

  double operator()(double t) const { return exp_sum().at_t(t); }

  /// p(1) = sum of coefficients, exact in the scalar type.
  T value_at_one() const {
    T s(0);
    for (const auto& [k, a] : terms_) s += a;
    return s;
  }

  NormEnclosure sup_norm(double tol = 1e-10) const { return muntz::sup_norm(exp_sum(), tol); }

  /// Descartes' sign-change count of the coefficient sequence (zeros skipped).
  int descartes_bound() const {
    int changes = 0, last = 0;
    for (const auto& [k, a] : terms_) {
      const int s = sign_of(a);
      if (last != 0 && s != last) ++changes;
      last = s;
    }
    return changes;
  }

  MuntzPolynomial scaled(const T& s) const {
    MuntzPolynomial r = *this;
    for (auto& [k, a] : r.terms_) a *= s;
    r.prune();
    return r;
  }

  friend MuntzPolynomial operator+(const MuntzPolynomial& a, const MuntzPolynomial& b) { return combine(a, b, T(1)); }
  friend MuntzPolynomial operator-(const MuntzPolynomial& a, const MuntzPolynomial& b) { return combine(a, b, T(-1)); }
  friend bool operator==(const MuntzPolynomial& a, const MuntzPolynomial& b) {
    return a.ladder_ == b.ladder_ && a.terms_ == b.terms_;
  }

  /// Human-readable form using exponent values, e.g. "0.5t - 1.5t^4".
  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream o;
    o.precision(17);
    bool first = true;
    for (const auto& [k, a] : terms_) {
      const bool neg = a < 0;
      const T mag = neg ? T(-a) : a;
      o << (first ? (neg ? "-" : "") : (neg ? " - " : " + "));
      first = false;
      const double lam = ladder_.lambda(k);
      if (lam == 0 || mag != 1) {
        if constexpr (is_exact_v<T>) {
          o << delta_lab::to_string(mag);
          if (lam != 0 && boost::multiprecision::denominator(mag) != 1) o << ' ';
        } else {
          o << mag;
        }
      }
      if (lam == 1) o << "t";
      else if (lam != 0) o << "t^" << lam;
    }
    return o.str();
  }

 private:
  static MuntzPolynomial combine(const MuntzPolynomial& a, const MuntzPolynomial& b, const T& sb) {
    require(a.ladder_ == b.ladder_, ErrorCode::MixedSpaces, "polynomials on different ladders");
    MuntzPolynomial r = a;
    for (const auto& [k, c] : b.terms_) r.terms_[k] += sb * c;
    r.prune();
    return r;
  }

  void prune() {
    for (auto it = terms_.begin(); it != terms_.end();)
      it = (it->second == 0) ? terms_.erase(it) : std::next(it);
  }

  ExponentLadder ladder_;
  std::map<Index, T> terms_;
};

/// Parses expressions like "0.5t - 1.5t^4", "t - 2*t^{4} + 3/2 t^9" or "-t".
/// Exponents are exponent values and must lie on the ladder.
template <Scalar T>
MuntzPolynomial<T> parse_polynomial(std::string_view text, const ExponentLadder& ladder) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c)) && c != '{' && c != '}') s += c;
  require(!s.empty(), ErrorCode::ParseError, "empty polynomial");
  std::vector<std::pair<Index, T>> terms;
  std::size_t i = 0;
  auto bad = [&](const std::string& why) { fail(ErrorCode::ParseError, why + " in '" + std::string(text) + "'"); };
  while (i < s.size()) {
    int sign = 1;
    while (i < s.size() && (s[i] == '+' || s[i] == '-')) {
      if (s[i] == '-') sign = -sign;
      ++i;
    }
    std::size_t start = i;
    while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.' || s[i] == '/' ||
                            ((s[i] == 'e' || s[i] == 'E') && i > start && i + 1 < s.size() &&
                             (std::isdigit(static_cast<unsigned char>(s[i + 1])) || s[i + 1] == '-'))))
      i += (s[i] == 'e' || s[i] == 'E') && s[i + 1] == '-' ? 2 : 1;
    Rational coeff(1);
    if (i > start) {
      try {
        coeff = parse_rational(s.substr(start, i - start));
      } catch (const std::exception&) {
        bad("bad coefficient");
      }
    }
    if (i < s.size() && s[i] == '*') ++i;
    double lambda = 0;
    if (i < s.size() && (s[i] == 't' || s[i] == 'x')) {
      ++i;
      lambda = 1;
      if (i < s.size() && (s[i] == '^' || (s[i] == '*' && i + 1 < s.size() && s[i + 1] == '*'))) {
        i += s[i] == '^' ? 1 : 2;
        std::size_t e0 = i;
        while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.' || s[i] == 'e' ||
                                s[i] == 'E'))
          ++i;
        if (e0 == i) bad("missing exponent");
        lambda = std::stod(s.substr(e0, i - e0));
      }
    } else if (i == start) {
      bad("expected a term");
    }
    auto k = ladder.index_of_exponent(lambda);
    if (!k) bad("exponent " + std::to_string(lambda) + " is not on the ladder");
    if constexpr (is_exact_v<T>) terms.emplace_back(*k, sign < 0 ? Rational(-coeff) : coeff);
    else terms.emplace_back(*k, sign * coeff.convert_to<double>());
    if (i < s.size() && s[i] != '+' && s[i] != '-') bad("unexpected character");
  }
  return MuntzPolynomial<T>(ladder, terms);
}

}  // namespace delta_lab::muntz
