#pragma once

#include "delta_lab/error.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace delta_lab::muntz {

/// Ladder positions can get astronomically large (nested spikes push the
/// exponents past 1e50), so indices are 128-bit.
using Index = boost::multiprecision::int128_t;

inline double to_double(const Index& n) { return n.convert_to<double>(); }

enum class LadderRule { Squares, Power, Explicit };

/// Exponents 0 < lambda_1 < lambda_2 < ... of a Muntz space, given either by
/// a generator rule or by a finite explicit list.
class ExponentLadder {
 public:
  ExponentLadder() = default;

  static ExponentLadder squares(bool includes_constant = false) {
    ExponentLadder l;
    l.rule_ = LadderRule::Squares;
    l.power_ = 2.0;
    l.includes_constant_ = includes_constant;
    return l;
  }

  /// lambda_n = n^p; p > 1 keeps sum 1/lambda_n finite.
  static ExponentLadder power(double p, bool includes_constant = false) {
    require(std::isfinite(p) && p > 1.0, ErrorCode::InvalidArgument, "power ladder needs exponent p > 1");
    ExponentLadder l;
    l.rule_ = LadderRule::Power;
    l.power_ = p;
    l.includes_constant_ = includes_constant;
    return l;
  }

  static ExponentLadder explicit_list(std::vector<double> lambdas, bool includes_constant = false) {
    require(!lambdas.empty(), ErrorCode::EmptyInput, "explicit ladder is empty");
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
      require(std::isfinite(lambdas[i]) && lambdas[i] > 0, ErrorCode::InvalidArgument, "ladder exponents must be positive");
      if (i > 0)
        require(lambdas[i] > lambdas[i - 1], ErrorCode::InvalidArgument, "ladder exponents must increase strictly");
    }
    ExponentLadder l;
    l.rule_ = LadderRule::Explicit;
    l.explicit_ = std::move(lambdas);
    l.includes_constant_ = includes_constant;
    return l;
  }

  /// "squares" | "n^2" | "power:p" | "n^p" | "explicit:1,4,9"; a "+const" suffix adds lambda_0 = 0.
  static ExponentLadder parse(std::string_view spec) {
    std::string s(spec);
    bool with_const = false;
    if (auto pos = s.find("+const"); pos != std::string::npos) {
      with_const = true;
      s.erase(pos);
    }
    if (s == "squares" || s == "n^2" || s == "n2") return squares(with_const);
    try {
      if (s.rfind("power:", 0) == 0) return power(std::stod(s.substr(6)), with_const);
      if (s.rfind("n^", 0) == 0) return power(std::stod(s.substr(2)), with_const);
      if (s.rfind("explicit:", 0) == 0) {
        std::vector<double> v;
        std::stringstream in(s.substr(9));
        std::string item;
        while (std::getline(in, item, ',')) v.push_back(std::stod(item));
        return explicit_list(std::move(v), with_const);
      }
    } catch (const std::logic_error&) {
      fail(ErrorCode::ParseError, "bad ladder spec '" + std::string(spec) + "'");
    }
    fail(ErrorCode::ParseError, "unknown ladder spec '" + std::string(spec) + "'");
  }

  LadderRule rule() const { return rule_; }
  double power_exponent() const { return power_; }
  bool includes_constant() const { return includes_constant_; }
  const std::vector<double>& explicit_values() const { return explicit_; }

  /// Built-in generators are summable by construction; explicit lists are finite.
  bool summable() const { return rule_ == LadderRule::Explicit || power_ > 1.0; }

  /// Number of materialized positive exponents, if finite.
  std::optional<Index> size() const {
    if (rule_ == LadderRule::Explicit) return Index(explicit_.size());
    return std::nullopt;
  }

  bool valid_index(const Index& n) const {
    if (n == 0) return includes_constant_;
    if (n < 0) return false;
    if (auto sz = size()) return n <= *sz;
    return n <= max_generated_index();
  }

  /// lambda_n as a double; lambda_0 = 0.
  double lambda(const Index& n) const {
    require(valid_index(n), ErrorCode::InvalidArgument, "index " + n.str() + " is not on the ladder");
    if (n == 0) return 0.0;
    switch (rule_) {
      case LadderRule::Squares: {
        const double x = to_double(n);
        return x * x;
      }
      case LadderRule::Power: return std::pow(to_double(n), power_);
      case LadderRule::Explicit: return explicit_[static_cast<std::size_t>(n) - 1];
    }
    return 0.0;
  }

  /// Smallest index n >= from with lambda_n > threshold.
  Index first_index_above(double threshold, Index from = 1) const {
    require(from >= 1, ErrorCode::InvalidArgument, "ladder indices start at 1");
    if (lambda_or_inf(from) > threshold) return from;
    Index lo = from;  // lambda(lo) <= threshold
    Index step = 1;
    Index hi = from + step;
    while (!(lambda_or_inf(hi) > threshold)) {
      if (!valid_index(hi))
        fail(ErrorCode::LadderTooShort, "ladder exhausted below exponent " + std::to_string(threshold));
      lo = hi;
      step *= 2;
      hi = lo + step;
    }
    while (hi - lo > 1) {
      Index mid = lo + (hi - lo) / 2;
      if (lambda_or_inf(mid) > threshold) hi = mid;
      else lo = mid;
    }
    if (!valid_index(hi))
      fail(ErrorCode::LadderTooShort, "ladder exhausted below exponent " + std::to_string(threshold));
    return hi;
  }

  /// Position of an exponent value on the ladder, if present (relative tolerance 1e-12).
  std::optional<Index> index_of_exponent(double lambda_value) const {
    if (lambda_value == 0.0) return includes_constant_ ? std::optional<Index>(0) : std::nullopt;
    if (!(lambda_value > 0)) return std::nullopt;
    Index n = first_index_above(lambda_value * (1 - 1e-12));
    if (std::abs(lambda(n) - lambda_value) <= 1e-12 * lambda_value) return n;
    return std::nullopt;
  }

  std::string describe() const {
    std::string s;
    switch (rule_) {
      case LadderRule::Squares: s = "squares"; break;
      case LadderRule::Power: {
        std::ostringstream o;
        o.precision(17);
        o << "power:" << power_;
        s = o.str();
        break;
      }
      case LadderRule::Explicit: {
        std::ostringstream o;
        o.precision(17);
        o << "explicit:";
        for (std::size_t i = 0; i < explicit_.size(); ++i) o << (i ? "," : "") << explicit_[i];
        s = o.str();
        break;
      }
    }
    return includes_constant_ ? s + "+const" : s;
  }

  friend bool operator==(const ExponentLadder& a, const ExponentLadder& b) { return a.describe() == b.describe(); }

 private:
  Index max_generated_index() const {
    // Keep lambda_n finite in double and n well inside int128.
    if (rule_ == LadderRule::Squares) return Index(1) << 120;
    const double cap = std::min(std::pow(1e300, 1.0 / power_), 1e36);
    return Index(static_cast<long double>(cap));
  }

  double lambda_or_inf(const Index& n) const { return valid_index(n) ? lambda(n) : INFINITY; }

  LadderRule rule_ = LadderRule::Squares;
  double power_ = 2.0;
  std::vector<double> explicit_;
  bool includes_constant_ = false;
};

}  // namespace delta_lab::muntz
