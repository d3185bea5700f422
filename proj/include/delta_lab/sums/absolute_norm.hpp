#pragma once

// Absolute normalized norms on R^2: N(a,b) = N(|a|,|b|), N(1,0) = N(0,1) = 1.
// Two families: l_p for p in [1, inf], and polygonal norms whose unit ball is
// the symmetrized convex hull of finitely many quadrant vertices. Polygonal
// norms are stored as exact facet normals so their gauge is exact.

#include "delta_lab/error.hpp"
#include "delta_lab/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace delta_lab::sums {

enum class NormKind { Lp, Polygonal };

using Vertex = std::pair<Rational, Rational>;

class AbsoluteNorm {
 public:
  AbsoluteNorm() : AbsoluteNorm(lp(2.0)) {}

  static AbsoluteNorm lp(double p) {
    require(p >= 1.0 && !std::isnan(p), ErrorCode::InvalidArgument, "l_p norm needs p >= 1");
    AbsoluteNorm n(NormKind::Lp);
    n.p_ = p;
    n.validate();
    return n;
  }
  static AbsoluteNorm l1() { return lp(1.0); }
  static AbsoluteNorm l2() { return lp(2.0); }
  static AbsoluteNorm linf() { return lp(std::numeric_limits<double>::infinity()); }

  /// Unit-ball vertices in the closed positive quadrant; the ball is their
  /// symmetrized convex hull and must have N(1,0) = N(0,1) = 1.
  static AbsoluteNorm polygonal(std::vector<Vertex> vertices) {
    require(!vertices.empty(), ErrorCode::EmptyInput, "polygonal norm needs vertices");
    for (const auto& [a, b] : vertices)
      require(a >= 0 && b >= 0, ErrorCode::InvalidArgument, "polygon vertices must lie in the closed positive quadrant");
    AbsoluteNorm n(NormKind::Polygonal);
    n.build_polygon(std::move(vertices));
    n.validate();
    return n;
  }

  /// "l1", "l2", "linf", "lp:p" (or "lp" with a numeric p), "poly:[(a,b),(c,d),...]".
  static AbsoluteNorm parse(std::string_view spec) {
    std::string s;
    for (char c : spec)
      if (c != ' ') s += c;
    if (s == "l1") return l1();
    if (s == "l2") return l2();
    if (s == "linf" || s == "lp:inf") return linf();
    if (s.rfind("lp:", 0) == 0 || (s.size() > 1 && s[0] == 'l' && (std::isdigit(static_cast<unsigned char>(s[1])) != 0))) {
      try {
        std::size_t used = 0;
        const std::string num = s.substr(s[1] == 'p' ? 3 : 1);
        const double p = std::stod(num, &used);
        if (used != num.size()) throw std::invalid_argument(num);
        return lp(p);
      } catch (const std::logic_error&) {
        fail(ErrorCode::ParseError, "bad l_p exponent in '" + std::string(spec) + "'");
      }
    }
    if (s.rfind("poly:", 0) == 0) {
      std::vector<Vertex> v;
      std::string body = s.substr(5);
      std::size_t i = 0;
      while ((i = body.find('(', i)) != std::string::npos) {
        const auto comma = body.find(',', i);
        const auto close = body.find(')', i);
        require(comma != std::string::npos && close != std::string::npos && comma < close, ErrorCode::ParseError,
                "bad polygon vertex in '" + std::string(spec) + "'");
        try {
          v.emplace_back(parse_rational(body.substr(i + 1, comma - i - 1)),
                         parse_rational(body.substr(comma + 1, close - comma - 1)));
        } catch (const std::invalid_argument& e) {
          fail(ErrorCode::ParseError, e.what());
        }
        i = close + 1;
      }
      return polygonal(std::move(v));
    }
    fail(ErrorCode::ParseError, "unknown norm spec '" + std::string(spec) + "'");
  }

  NormKind kind() const { return kind_; }
  double p() const { return p_; }
  bool is_l1() const { return kind_ == NormKind::Lp && p_ == 1.0; }
  bool is_linf() const { return kind_ == NormKind::Lp && std::isinf(p_); }

  /// True when N can be evaluated exactly on rationals.
  bool exact_kind() const { return kind_ == NormKind::Polygonal || is_l1() || is_linf(); }

  double operator()(double a, double b) const {
    a = std::abs(a);
    b = std::abs(b);
    if (kind_ == NormKind::Polygonal) {
      double m = 0;
      for (const auto& n : normals_d_) m = std::max(m, n.first * a + n.second * b);
      return m;
    }
    if (p_ == 1.0) return a + b;
    if (std::isinf(p_)) return std::max(a, b);
    if (p_ == 2.0) return std::hypot(a, b);
    const double m = std::max(a, b);
    if (m == 0) return 0;
    return m * std::pow(std::pow(a / m, p_) + std::pow(b / m, p_), 1.0 / p_);
  }

  Rational exact(const Rational& a0, const Rational& b0) const {
    const Rational a = abs_of(a0), b = abs_of(b0);
    if (kind_ == NormKind::Polygonal) {
      Rational m(0);
      for (const auto& n : normals_) m = max_of(m, Rational(n.first * a + n.second * b));
      return m;
    }
    if (is_l1()) return a + b;
    if (is_linf()) return max_of(a, b);
    fail(ErrorCode::Unsupported, "l_p norm with 1 < p < inf has no exact rational evaluation");
  }

  /// A subgradient of N at (a, b) with a, b >= 0 (a supporting dual vector).
  std::pair<double, double> subgradient(double a, double b) const {
    a = std::abs(a);
    b = std::abs(b);
    if (kind_ == NormKind::Polygonal) {
      std::size_t best = 0;
      double m = -1;
      for (std::size_t i = 0; i < normals_d_.size(); ++i) {
        const double v = normals_d_[i].first * a + normals_d_[i].second * b;
        if (v > m) {
          m = v;
          best = i;
        }
      }
      return normals_d_[best];
    }
    if (p_ == 1.0) return {1.0, 1.0};
    if (std::isinf(p_)) return a >= b ? std::pair{1.0, 0.0} : std::pair{0.0, 1.0};
    const double n = (*this)(a, b);
    if (n == 0) return {std::pow(0.5, 1.0 / p_), std::pow(0.5, 1.0 / p_)};
    return {std::pow(a / n, p_ - 1), std::pow(b / n, p_ - 1)};
  }

  /// Point of the unit sphere in the quadrant at polar angle theta in [0, pi/2].
  std::pair<double, double> sphere_point(double theta) const {
    const double c = std::cos(theta), s = std::sin(theta);
    const double ca = std::max(0.0, c), sb = std::max(0.0, s);
    const double n = (*this)(ca, sb);
    return {ca / n, sb / n};
  }

  /// Polygonal norms: the quadrant part of the unit sphere as a vertex chain
  /// from the a-axis to the b-axis.
  const std::vector<Vertex>& chain() const { return chain_; }
  /// Polygonal norms: facet normals n with N(a,b) = max n . (|a|,|b|).
  const std::vector<Vertex>& facet_normals() const { return normals_; }

  std::string describe() const {
    if (kind_ == NormKind::Polygonal) {
      std::string s = "poly:[";
      for (std::size_t i = 0; i < chain_.size(); ++i) {
        if (i) s += ",";
        s += "(" + to_string(chain_[i].first) + "," + to_string(chain_[i].second) + ")";
      }
      return s + "]";
    }
    if (p_ == 1.0) return "l1";
    if (p_ == 2.0) return "l2";
    if (std::isinf(p_)) return "linf";
    std::ostringstream o;
    o.precision(17);
    o << "lp:" << p_;
    return o.str();
  }

 private:
  explicit AbsoluteNorm(NormKind k) : kind_(k) {}

  static Rational cross(const Vertex& o, const Vertex& a, const Vertex& b) {
    return (a.first - o.first) * (b.second - o.second) - (a.second - o.second) * (b.first - o.first);
  }

  void build_polygon(std::vector<Vertex> v) {
    // Down-closure in the quadrant: add the origin and the axis shadows.
    Rational amax(0), bmax(0);
    for (const auto& [a, b] : v) {
      amax = max_of(amax, a);
      bmax = max_of(bmax, b);
    }
    require(amax > 0 && bmax > 0, ErrorCode::InvalidArgument, "polygon must reach both axes");
    std::vector<Vertex> pts = v;
    pts.emplace_back(Rational(0), Rational(0));
    pts.emplace_back(amax, Rational(0));
    pts.emplace_back(Rational(0), bmax);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    // Andrew's monotone chain, counter-clockwise.
    std::vector<Vertex> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
      while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
      hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
      while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
      hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    // Walk counter-clockwise from (amax, 0) to (0, bmax).
    std::size_t start = 0;
    for (std::size_t i = 0; i < hull.size(); ++i)
      if (hull[i] == Vertex{amax, Rational(0)}) start = i;
    chain_.clear();
    for (std::size_t j = 0; j < hull.size(); ++j) {
      const Vertex& p = hull[(start + j) % hull.size()];
      chain_.push_back(p);
      if (p == Vertex{Rational(0), bmax}) break;
    }
    normals_.clear();
    for (std::size_t i = 0; i + 1 < chain_.size(); ++i) {
      const Vertex& p = chain_[i];
      const Vertex& q = chain_[i + 1];
      // Line through p, q: n . x = 1 with n = (q.b - p.b, p.a - q.a) / c.
      Rational na = q.second - p.second;
      Rational nb = p.first - q.first;
      Rational c = na * p.first + nb * p.second;
      if (c <= 0) continue;
      normals_.emplace_back(Rational(na / c), Rational(nb / c));
    }
    normals_d_.clear();
    for (const auto& n : normals_) normals_d_.emplace_back(to_double(n.first), to_double(n.second));
  }

  void validate() const {
    if (kind_ == NormKind::Polygonal) {
      require(exact(1, 0) == 1 && exact(0, 1) == 1, ErrorCode::InvalidArgument,
              "polygonal norm is not normalized: N(1,0) and N(0,1) must equal 1");
      return;
    }
    // l_p norms are absolute and normalized by construction; spot-check monotonicity.
    for (int i = 0; i <= 8; ++i)
      for (int j = 0; j <= 8; ++j)
        require((*this)(i / 8.0, j / 8.0) <= (*this)(std::min(1.0, i / 8.0 + 0.125), j / 8.0) + 1e-15,
                ErrorCode::InvalidArgument, "norm is not monotone");
  }

  NormKind kind_;
  double p_ = 2.0;
  std::vector<Vertex> chain_;
  std::vector<Vertex> normals_;
  std::vector<std::pair<double, double>> normals_d_;
};

}  // namespace delta_lab::sums
