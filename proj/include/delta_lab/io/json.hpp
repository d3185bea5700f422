#pragma once

// JSON forms of points and certificates. Exact values are written as "p/q"
// strings, floating values as numbers with round-trip precision.
//
//   L1     {"cells":[{"id","mass","kind"}], "values":[...]}
//          or {"uniform":{"n","kind","total"}, "values":[...]}
//   c      {"variant":"c"|"c0"|"linf_n", "prefix":[...], "limit":x}
//   Muntz  {"ladder":"squares"|{"rule":...}|{"explicit":[...]}, "terms":[[k, a], ...]}
//   sum    {"norm":"l2", "x":{...}, "y":{...}}

#include "delta_lab/core/space_point.hpp"
#include "delta_lab/sums/sums.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>
#include <string>

namespace delta_lab::io {

using json = nlohmann::ordered_json;

template <Scalar T>
json number(const T& x) {
  if constexpr (is_exact_v<T>) {
    return delta_lab::to_string(x);
  } else {
    return x;
  }
}

template <Scalar T>
T read_number(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if constexpr (is_exact_v<T>) {
      try {
        return parse_rational(s);
      } catch (const std::invalid_argument& e) {
        fail(ErrorCode::ParseError, e.what());
      }
    } else {
      try {
        return to_double(parse_rational(s));
      } catch (const std::invalid_argument&) {
        fail(ErrorCode::ParseError, "bad number '" + s + "'");
      }
    }
  }
  require(j.is_number(), ErrorCode::ParseError, "expected a number, got " + j.dump());
  if constexpr (is_exact_v<T>) {
    if (j.is_number_integer()) return Rational(j.get<long long>());
    return parse_rational(j.dump());  // decimal text is exact
  } else {
    return j.get<double>();
  }
}

/// Accepts inline JSON or "@path".
inline json load(std::string_view text) {
  std::string body(text);
  if (!body.empty() && body[0] == '@') {
    std::ifstream in(body.substr(1));
    require(static_cast<bool>(in), ErrorCode::ParseError, "cannot open " + body.substr(1));
    std::stringstream ss;
    ss << in.rdbuf();
    body = ss.str();
  }
  try {
    return json::parse(body);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::ParseError, std::string("malformed JSON: ") + e.what());
  }
}

inline const json& field(const json& j, const char* key) {
  require(j.is_object() && j.contains(key), ErrorCode::ParseError, std::string("missing field '") + key + "'");
  return j.at(key);
}

// --- L1

inline l1::CellKind read_kind(const json& j) {
  const auto s = j.get<std::string>();
  if (s == "atom" || s == "ATOM") return l1::CellKind::Atom;
  if (s == "nonatomic" || s == "NONATOMIC") return l1::CellKind::Nonatomic;
  fail(ErrorCode::ParseError, "cell kind must be atom or nonatomic");
}

template <Scalar T>
l1::MeasureModel<T> read_model(const json& j) {
  if (j.contains("uniform")) {
    const auto& u = j.at("uniform");
    const T total = u.contains("total") ? read_number<T>(u.at("total")) : T(1);
    return l1::MeasureModel<T>::uniform(field(u, "n").get<std::size_t>(), read_kind(field(u, "kind")), total);
  }
  std::vector<l1::Cell<T>> cells;
  for (const auto& c : field(j, "cells"))
    cells.push_back({field(c, "id").get<int>(), read_number<T>(field(c, "mass")), read_kind(field(c, "kind"))});
  return l1::MeasureModel<T>(std::move(cells));
}

template <Scalar T>
json model_json(const l1::MeasureModel<T>& m) {
  json cells = json::array();
  for (const auto& c : m.cells())
    cells.push_back({{"id", c.id}, {"mass", number(c.mass)}, {"kind", c.kind == l1::CellKind::Atom ? "atom" : "nonatomic"}});
  return cells;
}

template <Scalar T>
l1::StepFunction<T> read_step(const json& j) {
  auto model = read_model<T>(j);
  std::vector<T> v;
  for (const auto& x : field(j, "values")) v.push_back(read_number<T>(x));
  require(v.size() == model.size(), ErrorCode::ParseError, "values and cells differ in length");
  return {std::move(model), std::move(v)};
}

template <Scalar T>
json to_json(const l1::StepFunction<T>& f) {
  json vals = json::array();
  for (const auto& x : f.values()) vals.push_back(number(x));
  return {{"cells", model_json(f.model())}, {"values", vals}};
}

template <Scalar T>
json to_json(const l1::DualStep<T>& d) {
  json a = json::array();
  for (const auto& x : d.coefficients) a.push_back(number(x));
  return {{"cells", model_json(d.model)}, {"coefficients", a}};
}

// --- sequences

inline ck::SequenceVariant read_variant(const json& j) {
  if (!j.contains("variant")) return ck::SequenceVariant::C;
  auto s = j.at("variant").get<std::string>();
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "c") return ck::SequenceVariant::C;
  if (s == "c0") return ck::SequenceVariant::C0;
  if (s == "linf_n" || s == "linf") return ck::SequenceVariant::LinfN;
  fail(ErrorCode::ParseError, "variant must be c, c0 or linf_n");
}

template <Scalar T>
ck::TailSequence<T> read_sequence(const json& j) {
  std::vector<T> prefix;
  for (const auto& x : field(j, "prefix")) prefix.push_back(read_number<T>(x));
  const auto v = read_variant(j);
  const T lim = v == ck::SequenceVariant::C && j.contains("limit") ? read_number<T>(j.at("limit")) : T(0);
  return ck::TailSequence<T>(std::move(prefix), lim, v);
}

template <Scalar T>
json to_json(const ck::TailSequence<T>& s) {
  json p = json::array();
  for (const auto& x : s.prefix()) p.push_back(number(x));
  json out{{"variant", s.variant() == ck::SequenceVariant::C ? "c" : s.variant() == ck::SequenceVariant::C0 ? "c0" : "linf_n"},
           {"prefix", p}};
  if (s.variant() == ck::SequenceVariant::C) out["limit"] = number(s.limit());
  return out;
}

template <Scalar T>
json to_json(const ck::SequenceDual<T>& d) {
  json w = json::array();
  for (const auto& x : d.weights) w.push_back(number(x));
  return {{"weights", w}, {"limit_weight", number(d.limit_weight)}};
}

// --- Muntz

inline muntz::ExponentLadder read_ladder(const json& j) {
  if (j.is_string()) return muntz::ExponentLadder::parse(j.get<std::string>());
  const bool with_const = j.value("constant", false);
  if (j.contains("explicit")) return muntz::ExponentLadder::explicit_list(j.at("explicit").get<std::vector<double>>(), with_const);
  auto l = muntz::ExponentLadder::parse(field(j, "rule").get<std::string>());
  return with_const ? muntz::ExponentLadder::parse(l.describe() + "+const") : l;
}

inline muntz::Index read_index(const json& j) {
  if (j.is_string()) return muntz::Index(j.get<std::string>());
  return muntz::Index(j.get<long long>());
}

template <Scalar T>
muntz::MuntzPolynomial<T> read_polynomial(const json& j) {
  const auto ladder = j.contains("ladder") ? read_ladder(j.at("ladder")) : muntz::ExponentLadder::squares();
  std::vector<std::pair<muntz::Index, T>> terms;
  for (const auto& t : field(j, "terms")) {
    require(t.is_array() && t.size() == 2, ErrorCode::ParseError, "terms are [k, a] pairs");
    terms.emplace_back(read_index(t[0]), read_number<T>(t[1]));
  }
  return {ladder, terms};
}

template <Scalar T>
json to_json(const muntz::MuntzPolynomial<T>& p) {
  json terms = json::array();
  for (const auto& [k, a] : p.terms()) {
    json idx = k <= muntz::Index(1LL << 53) ? json(k.template convert_to<long long>()) : json(k.str());
    terms.push_back(json::array({idx, number(a)}));
  }
  return {{"ladder", p.ladder().describe()}, {"terms", terms}, {"text", p.to_string()}};
}

// --- components, sums, points

template <Scalar T>
Component<T> read_component(const json& j) {
  if (j.contains("cells") || j.contains("uniform")) return read_step<T>(j);
  if (j.contains("terms")) return read_polynomial<T>(j);
  return read_sequence<T>(j);
}

template <Scalar T>
json to_json(const Component<T>& c) {
  return std::visit([](const auto& p) { return to_json(p); }, c);
}

template <Scalar T>
SumPoint<T> read_sum_point(const json& j, const sums::AbsoluteNorm& fallback) {
  const auto N = j.contains("norm") ? sums::AbsoluteNorm::parse(j.at("norm").get<std::string>()) : fallback;
  return {read_component<T>(field(j, "x")), read_component<T>(field(j, "y")), N};
}

template <Scalar T>
json to_json(const SumPoint<T>& z) {
  return {{"norm", z.norm_rule.describe()}, {"x", to_json(z.x)}, {"y", to_json(z.y)}};
}

template <Scalar T>
json to_json(const SpacePoint<T>& p) {
  return std::visit([](const auto& v) { return to_json(v); }, p);
}

template <Scalar T>
json to_json(const Functional<T>& f) {
  return std::visit([](const auto& v) -> json {
    using V = std::decay_t<decltype(v)>;
    if constexpr (std::is_same_v<V, PointEvaluations>) {
      json pts = json::array();
      for (const auto& [t, w] : v.terms) pts.push_back(json::array({t, w}));
      return {{"evaluations", pts}};
    } else {
      return to_json(v);
    }
  }, f);
}

// --- certificates

template <Scalar T>
json to_json(const Certificate<T>& c) {
  json out{{"verdict", std::string(to_string(c.verdict))}};
  if (c.refutation) {
    const auto& r = *c.refutation;
    json rj{{"bound", to_double(r.bound)}, {"bound_exact", number(r.bound)}};
    if (r.exact_norm) {
      rj["exact_norm"] = to_double(*r.exact_norm);
      rj["exact_norm_exact"] = number(*r.exact_norm);
    }
    if (r.projection) rj["functional"] = to_json(r.projection->functional);
    rj["note"] = r.note;
    out["refutation"] = rj;
  }
  if (!c.witnesses.empty()) {
    json ws = json::array();
    for (const auto& w : c.witnesses)
      ws.push_back({{"eps", w.eps}, {"members", w.members.size()}, {"min_distance", w.min_distance},
                    {"average_error", w.average_error}});
    out["witnesses"] = ws;
  }
  out["log"] = c.log;
  return out;
}

/// CSV view of a report: one "path,value" row per scalar leaf, in order.
inline std::string to_csv(const json& j) {
  std::ostringstream out;
  out << "path,value\n";
  auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  };
  auto walk = [&](auto&& self, const json& v, const std::string& path) -> void {
    if (v.is_object()) {
      for (const auto& [k, x] : v.items()) self(self, x, path.empty() ? k : path + "." + k);
    } else if (v.is_array()) {
      for (std::size_t i = 0; i < v.size(); ++i) self(self, v[i], path + "[" + std::to_string(i) + "]");
    } else {
      out << quote(path) << ',' << quote(v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
    }
  };
  walk(walk, j, "");
  return out.str();
}

}  // namespace delta_lab::io
