#pragma once

// Batch front-end behind the delta-lab executable. run() never prints; it
// returns a report and an exit code (0 ok, 1 usage, 2 failed re-verification).

#include "delta_lab/ck/ck.hpp"
#include "delta_lab/core/crosscheck.hpp"
#include "delta_lab/io/json.hpp"
#include "delta_lab/l1/l1.hpp"
#include "delta_lab/muntz/muntz.hpp"
#include "delta_lab/sums/sums.hpp"

#include <chrono>
#include <cstdlib>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace delta_lab::cli {

using io::json;

struct RunConfig {
  std::string command;           // certify | witness | decompose | sums | bernstein | crosscheck
  std::string space;             // l1 | ck | muntz | sum
  std::string point;             // inline JSON or @file
  std::string target;            // second point (witness target / L1 functional)
  std::string poly;              // Muntz polynomial text, e.g. "0.5t - 0.2t^4"
  std::optional<std::string> eps;  // number, or comma list for crosscheck
  std::optional<double> delta;
  double tol = 1e-9;
  std::string norm = "l2";
  std::string ladder = "squares";
  std::string check;             // sums: octahedral | alpha | dirichlet | refute | lift | construct
  std::string weights;           // sums dirichlet: "1/3,2/3"
  std::uint64_t seed = 1;
  std::size_t cap = 100000;
  std::size_t m = 0;             // ck witness size; 0 derives it from delta
  std::size_t samples = 0;       // sums refute: sampled far points for the hull check
  std::size_t terms = 3;         // bernstein: ladder prefix length
  double s = 0.5;                // bernstein: interval [0, s]
  std::size_t grid = 200;        // bernstein grid / norm grid
  std::string format = "json";   // json | csv
  std::string out;               // output path; empty = stdout
  bool timings = false;
};

struct Report {
  json body;
  int exit_code = 0;
  std::string message;  // for exit codes 1 and 2
};

/// Worker count from DELTA_LAB_THREADS (default: hardware concurrency).
inline std::size_t thread_cap() {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("DELTA_LAB_THREADS")) {
    try {
      n = std::max<std::size_t>(1, std::stoul(env));
    } catch (const std::logic_error&) {
    }
  }
  return n;
}

/// Evaluates job(i) for i < n on up to `threads` workers; results keep index order.
template <class R>
std::vector<R> ordered_map(std::size_t n, std::size_t threads, const std::function<R(std::size_t)>& job) {
  std::vector<std::optional<R>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  auto work = [&](std::size_t start, std::size_t stride) {
    for (std::size_t i = start; i < n; i += stride) {
      try {
        slots[i] = job(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t w = std::min(threads, n);
  if (w <= 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < w; ++t) pool.emplace_back(work, t, w);
  }
  std::vector<R> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    out.push_back(std::move(*slots[i]));
  }
  return out;
}

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

inline double parse_double(const std::string& s) {
  try {
    return to_double(parse_rational(s));
  } catch (const std::invalid_argument&) {
    fail(ErrorCode::ParseError, "bad number '" + s + "'");
  }
}

inline double eps_value(const RunConfig& c, double fallback) { return c.eps ? parse_double(*c.eps) : fallback; }

template <Scalar T>
muntz::MuntzPolynomial<T> muntz_input(const RunConfig& c, const std::string& text_or_json) {
  if (!text_or_json.empty() && (text_or_json[0] == '{' || text_or_json[0] == '@'))
    return io::read_polynomial<T>(io::load(text_or_json));
  return muntz::parse_polynomial<T>(text_or_json, muntz::ExponentLadder::parse(c.ladder));
}

inline std::string muntz_text(const RunConfig& c) {
  require(!c.poly.empty() || !c.point.empty(), ErrorCode::ParseError, "need --poly or --point");
  return c.poly.empty() ? c.point : c.poly;
}

inline void need_point(const RunConfig& c) {
  require(!c.point.empty(), ErrorCode::ParseError, "--point is required for --space " + c.space);
}

template <Scalar T>
json certificate_report(const Certificate<T>& cert) {
  json j = io::to_json(cert);
  // Daugavet and Delta points coincide in the single spaces, so a refuted
  // Daugavet point is reported with the stronger verdict.
  j["daugavet_verdict"] = j["verdict"];
  if (cert.verdict == Verdict::DaugavetNo) j["verdict"] = std::string(to_string(Verdict::DeltaNo));
  return j;
}

inline json certify(const RunConfig& c) {
  if (c.space == "l1") {
    need_point(c);
    const auto f = io::read_step<Rational>(io::load(c.point));
    json j = certificate_report(l1::is_daugavet_point_l1(f));
    for (std::size_t i = 0; i < f.model().size(); ++i)
      if (f.model().cell(i).kind == l1::CellKind::Atom && f.in_support(i)) {
        const auto r = l1::refute_delta_atom(f, f.model().cell(i).id);
        j["atom_refutation"] = {{"atom_id", f.model().cell(i).id},
                                {"eps", io::number(r.eps)},
                                {"distance_bound", io::number(r.bound)}};
        break;
      }
    return j;
  }
  if (c.space == "ck") {
    need_point(c);
    return certificate_report(ck::is_daugavet_point_ck(io::read_sequence<Rational>(io::load(c.point))));
  }
  if (c.space == "muntz") {
    const auto f = muntz_input<double>(c, muntz_text(c));
    json j = certificate_report(muntz::is_daugavet_point_muntz(f));
    if (j["daugavet_verdict"] == "DAUGAVET_NO" && c.eps) {
      const double e = parse_double(*c.eps);
      const auto rep = muntz::separation_check_muntz(f, muntz::far_candidates_muntz(f, e, c.samples ? c.samples : 16, c.seed), e);
      j["separation"] = {{"eps", e},
                         {"eps_threshold", rep.peaks.eps_threshold},
                         {"peaks_t", rep.peaks.peaks_t},
                         {"kept", rep.kept},
                         {"all_separated", rep.all_separated},
                         {"hull_lower", rep.hull_lower},
                         {"hull_exceeds_eps", rep.hull_exceeds_eps}};
      require(rep.all_separated && rep.hull_exceeds_eps, ErrorCode::VerificationFailed, "separation check failed");
    }
    return j;
  }
  if (c.space == "sum") {
    need_point(c);
    const auto z = io::read_sum_point<double>(io::load(c.point), sums::AbsoluteNorm::parse(c.norm));
    const auto r = sums::sum_refute_daugavet(z, c.eps ? std::optional<double>(parse_double(*c.eps)) : std::nullopt);
    return {{"verdict", "DAUGAVET_NO"},
            {"record", {{"c", r.record.c}, {"d", r.record.d}, {"w_shape", r.record.w_shape}, {"radius", r.record.radius},
                        {"coordinate", r.coordinate == 0 ? "a" : "b"}, {"record_eps", r.record.eps}}},
            {"eps", r.eps},
            {"delta", r.delta},
            {"direction", io::to_json(r.direction)}};
  }
  fail(ErrorCode::ParseError, "unknown --space '" + c.space + "' (l1, ck, muntz, sum)");
}

inline json witness(const RunConfig& c) {
  if (c.space == "l1") {
    need_point(c);
    const auto f = io::read_step<Rational>(io::load(c.point));
    l1::DualStep<Rational> x0{f.model(), std::vector<Rational>(f.model().size(), Rational(1))};
    if (!c.target.empty()) {
      const auto j = io::load(c.target);
      x0.coefficients.clear();
      for (const auto& a : io::field(j, "coefficients")) x0.coefficients.push_back(io::read_number<Rational>(a));
      require(x0.coefficients.size() == f.model().size(), ErrorCode::ParseError, "one coefficient per cell");
    }
    const Rational eps = c.eps ? io::read_number<Rational>(json(*c.eps)) : Rational(1, 10);
    const Rational delta = c.delta ? from_double<Rational>(*c.delta) : Rational(1, 10);
    const auto w = l1::daugavet_witness_l1(f, x0, eps, delta);
    return {{"cell_id", w.cell_id},  {"mass", io::number(w.mass)},     {"distance", io::number(w.distance)},
            {"value", io::number(w.value)}, {"g", io::to_json(w.g)}, {"model", io::model_json(w.model)}};
  }
  if (c.space == "ck") {
    need_point(c);
    const auto f = io::read_sequence<Rational>(io::load(c.point));
    const auto g = c.target.empty() ? f : io::read_sequence<Rational>(io::load(c.target));
    const double d = c.delta.value_or(0.25);
    const std::size_t m = c.m ? c.m : static_cast<std::size_t>(std::floor(2 / d)) + 1;
    const Rational eps = c.eps ? io::read_number<Rational>(json(*c.eps)) : Rational(1, 10);
    const auto w = ck::daugavet_witness_ck(f, g, eps, m);
    json members = json::array();
    for (const auto& x : w.members) members.push_back(io::to_json(x));
    return {{"m", m},
            {"min_distance", io::number(w.min_distance)},
            {"average_error", io::number(w.average_error)},
            {"fresh", w.fresh},
            {"members", members}};
  }
  if (c.space == "muntz") {
    const auto f = muntz_input<double>(c, muntz_text(c));
    const auto g = c.target.empty() ? f : muntz_input<double>(c, c.target);
    const double eps = eps_value(c, 0.5);
    const double delta = c.delta.value_or(eps / 4);
    const auto w = muntz::daugavet_witness_muntz(f, g, eps, delta, std::max(c.tol, 1e-8));
    json spikes = json::array();
    for (const auto& s : w.spikes)
      spikes.push_back({{"k", s.k.str()}, {"l", s.l.str()}, {"lambda_k", s.lambda_k}, {"lambda_l", s.lambda_l}, {"norm", s.norm}});
    return {{"m", w.m},
            {"min_distance", w.min_distance},
            {"average_error", w.average_error},
            {"max_member_norm", w.max_member_norm},
            {"spikes", spikes}};
  }
  fail(ErrorCode::ParseError, "unknown --space '" + c.space + "' (l1, ck, muntz)");
}

inline json decompose(const RunConfig& c) {
  if (c.space == "ck") {
    need_point(c);
    const auto f = io::read_sequence<Rational>(io::load(c.point));
    const Rational eps = c.eps ? io::read_number<Rational>(json(*c.eps)) : Rational(1, 20);
    const auto d = ck::convex_dld2p_decompose_ck(f, eps);
    return {{"K", d.K},
            {"lambda", io::number(d.lambda)},
            {"plus", io::to_json(d.plus)},
            {"minus", io::to_json(d.minus)},
            {"error", io::number(d.error)}};
  }
  if (c.space == "muntz") {
    const auto f = muntz_input<Rational>(c, muntz_text(c));
    const auto d = muntz::convex_dld2p_decompose_muntz(f, c.cap);
    return {{"mu", io::number(d.mu)},
            {"mu_value", to_double(d.mu)},
            {"plus", io::to_json(d.plus)},
            {"minus", io::to_json(d.minus)},
            {"n", d.n.str()},
            {"N", d.N.str()},
            {"s", d.s},
            {"t0", d.t0},
            {"plus_norm", {{"lower", d.plus_norm.lower}, {"upper", d.plus_norm.upper}}},
            {"minus_norm", {{"lower", d.minus_norm.lower}, {"upper", d.minus_norm.upper}}}};
  }
  fail(ErrorCode::ParseError, "unknown --space '" + c.space + "' (ck, muntz)");
}

inline json record_json(const sums::AlphaRecord& r) {
  return {{"c", r.c},           {"d", r.d},
          {"coordinate", r.coordinate == 0 ? "a" : "b"},
          {"w_shape", r.w_shape}, {"radius", r.radius},
          {"sup_coordinate", r.sup_coordinate},
          {"delta", r.delta},   {"eps", r.eps}};
}

template <Scalar T>
json family_json(const sums::SumFamily<T>& f) {
  return {{"members", f.members.size()},
          {"min_distance", f.min_distance},
          {"average_error", f.average_error},
          {"max_member_norm", f.max_member_norm}};
}

inline json sums_command(const RunConfig& c) {
  const auto N = sums::AbsoluteNorm::parse(c.norm);
  const std::size_t grid = std::max<std::size_t>(c.grid, 4096);
  if (c.check == "octahedral") {
    const auto v = sums::is_positively_octahedral(N, -1, grid);
    json j{{"norm", N.describe()}, {"octahedral", std::string(to_string(v.verdict))}, {"method", v.method},
           {"exact", v.exact}, {"best_value", v.best_value}, {"upper_bound", v.upper_bound}, {"gap", v.gap}};
    if (v.exact_witness) j["witness"] = {io::number(v.exact_witness->first), io::number(v.exact_witness->second)};
    else j["best_point"] = {v.a, v.b};
    return j;
  }
  if (c.check == "alpha") {
    const auto v = sums::has_property_alpha(N, -1, grid);
    json recs = json::array();
    for (const auto& r : v.records) recs.push_back(record_json(r));
    json j{{"norm", N.describe()}, {"alpha", std::string(to_string(v.verdict))}, {"method", v.method},
           {"octahedral", std::string(to_string(v.octahedral.verdict))}, {"records", recs}};
    if (v.failing_point) j["failing_point"] = {v.failing_point->first, v.failing_point->second};
    return j;
  }
  if (c.check == "dirichlet") {
    std::vector<Rational> w;
    for (const auto& s : split(c.weights)) w.push_back(parse_rational(s));
    const Rational eps = c.eps ? parse_rational(*c.eps) : Rational(1, 10);
    const auto r = sums::dirichlet_average(w, eps, c.cap);
    return {{"n", r.n}, {"k", r.k}, {"error", io::number(r.error)}, {"error_value", to_double(r.error)}};
  }
  need_point(c);
  const json pj = io::load(c.point);
  const auto z = io::read_sum_point<double>(pj, N);
  if (c.check == "refute") {
    const auto r = sums::sum_refute_daugavet(z, c.eps ? std::optional<double>(parse_double(*c.eps)) : std::nullopt);
    json j{{"record", record_json(r.record)}, {"eps", r.eps}, {"delta", r.delta}, {"direction", io::to_json(r.direction)}};
    if (c.samples > 0) {
      const auto pts = sums::sample_sum_delta_set(z, r.eps, c.samples, c.seed);
      const auto h = hull_distance(r.direction, pts, c.tol);
      j["sampled"] = {{"count", pts.size()}, {"hull_lower", h.lower}, {"hull_upper", h.upper}};
      require(h.lower >= r.delta - 1e-6, ErrorCode::VerificationFailed, "sampled hull closer than delta");
    }
    return j;
  }
  const double a = io::read_number<double>(io::field(pj, "a")), b = io::read_number<double>(io::field(pj, "b"));
  const double eps = eps_value(c, 0.5);
  if (c.check == "lift") {
    const auto L = sums::sum_delta_lift<double>(z.x, z.y, z.norm_rule, a, b, eps, c.delta.value_or(eps / 2));
    return {{"z", io::to_json(L.z)}, {"eps", eps}, {"family", family_json(L.family)}};
  }
  if (c.check == "construct") {
    std::vector<SumPoint<double>> targets;
    if (pj.contains("targets"))
      for (const auto& t : pj.at("targets")) targets.push_back(io::read_sum_point<double>(t, z.norm_rule));
    else
      targets.push_back(SumPoint<double>{z.x, z.y, z.norm_rule}.scaled(-1));
    const auto con = sums::sum_daugavet_construct<double>(z.x, z.y, z.norm_rule, a, b, targets, eps, c.delta.value_or(0.05));
    json fams = json::array();
    for (const auto& f : con.families) fams.push_back(family_json(f));
    return {{"z", io::to_json(con.z)}, {"eps", eps}, {"families", fams}};
  }
  fail(ErrorCode::ParseError, "unknown --check '" + c.check + "' (octahedral, alpha, dirichlet, refute, lift, construct)");
}

inline json bernstein(const RunConfig& c) {
  const auto e = muntz::bernstein_estimate(muntz::ExponentLadder::parse(c.ladder), c.terms, c.s, c.grid);
  return {{"ladder", c.ladder}, {"terms", c.terms}, {"s", c.s}, {"lower", e.lower},
          {"lp_value", e.lp_value}, {"arg_t", e.arg_t}, {"coefficients", e.coefficients}};
}

inline json crosscheck(const RunConfig& c) {
  need_point(c);
  std::vector<double> grid;
  for (const auto& s : split(c.eps.value_or("0.1,0.5,1"))) grid.push_back(parse_double(s));
  const json pj = io::load(c.point);
  std::function<CrosscheckReport(std::size_t)> job;
  if (c.space == "l1") {
    const auto f = io::read_step<double>(pj);
    job = [f, &grid, &c](std::size_t i) { return crosscheck_characterizations(f, {grid[i]}, c.tol); };
  } else if (c.space == "ck") {
    const auto f = io::read_sequence<double>(pj);
    job = [f, &grid, &c](std::size_t i) { return crosscheck_characterizations(f, {grid[i]}, c.tol); };
  } else {
    fail(ErrorCode::NotPolyhedral, "crosscheck needs --space l1 or ck");
  }
  const auto parts = ordered_map<CrosscheckReport>(grid.size(), thread_cap(), job);
  json rows = json::array();
  std::size_t dis = 0;
  for (const auto& p : parts) {
    dis += p.disagreements;
    for (const auto& r : p.rows)
      rows.push_back({{"eps", r.eps},
                      {"far_vertices", r.far_vertices},
                      {"delta_distance", r.delta_distance},
                      {"daugavet_distance", r.daugavet_distance},
                      {"brute_delta", r.brute_delta},
                      {"predicted", std::string(to_string(r.predicted_delta))},
                      {"agree", r.agree}});
  }
  const auto& first = parts.front();
  require(dis == 0, ErrorCode::VerificationFailed, "characterizations disagree");
  return {{"theorem_daugavet", first.theorem_daugavet},
          {"projection_min", first.projection_min},
          {"resolution", first.resolution},
          {"disagreements", dis},
          {"rows", rows}};
}

}  // namespace detail

/// 2 for a construction that failed re-verification, 1 for everything else.
inline int exit_code_for(ErrorCode code) { return code == ErrorCode::VerificationFailed ? 2 : 1; }

inline Report error_report(const std::string& command, const Error& e) {
  Report rep;
  rep.exit_code = exit_code_for(e.code());
  rep.message = e.what();
  rep.body = {{"command", command}, {"error", std::string(to_string(e.code()))}, {"message", e.what()}};
  return rep;
}

inline Report run(const RunConfig& c) {
  Report rep;
  const auto start = std::chrono::steady_clock::now();
  try {
    json body;
    if (c.command == "certify") body = detail::certify(c);
    else if (c.command == "witness") body = detail::witness(c);
    else if (c.command == "decompose") body = detail::decompose(c);
    else if (c.command == "sums") body = detail::sums_command(c);
    else if (c.command == "bernstein") body = detail::bernstein(c);
    else if (c.command == "crosscheck") body = detail::crosscheck(c);
    else fail(ErrorCode::ParseError, "unknown command '" + c.command + "'");
    rep.body = json{{"command", c.command}};
    if (!c.space.empty() && c.command != "sums" && c.command != "bernstein") rep.body["space"] = c.space;
    for (auto& [k, v] : body.items()) rep.body[k] = v;
    if (c.timings)
      rep.body["timing_ms"] =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  } catch (const Error& e) {
    rep = error_report(c.command, e);
  } catch (const json::exception& e) {
    rep.exit_code = 1;
    rep.message = std::string("PARSE_ERROR: ") + e.what();
    rep.body = {{"command", c.command}, {"error", "PARSE_ERROR"}, {"message", e.what()}};
  }
  return rep;
}

inline std::string render(const Report& r, const std::string& format) {
  return format == "csv" ? io::to_csv(r.body) : r.body.dump(2) + "\n";
}

}  // namespace delta_lab::cli
