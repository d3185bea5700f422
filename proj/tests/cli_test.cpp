#include "delta_lab/cli/run.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <memory>
#include <sys/wait.h>

namespace dl = delta_lab;
namespace cli = delta_lab::cli;
using dl::io::json;
using R = dl::Rational;

namespace {

cli::RunConfig config(std::string command, std::string space = "") {
  cli::RunConfig c;
  c.command = std::move(command);
  c.space = std::move(space);
  return c;
}

struct Process {
  int status = -1;
  std::string out;
};

// Runs the built executable; stderr is discarded.
Process run_binary(const std::string& args) {
  Process p;
  const std::string cmd = std::string(DELTA_LAB_CLI) + " " + args + " 2>/dev/null";
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
  if (!pipe) return p;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe.get())) > 0) p.out.append(buf.data(), n);
  const int raw = pclose(pipe.release());
  p.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return p;
}

}  // namespace

TEST(Run, CertifyCkRefutes) {
  auto c = config("certify", "ck");
  c.point = R"({"prefix":[1,0.5],"limit":0})";
  const auto rep = cli::run(c);
  ASSERT_EQ(rep.exit_code, 0) << rep.message;
  EXPECT_EQ(rep.body["verdict"], "DELTA_NO");
  EXPECT_EQ(rep.body["refutation"]["bound_exact"], "3/2");
  EXPECT_DOUBLE_EQ(rep.body["refutation"]["bound"].get<double>(), 1.5);
}

TEST(Run, DecomposeMuntzHalfT) {
  auto c = config("decompose", "muntz");
  c.poly = "0.5t";
  const auto rep = cli::run(c);
  ASSERT_EQ(rep.exit_code, 0) << rep.message;
  EXPECT_EQ(rep.body["mu"], "3/4");
}

TEST(Run, SumsAlphaOnL2) {
  auto c = config("sums");
  c.norm = "l2";
  c.check = "alpha";
  const auto rep = cli::run(c);
  ASSERT_EQ(rep.exit_code, 0) << rep.message;
  EXPECT_EQ(rep.body["alpha"], "true");
}

TEST(Run, UsageErrorsExitOne) {
  auto bad_space = config("certify", "hilbert");
  bad_space.point = "{}";
  EXPECT_EQ(cli::run(bad_space).exit_code, 1);
  auto bad_json = config("certify", "ck");
  bad_json.point = "{prefix:";
  EXPECT_EQ(cli::run(bad_json).exit_code, 1);
  auto bad_norm = config("sums");
  bad_norm.norm = "l0.5";
  bad_norm.check = "alpha";
  EXPECT_EQ(cli::run(bad_norm).exit_code, 1);
  auto bad_eps = config("witness", "ck");
  bad_eps.point = R"({"prefix":[],"limit":1})";
  bad_eps.eps = "-0.5";
  const auto rep = cli::run(bad_eps);
  EXPECT_EQ(rep.exit_code, 1);
  EXPECT_EQ(rep.body["error"], "INVALID_ARGUMENT");
}

TEST(Run, VerificationFailuresExitTwo) {
  const auto rep = cli::error_report("witness", dl::Error(dl::ErrorCode::VerificationFailed, "member closer than 2 - eps"));
  EXPECT_EQ(rep.exit_code, 2);
  EXPECT_EQ(rep.body["error"], "VERIFICATION_FAILED");
  for (auto code : {dl::ErrorCode::ParseError, dl::ErrorCode::InvalidArgument, dl::ErrorCode::CertificateScope,
                    dl::ErrorCode::InsufficientCertificate, dl::ErrorCode::SearchCapReached})
    EXPECT_EQ(cli::exit_code_for(code), 1);
}

TEST(Run, SameSeedSameBytes) {
  auto c = config("sums");
  c.check = "refute";
  c.point = R"({"x":{"prefix":[],"limit":0.7071067811865476},"y":{"prefix":[0.5],"limit":0.7071067811865476}})";
  c.samples = 60;
  c.seed = 7;
  const auto a = cli::render(cli::run(c), "json");
  const auto b = cli::render(cli::run(c), "json");
  EXPECT_EQ(a, b);
  auto m = config("certify", "muntz");
  m.poly = "2.1165347359575992t - 2.1165347359575992t^4";
  m.eps = "0.01";
  m.samples = 20;
  EXPECT_EQ(cli::render(cli::run(m), "csv"), cli::render(cli::run(m), "csv"));
}

TEST(Run, CrosscheckIsOrderedUnderThreads) {
  auto c = config("crosscheck", "l1");
  c.point = R"({"cells":[{"id":0,"mass":"1","kind":"atom"},{"id":1,"mass":"1","kind":"nonatomic"}],"values":["1/2","1/2"]})";
  c.eps = "0.1,0.5,1";
  const auto rep = cli::run(c);
  ASSERT_EQ(rep.exit_code, 0) << rep.message;
  ASSERT_EQ(rep.body["rows"].size(), 3u);
  EXPECT_DOUBLE_EQ(rep.body["rows"][0]["eps"].get<double>(), 0.1);
  EXPECT_DOUBLE_EQ(rep.body["rows"][2]["eps"].get<double>(), 1.0);
  EXPECT_EQ(rep.body["disagreements"], 0);
}

TEST(Schema, PointsRoundTrip) {
  const dl::ck::TailSequence<R> s({R(1), R(-1, 3)}, R(2, 7));
  EXPECT_EQ(dl::io::read_sequence<R>(json::parse(dl::io::to_json(s).dump())), s);

  const dl::l1::MeasureModel<R> m({{0, R(1, 3), dl::l1::CellKind::Atom}, {4, R(2, 3), dl::l1::CellKind::Nonatomic}});
  const dl::l1::StepFunction<R> f(m, {R(3, 2), R(-3, 4)});
  const auto f2 = dl::io::read_step<R>(json::parse(dl::io::to_json(f).dump()));
  EXPECT_EQ(f2.model(), f.model());
  EXPECT_EQ(f2.values(), f.values());

  const auto ladder = dl::muntz::ExponentLadder::squares();
  const auto p = dl::muntz::parse_polynomial<R>("1/2t - 3/2t^4 + t^81", ladder);
  EXPECT_EQ(dl::io::read_polynomial<R>(json::parse(dl::io::to_json(p).dump())), p);

  const dl::SumPoint<double> z{dl::ck::TailSequence<double>({0.25}, 0.5), dl::ck::TailSequence<double>({}, -0.5),
                               dl::sums::AbsoluteNorm::parse("lp:3")};
  const auto z2 = dl::io::read_sum_point<double>(json::parse(dl::io::to_json(z).dump()), dl::sums::AbsoluteNorm::l1());
  EXPECT_EQ(z2.norm_rule.describe(), z.norm_rule.describe());
  EXPECT_DOUBLE_EQ(z2.norm_bounds().lower, z.norm_bounds().lower);
}

TEST(Schema, ReportsReparse) {
  auto c = config("witness", "ck");
  c.point = R"({"prefix":[],"limit":1})";
  c.delta = 0.5;
  const auto rep = cli::run(c);
  ASSERT_EQ(rep.exit_code, 0) << rep.message;
  const auto again = json::parse(cli::render(rep, "json"));
  EXPECT_EQ(again, rep.body);
  for (const auto& mem : again["members"]) EXPECT_EQ(dl::io::read_sequence<R>(mem).norm(), R(1));
}

TEST(Binary, ExamplesAndExitCodes) {
  const auto ck = run_binary("certify --space ck --point '{\"prefix\":[1,0.5],\"limit\":0}'");
  EXPECT_EQ(ck.status, 0);
  EXPECT_EQ(json::parse(ck.out)["verdict"], "DELTA_NO");
  const auto mu = run_binary("decompose --space muntz --poly '0.5t'");
  EXPECT_EQ(mu.status, 0);
  EXPECT_EQ(json::parse(mu.out)["mu"], "3/4");
  const auto al = run_binary("sums --norm l2 --check alpha");
  EXPECT_EQ(al.status, 0);
  EXPECT_EQ(json::parse(al.out)["alpha"], "true");
  EXPECT_EQ(run_binary("certify --space nowhere --point '{}'").status, 1);
  EXPECT_EQ(run_binary("frobnicate").status, 1);
  EXPECT_EQ(run_binary("sums --norm l2").status, 1);  // --check is required
  const auto csv = run_binary("sums --check dirichlet --weights 2/5,3/5 --eps 1/20 --format csv");
  EXPECT_EQ(csv.status, 0);
  EXPECT_NE(csv.out.find("n,5"), std::string::npos);
}
