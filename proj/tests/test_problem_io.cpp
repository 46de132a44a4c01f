#include <gtest/gtest.h>

#include <sstream>

#include "support/fixtures.hpp"

using namespace qeframe;

namespace {

Errc parse_error(const std::string& text) {
  try {
    parse_problem_text(text);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected a parse error for " << text;
  return Errc::precondition;
}

const char* kHopf = R"({
  "name": "hopf",
  "dim": 3,
  "brackets": [{"i": 1, "j": 2, "k": 3, "c": 2}, {"i": 2, "j": 3, "k": 1, "c": 2}, {"i": 3, "j": 1, "k": 2, "c": 2}],
  "metric": [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
  "m": 1,
  "lambda": 2,
  "vertical": 1
})";

struct CommandRun {
  int code;
  std::string out;
  std::string err;
};

template <typename F>
CommandRun run(F&& body) {
  std::ostringstream out, err;
  const int code = guarded([&] { return body(out, err); }, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST(ParseProblem, Hopf) {
  const Problem p = parse_problem_text(kHopf);
  EXPECT_EQ(p.dim(), 3);
  EXPECT_EQ(*p.name, "hopf");
  EXPECT_EQ(p.frame(1, 0, 2), -2.0);
  EXPECT_EQ(p.frame(2, 1, 0), -2.0);
  EXPECT_EQ(*p.vertical, 0);
  EXPECT_EQ(*p.lambda, 2.0);
  EXPECT_FALSE(p.x.has_value());
  EXPECT_EQ(p.x_or_zero(), Vector(Vector::Zero(3)));
  EXPECT_EQ(p.unit_vertical(), basis_vector(3, 0));
}

TEST(ParseProblem, FlatMetricAndRepeatedBracket) {
  const Problem p = parse_problem_text(R"({"dim": 2, "brackets": [{"i": 1, "j": 2, "k": 2, "c": 1},
      {"i": 2, "j": 1, "k": 2, "c": -1}], "metric": [2, 0, 0, 3], "X": [0.5, 0]})");
  EXPECT_EQ(p.g.gram()(1, 1), 3.0);
  EXPECT_EQ(p.frame(0, 1, 1), 1.0);
  EXPECT_EQ((*p.x)[0], 0.5);
}

TEST(ParseProblem, Errors) {
  EXPECT_EQ(parse_error("{"), Errc::invalid_input);
  EXPECT_EQ(parse_error("[]"), Errc::invalid_input);
  EXPECT_EQ(parse_error(R"({"metric": [[1]]})"), Errc::invalid_input);
  EXPECT_EQ(parse_error(R"({"dim": 0, "metric": []})"), Errc::invalid_input);
  EXPECT_EQ(parse_error(R"({"dim": 2})"), Errc::invalid_input);
  EXPECT_EQ(parse_error(R"({"dim": 2, "metric": [[1, 0], [0]]})"), Errc::invalid_input);
  EXPECT_EQ(parse_error(R"({"dim": 2, "metric": [[1, 0], [0, "a"]]})"), Errc::invalid_input);
  EXPECT_EQ(parse_error(R"({"dim": 2, "metric": [[1, 0], [0, -1]]})"), Errc::not_positive_definite);
  EXPECT_EQ(parse_error(R"({"dim": 2, "metric": [[1, 0], [0, 1]], "brackets": [{"i": 1, "j": 3, "k": 1, "c": 1}]})"),
            Errc::invalid_input);
  EXPECT_EQ(parse_error(R"({"dim": 2, "metric": [[1, 0], [0, 1]], "brackets": [{"i": 1, "j": 2, "c": 1}]})"),
            Errc::invalid_input);
  EXPECT_EQ(parse_error(R"({"dim": 2, "metric": [[1, 0], [0, 1]],
      "brackets": [{"i": 1, "j": 2, "k": 2, "c": 1}, {"i": 2, "j": 1, "k": 2, "c": 1}]})"),
            Errc::invalid_input);
  EXPECT_EQ(parse_error(R"({"dim": 2, "metric": [[1, 0], [0, 1]], "brackets": [{"i": 1, "j": 1, "k": 2, "c": 1}]})"),
            Errc::invalid_input);
  EXPECT_EQ(parse_error(R"({"dim": 3, "metric": [[1,0,0],[0,1,0],[0,0,1]],
      "brackets": [{"i": 1, "j": 2, "k": 3, "c": 1}, {"i": 1, "j": 3, "k": 1, "c": 1}]})"),
            Errc::jacobi_violation);
  EXPECT_EQ(parse_error(R"({"dim": 2, "metric": [[1, 0], [0, 1]], "X": [1]})"), Errc::invalid_input);
  EXPECT_EQ(parse_error(R"({"dim": 2, "metric": [[1, 0], [0, 1]], "m": 0})"), Errc::invalid_input);
  EXPECT_EQ(parse_error(R"({"dim": 2, "metric": [[1, 0], [0, 1]], "vertical": 3})"), Errc::invalid_input);
  EXPECT_EQ(parse_error(R"({"dim": 2, "metric": [[1, 0], [0, 1]], "compact": 1})"), Errc::invalid_input);
}

TEST(ParseProblem, LoadMissingFile) {
  EXPECT_THROW(load_problem("/nonexistent/problem.json"), Error);
  const Problem p = load_problem(std::string(QEFRAME_TEST_DATA) + "/nil.json");
  EXPECT_EQ(*p.name, "nil");
}

TEST(Serialisation, CatalogEntriesRoundTrip) {
  for (const auto& e : entries())
    for (std::size_t i = 0; i < e.known_solutions.size(); ++i) {
      const Json j = entry_json(e, i);
      const Problem p = parse_problem_text(j.dump());
      EXPECT_EQ(p.g.gram(), e.metric.gram()) << e.name;
      EXPECT_EQ(*p.x, e.known_solutions[i].x) << e.name;
      EXPECT_EQ(*p.m, e.known_solutions[i].m);
      EXPECT_EQ(*p.lambda, e.known_solutions[i].lambda);
      EXPECT_EQ(*p.compact, e.compact);
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
          for (int c = 0; c < 3; ++c) EXPECT_EQ(p.frame(a, b, c), e.frame(a, b, c));
      if (e.submersion_vertical) {
        ASSERT_TRUE(p.vertical.has_value());
        EXPECT_LE((p.unit_vertical() - *e.submersion_vertical).norm(), 1e-15);
      }
    }
}

TEST(Serialisation, RandomMetricsRoundTripExactly) {
  fixtures::Random rnd(21);
  for (int k = 0; k < 20; ++k) {
    const FrameMetric g(rnd.spd(3));
    const Vector x = rnd.vec(3);
    const Problem p = parse_problem_text(problem_json(frames::su2(), g, x, 1.5, -0.25).dump());
    EXPECT_EQ(p.g.gram(), g.gram());
    EXPECT_EQ(*p.x, x);
  }
}

TEST(TGrid, Parsing) {
  EXPECT_EQ(parse_t_grid("2"), std::vector<double>({2.0}));
  EXPECT_EQ(parse_t_grid("0.5:0.5:2"), std::vector<double>({0.5, 1.0, 1.5, 2.0}));
  EXPECT_EQ(parse_t_grid("1:1:1"), std::vector<double>({1.0}));
  for (const char* bad : {"", "a", "1:2", "1:0:3", "3:1:1", "1:1:2:3", "1:1:2x"})
    EXPECT_THROW(parse_t_grid(bad), Error) << bad;
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
}

TEST(Commands, Verify) {
  const Problem p = parse_problem_text(kHopf);
  const CommandRun ok = run([&](std::ostream& o, std::ostream& e) { return cmd_verify(p, {}, o, e); });
  EXPECT_EQ(ok.code, exit_ok);
  const Json j = Json::parse(ok.out);
  EXPECT_TRUE(j["verified"].get<bool>());
  EXPECT_EQ(j["lambda_source"], "file");
  EXPECT_TRUE(j["trivial"].get<bool>());
  EXPECT_NEAR(j["lambda_fit"].get<double>(), 2.0, 1e-14);

  CommandOptions wrong;
  wrong.lambda = 1.0;
  const CommandRun bad = run([&](std::ostream& o, std::ostream& e) { return cmd_verify(p, wrong, o, e); });
  EXPECT_EQ(bad.code, exit_not_verified);
  EXPECT_NEAR(Json::parse(bad.out)["residual"].get<double>(), std::sqrt(3.0), 1e-13);
  EXPECT_NE(bad.err.find("exceeds"), std::string::npos);
}

TEST(Commands, VerifyUsesFitWithoutLambda) {
  const Problem p = parse_problem_text(entry_json(entry("berger_t3"), 1).dump());
  Problem q = p;
  q.lambda.reset();
  const CommandRun r = run([&](std::ostream& o, std::ostream& e) { return cmd_verify(q, {}, o, e); });
  EXPECT_EQ(r.code, exit_ok);
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j["lambda_source"], "fit");
  EXPECT_NEAR(j["lambda"].get<double>(), -2.0, 1e-12);
  EXPECT_EQ(j["positivity_trichotomy"]["kind"], "StrictlyPositive");
}

TEST(Commands, VariationCsv) {
  const Problem p = parse_problem_text(kHopf);
  CommandOptions opt;
  opt.t_grid = "0.5:0.5:2";
  const CommandRun r = run([&](std::ostream& o, std::ostream& e) { return cmd_variation(p, opt, o, e); });
  EXPECT_EQ(r.code, exit_ok);
  std::istringstream lines(r.out);
  std::string line;
  std::vector<std::string> rows;
  while (std::getline(lines, line)) rows.push_back(line);
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0], "t,c_t,lambda_t,residual,scal,status");
  EXPECT_EQ(rows[1], "0.5,,3,,7,inadmissible");
  EXPECT_EQ(rows[2].rfind("1,0,2,", 0), 0u);
  EXPECT_EQ(rows[4].rfind("2,1.4142135623730951,0,", 0), 0u);
  EXPECT_NE(rows[4].find(",ok"), std::string::npos);
}

TEST(Commands, VariationJsonAndErrors) {
  const Problem p = parse_problem_text(kHopf);
  CommandOptions opt;
  opt.t_grid = "1:1:3";
  const std::string path = ::testing::TempDir() + "variation.json";
  opt.json_path = path;
  const CommandRun r = run([&](std::ostream& o, std::ostream& e) { return cmd_variation(p, opt, o, e); });
  EXPECT_EQ(r.code, exit_ok);
  std::ifstream f(path);
  const Json j = Json::parse(f);
  EXPECT_NEAR(j["base_lambda"].get<double>(), 4.0, 1e-12);
  EXPECT_NEAR(j["einstein_point"].get<double>(), 1.0, 1e-14);
  EXPECT_TRUE(j["admissible"]["upper"].is_null());
  EXPECT_EQ(j["points"].size(), 3u);

  Problem no_vertical = p;
  no_vertical.vertical.reset();
  EXPECT_EQ(run([&](std::ostream& o, std::ostream& e) { return cmd_variation(no_vertical, {}, o, e); }).code,
            exit_input);
  CommandOptions bad_grid;
  bad_grid.t_grid = "0:1:2";
  EXPECT_EQ(run([&](std::ostream& o, std::ostream& e) { return cmd_variation(p, bad_grid, o, e); }).code, exit_input);

  Problem off = p;
  off.g = FrameMetric::diagonal({1.0, 1.1, 1.0});
  const CommandRun pre = run([&](std::ostream& o, std::ostream& e) { return cmd_variation(off, {}, o, e); });
  EXPECT_EQ(pre.code, exit_precondition);
  EXPECT_NE(pre.err.find("not quasi-Einstein"), std::string::npos);
}

TEST(Commands, VariationWarnsOnNonEinsteinBase) {
  const auto prod = fixtures::berger_times_sphere();
  Problem p{std::string("product"), prod.frame, prod.g, prod.x_coeff * prod.unit_vertical, prod.m, prod.lambda, 0,
            true};
  CommandOptions opt;
  opt.t_grid = "1:1:2";
  const CommandRun r = run([&](std::ostream& o, std::ostream& e) { return cmd_variation(p, opt, o, e); });
  EXPECT_EQ(r.code, exit_ok);
  EXPECT_NE(r.err.find("not Einstein"), std::string::npos);
  EXPECT_NE(r.out.find(",not_qe"), std::string::npos);
}

TEST(Commands, Classify) {
  const Problem b = parse_problem_text(entry_json(entry("berger_t2")).dump());
  const CommandRun r = run([&](std::ostream& o, std::ostream& e) { return cmd_classify(b, {}, o, e); });
  EXPECT_EQ(r.code, exit_ok);
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j["bucket"], "Spherical");
  EXPECT_TRUE(j["sasakian"].get<bool>());
  EXPECT_NEAR(j["H"].get<double>(), -1.0, 1e-10);

  const Problem round = parse_problem_text(kHopf);
  EXPECT_EQ(run([&](std::ostream& o, std::ostream& e) { return cmd_classify(round, {}, o, e); }).code,
            exit_precondition);
}

TEST(Commands, SolveAndCatalog) {
  const Problem flat = parse_problem_text(R"({"dim": 3, "metric": [[1,0,0],[0,1,0],[0,0,1]]})");
  CommandOptions opt;
  opt.starts = 4;
  const CommandRun s = run([&](std::ostream& o, std::ostream& e) { return cmd_solve(flat, opt, o, e); });
  EXPECT_EQ(s.code, exit_ok);
  const Json j = Json::parse(s.out);
  ASSERT_FALSE(j["records"].empty());
  for (const auto& rec : j["records"]) EXPECT_TRUE(rec["trivial"].get<bool>());

  CommandOptions one;
  one.name = "nil";
  const CommandRun c = run([&](std::ostream& o, std::ostream&) { return cmd_catalog(one, o); });
  EXPECT_EQ(c.code, exit_ok);
  EXPECT_EQ(Json::parse(c.out)["name"], "nil");

  const CommandRun all = run([&](std::ostream& o, std::ostream&) { return cmd_catalog({}, o); });
  EXPECT_GE(Json::parse(all.out).size(), 10u);

  CommandOptions unknown;
  unknown.name = "nope";
  EXPECT_EQ(run([&](std::ostream& o, std::ostream&) { return cmd_catalog(unknown, o); }).code, exit_input);
}
