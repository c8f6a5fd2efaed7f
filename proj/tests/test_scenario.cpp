#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "orbitflow/scenario.hpp"

using namespace orbitflow;
using namespace orbitflow::cli;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& contents) {
    static int counter = 0;
    path = "scenario_test_tmp_" + std::to_string(counter++) + ".json";
    std::ofstream out(path);
    out << contents;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

const char* kHeis = R"({
  "schema_version": 1,
  "dim": 3,
  "brackets": [{"i": 1, "j": 2, "k": 3, "c": 1.0}]
})";

}  // namespace

TEST_CASE("load_scenario parses structure constants") {
  TempFile f(kHeis);
  Scenario sc = load_scenario(f.path);
  CHECK(sc.bracket.dim() == 3);
  CHECK(sc.bracket.c(0, 1, 2) == doctest::Approx(1.0));
  CHECK(sc.bracket.c(1, 0, 2) == doctest::Approx(-1.0));
  CHECK(sc.derivations.empty());
  CHECK(!sc.split.has_value());
  CHECK(sc.echo.at("dim") == 3);
}

TEST_CASE("load_scenario parses derivations, split, and flow overrides") {
  TempFile f(R"({
    "schema_version": 1,
    "dim": 2,
    "brackets": [],
    "derivations": [[[1, 0], [0, 2]]],
    "split": {"dim_1": 1, "dim_2": 1},
    "flow": {"max_steps": 10, "grad_tol": 1e-6}
  })");
  Scenario sc = load_scenario(f.path);
  CHECK(sc.derivations.size() == 1);
  CHECK(sc.derivations[0](1, 1) == doctest::Approx(2.0));
  REQUIRE(sc.split.has_value());
  CHECK(sc.split->dim_1 == 1);
  CHECK(sc.flow.max_steps == 10);
  CHECK(sc.flow.grad_tol == doctest::Approx(1e-6));
}

TEST_CASE("load_scenario rejects malformed inputs") {
  auto expect_parse_error = [](const std::string& body) {
    TempFile f(body);
    CHECK_THROWS_AS(load_scenario(f.path), ParseError);
  };
  expect_parse_error("{ not json");
  expect_parse_error(R"({"dim": 3, "brackets": []})");  // missing schema_version
  expect_parse_error(R"({"schema_version": 2, "dim": 3, "brackets": []})");
  expect_parse_error(R"({"schema_version": 1, "dim": 0, "brackets": []})");
  expect_parse_error(R"({"schema_version": 1, "dim": 3})");  // no brackets
  // Index out of range.
  expect_parse_error(
      R"({"schema_version": 1, "dim": 3, "brackets": [{"i": 1, "j": 2, "k": 4, "c": 1}]})");
  // i == j violates antisymmetry.
  expect_parse_error(
      R"({"schema_version": 1, "dim": 3, "brackets": [{"i": 2, "j": 2, "k": 1, "c": 1}]})");
  // Duplicate unordered key.
  expect_parse_error(
      R"({"schema_version": 1, "dim": 3, "brackets": [
        {"i": 1, "j": 2, "k": 3, "c": 1}, {"i": 2, "j": 1, "k": 3, "c": -1}]})");
  // Split dims must sum to dim.
  expect_parse_error(
      R"({"schema_version": 1, "dim": 3, "brackets": [], "split": {"dim_1": 1, "dim_2": 1}})");
  CHECK_THROWS_AS(load_scenario("no_such_file_anywhere.json"), ParseError);
}

TEST_CASE("load_matrix and load_matrix_list") {
  TempFile f(R"({"dim": 2, "entries": [0, 1, 0, 0]})");
  Matrix X = load_matrix(f.path);
  CHECK(X(0, 1) == doctest::Approx(1.0));

  TempFile bad(R"({"dim": 2, "entries": [0, 1, 0]})");
  CHECK_THROWS_AS(load_matrix(bad.path), ParseError);

  TempFile list(R"({"dim": 2, "matrices": [[1, 0, 0, -1], [0, 1, 1, 0]]})");
  auto ms = load_matrix_list(list.path);
  CHECK(ms.size() == 2);
  CHECK(ms[1](1, 0) == doctest::Approx(1.0));
}

TEST_CASE("bracket_to_json canonical echo") {
  BracketTensor mu(3);
  mu.set(0, 1, 2, 1.0);
  Json j = bracket_to_json(mu);
  CHECK(j.at("dim") == 3);
  REQUIRE(j.at("brackets").size() == 1);
  CHECK(j.at("brackets")[0].at("i") == 1);
  CHECK(j.at("brackets")[0].at("j") == 2);
  CHECK(j.at("brackets")[0].at("k") == 3);
}

TEST_CASE("cmd_soliton report on the Heisenberg scenario") {
  TempFile f(kHeis);
  CommandResult r = cmd_soliton(f.path, GlobalOptions{});
  CHECK(r.pass);
  CHECK(r.report.at("command") == "soliton");
  CHECK(r.report.at("pass") == true);
  bool saw_verdict = false;
  for (const Json& check : r.report.at("results"))
    if (check.at("name") == "verdict") {
      saw_verdict = true;
      CHECK(check.at("value") == "EinsteinNilradical");
    }
  CHECK(saw_verdict);
}

TEST_CASE("cmd_detect skips downstream checks when in_W fails") {
  TempFile f(R"({
    "schema_version": 1,
    "dim": 3,
    "brackets": [{"i": 1, "j": 2, "k": 3, "c": 1.0}],
    "derivations": [[[2, 0, 0], [0, 1, 0], [0, 0, 1]]]
  })");
  CommandResult r = cmd_detect(f.path, GlobalOptions{});
  CHECK(!r.pass);
  int skipped = 0;
  for (const Json& check : r.report.at("results"))
    if (check.contains("skipped")) ++skipped;
  CHECK(skipped == 3);
}

TEST_CASE("cmd_detect requires derivations or a split") {
  TempFile f(kHeis);
  CHECK_THROWS_AS(cmd_detect(f.path, GlobalOptions{}), ParseError);
}

TEST_CASE("cmd_adjoint_rep and render_text") {
  CommandResult r = cmd_adjoint_rep("3,1", GlobalOptions{});
  CHECK(r.pass);
  std::string text = render_text(r);
  CHECK(text.find("critical_constant") != std::string::npos);
  CHECK(text.find("OK") != std::string::npos);

  CHECK_THROWS_AS(cmd_adjoint_rep("1,3", GlobalOptions{}), ParseError);
  CHECK_THROWS_AS(cmd_adjoint_rep("x", GlobalOptions{}), ParseError);
}

TEST_CASE("reports are byte-stable across repeated runs") {
  TempFile f(kHeis);
  CommandResult a = cmd_soliton(f.path, GlobalOptions{});
  CommandResult b = cmd_soliton(f.path, GlobalOptions{});
  CHECK(a.report.dump(2) == b.report.dump(2));
}
