#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <sys/wait.h>

#include "cmtrace/checks.hpp"
#include "cmtrace/errors.hpp"

using namespace cmtrace;
using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run verify(const std::string& args) {
  Run r;
  FILE* p = popen((std::string("\"") + VERIFY_BIN + "\" " + args + " 2>/dev/null").c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int st = pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

CheckReport sample(bool pass) {
  CheckReport r;
  r.check = "x";
  r.inputs = {{"a", 1}};
  r.lhs = "1";
  r.rhs = "1.0, approx";
  r.abs_residual = "0";
  r.rel_residual = "0";
  r.pass = pass;
  r.prec_bits = 128;
  r.wall_ms = 12.5;
  return r;
}

}  // namespace

TEST_CASE("config validation") {
  CHECK(format_from_string("csv") == Format::Csv);
  CHECK_THROWS_AS(format_from_string("xml"), ConfigError);
  RunConfig c;
  CHECK_NOTHROW(c.validate());
  c.tolerance = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.prec_bits = 32;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.jobs = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("bad discriminants are rejected") {
  const RunConfig c;
  CHECK_THROWS_AS(cmd_mock_theta(-20, c), InvalidDiscriminant);
  CHECK_THROWS_AS(cmd_mock_theta(-47 * 4, c), InvalidDiscriminant);
  CHECK_THROWS_AS(cmd_mock_theta(25, c), InvalidDiscriminant);
  CHECK_THROWS_AS(cmd_zagier(5, c), InvalidDiscriminant);
  CHECK_THROWS_AS(cmd_zagier(-3, c), InvalidDiscriminant);
  CHECK_THROWS_AS(cmd_duality("nope", c), ConfigError);
}

TEST_CASE("empty duality instance is exactly zero") {
  const CheckReport r = cmd_duality("empty", {});
  CHECK(r.pass);
  CHECK(r.abs_residual == Real(0L, 64).to_string(6));
}

TEST_CASE("report json schema") {
  const json j = to_json(sample(true));
  for (const char* key : {"check", "inputs", "lhs", "rhs", "abs_residual", "rel_residual", "pass", "prec_bits", "c_max",
                          "wall_ms", "tolerance", "diagnostics"})
    CHECK_MESSAGE(j.contains(key), key);
  CHECK(j["c_max"].is_null());
  CHECK_FALSE(to_json(sample(true), false).contains("wall_ms"));
}

TEST_CASE("render formats") {
  const std::vector<CheckReport> rs{sample(true), sample(false)};
  const json arr = json::parse(render(rs, Format::Json));
  CHECK(arr.size() == 2);

  const std::string csv = render(rs, Format::Csv, false);
  std::istringstream in(csv);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header == "check,inputs,lhs,rhs,abs_residual,rel_residual,pass,prec_bits,c_max");
  CHECK(row.find("\"1.0, approx\"") != std::string::npos);
  CHECK(row.find("\"{\"\"a\"\":1}\"") != std::string::npos);

  const std::string text = render(rs, Format::Text);
  CHECK(text.rfind("PASS x", 0) == 0);
  CHECK(text.find("\nFAIL x") != std::string::npos);
}

TEST_CASE("mock theta reports do not depend on jobs") {
  RunConfig one, eight;
  eight.jobs = 8;
  const CheckReport a = cmd_mock_theta(-47, one);
  const CheckReport b = cmd_mock_theta(-47, eight);
  CHECK(a.pass);
  CHECK(a.lhs == "-2");
  CHECK(to_json(a, false).dump() == to_json(b, false).dump());
}

TEST_CASE("J trace reports") {
  const CheckReport r = cmd_zagier(3, {});
  CHECK(r.pass);
  CHECK(r.lhs == "-248");
  CHECK(r.diagnostics.contains("label"));
}

TEST_CASE("cli exit codes and output") {
  const Run ok = verify("mock-theta --delta -23 --no-timing");
  CHECK(ok.code == 0);
  const json j = json::parse(ok.out);
  REQUIRE(j.is_array());
  CHECK(j[0]["lhs"] == "1");
  CHECK_FALSE(j[0].contains("wall_ms"));

  CHECK(verify("mock-theta --delta -24").code == 2);
  CHECK(verify("zagier --d 5").code == 2);
  CHECK(verify("zagier --d 3 --tolerance 0").code == 2);
  CHECK(verify("zagier --d 3 --format xml").code == 2);
  CHECK(verify("frobnicate").code == 2);
  // a failing identity exits 1
  CHECK(verify("zagier --d 7 --tolerance 1e-300 --prec 64").code == 1);

  const Run csv = verify("zagier --d 4 --format csv");
  CHECK(csv.code == 0);
  CHECK(csv.out.rfind("check,inputs,", 0) == 0);
}

TEST_CASE("cache path from environment") {
  const auto path = std::filesystem::temp_directory_path() / "cmtrace_checks_env_cache.json";
  std::filesystem::remove(path);
  const Run r = verify("zagier --d 7 --no-timing");
  ::setenv("CMTRACE_CACHE", path.c_str(), 1);
  const Run first = verify("zagier --d 7 --no-timing");
  const Run second = verify("zagier --d 7 --no-timing");
  ::unsetenv("CMTRACE_CACHE");
  CHECK(std::filesystem::exists(path));
  CHECK(first.out == r.out);
  CHECK(second.out == r.out);
  std::filesystem::remove(path);
}
