#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "jtrace/config.hpp"
#include "jtrace/report.hpp"

using namespace jtrace;
using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run jspec(const std::string& args) {
  const std::string cmd = std::string(JSPEC_BINARY) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("config: q mode, k mode and violations") {
  const RunConfig g = load_config(std::nullopt, {{"sequence", {{"kind", "geometric"}, {"q", 0.25}}}});
  CHECK(g.params().k() == 0.5);
  const RunConfig p = load_config(std::nullopt, {{"sequence", {{"kind", "powerlaw"}, {"c", 1}, {"p", 2}, {"k", 0.5}}}});
  CHECK(p.sequence == "powerlaw");
  CHECK(p.params().seq().a(1) == doctest::Approx(4.0));
  CHECK_THROWS_AS(load_config(std::nullopt, {{"sequence", {{"kind", "powerlaw"}, {"k", 1.5}}}}), UsageError);
  CHECK_THROWS_AS(load_config(std::nullopt, {{"sequence", {{"q", 0.2}, {"k", 0.5}}}}), UsageError);
  CHECK_THROWS_AS(load_config(std::nullopt, {{"tolerances", {{"eig", -1.0}}}}), UsageError);
  CHECK_THROWS_AS(load_config(std::nullopt, {{"bogus", 1}}), UsageError);
}

TEST_CASE("config: flags override the file") {
  const json file = {{"sequence", {{"kind", "geometric"}, {"q", 0.3}}}, {"count", 4}};
  const RunConfig a = load_config(file, json::object());
  CHECK(*a.q == 0.3);
  CHECK(a.count == 4);
  const RunConfig b = load_config(file, {{"sequence", {{"q", 0.2}}}, {"count", 6}});
  CHECK(*b.q == 0.2);
  CHECK(b.count == 6);
  const RunConfig c = load_config(file, {{"sequence", {{"kind", "powerlaw"}, {"k", 0.4}}}});
  CHECK(!c.q.has_value());
  CHECK(*c.k == 0.4);
}

TEST_CASE("17-digit output round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 4.0 / 45.0, 1e-300, 6.02214076e23}) {
    CHECK(std::stod(format_double(v)) == v);
    CHECK(json::parse(dump_json(json_number(v))).get<double>() == v);
  }
  CHECK(json_number(std::nan("")).is_null());
}

TEST_CASE("spectrum subcommand") {
  const Run r = jspec("spectrum --count 8");
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 9);
  CHECK(ls[0] == "index,lambda,mass,residual_F,residual_matrix,refined");
  double prev = 0.0;
  for (std::size_t i = 1; i < ls.size(); ++i) {
    std::istringstream row(ls[i]);
    std::string idx, lam;
    std::getline(row, idx, ',');
    std::getline(row, lam, ',');
    const double v = std::stod(lam);
    CHECK(v > prev);
    prev = v;
  }
  CHECK(std::stod(ls[1].substr(2)) == doctest::Approx(11.841809843065835).epsilon(1e-15));

  const Run empty = jspec("spectrum --count 0");
  CHECK(empty.code == 0);
  CHECK(lines(empty.out).size() == 1);
}

TEST_CASE("json output parses back bit for bit") {
  const Run r = jspec("measure --count 3 --format json");
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["measure"].size() == 3);
  CHECK(j["measure"][0]["mass"].get<double>() == doctest::Approx(0.99930474846679357).epsilon(1e-14));
}

TEST_CASE("identities subcommand") {
  const Run r = jspec("identities --id BASIC --r 1 --w 0 --q 0.5 --format json");
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  REQUIRE(j["identities"].size() == 1);
  const json& rep = j["identities"][0];
  for (const char* key : {"identity_id", "params", "lhs", "rhs", "abs_err", "rel_err", "trunc_bound"}) {
    CHECK(rep.contains(key));
  }
  CHECK(rep["abs_err"].get<double>() <= rep["trunc_bound"].get<double>());
  CHECK(rep["rhs"].get<double>() == 2.0);

  const Run all = jspec("identities");
  CHECK(all.code == 0);
  CHECK(lines(all.out).size() == 1 + 7 * 5);
}

TEST_CASE("usage errors") {
  CHECK(jspec("spectrum --seq powerlaw --k 1.5").code == 1);
  CHECK(jspec("spectrum --q 0.25 --k 0.5").code == 1);
  CHECK(jspec("spectrum --format xml").code == 1);
  CHECK(jspec("").code == 1);
  CHECK(jspec("identities --id NOPE").code == 1);
}

TEST_CASE("config file") {
  const std::string path = "jspec_test_config.json";
  {
    std::ofstream f(path);
    f << R"({"sequence": {"kind": "powerlaw", "c": 1, "p": 2, "k": 0.5}, "count": 3})";
  }
  const Run r = jspec("measure --config " + path);
  CHECK(r.code == 0);
  CHECK(lines(r.out).size() == 4);
  CHECK(jspec("measure --config missing_file.json").code == 1);
  std::remove(path.c_str());
}

TEST_CASE("poly and qlaguerre subcommands") {
  const Run p = jspec("poly --n 2 --x 0 --format json");
  REQUIRE(p.code == 0);
  const json j = json::parse(p.out);
  CHECK(j["coefficients"][1].get<double>() == doctest::Approx(-17.0 / 48.0));
  const Run q = jspec("qlaguerre --z 1 10");
  CHECK(q.code == 0);
  CHECK(lines(q.out).size() == 3);
  CHECK(jspec("qlaguerre --seq powerlaw --k 0.5").code == 1);
}

TEST_CASE("verify passes on the default configuration") {
  const Run r = jspec("verify");
  CHECK(r.code == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);
}
