#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <unistd.h>

#include "cli.hpp"
#include "kkflows/verify.hpp"
#include "kkflows/waves.hpp"
#include "output.hpp"

using namespace kkflows;
using namespace kkflows::cli;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::istringstream is(s);
  for (std::string f; std::getline(is, f, sep);) out.push_back(f);
  return out;
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() / ("kkflows-cli-test-" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("usage and exit codes") {
  auto r = run({});
  CHECK(r.code == 2);
  CHECK(r.err.find("Usage") != std::string::npos);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"wave", "--nope"}).code == 2);
  CHECK(run({"wave", "--out", "xml"}).code == 2);
  CHECK(run({"wave", "--family", "nonsense"}).code == 2);
  CHECK(run({"special", "--fn", "K"}).code == 2);
  CHECK(run({"special", "--fn", "K", "--args", "1", "2"}).code == 2);
  CHECK(run({"special", "--fn", "K", "--args", "1.5"}).code == 1);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("hierarchy gen prints the first two equations") {
  auto r = run({"hierarchy", "gen", "--n", "2", "--format", "text"});
  REQUIRE(r.code == 0);
  auto L = lines(r.out);
  REQUIRE(L.size() == 2);
  CHECK(L[0] == "u_t + u_5s + 10 u u_3s + 25 u_s u_2s + 20 u^2 u_s = 0");
  CHECK(L[1] ==
        "u_t + u_7s + 14 u u_5s + 49 u_s u_4s + 84 u_2s u_3s + 56 u^2 u_3s + 252 u u_s u_2s + 70 u_s^3 + "
        "224/3 u^3 u_s = 0");
  CHECK(run({"hierarchy", "gen", "--n", "2", "--format", "text"}).out == r.out);
}

TEST_CASE("hierarchy JSON keeps exact rationals") {
  auto r = run({"hierarchy", "gen", "--n", "4", "--format", "json"});
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  REQUIRE(j.size() == 5);
  CHECK(j[2]["lambda"] == "-27/1");
  CHECK(j[4]["lambda"] == "729/1");
  CHECK(j[2]["ell"] == 0);
  CHECK(r.out.find("\"8/3\"") != std::string::npos);
  for (const auto& level : j) CHECK(level.contains("equation"));
}

TEST_CASE("wave CSV round-trips doubles") {
  auto r = run({"wave", "--family", "cnA", "--m", "0.3", "--range", "0", "2", "--samples", "9"});
  REQUIRE(r.code == 0);
  auto L = lines(r.out);
  REQUIRE(L.size() == 10);
  CHECK(L[0] == "s,k,k1,k2,k3,k4,k5,k6,k7");
  ProfileParams p;
  p.m = 0.3;
  auto k = make_profile(Family::CnA, p);
  for (std::size_t i = 1; i < L.size(); ++i) {
    auto f = split(L[i], ',');
    REQUIRE(f.size() == 9);
    double s = std::stod(f[0]);
    auto jet = k.jet(s, 7);
    for (int j = 0; j <= 7; ++j) CHECK(std::stod(f[static_cast<std::size_t>(j + 1)]) == jet[static_cast<std::size_t>(j)]);
  }
}

TEST_CASE("wave skips points outside the domain") {
  auto r = run({"wave", "--family", "nsA", "--m", "0.5", "--range", "-1", "1", "--samples", "3", "--order", "1"});
  REQUIRE(r.code == 0);
  auto L = lines(r.out);
  REQUIRE(L.size() == 3);
  CHECK(split(L[1], ',')[0] == "-1");
  CHECK(split(L[2], ',')[0] == "1");
}

TEST_CASE("curve analyze and sextatic points") {
  auto r = run({"curve", "analyze", "--curve", "builtin:exp-cos", "--find-sextatic", "--out", "csv"});
  REQUIRE(r.code == 0);
  auto L = lines(r.out);
  REQUIRE(L.size() == 7);
  CHECK(std::abs(std::stod(split(L[2], ',')[1]) - 1.2729688880228) < 1e-10);
  auto a = run({"curve", "analyze", "--range", "0", "6.2832", "--samples", "5"});
  REQUIRE(a.code == 0);
  auto rows = lines(a.out);
  CHECK(rows[0] == "t,v,k,sextatic");
  CHECK(split(rows[1], ',')[2] == "nan");
  CHECK(split(rows[1], ',')[3] == "1");
  CHECK(run({"curve", "analyze", "--curve", "builtin:spiral"}).code == 2);
}

TEST_CASE("congruence curves by both methods agree") {
  auto q = run({"congruence", "--m", "0.5", "--method", "quadrature", "--range", "0", "4", "--samples", "9"});
  auto o = run({"congruence", "--m", "0.5", "--method", "ode", "--range", "0", "4", "--samples", "9"});
  REQUIRE(q.code == 0);
  REQUIRE(o.code == 0);
  CHECK(compare_numeric_text(q.out, o.out) < 1e-8);
  auto j = run({"congruence", "--m", "0.5", "--samples", "3", "--out", "json"});
  REQUIRE(j.code == 0);
  auto d = nlohmann::json::parse(j.out);
  CHECK(d["taus"].size() == 3);
  CHECK(d["taus"][0].size() == 2);
  CHECK(d["xi"].size() == 3);
  CHECK(d["v"].get<double>() == doctest::Approx(-0.75));
  CHECK(d["curve"].size() == 3);
}

TEST_CASE("motion rows stay on the unit sphere") {
  auto r = run({"motion", "--m", "0.7", "--t", "0", "0.5", "--samples", "4"});
  REQUIRE(r.code == 0);
  auto L = lines(r.out);
  REQUIRE(L.size() == 9);
  for (std::size_t i = 1; i < L.size(); ++i) {
    auto f = split(L[i], ',');
    double x = std::stod(f[2]), y = std::stod(f[3]), z = std::stod(f[4]);
    CHECK(std::abs(x * x + y * y + z * z - 1.0) < 1e-12);
  }
}

TEST_CASE("pde snapshots and velocity") {
  auto r = run({"pde", "--init", "cnA:0.5", "--T", "0.01", "--dt", "1e-4", "--n", "64", "--snapshots", "2"});
  REQUIRE(r.code == 0);
  auto L = lines(r.out);
  REQUIRE(L.size() == 4);
  CHECK(split(L[0], ',').size() == 65);
  auto v = run({"pde", "--init", "cnA:0.5", "--T", "1", "--n", "128", "--snapshots", "10", "--measure-velocity",
                "--out", "csv"});
  REQUIRE(v.code == 0);
  auto f = split(lines(v.out)[1], ',');
  CHECK(std::abs(std::stod(f[0]) + 0.75) < 1e-6);
  CHECK(run({"pde", "--init", "soliton:1"}).code == 2);
  CHECK(run({"pde", "--order", "3"}).code == 2);
}

TEST_CASE("special functions") {
  auto r = run({"special", "--fn", "K", "--args", "0.5", "--out", "csv"});
  REQUIRE(r.code == 0);
  auto k = split(lines(r.out)[1], ',');
  CHECK(k[0] == "K");
  CHECK(std::abs(std::stod(k[1]) - 1.8540746773013719) < 1e-15);
  auto s = run({"special", "--fn", "sn", "--args", "0.3", "0", "--out", "csv"});
  CHECK(std::abs(std::stod(split(lines(s.out)[1], ',')[1]) - std::sin(0.3)) < 1e-15);
  auto p = run({"special", "--fn", "Pi", "--args", "0.3", "0.2", "1", "0.5", "--out", "json"});
  auto j = nlohmann::json::parse(p.out);
  CHECK(j[0]["im"].get<double>() != 0.0);
}

TEST_CASE("verify suites and exit status") {
  auto r = run({"verify", "--suite", "lemma1"});
  CHECK(r.code == 0);
  CHECK(r.out.find("4 of 4 checks passed") != std::string::npos);
  auto j = run({"verify", "--suite", "prop1", "--suite", "sextatic", "--out", "json"});
  REQUIRE(j.code == 0);
  auto d = nlohmann::json::parse(j.out);
  CHECK(d.size() == 11);
  CHECK(run({"verify", "--suite", "nope"}).code == 2);

  ::setenv("KKFLOWS_TOL", "stationary=1e-30", 1);
  auto f = run({"verify", "--suite", "stationary"});
  ::unsetenv("KKFLOWS_TOL");
  CHECK(f.code == 1);
  CHECK(f.out.find("FAIL") != std::string::npos);
  ::setenv("KKFLOWS_TOL", "stationary=", 1);
  CHECK(run({"verify", "--suite", "stationary"}).code == 2);
  ::unsetenv("KKFLOWS_TOL");
}

TEST_CASE("tolerance overrides") {
  Tolerances none;
  CHECK(none.empty());
  CHECK(none.get("waves", 1e-9) == 1e-9);
  Tolerances all("1e-3");
  CHECK(all.get("waves", 1e-9) == 1e-3);
  Tolerances some("waves=1e-4,pde=2e-2");
  CHECK(some.get("waves", 1e-9) == 1e-4);
  CHECK(some.get("pde", 1e-2) == 2e-2);
  CHECK(some.get("motion", 1e-5) == 1e-5);
  CHECK_THROWS_AS(Tolerances("waves"), InvalidInput);
  CHECK_THROWS_AS(Tolerances("nosuch=1"), InvalidInput);
  CHECK_THROWS_AS(Tolerances("waves=-1"), InvalidInput);
  // Exact checks are never relaxed.
  auto r = run_suite("lemma1", Tolerances("1e3"));
  for (const auto& c : r) CHECK(c.tolerance == 0.0);
}

TEST_CASE("output files, manifests and replay") {
  TempDir dir;
  std::string out = dir.file("h.txt");
  auto r = run({"hierarchy", "gen", "--n", "3", "--format", "text", "-o", out});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  std::string content = read_file(out);
  auto m = nlohmann::json::parse(read_file(out + ".manifest.json"));
  CHECK(m["outputs"][0]["fnv1a64"] == hex64(fnv1a64(content)));
  CHECK(m["outputs"][0]["kind"] == "symbolic");
  CHECK(m["seed"] == 1);
  CHECK(m["versions"].contains("gmp"));
  CHECK(m["versions"].contains("fftw"));
  CHECK(m["command"].size() == 8);
  for (const auto& e : std::filesystem::directory_iterator(dir.path))
    CHECK(e.path().string().find(".tmp.") == std::string::npos);

  auto again = run({"replay", out + ".manifest.json"});
  CHECK(again.code == 0);
  CHECK(again.out.find("identical") != std::string::npos);

  std::string csv = dir.file("w.csv");
  REQUIRE(run({"wave", "--family", "cnB", "--samples", "7", "--output", csv, "--seed", "5"}).code == 0);
  auto wm = nlohmann::json::parse(read_file(csv + ".manifest.json"));
  CHECK(wm["seed"] == 5);
  CHECK(wm["outputs"][0]["kind"] == "numeric");
  CHECK(run({"replay", csv + ".manifest.json"}).code == 0);

  wm["command"][4] = "8";
  write_atomic(dir.file("bad.json"), wm.dump());
  auto bad = run({"replay", dir.file("bad.json")});
  CHECK(bad.code == 1);
  CHECK(bad.out.find("differs") != std::string::npos);

  std::string mf = dir.file("stdout.manifest.json");
  auto so = run({"special", "--fn", "K", "--args", "0.5", "--manifest", mf});
  CHECK(!so.out.empty());
  CHECK(nlohmann::json::parse(read_file(mf))["outputs"][0]["path"] == "-");
}

TEST_CASE("numeric text comparison") {
  CHECK(compare_numeric_text("a,1,2\n", "a,1,2\n") == 0.0);
  CHECK(compare_numeric_text("a,1,2\n", "a,1,2.000001\n") == doctest::Approx(5e-7));
  CHECK(std::isinf(compare_numeric_text("a,1\n", "b,1\n")));
  CHECK(std::isinf(compare_numeric_text("1,2\n", "1,2,3\n")));
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(std::nan("")) == "nan");
}
