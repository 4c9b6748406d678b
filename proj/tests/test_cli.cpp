#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "instanton/cli.hpp"

using namespace instanton;

namespace {
struct Outcome {
  int code;
  std::string out, err;
};

Outcome invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

Report parsed(const Outcome& o) { return report_from_json(Json::parse(o.out)); }
}  // namespace

TEST_CASE("report serialization", "[cli]") {
  Report empty;
  empty.command = "noop";
  CHECK(empty.pass());
  auto j = Json::parse(emit_report(empty, Format::Json));
  CHECK(j["pass"] == true);
  CHECK(j["checks"].empty());

  Report r;
  r.command = "demo";
  r.seed = 9;
  r.params = {{"samples", 3}};
  r.add(check_below("small", 1e-9, 1e-7, "here"));
  r.add(Check{"rational", std::string("-7/3"), 0.0, true, "there"});
  r.add(Check{"diverges", INFINITY, 0.0, true, ""});
  CHECK(r.pass());
  auto back = report_from_json(Json::parse(emit_report(r, Format::Json)));
  CHECK(back == r);
  CHECK(Json::parse(emit_report(r, Format::Json))["checks"][2]["value"] == "inf");

  r.add(check_below("large", 1.0, 1e-7, "here"));
  CHECK_FALSE(r.pass());
  CHECK(Json::parse(emit_report(r, Format::Json))["pass"] == false);
  CHECK(report_from_json(Json::parse(emit_report(r, Format::Json))) == r);

  std::string csv = emit_report(r, Format::Csv);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  CHECK(csv.rfind("name,value,tol,pass,ref\n", 0) == 0);
  CHECK(emit_report(r, Format::Text).find("FAIL: 3/4 checks") != std::string::npos);

  auto bad = Json::parse(emit_report(r, Format::Json));
  bad["pass"] = true;
  CHECK_THROWS_AS(report_from_json(bad), ParseError);
  CHECK_THROWS_AS(write_report("/nonexistent-dir/x.json", "{}"), IoError);
}

TEST_CASE("classify subcommand", "[cli]") {
  auto o = invoke({"classify", "--metric", "taub-nut", "--orientation", "reversed", "--samples", "200", "--seed", "7"});
  REQUIRE(o.code == 0);
  auto r = parsed(o);
  CHECK(r.seed == 7);
  REQUIRE(r.checks.size() == 1);
  CHECK(std::get<std::string>(r.checks[0].value) == "II");

  auto wrong = invoke({"classify", "--metric", "schwarzschild", "--expect", "I", "--samples", "20"});
  CHECK(wrong.code == 1);

  auto unknown = invoke({"classify", "--metric", "nosuch"});
  CHECK(unknown.code == 2);
  CHECK(unknown.err.find("UnknownFamily") != std::string::npos);
  CHECK(invoke({"classify"}).code == 2);
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"classify", "--metric", "kerr", "--param", "a=3"}).code == 2);
  CHECK(invoke({"classify", "--metric", "kerr", "--orientation", "sideways"}).code == 2);
  CHECK(invoke({"classify", "--metric", "kerr", "--format", "yaml"}).code == 2);
  CHECK(invoke({"verify-ricci", "--metric", "kerr", "--tol", "nosuch=1"}).code == 2);
  CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("metric subcommands", "[cli]") {
  auto ricci = invoke({"verify-ricci", "--metric", "eguchi_hanson", "--samples", "20"});
  CHECK(ricci.code == 0);
  auto herm = invoke({"verify-hermitian", "--metric", "kasner", "--samples", "10", "--format", "text"});
  CHECK(herm.code == 0);
  CHECK(herm.out.find("sign of s_g = negative") != std::string::npos);
  auto flat = invoke({"verify-hermitian", "--metric", "flat", "--samples", "5"});
  CHECK(flat.code == 1);
  CHECK(parsed(flat).checks[0].name.find("TypeMismatch") != std::string::npos);
  auto decay = invoke({"decay", "--metric", "taub_nut", "--model", "ALF-A"});
  CHECK(decay.code == 0);
  CHECK(invoke({"decay", "--metric", "taub_nut", "--model", "AF"}).code == 2);
  CHECK(invoke({"decay", "--metric", "schwarzschild", "--model", "AF", "--radii", "1,2,3"}).code == 2);
  auto kasner = invoke({"decay", "--metric", "kasner", "--model", "Kasner"});
  CHECK(kasner.code == 0);
  CHECK(Json::parse(kasner.out)["checks"][0]["value"] == "inf");
}

TEST_CASE("toda subcommands", "[cli]") {
  CHECK(invoke({"toda-check", "--solution", "alh_star"}).code == 0);
  CHECK(invoke({"toda-check", "--solution", "sphere_profile", "--param", "b=-1", "--param", "c=0.1"}).code == 0);
  CHECK(invoke({"toda-check", "--u", "log(-rho)", "--rho-range", "-10,-1"}).code == 0);
  CHECK(invoke({"toda-check", "--u", "rho^2", "--rho-range", "-10,-1"}).code == 1);
  CHECK(invoke({"toda-check", "--u", "log(-rho"}).code == 2);
  CHECK(invoke({"toda-check", "--solution", "kasner", "--u", "0"}).code == 2);
  CHECK(invoke({"toda-build", "--solution", "kasner", "--samples", "10"}).code == 0);
  auto sphere = invoke({"toda-build", "--solution", "sphere_profile", "--samples", "5"});
  CHECK(sphere.code == 1);
  CHECK(parsed(sphere).checks[0].name.find("SignError") != std::string::npos);
}

TEST_CASE("toric subcommands", "[cli]") {
  auto p2 = invoke({"toric-intersect", "--fan", "[(1,0),(0,1),(-1,-1)]", "--boundary", "0", "--expect-ample", "true"});
  REQUIRE(p2.code == 0);
  auto r = parsed(p2);
  CHECK(std::get<std::string>(r.checks[0].value) == "1");
  auto f = invoke({"toric-intersect", "--standard", "fmn", "--fan-param", "1,3", "--boundary", "2"});
  REQUIRE(f.code == 0);
  bool third = false;
  for (const auto& c : parsed(f).checks)
    if (c.name == "D1.D2" || c.name == "D2.D3") third |= std::get<std::string>(c.value) == "1/3";
  CHECK(third);
  CHECK(invoke({"toric-intersect", "--fan", "[(1,0),(0,1),(-1,-1)]", "--boundary", "0", "--expect-ample", "false"}).code == 1);
  CHECK(invoke({"toric-intersect", "--fan", "[(1,0),(0,1)]"}).code == 2);
  CHECK(invoke({"toric-intersect", "--fan", "[(1,0),(0,1),(-1,-1)", "--boundary", "7"}).code == 2);
  CHECK(invoke({"toric-intersect", "--fan", "nonsense"}).code == 2);
  auto cls = invoke({"toric-classify", "--max-n", "6", "--max-k", "3"});
  CHECK(cls.code == 0);
  CHECK(invoke({"toric-classify", "--max-n", "0"}).code == 2);
}

TEST_CASE("suite subset and determinism", "[cli]") {
  auto a = invoke({"suite", "--only", "6,7"});
  auto b = invoke({"suite", "--only", "6,7"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  auto r = parsed(a);
  for (const auto& c : r.checks) CHECK((c.name.rfind("c6 ", 0) == 0 || c.name.rfind("c7 ", 0) == 0));
  auto d = invoke({"suite", "--only", "6,10"});
  CHECK(d.code == 0);
  CHECK(parsed(d).checks.back().name.rfind("c10 ", 0) == 0);
  CHECK(invoke({"suite", "--only", "11"}).code == 2);
}

TEST_CASE("report files and configuration", "[cli]") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "instanton-cli-test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto path = (dir / "out.csv").string();
  auto o = invoke({"toric-classify", "--format", "csv", "--output", path});
  CHECK(o.code == 0);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "name,value,tol,pass,ref");

  ::setenv("INSTANTON_REPORT_DIR", dir.string().c_str(), 1);
  CHECK(invoke({"toric-classify"}).code == 0);
  ::unsetenv("INSTANTON_REPORT_DIR");
  CHECK(fs::exists(dir / "toric-classify.json"));

  auto cfg = (dir / "run.ini").string();
  std::ofstream(cfg) << "[toric-classify]\nmax-n=3\nmax-k=1\n";
  auto c = invoke({"--config", cfg, "toric-classify"});
  CHECK(c.code == 0);
  CHECK(parsed(c).params["max_n"] == 3);
  fs::remove_all(dir);
}
