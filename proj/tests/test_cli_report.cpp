#include <cmath>
#include <filesystem>
#include <sstream>

#include "doctest.h"

#include "heatlab/cli.hpp"
#include "heatlab/error.hpp"
#include "heatlab/generators.hpp"
#include "heatlab/report.hpp"

using namespace heatlab;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out, err;
};

Run heatlab_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "heatlab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("heatlab_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("canonical json") {
  nlohmann::json j{{"b", 1}, {"a", {{"z", 0.1}, {"y", nullptr}}}, {"c", std::nan("")}, {"d", -INFINITY},
                   {"e", {1, 2.5, "s"}}, {"f", true}};
  CHECK(canonical_json(j) == R"({"a":{"y":null,"z":0.10000000000000001},"b":1,"c":null,"d":null,"e":[1,2.5,"s"],"f":true})");
  CHECK(canonical_json(nlohmann::json::parse(canonical_json(j))) == canonical_json(j));
  CHECK(canonical_json(nlohmann::json(1.0 / 3.0)) == "0.33333333333333331");
  CHECK(canonical_json(nlohmann::json("q\"\n")) == "\"q\\\"\\n\"");
}

TEST_CASE("digests") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  VerifierConfig a, b;
  CHECK(config_digest(a) == config_digest(b));
  CHECK(config_digest(a).size() == 16);
  b.q = 1.0 / 32;
  CHECK(config_digest(a) != config_digest(b));
}

TEST_CASE("report csv round trip") {
  CellResult c;
  c.condition = "harnack";
  c.x = 12;
  c.R = 8;
  c.value = 1.0 / 3.0;
  c.aux = {{"z", 40}, {"residual", 1e-17}};
  CellResult s = c;
  s.skipped = true;
  s.note = "ball reaches the truncation set, really";
  s.value = INFINITY;
  ConditionReport r;
  r.name = "harnack";
  r.samples = {c, s};
  auto text = report_csv({r});
  CHECK(text.rfind("condition,x,R,n,value,skipped,note,aux\n", 0) == 0);
  auto back = read_report_csv(text);
  REQUIRE(back.size() == 2);
  CHECK(back[0].value == c.value);
  CHECK(back[0].aux.at("residual") == 1e-17);
  CHECK(back[0].aux.at("z") == 40);
  CHECK(back[1].skipped);
  CHECK(back[1].note == s.note);
  CHECK(std::isinf(back[1].value));
  CHECK_THROWS_AS(report_csv({}), Error);
  CHECK_THROWS_AS(read_report_csv("nonsense\n1,2\n"), Error);
}

TEST_CASE("verify document and markdown") {
  auto g = lattice(2, 33);
  VerifierConfig cfg;
  cfg.radii = {4, 8};
  cfg.threads = 1;
  auto outcome = verify(g, {"vd", "h", "gf"}, cfg);
  auto doc = verify_document("grid.edges", cfg, outcome);
  CHECK(doc["graph"] == "grid.edges");
  CHECK(doc["config_digest"] == config_digest(cfg));
  CHECK(doc.contains("coherence"));
  auto reports = reports_from_document(doc);
  CHECK(reports.size() == outcome.reports.size());
  auto md = report_markdown(doc);
  CHECK(md.find("harnack") != std::string::npos);
  CHECK(md.find("g(F)") != std::string::npos);
  CHECK(md.find("| ") != std::string::npos);
  nlohmann::json empty{{"conditions", nlohmann::json::array()}};
  CHECK_THROWS_AS(reports_from_document(empty), Error);
}

TEST_CASE("command line end to end") {
  TempDir tmp;
  std::string graph = tmp / "g.edges", rep = tmp / "report.json", csv = tmp / "rep.csv";
  auto gen = heatlab_cli({"generate", "--family", "lattice", "--dim", "2", "--side", "33", "--out", graph});
  REQUIRE(gen.code == 0);
  CHECK(fs::exists(graph));

  auto ex = heatlab_cli({"compute", "exittime", "--graph", graph, "--center", "544", "--R", "4"});
  REQUIRE(ex.code == 0);
  auto rec = nlohmann::json::parse(ex.out);
  CHECK(rec["quantity"] == "exittime");
  CHECK(rec["inputs"]["R"] == 4);
  CHECK(rec["value"].get<double>() == doctest::Approx(mean_exit_time(lattice(2, 33), 544, 4).at_center));

  auto res = heatlab_cli({"compute", "resistance", "--graph", graph, "--center", "544", "--r", "1", "--R", "4"});
  REQUIRE(res.code == 0);
  CHECK(nlohmann::json::parse(res.out)["value"].get<double>() > 0);
  auto kern = heatlab_cli({"compute", "kernel", "--graph", graph, "--source", "544", "--n", "2"});
  REQUIRE(kern.code == 0);
  CHECK(kern.out.rfind("vertex,value\n", 0) == 0);

  auto ver = heatlab_cli({"verify", "--graph", graph, "--conditions", "vd,h", "--radii", "4,8", "--out", rep,
                          "--csv", csv, "--threads", "1"});
  REQUIRE(ver.code == 0);
  CHECK(ver.out.find("vd: holds-stably") != std::string::npos);
  CHECK(fs::exists(rep + ".manifest.json"));
  auto manifest = nlohmann::json::parse(read_text(rep + ".manifest.json"));
  CHECK(manifest["subcommand"] == "verify");
  auto doc = nlohmann::json::parse(read_text(rep));
  CHECK(manifest["config_digest"] == doc["config_digest"]);

  // The same inputs give byte-identical documents.
  std::string rep2 = tmp / "report2.json";
  REQUIRE(heatlab_cli({"verify", "--graph", graph, "--conditions", "vd,h", "--radii", "4,8", "--out", rep2,
                       "--threads", "1"})
              .code == 0);
  CHECK(read_text(rep) == read_text(rep2));

  auto md = heatlab_cli({"report", "--in", rep, "--format", "md"});
  REQUIRE(md.code == 0);
  CHECK(md.out.find("harnack") != std::string::npos);
  auto rcsv = heatlab_cli({"report", "--in", rep, "--format", "csv"});
  REQUIRE(rcsv.code == 0);
  CHECK(rcsv.out == read_text(csv));
  CHECK(heatlab_cli({"report", "--in", rep, "--format", "pdf"}).code == 2);

  auto mc = heatlab_cli({"mc", "exittime", "--graph", graph, "--x", "544", "--R", "1", "--trials", "500"});
  REQUIRE(mc.code == 0);
  CHECK(nlohmann::json::parse(mc.out)["estimate"] == 1.0);

  auto fit = heatlab_cli({"fit", "--graph", graph, "--grid", "2,4,8", "--centers", "544"});
  REQUIRE(fit.code == 0);
  CHECK(nlohmann::json::parse(fit.out)["beta"].get<double>() > 1.5);
}

TEST_CASE("exit codes") {
  TempDir tmp;
  CHECK(heatlab_cli({"verify", "--graph", tmp / "missing.edges"}).code == 2);
  CHECK(heatlab_cli({"frobnicate"}).code == 2);
  CHECK(heatlab_cli({"generate", "--family", "torus", "--out", tmp / "x"}).code == 2);
  std::string graph = tmp / "g.edges";
  REQUIRE(heatlab_cli({"generate", "--family", "lattice", "--dim", "1", "--side", "41", "--out", graph}).code == 0);
  CHECK(heatlab_cli({"compute", "exittime", "--graph", graph, "--center", "9999", "--R", "2"}).code == 2);
  CHECK(heatlab_cli({"mc", "exittime", "--graph", graph, "--x", "20", "--R", "2", "--trials", "10"}).code == 2);
  CHECK(heatlab_cli({"verify", "--graph", graph, "--radii", "8,4", "--out", tmp / "r.json"}).code == 2);

  // Every cell at these radii reaches the truncation set, so the verdict is
  // "fails"; --strict turns that into exit 1.
  std::vector<std::string> args{"verify", "--graph", graph, "--conditions", "vd", "--centers", "20",
                                "--radii", "16,32", "--out", tmp / "r.json"};
  CHECK(heatlab_cli(args).code == 0);
  args.push_back("--strict");
  auto strict = heatlab_cli(args);
  CHECK(strict.code == 1);
  CHECK(strict.out.find("vd: fails") != std::string::npos);
}
