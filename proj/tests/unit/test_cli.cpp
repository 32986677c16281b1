#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <nlohmann/json.hpp>

#include "ccmsel/graph_io.hpp"
#include "cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ccmsel;

namespace {
struct Result {
  int code;
  std::string out, err;
  json j() const { return json::parse(out); }
  json e() const { return json::parse(err); }
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("ccmsel_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string write_graph(const TempDir& dir) {
  const auto P = NodeType::Primary, S = NodeType::Specialty;
  const auto g = Graph::with_types({P, P, S, S, S, P},
                                   {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 5}, {2, 5}, {1, 4}});
  const auto path = dir / "g.json";
  std::ofstream(path) << serialize_graph(g);
  return path;
}

json strip_timings(json j) {
  if (j.contains("manifest")) j["manifest"].erase("timings");
  return j;
}

std::string fixture(const char* name) {
  return (fs::path(CCMSEL_FIXTURE_DIR) / name).string();
}
}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("stats") {
    TempDir dir;
    const auto r = run({"stats", "--graph", write_graph(dir)});
    REQUIRE(r.code == 0);
    const auto j = r.j();
    CHECK(j["n"] == 6);
    CHECK(j["edges"] == 7);
    CHECK(j["primary"] == 3);
    CHECK(j["specialty"] == 3);
    CHECK(j["manifest"]["command"] == "stats");
    CHECK(j["manifest"]["config_digest"].get<std::string>().rfind("fnv1a64:", 0) == 0);
  }

  TEST_CASE("select posteriors sum to one") {
    TempDir dir;
    const auto g = write_graph(dir);
    std::ofstream(dir / "p.conf") << "[m2]\nalpha = 2\nbeta = 3\n[m3]\nmu = 0.5\nsigma = 0.2\n";
    const auto r = run({"select", "--graph", g, "--models", "m2,m3", "--priors", dir / "p.conf",
                        "--seed", "3"});
    REQUIRE(r.code == 0);
    const auto models = r.j()["models"];
    REQUIRE(models.size() == 2);
    const double s = models[0]["posterior"].get<double>() + models[1]["posterior"].get<double>();
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(models[0]["log10_evidence"].get<double>() ==
          doctest::Approx(models[0]["log_evidence"].get<double>() / std::log(10.0)));
  }

  TEST_CASE("report degdist matches the statistic") {
    TempDir dir;
    const auto r = run({"report", "--graph", write_graph(dir), "--kind", "degdist"});
    REQUIRE(r.code == 0);
    const auto rows = r.j()["rows"];
    // degrees: 2,3,3,2,2,2 -> D[2]=4, D[3]=2
    CHECK(rows[2] == json::array({2, 4}));
    CHECK(rows[3] == json::array({3, 2}));
    const auto csv = run({"report", "--graph", write_graph(dir), "--kind", "typemix",
                          "--format", "csv"});
    CHECK(csv.out.rfind("type_a,type_b,edges\n", 0) == 0);
  }

  TEST_CASE("usage errors exit 2 with error JSON") {
    TempDir dir;
    const auto a = run({"stats", "--graph", write_graph(dir), "--bogus"});
    CHECK(a.code == 2);
    CHECK(a.e()["error"] == "usage_error");
    const auto b = run({"volume", "--graph", write_graph(dir), "--statistic", "degdist"});
    CHECK(b.code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"select", "--graph", write_graph(dir), "--models", "m2"}).code == 2);
  }

  TEST_CASE("domain errors exit 1 with error JSON") {
    TempDir dir;
    const auto r = run({"evidence", "--graph", write_graph(dir), "--model", "m5", "--seed", "1",
                        "--prior", fixture("providers.csv")});
    CHECK(r.code == 1);
    CHECK(r.e()["error"] == "parse_error");
    const auto g = Graph::with_nodes(3, {{0, 1}});
    std::ofstream(dir / "u.json") << serialize_graph(g);
    const auto m4 = run({"evidence", "--graph", dir / "u.json", "--model", "m4"});
    CHECK(m4.code == 1);
    CHECK(m4.e()["error"] == "typed_attribute_missing");
    const auto bad = run({"ingest", "--shared", fixture("shared_malformed.csv"), "--providers",
                          fixture("providers.csv"), "--state", "WY", "--out", dir / "x.json"});
    CHECK(bad.code == 1);
    CHECK(bad.e()["line"] == 3);
  }

  TEST_CASE("ingest writes a canonical graph") {
    TempDir dir;
    const auto r = run({"ingest", "--shared", fixture("shared_states.csv"), "--providers",
                        fixture("providers.csv"), "--state", "WY", "--out", dir / "wy.json"});
    REQUIRE(r.code == 0);
    const auto g = read_graph(dir / "wy.json");
    CHECK(g.node_count() == 3);
    CHECK(g.edge_count() == 2);
    std::ifstream in(dir / "wy.json");
    const auto j = json::parse(in);
    CHECK(j.contains("manifest"));
  }

  TEST_CASE("identical inputs give identical output") {
    TempDir dir;
    const auto g = write_graph(dir);
    for (const char* stat : {"degdist", "degmix"}) {
      const std::vector<std::string> args{"volume",     "--graph",  g,      "--statistic", stat,
                                          "--samples", "300",      "--seed", "5",
                                          "--oracle-limit", "0"};
      const auto a = run(args), b = run(args);
      REQUIRE(a.code == 0);
      CHECK(strip_timings(a.j()) == strip_timings(b.j()));
      auto more = args;
      more.insert(more.end(), {"--jobs", "2"});
      CHECK(strip_timings(run(more).j()) == strip_timings(a.j()));
    }
  }

  TEST_CASE("simulate and fit-prior") {
    TempDir dir;
    for (const char* st : {"AA", "BB", "CC"}) {
      const auto r = run({"simulate", "--mechanism", "er", "--n", "40", "--p",
                          st[0] == 'A' ? "0.1" : (st[0] == 'B' ? "0.15" : "0.2"), "--reps", "1",
                          "--seed", "9", "--out", dir / st});
      REQUIRE(r.code == 0);
      fs::create_directories(dir / "states");
      fs::copy_file(dir / (std::string(st) + "/rep_0000.json"),
                    dir / ("states/" + std::string(st) + ".json"));
    }
    const auto r = run({"fit-prior", "--graphs", dir / "states", "--exclude", "AA", "--model",
                        "m2", "--out", dir / "p.conf"});
    REQUIRE(r.code == 0);
    CHECK(fs::exists(dir / "p.conf"));
    std::ifstream rep(dir / "p.conf.report.json");
    const auto j = json::parse(rep);
    CHECK(j["target_state"] == "AA");
    CHECK_FALSE(j["per_state_summaries"].contains("AA"));
    std::ifstream man(dir / "AA/manifest.json");
    CHECK(json::parse(man)["manifest"]["seed"] == 9);
  }

  TEST_CASE("every subcommand documents its flags") {
    const std::map<std::string, std::vector<std::string>> flags{
        {"ingest", {"--shared", "--providers", "--state", "--threshold", "--config", "--out"}},
        {"stats", {"--graph", "--out"}},
        {"volume", {"--graph", "--statistic", "--samples", "--seed", "--jobs", "--oracle-limit"}},
        {"evidence", {"--graph", "--model", "--prior", "--seed", "--normalized-pmf", "--mc-samples"}},
        {"select", {"--graph", "--models", "--priors", "--seed"}},
        {"fit-prior", {"--graphs", "--exclude", "--model", "--max-degree", "--out", "--report"}},
        {"simulate", {"--mechanism", "--n", "--p", "--lambda", "--beta", "--reps", "--seed"}},
        {"report", {"--graph", "--kind", "--format"}}};
    for (const auto& [cmd, list] : flags) {
      const auto r = run({cmd, "--help"});
      CHECK(r.code == 0);
      for (const auto& f : list) CHECK_MESSAGE(r.out.find(f) != std::string::npos, std::string(cmd + " " + f));
    }
  }
}
