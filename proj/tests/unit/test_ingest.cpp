#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "ccmsel/errors.hpp"
#include "ccmsel/ingest.hpp"

using namespace ccmsel;

namespace {
std::filesystem::path fixture(const char* name) {
  return std::filesystem::path(CCMSEL_FIXTURE_DIR) / name;
}
}  // namespace

TEST_SUITE("ingest") {
  TEST_CASE("symmetric rows merge") {
    const auto r = parse_shared_patient_file(fixture("shared_symmetric.csv"), {});
    REQUIRE(r.size() == 1);
    CHECK(r[0] == SharedPatientRecord{"A", "B", 3});
  }

  TEST_CASE("duplicate pairs keep the larger count") {
    std::istringstream in("npi_a,npi_b,shared_count\nA,B,2\nB,A,7\n");
    const auto r = parse_shared_patient(in, {});
    CHECK(r[0].shared_count == 7);
  }

  TEST_CASE("threshold filter") {
    IngestConfig cfg;
    cfg.threshold = 2;
    const auto r = parse_shared_patient_file(fixture("shared_threshold.csv"), cfg);
    REQUIRE(r.size() == 1);
    CHECK(r[0] == SharedPatientRecord{"A", "C", 2});
  }

  TEST_CASE("malformed row names its line") {
    try {
      parse_shared_patient_file(fixture("shared_malformed.csv"), {});
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_shared_patient_file(fixture("shared_missing_column.csv"), {}),
                    SchemaError);
    std::istringstream self("npi_a,npi_b,shared_count\nA,A,1\n");
    CHECK_THROWS_AS(parse_shared_patient(self, {}), ParseError);
  }

  TEST_CASE("provider typing") {
    const auto r = parse_provider_file(fixture("providers.csv"), {});
    REQUIRE(r.records.size() == 4);
    CHECK(r.records[0].derived_type == NodeType::Primary);
    CHECK(r.records[1].derived_type == NodeType::Specialty);
    CHECK(r.unmapped.at("Podiatry") == 1);
    CHECK(r.records[3].specialty == "Cardiology, Interventional");
    CHECK(r.unmapped_total() == 2);
    CHECK_THROWS_AS(parse_provider_file(fixture("providers_missing_state.csv"), {}),
                    SchemaError);
    bool mapped = false;
    CHECK(classify_specialty("  family PRACTICE ", {}, &mapped) == NodeType::Primary);
    CHECK(mapped);
  }

  TEST_CASE("state graph keeps in-state pairs only") {
    const auto providers = parse_provider_file(fixture("providers.csv"), {}).records;
    const auto shared = parse_shared_patient_file(fixture("shared_states.csv"), {});
    // 1-2 in WY, 2-3 crosses into CO, 1-4 in WY
    const auto g = build_state_graph(shared, providers, "WY");
    CHECK(g.node_count() == 3);
    CHECK(g.edge_count() == 2);
    CHECK(g.ids() == std::vector<std::string>{"1", "2", "4"});
    CHECK(g.types()[0] == NodeType::Primary);

    const std::vector<SharedPatientRecord> one{{"1", "2", 1}};
    const std::vector<ProviderRecord> three{{"1", "WY", "", NodeType::Primary},
                                            {"2", "WY", "", NodeType::Specialty},
                                            {"9", "CO", "", NodeType::Specialty}};
    const auto small = build_state_graph(one, three, "WY");
    CHECK(small.node_count() == 2);
    CHECK(small.edge_count() == 1);
    const std::vector<SharedPatientRecord> cross{{"1", "9", 4}};
    CHECK_THROWS_AS(build_state_graph(cross, three, "WY"), EmptyNetworkError);
    CHECK(build_state_graph(cross, three, "WY", true).edge_count() == 0);
  }

  TEST_CASE("raising the threshold never adds edges and row order is irrelevant") {
    std::mt19937_64 rng(3);
    std::vector<std::string> rows;
    for (int i = 0; i < 300; ++i) {
      const int a = int(rng() % 40), b = int(rng() % 40);
      if (a == b) continue;
      rows.push_back(std::to_string(a) + "," + std::to_string(b) + "," +
                     std::to_string(1 + rng() % 9));
    }
    std::vector<ProviderRecord> prov;
    for (int i = 0; i < 40; ++i) prov.push_back({std::to_string(i), "WY", "", NodeType::Specialty});
    auto graph_for = [&](const std::vector<std::string>& body, std::int64_t threshold) {
      std::string text = "npi_a,npi_b,shared_count\n";
      for (const auto& r : body) text += r + "\n";
      std::istringstream in(text);
      IngestConfig cfg;
      cfg.threshold = threshold;
      return build_state_graph(parse_shared_patient(in, cfg), prov, "WY", true);
    };
    std::int64_t last = graph_for(rows, 1).edge_count();
    for (std::int64_t t = 2; t <= 10; ++t) {
      const auto e = graph_for(rows, t).edge_count();
      CHECK(e <= last);
      last = e;
    }
    auto shuffled = rows;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(graph_for(rows, 3) == graph_for(shuffled, 3));
  }

  TEST_CASE("config file") {
    const auto cfg = parse_ingest_config(
        "delimiter = tab\nthreshold = 4\nprimary_specialty = Oncology\ninclude_isolates = true\n");
    CHECK(cfg.delimiter == '\t');
    CHECK(cfg.threshold == 4);
    CHECK(cfg.primary_specialties == std::vector<std::string>{"Oncology"});
    CHECK(cfg.include_isolates);
    try {
      parse_ingest_config("threshold = 1\nbogus = 2\n");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
    CHECK(split_delimited("a,\"b,c\",\"d\"\"e\"", ',') ==
          std::vector<std::string>{"a", "b,c", "d\"e"});
  }
}
