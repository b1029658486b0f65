#include "doctest.h"

#include <json.hpp>

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "routeval/perturb.hpp"
#include "routeval/report.hpp"

using namespace routeval;
using nlohmann::json;

namespace {

report::EvaluationReport self_evaluation(int jobs = 1) {
    perturb::GridCity city = perturb::generate_grid_city({4, 4, 100.0, 6.0});
    report::EvalOptions opts;
    opts.jobs = jobs;
    opts.area_label = "unit-grid";
    return report::evaluate(city.walkways, city.walkways, city.roads, std::nullopt,
                            opts);
}

}  // namespace

TEST_CASE("self-evaluation of an intact city is perfect everywhere") {
    report::EvaluationReport rep = self_evaluation();

    CHECK(rep.aggregates.mean_similarity == 1.0);
    CHECK(rep.retrieval.precision == 1.0);
    CHECK(rep.retrieval.recall == 1.0);
    CHECK(rep.retrieval.f1 == 1.0);
    CHECK(rep.counts_truth.n_nodes == rep.counts_pred.n_nodes);
    CHECK_FALSE(rep.used_degree2_fallback);
    // 4x4 intersections minus the 4 degree-2 corners.
    CHECK(rep.partition.cells.size() == 12);
    CHECK(rep.per_polygon.size() == 12);
    CHECK(rep.aggregates.cells_total == 12);
    for (const auto& cell : rep.per_polygon) {
        CHECK(cell.similarity == 1.0);
        CHECK(cell.components_truth == cell.components_pred);
        CHECK(cell.mean_bc_truth == cell.mean_bc_pred);
    }
}

TEST_CASE("evaluate validates its inputs") {
    perturb::GridCity city = perturb::generate_grid_city({3, 3, 100.0, 6.0});
    report::EvalOptions opts;
    SUBCASE("empty road graph") {
        graph::SpatialGraph empty;
        CHECK_THROWS_AS(report::evaluate(city.walkways, city.walkways, empty,
                                         std::nullopt, opts),
                        std::invalid_argument);
    }
    SUBCASE("bad options") {
        report::EvalOptions bad = opts;
        bad.threshold = -2.0;
        CHECK_THROWS_AS(report::evaluate(city.walkways, city.walkways, city.roads,
                                         std::nullopt, bad),
                        std::invalid_argument);
        bad = opts;
        bad.min_degree = 1;
        CHECK_THROWS_AS(report::evaluate(city.walkways, city.walkways, city.roads,
                                         std::nullopt, bad),
                        std::invalid_argument);
    }
    SUBCASE("region that contains no seeds") {
        geom::Polygon far({{5000, 5000}, {5100, 5000}, {5100, 5100}, {5000, 5100}});
        CHECK_THROWS_AS(report::evaluate(city.walkways, city.walkways, city.roads,
                                         far, opts),
                        std::invalid_argument);
    }
}

TEST_CASE("json document is self-consistent and canonical") {
    report::EvaluationReport rep = self_evaluation();
    std::string text = report::report_json(rep);
    json doc = json::parse(text);

    CHECK(doc["schema_version"] == 1);
    CHECK(doc["area_label"] == "unit-grid");
    CHECK(doc["method_label"] == "prediction");

    SUBCASE("aggregates equal a recomputation from the per-cell rows") {
        const json& cells = doc["per_polygon"];
        REQUIRE(cells.is_array());
        REQUIRE(cells.size() == rep.per_polygon.size());
        double sim = 0.0;
        for (const json& c : cells) sim += c["similarity"].get<double>();
        sim /= cells.size();
        CHECK(sim == doc["relative"]["mean_traversability"].get<double>());
        // Spot-check one structural echo.
        CHECK(doc["partition"]["cells"].get<std::size_t>() ==
              rep.partition.cells.size());
    }

    SUBCASE("global counts echo the input graphs") {
        CHECK(doc["global"]["ground_truth"]["n_nodes"].get<std::size_t>() ==
              rep.counts_truth.n_nodes);
        CHECK(doc["global"]["prediction"]["avg_degree"].get<double>() ==
              rep.counts_pred.avg_degree);
    }

    SUBCASE("config echoes the run parameters but not the job count") {
        CHECK(doc["config"]["threshold"].get<double>() == 4.0);
        CHECK(doc["config"]["min_degree"].get<int>() == 3);
        CHECK(doc["config"].contains("seed"));
        CHECK_FALSE(doc["config"].contains("jobs"));
    }

    SUBCASE("serialization is stable") {
        CHECK(report::report_json(rep) == text);
    }
}

TEST_CASE("csv rows mirror the json document exactly") {
    report::EvaluationReport rep = self_evaluation();
    json doc = json::parse(report::report_json(rep));
    std::string csv = report::report_csv(rep);

    std::istringstream in(csv);
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "key,value");
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        auto comma = line.find(',');
        REQUIRE(comma != std::string::npos);
        std::string key = line.substr(0, comma);
        std::string value = line.substr(comma + 1);
        const json& node = doc.at(json::json_pointer(key));
        CHECK(node.dump() == value);
        ++rows;
    }
    CHECK(rows == doc.flatten().size());
}

TEST_CASE("cells geojson carries one closed polygon per cell") {
    report::EvaluationReport rep = self_evaluation();
    geom::LocalProjection proj(11.56, 48.14);
    json doc = json::parse(report::cells_geojson(rep, proj));

    CHECK(doc["type"] == "FeatureCollection");
    REQUIRE(doc["features"].size() == rep.partition.cells.size());
    for (const json& f : doc["features"]) {
        CHECK(f["geometry"]["type"] == "Polygon");
        const json& ring = f["geometry"]["coordinates"][0];
        REQUIRE(ring.size() >= 4);
        CHECK(ring.front() == ring.back());  // closed
        CHECK(f["properties"].contains("similarity"));
        CHECK(f["properties"].contains("seed_lon"));
    }
}

TEST_CASE("format_table renders the key numbers") {
    report::EvaluationReport rep = self_evaluation();
    std::string table = report::format_table(report::report_json(rep));
    CHECK(table.find("unit-grid") != std::string::npos);
    CHECK(table.find("traversability") != std::string::npos);
    CHECK(table.find("F1") != std::string::npos);
    CHECK_THROWS(report::format_table("this is not json"));
}

TEST_CASE("reports are identical across job counts") {
    report::EvaluationReport seq = self_evaluation(1);
    report::EvaluationReport par = self_evaluation(8);
    CHECK(report::report_json(seq) == report::report_json(par));
    CHECK(report::report_csv(seq) == report::report_csv(par));
}

TEST_CASE("degraded prediction lowers the scores coherently") {
    perturb::GridCity city = perturb::generate_grid_city({6, 6, 100.0, 6.0});
    graph::SpatialGraph degraded =
        perturb::drop_edges(city.walkways, 0.3, 11, graph::EdgeClass::Crossing);
    report::EvalOptions opts;
    opts.jobs = 0;  // all cores; result must match a sequential run anyway
    report::EvaluationReport rep =
        report::evaluate(city.walkways, degraded, city.roads, std::nullopt, opts);

    CHECK(rep.aggregates.mean_similarity < 1.0);
    CHECK(rep.aggregates.mean_similarity > 0.3);
    // Every surviving edge is real, and every dropped crossing still shares
    // its corner endpoint with a kept sidewalk, so closest-approach retrieval
    // stays perfect while traversability degrades.
    CHECK(rep.retrieval.precision == 1.0);
    CHECK(rep.retrieval.f1 == 1.0);

    report::EvalOptions seq = opts;
    seq.jobs = 1;
    report::EvaluationReport rep2 =
        report::evaluate(city.walkways, degraded, city.roads, std::nullopt, seq);
    CHECK(report::report_json(rep) == report::report_json(rep2));
}
