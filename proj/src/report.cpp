#include "routeval/report.hpp"

#include <json.hpp>

#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "routeval/clip.hpp"

namespace routeval::report {

using nlohmann::json;

EvaluationReport evaluate(const graph::SpatialGraph& truth, const graph::SpatialGraph& pred,
                          const graph::SpatialGraph& roads,
                          const std::optional<geom::Polygon>& region, const EvalOptions& opts) {
    if (!(opts.threshold >= 0.0)) throw std::invalid_argument("threshold must be >= 0");
    if (opts.min_degree < 2) throw std::invalid_argument("min-degree must be >= 2");
    if (!(opts.region_dilation > 0.0)) throw std::invalid_argument("region dilation must be > 0");

    const geom::Polygon area = [&] {
        if (region) return *region;
        std::vector<geom::Point2D> pts;
        pts.reserve(truth.nodes.size() + pred.nodes.size());
        pts.insert(pts.end(), truth.nodes.begin(), truth.nodes.end());
        pts.insert(pts.end(), pred.nodes.begin(), pred.nodes.end());
        if (pts.empty())
            throw std::invalid_argument("both graphs are empty: no region can be derived");
        return geom::dilated_hull(pts, opts.region_dilation);
    }();

    const partition::SeedExtraction seeds =
        partition::extract_intersection_seeds(roads, opts.min_degree, opts.seed_merge_radius);
    partition::TIPartition part = partition::tessellate(area, seeds.seeds);

    metrics::MetricsOptions mopts;
    mopts.clip.strict = opts.strict_clip;
    mopts.clip.keep_pass_through = opts.include_pass_through && !opts.strict_clip;
    mopts.bc_weight = opts.bc_weight;
    mopts.jobs = opts.jobs;
    std::vector<metrics::PolygonMetrics> cells = metrics::polygon_metrics(truth, pred, part, mopts);

    return EvaluationReport{
        opts.method_label,
        opts.area_label,
        graph::counts(truth),
        graph::counts(pred),
        metrics::aggregate(cells, opts.exclude_empty_cells),
        metrics::edge_retrieval(truth, pred, opts.threshold, opts.edge_distance),
        std::move(cells),
        std::move(part),
        seeds.used_degree2_fallback,
        seeds.merged_nodes,
        opts,
    };
}

namespace {

json counts_json(const graph::GraphCounts& c) {
    return json{{"n_nodes", c.n_nodes}, {"n_edges", c.n_edges}, {"avg_degree", c.avg_degree}};
}

json polygon_json(const metrics::PolygonMetrics& m) {
    return json{
        {"cell_index", m.cell_index},
        {"similarity", m.similarity},
        {"components_truth", m.components_truth},
        {"components_pred", m.components_pred},
        {"mean_bc_truth", m.mean_bc_truth},
        {"mean_bc_pred", m.mean_bc_pred},
        {"pairs_truth", m.pairs_truth},
        {"pairs_pred", m.pairs_pred},
        {"nodes_truth", m.nodes_truth},
        {"nodes_pred", m.nodes_pred},
    };
}

json report_document(const EvaluationReport& rep) {
    json doc;
    doc["schema_version"] = 1;
    doc["method_label"] = rep.method_label;
    doc["area_label"] = rep.area_label;
    doc["global"] = {{"ground_truth", counts_json(rep.counts_truth)},
                     {"prediction", counts_json(rep.counts_pred)}};
    doc["local"] = {{"ground_truth",
                     {{"avg_cc", rep.aggregates.mean_components_truth},
                      {"avg_bc", rep.aggregates.mean_bc_truth}}},
                    {"prediction",
                     {{"avg_cc", rep.aggregates.mean_components_pred},
                      {"avg_bc", rep.aggregates.mean_bc_pred}}}};
    doc["relative"] = {{"precision", rep.retrieval.precision},
                       {"recall", rep.retrieval.recall},
                       {"f1", rep.retrieval.f1},
                       {"mean_traversability", rep.aggregates.mean_similarity}};
    doc["partition"] = {{"cells", rep.partition.cells.size()},
                        {"cells_scored", rep.aggregates.cells_scored},
                        {"seeds_outside_region", rep.partition.seeds_outside_region},
                        {"duplicate_seeds_merged", rep.partition.duplicate_seeds_merged},
                        {"intersection_nodes_merged", rep.intersection_nodes_merged},
                        {"used_degree2_fallback", rep.used_degree2_fallback}};
    doc["per_polygon"] = json::array();
    for (const auto& m : rep.per_polygon) doc["per_polygon"].push_back(polygon_json(m));
    const EvalOptions& c = rep.config;
    doc["config"] = {
        {"threshold", c.threshold},
        {"min_degree", c.min_degree},
        {"seed_merge_radius", c.seed_merge_radius},
        {"region_dilation", c.region_dilation},
        {"strict_clip", c.strict_clip},
        {"include_pass_through", c.include_pass_through && !c.strict_clip},
        {"exclude_empty_cells", c.exclude_empty_cells},
        {"bc_weight", c.bc_weight == graph::BcWeight::Hops ? "hops" : "length"},
        {"edge_distance",
         c.edge_distance == metrics::EdgeDistance::MinDistance ? "min_distance" : "hausdorff"},
        {"seed", c.seed},
    };
    return doc;
}

}  // namespace

std::string report_json(const EvaluationReport& rep) {
    return report_document(rep).dump(2) + "\n";
}

std::string report_csv(const EvaluationReport& rep) {
    const json flat = report_document(rep).flatten();
    std::string out = "key,value\n";
    for (const auto& [key, value] : flat.items()) {
        out += key;
        out += ',';
        out += value.dump();  // scalar serialization identical to the JSON file
        out += '\n';
    }
    return out;
}

std::string cells_geojson(const EvaluationReport& rep, const geom::LocalProjection& proj) {
    json features = json::array();
    for (std::size_t i = 0; i < rep.partition.cells.size(); ++i) {
        const geom::Polygon& cell = rep.partition.cells[i];
        json ring = json::array();
        for (std::size_t k = 0; k < cell.size(); ++k) {
            const geom::LonLat ll = proj.unproject(cell.vertex(k));
            ring.push_back(json::array({ll.lon, ll.lat}));
        }
        const geom::LonLat first = proj.unproject(cell.vertex(0));
        ring.push_back(json::array({first.lon, first.lat}));  // closed ring

        const metrics::PolygonMetrics& m = rep.per_polygon.at(i);
        const geom::LonLat seed = proj.unproject(rep.partition.seeds[i]);
        json feature = {
            {"type", "Feature"},
            {"geometry", {{"type", "Polygon"}, {"coordinates", json::array({ring})}}},
            {"properties",
             {{"cell_index", m.cell_index},
              {"similarity", m.similarity},
              {"components_truth", m.components_truth},
              {"components_pred", m.components_pred},
              {"mean_bc_truth", m.mean_bc_truth},
              {"mean_bc_pred", m.mean_bc_pred},
              {"pairs_truth", m.pairs_truth},
              {"pairs_pred", m.pairs_pred},
              {"seed_lon", seed.lon},
              {"seed_lat", seed.lat}}},
        };
        features.push_back(std::move(feature));
    }
    json doc = {{"type", "FeatureCollection"}, {"features", std::move(features)}};
    return doc.dump(2) + "\n";
}

std::string format_table(const std::string& report_json_text) {
    json doc;
    try {
        doc = json::parse(report_json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("not a readable report: ") + e.what());
    }
    if (!doc.is_object() || doc.value("schema_version", 0) != 1)
        throw std::invalid_argument("not a readable report: missing schema_version 1");

    std::ostringstream os;
    os << std::left;
    const std::string method = doc.value("method_label", std::string("?"));
    const std::string area = doc.value("area_label", std::string(""));
    os << "Evaluation: " << method;
    if (!area.empty()) os << "  (" << area << ")";
    os << "\n\n";

    auto show = [](const json& v) -> std::string {
        if (v.is_number_float()) {
            std::ostringstream s;
            s << std::fixed << std::setprecision(4) << v.get<double>();
            return s.str();
        }
        return v.dump();
    };
    auto row = [&](const std::string& name, const json& truth, const json& pred) {
        os << "  " << std::setw(22) << name << std::setw(16) << show(truth) << show(pred)
           << "\n";
    };
    os << "  " << std::setw(22) << "" << std::setw(16) << "ground truth" << "prediction\n";
    const json& g = doc.at("global");
    row("nodes", g.at("ground_truth").at("n_nodes"), g.at("prediction").at("n_nodes"));
    row("edges", g.at("ground_truth").at("n_edges"), g.at("prediction").at("n_edges"));
    row("avg degree", g.at("ground_truth").at("avg_degree"), g.at("prediction").at("avg_degree"));
    const json& l = doc.at("local");
    row("avg components", l.at("ground_truth").at("avg_cc"), l.at("prediction").at("avg_cc"));
    row("avg betweenness", l.at("ground_truth").at("avg_bc"), l.at("prediction").at("avg_bc"));
    os << "\n";
    const json& r = doc.at("relative");
    os << "  " << std::setw(22) << "edge precision" << show(r.at("precision")) << "\n";
    os << "  " << std::setw(22) << "edge recall" << show(r.at("recall")) << "\n";
    os << "  " << std::setw(22) << "edge F1" << show(r.at("f1")) << "\n";
    os << "  " << std::setw(22) << "mean traversability" << show(r.at("mean_traversability"))
       << "\n";
    const json& p = doc.at("partition");
    os << "\n  cells: " << p.at("cells").dump() << "  scored: " << p.at("cells_scored").dump()
       << "\n";
    return os.str();
}

}  // namespace routeval::report
