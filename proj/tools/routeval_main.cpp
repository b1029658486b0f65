// Command-line front end: generate synthetic cities, perturb networks,
// tessellate a test area, run the full evaluation, and pretty-print reports.
//
// Exit codes: 0 success, 1 unusable input (named in the message), 2 internal
// error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "routeval/geom.hpp"
#include "routeval/graph.hpp"
#include "routeval/metrics.hpp"
#include "routeval/partition.hpp"
#include "routeval/perturb.hpp"
#include "routeval/report.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace routeval;

// Thrown for problems the user can fix; carries the exit-1 message.
class InputError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open input file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write output file: " + path.string());
    out << text;
}

// Loads a graph file, converting parse/validation problems into InputError
// messages that name the file.
graph::LoadResult load_graph_file(const std::string& path, const geom::LocalProjection& proj,
                                  double snap) {
    try {
        return graph::load_geojson(read_file(path), proj, snap);
    } catch (const InputError&) {
        throw;
    } catch (const std::exception& e) {
        throw InputError(path + ": " + e.what());
    }
}

// Extends lo/hi with the coordinate bounds of a GeoJSON file, if it has any.
void merge_bounds(const std::string& path, const std::string& text, geom::LonLat& lo,
                  geom::LonLat& hi, bool& any) {
    geom::LonLat flo;
    geom::LonLat fhi;
    bool ok = false;
    try {
        ok = graph::lonlat_bounds(text, flo, fhi);
    } catch (const std::exception& e) {
        throw InputError(path + ": " + e.what());
    }
    if (!ok) return;
    if (!any) {
        lo = flo;
        hi = fhi;
        any = true;
        return;
    }
    lo.lon = std::min(lo.lon, flo.lon);
    lo.lat = std::min(lo.lat, flo.lat);
    hi.lon = std::max(hi.lon, fhi.lon);
    hi.lat = std::max(hi.lat, fhi.lat);
}

// First Polygon geometry in a GeoJSON document (bare geometry, Feature, or
// FeatureCollection), outer ring only, projected.
geom::Polygon load_region_file(const std::string& path, const geom::LocalProjection& proj) {
    const std::string text = read_file(path);
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(path + ": " + e.what());
    }

    std::function<const json*(const json&)> find_polygon = [&](const json& node) -> const json* {
        if (!node.is_object()) return nullptr;
        const std::string type = node.value("type", std::string());
        if (type == "Polygon") return &node;
        if (type == "Feature" && node.contains("geometry")) return find_polygon(node["geometry"]);
        if (type == "FeatureCollection" && node.contains("features")) {
            for (const auto& f : node["features"])
                if (const json* p = find_polygon(f)) return p;
        }
        return nullptr;
    };
    const json* polygon = find_polygon(doc);
    if (!polygon || !polygon->contains("coordinates") || !(*polygon)["coordinates"].is_array() ||
        (*polygon)["coordinates"].empty())
        throw InputError(path + ": no Polygon geometry found");

    std::vector<geom::Point2D> ring;
    for (const auto& pos : (*polygon)["coordinates"][0]) {
        if (!pos.is_array() || pos.size() < 2 || !pos[0].is_number() || !pos[1].is_number())
            throw InputError(path + ": malformed Polygon coordinates");
        ring.push_back(proj.project({pos[0].get<double>(), pos[1].get<double>()}));
    }
    if (ring.size() >= 2 && geom::almost_equal(ring.front(), ring.back()))
        ring.pop_back();  // GeoJSON rings repeat the first vertex
    try {
        return geom::Polygon(std::move(ring));
    } catch (const std::exception& e) {
        throw InputError(path + ": " + e.what());
    }
}

// ============================================================================
// Subcommands
// ============================================================================

struct GenerateArgs {
    std::size_t rows = 4;
    std::size_t cols = 4;
    double block = 100.0;
    double offset = 6.0;
    double origin_lon = 0.0;
    double origin_lat = 0.0;
    std::string out_dir;
};

int run_generate(const GenerateArgs& a) {
    const perturb::GridCity city =
        perturb::generate_grid_city({a.rows, a.cols, a.block, a.offset});
    const geom::LocalProjection proj(a.origin_lon, a.origin_lat);
    fs::create_directories(a.out_dir);
    write_file(fs::path(a.out_dir) / "roads.geojson", graph::export_geojson(city.roads, proj));
    write_file(fs::path(a.out_dir) / "walkways.geojson",
               graph::export_geojson(city.walkways, proj));
    std::cout << "wrote roads.geojson (" << city.roads.node_count() << " nodes, "
              << city.roads.edge_count() << " edges) and walkways.geojson ("
              << city.walkways.node_count() << " nodes, " << city.walkways.edge_count()
              << " edges) to " << a.out_dir << "\n";
    return 0;
}

struct PerturbArgs {
    std::string input;
    std::string kind = "drop_crossings";
    double rate = 0.3;
    double sigma = 1.0;
    double gap = 0.2;
    std::uint64_t seed = 0;
    double snap = 0.1;
    std::string out;
};

int run_perturb(const PerturbArgs& a) {
    const std::string text = read_file(a.input);
    geom::LonLat lo;
    geom::LonLat hi;
    bool any = false;
    merge_bounds(a.input, text, lo, hi, any);
    const geom::LocalProjection proj(any ? 0.5 * (lo.lon + hi.lon) : 0.0,
                                     any ? 0.5 * (lo.lat + hi.lat) : 0.0);
    const graph::SpatialGraph g = load_graph_file(a.input, proj, a.snap).graph;

    graph::SpatialGraph result;
    if (a.kind == "drop_crossings") {
        result = perturb::drop_edges(g, a.rate, a.seed, graph::EdgeClass::Crossing);
    } else if (a.kind == "drop_edges") {
        result = perturb::drop_edges(g, a.rate, a.seed);
    } else if (a.kind == "jitter") {
        result = perturb::jitter_nodes(g, a.sigma, a.seed);
    } else if (a.kind == "fragment") {
        result = perturb::fragment_edges(g, a.rate, a.gap, a.seed);
    } else {
        throw InputError("unknown perturbation kind: " + a.kind);
    }

    if (const fs::path parent = fs::path(a.out).parent_path(); !parent.empty())
        fs::create_directories(parent);
    write_file(a.out, graph::export_geojson(result, proj));
    std::cout << "wrote " << a.out << " (" << result.node_count() << " nodes, "
              << result.edge_count() << " edges; input had " << g.edge_count() << " edges)\n";
    return 0;
}

struct TessellateArgs {
    std::string roads;
    std::string region;
    int min_degree = 3;
    double merge_radius = 10.0;
    double dilation = 50.0;
    double snap = 0.1;
    std::string out;
};

int run_tessellate(const TessellateArgs& a) {
    const std::string text = read_file(a.roads);
    geom::LonLat lo;
    geom::LonLat hi;
    bool any = false;
    merge_bounds(a.roads, text, lo, hi, any);
    const geom::LocalProjection proj(any ? 0.5 * (lo.lon + hi.lon) : 0.0,
                                     any ? 0.5 * (lo.lat + hi.lat) : 0.0);
    const graph::SpatialGraph roads = load_graph_file(a.roads, proj, a.snap).graph;

    try {
        const partition::SeedExtraction seeds =
            partition::extract_intersection_seeds(roads, a.min_degree, a.merge_radius);
        const geom::Polygon region = a.region.empty()
                                         ? geom::dilated_hull(roads.nodes, a.dilation)
                                         : load_region_file(a.region, proj);
        const partition::TIPartition part = partition::tessellate(region, seeds.seeds);

        json features = json::array();
        for (std::size_t i = 0; i < part.cells.size(); ++i) {
            json ring = json::array();
            for (std::size_t k = 0; k < part.cells[i].size(); ++k) {
                const geom::LonLat ll = proj.unproject(part.cells[i].vertex(k));
                ring.push_back(json::array({ll.lon, ll.lat}));
            }
            ring.push_back(ring[0]);
            const geom::LonLat seed = proj.unproject(part.seeds[i]);
            features.push_back(
                {{"type", "Feature"},
                 {"geometry", {{"type", "Polygon"}, {"coordinates", json::array({ring})}}},
                 {"properties",
                  {{"cell_index", i}, {"seed_lon", seed.lon}, {"seed_lat", seed.lat}}}});
        }
        const json doc = {{"type", "FeatureCollection"}, {"features", features}};
        if (const fs::path parent = fs::path(a.out).parent_path(); !parent.empty())
            fs::create_directories(parent);
        write_file(a.out, doc.dump(2) + "\n");
        std::cout << "wrote " << a.out << " (" << part.cells.size() << " cells";
        if (seeds.used_degree2_fallback) std::cout << "; degree-2 fallback used";
        std::cout << ")\n";
    } catch (const InputError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw InputError(a.roads + ": " + e.what());
    }
    return 0;
}

struct EvaluateArgs {
    std::string ground_truth;
    std::string prediction;
    std::string roads;
    std::string region;
    report::EvalOptions opts;
    double snap = 0.1;
    std::string out_dir;
};

int run_evaluate(const EvaluateArgs& a) {
    const std::string truth_text = read_file(a.ground_truth);
    const std::string pred_text = read_file(a.prediction);
    const std::string roads_text = read_file(a.roads);

    geom::LonLat lo;
    geom::LonLat hi;
    bool any = false;
    merge_bounds(a.ground_truth, truth_text, lo, hi, any);
    merge_bounds(a.prediction, pred_text, lo, hi, any);
    merge_bounds(a.roads, roads_text, lo, hi, any);
    const geom::LocalProjection proj(any ? 0.5 * (lo.lon + hi.lon) : 0.0,
                                     any ? 0.5 * (lo.lat + hi.lat) : 0.0);

    auto load = [&](const std::string& path, const std::string& text) {
        try {
            return graph::load_geojson(text, proj, a.snap);
        } catch (const std::exception& e) {
            throw InputError(path + ": " + e.what());
        }
    };
    const graph::SpatialGraph truth = load(a.ground_truth, truth_text).graph;
    const graph::SpatialGraph pred = load(a.prediction, pred_text).graph;
    const graph::SpatialGraph roads = load(a.roads, roads_text).graph;

    std::optional<geom::Polygon> region;
    if (!a.region.empty()) region = load_region_file(a.region, proj);

    const report::EvaluationReport rep = [&] {
        try {
            return report::evaluate(truth, pred, roads, region, a.opts);
        } catch (const std::invalid_argument& e) {
            // Pipeline rejections trace back to the inputs (empty road graph,
            // no seeds inside the region, empty graphs).
            throw InputError("inputs " + a.ground_truth + ", " + a.prediction + ", " + a.roads +
                             ": " + e.what());
        }
    }();

    fs::create_directories(a.out_dir);
    write_file(fs::path(a.out_dir) / "report.json", report::report_json(rep));
    write_file(fs::path(a.out_dir) / "report.csv", report::report_csv(rep));
    write_file(fs::path(a.out_dir) / "cells.geojson", report::cells_geojson(rep, proj));
    std::cout << "evaluated " << rep.partition.cells.size() << " cells: mean traversability "
              << rep.aggregates.mean_similarity << ", edge F1 " << rep.retrieval.f1 << "\n"
              << "wrote report.json, report.csv, cells.geojson to " << a.out_dir << "\n";
    return 0;
}

int run_report(const std::vector<std::string>& paths) {
    for (const std::string& path : paths) {
        std::string table;
        try {
            table = report::format_table(read_file(path));
        } catch (const InputError&) {
            throw;
        } catch (const std::exception& e) {
            throw InputError(path + ": " + e.what());
        }
        if (paths.size() > 1) std::cout << path << "\n";
        std::cout << table << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Routability evaluation of pedestrian pathway networks"};
    app.require_subcommand(1);

    GenerateArgs gen;
    CLI::App* cmd_gen = app.add_subcommand("generate", "Generate a synthetic grid city");
    cmd_gen->add_option("--rows", gen.rows, "Intersections along y")->capture_default_str();
    cmd_gen->add_option("--cols", gen.cols, "Intersections along x")->capture_default_str();
    cmd_gen->add_option("--block", gen.block, "Street spacing in meters")->capture_default_str();
    cmd_gen->add_option("--sidewalk-offset", gen.offset, "Sidewalk inset in meters")
        ->capture_default_str();
    cmd_gen->add_option("--origin-lon", gen.origin_lon, "Projection origin longitude")
        ->capture_default_str();
    cmd_gen->add_option("--origin-lat", gen.origin_lat, "Projection origin latitude")
        ->capture_default_str();
    cmd_gen->add_option("--out", gen.out_dir, "Output directory")->required();

    PerturbArgs per;
    CLI::App* cmd_per = app.add_subcommand("perturb", "Degrade a network deterministically");
    cmd_per->add_option("--input", per.input, "Input GeoJSON network")->required();
    cmd_per->add_option("--kind", per.kind,
                        "One of drop_crossings, drop_edges, jitter, fragment")
        ->capture_default_str();
    cmd_per->add_option("--rate", per.rate, "Selection probability for drop/fragment kinds")
        ->capture_default_str();
    cmd_per->add_option("--sigma", per.sigma, "Gaussian displacement in meters (jitter)")
        ->capture_default_str();
    cmd_per->add_option("--gap", per.gap, "Removed length fraction (fragment)")
        ->capture_default_str();
    cmd_per->add_option("--seed", per.seed, "Random seed")->capture_default_str();
    cmd_per->add_option("--snap", per.snap, "Node snap distance in meters")
        ->capture_default_str();
    cmd_per->add_option("--out", per.out, "Output GeoJSON path")->required();

    TessellateArgs tes;
    CLI::App* cmd_tes = app.add_subcommand("tessellate", "Emit the intersection partition");
    cmd_tes->add_option("--roads", tes.roads, "Road network GeoJSON")->required();
    cmd_tes->add_option("--region", tes.region, "Region polygon GeoJSON (default: dilated hull)");
    cmd_tes->add_option("--min-degree", tes.min_degree, "Intersection degree filter")
        ->capture_default_str();
    cmd_tes->add_option("--merge-radius", tes.merge_radius,
                        "Merge radius for near-duplicate intersections, meters")
        ->capture_default_str();
    cmd_tes->add_option("--dilation", tes.dilation, "Hull clearance in meters")
        ->capture_default_str();
    cmd_tes->add_option("--snap", tes.snap, "Node snap distance in meters")
        ->capture_default_str();
    cmd_tes->add_option("--out", tes.out, "Output GeoJSON path")->required();

    EvaluateArgs ev;
    CLI::App* cmd_ev = app.add_subcommand("evaluate", "Evaluate a prediction against ground truth");
    cmd_ev->add_option("--ground-truth", ev.ground_truth, "Ground-truth network GeoJSON")
        ->required();
    cmd_ev->add_option("--prediction", ev.prediction, "Predicted network GeoJSON")->required();
    cmd_ev->add_option("--roads", ev.roads, "Road network GeoJSON (partition seeds)")->required();
    cmd_ev->add_option("--region", ev.region, "Region polygon GeoJSON (default: dilated hull)");
    cmd_ev->add_option("--threshold", ev.opts.threshold, "Edge-retrieval distance in meters")
        ->capture_default_str();
    cmd_ev->add_option("--min-degree", ev.opts.min_degree, "Intersection degree filter")
        ->capture_default_str();
    cmd_ev->add_option("--merge-radius", ev.opts.seed_merge_radius,
                       "Merge radius for near-duplicate intersections, meters")
        ->capture_default_str();
    cmd_ev->add_option("--dilation", ev.opts.region_dilation, "Hull clearance in meters")
        ->capture_default_str();
    cmd_ev->add_flag("--strict-clip", ev.opts.strict_clip,
                     "Keep only whole-inside pieces and first-crossing cuts");
    bool no_pass_through = false;
    cmd_ev->add_flag("--no-pass-through", no_pass_through,
                     "Ignore pieces that cross a cell without an interior node");
    cmd_ev->add_flag("--exclude-empty-cells", ev.opts.exclude_empty_cells,
                     "Leave cells empty in both graphs out of the traversability mean");
    bool bc_length = false;
    cmd_ev->add_flag("--bc-length-weighted", bc_length,
                     "Weight betweenness centrality by edge length instead of hops");
    bool hausdorff = false;
    cmd_ev->add_flag("--hausdorff", hausdorff,
                     "Match edges by Hausdorff distance instead of closest approach");
    cmd_ev->add_option("--jobs", ev.opts.jobs, "Worker threads (default: all cores)")
        ->capture_default_str();
    cmd_ev->add_option("--seed", ev.opts.seed, "Seed echoed into the report config")
        ->capture_default_str();
    cmd_ev->add_option("--snap", ev.snap, "Node snap distance in meters")->capture_default_str();
    cmd_ev->add_option("--method-label", ev.opts.method_label, "Row label for the report")
        ->capture_default_str();
    cmd_ev->add_option("--area-label", ev.opts.area_label, "Area label for the report");
    cmd_ev->add_option("--out", ev.out_dir, "Output directory")->required();

    std::vector<std::string> report_paths;
    CLI::App* cmd_rep = app.add_subcommand("report", "Pretty-print one or more report.json files");
    cmd_rep->add_option("paths", report_paths, "report.json files")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;  // help/version exit 0, every parse problem is an input error
    }

    try {
        if (cmd_gen->parsed()) return run_generate(gen);
        if (cmd_per->parsed()) return run_perturb(per);
        if (cmd_tes->parsed()) return run_tessellate(tes);
        if (cmd_ev->parsed()) {
            ev.opts.include_pass_through = !no_pass_through;
            ev.opts.bc_weight = bc_length ? graph::BcWeight::Length : graph::BcWeight::Hops;
            ev.opts.edge_distance = hausdorff ? metrics::EdgeDistance::Hausdorff
                                              : metrics::EdgeDistance::MinDistance;
            return run_evaluate(ev);
        }
        if (cmd_rep->parsed()) return run_report(report_paths);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
    return 2;  // unreachable: require_subcommand guarantees one branch
}
