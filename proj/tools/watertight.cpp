// watertight: command-line front end for the stitching pipeline.

#include <watertight/watertight.hpp>

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

namespace wt = watertight;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_error = 1;
constexpr int exit_no_intersection = 2;

struct Options {
    std::string model, out, obj, report;
    std::string reduce = "off";
    std::string keep_a = "below", keep_b = "above";
    int grid = 8;
    bool merge = false;
    wt::PipelineConfig cfg;
};

void add_pipeline_flags(CLI::App* app, Options& o) {
    app->add_option("--march-step", o.cfg.march_step, "marching step length")->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--march-tol", o.cfg.march_tol, "Newton tolerance for intersection points")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app->add_option("--points", o.cfg.points, "interpolation points along the intersection (0 = all marched points)")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    app->add_option("--samples", o.cfg.samples, "samples for gap measurement")->capture_default_str()->check(CLI::Range(2, 1000000));
}

std::vector<wt::BezierSurface> two_surfaces(const wt::ModelFile& m, const std::string& path) {
    if (m.surfaces.size() != 2)
        throw wt::Error(path + ": expected two surfaces, found " + std::to_string(m.surfaces.size()));
    return m.surfaces;
}

std::string obj_text(const std::vector<wt::MeshGroup>& groups, bool merge) {
    std::ostringstream os;
    wt::write_obj(os, groups, merge);
    return os.str();
}

int cmd_run(Options& o) {
    o.cfg.reduce = o.reduce == "on";
    o.cfg.keep_a = o.keep_a == "below" ? wt::KeepSide::below : wt::KeepSide::above;
    o.cfg.keep_b = o.keep_b == "below" ? wt::KeepSide::below : wt::KeepSide::above;
    const auto input = wt::load_model(o.model);
    const auto s = two_surfaces(input, o.model);
    const auto result = wt::run_pipeline(s[0], s[1], o.cfg);

    // Everything is computed before the first file is written.
    wt::ModelFile out;
    out.surfaces = s;
    out.intersection = result.intersection;
    out.model = result.model;
    const auto report = wt::pipeline_report(result, o.cfg, o.grid);
    out.reports = report;
    const auto model_text = wt::dump_json(wt::model_to_json(out));
    const auto mesh_text = o.obj.empty() ? std::string() : obj_text(wt::tessellate_model(result.model, o.grid), o.merge);

    wt::write_file_atomic(o.out, model_text);
    if (!o.obj.empty()) wt::write_file_atomic(o.obj, mesh_text);
    if (!o.report.empty()) wt::write_file_atomic(o.report, wt::dump_json(report));

    std::cout << "intersection points: " << result.intersection.points.size() << "\n"
              << "patches: " << result.model.set_a.patches.cells.size() << " + "
              << result.model.set_b.patches.cells.size() << "\n"
              << "pre-stitch gap (curve vs a, b): " << result.gap_c_a.max_gap << ", " << result.gap_c_b.max_gap << "\n"
              << "post-stitch gap: " << result.verified.max_gap << "\n"
              << "stitch deviation: " << result.model.deviation << "\n";
    return exit_ok;
}

int cmd_gap(Options& o) {
    const auto input = wt::load_model(o.model);
    wt::Json report{{"version", "watertight-report/1"}};
    if (input.model) {
        const auto g = wt::verify_watertight(*input.model, o.cfg.samples);
        report["stitched"] = wt::io::to_json(g);
        report["watertight"] = g.max_gap == 0.0;
        std::cout << "stitched boundary gap: " << g.max_gap << "\n";
    } else {
        const auto s = two_surfaces(input, o.model);
        const auto data = wt::compute_intersection(s[0], s[1], o.cfg);
        const auto ga = wt::measure_gap(data.curve_c, s[0], o.cfg.samples, &data.domain_curve_a);
        const auto gb = wt::measure_gap(data.curve_c, s[1], o.cfg.samples, &data.domain_curve_b);
        const auto lifted = wt::lifted_gap(data.lifted_a, data.lifted_b);
        report["config"] = wt::config_json(o.cfg);
        report["pre_stitch"] = {{"curve_vs_a", wt::io::to_json(ga)},
                                {"curve_vs_b", wt::io::to_json(gb)},
                                {"lifted", wt::io::to_json(lifted)}};
        std::cout << "pre-stitch gap (curve vs a, b): " << ga.max_gap << ", " << gb.max_gap << "\n";
    }
    wt::write_file_atomic(o.report, wt::dump_json(report));
    return exit_ok;
}

int cmd_tessellate(Options& o) {
    const auto input = wt::load_model(o.model);
    std::vector<wt::MeshGroup> groups;
    if (input.model) {
        groups = wt::tessellate_model(*input.model, o.grid);
    } else {
        for (std::size_t k = 0; k < input.surfaces.size(); ++k)
            groups.push_back({"surface_" + std::to_string(k), wt::tessellate(input.surfaces[k], o.grid)});
    }
    wt::write_file_atomic(o.obj, obj_text(groups, o.merge));
    std::cout << "groups: " << groups.size() << "\n";
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Watertight stitching of two intersecting Bezier surfaces"};
    app.require_subcommand(1);
    Options o;

    auto* run = app.add_subcommand("run", "intersect, segment, normalize and stitch two surfaces");
    run->add_option("--model", o.model, "input model file")->required()->check(CLI::ExistingFile);
    run->add_option("--out", o.out, "output model file")->required();
    run->add_option("--obj", o.obj, "output OBJ mesh");
    run->add_option("--report", o.report, "output JSON report");
    add_pipeline_flags(run, o);
    run->add_option("--fit-degree", o.cfg.fit_degree, "initial boundary polynomial degree")
        ->capture_default_str()
        ->check(CLI::Range(1, 3));
    run->add_option("--fit-tol", o.cfg.fit_tol, "boundary fit tolerance")->capture_default_str()->check(CLI::PositiveNumber);
    run->add_option("--reduce", o.reduce, "degree reduction of the shared curve")
        ->capture_default_str()
        ->check(CLI::IsMember({"on", "off"}));
    run->add_option("--reduce-tol", o.cfg.reduce_tol, "degree reduction tolerance")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    run->add_option("--keep-a", o.keep_a, "retained side of the first surface")
        ->capture_default_str()
        ->check(CLI::IsMember({"below", "above"}));
    run->add_option("--keep-b", o.keep_b, "retained side of the second surface")
        ->capture_default_str()
        ->check(CLI::IsMember({"below", "above"}));
    run->add_option("--grid", o.grid, "tessellation grid per patch")->capture_default_str()->check(CLI::Range(1, 1024));
    run->add_flag("--merge", o.merge, "merge exactly coincident mesh vertices");

    auto* gap = app.add_subcommand("gap", "measure the boundary gap of a model");
    gap->add_option("--model", o.model, "input model file")->required()->check(CLI::ExistingFile);
    gap->add_option("--report", o.report, "output JSON report")->required();
    add_pipeline_flags(gap, o);

    auto* tess = app.add_subcommand("tessellate", "export a model as an OBJ mesh");
    tess->add_option("--model", o.model, "input model file")->required()->check(CLI::ExistingFile);
    tess->add_option("--obj", o.obj, "output OBJ mesh")->required();
    tess->add_option("--grid", o.grid, "tessellation grid per patch")->capture_default_str()->check(CLI::Range(1, 1024));
    tess->add_flag("--merge", o.merge, "merge exactly coincident mesh vertices");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_error;
    }

    try {
        if (run->parsed()) return cmd_run(o);
        if (gap->parsed()) return cmd_gap(o);
        return cmd_tessellate(o);
    } catch (const wt::NoIntersectionError& e) {
        std::cerr << "watertight: " << e.what() << "\n";
        return exit_no_intersection;
    } catch (const wt::StageError& e) {
        std::cerr << "watertight: stage " << e.stage << " failed: " << e.detail << "\n";
        return exit_error;
    } catch (const std::exception& e) {
        std::cerr << "watertight: " << e.what() << "\n";
        return exit_error;
    }
}
