#include <catch2/catch_amalgamated.hpp>

#include <json.hpp>

#include <sys/wait.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

const fs::path data_dir = WATERTIGHT_DATA;

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "watertight_cli_test";
    fs::create_directories(dir);
    return dir / name;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(WATERTIGHT_CLI) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

}  // namespace

TEST_CASE("run on the demo writes model, mesh and report", "[cli]") {
    const auto out = scratch("demo_out.json"), obj = scratch("demo.obj"), rep = scratch("demo_report.json");
    REQUIRE(run_cli("run --model " + q(data_dir / "paraboloid_plane.json") + " --out " + q(out) + " --obj " + q(obj) +
                    " --report " + q(rep) + " --merge") == 0);
    const auto report = nlohmann::json::parse(slurp(rep));
    CHECK(report["post_stitch"]["verified"]["max_gap"].get<double>() == 0.0);
    CHECK(report["pre_stitch"]["curve_vs_a"]["max_gap"].get<double>() > 0.0);
    CHECK(report["watertight"].get<bool>());
    CHECK(report["trim_audit"]["one_sided_edges"].get<int>() == 0);
    CHECK(report["intersection"]["points"].get<int>() == 8);
    CHECK(slurp(obj).find("\nf ") != std::string::npos);

    const auto model = nlohmann::json::parse(slurp(out));
    CHECK(model["version"] == "watertight-model/1");
    CHECK(model.contains("patch_sets"));

    // gap on the stitched output and tessellate it.
    const auto gap = scratch("gap.json");
    REQUIRE(run_cli("gap --model " + q(out) + " --report " + q(gap)) == 0);
    CHECK(nlohmann::json::parse(slurp(gap))["stitched"]["max_gap"].get<double>() == 0.0);
    const auto mesh = scratch("tess.obj");
    REQUIRE(run_cli("tessellate --model " + q(out) + " --obj " + q(mesh) + " --grid 2") == 0);
    CHECK(fs::file_size(mesh) > 0);
}

TEST_CASE("gap on an unstitched model reports intersection gaps", "[cli]") {
    const auto gap = scratch("gap_in.json");
    REQUIRE(run_cli("gap --model " + q(data_dir / "paraboloid_plane.json") + " --report " + q(gap)) == 0);
    const auto j = nlohmann::json::parse(slurp(gap));
    CHECK(j["pre_stitch"]["curve_vs_a"]["max_gap"].get<double>() > 0.0);
}

TEST_CASE("exit codes", "[cli]") {
    const auto out = scratch("x.json");
    fs::remove(out);
    CHECK(run_cli("run --model " + q(data_dir / "disjoint.json") + " --out " + q(out)) == 2);
    CHECK_FALSE(fs::exists(out));
    // Cubic intersection curve against linear edges: stitch stage error.
    CHECK(run_cli("run --model " + q(data_dir / "planes.json") + " --out " + q(out) + " --points 3") == 1);
    CHECK_FALSE(fs::exists(out));
    CHECK(run_cli("run --model " + q(data_dir / "planes.json") + " --out " + q(out) + " --points 3 --reduce on") == 0);
    CHECK(run_cli("run --model " + q(data_dir / "planes.json") + " --out " + q(out) + " --points 2") == 0);

    const auto bad = scratch("bad.json");
    std::ofstream(bad) << R"({"version": "watertight-model/1", "surfaces": [], "x": 1})";
    CHECK(run_cli("run --model " + q(bad) + " --out " + q(out)) == 1);
    CHECK(run_cli("run --model " + q(data_dir / "paraboloid_plane.json") + " --out " + q(out) + " --fit-degree 7") == 1);
    CHECK(run_cli("frobnicate") == 1);
    CHECK(run_cli("--help") == 0);
}

TEST_CASE("runs are deterministic", "[cli]") {
    std::string outputs[2][3];
    for (int k = 0; k < 2; ++k) {
        const auto tag = std::to_string(k);
        const auto out = scratch("det" + tag + ".json"), obj = scratch("det" + tag + ".obj"),
                   rep = scratch("det" + tag + "_report.json");
        REQUIRE(run_cli("run --model " + q(data_dir / "paraboloid_plane.json") + " --out " + q(out) + " --obj " + q(obj) +
                        " --report " + q(rep)) == 0);
        outputs[k][0] = slurp(out);
        outputs[k][1] = slurp(obj);
        outputs[k][2] = slurp(rep);
    }
    for (int f = 0; f < 3; ++f) CHECK(outputs[0][f] == outputs[1][f]);
}
