#include "test_support.hpp"

#include <watertight/model_io.hpp>
#include <watertight/pipeline.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

using namespace watertight;
using namespace watertight::testing;

namespace {

std::filesystem::path temp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("watertight_test_" + name);
}

ParseError parse_error_of(const std::string& text) {
    try {
        parse_model(text);
    } catch (const ParseError& e) {
        return e;
    }
    FAIL("expected a ParseError");
    throw;
}

}  // namespace

TEST_CASE("save then load a random bicubic pair", "[model_io]") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 10; ++trial) {
        ModelFile m;
        m.surfaces = {random_surface(rng, 3, 3), random_surface(rng, 3, 3)};
        // Awkward values round-trip too.
        m.surfaces[0].control_net[0] = {0.1, 1.0 / 3.0, -5e-324};
        m.surfaces[0].control_net[1] = {1e308, -0.0, 2.0 / 7.0};
        const auto path = temp_path("pair.json");
        save_model(path, m);
        CHECK_FALSE(std::filesystem::exists(path.string() + ".tmp"));
        const auto back = load_model(path);
        REQUIRE(back.surfaces.size() == 2);
        CHECK(back.surfaces[0] == m.surfaces[0]);
        CHECK(back.surfaces[1] == m.surfaces[1]);
        CHECK(std::signbit(back.surfaces[0].control_net[1].y));
        CHECK_FALSE(back.intersection);
        CHECK_FALSE(back.model);
        std::filesystem::remove(path);
    }
}

TEST_CASE("full model round trip", "[model_io]") {
    const auto r = run_pipeline(demo_paraboloid(), demo_plane(), {});
    ModelFile m;
    m.surfaces = {demo_paraboloid(), demo_plane()};
    m.intersection = r.intersection;
    m.model = r.model;
    m.reports = {{"note", "x"}, {"value", 0.1}};
    const auto text = dump_json(model_to_json(m));
    const auto back = parse_model(text);
    CHECK(back.intersection == r.intersection);
    REQUIRE(back.model);
    CHECK(back.model->set_a == r.model.set_a);
    CHECK(back.model->set_b == r.model.set_b);
    CHECK(back.model->shared_boundary == r.model.shared_boundary);
    CHECK(back.reports == m.reports);
    CHECK(dump_json(model_to_json(back)) == text);
    CHECK(verify_watertight(*back.model, 100).max_gap == 0.0);
}

TEST_CASE("schema violations name the path and line", "[model_io][errors]") {
    // A 3 x 4 net declared as degree (3, 3).
    const std::string bad_net = R"({
  "version": "watertight-model/1",
  "surfaces": [
    {
      "degree_u": 3,
      "degree_v": 3,
      "control_points": [
        [[0,0,0],[0,1,0],[0,2,0],[0,3,0]],
        [[1,0,0],[1,1,0],[1,2,0],[1,3,0]],
        [[2,0,0],[2,1,0],[2,2,0],[2,3,0]]
      ]
    }
  ]
})";
    auto e = parse_error_of(bad_net);
    CHECK(e.path == "surfaces[0].control_points");
    CHECK(e.line == 7);
    CHECK(std::string(e.what()).find("surfaces[0].control_points") != std::string::npos);

    const std::string unknown = R"({"version": "watertight-model/1",
 "surfaces": [{"degree_u": 0, "degree_v": 0, "control_points": [[[0,0,0]]],
   "colour": "red"}]})";
    e = parse_error_of(unknown);
    CHECK(e.path == "surfaces[0].colour");
    CHECK(e.line == 3);

    e = parse_error_of(R"({"version": "watertight-model/1", "surfaces": [{"degree_u": 0, "control_points": []}]})");
    CHECK(e.path == "surfaces[0].degree_v");

    e = parse_error_of(R"({"version": "watertight-model/1", "surfaces": [{"degree_u": 0, "degree_v": 0,
      "control_points": [[[0,"a",0]]]}]})");
    CHECK(e.path == "surfaces[0].control_points[0][0][1]");
    CHECK(e.line == 2);

    e = parse_error_of(R"({"version": "watertight-model/2", "surfaces": []})");
    CHECK(e.path == "version");

    e = parse_error_of(R"({"version": "watertight-model/1", "surfaces": [], "extra": 1})");
    CHECK(e.path == "extra");

    e = parse_error_of("{\n\"version\": \"watertight-model/1\",\n\"surfaces\": [,]}");
    CHECK(e.line == 3);

    e = parse_error_of(R"({"version": "watertight-model/1", "surfaces": [{"degree_u": 1.5, "degree_v": 0,
      "control_points": []}]})");
    CHECK(e.path == "surfaces[0].degree_u");
}

TEST_CASE("the shipped demo file", "[model_io][demo]") {
    const auto m = load_model(std::filesystem::path(WATERTIGHT_DATA) / "paraboloid_plane.json");
    REQUIRE(m.surfaces.size() == 2);
    CHECK(m.surfaces[0].degree_u == 2);
    CHECK(m.surfaces[0].degree_v == 2);
    CHECK(m.surfaces[1].degree_u == 1);
    CHECK(m.surfaces[1].degree_v == 1);
    CHECK(m.surfaces[0] == demo_paraboloid());
    CHECK(m.surfaces[1] == demo_plane());
}

TEST_CASE("atomic write replaces existing files", "[model_io]") {
    const auto path = temp_path("atomic.txt");
    write_file_atomic(path, "first");
    write_file_atomic(path, "second");
    std::ifstream is(path);
    std::string s;
    std::getline(is, s);
    CHECK(s == "second");
    CHECK_FALSE(std::filesystem::exists(path.string() + ".tmp"));
    std::filesystem::remove(path);
    CHECK_THROWS_AS(write_file_atomic("/nonexistent-dir/x.json", "x"), Error);
}
