#pragma once

// Versioned JSON model files: surfaces plus optional intersection data,
// stitched patch sets and reports.

#include "stitching.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace watertight {

using Json = nlohmann::ordered_json;

inline constexpr const char* model_format_version = "watertight-model/1";

struct ModelFile {
    std::vector<BezierSurface> surfaces;
    std::optional<IntersectionData> intersection;
    std::optional<WatertightModel> model;  // stitched patch sets and shared boundary
    Json reports;                          // null when absent
};

// ---------------------------------------------------------------------------
// Writing

namespace io {

inline Json to_json(Point2 p) { return Json::array({p.u, p.v}); }
inline Json to_json(Point3 p) { return Json::array({p.x, p.y, p.z}); }

template <class P>
Json points_json(const std::vector<P>& pts) {
    Json a = Json::array();
    for (const auto& p : pts) a.push_back(to_json(p));
    return a;
}

inline Json to_json(const BezierSurface& s) {
    Json rows = Json::array();
    for (int i = 0; i <= s.degree_u; ++i) rows.push_back(points_json(s.row(i)));
    return {{"degree_u", s.degree_u}, {"degree_v", s.degree_v}, {"control_points", rows}};
}

template <class P>
Json to_json(const PiecewiseBezierCurve<P>& c) {
    Json segs = Json::array();
    for (const auto& s : c.segments) segs.push_back(points_json(s.control_points));
    return {{"breakpoints", c.breakpoints}, {"segments", segs}};
}

inline Json to_json(const GapReport& g) {
    return {{"max_gap", g.max_gap},
            {"rms_gap", g.rms_gap},
            {"sample_count", g.sample_count},
            {"worst_location", to_json(g.worst_location)},
            {"flagged_samples", g.flagged_samples}};
}

inline Json to_json(const IntersectionData& d) {
    Json pts = Json::array();
    for (const auto& p : d.points)
        pts.push_back({{"position", to_json(p.position)},
                       {"params_a", to_json(p.params_a)},
                       {"params_b", to_json(p.params_b)},
                       {"residual_a", p.residual_a},
                       {"residual_b", p.residual_b}});
    return {{"points", pts},
            {"curve_c", to_json(d.curve_c)},
            {"domain_curve_a", to_json(d.domain_curve_a)},
            {"domain_curve_b", to_json(d.domain_curve_b)},
            {"lifted_a", points_json(d.lifted_a)},
            {"lifted_b", points_json(d.lifted_b)}};
}

inline Json to_json(const DomainCell& c) {
    Json j{{"kind", c.kind == CellKind::rectangle ? "rectangle" : "trapezoid"},
           {"bounds", {c.u0, c.u1, c.v0, c.v1}},
           {"on_trim", c.on_trim},
           {"axis", to_string(c.axis)},
           {"keep", to_string(c.keep)},
           {"params", {c.param0, c.param1}},
           {"breakpoints", {c.breakpoint0, c.breakpoint1}},
           {"edge_start", to_json(c.edge_start)},
           {"edge_end", to_json(c.edge_end)},
           {"trim_edge", edge_name(c.trim_edge)},
           {"fit_residual", c.fit_residual}};
    j["case"] = c.trapezoid_case ? Json{{"id", c.trapezoid_case->case_id},
                                        {"rotation", c.trapezoid_case->rotation_quarter_turns}}
                                 : Json();
    j["boundary_fn"] = c.boundary_fn ? Json(c.boundary_fn->coefficients()) : Json();
    return j;
}

inline Json to_json(const PatchSet& s) {
    Json cells = Json::array(), patches = Json::array(), order = Json::array();
    for (const auto& c : s.patches.cells) cells.push_back(to_json(c));
    for (const auto& p : s.patches.patches) patches.push_back(to_json(p));
    for (const auto& e : s.boundary_order)
        order.push_back({{"patch", e.patch},
                         {"edge", edge_name(e.curved_edge)},
                         {"forward", e.forward},
                         {"params", {e.param0, e.param1}}});
    return {{"cells", cells}, {"patches", patches}, {"boundary_order", order}};
}

}  // namespace io

inline Json model_to_json(const ModelFile& m) {
    Json j;
    j["version"] = model_format_version;
    Json surfaces = Json::array();
    for (const auto& s : m.surfaces) surfaces.push_back(io::to_json(s));
    j["surfaces"] = surfaces;
    if (m.intersection) j["intersection"] = io::to_json(*m.intersection);
    if (m.model) {
        Json shared = Json::array();
        for (const auto& c : m.model->shared_boundary) shared.push_back(io::points_json(c.control_points));
        j["patch_sets"] = {{"a", io::to_json(m.model->set_a)},
                           {"b", io::to_json(m.model->set_b)},
                           {"shared_boundary", shared}};
    }
    if (!m.reports.is_null()) j["reports"] = m.reports;
    return j;
}

/// Writes `text` next to `path` and renames it into place.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& text) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw Error("cannot open " + tmp.string() + " for writing");
        os << text;
        os.flush();
        if (!os) throw Error("write to " + tmp.string() + " failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw Error("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
    }
}

namespace io {

inline void dump_compact(const Json& j, std::string& out, int indent) {
    const auto pad = [&](int n) { out.append(static_cast<std::size_t>(n), ' '); };
    const bool scalar_array =
        j.is_array() && std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
    if (j.is_primitive() || scalar_array || j.empty()) {
        out += j.dump();
        return;
    }
    if (j.is_array()) {
        out += "[\n";
        for (std::size_t k = 0; k < j.size(); ++k) {
            pad(indent + 2);
            dump_compact(j[k], out, indent + 2);
            out += k + 1 < j.size() ? ",\n" : "\n";
        }
        pad(indent);
        out += ']';
        return;
    }
    out += "{\n";
    std::size_t k = 0;
    for (const auto& [key, value] : j.items()) {
        pad(indent + 2);
        out += Json(key).dump() + ": ";
        dump_compact(value, out, indent + 2);
        out += ++k < j.size() ? ",\n" : "\n";
    }
    pad(indent);
    out += '}';
}

}  // namespace io

/// Indented JSON with scalar arrays (points, coefficient lists) kept on one line.
inline std::string dump_json(const Json& j) {
    std::string out;
    io::dump_compact(j, out, 0);
    return out + "\n";
}

inline void save_model(const std::filesystem::path& path, const ModelFile& m) {
    write_file_atomic(path, dump_json(model_to_json(m)));
}

// ---------------------------------------------------------------------------
// Reading

namespace io {

/// Line of the first character of every value, keyed by JSON path
/// (`a.b[2].c`). Assumes syntactically valid input.
class LineIndex {
public:
    explicit LineIndex(std::string_view text) : text_(text) {
        skip();
        if (pos_ < text_.size()) value("");
    }

    int line_of(std::string path) const {
        for (;;) {
            if (const auto it = lines_.find(path); it != lines_.end()) return it->second;
            if (path.empty()) return 0;
            const auto cut = path.find_last_of(".[");
            path = cut == std::string::npos ? std::string() : path.substr(0, cut);
        }
    }

private:
    void skip() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            if (text_[pos_] == '\n') ++line_;
            ++pos_;
        }
    }

    std::string string() {
        std::string out;
        ++pos_;  // opening quote
        while (pos_ < text_.size() && text_[pos_] != '"') {
            if (text_[pos_] == '\\') ++pos_;
            if (pos_ < text_.size()) out += text_[pos_++];
        }
        ++pos_;
        return out;
    }

    void value(const std::string& path) {
        lines_.emplace(path, line_);
        const char c = text_[pos_];
        if (c == '{') {
            ++pos_;
            skip();
            while (pos_ < text_.size() && text_[pos_] != '}') {
                const std::string key = string();
                skip();
                ++pos_;  // colon
                skip();
                value(path.empty() ? key : path + "." + key);
                skip();
                if (text_[pos_] == ',') ++pos_;
                skip();
            }
            ++pos_;
        } else if (c == '[') {
            ++pos_;
            skip();
            for (int k = 0; pos_ < text_.size() && text_[pos_] != ']'; ++k) {
                value(path + "[" + std::to_string(k) + "]");
                skip();
                if (text_[pos_] == ',') ++pos_;
                skip();
            }
            ++pos_;
        } else if (c == '"') {
            string();
        } else {
            while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
                   text_[pos_] != ',' && text_[pos_] != ']' && text_[pos_] != '}')
                ++pos_;
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    std::map<std::string, int> lines_;
};

/// Strict schema reader: unknown keys, missing keys and wrong types all
/// raise ParseError with the JSON path and source line.
class Reader {
public:
    explicit Reader(const LineIndex& lines) : lines_(lines) {}

    [[noreturn]] void fail(const std::string& path, const std::string& what) const {
        throw ParseError(path, lines_.line_of(path), what);
    }

    static std::string child(const std::string& path, const std::string& key) {
        return path.empty() ? key : path + "." + key;
    }
    static std::string index(const std::string& path, std::size_t k) { return path + "[" + std::to_string(k) + "]"; }

    void object(const Json& j, const std::string& path, std::initializer_list<const char*> required,
                std::initializer_list<const char*> optional = {}) const {
        if (!j.is_object()) fail(path, "expected an object");
        for (const char* k : required)
            if (!j.contains(k)) fail(child(path, k), "missing required field");
        for (const auto& [key, _] : j.items()) {
            bool known = false;
            for (const char* k : required) known = known || key == k;
            for (const char* k : optional) known = known || key == k;
            if (!known) fail(child(path, key), "unknown field");
        }
    }

    const Json& array(const Json& j, const std::string& path, std::optional<std::size_t> size = {}) const {
        if (!j.is_array()) fail(path, "expected an array");
        if (size && j.size() != *size)
            fail(path, "expected " + std::to_string(*size) + " entries, found " + std::to_string(j.size()));
        return j;
    }

    double number(const Json& j, const std::string& path) const {
        if (!j.is_number()) fail(path, "expected a number");
        return j.get<double>();
    }

    long long integer(const Json& j, const std::string& path) const {
        if (!j.is_number_integer()) fail(path, "expected an integer");
        return j.get<long long>();
    }

    bool boolean(const Json& j, const std::string& path) const {
        if (!j.is_boolean()) fail(path, "expected true or false");
        return j.get<bool>();
    }

    std::string string(const Json& j, const std::string& path) const {
        if (!j.is_string()) fail(path, "expected a string");
        return j.get<std::string>();
    }

    Point3 point3(const Json& j, const std::string& path) const {
        array(j, path, 3);
        return {number(j[0], index(path, 0)), number(j[1], index(path, 1)), number(j[2], index(path, 2))};
    }

    Point2 point2(const Json& j, const std::string& path) const {
        array(j, path, 2);
        return {number(j[0], index(path, 0)), number(j[1], index(path, 1))};
    }

    template <class P>
    std::vector<P> points(const Json& j, const std::string& path) const {
        array(j, path);
        std::vector<P> out;
        for (std::size_t k = 0; k < j.size(); ++k) {
            if constexpr (std::is_same_v<P, Point3>)
                out.push_back(point3(j[k], index(path, k)));
            else
                out.push_back(point2(j[k], index(path, k)));
        }
        return out;
    }

    std::vector<double> numbers(const Json& j, const std::string& path) const {
        array(j, path);
        std::vector<double> out;
        for (std::size_t k = 0; k < j.size(); ++k) out.push_back(number(j[k], index(path, k)));
        return out;
    }

    BezierSurface surface(const Json& j, const std::string& path) const {
        object(j, path, {"degree_u", "degree_v", "control_points"});
        const auto m = integer(j["degree_u"], child(path, "degree_u"));
        const auto n = integer(j["degree_v"], child(path, "degree_v"));
        if (m < 0 || m > 64) fail(child(path, "degree_u"), "degree out of range");
        if (n < 0 || n > 64) fail(child(path, "degree_v"), "degree out of range");
        const std::string cp = child(path, "control_points");
        const Json& rows = array(j["control_points"], cp);
        auto shape_error = [&] {
            fail(cp, "control net must be " + std::to_string(m + 1) + " x " + std::to_string(n + 1) +
                         " points for degree (" + std::to_string(m) + ", " + std::to_string(n) + ")");
        };
        if (rows.size() != static_cast<std::size_t>(m + 1)) shape_error();
        std::vector<Point3> net;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (!rows[i].is_array() || rows[i].size() != static_cast<std::size_t>(n + 1)) shape_error();
            for (std::size_t k = 0; k < rows[i].size(); ++k) net.push_back(point3(rows[i][k], index(index(cp, i), k)));
        }
        return BezierSurface(static_cast<int>(m), static_cast<int>(n), std::move(net));
    }

    template <class P>
    PiecewiseBezierCurve<P> curve(const Json& j, const std::string& path) const {
        object(j, path, {"breakpoints", "segments"});
        PiecewiseBezierCurve<P> c;
        c.breakpoints = numbers(j["breakpoints"], child(path, "breakpoints"));
        const std::string sp = child(path, "segments");
        array(j["segments"], sp);
        for (std::size_t k = 0; k < j["segments"].size(); ++k) {
            auto pts = points<P>(j["segments"][k], index(sp, k));
            if (pts.empty()) fail(index(sp, k), "segment has no control points");
            c.segments.emplace_back(std::move(pts));
        }
        try {
            c.validate();
        } catch (const Error& e) {
            fail(path, e.what());
        }
        return c;
    }

    IntersectionData intersection(const Json& j, const std::string& path) const {
        object(j, path, {"points", "curve_c", "domain_curve_a", "domain_curve_b", "lifted_a", "lifted_b"});
        IntersectionData d;
        const std::string pp = child(path, "points");
        array(j["points"], pp);
        for (std::size_t k = 0; k < j["points"].size(); ++k) {
            const Json& p = j["points"][k];
            const std::string ip = index(pp, k);
            object(p, ip, {"position", "params_a", "params_b", "residual_a", "residual_b"});
            d.points.push_back({point3(p["position"], child(ip, "position")), point2(p["params_a"], child(ip, "params_a")),
                                point2(p["params_b"], child(ip, "params_b")),
                                number(p["residual_a"], child(ip, "residual_a")),
                                number(p["residual_b"], child(ip, "residual_b"))});
        }
        d.curve_c = curve<Point3>(j["curve_c"], child(path, "curve_c"));
        d.domain_curve_a = curve<Point2>(j["domain_curve_a"], child(path, "domain_curve_a"));
        d.domain_curve_b = curve<Point2>(j["domain_curve_b"], child(path, "domain_curve_b"));
        d.lifted_a = points<Point3>(j["lifted_a"], child(path, "lifted_a"));
        d.lifted_b = points<Point3>(j["lifted_b"], child(path, "lifted_b"));
        return d;
    }

    Edge edge(const Json& j, const std::string& path) const {
        const auto s = string(j, path);
        for (Edge e : {Edge::v_min, Edge::u_max, Edge::v_max, Edge::u_min})
            if (s == edge_name(e)) return e;
        fail(path, "unknown edge '" + s + "'");
    }

    DomainCell cell(const Json& j, const std::string& path) const {
        object(j, path,
               {"kind", "bounds", "on_trim", "axis", "keep", "params", "breakpoints", "edge_start", "edge_end",
                "trim_edge", "fit_residual", "case", "boundary_fn"});
        DomainCell c;
        const auto kind = string(j["kind"], child(path, "kind"));
        if (kind != "rectangle" && kind != "trapezoid") fail(child(path, "kind"), "unknown cell kind '" + kind + "'");
        c.kind = kind == "rectangle" ? CellKind::rectangle : CellKind::trapezoid;
        const auto b = numbers(array(j["bounds"], child(path, "bounds"), 4), child(path, "bounds"));
        c.u0 = b[0], c.u1 = b[1], c.v0 = b[2], c.v1 = b[3];
        c.on_trim = boolean(j["on_trim"], child(path, "on_trim"));
        const auto axis = string(j["axis"], child(path, "axis"));
        if (axis != "u_of_v" && axis != "v_of_u") fail(child(path, "axis"), "unknown axis '" + axis + "'");
        c.axis = axis == "u_of_v" ? GraphAxis::u_of_v : GraphAxis::v_of_u;
        const auto keep = string(j["keep"], child(path, "keep"));
        if (keep != "below" && keep != "above") fail(child(path, "keep"), "unknown keep side '" + keep + "'");
        c.keep = keep == "below" ? KeepSide::below : KeepSide::above;
        const auto params = numbers(array(j["params"], child(path, "params"), 2), child(path, "params"));
        c.param0 = params[0], c.param1 = params[1];
        const std::string bp = child(path, "breakpoints");
        array(j["breakpoints"], bp, 2);
        c.breakpoint0 = static_cast<int>(integer(j["breakpoints"][0], index(bp, 0)));
        c.breakpoint1 = static_cast<int>(integer(j["breakpoints"][1], index(bp, 1)));
        c.edge_start = point2(j["edge_start"], child(path, "edge_start"));
        c.edge_end = point2(j["edge_end"], child(path, "edge_end"));
        c.trim_edge = edge(j["trim_edge"], child(path, "trim_edge"));
        c.fit_residual = number(j["fit_residual"], child(path, "fit_residual"));
        if (!j["case"].is_null()) {
            const std::string cp = child(path, "case");
            object(j["case"], cp, {"id", "rotation"});
            const auto id = integer(j["case"]["id"], child(cp, "id"));
            const auto rot = integer(j["case"]["rotation"], child(cp, "rotation"));
            if (id < 1 || id > 8) fail(child(cp, "id"), "case id must be 1..8");
            if (rot < 0 || rot > 3) fail(child(cp, "rotation"), "rotation must be 0..3");
            c.trapezoid_case = TrapezoidCase{static_cast<int>(id), static_cast<int>(rot)};
        }
        if (!j["boundary_fn"].is_null()) {
            auto coeffs = numbers(j["boundary_fn"], child(path, "boundary_fn"));
            if (coeffs.empty()) fail(child(path, "boundary_fn"), "no coefficients");
            c.boundary_fn = BoundaryPolynomial(std::move(coeffs));
        }
        if (c.kind == CellKind::trapezoid && (!c.trapezoid_case || !c.boundary_fn))
            fail(path, "trapezoid cell needs a case and a boundary_fn");
        return c;
    }

    PatchSet patch_set(const Json& j, const std::string& path) const {
        object(j, path, {"cells", "patches", "boundary_order"});
        PatchSet s;
        const std::string cp = child(path, "cells"), pp = child(path, "patches"), op = child(path, "boundary_order");
        array(j["cells"], cp);
        for (std::size_t k = 0; k < j["cells"].size(); ++k) s.patches.cells.push_back(cell(j["cells"][k], index(cp, k)));
        array(j["patches"], pp, j["cells"].size());
        for (std::size_t k = 0; k < j["patches"].size(); ++k)
            s.patches.patches.push_back(surface(j["patches"][k], index(pp, k)));
        array(j["boundary_order"], op);
        for (std::size_t k = 0; k < j["boundary_order"].size(); ++k) {
            const Json& e = j["boundary_order"][k];
            const std::string ep = index(op, k);
            object(e, ep, {"patch", "edge", "forward", "params"});
            BoundaryEntry b;
            const auto patch = integer(e["patch"], child(ep, "patch"));
            if (patch < 0 || static_cast<std::size_t>(patch) >= s.patches.patches.size())
                fail(child(ep, "patch"), "patch index out of range");
            b.patch = static_cast<std::size_t>(patch);
            b.curved_edge = edge(e["edge"], child(ep, "edge"));
            b.forward = boolean(e["forward"], child(ep, "forward"));
            const auto params = numbers(array(e["params"], child(ep, "params"), 2), child(ep, "params"));
            b.param0 = params[0], b.param1 = params[1];
            s.boundary_order.push_back(b);
        }
        return s;
    }

private:
    const LineIndex& lines_;
};

}  // namespace io

/// Parses model text; `source` names the file in diagnostics.
inline ModelFile parse_model(const std::string& text) {
    Json root;
    try {
        root = Json::parse(text);
    } catch (const Json::parse_error& e) {
        const auto upto = std::min<std::size_t>(e.byte, text.size());
        const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n'));
        throw ParseError("", line, std::string("malformed JSON: ") + e.what());
    }
    const io::LineIndex lines(text);
    const io::Reader r(lines);
    r.object(root, "", {"version", "surfaces"}, {"intersection", "patch_sets", "reports"});
    if (r.string(root["version"], "version") != model_format_version)
        r.fail("version", "unsupported version (expected " + std::string(model_format_version) + ")");

    ModelFile m;
    r.array(root["surfaces"], "surfaces");
    for (std::size_t k = 0; k < root["surfaces"].size(); ++k)
        m.surfaces.push_back(r.surface(root["surfaces"][k], io::Reader::index("surfaces", k)));
    if (root.contains("intersection")) m.intersection = r.intersection(root["intersection"], "intersection");
    if (root.contains("patch_sets")) {
        const Json& ps = root["patch_sets"];
        r.object(ps, "patch_sets", {"a", "b", "shared_boundary"});
        WatertightModel w;
        w.set_a = r.patch_set(ps["a"], "patch_sets.a");
        w.set_b = r.patch_set(ps["b"], "patch_sets.b");
        const std::string sp = "patch_sets.shared_boundary";
        r.array(ps["shared_boundary"], sp);
        for (std::size_t k = 0; k < ps["shared_boundary"].size(); ++k) {
            auto pts = r.points<Point3>(ps["shared_boundary"][k], io::Reader::index(sp, k));
            if (pts.empty()) r.fail(io::Reader::index(sp, k), "segment has no control points");
            w.shared_boundary.emplace_back(std::move(pts));
        }
        m.model = std::move(w);
    }
    if (root.contains("reports")) {
        if (!root["reports"].is_object()) r.fail("reports", "expected an object");
        m.reports = root["reports"];
    }
    return m;
}

inline ModelFile load_model(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_model(ss.str());
}

}  // namespace watertight
