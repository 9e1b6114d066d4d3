#pragma once

// Uniform tessellation of patches and OBJ export.

#include "stitching.hpp"

#include <charconv>
#include <map>
#include <ostream>
#include <set>

namespace watertight {

struct TessellationMesh {
    std::vector<Point3> vertices;
    std::vector<std::array<std::size_t, 3>> triangles;
};

struct MeshGroup {
    std::string name;
    TessellationMesh mesh;
};

/// (grid+1)^2 vertices at uniform parameters and 2 grid^2 triangles.
/// Parameters are passed as integer-ratio weight pairs so that neighbors
/// sharing an edge evaluate it identically from either side.
inline TessellationMesh tessellate(const BezierSurface& s, int grid) {
    if (grid < 1) throw ArgumentError("tessellate: grid must be at least 1");
    TessellationMesh m;
    const double g = grid;
    for (int i = 0; i <= grid; ++i)
        for (int j = 0; j <= grid; ++j)
            m.vertices.push_back(eval_surface_weighted(s, (grid - i) / g, i / g, (grid - j) / g, j / g));
    auto id = [&](int i, int j) { return static_cast<std::size_t>(i * (grid + 1) + j); };
    for (int i = 0; i < grid; ++i)
        for (int j = 0; j < grid; ++j) {
            m.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            m.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    return m;
}

/// One group per patch, surface a first.
inline std::vector<MeshGroup> tessellate_model(const WatertightModel& m, int grid) {
    std::vector<MeshGroup> groups;
    auto add = [&](const PatchSet& set, const char* tag) {
        for (std::size_t k = 0; k < set.patches.patches.size(); ++k)
            groups.push_back({std::string(tag) + "_patch_" + std::to_string(k), tessellate(set.patches.patches[k], grid)});
    };
    add(m.set_a, "a");
    add(m.set_b, "b");
    return groups;
}

struct MergedMesh {
    std::vector<Point3> vertices;
    std::vector<std::array<std::size_t, 3>> triangles;  // degenerate triangles dropped
    std::vector<std::size_t> triangle_group;
};

namespace detail {

struct PointLess {
    bool operator()(const Point3& a, const Point3& b) const {
        if (a.x != b.x) return a.x < b.x;
        if (a.y != b.y) return a.y < b.y;
        return a.z < b.z;
    }
};

}  // namespace detail

/// Merges vertices that are exactly equal; no tolerance.
inline MergedMesh merge_vertices(const std::vector<MeshGroup>& groups) {
    MergedMesh out;
    std::map<Point3, std::size_t, detail::PointLess> index;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const auto& mesh = groups[g].mesh;
        std::vector<std::size_t> remap(mesh.vertices.size());
        for (std::size_t k = 0; k < mesh.vertices.size(); ++k) {
            const auto [it, inserted] = index.try_emplace(mesh.vertices[k], out.vertices.size());
            if (inserted) out.vertices.push_back(mesh.vertices[k]);
            remap[k] = it->second;
        }
        for (const auto& t : mesh.triangles) {
            const std::array<std::size_t, 3> r{remap[t[0]], remap[t[1]], remap[t[2]]};
            if (r[0] == r[1] || r[1] == r[2] || r[0] == r[2]) continue;
            out.triangles.push_back(r);
            out.triangle_group.push_back(g);
        }
    }
    return out;
}

namespace detail {

inline void write_number(std::ostream& os, double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    os.write(buf, res.ptr - buf);
}

inline void write_vertex(std::ostream& os, const Point3& p) {
    os << "v ";
    write_number(os, p.x);
    os << ' ';
    write_number(os, p.y);
    os << ' ';
    write_number(os, p.z);
    os << '\n';
}

}  // namespace detail

/// OBJ with one `g` record per patch. With `merge`, exactly coincident
/// vertices are written once and degenerate triangles are dropped.
inline void write_obj(std::ostream& os, const std::vector<MeshGroup>& groups, bool merge) {
    os << "# watertight mesh\n";
    if (merge) {
        const auto m = merge_vertices(groups);
        for (const auto& v : m.vertices) detail::write_vertex(os, v);
        std::size_t current = groups.size();
        for (std::size_t t = 0; t < m.triangles.size(); ++t) {
            if (m.triangle_group[t] != current) {
                current = m.triangle_group[t];
                os << "g " << groups[current].name << '\n';
            }
            os << "f " << m.triangles[t][0] + 1 << ' ' << m.triangles[t][1] + 1 << ' ' << m.triangles[t][2] + 1 << '\n';
        }
        return;
    }
    std::size_t offset = 1;
    for (const auto& g : groups) {
        os << "g " << g.name << '\n';
        for (const auto& v : g.mesh.vertices) detail::write_vertex(os, v);
        for (const auto& t : g.mesh.triangles)
            os << "f " << t[0] + offset << ' ' << t[1] + offset << ' ' << t[2] + offset << '\n';
        offset += g.mesh.vertices.size();
    }
}

struct TrimAudit {
    std::size_t trim_vertices = 0;
    std::size_t one_sided_edges = 0;    // trim edges used by a single triangle
    std::size_t unshared_vertices = 0;  // trim vertices missing from one of the surfaces
};

/// Crack audit along the stitched boundary of a merged tessellation.
inline TrimAudit audit_trim(const WatertightModel& m, int grid) {
    const auto groups = tessellate_model(m, grid);
    const auto merged = merge_vertices(groups);
    const std::size_t groups_a = m.set_a.patches.patches.size();

    std::set<Point3, detail::PointLess> trim;
    auto collect = [&](const PatchSet& set) {
        for (const auto& e : set.boundary_order)
            for (int k = 0; k <= grid; ++k) trim.insert(detail::eval_entry(set, e, k, grid));
    };
    collect(m.set_a);
    collect(m.set_b);

    std::map<Point3, std::size_t, detail::PointLess> index;
    for (std::size_t k = 0; k < merged.vertices.size(); ++k) index.emplace(merged.vertices[k], k);
    std::vector<char> is_trim(merged.vertices.size(), 0), in_a(merged.vertices.size(), 0),
        in_b(merged.vertices.size(), 0);
    for (const auto& p : trim)
        if (const auto it = index.find(p); it != index.end()) is_trim[it->second] = 1;

    std::map<std::pair<std::size_t, std::size_t>, int> edge_use;
    for (std::size_t t = 0; t < merged.triangles.size(); ++t) {
        const auto& tri = merged.triangles[t];
        for (int c = 0; c < 3; ++c) {
            (merged.triangle_group[t] < groups_a ? in_a : in_b)[tri[c]] = 1;
            const std::size_t p = tri[c], q = tri[(c + 1) % 3];
            if (is_trim[p] && is_trim[q]) ++edge_use[{std::min(p, q), std::max(p, q)}];
        }
    }
    TrimAudit audit;
    audit.trim_vertices = trim.size();
    for (const auto& [edge, uses] : edge_use) audit.one_sided_edges += uses == 1;
    for (const auto& p : trim) {
        const auto it = index.find(p);
        if (it == index.end() || !in_a[it->second] || !in_b[it->second]) ++audit.unshared_vertices;
    }
    return audit;
}

}  // namespace watertight
