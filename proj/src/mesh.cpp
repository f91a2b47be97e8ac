#include "dgpnp/mesh.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

namespace dgpnp {

const char* to_string(BoundaryTag tag)
{
    switch (tag) {
        case BoundaryTag::bottom: return "bottom";
        case BoundaryTag::top: return "top";
        case BoundaryTag::left: return "left";
        case BoundaryTag::right: return "right";
    }
    return "unknown";
}

TriMesh::TriMesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles,
                 double min_shape_ratio)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles))
{
    if (vertices_.empty() || triangles_.empty()) {
        throw std::invalid_argument("TriMesh: empty vertex or triangle list");
    }
    bounds_ = {std::numeric_limits<double>::max(), std::numeric_limits<double>::lowest(),
               std::numeric_limits<double>::max(), std::numeric_limits<double>::lowest()};
    for (const auto& v : vertices_) {
        bounds_[0] = std::min(bounds_[0], v.x);
        bounds_[1] = std::max(bounds_[1], v.x);
        bounds_[2] = std::min(bounds_[2], v.y);
        bounds_[3] = std::max(bounds_[3], v.y);
    }

    maps_.resize(triangles_.size());
    diameters_.resize(triangles_.size());
    for (std::size_t e = 0; e < triangles_.size(); ++e) {
        const auto& t = triangles_[e];
        for (int v : t) {
            if (v < 0 || v >= num_vertices()) {
                throw std::invalid_argument("TriMesh: vertex index out of range");
            }
        }
        const Vec2 a = vertices_[t[0]];
        const Vec2 b = vertices_[t[1]];
        const Vec2 c = vertices_[t[2]];
        AffineMap m;
        m.origin = a;
        m.jac = {b.x - a.x, c.x - a.x, b.y - a.y, c.y - a.y};
        m.det = m.jac[0] * m.jac[3] - m.jac[1] * m.jac[2];
        if (m.det <= 0.0) {
            throw std::invalid_argument("TriMesh: triangle " + std::to_string(e) +
                                        " is degenerate or clockwise");
        }
        m.inv_jac = {m.jac[3] / m.det, -m.jac[1] / m.det, -m.jac[2] / m.det, m.jac[0] / m.det};
        maps_[e] = m;
        diameters_[e] = std::max({norm(b - a), norm(c - b), norm(a - c)});
        h_ = std::max(h_, diameters_[e]);
    }

    for (int e = 0; e < num_elements(); ++e) {
        if (inradius(e) < min_shape_ratio * diameters_[e]) {
            throw std::invalid_argument("TriMesh: element " + std::to_string(e) +
                                        " violates the shape-regularity bound");
        }
    }
    build_edges();
}

void TriMesh::build_edges()
{
    element_edges_.assign(triangles_.size(), {-1, -1, -1});
    std::map<std::pair<int, int>, int> lookup;
    for (int e = 0; e < num_elements(); ++e) {
        const auto& t = triangles_[e];
        for (int local = 0; local < 3; ++local) {
            // local edge i is opposite vertex i; traversed counterclockwise
            const int a = t[(local + 1) % 3];
            const int b = t[(local + 2) % 3];
            const auto key = std::minmax(a, b);
            auto it = lookup.find(key);
            if (it == lookup.end()) {
                Edge edge;
                edge.id = static_cast<int>(edges_.size());
                edge.vertices = {a, b};
                edge.left = e;
                const Vec2 d = vertices_[b] - vertices_[a];
                edge.length = norm(d);
                edge.normal = {d.y / edge.length, -d.x / edge.length};
                lookup.emplace(key, edge.id);
                element_edges_[e][local] = edge.id;
                edges_.push_back(edge);
            } else {
                Edge& edge = edges_[it->second];
                if (edge.right >= 0) {
                    throw std::invalid_argument("TriMesh: edge shared by more than two triangles");
                }
                edge.right = e;
                element_edges_[e][local] = edge.id;
            }
        }
    }

    const double tol = 1e-12 * std::max(bounds_[1] - bounds_[0], bounds_[3] - bounds_[2]);
    for (auto& edge : edges_) {
        if (!edge.is_boundary()) {
            interior_edges_.push_back(edge.id);
            continue;
        }
        boundary_edges_.push_back(edge.id);
        const Vec2 a = vertices_[edge.vertices[0]];
        const Vec2 b = vertices_[edge.vertices[1]];
        if (std::abs(a.y - bounds_[2]) < tol && std::abs(b.y - bounds_[2]) < tol) {
            edge.tag = BoundaryTag::bottom;
        } else if (std::abs(a.y - bounds_[3]) < tol && std::abs(b.y - bounds_[3]) < tol) {
            edge.tag = BoundaryTag::top;
        } else if (std::abs(a.x - bounds_[0]) < tol && std::abs(b.x - bounds_[0]) < tol) {
            edge.tag = BoundaryTag::left;
        } else if (std::abs(a.x - bounds_[1]) < tol && std::abs(b.x - bounds_[1]) < tol) {
            edge.tag = BoundaryTag::right;
        } else {
            throw std::invalid_argument("TriMesh: boundary edge not on the bounding rectangle");
        }
    }
}

const Edge& TriMesh::edge(int id) const
{
    if (id < 0 || id >= num_edges()) {
        throw std::invalid_argument("TriMesh: unknown edge id " + std::to_string(id));
    }
    return edges_[id];
}

Vec2 TriMesh::centroid(int e) const
{
    const auto& t = triangles_[e];
    return (1.0 / 3.0) * (vertices_[t[0]] + vertices_[t[1]] + vertices_[t[2]]);
}

double TriMesh::inradius(int e) const
{
    const auto& t = triangles_[e];
    const Vec2 a = vertices_[t[0]];
    const Vec2 b = vertices_[t[1]];
    const Vec2 c = vertices_[t[2]];
    const double perimeter = norm(b - a) + norm(c - b) + norm(a - c);
    return 2.0 * area(e) / perimeter;
}

double TriMesh::total_area() const
{
    double sum = 0.0;
    for (int e = 0; e < num_elements(); ++e) {
        sum += area(e);
    }
    return sum;
}

TriMesh build_rect_mesh(double lx, double ly, int nx, int ny, double min_shape_ratio)
{
    if (!(lx > 0.0) || !(ly > 0.0) || nx < 1 || ny < 1) {
        throw std::invalid_argument("build_rect_mesh: dimensions and cell counts must be positive");
    }
    std::vector<Vec2> vertices;
    vertices.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i <= nx; ++i) {
            vertices.push_back({lx * i / nx, ly * j / ny});
        }
    }
    const auto id = [nx](int i, int j) { return i + (nx + 1) * j; };
    std::vector<std::array<int, 3>> triangles;
    triangles.reserve(static_cast<std::size_t>(2 * nx * ny));
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    }
    return TriMesh(std::move(vertices), std::move(triangles), min_shape_ratio);
}

EdgeOrientation jump_average_orientation(const TriMesh& mesh, int edge)
{
    const Edge& e = mesh.edge(edge);
    EdgeOrientation o;
    o.left = e.left;
    if (!e.is_boundary()) {
        o.right = e.right;
    }
    o.normal = e.normal;
    return o;
}

}  // namespace dgpnp
