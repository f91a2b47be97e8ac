#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <vector>

namespace dgpnp {

struct Vec2 {
    double x{0.0};
    double y{0.0};

    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
    Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
};

inline Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
inline Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
inline Vec2 operator*(double s, Vec2 a) { return a *= s; }
inline Vec2 operator*(Vec2 a, double s) { return a *= s; }
inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }

enum class BoundaryTag { bottom, top, left, right };

inline constexpr std::array<BoundaryTag, 4> kAllBoundaryTags = {
    BoundaryTag::bottom, BoundaryTag::top, BoundaryTag::left, BoundaryTag::right};

const char* to_string(BoundaryTag tag);

/// An edge of the triangulation.
///
/// Interior edges carry `left` (E_i) and `right` (E_j) with the unit normal
/// pointing from left to right. Boundary edges have `right == -1`, an outward
/// normal and a boundary tag. Orientation is fixed when the mesh is built.
struct Edge {
    int id{-1};
    std::array<int, 2> vertices{};
    int left{-1};
    int right{-1};
    Vec2 normal{};
    double length{0.0};
    std::optional<BoundaryTag> tag{};

    [[nodiscard]] bool is_boundary() const { return right < 0; }
};

/// Affine map x = origin + J xi from the reference triangle (0,0),(1,0),(0,1).
struct AffineMap {
    Vec2 origin{};
    std::array<double, 4> jac{};      // row-major [dx/dxi dx/deta; dy/dxi dy/deta]
    std::array<double, 4> inv_jac{};  // row-major inverse
    double det{0.0};

    [[nodiscard]] Vec2 to_physical(const Vec2& xi) const
    {
        return {origin.x + jac[0] * xi.x + jac[1] * xi.y,
                origin.y + jac[2] * xi.x + jac[3] * xi.y};
    }
    [[nodiscard]] Vec2 to_reference(const Vec2& x) const
    {
        const double dx = x.x - origin.x;
        const double dy = x.y - origin.y;
        return {inv_jac[0] * dx + inv_jac[1] * dy, inv_jac[2] * dx + inv_jac[3] * dy};
    }
    /// Maps a reference gradient to physical space (J^{-T} g).
    [[nodiscard]] Vec2 push_gradient(const Vec2& g) const
    {
        return {inv_jac[0] * g.x + inv_jac[2] * g.y, inv_jac[1] * g.x + inv_jac[3] * g.y};
    }
};

/// Conforming triangulation of a rectangle with full edge topology.
/// Immutable after construction.
class TriMesh {
public:
    TriMesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles,
            double min_shape_ratio = 0.1);

    [[nodiscard]] const std::vector<Vec2>& vertices() const { return vertices_; }
    [[nodiscard]] const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
    [[nodiscard]] const std::vector<Edge>& edges() const { return edges_; }
    [[nodiscard]] const std::vector<int>& interior_edges() const { return interior_edges_; }
    [[nodiscard]] const std::vector<int>& boundary_edges() const { return boundary_edges_; }
    [[nodiscard]] const std::array<int, 3>& element_edges(int e) const { return element_edges_.at(e); }

    [[nodiscard]] int num_vertices() const { return static_cast<int>(vertices_.size()); }
    [[nodiscard]] int num_elements() const { return static_cast<int>(triangles_.size()); }
    [[nodiscard]] int num_edges() const { return static_cast<int>(edges_.size()); }

    [[nodiscard]] const Edge& edge(int id) const;
    [[nodiscard]] const AffineMap& map(int e) const { return maps_[e]; }
    [[nodiscard]] double area(int e) const { return 0.5 * std::abs(maps_[e].det); }
    [[nodiscard]] Vec2 centroid(int e) const;
    [[nodiscard]] double diameter(int e) const { return diameters_[e]; }
    [[nodiscard]] double inradius(int e) const;
    [[nodiscard]] double h() const { return h_; }
    [[nodiscard]] double total_area() const;

    /// Bounding box of the vertex set (the domain for rectangle meshes).
    [[nodiscard]] std::array<double, 4> bounds() const { return bounds_; }

private:
    void build_edges();

    std::vector<Vec2> vertices_;
    std::vector<std::array<int, 3>> triangles_;
    std::vector<AffineMap> maps_;
    std::vector<double> diameters_;
    std::vector<Edge> edges_;
    std::vector<int> interior_edges_;
    std::vector<int> boundary_edges_;
    std::vector<std::array<int, 3>> element_edges_;
    std::array<double, 4> bounds_{};  // xmin, xmax, ymin, ymax
    double h_{0.0};
};

/// Structured mesh of [0,lx] x [0,ly]: nx*ny cells, each split along the
/// (i,j)-(i+1,j+1) diagonal into two counterclockwise triangles.
TriMesh build_rect_mesh(double lx, double ly, int nx, int ny, double min_shape_ratio = 0.1);

struct EdgeOrientation {
    int left{-1};
    std::optional<int> right;
    Vec2 normal{};
};

/// Returns the fixed (E_i, E_j, n_e) triple used for jumps and averages.
EdgeOrientation jump_average_orientation(const TriMesh& mesh, int edge);

}  // namespace dgpnp
