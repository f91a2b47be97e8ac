#pragma once

#include <Eigen/Dense>
#include <memory>
#include <random>

#include "dgpnp/forms.hpp"
#include "dgpnp/mesh.hpp"
#include "dgpnp/space.hpp"

namespace dgpnp::testing {

inline std::shared_ptr<const TriMesh> rect_mesh(double lx, double ly, int nx, int ny)
{
    return std::make_shared<const TriMesh>(build_rect_mesh(lx, ly, nx, ny));
}

/// Unit square cut into four triangles around an off-centre vertex.
inline std::shared_ptr<const TriMesh> skewed_fan_mesh()
{
    std::vector<Vec2> v = {{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.37, 0.61}};
    std::vector<std::array<int, 3>> t = {{0, 1, 4}, {1, 2, 4}, {2, 3, 4}, {3, 0, 4}};
    return std::make_shared<const TriMesh>(std::move(v), std::move(t));
}

inline FieldVector random_field(const SpacePtr& s, unsigned seed)
{
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    Eigen::VectorXd c(s->size());
    for (auto& x : c) {
        x = d(rng);
    }
    return FieldVector(s, c);
}

inline Eigen::MatrixXd dense(const SparseMatrix& a) { return Eigen::MatrixXd(a); }

/// A point on an edge seen from both neighbours.
struct EdgePoint {
    Vec2 x;
    int left{-1};
    int right{-1};
    Vec2 xi_left;
    Vec2 xi_right;
};

inline EdgePoint edge_point(const TriMesh& m, int edge, double s)
{
    const Edge& e = m.edge(edge);
    const Vec2 a = m.vertices()[e.vertices[0]];
    const Vec2 b = m.vertices()[e.vertices[1]];
    EdgePoint p;
    p.x = a + s * (b - a);
    p.left = e.left;
    p.right = e.right;
    p.xi_left = m.map(e.left).to_reference(p.x);
    if (e.right >= 0) {
        p.xi_right = m.map(e.right).to_reference(p.x);
    }
    return p;
}

/// Random P_k velocity whose normal component vanishes on the whole
/// boundary: nodal values are random, then the normal component is zeroed at
/// every node lying on a boundary edge. Built in the nodal basis and mapped to
/// `vspace` by interpolation, so it works for either basis.
inline FieldVector tangential_velocity(const SpacePtr& vspace, unsigned seed)
{
    const TriMesh& m = vspace->mesh();
    const auto [xmin, xmax, ymin, ymax] = m.bounds();
    const LocalBasis& basis = vspace->basis();
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    FieldVector w(vspace);
    const double tol = 1e-12;
    for (int e = 0; e < m.num_elements(); ++e) {
        Eigen::VectorXd vx(basis.size()), vy(basis.size());
        for (int j = 0; j < basis.size(); ++j) {
            const Vec2 x = m.map(e).to_physical(basis.nodes()[j]);
            vx[j] = d(rng);
            vy[j] = d(rng);
            if (std::abs(x.x - xmin) < tol || std::abs(x.x - xmax) < tol) {
                vx[j] = 0.0;
            }
            if (std::abs(x.y - ymin) < tol || std::abs(x.y - ymax) < tol) {
                vy[j] = 0.0;
            }
        }
        w.coefficients().segment(vspace->dof(e, 0, 0), basis.size()) = basis.interpolate_nodal(vx);
        w.coefficients().segment(vspace->dof(e, 1, 0), basis.size()) = basis.interpolate_nodal(vy);
    }
    return w;
}

}  // namespace dgpnp::testing
