#include "dgpnp/forms.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "dgpnp/parallel.hpp"
#include "dgpnp/quadrature.hpp"

namespace dgpnp {

void FormParams::validate() const
{
    if (!(sigma > 0.0)) {
        throw std::invalid_argument("penalty parameter sigma must be positive");
    }
    if (!(mu > 0.0) || !(nu > 0.0) || !(kappa1 > 0.0) || !(kappa2 > 0.0)) {
        throw std::invalid_argument("mu, nu, kappa1 and kappa2 must be positive");
    }
}

QuadratureOrders QuadratureOrders::for_degree(int k)
{
    return {std::max(2 * k + 2, 3 * k), std::max(2 * k + 1, 3 * k)};
}

namespace {

using Triplet = Eigen::Triplet<double>;
using Triplets = std::vector<Triplet>;

QuadratureOrders resolve(const BrokenSpace& s, const std::optional<QuadratureOrders>& o)
{
    return o ? *o : QuadratureOrders::for_degree(s.degree());
}

// Shape functions tabulated at the points of one reference rule.
struct RefTable {
    QuadratureRule rule;
    std::vector<Eigen::VectorXd> values;
    std::vector<Eigen::MatrixX2d> grads;
};

RefTable make_table(const BrokenSpace& s, int degree)
{
    RefTable t;
    t.rule = triangle_rule(degree);
    const int n = s.local_size();
    for (std::size_t q = 0; q < t.rule.size(); ++q) {
        Eigen::VectorXd v(n);
        Eigen::MatrixX2d g(n, 2);
        s.basis().eval(t.rule.points[q], v, g);
        t.values.push_back(std::move(v));
        t.grads.push_back(std::move(g));
    }
    return t;
}

Eigen::Matrix2d inverse_jacobian(const AffineMap& m)
{
    Eigen::Matrix2d inv;
    inv << m.inv_jac[0], m.inv_jac[1], m.inv_jac[2], m.inv_jac[3];
    return inv;
}

struct Side {
    int elem;
    double jump;
    double avg;
};

std::vector<Side> sides_of(const Edge& e)
{
    if (e.is_boundary()) {
        return {{e.left, 1.0, 1.0}};
    }
    return {{e.left, 1.0, 0.5}, {e.right, -1.0, 0.5}};
}

struct EdgeQuad {
    std::vector<Vec2> x;
    Eigen::VectorXd w;  // weights times edge length
};

EdgeQuad edge_quad(const TriMesh& mesh, const Edge& e, const LineRule& rule)
{
    const Vec2 a = mesh.vertices()[e.vertices[0]];
    const Vec2 b = mesh.vertices()[e.vertices[1]];
    EdgeQuad q;
    q.w.resize(static_cast<Eigen::Index>(rule.size()));
    for (std::size_t i = 0; i < rule.size(); ++i) {
        q.x.push_back(a + rule.points[i] * (b - a));
        q.w[static_cast<Eigen::Index>(i)] = rule.weights[i] * e.length;
    }
    return q;
}

// Traces of all shape functions of one element at physical edge points;
// columns are quadrature points.
struct Trace {
    Eigen::MatrixXd val;
    Eigen::MatrixXd dx;
    Eigen::MatrixXd dy;

    [[nodiscard]] Eigen::MatrixXd dn(const Vec2& n) const { return n.x * dx + n.y * dy; }
};

Trace trace(const BrokenSpace& s, int elem, const std::vector<Vec2>& x)
{
    const int n = s.local_size();
    const auto nq = static_cast<Eigen::Index>(x.size());
    Trace t{Eigen::MatrixXd(n, nq), Eigen::MatrixXd(n, nq), Eigen::MatrixXd(n, nq)};
    const AffineMap& m = s.mesh().map(elem);
    const Eigen::Matrix2d inv = inverse_jacobian(m);
    Eigen::VectorXd v(n);
    Eigen::MatrixX2d g(n, 2);
    for (Eigen::Index q = 0; q < nq; ++q) {
        s.basis().eval(m.to_reference(x[static_cast<std::size_t>(q)]), v, g);
        const Eigen::MatrixX2d pg = g * inv;
        t.val.col(q) = v;
        t.dx.col(q) = pg.col(0);
        t.dy.col(q) = pg.col(1);
    }
    return t;
}

// Values of one component of a field along the edge points (row vector).
Eigen::RowVectorXd field_trace(const FieldVector& f, int comp, int elem, const std::vector<Vec2>& x)
{
    const Trace t = trace(*f.space(), elem, x);
    return f.element_block(elem, comp).transpose() * t.val;
}

void add_block(Triplets& out, int r0, int c0, const Eigen::MatrixXd& m)
{
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            out.emplace_back(r0 + static_cast<int>(i), c0 + static_cast<int>(j), m(i, j));
        }
    }
}

// Runs fn(i, triplets) for i in [0, n) on contiguous chunks and concatenates
// the per-chunk lists in chunk order, so the result does not depend on the
// worker count.
template <typename Fn>
void gather(int n, Triplets& out, Fn&& fn)
{
    const int workers = thread_count();
    std::vector<Triplets> parts(static_cast<std::size_t>(std::max(1, workers)));
    parallel_chunks(n, workers, [&](int begin, int end, int chunk) {
        for (int i = begin; i < end; ++i) {
            fn(i, parts[static_cast<std::size_t>(chunk)]);
        }
    });
    for (auto& p : parts) {
        out.insert(out.end(), p.begin(), p.end());
    }
}

SparseMatrix build(int rows, int cols, const Triplets& t)
{
    SparseMatrix m(rows, cols);
    m.setFromTriplets(t.begin(), t.end());
    m.makeCompressed();
    return m;
}

std::vector<int> edge_set(const TriMesh& mesh, bool all_edges)
{
    if (!all_edges) {
        return mesh.interior_edges();
    }
    std::vector<int> ids(static_cast<std::size_t>(mesh.num_edges()));
    for (int i = 0; i < mesh.num_edges(); ++i) {
        ids[static_cast<std::size_t>(i)] = i;
    }
    return ids;
}

// Copies a component-level matrix into both diagonal blocks.
SparseMatrix block_diagonal2(const SparseMatrix& k)
{
    Triplets t;
    t.reserve(static_cast<std::size_t>(2 * k.nonZeros()));
    const int n = static_cast<int>(k.rows());
    for (int shift : {0, n}) {
        for (Eigen::Index r = 0; r < k.outerSize(); ++r) {
            for (SparseMatrix::InnerIterator it(k, r); it; ++it) {
                t.emplace_back(static_cast<int>(it.row()) + shift, static_cast<int>(it.col()) + shift,
                               it.value());
            }
        }
    }
    return build(2 * n, 2 * n, t);
}

void require_components(const SpacePtr& s, int c, const char* who)
{
    if (!s) {
        throw std::invalid_argument(std::string(who) + ": null space");
    }
    if (s->components() != c) {
        throw std::invalid_argument(std::string(who) + (c == 1 ? ": scalar space required"
                                                               : ": vector space required"));
    }
}

void require_same_mesh(const SpacePtr& a, const SpacePtr& b, const char* who)
{
    if (a->mesh_ptr() != b->mesh_ptr()) {
        throw std::invalid_argument(std::string(who) + ": spaces live on different meshes");
    }
}

// Broken Laplacian plus the SIPG edge terms over the chosen edges. With
// `penalty_only` the consistency and symmetry terms are dropped, which gives
// the Gram matrix of the energy norm.
SparseMatrix sipg_component(const BrokenSpace& s, double sigma, bool all_edges, bool penalty_only,
                            const QuadratureOrders& orders)
{
    const TriMesh& mesh = s.mesh();
    const int n = s.local_size();
    const RefTable tab = make_table(s, orders.element);
    Triplets t;
    gather(mesh.num_elements(), t, [&](int e, Triplets& out) {
        const AffineMap& m = mesh.map(e);
        const Eigen::Matrix2d inv = inverse_jacobian(m);
        const double det = std::abs(m.det);
        Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
        for (std::size_t q = 0; q < tab.rule.size(); ++q) {
            const Eigen::MatrixX2d g = tab.grads[q] * inv;
            k.noalias() += (tab.rule.weights[q] * det) * g * g.transpose();
        }
        add_block(out, s.dof(e, 0, 0), s.dof(e, 0, 0), k);
    });
    const LineRule line = line_rule(orders.edge);
    const std::vector<int> edges = edge_set(mesh, all_edges);
    gather(static_cast<int>(edges.size()), t, [&](int i, Triplets& out) {
        const Edge& e = mesh.edge(edges[static_cast<std::size_t>(i)]);
        const EdgeQuad eq = edge_quad(mesh, e, line);
        const auto sides = sides_of(e);
        std::vector<Trace> tr;
        std::vector<Eigen::MatrixXd> dn;
        for (const Side& sd : sides) {
            tr.push_back(trace(s, sd.elem, eq.x));
            dn.push_back(tr.back().dn(e.normal));
        }
        const double pen = sigma / e.length;
        const auto W = eq.w.asDiagonal();
        for (std::size_t a = 0; a < sides.size(); ++a) {
            for (std::size_t b = 0; b < sides.size(); ++b) {
                const Side& sa = sides[a];
                const Side& sb = sides[b];
                Eigen::MatrixXd blk = (pen * sa.jump * sb.jump) * (tr[a].val * W * tr[b].val.transpose());
                if (!penalty_only) {
                    blk -= (sa.jump * sb.avg) * (tr[a].val * W * dn[b].transpose());
                    blk -= (sa.avg * sb.jump) * (dn[a] * W * tr[b].val.transpose());
                }
                add_block(out, s.dof(sa.elem, 0, 0), s.dof(sb.elem, 0, 0), blk);
            }
        }
    });
    return build(s.component_size(), s.component_size(), t);
}

// Skew-stabilized convection block for a single component. Interior edges
// only for the scalar form; all edges (trace on the boundary) for the vector form.
SparseMatrix convection_component(const FieldVector& w, const BrokenSpace& s, bool all_edges,
                                  const QuadratureOrders& orders)
{
    const TriMesh& mesh = s.mesh();
    const BrokenSpace& ws = *w.space();
    const int n = s.local_size();
    const RefTable tab = make_table(s, orders.element);
    const RefTable wtab = make_table(ws, orders.element);
    Triplets t;
    gather(mesh.num_elements(), t, [&](int e, Triplets& out) {
        const AffineMap& m = mesh.map(e);
        const Eigen::Matrix2d inv = inverse_jacobian(m);
        const double det = std::abs(m.det);
        const auto w0 = w.element_block(e, 0);
        const auto w1 = w.element_block(e, 1);
        Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
        for (std::size_t q = 0; q < tab.rule.size(); ++q) {
            const Eigen::MatrixX2d g = tab.grads[q] * inv;
            const Eigen::MatrixX2d wg = wtab.grads[q] * inv;
            const Eigen::Vector2d wv(w0.dot(wtab.values[q]), w1.dot(wtab.values[q]));
            const double div = w0.dot(wg.col(0)) + w1.dot(wg.col(1));
            const Eigen::VectorXd adv = g * wv;
            const Eigen::VectorXd& v = tab.values[q];
            k.noalias() += (tab.rule.weights[q] * det) * (v * adv.transpose() + 0.5 * div * v * v.transpose());
        }
        add_block(out, s.dof(e, 0, 0), s.dof(e, 0, 0), k);
    });
    const LineRule line = line_rule(orders.edge);
    const std::vector<int> edges = edge_set(mesh, all_edges);
    gather(static_cast<int>(edges.size()), t, [&](int i, Triplets& out) {
        const Edge& e = mesh.edge(edges[static_cast<std::size_t>(i)]);
        const EdgeQuad eq = edge_quad(mesh, e, line);
        const auto sides = sides_of(e);
        const auto nq = eq.w.size();
        Eigen::RowVectorXd wavg = Eigen::RowVectorXd::Zero(nq);
        Eigen::RowVectorXd wjump = Eigen::RowVectorXd::Zero(nq);
        std::vector<Trace> tr;
        for (const Side& sd : sides) {
            tr.push_back(trace(s, sd.elem, eq.x));
            const Eigen::RowVectorXd wn = e.normal.x * field_trace(w, 0, sd.elem, eq.x) +
                                          e.normal.y * field_trace(w, 1, sd.elem, eq.x);
            wavg += sd.avg * wn;
            wjump += sd.jump * wn;
        }
        for (std::size_t a = 0; a < sides.size(); ++a) {
            for (std::size_t b = 0; b < sides.size(); ++b) {
                const Side& sa = sides[a];
                const Side& sb = sides[b];
                const Eigen::VectorXd wt1 = -(sa.avg * sb.jump) * eq.w.cwiseProduct(wavg.transpose());
                Eigen::MatrixXd blk = tr[a].val * wt1.asDiagonal() * tr[b].val.transpose();
                if (a == b) {
                    const Eigen::VectorXd wt2 = (-0.5 * sa.avg) * eq.w.cwiseProduct(wjump.transpose());
                    blk += tr[a].val * wt2.asDiagonal() * tr[a].val.transpose();
                }
                add_block(out, s.dof(sa.elem, 0, 0), s.dof(sb.elem, 0, 0), blk);
            }
        }
    });
    return build(s.component_size(), s.component_size(), t);
}

void check_convecting_field(const FieldVector& w, const SpacePtr& s, const char* who)
{
    if (!w.space() || w.space()->components() != 2) {
        throw std::invalid_argument(std::string(who) + ": advecting field must be vector valued");
    }
    require_same_mesh(w.space(), s, who);
}

}  // namespace

AssembledOperator assemble_A1(const SpacePtr& space, double sigma, std::optional<QuadratureOrders> orders)
{
    require_components(space, 1, "assemble_A1");
    return {sipg_component(*space, sigma, false, false, resolve(*space, orders)), space, space};
}

AssembledOperator assemble_A2_component(const SpacePtr& scalar_space, double sigma,
                                        std::optional<QuadratureOrders> orders)
{
    require_components(scalar_space, 1, "assemble_A2_component");
    return {sipg_component(*scalar_space, sigma, true, false, resolve(*scalar_space, orders)),
            scalar_space, scalar_space};
}

AssembledOperator assemble_A2(const SpacePtr& vspace, double sigma, std::optional<QuadratureOrders> orders)
{
    require_components(vspace, 2, "assemble_A2");
    const SparseMatrix k = sipg_component(*vspace, sigma, true, false, resolve(*vspace, orders));
    return {block_diagonal2(k), vspace, vspace};
}

AssembledOperator assemble_energy_gram(const SpacePtr& space, double sigma, bool all_edges,
                                       std::optional<QuadratureOrders> orders)
{
    const SparseMatrix k = sipg_component(*space, sigma, all_edges, true, resolve(*space, orders));
    return {space->components() == 2 ? block_diagonal2(k) : k, space, space};
}

AssembledOperator assemble_D(const SpacePtr& vspace, const SpacePtr& pspace,
                             std::optional<QuadratureOrders> orders)
{
    require_components(vspace, 2, "assemble_D");
    require_components(pspace, 1, "assemble_D");
    require_same_mesh(vspace, pspace, "assemble_D");
    const QuadratureOrders qo = resolve(*vspace, orders);
    const TriMesh& mesh = vspace->mesh();
    const int nv = vspace->local_size();
    const int np = pspace->local_size();
    const RefTable vt = make_table(*vspace, qo.element);
    const RefTable pt = make_table(*pspace, qo.element);
    Triplets t;
    gather(mesh.num_elements(), t, [&](int e, Triplets& out) {
        const AffineMap& m = mesh.map(e);
        const Eigen::Matrix2d inv = inverse_jacobian(m);
        const double det = std::abs(m.det);
        Eigen::MatrixXd bx = Eigen::MatrixXd::Zero(np, nv);
        Eigen::MatrixXd by = Eigen::MatrixXd::Zero(np, nv);
        for (std::size_t q = 0; q < vt.rule.size(); ++q) {
            const Eigen::MatrixX2d g = vt.grads[q] * inv;
            const double wq = vt.rule.weights[q] * det;
            bx.noalias() += wq * pt.values[q] * g.col(0).transpose();
            by.noalias() += wq * pt.values[q] * g.col(1).transpose();
        }
        add_block(out, pspace->dof(e, 0, 0), vspace->dof(e, 0, 0), bx);
        add_block(out, pspace->dof(e, 0, 0), vspace->dof(e, 1, 0), by);
    });
    const LineRule line = line_rule(qo.edge);
    const std::vector<int> edges = edge_set(mesh, true);
    gather(static_cast<int>(edges.size()), t, [&](int i, Triplets& out) {
        const Edge& e = mesh.edge(edges[static_cast<std::size_t>(i)]);
        const EdgeQuad eq = edge_quad(mesh, e, line);
        const auto sides = sides_of(e);
        const auto W = eq.w.asDiagonal();
        for (const Side& sa : sides) {
            const Trace qa = trace(*pspace, sa.elem, eq.x);
            for (const Side& sb : sides) {
                const Trace vb = trace(*vspace, sb.elem, eq.x);
                const Eigen::MatrixXd base = (-sa.avg * sb.jump) * (qa.val * W * vb.val.transpose());
                add_block(out, pspace->dof(sa.elem, 0, 0), vspace->dof(sb.elem, 0, 0), e.normal.x * base);
                add_block(out, pspace->dof(sa.elem, 0, 0), vspace->dof(sb.elem, 1, 0), e.normal.y * base);
            }
        }
    });
    return {build(pspace->size(), vspace->size(), t), pspace, vspace};
}

AssembledOperator assemble_D_by_parts(const SpacePtr& vspace, const SpacePtr& pspace,
                                      std::optional<QuadratureOrders> orders)
{
    require_components(vspace, 2, "assemble_D_by_parts");
    require_components(pspace, 1, "assemble_D_by_parts");
    require_same_mesh(vspace, pspace, "assemble_D_by_parts");
    const QuadratureOrders qo = resolve(*vspace, orders);
    const TriMesh& mesh = vspace->mesh();
    const int nv = vspace->local_size();
    const int np = pspace->local_size();
    const RefTable vt = make_table(*vspace, qo.element);
    const RefTable pt = make_table(*pspace, qo.element);
    Triplets t;
    gather(mesh.num_elements(), t, [&](int e, Triplets& out) {
        const AffineMap& m = mesh.map(e);
        const Eigen::Matrix2d inv = inverse_jacobian(m);
        const double det = std::abs(m.det);
        Eigen::MatrixXd bx = Eigen::MatrixXd::Zero(np, nv);
        Eigen::MatrixXd by = Eigen::MatrixXd::Zero(np, nv);
        for (std::size_t q = 0; q < vt.rule.size(); ++q) {
            const Eigen::MatrixX2d gq = pt.grads[q] * inv;
            const double wq = vt.rule.weights[q] * det;
            bx.noalias() -= wq * gq.col(0) * vt.values[q].transpose();
            by.noalias() -= wq * gq.col(1) * vt.values[q].transpose();
        }
        add_block(out, pspace->dof(e, 0, 0), vspace->dof(e, 0, 0), bx);
        add_block(out, pspace->dof(e, 0, 0), vspace->dof(e, 1, 0), by);
    });
    // The boundary contribution of the by-parts identity cancels against the
    // boundary part of the first expression only when the edge sum here runs
    // over interior edges.
    const LineRule line = line_rule(qo.edge);
    const std::vector<int> edges = edge_set(mesh, false);
    gather(static_cast<int>(edges.size()), t, [&](int i, Triplets& out) {
        const Edge& e = mesh.edge(edges[static_cast<std::size_t>(i)]);
        const EdgeQuad eq = edge_quad(mesh, e, line);
        const auto sides = sides_of(e);
        const auto W = eq.w.asDiagonal();
        for (const Side& sa : sides) {
            const Trace qa = trace(*pspace, sa.elem, eq.x);
            for (const Side& sb : sides) {
                const Trace vb = trace(*vspace, sb.elem, eq.x);
                const Eigen::MatrixXd base = (sa.jump * sb.avg) * (qa.val * W * vb.val.transpose());
                add_block(out, pspace->dof(sa.elem, 0, 0), vspace->dof(sb.elem, 0, 0), e.normal.x * base);
                add_block(out, pspace->dof(sa.elem, 0, 0), vspace->dof(sb.elem, 1, 0), e.normal.y * base);
            }
        }
    });
    return {build(pspace->size(), vspace->size(), t), pspace, vspace};
}

AssembledOperator assemble_N1(const FieldVector& w, const SpacePtr& space,
                              std::optional<QuadratureOrders> orders)
{
    require_components(space, 1, "assemble_N1");
    check_convecting_field(w, space, "assemble_N1");
    return {convection_component(w, *space, false, resolve(*space, orders)), space, space};
}

AssembledOperator assemble_N2_component(const FieldVector& w, const SpacePtr& scalar_space,
                                        std::optional<QuadratureOrders> orders)
{
    require_components(scalar_space, 1, "assemble_N2_component");
    check_convecting_field(w, scalar_space, "assemble_N2_component");
    return {convection_component(w, *scalar_space, true, resolve(*scalar_space, orders)), scalar_space,
            scalar_space};
}

AssembledOperator assemble_N2(const FieldVector& w, const SpacePtr& vspace,
                              std::optional<QuadratureOrders> orders)
{
    require_components(vspace, 2, "assemble_N2");
    check_convecting_field(w, vspace, "assemble_N2");
    const SparseMatrix k = convection_component(w, *vspace, true, resolve(*vspace, orders));
    return {block_diagonal2(k), vspace, vspace};
}

AssembledOperator assemble_G(const FieldVector& c, double shift, const SpacePtr& space,
                             std::optional<QuadratureOrders> orders)
{
    require_components(space, 1, "assemble_G");
    if (!c.space() || c.space()->components() != 1) {
        throw std::invalid_argument("assemble_G: coefficient must be a scalar field");
    }
    require_same_mesh(c.space(), space, "assemble_G");
    const QuadratureOrders qo = resolve(*space, orders);
    const TriMesh& mesh = space->mesh();
    const int n = space->local_size();
    const RefTable tab = make_table(*space, qo.element);
    const RefTable ctab = make_table(*c.space(), qo.element);
    Triplets t;
    gather(mesh.num_elements(), t, [&](int e, Triplets& out) {
        const AffineMap& m = mesh.map(e);
        const Eigen::Matrix2d inv = inverse_jacobian(m);
        const double det = std::abs(m.det);
        const auto cb = c.element_block(e);
        Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
        for (std::size_t q = 0; q < tab.rule.size(); ++q) {
            const Eigen::MatrixX2d g = tab.grads[q] * inv;
            const double chi = cb.dot(ctab.values[q]) + shift;
            k.noalias() += (tab.rule.weights[q] * det * chi) * g * g.transpose();
        }
        add_block(out, space->dof(e, 0, 0), space->dof(e, 0, 0), k);
    });
    const LineRule line = line_rule(qo.edge);
    const std::vector<int> edges = edge_set(mesh, false);
    gather(static_cast<int>(edges.size()), t, [&](int i, Triplets& out) {
        const Edge& e = mesh.edge(edges[static_cast<std::size_t>(i)]);
        const EdgeQuad eq = edge_quad(mesh, e, line);
        const auto sides = sides_of(e);
        std::vector<Trace> tr;
        std::vector<Eigen::MatrixXd> cdn;  // chi * grad . n per side
        for (const Side& sd : sides) {
            tr.push_back(trace(*space, sd.elem, eq.x));
            const Eigen::RowVectorXd chi = field_trace(c, 0, sd.elem, eq.x).array() + shift;
            cdn.push_back(tr.back().dn(e.normal) * chi.asDiagonal());
        }
        const auto W = eq.w.asDiagonal();
        for (std::size_t a = 0; a < sides.size(); ++a) {
            for (std::size_t b = 0; b < sides.size(); ++b) {
                const Side& sa = sides[a];
                const Side& sb = sides[b];
                const Eigen::MatrixXd blk = -(sa.jump * sb.avg) * (tr[a].val * W * cdn[b].transpose()) -
                                            (sa.avg * sb.jump) * (cdn[a] * W * tr[b].val.transpose());
                add_block(out, space->dof(sa.elem, 0, 0), space->dof(sb.elem, 0, 0), blk);
            }
        }
    });
    return {build(space->size(), space->size(), t), space, space};
}

Eigen::VectorXd assemble_T_rhs(const FieldVector& charge, const FieldVector& phi, const SpacePtr& vspace,
                               std::optional<QuadratureOrders> orders)
{
    require_components(vspace, 2, "assemble_T_rhs");
    if (!charge.space() || charge.space()->components() != 1 || !phi.space() ||
        phi.space()->components() != 1) {
        throw std::invalid_argument("assemble_T_rhs: charge and potential must be scalar fields");
    }
    require_same_mesh(charge.space(), vspace, "assemble_T_rhs");
    require_same_mesh(phi.space(), vspace, "assemble_T_rhs");
    const QuadratureOrders qo = resolve(*vspace, orders);
    const TriMesh& mesh = vspace->mesh();
    const RefTable vt = make_table(*vspace, qo.element);
    const RefTable dt = make_table(*charge.space(), qo.element);
    const RefTable pt = make_table(*phi.space(), qo.element);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(vspace->size());
    // element terms write disjoint blocks, so chunks can fill rhs directly
    parallel_chunks(mesh.num_elements(), thread_count(), [&](int begin, int end, int) {
        for (int e = begin; e < end; ++e) {
            const AffineMap& m = mesh.map(e);
            const Eigen::Matrix2d inv = inverse_jacobian(m);
            const double det = std::abs(m.det);
            const auto db = charge.element_block(e);
            const auto pb = phi.element_block(e);
            Eigen::VectorXd fx = Eigen::VectorXd::Zero(vspace->local_size());
            Eigen::VectorXd fy = Eigen::VectorXd::Zero(vspace->local_size());
            for (std::size_t q = 0; q < vt.rule.size(); ++q) {
                const Eigen::MatrixX2d pg = pt.grads[q] * inv;
                const double d = db.dot(dt.values[q]) * vt.rule.weights[q] * det;
                fx += (d * pb.dot(pg.col(0))) * vt.values[q];
                fy += (d * pb.dot(pg.col(1))) * vt.values[q];
            }
            rhs.segment(vspace->dof(e, 0, 0), vspace->local_size()) -= fx;
            rhs.segment(vspace->dof(e, 1, 0), vspace->local_size()) -= fy;
        }
    });
    // edge terms touch two elements each; accumulate serially in edge order
    const LineRule line = line_rule(qo.edge);
    for (int id : mesh.interior_edges()) {
        const Edge& e = mesh.edge(id);
        const EdgeQuad eq = edge_quad(mesh, e, line);
        const auto sides = sides_of(e);
        Eigen::RowVectorXd davg = Eigen::RowVectorXd::Zero(eq.w.size());
        Eigen::RowVectorXd pjump = Eigen::RowVectorXd::Zero(eq.w.size());
        for (const Side& sd : sides) {
            davg += sd.avg * field_trace(charge, 0, sd.elem, eq.x);
            pjump += sd.jump * field_trace(phi, 0, sd.elem, eq.x);
        }
        const Eigen::VectorXd g = eq.w.cwiseProduct(davg.cwiseProduct(pjump).transpose());
        for (const Side& sa : sides) {
            const Trace va = trace(*vspace, sa.elem, eq.x);
            const Eigen::VectorXd f = sa.avg * (va.val * g);
            rhs.segment(vspace->dof(sa.elem, 0, 0), vspace->local_size()) += e.normal.x * f;
            rhs.segment(vspace->dof(sa.elem, 1, 0), vspace->local_size()) += e.normal.y * f;
        }
    }
    return rhs;
}

AssembledOperator assemble_mass(const SpacePtr& space, std::optional<QuadratureOrders> orders)
{
    const QuadratureOrders qo = resolve(*space, orders);
    const TriMesh& mesh = space->mesh();
    const int n = space->local_size();
    const RefTable tab = make_table(*space, qo.element);
    Eigen::MatrixXd ref = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t q = 0; q < tab.rule.size(); ++q) {
        ref.noalias() += tab.rule.weights[q] * tab.values[q] * tab.values[q].transpose();
    }
    Triplets t;
    t.reserve(static_cast<std::size_t>(space->components() * mesh.num_elements() * n * n));
    for (int c = 0; c < space->components(); ++c) {
        for (int e = 0; e < mesh.num_elements(); ++e) {
            add_block(t, space->dof(e, c, 0), space->dof(e, c, 0), std::abs(mesh.map(e).det) * ref);
        }
    }
    return {build(space->size(), space->size(), t), space, space};
}

namespace {

template <int Components, typename Sampler>
Eigen::VectorXd load_impl(const SpacePtr& space, Sampler&& sample, std::optional<int> quad_degree)
{
    const RefTable tab = make_table(*space, quad_degree ? *quad_degree : 2 * space->poly_degree() + 6);
    const TriMesh& mesh = space->mesh();
    const int n = space->local_size();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(space->size());
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const AffineMap& m = mesh.map(e);
        const double det = std::abs(m.det);
        for (std::size_t q = 0; q < tab.rule.size(); ++q) {
            const auto vals = sample(m.to_physical(tab.rule.points[q]));
            for (int c = 0; c < Components; ++c) {
                rhs.segment(space->dof(e, c, 0), n) += (tab.rule.weights[q] * det * vals[c]) * tab.values[q];
            }
        }
    }
    return rhs;
}

}  // namespace

Eigen::VectorXd assemble_load(const SpacePtr& space, const ScalarFunction& f, std::optional<int> quad_degree)
{
    require_components(space, 1, "assemble_load");
    return load_impl<1>(
        space, [&](const Vec2& x) { return std::array<double, 1>{f(x)}; }, quad_degree);
}

Eigen::VectorXd assemble_load(const SpacePtr& space, const VectorFunction& f, std::optional<int> quad_degree)
{
    require_components(space, 2, "assemble_load");
    return load_impl<2>(
        space,
        [&](const Vec2& x) {
            const Vec2 v = f(x);
            return std::array<double, 2>{v.x, v.y};
        },
        quad_degree);
}

MixedBcSystem assemble_A1_mixed_bc(const SpacePtr& space, double sigma, const std::vector<PotentialBc>& bcs,
                                   double mu, std::optional<QuadratureOrders> orders)
{
    require_components(space, 1, "assemble_A1_mixed_bc");
    std::set<BoundaryTag> seen;
    for (const PotentialBc& bc : bcs) {
        if (!seen.insert(bc.tag).second) {
            throw std::invalid_argument(std::string("assemble_A1_mixed_bc: boundary tag '") +
                                        to_string(bc.tag) + "' assigned twice");
        }
    }
    const QuadratureOrders qo = resolve(*space, orders);
    const TriMesh& mesh = space->mesh();
    SparseMatrix a1 = sipg_component(*space, sigma, false, false, qo);

    Triplets t;
    Eigen::VectorXd load = Eigen::VectorXd::Zero(space->size());
    const LineRule line = line_rule(qo.edge);
    const int n = space->local_size();
    for (int id : mesh.boundary_edges()) {
        const Edge& e = mesh.edge(id);
        const auto it = std::find_if(bcs.begin(), bcs.end(), [&](const PotentialBc& b) { return b.tag == *e.tag; });
        if (it == bcs.end() || it->kind == PotentialBcKind::insulated) {
            continue;
        }
        const EdgeQuad eq = edge_quad(mesh, e, line);
        const Trace tr = trace(*space, e.left, eq.x);
        const int d0 = space->dof(e.left, 0, 0);
        if (it->kind == PotentialBcKind::flux) {
            load.segment(d0, n) += it->value * (tr.val * eq.w);
            continue;
        }
        const Eigen::MatrixXd dn = tr.dn(e.normal);
        const double pen = sigma / e.length;
        const auto W = eq.w.asDiagonal();
        const Eigen::MatrixXd blk = pen * (tr.val * W * tr.val.transpose()) - tr.val * W * dn.transpose() -
                                    dn * W * tr.val.transpose();
        add_block(t, d0, d0, blk);
        load.segment(d0, n) += mu * it->value * (pen * (tr.val * eq.w) - dn * eq.w);
    }
    SparseMatrix extra = build(space->size(), space->size(), t);
    SparseMatrix op = mu * (a1 + extra);
    op.makeCompressed();
    return {{std::move(op), space, space}, std::move(load)};
}

}  // namespace dgpnp
