#include "dgpnp/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dgpnp/quadrature.hpp"

namespace dgpnp {

double compute_mass(const FieldVector& c) { return integrate(c); }

Extrema sample_extrema(const FieldVector& c, double shift)
{
    const BrokenSpace& s = *c.space();
    QuadratureRule rule = triangle_rule(2 * s.poly_degree() + 2);
    std::vector<Vec2> pts = rule.points;
    pts.insert(pts.end(), {Vec2{0.0, 0.0}, Vec2{1.0, 0.0}, Vec2{0.0, 1.0}});
    std::vector<Eigen::VectorXd> vals;
    for (const Vec2& p : pts) {
        Eigen::VectorXd v(s.local_size());
        s.basis().eval(p, v);
        vals.push_back(std::move(v));
    }
    Extrema out{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (int e = 0; e < s.mesh().num_elements(); ++e) {
        const auto blk = c.element_block(e);
        for (const auto& v : vals) {
            const double x = blk.dot(v) + shift;
            out.min = std::min(out.min, x);
            out.max = std::max(out.max, x);
        }
    }
    return out;
}

Energies compute_energies(const SystemState& s, const FormParams& params)
{
    const BrokenSpace& vs = *s.u.space();
    const BrokenSpace& cs = *s.c1.space();
    const TriMesh& mesh = vs.mesh();
    const int k = vs.degree();
    const QuadratureRule rule = triangle_rule(2 * k + 4);
    double kinetic = 0.0;
    double electric = 0.0;
    double entropy = 0.0;
    bool positive = true;
    Eigen::VectorXd bv(vs.local_size());
    Eigen::VectorXd bc(cs.local_size());
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const double det = std::abs(mesh.map(e).det);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Vec2& xi = rule.points[q];
            const double w = rule.weights[q] * det;
            vs.basis().eval(xi, bv);
            const double u0 = s.u.element_block(e, 0).dot(bv);
            const double u1 = s.u.element_block(e, 1).dot(bv);
            kinetic += 0.5 * w * (u0 * u0 + u1 * u1);
            const Vec2 g = s.phi.gradient(e, xi);
            electric += 0.5 * params.mu * w * dot(g, g);
            cs.basis().eval(xi, bc);
            const double c1 = s.c1.element_block(e).dot(bc) + s.m0;
            const double c2 = s.c2.element_block(e).dot(bc) + s.m0;
            if (c1 <= 0.0 || c2 <= 0.0) {
                positive = false;
            } else {
                entropy += w * (params.kappa1 * c1 * (std::log(c1) - 1.0) +
                                params.kappa2 * c2 * (std::log(c2) - 1.0));
            }
        }
    }
    Energies out;
    out.e_elec = kinetic + electric;
    if (positive) {
        out.e_total = out.e_elec + entropy;
    }
    return out;
}

double energy_norm(const FieldVector& v, double sigma, bool all_edges)
{
    const SparseMatrix g = assemble_energy_gram(v.space(), sigma, all_edges).matrix;
    return std::sqrt(std::max(0.0, v.coefficients().dot(g * v.coefficients())));
}

namespace {

struct Accum {
    double l2{0.0};
    double grad{0.0};
    double jump{0.0};
};

// Error of one scalar component: element L2 and gradient parts.
void element_errors(const FieldVector& f, int comp, double shift,
                    const std::function<double(const Vec2&)>& exact,
                    const std::function<Vec2(const Vec2&)>& exact_grad, const QuadratureRule& rule, Accum& acc)
{
    const BrokenSpace& s = *f.space();
    const TriMesh& mesh = s.mesh();
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const AffineMap& m = mesh.map(e);
        const double det = std::abs(m.det);
        const auto blk = f.element_block(e, comp);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const BasisValues b = basis_eval(s, e, rule.points[q]);
            const Vec2 x = m.to_physical(rule.points[q]);
            const double w = rule.weights[q] * det;
            const double d = exact(x) - (blk.dot(b.values) + shift);
            acc.l2 += w * d * d;
            if (exact_grad) {
                const Eigen::Vector2d gh = b.gradients.transpose() * blk;
                const Vec2 ge = exact_grad(x);
                acc.grad += w * ((ge.x - gh[0]) * (ge.x - gh[0]) + (ge.y - gh[1]) * (ge.y - gh[1]));
            }
        }
    }
}

// Penalty part of the energy norm of (exact - f). The exact field is
// continuous, so interior jumps come from f alone; on boundary edges the
// trace of the error is used.
void edge_errors(const FieldVector& f, int comp, double shift, const std::function<double(const Vec2&)>& exact,
                 double sigma, bool all_edges, const LineRule& line, Accum& acc)
{
    const BrokenSpace& s = *f.space();
    const TriMesh& mesh = s.mesh();
    for (const Edge& e : mesh.edges()) {
        if (e.is_boundary() && !all_edges) {
            continue;
        }
        const Vec2 a = mesh.vertices()[e.vertices[0]];
        const Vec2 b = mesh.vertices()[e.vertices[1]];
        double sum = 0.0;
        for (std::size_t q = 0; q < line.size(); ++q) {
            const Vec2 x = a + line.points[q] * (b - a);
            const double left = f.value(e.left, mesh.map(e.left).to_reference(x), comp) + shift;
            double j = 0.0;
            if (e.is_boundary()) {
                j = exact(x) - left;
            } else {
                const double right = f.value(e.right, mesh.map(e.right).to_reference(x), comp) + shift;
                j = left - right;
            }
            sum += line.weights[q] * e.length * j * j;
        }
        acc.jump += sigma / e.length * sum;
    }
}

}  // namespace

ErrorNorms compute_errors(const SystemState& s, const ExactFields& exact, double t, double sigma, int boost)
{
    const int k = s.u.space()->degree();
    const QuadratureRule rule = triangle_rule(2 * k + 2 + boost);
    const LineRule line = line_rule(2 * k + 1 + boost);
    ErrorNorms out;

    const auto scalar = [&](const FieldVector& f, double shift, const SpaceTimeScalar& ex,
                            const std::function<Vec2(const Vec2&, double)>& gex, double& l2, double& en) {
        Accum acc;
        const auto fx = [&](const Vec2& x) { return ex(x, t); };
        const auto gx = [&](const Vec2& x) { return gex(x, t); };
        element_errors(f, 0, shift, fx, gx, rule, acc);
        edge_errors(f, 0, shift, fx, sigma, false, line, acc);
        l2 = std::sqrt(acc.l2);
        en = std::sqrt(acc.grad + acc.jump);
    };
    scalar(s.phi, 0.0, exact.phi, exact.grad_phi, out.phi_l2, out.phi_energy);
    scalar(s.c1, s.m0, exact.c1, exact.grad_c1, out.c1_l2, out.c1_energy);
    scalar(s.c2, s.m0, exact.c2, exact.grad_c2, out.c2_l2, out.c2_energy);

    Accum ua;
    for (int c = 0; c < 2; ++c) {
        const auto fx = [&](const Vec2& x) {
            const Vec2 v = exact.u(x, t);
            return c == 0 ? v.x : v.y;
        };
        const auto gx = [&](const Vec2& x) { return exact.grad_u(x, t)[static_cast<std::size_t>(c)]; };
        element_errors(s.u, c, 0.0, fx, gx, rule, ua);
        edge_errors(s.u, c, 0.0, fx, sigma, true, line, ua);
    }
    out.u_l2 = std::sqrt(ua.l2);
    out.u_energy = std::sqrt(ua.grad + ua.jump);

    Accum pa;
    element_errors(s.p, 0, 0.0, [&](const Vec2& x) { return exact.p(x, t); }, {}, rule, pa);
    out.p_l2 = std::sqrt(pa.l2);
    return out;
}

DiagnosticsRecord make_record(const SystemState& s, const FormParams& params, const ExactFields* exact)
{
    DiagnosticsRecord r;
    r.t = s.t;
    r.step = s.step;
    const double area = s.c1.space()->mesh().total_area();
    r.mass1 = compute_mass(s.c1) + s.m0 * area;
    r.mass2 = compute_mass(s.c2) + s.m0 * area;
    const Extrema e1 = sample_extrema(s.c1, s.m0);
    const Extrema e2 = sample_extrema(s.c2, s.m0);
    r.min_c1 = e1.min;
    r.max_c1 = e1.max;
    r.min_c2 = e2.min;
    r.max_c2 = e2.max;
    const Energies en = compute_energies(s, params);
    r.e_elec = en.e_elec;
    r.e_total = en.e_total;
    if (exact) {
        r.errors = compute_errors(s, *exact, s.t, params.sigma);
    }
    return r;
}

}  // namespace dgpnp
