#include "dgpnp/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "dgpnp/mms.hpp"

namespace dgpnp::oracle {

void gauss_legendre_golub_welsch(int n, std::vector<double>& nodes, std::vector<double>& weights)
{
    Eigen::MatrixXd jm = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) {
        const double b = i / std::sqrt(4.0 * i * i - 1.0);
        jm(i, i - 1) = b;
        jm(i - 1, i) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jm);
    nodes.resize(n);
    weights.resize(n);
    for (int i = 0; i < n; ++i) {
        nodes[i] = es.eigenvalues()[i];
        const double v = es.eigenvectors()(0, i);
        weights[i] = 2.0 * v * v;
    }
}

namespace {

constexpr int kPoints = 10;  // per direction; exact to degree 18 on triangles

struct Point {
    Vec2 x;
    double w;
};

struct Geometry {
    std::array<Vec2, 3> v;
    double jinv[2][2];  // d xi_r / d x_c
    double area;
};

struct Eval {
    std::array<double, 2> val{0.0, 0.0};   // per component
    std::array<Vec2, 2> grad{};             // per component
};

// A space viewed as a list of global shape functions.
class Shapes {
public:
    explicit Shapes(const SpacePtr& s) : s_(s)
    {
        const TriMesh& m = s->mesh();
        for (int e = 0; e < m.num_elements(); ++e) {
            Geometry g{};
            for (int a = 0; a < 3; ++a) {
                g.v[a] = m.vertices()[m.triangles()[e][a]];
            }
            const double j00 = g.v[1].x - g.v[0].x, j01 = g.v[2].x - g.v[0].x;
            const double j10 = g.v[1].y - g.v[0].y, j11 = g.v[2].y - g.v[0].y;
            const double det = j00 * j11 - j01 * j10;
            g.jinv[0][0] = j11 / det;
            g.jinv[0][1] = -j01 / det;
            g.jinv[1][0] = -j10 / det;
            g.jinv[1][1] = j00 / det;
            g.area = 0.5 * std::abs(det);
            geo_.push_back(g);
        }
    }

    [[nodiscard]] int size() const { return s_->size(); }
    [[nodiscard]] int element_of(int i) const { return (i % s_->component_size()) / s_->local_size(); }
    [[nodiscard]] const Geometry& geometry(int e) const { return geo_[e]; }

    // Shape function i evaluated on element e at physical x (zero off its support).
    [[nodiscard]] Eval eval(int i, int e, const Vec2& x) const
    {
        Eval out;
        const int cs = s_->component_size();
        const int comp = i / cs;
        const int loc = (i % cs) % s_->local_size();
        if (element_of(i) != e) {
            return out;
        }
        const Geometry& g = geo_[e];
        const double dx = x.x - g.v[0].x, dy = x.y - g.v[0].y;
        const Vec2 xi{g.jinv[0][0] * dx + g.jinv[0][1] * dy, g.jinv[1][0] * dx + g.jinv[1][1] * dy};
        Eigen::VectorXd vals(s_->local_size());
        Eigen::MatrixX2d rg(s_->local_size(), 2);
        s_->basis().eval(xi, vals, rg);
        out.val[comp] = vals[loc];
        out.grad[comp] = {rg(loc, 0) * g.jinv[0][0] + rg(loc, 1) * g.jinv[1][0],
                          rg(loc, 0) * g.jinv[0][1] + rg(loc, 1) * g.jinv[1][1]};
        return out;
    }

    // Field with coefficients c, evaluated on element e at x.
    [[nodiscard]] Eval field(const Eigen::VectorXd& c, int e, const Vec2& x) const
    {
        Eval out;
        for (int i = 0; i < size(); ++i) {
            if (c[i] == 0.0 || element_of(i) != e) {
                continue;
            }
            const Eval b = eval(i, e, x);
            for (int k = 0; k < 2; ++k) {
                out.val[k] += c[i] * b.val[k];
                out.grad[k] += c[i] * b.grad[k];
            }
        }
        return out;
    }

private:
    SpacePtr s_;
    std::vector<Geometry> geo_;
};

// Duffy-collapsed Gauss rule mapped onto element e.
std::vector<Point> element_points(const Geometry& g)
{
    std::vector<double> z, w;
    gauss_legendre_golub_welsch(kPoints, z, w);
    std::vector<Point> out;
    for (int i = 0; i < kPoints; ++i) {
        for (int j = 0; j < kPoints; ++j) {
            const double a = 0.5 * (z[i] + 1.0);
            const double b = 0.5 * (z[j] + 1.0);
            const double l1 = a * (1.0 - b);
            const double l2 = b;
            const double l0 = 1.0 - l1 - l2;
            const Vec2 x = l0 * g.v[0] + l1 * g.v[1] + l2 * g.v[2];
            // reference area 1/2 times Jacobian of the collapse (1 - b) / 4
            out.push_back({x, 2.0 * g.area * 0.25 * w[i] * w[j] * (1.0 - b)});
        }
    }
    return out;
}

struct EdgeGeom {
    Vec2 a, b;
    Vec2 n;  // unit, pointing out of `left`
    double len;
    int left, right;
};

EdgeGeom edge_geometry(const TriMesh& m, const Edge& e)
{
    EdgeGeom g;
    g.a = m.vertices()[e.vertices[0]];
    g.b = m.vertices()[e.vertices[1]];
    g.len = std::hypot(g.b.x - g.a.x, g.b.y - g.a.y);
    g.n = {(g.b.y - g.a.y) / g.len, -(g.b.x - g.a.x) / g.len};
    g.left = e.left;
    g.right = e.right;
    Vec2 c{};
    for (int k = 0; k < 3; ++k) {
        c += (1.0 / 3.0) * m.vertices()[m.triangles()[e.left][k]];
    }
    const Vec2 mid = 0.5 * (g.a + g.b);
    if (dot(g.n, mid - c) < 0.0) {
        g.n = -1.0 * g.n;
    }
    return g;
}

std::vector<Point> edge_points(const EdgeGeom& g)
{
    std::vector<double> z, w;
    gauss_legendre_golub_welsch(kPoints, z, w);
    std::vector<Point> out;
    for (int i = 0; i < kPoints; ++i) {
        const double s = 0.5 * (z[i] + 1.0);
        out.push_back({g.a + s * (g.b - g.a), 0.5 * w[i] * g.len});
    }
    return out;
}

// Jump and average of a traced quantity on an edge.
struct JA {
    double jump;
    double avg;
};

JA ja(double left, double right, bool boundary)
{
    return boundary ? JA{left, left} : JA{left - right, 0.5 * (left + right)};
}

template <typename ElemFn, typename EdgeFn>
Eigen::MatrixXd pairwise(const Shapes& test, const Shapes& trial, ElemFn elem, EdgeFn edge, bool interior_only,
                         const TriMesh& mesh)
{
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(test.size(), trial.size());
    for (int i = 0; i < test.size(); ++i) {
        for (int j = 0; j < trial.size(); ++j) {
            long double sum = 0.0L;
            for (int e = 0; e < mesh.num_elements(); ++e) {
                for (const Point& p : element_points(test.geometry(e))) {
                    sum += p.w * elem(test.eval(i, e, p.x), trial.eval(j, e, p.x), e, p.x);
                }
            }
            for (const Edge& ed : mesh.edges()) {
                if (interior_only && ed.is_boundary()) {
                    continue;
                }
                const EdgeGeom g = edge_geometry(mesh, ed);
                for (const Point& p : edge_points(g)) {
                    const Eval tl = test.eval(i, g.left, p.x);
                    const Eval ul = trial.eval(j, g.left, p.x);
                    Eval tr, ur;
                    if (!ed.is_boundary()) {
                        tr = test.eval(i, g.right, p.x);
                        ur = trial.eval(j, g.right, p.x);
                    }
                    sum += p.w * edge(tl, tr, ul, ur, g, p.x);
                }
            }
            out(i, j) = static_cast<double>(sum);
        }
    }
    return out;
}

double ndot(const Vec2& g, const Vec2& n) { return g.x * n.x + g.y * n.y; }

Eigen::MatrixXd sipg(const SpacePtr& s, double sigma, bool interior_only)
{
    const Shapes sh(s);
    const int comps = s->components();
    const auto elem = [&](const Eval& t, const Eval& u, int, const Vec2&) {
        double v = 0.0;
        for (int k = 0; k < comps; ++k) {
            v += dot(u.grad[k], t.grad[k]);
        }
        return v;
    };
    const auto edge = [&](const Eval& tl, const Eval& tr, const Eval& ul, const Eval& ur, const EdgeGeom& g,
                          const Vec2&) {
        const bool bd = g.right < 0;
        double v = 0.0;
        for (int k = 0; k < comps; ++k) {
            const JA jt = ja(tl.val[k], tr.val[k], bd);
            const JA ju = ja(ul.val[k], ur.val[k], bd);
            const JA dnt = ja(ndot(tl.grad[k], g.n), ndot(tr.grad[k], g.n), bd);
            const JA dnu = ja(ndot(ul.grad[k], g.n), ndot(ur.grad[k], g.n), bd);
            v += -dnu.avg * jt.jump - dnt.avg * ju.jump + sigma / g.len * ju.jump * jt.jump;
        }
        return v;
    };
    return pairwise(sh, sh, elem, edge, interior_only, s->mesh());
}

}  // namespace

Eigen::MatrixXd A1(const SpacePtr& space, double sigma) { return sipg(space, sigma, true); }

Eigen::MatrixXd A2(const SpacePtr& vspace, double sigma) { return sipg(vspace, sigma, false); }

Eigen::MatrixXd D(const SpacePtr& vspace, const SpacePtr& pspace)
{
    const Shapes q(pspace), v(vspace);
    const auto elem = [](const Eval& t, const Eval& u, int, const Vec2&) {
        return t.val[0] * (u.grad[0].x + u.grad[1].y);
    };
    const auto edge = [](const Eval& tl, const Eval& tr, const Eval& ul, const Eval& ur, const EdgeGeom& g,
                         const Vec2&) {
        const bool bd = g.right < 0;
        const JA qa = ja(tl.val[0], tr.val[0], bd);
        const JA v0 = ja(ul.val[0], ur.val[0], bd);
        const JA v1 = ja(ul.val[1], ur.val[1], bd);
        return -qa.avg * (g.n.x * v0.jump + g.n.y * v1.jump);
    };
    return pairwise(q, v, elem, edge, false, vspace->mesh());
}

Eigen::MatrixXd D_by_parts(const SpacePtr& vspace, const SpacePtr& pspace)
{
    const Shapes q(pspace), v(vspace);
    const auto elem = [](const Eval& t, const Eval& u, int, const Vec2&) {
        return -(u.val[0] * t.grad[0].x + u.val[1] * t.grad[0].y);
    };
    const auto edge = [](const Eval& tl, const Eval& tr, const Eval& ul, const Eval& ur, const EdgeGeom& g,
                         const Vec2&) {
        const JA qa = ja(tl.val[0], tr.val[0], false);
        const JA v0 = ja(ul.val[0], ur.val[0], false);
        const JA v1 = ja(ul.val[1], ur.val[1], false);
        return (g.n.x * v0.avg + g.n.y * v1.avg) * qa.jump;
    };
    return pairwise(q, v, elem, edge, true, vspace->mesh());
}

namespace {

Eigen::MatrixXd convection(const FieldVector& w, const SpacePtr& s, bool interior_only)
{
    const Shapes sh(s);
    const Shapes ws(w.space());
    const Eigen::VectorXd& wc = w.coefficients();
    const int comps = s->components();
    const auto elem = [&](const Eval& t, const Eval& u, int e, const Vec2& x) {
        const Eval wf = ws.field(wc, e, x);
        const double divw = wf.grad[0].x + wf.grad[1].y;
        double v = 0.0;
        for (int k = 0; k < comps; ++k) {
            v += (wf.val[0] * u.grad[k].x + wf.val[1] * u.grad[k].y) * t.val[k] + 0.5 * divw * u.val[k] * t.val[k];
        }
        return v;
    };
    const auto edge = [&](const Eval& tl, const Eval& tr, const Eval& ul, const Eval& ur, const EdgeGeom& g,
                          const Vec2& x) {
        const bool bd = g.right < 0;
        const Eval wl = ws.field(wc, g.left, x);
        const Eval wr = bd ? Eval{} : ws.field(wc, g.right, x);
        const JA w0 = ja(wl.val[0], wr.val[0], bd);
        const JA w1 = ja(wl.val[1], wr.val[1], bd);
        const double wavg_n = w0.avg * g.n.x + w1.avg * g.n.y;
        const double wjump_n = w0.jump * g.n.x + w1.jump * g.n.y;
        double v = 0.0;
        for (int k = 0; k < comps; ++k) {
            const JA uj = ja(ul.val[k], ur.val[k], bd);
            const JA tj = ja(tl.val[k], tr.val[k], bd);
            const JA prod = ja(ul.val[k] * tl.val[k], ur.val[k] * tr.val[k], bd);
            v += -wavg_n * uj.jump * tj.avg - 0.5 * wjump_n * prod.avg;
        }
        return v;
    };
    return pairwise(sh, sh, elem, edge, interior_only, s->mesh());
}

}  // namespace

Eigen::MatrixXd N1(const FieldVector& w, const SpacePtr& space) { return convection(w, space, true); }

Eigen::MatrixXd N2(const FieldVector& w, const SpacePtr& vspace) { return convection(w, vspace, false); }

Eigen::MatrixXd G(const FieldVector& c, double shift, const SpacePtr& space)
{
    const Shapes sh(space);
    const Shapes cs(c.space());
    const Eigen::VectorXd& cc = c.coefficients();
    const auto chi = [&](int e, const Vec2& x) { return cs.field(cc, e, x).val[0] + shift; };
    const auto elem = [&](const Eval& t, const Eval& u, int e, const Vec2& x) {
        return chi(e, x) * dot(u.grad[0], t.grad[0]);
    };
    const auto edge = [&](const Eval& tl, const Eval& tr, const Eval& ul, const Eval& ur, const EdgeGeom& g,
                          const Vec2& x) {
        const double xl = chi(g.left, x);
        const double xr = chi(g.right, x);
        const JA cu = ja(xl * ndot(ul.grad[0], g.n), xr * ndot(ur.grad[0], g.n), false);
        const JA ct = ja(xl * ndot(tl.grad[0], g.n), xr * ndot(tr.grad[0], g.n), false);
        const JA jt = ja(tl.val[0], tr.val[0], false);
        const JA ju = ja(ul.val[0], ur.val[0], false);
        return -cu.avg * jt.jump - ct.avg * ju.jump;
    };
    return pairwise(sh, sh, elem, edge, true, space->mesh());
}

Eigen::VectorXd T(const FieldVector& charge, const FieldVector& phi, const SpacePtr& vspace)
{
    const Shapes vs(vspace);
    const Shapes qs(charge.space());
    const Shapes ps(phi.space());
    const TriMesh& mesh = vspace->mesh();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(vs.size());
    for (int i = 0; i < vs.size(); ++i) {
        double sum = 0.0;
        for (int e = 0; e < mesh.num_elements(); ++e) {
            for (const Point& p : element_points(vs.geometry(e))) {
                const Eval v = vs.eval(i, e, p.x);
                const double q = qs.field(charge.coefficients(), e, p.x).val[0];
                const Vec2 gp = ps.field(phi.coefficients(), e, p.x).grad[0];
                sum += p.w * q * (gp.x * v.val[0] + gp.y * v.val[1]);
            }
        }
        for (const Edge& ed : mesh.edges()) {
            if (ed.is_boundary()) {
                continue;
            }
            const EdgeGeom g = edge_geometry(mesh, ed);
            for (const Point& p : edge_points(g)) {
                const JA q = ja(qs.field(charge.coefficients(), g.left, p.x).val[0],
                                qs.field(charge.coefficients(), g.right, p.x).val[0], false);
                const JA f = ja(ps.field(phi.coefficients(), g.left, p.x).val[0],
                                ps.field(phi.coefficients(), g.right, p.x).val[0], false);
                const Eval vl = vs.eval(i, g.left, p.x);
                const Eval vr = vs.eval(i, g.right, p.x);
                const JA v0 = ja(vl.val[0], vr.val[0], false);
                const JA v1 = ja(vl.val[1], vr.val[1], false);
                sum -= p.w * q.avg * f.jump * (v0.avg * g.n.x + v1.avg * g.n.y);
            }
        }
        out[i] = sum;
    }
    return out;
}

Eigen::MatrixXd mass(const SpacePtr& space)
{
    const Shapes sh(space);
    const int comps = space->components();
    const auto elem = [&](const Eval& t, const Eval& u, int, const Vec2&) {
        double v = 0.0;
        for (int k = 0; k < comps; ++k) {
            v += u.val[k] * t.val[k];
        }
        return v;
    };
    const auto edge = [](const Eval&, const Eval&, const Eval&, const Eval&, const EdgeGeom&, const Vec2&) {
        return 0.0;
    };
    return pairwise(sh, sh, elem, edge, true, space->mesh());
}

namespace {

void record(std::vector<OracleComparison>& out, const std::string& name, const Eigen::MatrixXd& assembled,
            const Eigen::MatrixXd& dense)
{
    out.push_back({name, (assembled - dense).cwiseAbs().maxCoeff(), dense.cwiseAbs().maxCoeff()});
}

FieldVector random_field(const SpacePtr& s, std::mt19937& rng)
{
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    Eigen::VectorXd c(s->size());
    for (Eigen::Index i = 0; i < c.size(); ++i) {
        c[i] = d(rng);
    }
    return FieldVector(s, c);
}

}  // namespace

std::vector<OracleComparison> compare_forms(BasisKind basis, double sigma, unsigned seed)
{
    std::mt19937 rng(seed);
    std::vector<OracleComparison> out;
    const std::vector<std::pair<std::string, std::shared_ptr<const TriMesh>>> meshes = {
        {"square", std::make_shared<const TriMesh>(build_rect_mesh(1.0, 1.0, 1, 1))},
        {"rectangle", std::make_shared<const TriMesh>(TriMesh({{0.0, 0.0}, {1.3, 0.0}, {0.0, 0.7}, {1.3, 0.7}},
                                                              {{0, 1, 2}, {1, 3, 2}}))},
        {"skewed fan", std::make_shared<const TriMesh>(
                           TriMesh({{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}, {0.37, 0.61}},
                                   {{0, 1, 4}, {1, 2, 4}, {2, 3, 4}, {3, 0, 4}}))},
    };
    for (const auto& [mname, mesh] : meshes) {
        for (int k = 1; k <= 2; ++k) {
            const std::string tag = "[" + mname + ", k=" + std::to_string(k) + "]";
            const SpacePtr s = BrokenSpace::make(mesh, k, SpaceKind::scalar, false, basis);
            const SpacePtr v = BrokenSpace::make(mesh, k, SpaceKind::vector, false, basis);
            const SpacePtr p = BrokenSpace::make(mesh, k, SpaceKind::pressure, false, basis);
            record(out, "A1 " + tag, Eigen::MatrixXd(assemble_A1(s, sigma).matrix), A1(s, sigma));
            record(out, "A1 pressure " + tag, Eigen::MatrixXd(assemble_A1(p, sigma).matrix), A1(p, sigma));
            record(out, "A2 " + tag, Eigen::MatrixXd(assemble_A2(v, sigma).matrix), A2(v, sigma));
            record(out, "D " + tag, Eigen::MatrixXd(assemble_D(v, p).matrix), D(v, p));
            record(out, "D by parts " + tag, Eigen::MatrixXd(assemble_D_by_parts(v, p).matrix),
                   D_by_parts(v, p));
            const FieldVector w = random_field(v, rng);
            record(out, "N1 " + tag, Eigen::MatrixXd(assemble_N1(w, s).matrix), N1(w, s));
            record(out, "N2 " + tag, Eigen::MatrixXd(assemble_N2(w, v).matrix), N2(w, v));
            const FieldVector c = random_field(s, rng);
            record(out, "G " + tag, Eigen::MatrixXd(assemble_G(c, 0.7, s).matrix), G(c, 0.7, s));
            const FieldVector q = random_field(s, rng);
            const FieldVector f = random_field(s, rng);
            record(out, "T " + tag, -assemble_T_rhs(q, f, v), T(q, f, v));
            record(out, "mass " + tag, Eigen::MatrixXd(assemble_mass(v).matrix), mass(v));
        }
    }
    return out;
}

namespace {

using LD = long double;
using S = ManufacturedSolution;

// Sixth-order central differences.
constexpr std::array<LD, 7> kFirst = {-1.0L / 60, 3.0L / 20, -3.0L / 4, 0.0L, 3.0L / 4, -3.0L / 20, 1.0L / 60};
constexpr std::array<LD, 7> kSecond = {1.0L / 90, -3.0L / 20, 3.0L / 2, -49.0L / 18, 3.0L / 2, -3.0L / 20, 1.0L / 90};
constexpr LD kStep = 1e-3L;

template <typename F>
LD diff(F f, LD x, LD y, LD t, int var, bool second)
{
    const auto& c = second ? kSecond : kFirst;
    LD sum = 0.0L;
    for (int i = 0; i < 7; ++i) {
        const LD o = (i - 3) * kStep;
        sum += c[i] * (var == 0 ? f(x + o, y, t) : var == 1 ? f(x, y + o, t) : f(x, y, t + o));
    }
    return second ? sum / (kStep * kStep) : sum / kStep;
}

struct Derivs {
    LD v, dx, dy, dt, lap;
};

template <typename F>
Derivs derivs(F f, LD x, LD y, LD t)
{
    return {f(x, y, t), diff(f, x, y, t, 0, false), diff(f, x, y, t, 1, false), diff(f, x, y, t, 2, false),
            diff(f, x, y, t, 0, true) + diff(f, x, y, t, 1, true)};
}

}  // namespace

std::vector<ResidualReport> manufactured_residuals(const FormParams& params, int points, unsigned seed)
{
    const ForcingTerms f = forcing_terms(params);
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> ux(0.0, 1.0);
    std::uniform_real_distribution<double> ut(0.0, 1.0);
    std::vector<ResidualReport> out = {{"potential", 0.0}, {"ion 1", 0.0}, {"ion 2", 0.0},
                                       {"momentum x", 0.0}, {"momentum y", 0.0}, {"divergence", 0.0}};
    const auto phi = [](LD x, LD y, LD t) { return S::phi_raw(x, y, t); };
    const auto c1 = [](LD x, LD y, LD t) { return S::c1_raw(x, y, t); };
    const auto c2 = [](LD x, LD y, LD t) { return S::c2_raw(x, y, t); };
    const auto u1 = [](LD x, LD y, LD t) { return S::u1_raw(x, y, t); };
    const auto u2 = [](LD x, LD y, LD t) { return S::u2_raw(x, y, t); };
    const auto p = [](LD x, LD y, LD t) { return S::p_raw(x, y, t); };
    for (int n = 0; n < points; ++n) {
        const double xd = ux(rng), yd = ux(rng), td = ut(rng);
        const LD x = xd, y = yd, t = td;
        const Derivs P = derivs(phi, x, y, t);
        const Derivs C1 = derivs(c1, x, y, t);
        const Derivs C2 = derivs(c2, x, y, t);
        const Derivs U1 = derivs(u1, x, y, t);
        const Derivs U2 = derivs(u2, x, y, t);
        const Derivs PR = derivs(p, x, y, t);
        const Vec2 xv{xd, yd};

        const LD rphi = -params.mu * P.lap - (C1.v - C2.v);
        const auto ion = [&](const Derivs& c, double kappa, double beta) {
            const LD drift = c.dx * P.dx + c.dy * P.dy + c.v * P.lap;
            return c.dt - kappa * c.lap + U1.v * c.dx + U2.v * c.dy - beta * drift;
        };
        const LD q = C1.v - C2.v;
        const LD m1 = U1.dt - params.nu * U1.lap + U1.v * U1.dx + U2.v * U1.dy + PR.dx + q * P.dx;
        const LD m2 = U2.dt - params.nu * U2.lap + U1.v * U2.dx + U2.v * U2.dy + PR.dy + q * P.dy;
        const Vec2 fu = f.f_u(xv, td);
        const std::array<LD, 6> r = {
            rphi - f.f_phi(xv, td),
            ion(C1, params.kappa1, params.beta1) - f.f_c1(xv, td),
            ion(C2, params.kappa2, params.beta2) - f.f_c2(xv, td),
            m1 - fu.x,
            m2 - fu.y,
            U1.dx + U2.dy,
        };
        for (std::size_t k = 0; k < r.size(); ++k) {
            out[k].max_residual = std::max(out[k].max_residual, static_cast<double>(std::abs(r[k])));
        }
    }
    return out;
}

}  // namespace dgpnp::oracle
