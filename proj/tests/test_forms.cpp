#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <set>

#include "dgpnp/forms.hpp"
#include "dgpnp/oracle.hpp"
#include "dgpnp/quadrature.hpp"
#include "test_util.hpp"

using namespace dgpnp;
using namespace dgpnp::testing;

namespace {

double max_abs(const Eigen::MatrixXd& a) { return a.cwiseAbs().maxCoeff(); }

// smallest eigenvalue of the pencil (a, b) restricted to the complement of `kernel`
double min_pencil_eigenvalue(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::VectorXd& kernel)
{
    Eigen::MatrixXd basis = Eigen::MatrixXd::Identity(a.rows(), a.rows());
    if (kernel.size() > 0) {
        Eigen::MatrixXd k = kernel.normalized();
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(k);
        basis = Eigen::MatrixXd(qr.householderQ()).rightCols(a.rows() - 1);
    }
    const Eigen::MatrixXd ar = basis.transpose() * a * basis;
    const Eigen::MatrixXd br = basis.transpose() * b * basis;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (ar + ar.transpose()),
                                                                  0.5 * (br + br.transpose()));
    return es.eigenvalues().minCoeff();
}

}  // namespace

class OracleAgreement : public ::testing::TestWithParam<BasisKind> {};

TEST_P(OracleAgreement, EveryOperatorMatchesDenseQuadrature)
{
    const auto results = oracle::compare_forms(GetParam());
    ASSERT_FALSE(results.empty());
    for (const auto& r : results) {
        // the orthonormal basis has entries in the hundreds for k = 2, so the
        // bound scales with the largest entry
        EXPECT_LE(r.max_abs_diff, 1e-12 * std::max(1.0, r.max_entry)) << r.name;
    }
}

INSTANTIATE_TEST_SUITE_P(Bases, OracleAgreement, ::testing::Values(BasisKind::lagrange, BasisKind::orthonormal));

TEST(OracleAgreement, LagrangeAgreesToAbsoluteTolerance)
{
    for (const auto& r : oracle::compare_forms(BasisKind::lagrange, 10.0, 99)) {
        EXPECT_LE(r.max_abs_diff, 1e-12) << r.name;
    }
}

TEST(OracleAgreement, TwoTriangleA1LinearPenaltyTen)
{
    const auto mesh = rect_mesh(1, 1, 1, 1);
    const auto s = BrokenSpace::make(mesh, 1, SpaceKind::scalar, false, BasisKind::lagrange);
    const Eigen::MatrixXd a = dense(assemble_A1(s, 10.0).matrix);
    ASSERT_EQ(a.rows(), 6);
    EXPECT_LE(max_abs(a - oracle::A1(s, 10.0)), 1e-12);
}

TEST(OracleAgreement, TwoTriangleN1UniformFlow)
{
    const auto mesh = rect_mesh(1, 1, 1, 1);
    const auto s = BrokenSpace::make(mesh, 1, SpaceKind::scalar, false, BasisKind::lagrange);
    const auto v = BrokenSpace::make(mesh, 1, SpaceKind::vector, false, BasisKind::lagrange);
    const FieldVector w = project_field(v, [](const Vec2&) { return Vec2{1.0, 0.0}; });
    EXPECT_LE(max_abs(dense(assemble_N1(w, s).matrix) - oracle::N1(w, s)), 1e-12);
    EXPECT_LE(max_abs(dense(assemble_N2(w, v).matrix) - oracle::N2(w, v)), 1e-12);
}

TEST(OracleAgreement, TwoTriangleGAndTWithLinearData)
{
    const auto mesh = rect_mesh(1, 1, 1, 1);
    const auto s = BrokenSpace::make(mesh, 1, SpaceKind::scalar, false, BasisKind::lagrange);
    const auto v = BrokenSpace::make(mesh, 1, SpaceKind::vector, false, BasisKind::lagrange);
    const FieldVector chi = project_field(s, [](const Vec2& x) { return 0.3 + x.x - 0.5 * x.y; });
    EXPECT_LE(max_abs(dense(assemble_G(chi, 0.2, s).matrix) - oracle::G(chi, 0.2, s)), 1e-12);
    const FieldVector phi = project_field(s, [](const Vec2& x) { return x.y - 2 * x.x; });
    EXPECT_LE((assemble_T_rhs(chi, phi, v) + oracle::T(chi, phi, v)).cwiseAbs().maxCoeff(), 1e-12);
}

class Structure : public ::testing::TestWithParam<int> {};

TEST_P(Structure, SipgOperatorsAreSymmetric)
{
    const int k = GetParam();
    const auto mesh = rect_mesh(1, 1, 4, 4);
    const auto s = BrokenSpace::make(mesh, k, SpaceKind::scalar, false);
    const auto v = BrokenSpace::make(mesh, k, SpaceKind::vector, false);
    const auto p = BrokenSpace::make(mesh, k, SpaceKind::pressure, true);
    EXPECT_LE(symmetry_defect(assemble_A1(s, 10).matrix), 1e-13);
    EXPECT_LE(symmetry_defect(assemble_A2(v, 10).matrix), 1e-13);
    EXPECT_LE(symmetry_defect(assemble_mass(s).matrix), 1e-13);
    if (k > 1) {
        EXPECT_LE(symmetry_defect(assemble_A1(p, 10).matrix), 1e-13);
    }
}

TEST_P(Structure, A1AnnihilatesConstants)
{
    const int k = GetParam();
    const auto s = BrokenSpace::make(skewed_fan_mesh(), k, SpaceKind::scalar, false);
    const auto a = assemble_A1(s, 10);
    EXPECT_LE((a.matrix * s->constant_one()).cwiseAbs().maxCoeff(), 1e-12 * max_abs(dense(a.matrix)));
}

TEST_P(Structure, A2PenalisesConstants)
{
    const int k = GetParam();
    const auto v = BrokenSpace::make(rect_mesh(1, 1, 3, 3), k, SpaceKind::vector, false);
    const Eigen::VectorXd one = v->constant_one();
    EXPECT_GT(one.dot(assemble_A2(v, 10).matrix * one), 1.0);
}

TEST_P(Structure, ConvectionIsSkewForTangentialFlow)
{
    const int k = GetParam();
    for (const auto& mesh : {rect_mesh(1, 1, 3, 3), skewed_fan_mesh(), rect_mesh(1.3, 0.7, 2, 3)}) {
        const auto s = BrokenSpace::make(mesh, k, SpaceKind::scalar, false);
        const auto v = BrokenSpace::make(mesh, k, SpaceKind::vector, false);
        for (unsigned seed = 1; seed <= 5; ++seed) {
            const FieldVector w = tangential_velocity(v, seed);
            const Eigen::MatrixXd n1 = dense(assemble_N1(w, s).matrix);
            const Eigen::MatrixXd n2 = dense(assemble_N2(w, v).matrix);
            const Eigen::VectorXd psi = random_field(s, 100 + seed).coefficients();
            const Eigen::VectorXd vv = random_field(v, 200 + seed).coefficients();
            EXPECT_LE(std::abs(psi.dot(n1 * psi)), 1e-12 * n1.norm() * psi.squaredNorm());
            EXPECT_LE(std::abs(vv.dot(n2 * vv)), 1e-12 * n2.norm() * vv.squaredNorm());
            // the symmetric part vanishes, not only the quadratic form on samples
            EXPECT_LE(max_abs(n1 + n1.transpose()), 1e-12 * max_abs(n1));
            EXPECT_LE(max_abs(n2 + n2.transpose()), 1e-12 * max_abs(n2));
        }
    }
}

TEST_P(Structure, TwoExpressionsOfTheCouplingAgree)
{
    const int k = GetParam();
    for (const auto& mesh : {rect_mesh(1, 1, 3, 3), skewed_fan_mesh()}) {
        const auto v = BrokenSpace::make(mesh, k, SpaceKind::vector, false);
        const auto p = BrokenSpace::make(mesh, k, SpaceKind::pressure, true);
        const Eigen::MatrixXd d1 = dense(assemble_D(v, p).matrix);
        const Eigen::MatrixXd d2 = dense(assemble_D_by_parts(v, p).matrix);
        EXPECT_LE(max_abs(d1 - d2), 1e-12 * std::max(1.0, max_abs(d1)));
        const Eigen::VectorXd vv = random_field(v, 3).coefficients();
        const Eigen::VectorXd q = random_field(p, 4).coefficients();
        EXPECT_NEAR(q.dot(d1 * vv), q.dot(d2 * vv), 1e-12 * std::max(1.0, std::abs(q.dot(d1 * vv))));
    }
}

INSTANTIATE_TEST_SUITE_P(Degrees, Structure, ::testing::Values(1, 2));

TEST(Convection, NormalFlowThroughBoundaryBreaksSkewness)
{
    // the identity depends on w.n = 0 on the boundary; a uniform flow through
    // the walls leaves the boundary flux term behind
    const auto mesh = rect_mesh(1, 1, 2, 2);
    const auto s = BrokenSpace::make(mesh, 1, SpaceKind::scalar, false);
    const auto v = BrokenSpace::make(mesh, 1, SpaceKind::vector, false);
    const FieldVector w = project_field(v, [](const Vec2&) { return Vec2{1.0, 0.0}; });
    const Eigen::VectorXd x = project_field(s, [](const Vec2& p) { return p.x; }).coefficients();
    EXPECT_GT(std::abs(x.dot(dense(assemble_N1(w, s).matrix) * x)), 1e-3);
}

TEST(Convection, ZeroFlowGivesZeroOperators)
{
    const auto mesh = rect_mesh(1, 1, 2, 2);
    const auto s = BrokenSpace::make(mesh, 2, SpaceKind::scalar, false);
    const auto v = BrokenSpace::make(mesh, 2, SpaceKind::vector, false);
    const FieldVector w(v);
    EXPECT_EQ(dense(assemble_N1(w, s).matrix).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(dense(assemble_N2(w, v).matrix).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Coupling, VanishesOnContinuousSolenoidalFields)
{
    // v = curl of x(1-x)y(1-y): cubic, continuous, divergence free, v.n = 0 on the walls
    const auto mesh = rect_mesh(1, 1, 3, 3);
    const auto v = BrokenSpace::make(mesh, 3, SpaceKind::vector, false, BasisKind::lagrange);
    const auto p = BrokenSpace::make(mesh, 3, SpaceKind::pressure, true);
    const FieldVector vel = project_field(v, [](const Vec2& x) {
        return Vec2{x.x * (1 - x.x) * (1 - 2 * x.y), -(1 - 2 * x.x) * x.y * (1 - x.y)};
    });
    const Eigen::VectorXd r = assemble_D(v, p).apply(vel);
    EXPECT_LE(r.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Coupling, ConstantPressureIsInTheKernelOfTheTranspose)
{
    const auto mesh = skewed_fan_mesh();
    const auto v = BrokenSpace::make(mesh, 2, SpaceKind::vector, false);
    const auto p = BrokenSpace::make(mesh, 2, SpaceKind::pressure, true);
    const Eigen::VectorXd r = dense(assemble_D(v, p).matrix).transpose() * p->constant_one();
    EXPECT_LE(r.cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Coercivity, A2OnRandomFields)
{
    const auto v = BrokenSpace::make(rect_mesh(1, 1, 4, 4), 1, SpaceKind::vector, false);
    const Eigen::MatrixXd a = dense(assemble_A2(v, 10).matrix);
    const Eigen::MatrixXd x = dense(assemble_energy_gram(v, 10, true).matrix);
    double gamma = 1e300;
    for (unsigned seed = 0; seed < 20; ++seed) {
        const Eigen::VectorXd w = random_field(v, seed).coefficients();
        gamma = std::min(gamma, w.dot(a * w) / w.dot(x * w));
    }
    EXPECT_GT(gamma, 0.0);
    // the sampled quotients are bounded below by the pencil minimum
    const double gmin = min_pencil_eigenvalue(a, x, {});
    EXPECT_GT(gmin, 0.0);
    EXPECT_GE(gamma, gmin - 1e-12);
}

TEST(Coercivity, A1OffConstantsForBothPenalties)
{
    for (int k : {1, 2}) {
        const double sigma = k == 1 ? 10.0 : 40.0;
        const auto s = BrokenSpace::make(rect_mesh(1, 1, 4, 4), k, SpaceKind::scalar, false);
        const Eigen::MatrixXd a = dense(assemble_A1(s, sigma).matrix);
        const Eigen::MatrixXd x = dense(assemble_energy_gram(s, sigma, false).matrix);
        EXPECT_GT(min_pencil_eigenvalue(a, x, s->constant_one()), 0.1) << "k=" << k;
    }
}

TEST(InfSup, ConstantDoesNotDecayUnderRefinement)
{
    for (int k : {1, 2}) {
        const double sigma = k == 1 ? 10.0 : 40.0;
        std::vector<double> beta;
        for (int n : {2, 4, 8}) {
            const auto mesh = rect_mesh(1, 1, n, n);
            const auto v = BrokenSpace::make(mesh, k, SpaceKind::vector, false);
            const auto p = BrokenSpace::make(mesh, k, SpaceKind::pressure, true);
            const Eigen::MatrixXd b = dense(assemble_D(v, p).matrix);
            const Eigen::MatrixXd x = dense(assemble_energy_gram(v, sigma, true).matrix);
            const Eigen::MatrixXd m = dense(assemble_mass(p).matrix);
            // sup_v (q, B v)^2 / |||v|||^2 = q^T B X^-1 B^T q
            const Eigen::MatrixXd s = b * x.ldlt().solve(b.transpose());
            beta.push_back(std::sqrt(std::max(0.0, min_pencil_eigenvalue(s, m, m * p->constant_one()))));
        }
        for (double bt : beta) {
            EXPECT_GT(bt, 0.05) << "k=" << k;
        }
        EXPECT_GT(beta.back(), 0.5 * beta.front()) << "k=" << k;
    }
}

TEST(QuadratureSaturation, DoublingTheOrderChangesNothing)
{
    for (int k : {1, 2}) {
        const auto mesh = skewed_fan_mesh();
        const auto s = BrokenSpace::make(mesh, k, SpaceKind::scalar, false);
        const auto v = BrokenSpace::make(mesh, k, SpaceKind::vector, false);
        const auto p = BrokenSpace::make(mesh, k, SpaceKind::pressure, true);
        const QuadratureOrders base = QuadratureOrders::for_degree(k);
        const QuadratureOrders twice{2 * base.element, 2 * base.edge};
        const FieldVector w = random_field(v, 1);
        const FieldVector c = random_field(s, 2);
        const FieldVector phi = random_field(s, 3);
        const auto check = [&](const SparseMatrix& a, const SparseMatrix& b, const char* name) {
            const Eigen::MatrixXd da = dense(a);
            EXPECT_LE(max_abs(da - dense(b)), 1e-12 * std::max(1.0, max_abs(da))) << name << " k=" << k;
        };
        check(assemble_A1(s, 10, base).matrix, assemble_A1(s, 10, twice).matrix, "A1");
        check(assemble_A2(v, 10, base).matrix, assemble_A2(v, 10, twice).matrix, "A2");
        check(assemble_D(v, p, base).matrix, assemble_D(v, p, twice).matrix, "D");
        check(assemble_mass(s, base).matrix, assemble_mass(s, twice).matrix, "mass");
        check(assemble_N1(w, s, base).matrix, assemble_N1(w, s, twice).matrix, "N1");
        check(assemble_N2(w, v, base).matrix, assemble_N2(w, v, twice).matrix, "N2");
        check(assemble_G(c, 0.4, s, base).matrix, assemble_G(c, 0.4, s, twice).matrix, "G");
        const Eigen::VectorXd t1 = assemble_T_rhs(c, phi, v, base);
        const Eigen::VectorXd t2 = assemble_T_rhs(c, phi, v, twice);
        EXPECT_LE((t1 - t2).cwiseAbs().maxCoeff(), 1e-12 * std::max(1.0, t1.cwiseAbs().maxCoeff()));
    }
}

TEST(Sparsity, OnlyEdgeNeighboursCouple)
{
    const auto mesh = rect_mesh(1, 1, 3, 3);
    const auto s = BrokenSpace::make(mesh, 1, SpaceKind::scalar, false);
    const SparseMatrix a = assemble_A1(s, 10).matrix;
    const int n = s->local_size();
    std::vector<std::set<int>> neighbours(mesh->num_elements());
    for (int e = 0; e < mesh->num_elements(); ++e) {
        neighbours[e].insert(e);
    }
    for (int id : mesh->interior_edges()) {
        neighbours[mesh->edge(id).left].insert(mesh->edge(id).right);
        neighbours[mesh->edge(id).right].insert(mesh->edge(id).left);
    }
    for (int r = 0; r < a.outerSize(); ++r) {
        for (SparseMatrix::InnerIterator it(a, r); it; ++it) {
            EXPECT_TRUE(neighbours[r / n].count(static_cast<int>(it.col()) / n));
        }
    }
}

TEST(Drift, ZeroCoefficientGivesZeroOperator)
{
    const auto s = BrokenSpace::make(rect_mesh(1, 1, 2, 2), 2, SpaceKind::scalar, false);
    EXPECT_EQ(max_abs(dense(assemble_G(FieldVector(s), 0.0, s).matrix)), 0.0);
}

TEST(Drift, UnitCoefficientOnContinuousFieldsIsTheDirichletForm)
{
    const auto mesh = rect_mesh(1, 1, 3, 3);
    const auto s = BrokenSpace::make(mesh, 2, SpaceKind::scalar, false);
    const FieldVector psi = interpolate_nodal(s, [](const Vec2& x) { return x.x * x.x - x.x * x.y + 0.3 * x.y; });
    const FieldVector zeta = interpolate_nodal(s, [](const Vec2& x) { return 1 + x.y * x.y - 2 * x.x; });
    const double g = zeta.coefficients().dot(assemble_G(FieldVector(s), 1.0, s).apply(psi));
    // grad psi . grad zeta = (2x - y)(-2) + (-x + 0.3)(2y), integrated over the unit square
    const double exact = -4 * 0.5 + 2 * 0.5 - 2 * 0.25 + 0.3;
    EXPECT_NEAR(g, exact, 1e-12);
}

TEST(ChargeForce, VanishesForZeroChargeOrConstantPotential)
{
    const auto mesh = rect_mesh(1, 1, 2, 2);
    const auto s = BrokenSpace::make(mesh, 2, SpaceKind::scalar, false);
    const auto v = BrokenSpace::make(mesh, 2, SpaceKind::vector, false);
    EXPECT_EQ(assemble_T_rhs(FieldVector(s), random_field(s, 1), v).cwiseAbs().maxCoeff(), 0.0);
    const FieldVector constant(s, 2.5 * s->constant_one());
    EXPECT_LE(assemble_T_rhs(random_field(s, 2), constant, v).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(MixedBc, AllInsulatedReducesToA1)
{
    const auto s = BrokenSpace::make(rect_mesh(1, 2, 2, 4), 2, SpaceKind::scalar, false);
    const MixedBcSystem sys = assemble_A1_mixed_bc(s, 40, {});
    EXPECT_LE(max_abs(dense(sys.op.matrix) - dense(assemble_A1(s, 40).matrix)), 1e-13);
    EXPECT_EQ(sys.load.cwiseAbs().maxCoeff(), 0.0);
}

TEST(MixedBc, RejectsDuplicateTags)
{
    const auto s = BrokenSpace::make(rect_mesh(1, 1, 1, 1), 1, SpaceKind::scalar, false);
    EXPECT_THROW(assemble_A1_mixed_bc(s, 10,
                                      {{BoundaryTag::top, PotentialBcKind::dirichlet, 0.0},
                                       {BoundaryTag::top, PotentialBcKind::flux, 1.0}}),
                 std::invalid_argument);
}

TEST(MixedBc, SurfaceChargeFluxLeavesThroughTheGroundedWall)
{
    const double mu = 0.01;
    const auto mesh = rect_mesh(1, 2, 4, 8);
    const auto s = BrokenSpace::make(mesh, 2, SpaceKind::scalar, false);
    const MixedBcSystem sys = assemble_A1_mixed_bc(
        s, 40, {{BoundaryTag::top, PotentialBcKind::dirichlet, 0.0}, {BoundaryTag::bottom, PotentialBcKind::flux, 1.0}},
        mu);
    const FieldVector phi(s, solve_spd(sys.op.matrix, sys.load).x);

    double top_flux = 0.0;
    double bottom = 0.0;
    const LineRule q = line_rule(4);
    for (int id : mesh->boundary_edges()) {
        const Edge& e = mesh->edge(id);
        for (std::size_t i = 0; i < q.size(); ++i) {
            const EdgePoint pt = edge_point(*mesh, id, q.points[i]);
            const double w = q.weights[i] * e.length;
            if (e.tag == BoundaryTag::top) {
                top_flux += w * mu * dot(phi.gradient(pt.left, pt.xi_left), e.normal);
            } else if (e.tag == BoundaryTag::bottom) {
                bottom += w * 1.0;
            }
        }
    }
    EXPECT_NEAR(top_flux, -bottom, 1e-8);
    // the exact potential is linear and lies in the space
    for (int el = 0; el < mesh->num_elements(); ++el) {
        const Vec2 x = mesh->map(el).to_physical({0.2, 0.5});
        EXPECT_NEAR(phi.value(el, {0.2, 0.5}), (2.0 - x.y) / mu, 1e-8);
    }
}

TEST(MixedBc, GroundedTopConverges)
{
    // phi = cos(pi y / 2) vanishes on y = 1 and has zero normal derivative at y = 0
    const double pi = std::acos(-1.0);
    std::vector<double> err;
    for (int n : {4, 8, 16}) {
        const auto mesh = rect_mesh(1, 1, n, n);
        const auto s = BrokenSpace::make(mesh, 1, SpaceKind::scalar, false);
        const MixedBcSystem sys = assemble_A1_mixed_bc(s, 10, {{BoundaryTag::top, PotentialBcKind::dirichlet, 0.0}});
        const Eigen::VectorXd f =
            assemble_load(s, [&](const Vec2& x) { return pi * pi / 4 * std::cos(pi * x.y / 2); });
        const FieldVector phi(s, solve_spd(sys.op.matrix, sys.load + f).x);
        const FieldVector exact = project_field(s, [&](const Vec2& x) { return std::cos(pi * x.y / 2); });
        const FieldVector d = phi - exact;
        err.push_back(std::sqrt(d.coefficients().dot(assemble_mass(s).apply(d))));
    }
    EXPECT_GT(std::log2(err[1] / err[2]), 1.8);
}
