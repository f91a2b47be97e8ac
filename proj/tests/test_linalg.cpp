#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "dgpnp/forms.hpp"
#include "dgpnp/linalg.hpp"
#include "dgpnp/mms.hpp"
#include "test_util.hpp"

using namespace dgpnp;
using namespace dgpnp::testing;

namespace {

SparseMatrix from_dense(const Eigen::MatrixXd& a) { return a.sparseView(); }

SolverOptions iterative()
{
    SolverOptions o;
    o.kind = SolverKind::iterative;
    o.tol = 1e-12;
    return o;
}

}  // namespace

TEST(Solve, IdentityReturnsRightHandSide)
{
    const SparseMatrix id = from_dense(Eigen::MatrixXd::Identity(5, 5));
    const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(5, -1, 3);
    for (const SolverOptions& o : {SolverOptions{}, iterative()}) {
        EXPECT_LE((solve_spd(id, b, o).x - b).norm(), 1e-14);
        EXPECT_LE((solve_general(id, b, o).x - b).norm(), 1e-14);
    }
}

TEST(Solve, DiagonalDividesComponentwise)
{
    const Eigen::VectorXd d = (Eigen::VectorXd(4) << 2, -4, 0.5, 10).finished();
    const Eigen::VectorXd b = (Eigen::VectorXd(4) << 1, 1, 1, 1).finished();
    const SolveResult r = solve_general(from_dense(d.asDiagonal().toDenseMatrix()), b);
    EXPECT_NEAR(r.x[0], 0.5, 1e-15);
    EXPECT_NEAR(r.x[1], -0.25, 1e-15);
    EXPECT_NEAR(r.x[2], 2.0, 1e-15);
    EXPECT_NEAR(r.x[3], 0.1, 1e-15);
    EXPECT_FALSE(r.report.iterations.has_value());
}

TEST(Solve, MultiplierRowGivesZeroMean)
{
    Eigen::MatrixXd lap(3, 3);
    lap << 1, -1, 0, -1, 2, -1, 0, -1, 1;
    const SparseMatrix a = augment_with_constraint(from_dense(lap), Eigen::VectorXd::Ones(3));
    ASSERT_EQ(a.rows(), 4);
    const Eigen::VectorXd b = (Eigen::VectorXd(4) << 1, 0, -1, 0).finished();
    for (const SolverOptions& o : {SolverOptions{}, iterative()}) {
        const SolveResult r = solve_spd(a, b, o);
        EXPECT_NEAR(r.x.head(3).sum(), 0.0, 1e-13);
        EXPECT_LE((lap * r.x.head(3) - b.head(3)).norm(), 1e-10);
    }
}

TEST(Solve, RejectsBadShapes)
{
    const SparseMatrix a = from_dense(Eigen::MatrixXd::Identity(3, 3));
    EXPECT_THROW(solve_spd(a, Eigen::VectorXd::Ones(2)), std::invalid_argument);
    EXPECT_THROW(solve_general(SparseMatrix(2, 3), Eigen::VectorXd::Ones(2)), std::invalid_argument);
}

TEST(Solve, NonsymmetricMatrixIsRejectedWhenCheckingSymmetry)
{
    Eigen::MatrixXd a(2, 2);
    a << 2, 1, 0, 2;
    SolverOptions o;
    o.verify_symmetry = true;
    EXPECT_THROW(solve_spd(from_dense(a), Eigen::VectorXd::Ones(2), o), std::invalid_argument);
    EXPECT_DOUBLE_EQ(symmetry_defect(from_dense(a)), 1.0);
}

TEST(Solve, SingularMatrixFailsLoudly)
{
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3, 3);
    a(0, 0) = 1;
    EXPECT_THROW(solve_general(from_dense(a), Eigen::VectorXd::Ones(3)), SolverFailure);
}

TEST(Solve, IterationLimitRaisesWithReport)
{
    const auto s = BrokenSpace::make(rect_mesh(1, 1, 8, 8), 1, SpaceKind::scalar, false);
    const SparseMatrix a = assemble_A1(s, 10).matrix + SparseMatrix(assemble_mass(s).matrix);
    SolverOptions o = iterative();
    o.max_iterations = 2;
    try {
        (void)solve_spd(a, Eigen::VectorXd::Ones(a.rows()), o);
        FAIL() << "expected a solver failure";
    } catch (const SolverFailure& e) {
        ASSERT_TRUE(e.report().iterations.has_value());
        EXPECT_LE(*e.report().iterations, 2);
        EXPECT_GT(e.report().relative_residual, o.tol);
    }
}

TEST(Solve, NeumannPoissonConvergesAtSecondOrder)
{
    const double pi = std::numbers::pi;
    const auto exact = [&](const Vec2& x) { return std::cos(pi * x.x) * std::cos(pi * x.y); };
    for (const SolverOptions& o : {SolverOptions{}, iterative()}) {
        std::vector<double> err;
        for (int n : {8, 16, 32}) {
            const auto s = BrokenSpace::make(rect_mesh(1, 1, n, n), 1, SpaceKind::scalar, true);
            const SparseMatrix a = augment_with_constraint(assemble_A1(s, 10).matrix, s->integral_weights());
            Eigen::VectorXd b = Eigen::VectorXd::Zero(a.rows());
            b.head(s->size()) = assemble_load(s, [&](const Vec2& x) { return 2 * pi * pi * exact(x); });
            const SolveResult r = solve_spd(a, b, o);
            if (n == 16) {
                EXPECT_LE(r.report.relative_residual, 1e-10);
            }
            const FieldVector d = FieldVector(s, r.x.head(s->size())) - project_field(s, exact);
            err.push_back(std::sqrt(d.coefficients().dot(assemble_mass(s).apply(d))));
        }
        EXPECT_NEAR(std::log2(err[1] / err[2]), 2.0, 0.25);
    }
}

TEST(Solve, OneStepOfRigidTransport)
{
    // mass/dt + convection by w = (1, 0) moves the profile c = x to x - dt
    const double dt = 0.05;
    const auto mesh = rect_mesh(1, 1, 4, 4);
    const auto s = BrokenSpace::make(mesh, 1, SpaceKind::scalar, false);
    const auto v = BrokenSpace::make(mesh, 1, SpaceKind::vector, false);
    const FieldVector w = project_field(v, [](const Vec2&) { return Vec2{1, 0}; });
    const SparseMatrix m = assemble_mass(s).matrix;
    const SparseMatrix a = (1.0 / dt) * m + assemble_N1(w, s).matrix;
    const FieldVector c0 = project_field(s, [](const Vec2& x) { return x.x; });
    const Eigen::VectorXd rhs = (1.0 / dt) * (m * c0.coefficients());
    const FieldVector expected = project_field(s, [&](const Vec2& x) { return x.x - dt; });
    for (const SolverOptions& o : {SolverOptions{}, iterative()}) {
        const SolveResult r = solve_general(a, rhs, o);
        EXPECT_LE((r.x - expected.coefficients()).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(Solve, ConcentrationSystemAtManufacturedParameters)
{
    const int n = 32;
    const double dt = 0.1 / (n * n);
    const auto mesh = rect_mesh(1, 1, n, n);
    const auto s = BrokenSpace::make(mesh, 1, SpaceKind::scalar, false);
    const auto v = BrokenSpace::make(mesh, 1, SpaceKind::vector, false);
    const FieldVector u = project_field(v, [](const Vec2& x) { return ManufacturedSolution::u(x, 0.0); });
    const SparseMatrix a =
        (1.0 / dt) * SparseMatrix(assemble_mass(s).matrix) + assemble_N1(u, s).matrix + assemble_A1(s, 10).matrix;
    const Eigen::VectorXd b = assemble_load(s, [](const Vec2& x) { return ManufacturedSolution::c1(x, 0.0); });
    for (const SolverOptions& o : {SolverOptions{}, iterative()}) {
        const SolveResult r = solve_general(a, b, o);
        EXPECT_LE(r.report.relative_residual, 1e-10) << r.report.method;
        EXPECT_LE((a * r.x - b).norm() / b.norm(), 1e-10);
    }
}

TEST(LinearSolver, FactorOnceSolveMany)
{
    const auto s = BrokenSpace::make(rect_mesh(1, 1, 4, 4), 2, SpaceKind::scalar, false);
    const SparseMatrix a = assemble_A1(s, 40).matrix + SparseMatrix(assemble_mass(s).matrix);
    LinearSolver solver(true, {});
    EXPECT_FALSE(solver.factored());
    EXPECT_THROW((void)solver.solve(Eigen::VectorXd::Ones(a.rows())), std::logic_error);
    solver.factor(a);
    ASSERT_TRUE(solver.factored());
    for (unsigned seed = 0; seed < 3; ++seed) {
        const Eigen::VectorXd b = random_field(s, seed).coefficients();
        EXPECT_LE((a * solver.solve(b).x - b).norm(), 1e-10 * b.norm());
    }
    // same pattern, new values
    const SparseMatrix a2 = 2.0 * a;
    solver.factor(a2);
    const Eigen::VectorXd b = Eigen::VectorXd::Ones(a.rows());
    EXPECT_LE((a2 * solver.solve(b).x - b).norm(), 1e-10 * b.norm());
}

TEST(MatrixMarket, WritesCoordinateFormat)
{
    Eigen::MatrixXd d(2, 3);
    d << 1.5, 0, -2, 0, 0, 1e-17;
    const std::string path = (std::filesystem::temp_directory_path() / "dgpnp_mm_test.mtx").string();
    write_matrix_market(path, from_dense(d));
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header.rfind("%%MatrixMarket matrix coordinate real general", 0), 0u);
    int r = 0, c = 0, nnz = 0;
    in >> r >> c >> nnz;
    EXPECT_EQ(r, 2);
    EXPECT_EQ(c, 3);
    EXPECT_EQ(nnz, 3);
    int i = 0, j = 0;
    double v = 0;
    in >> i >> j >> v;
    EXPECT_EQ(i, 1);
    EXPECT_EQ(j, 1);
    EXPECT_EQ(v, 1.5);
    std::filesystem::remove(path);
}
