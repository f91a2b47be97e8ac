#include "dgpnp/linalg.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <unsupported/Eigen/IterativeSolvers>
#include <vector>

namespace dgpnp {

namespace {

using ColMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;
using Clock = std::chrono::steady_clock;

double relative_residual(const SparseMatrix& a, const Eigen::VectorXd& x, const Eigen::VectorXd& b)
{
    const double bn = b.norm();
    const double rn = (a * x - b).norm();
    return bn > 0.0 ? rn / bn : rn;
}

void check_square(const SparseMatrix& a, const Eigen::VectorXd& b)
{
    if (a.rows() != a.cols() || a.rows() == 0) {
        throw std::invalid_argument("linear solve: matrix must be square and non-empty");
    }
    if (b.size() != a.rows()) {
        throw std::invalid_argument("linear solve: right-hand side size mismatch");
    }
}

}  // namespace

namespace {

// Eigen stops on its recursively updated residual, which can drift from the
// true one; restart from the current iterate until the true residual meets
// the tolerance or the iteration budget is spent.
template <typename Solver>
int iterate_to_tolerance(Solver& solver, const SparseMatrix& a, const Eigen::VectorXd& b,
                         const SolverOptions& opts, Eigen::VectorXd& x)
{
    solver.setMaxIterations(opts.max_iterations);
    x = solver.solve(b);
    int used = static_cast<int>(solver.iterations());
    while (used < opts.max_iterations && x.allFinite() && relative_residual(a, x, b) > opts.tol) {
        solver.setMaxIterations(opts.max_iterations - used);
        const Eigen::VectorXd guess = x;
        x = solver.solveWithGuess(b, guess);
        const int more = static_cast<int>(solver.iterations());
        if (more == 0) {
            break;
        }
        used += more;
    }
    return used;
}

}  // namespace

struct LinearSolver::Impl {
    using Direct = Eigen::SparseLU<ColMatrix, Eigen::COLAMDOrdering<int>>;
    using Minres = Eigen::MINRES<SparseMatrix, Eigen::Lower | Eigen::Upper,
                                 Eigen::DiagonalPreconditioner<double>>;
    using Gmres = Eigen::GMRES<SparseMatrix, Eigen::DiagonalPreconditioner<double>>;

    bool symmetric;
    SolverOptions opts;
    SparseMatrix matrix;
    bool analyzed{false};
    bool ready{false};
    std::unique_ptr<Direct> direct;
    std::unique_ptr<Minres> minres;
    std::unique_ptr<Gmres> gmres;
};

LinearSolver::LinearSolver(bool symmetric, SolverOptions opts) : impl_(std::make_unique<Impl>())
{
    impl_->symmetric = symmetric;
    impl_->opts = opts;
}

LinearSolver::~LinearSolver() = default;
LinearSolver::LinearSolver(LinearSolver&&) noexcept = default;
LinearSolver& LinearSolver::operator=(LinearSolver&&) noexcept = default;

bool LinearSolver::factored() const { return impl_->ready; }

void LinearSolver::factor(const SparseMatrix& a)
{
    if (a.rows() != a.cols() || a.rows() == 0) {
        throw std::invalid_argument("LinearSolver: matrix must be square and non-empty");
    }
    Impl& s = *impl_;
    if (s.symmetric && s.opts.verify_symmetry) {
        const double defect = symmetry_defect(a);
        if (defect > 1e-12 * std::max(1.0, a.coeffs().cwiseAbs().maxCoeff())) {
            throw std::invalid_argument("solve_spd: matrix is not symmetric");
        }
    }
    SparseMatrix incoming = a;
    incoming.makeCompressed();
    const bool same_pattern =
        s.analyzed && s.matrix.rows() == incoming.rows() &&
        s.matrix.nonZeros() == incoming.nonZeros() &&
        std::equal(s.matrix.outerIndexPtr(), s.matrix.outerIndexPtr() + s.matrix.outerSize() + 1,
                   incoming.outerIndexPtr()) &&
        std::equal(s.matrix.innerIndexPtr(), s.matrix.innerIndexPtr() + s.matrix.nonZeros(),
                   incoming.innerIndexPtr());
    s.matrix = std::move(incoming);
    s.ready = false;
    if (s.opts.kind == SolverKind::direct) {
        const ColMatrix col = s.matrix;
        if (!s.direct || !same_pattern) {
            s.direct = std::make_unique<Impl::Direct>();
            s.direct->analyzePattern(col);
            s.analyzed = true;
        }
        s.direct->factorize(col);
        if (s.direct->info() != Eigen::Success) {
            throw SolverFailure("sparse LU factorization failed: " + s.direct->lastErrorMessage(),
                                LinearSolveReport{std::nullopt, 0.0, 0.0, "sparse-lu"});
        }
    } else if (s.symmetric) {
        s.minres = std::make_unique<Impl::Minres>();
        s.minres->setTolerance(s.opts.tol);
        s.minres->setMaxIterations(s.opts.max_iterations);
        s.minres->compute(s.matrix);
    } else {
        s.gmres = std::make_unique<Impl::Gmres>();
        s.gmres->setTolerance(s.opts.tol);
        s.gmres->setMaxIterations(s.opts.max_iterations);
        s.gmres->set_restart(60);
        s.gmres->compute(s.matrix);
    }
    s.ready = true;
}

SolveResult LinearSolver::solve(const Eigen::VectorXd& b) const
{
    const Impl& s = *impl_;
    if (!s.ready) {
        throw std::logic_error("LinearSolver: solve before factor");
    }
    check_square(s.matrix, b);
    const auto start = Clock::now();
    SolveResult out;
    if (b.norm() == 0.0) {
        out.x = Eigen::VectorXd::Zero(b.size());
        out.report.method = "trivial";
        return out;
    }
    if (s.opts.kind == SolverKind::direct) {
        out.x = s.direct->solve(b);
        out.report.method = "sparse-lu";
    } else if (s.symmetric) {
        out.report.method = "minres";
        out.report.iterations = iterate_to_tolerance(*s.minres, s.matrix, b, s.opts, out.x);
    } else {
        out.report.method = "gmres";
        out.report.iterations = iterate_to_tolerance(*s.gmres, s.matrix, b, s.opts, out.x);
    }
    out.report.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    out.report.relative_residual = relative_residual(s.matrix, out.x, b);
    if (!out.x.allFinite() || !(out.report.relative_residual <= s.opts.tol)) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s solve did not reach tolerance: residual %.3e > %.3e",
                      out.report.method.c_str(), out.report.relative_residual, s.opts.tol);
        throw SolverFailure(buf, out.report);
    }
    return out;
}

SolveResult solve_spd(const SparseMatrix& a, const Eigen::VectorXd& b, const SolverOptions& opts)
{
    check_square(a, b);
    LinearSolver solver(true, opts);
    const auto start = Clock::now();
    solver.factor(a);
    SolveResult r = solver.solve(b);
    r.report.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return r;
}

SolveResult solve_general(const SparseMatrix& a, const Eigen::VectorXd& b, const SolverOptions& opts)
{
    check_square(a, b);
    LinearSolver solver(false, opts);
    const auto start = Clock::now();
    solver.factor(a);
    SolveResult r = solver.solve(b);
    r.report.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return r;
}

SparseMatrix augment_with_constraint(const SparseMatrix& a, const Eigen::VectorXd& c)
{
    if (a.rows() != a.cols() || c.size() != a.rows()) {
        throw std::invalid_argument("augment_with_constraint: size mismatch");
    }
    const Eigen::Index n = a.rows();
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(static_cast<std::size_t>(a.nonZeros() + 2 * n));
    for (Eigen::Index r = 0; r < a.outerSize(); ++r) {
        for (SparseMatrix::InnerIterator it(a, r); it; ++it) {
            t.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
        }
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (c[i] != 0.0) {
            t.emplace_back(static_cast<int>(i), static_cast<int>(n), c[i]);
            t.emplace_back(static_cast<int>(n), static_cast<int>(i), c[i]);
        }
    }
    SparseMatrix out(n + 1, n + 1);
    out.setFromTriplets(t.begin(), t.end());
    return out;
}

double symmetry_defect(const SparseMatrix& a)
{
    const SparseMatrix at = a.transpose();
    const SparseMatrix diff = a - at;
    return diff.nonZeros() == 0 ? 0.0 : diff.coeffs().cwiseAbs().maxCoeff();
}

void write_matrix_market(const std::string& path, const SparseMatrix& a)
{
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("write_matrix_market: cannot open " + path);
    }
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << a.rows() << ' ' << a.cols() << ' ' << a.nonZeros() << '\n';
    char buf[64];
    for (Eigen::Index r = 0; r < a.outerSize(); ++r) {
        for (SparseMatrix::InnerIterator it(a, r); it; ++it) {
            std::snprintf(buf, sizeof buf, "%.17g", it.value());
            out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << buf << '\n';
        }
    }
    if (!out) {
        throw std::runtime_error("write_matrix_market: write failed for " + path);
    }
}

}  // namespace dgpnp
