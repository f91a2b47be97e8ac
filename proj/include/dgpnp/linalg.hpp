#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

namespace dgpnp {

/// Compressed-row sparse matrix.
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

enum class SolverKind { direct, iterative };

struct SolverOptions {
    SolverKind kind{SolverKind::direct};
    double tol{1e-10};
    int max_iterations{5000};
    /// Check symmetry of "SPD" systems before solving.
    bool verify_symmetry{false};
};

struct LinearSolveReport {
    std::optional<int> iterations;  ///< empty for direct solves
    double relative_residual{0.0};
    double wall_seconds{0.0};
    std::string method;
};

class SolverFailure : public std::runtime_error {
public:
    SolverFailure(const std::string& what, LinearSolveReport report)
        : std::runtime_error(what), report_(std::move(report))
    {
    }
    [[nodiscard]] const LinearSolveReport& report() const { return report_; }

private:
    LinearSolveReport report_;
};

struct SolveResult {
    Eigen::VectorXd x;
    LinearSolveReport report;
};

/// Symmetric systems, possibly augmented with a zero-mean multiplier.
SolveResult solve_spd(const SparseMatrix& a, const Eigen::VectorXd& b, const SolverOptions& opts = {});

/// Square nonsymmetric systems.
SolveResult solve_general(const SparseMatrix& a, const Eigen::VectorXd& b,
                          const SolverOptions& opts = {});

/// Factor-once, solve-many wrapper. Refactoring a matrix with the same
/// sparsity pattern reuses the symbolic analysis.
class LinearSolver {
public:
    LinearSolver(bool symmetric, SolverOptions opts);
    ~LinearSolver();
    LinearSolver(LinearSolver&&) noexcept;
    LinearSolver& operator=(LinearSolver&&) noexcept;

    void factor(const SparseMatrix& a);
    [[nodiscard]] SolveResult solve(const Eigen::VectorXd& b) const;
    [[nodiscard]] bool factored() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Returns [A c; c^T 0], the system enforcing c^T x = 0 by a multiplier.
SparseMatrix augment_with_constraint(const SparseMatrix& a, const Eigen::VectorXd& c);

/// max |A - A^T|.
double symmetry_defect(const SparseMatrix& a);

/// Matrix Market coordinate export with 17 significant digits.
void write_matrix_market(const std::string& path, const SparseMatrix& a);

}  // namespace dgpnp
