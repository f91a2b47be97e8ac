#pragma once

#include <Eigen/Dense>
#include <vector>

#include "dgpnp/mesh.hpp"

namespace dgpnp {

enum class BasisKind {
    orthonormal,  ///< monomials orthonormalized on the reference triangle
    lagrange,     ///< nodal basis on equispaced points (barycentric for k = 1)
};

/// Complete polynomial basis of degree p on the reference triangle, stored as
/// a change of basis from the monomials x^a y^b ordered by total degree.
class LocalBasis {
public:
    LocalBasis(int degree, BasisKind kind);

    [[nodiscard]] int degree() const { return degree_; }
    [[nodiscard]] BasisKind kind() const { return kind_; }
    [[nodiscard]] int size() const { return size_; }

    /// Values at a reference point.
    void eval(const Vec2& xi, Eigen::Ref<Eigen::VectorXd> values) const;
    /// Values and reference gradients (columns: d/dxi, d/deta).
    void eval(const Vec2& xi, Eigen::Ref<Eigen::VectorXd> values,
              Eigen::Ref<Eigen::MatrixX2d> grads) const;

    /// Reference-triangle nodes used for the nodal basis and interpolation.
    [[nodiscard]] const std::vector<Vec2>& nodes() const { return nodes_; }

    /// Coefficients c with sum_i c_i phi_i(node_j) = values_j.
    [[nodiscard]] Eigen::VectorXd interpolate_nodal(const Eigen::VectorXd& node_values) const;

private:
    void monomials(const Vec2& xi, Eigen::Ref<Eigen::VectorXd> m) const;

    int degree_;
    BasisKind kind_;
    int size_;
    std::vector<std::pair<int, int>> exponents_;
    Eigen::MatrixXd coeffs_;    // phi_i = sum_j coeffs_(i, j) m_j
    Eigen::MatrixXd nodal_to_modal_;
    std::vector<Vec2> nodes_;
};

/// Number of polynomials of total degree <= p in two variables.
constexpr int polynomial_dim(int p) { return p < 0 ? 0 : (p + 1) * (p + 2) / 2; }

}  // namespace dgpnp
