#include "dgpnp/basis.hpp"

#include <cmath>
#include <stdexcept>

#include "dgpnp/quadrature.hpp"

namespace dgpnp {

LocalBasis::LocalBasis(int degree, BasisKind kind)
    : degree_(degree), kind_(kind), size_(polynomial_dim(degree))
{
    if (degree < 0) {
        throw std::invalid_argument("LocalBasis: negative degree");
    }
    for (int d = 0; d <= degree; ++d) {
        for (int b = 0; b <= d; ++b) {
            exponents_.emplace_back(d - b, b);
        }
    }

    if (degree == 0) {
        nodes_.push_back({1.0 / 3.0, 1.0 / 3.0});
    } else {
        for (int j = 0; j <= degree; ++j) {
            for (int i = 0; i + j <= degree; ++i) {
                nodes_.push_back({static_cast<double>(i) / degree, static_cast<double>(j) / degree});
            }
        }
    }

    // Vandermonde V(l, j) = m_l(node_j)
    Eigen::MatrixXd vandermonde(size_, size_);
    Eigen::VectorXd m(size_);
    for (int j = 0; j < size_; ++j) {
        monomials(nodes_[j], m);
        vandermonde.col(j) = m;
    }

    if (kind == BasisKind::lagrange) {
        coeffs_ = vandermonde.inverse();
    } else {
        const QuadratureRule rule = triangle_rule(2 * degree);
        Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(size_, size_);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            monomials(rule.points[q], m);
            gram.noalias() += rule.weights[q] * m * m.transpose();
        }
        const Eigen::LLT<Eigen::MatrixXd> llt(gram);
        if (llt.info() != Eigen::Success) {
            throw std::runtime_error("LocalBasis: monomial Gram matrix is not positive definite");
        }
        const Eigen::MatrixXd lower = llt.matrixL();
        coeffs_ = lower.triangularView<Eigen::Lower>().solve(
            Eigen::MatrixXd::Identity(size_, size_));
    }
    // basis values at nodes: B(i, j) = phi_i(node_j) = (coeffs * V)(i, j)
    const Eigen::MatrixXd at_nodes = coeffs_ * vandermonde;
    nodal_to_modal_ = at_nodes.transpose().inverse();
}

void LocalBasis::monomials(const Vec2& xi, Eigen::Ref<Eigen::VectorXd> m) const
{
    for (int l = 0; l < size_; ++l) {
        const auto [a, b] = exponents_[l];
        m[l] = std::pow(xi.x, a) * std::pow(xi.y, b);
    }
}

void LocalBasis::eval(const Vec2& xi, Eigen::Ref<Eigen::VectorXd> values) const
{
    Eigen::VectorXd m(size_);
    monomials(xi, m);
    values.noalias() = coeffs_ * m;
}

void LocalBasis::eval(const Vec2& xi, Eigen::Ref<Eigen::VectorXd> values,
                      Eigen::Ref<Eigen::MatrixX2d> grads) const
{
    Eigen::VectorXd m(size_);
    Eigen::MatrixX2d dm(size_, 2);
    for (int l = 0; l < size_; ++l) {
        const auto [a, b] = exponents_[l];
        m[l] = std::pow(xi.x, a) * std::pow(xi.y, b);
        dm(l, 0) = a == 0 ? 0.0 : a * std::pow(xi.x, a - 1) * std::pow(xi.y, b);
        dm(l, 1) = b == 0 ? 0.0 : b * std::pow(xi.x, a) * std::pow(xi.y, b - 1);
    }
    values.noalias() = coeffs_ * m;
    grads.noalias() = coeffs_ * dm;
}

Eigen::VectorXd LocalBasis::interpolate_nodal(const Eigen::VectorXd& node_values) const
{
    if (node_values.size() != size_) {
        throw std::invalid_argument("LocalBasis::interpolate_nodal: size mismatch");
    }
    return nodal_to_modal_ * node_values;
}

}  // namespace dgpnp
