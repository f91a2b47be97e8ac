#pragma once

#include <vector>

#include "dgpnp/mesh.hpp"

namespace dgpnp {

/// Quadrature on the reference triangle (0,0),(1,0),(0,1); weights sum to 1/2.
struct QuadratureRule {
    std::vector<Vec2> points;
    std::vector<double> weights;
    int degree{0};

    [[nodiscard]] std::size_t size() const { return weights.size(); }
};

/// Gauss rule on the unit interval [0,1]; weights sum to 1.
struct LineRule {
    std::vector<double> points;
    std::vector<double> weights;
    int degree{0};

    [[nodiscard]] std::size_t size() const { return weights.size(); }
};

/// Gauss-Legendre rule with n points on [0,1] (exact to degree 2n-1).
LineRule gauss_legendre(int n);

/// Smallest Gauss-Legendre rule exact for polynomials of the given degree.
LineRule line_rule(int degree);

/// Symmetric rule with positive weights exact to at least `degree`.
/// Dunavant rules are used where they have positive weights and interior
/// points; other degrees fall back to a collapsed (Duffy) Gauss product rule.
QuadratureRule triangle_rule(int degree);

/// Collapsed Gauss product rule (n x n points), exact to degree 2n-2.
QuadratureRule collapsed_gauss_rule(int degree);

}  // namespace dgpnp
