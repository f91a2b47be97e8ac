#pragma once

#include <optional>
#include <vector>

#include "dgpnp/linalg.hpp"
#include "dgpnp/space.hpp"

namespace dgpnp {

/// Coefficients of the model and the interior-penalty parameter.
struct FormParams {
    double sigma{10.0};
    double mu{1.0};
    double nu{1.0};
    double kappa1{1.0};
    double kappa2{1.0};
    double beta1{1.0};
    double beta2{-1.0};

    /// Throws std::invalid_argument unless sigma, mu, nu and the kappas are positive.
    void validate() const;
};

/// Exactness of the element and edge rules used by assembly.
struct QuadratureOrders {
    int element{0};
    int edge{0};

    /// 2k+2 on elements and 2k+1 on edges, raised to 3k so that the
    /// trilinear terms are integrated exactly.
    static QuadratureOrders for_degree(int k);
};

/// A sparse operator with rows indexed by test dofs and columns by trial dofs.
struct AssembledOperator {
    SparseMatrix matrix;
    SpacePtr row_space;
    SpacePtr col_space;

    [[nodiscard]] Eigen::VectorXd apply(const FieldVector& v) const { return matrix * v.coefficients(); }
};

/// SIPG Laplacian over interior edges (homogeneous Neumann). Works on scalar
/// and pressure spaces.
AssembledOperator assemble_A1(const SpacePtr& space, double sigma,
                              std::optional<QuadratureOrders> orders = std::nullopt);

/// SIPG vector Laplacian over all edges (weak no-slip).
AssembledOperator assemble_A2(const SpacePtr& vspace, double sigma,
                              std::optional<QuadratureOrders> orders = std::nullopt);

/// One diagonal block of assemble_A2, acting on a single velocity component
/// represented in `scalar_space` (same mesh and degree).
AssembledOperator assemble_A2_component(const SpacePtr& scalar_space, double sigma,
                                        std::optional<QuadratureOrders> orders = std::nullopt);

/// Velocity-pressure coupling, rows = pressure, columns = velocity:
/// D(v,q) = sum_E int q div v - sum_{all e} int {q} n.[v].
AssembledOperator assemble_D(const SpacePtr& vspace, const SpacePtr& pspace,
                             std::optional<QuadratureOrders> orders = std::nullopt);

/// The integrated-by-parts expression
/// -sum_E int v.grad q + sum_{interior e} int {v}.n [q].
AssembledOperator assemble_D_by_parts(const SpacePtr& vspace, const SpacePtr& pspace,
                                      std::optional<QuadratureOrders> orders = std::nullopt);

/// Skew-stabilized scalar convection N1(w; psi, chi) over interior edges.
AssembledOperator assemble_N1(const FieldVector& w, const SpacePtr& space,
                              std::optional<QuadratureOrders> orders = std::nullopt);

/// Vector convection N2(w; v, phi) over all edges.
AssembledOperator assemble_N2(const FieldVector& w, const SpacePtr& vspace,
                              std::optional<QuadratureOrders> orders = std::nullopt);

/// One diagonal block of assemble_N2 in `scalar_space`.
AssembledOperator assemble_N2_component(const FieldVector& w, const SpacePtr& scalar_space,
                                        std::optional<QuadratureOrders> orders = std::nullopt);

/// Drift operator G(c + shift; psi, zeta): columns = potential (trial),
/// rows = test functions. Interior edges only, no penalty.
AssembledOperator assemble_G(const FieldVector& c, double shift, const SpacePtr& space,
                             std::optional<QuadratureOrders> orders = std::nullopt);

/// Load vector -T(d, phi, .) on the velocity space.
Eigen::VectorXd assemble_T_rhs(const FieldVector& charge, const FieldVector& phi,
                               const SpacePtr& vspace,
                               std::optional<QuadratureOrders> orders = std::nullopt);

/// Block-diagonal mass matrix.
AssembledOperator assemble_mass(const SpacePtr& space,
                                std::optional<QuadratureOrders> orders = std::nullopt);

/// Gram matrix of the energy norm: broken H1 seminorm plus sigma/h_e jump
/// penalty over interior edges, or over all edges when `all_edges` is set.
AssembledOperator assemble_energy_gram(const SpacePtr& space, double sigma, bool all_edges,
                                       std::optional<QuadratureOrders> orders = std::nullopt);

/// Load vector (f, chi) for a pointwise source.
Eigen::VectorXd assemble_load(const SpacePtr& space, const ScalarFunction& f,
                              std::optional<int> quad_degree = std::nullopt);
Eigen::VectorXd assemble_load(const SpacePtr& space, const VectorFunction& f,
                              std::optional<int> quad_degree = std::nullopt);

enum class PotentialBcKind { dirichlet, flux, insulated };

struct PotentialBc {
    BoundaryTag tag{BoundaryTag::bottom};
    PotentialBcKind kind{PotentialBcKind::insulated};
    double value{0.0};  ///< g for Dirichlet, sigma_s for flux (mu grad phi . n = sigma_s)
};

struct MixedBcSystem {
    AssembledOperator op;   ///< mu * (A1 + Dirichlet SIPG terms)
    Eigen::VectorXd load;   ///< Dirichlet lifting plus surface-charge flux
};

/// Potential operator with Dirichlet, surface-charge and insulating walls.
/// Tags not listed are insulated; listing a tag twice is an error.
MixedBcSystem assemble_A1_mixed_bc(const SpacePtr& space, double sigma,
                                   const std::vector<PotentialBc>& bcs, double mu = 1.0,
                                   std::optional<QuadratureOrders> orders = std::nullopt);

}  // namespace dgpnp
