#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>

#include "dgpnp/basis.hpp"
#include "dgpnp/mesh.hpp"

namespace dgpnp {

using ScalarFunction = std::function<double(const Vec2&)>;
using VectorFunction = std::function<Vec2(const Vec2&)>;

enum class SpaceKind {
    scalar,    ///< P_k per element (potential, concentrations)
    vector,    ///< (P_k)^2 per element (velocity)
    pressure,  ///< P_{k-1} per element
};

/// Fully discontinuous polynomial space on a triangulation.
///
/// Dofs are numbered component-major: all dofs of component 0 first, then
/// component 1, each block ordered element by element. Vector operators that
/// act componentwise are therefore block diagonal.
class BrokenSpace {
public:
    BrokenSpace(std::shared_ptr<const TriMesh> mesh, int degree, SpaceKind kind, bool zero_mean,
                BasisKind basis = BasisKind::orthonormal);

    static std::shared_ptr<const BrokenSpace> make(std::shared_ptr<const TriMesh> mesh, int degree,
                                                   SpaceKind kind, bool zero_mean,
                                                   BasisKind basis = BasisKind::orthonormal)
    {
        return std::make_shared<const BrokenSpace>(std::move(mesh), degree, kind, zero_mean, basis);
    }

    [[nodiscard]] const TriMesh& mesh() const { return *mesh_; }
    [[nodiscard]] const std::shared_ptr<const TriMesh>& mesh_ptr() const { return mesh_; }
    [[nodiscard]] int degree() const { return degree_; }
    [[nodiscard]] int poly_degree() const { return basis_.degree(); }
    [[nodiscard]] SpaceKind kind() const { return kind_; }
    [[nodiscard]] bool zero_mean_constrained() const { return zero_mean_; }
    [[nodiscard]] int components() const { return kind_ == SpaceKind::vector ? 2 : 1; }
    [[nodiscard]] int local_size() const { return basis_.size(); }
    [[nodiscard]] int dofs_per_element() const { return components() * local_size(); }
    [[nodiscard]] int component_size() const { return mesh_->num_elements() * local_size(); }
    [[nodiscard]] int size() const { return components() * component_size(); }
    [[nodiscard]] const LocalBasis& basis() const { return basis_; }

    [[nodiscard]] int dof(int element, int component, int local) const
    {
        return component * component_size() + element * local_size() + local;
    }

    /// Integral of every basis function over its element (per dof).
    [[nodiscard]] const Eigen::VectorXd& integral_weights() const { return integrals_; }
    /// Coefficients of the field that equals 1 (componentwise for vectors).
    [[nodiscard]] const Eigen::VectorXd& constant_one() const { return ones_; }
    /// Local mass matrix of one component on element e.
    [[nodiscard]] Eigen::MatrixXd element_mass(int e) const
    {
        return std::abs(mesh_->map(e).det) * reference_mass_;
    }
    [[nodiscard]] const Eigen::MatrixXd& reference_mass() const { return reference_mass_; }

private:
    std::shared_ptr<const TriMesh> mesh_;
    int degree_;
    SpaceKind kind_;
    bool zero_mean_;
    LocalBasis basis_;
    Eigen::MatrixXd reference_mass_;
    Eigen::VectorXd integrals_;
    Eigen::VectorXd ones_;
};

using SpacePtr = std::shared_ptr<const BrokenSpace>;

/// Coefficient vector of one discrete field.
class FieldVector {
public:
    FieldVector() = default;
    explicit FieldVector(SpacePtr space);
    FieldVector(SpacePtr space, Eigen::VectorXd coefficients);

    [[nodiscard]] const SpacePtr& space() const { return space_; }
    [[nodiscard]] const Eigen::VectorXd& coefficients() const { return coeffs_; }
    [[nodiscard]] Eigen::VectorXd& coefficients() { return coeffs_; }
    [[nodiscard]] Eigen::Index size() const { return coeffs_.size(); }

    [[nodiscard]] auto element_block(int e, int component = 0) const
    {
        return coeffs_.segment(space_->dof(e, component, 0), space_->local_size());
    }

    /// Value of one component at reference point xi of element e.
    [[nodiscard]] double value(int e, const Vec2& xi, int component = 0) const;
    /// Physical gradient of one component at reference point xi of element e.
    [[nodiscard]] Vec2 gradient(int e, const Vec2& xi, int component = 0) const;

    FieldVector& operator+=(const FieldVector& o);
    FieldVector& operator-=(const FieldVector& o);
    FieldVector& operator*=(double s);

private:
    SpacePtr space_;
    Eigen::VectorXd coeffs_;
};

FieldVector operator+(FieldVector a, const FieldVector& b);
FieldVector operator-(FieldVector a, const FieldVector& b);
FieldVector operator*(double s, FieldVector a);

struct BasisValues {
    Eigen::VectorXd values;       // per local scalar shape function
    Eigen::MatrixX2d gradients;   // physical gradients, one row per shape function
};

/// Shape functions of `space` on `element` at a reference point. Vector
/// spaces use the same scalar shape functions for each component.
BasisValues basis_eval(const BrokenSpace& space, int element, const Vec2& xi);

/// Element-wise L2 projection. quad_degree < 0 picks 2p + 6.
FieldVector project_field(const SpacePtr& space, const ScalarFunction& f, int quad_degree = -1);
FieldVector project_field(const SpacePtr& space, const VectorFunction& f, int quad_degree = -1);

/// Nodal interpolation at the local basis nodes (scalar spaces).
FieldVector interpolate_nodal(const SpacePtr& space, const ScalarFunction& f);

/// Integral over the domain of one component.
double integrate(const FieldVector& v, int component = 0);

/// v - (1/|Omega|) int v. Scalar and pressure spaces only.
FieldVector enforce_zero_mean(const FieldVector& v);

}  // namespace dgpnp
