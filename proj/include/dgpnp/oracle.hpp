#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "dgpnp/forms.hpp"

// Reference implementations used only for verification. Every form is
// evaluated pair by pair from its defining integrals with dense storage,
// a separately built collapsed Gauss rule and geometry recomputed from the
// vertex coordinates. Nothing here shares code with the assembly routines
// beyond the local basis, which defines what the dofs mean.
namespace dgpnp::oracle {

Eigen::MatrixXd A1(const SpacePtr& space, double sigma);
Eigen::MatrixXd A2(const SpacePtr& vspace, double sigma);
Eigen::MatrixXd D(const SpacePtr& vspace, const SpacePtr& pspace);
Eigen::MatrixXd D_by_parts(const SpacePtr& vspace, const SpacePtr& pspace);
Eigen::MatrixXd N1(const FieldVector& w, const SpacePtr& space);
Eigen::MatrixXd N2(const FieldVector& w, const SpacePtr& vspace);
Eigen::MatrixXd G(const FieldVector& c, double shift, const SpacePtr& space);
/// T(charge, phi, v_i) for every velocity basis function v_i.
Eigen::VectorXd T(const FieldVector& charge, const FieldVector& phi, const SpacePtr& vspace);
Eigen::MatrixXd mass(const SpacePtr& space);

/// Gauss-Legendre nodes and weights on [-1, 1] from the Jacobi matrix.
void gauss_legendre_golub_welsch(int n, std::vector<double>& nodes, std::vector<double>& weights);

struct OracleComparison {
    std::string name;
    double max_abs_diff{0.0};
    double max_entry{0.0};
};

/// Compares every assembled operator against its dense counterpart for
/// k = 1, 2 on two two-triangle meshes and on a four-triangle fan around an
/// off-centre vertex.
std::vector<OracleComparison> compare_forms(BasisKind basis, double sigma = 10.0, unsigned seed = 7);

struct ResidualReport {
    std::string equation;
    double max_residual{0.0};
};

/// Evaluates the strong-form residual of the manufactured solution with the
/// closed-form sources, differentiating the raw fields by sixth-order
/// central differences in long double at `points` random (x, y, t).
std::vector<ResidualReport> manufactured_residuals(const FormParams& params, int points = 200,
                                                   unsigned seed = 2024);

}  // namespace dgpnp::oracle
