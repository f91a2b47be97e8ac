#include "dgpnp/space.hpp"

#include <stdexcept>

#include "dgpnp/quadrature.hpp"

namespace dgpnp {

BrokenSpace::BrokenSpace(std::shared_ptr<const TriMesh> mesh, int degree, SpaceKind kind,
                         bool zero_mean, BasisKind basis)
    : mesh_(std::move(mesh)),
      degree_(degree),
      kind_(kind),
      zero_mean_(zero_mean),
      basis_(kind == SpaceKind::pressure ? degree - 1 : degree, basis)
{
    if (!mesh_) {
        throw std::invalid_argument("BrokenSpace: null mesh");
    }
    if (degree < 1) {
        throw std::invalid_argument("BrokenSpace: degree must be >= 1");
    }
    const int n = local_size();
    const QuadratureRule rule = triangle_rule(2 * poly_degree());
    reference_mass_ = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd ref_integrals = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd phi(n);
    for (std::size_t q = 0; q < rule.size(); ++q) {
        basis_.eval(rule.points[q], phi);
        reference_mass_.noalias() += rule.weights[q] * phi * phi.transpose();
        ref_integrals += rule.weights[q] * phi;
    }
    // representation of the constant 1 on the reference element
    const Eigen::VectorXd ref_one = reference_mass_.ldlt().solve(ref_integrals);

    integrals_.resize(size());
    ones_.resize(size());
    for (int c = 0; c < components(); ++c) {
        for (int e = 0; e < mesh_->num_elements(); ++e) {
            const double det = std::abs(mesh_->map(e).det);
            integrals_.segment(dof(e, c, 0), n) = det * ref_integrals;
            ones_.segment(dof(e, c, 0), n) = ref_one;
        }
    }
}

FieldVector::FieldVector(SpacePtr space)
    : space_(std::move(space)), coeffs_(Eigen::VectorXd::Zero(space_ ? space_->size() : 0))
{
}

FieldVector::FieldVector(SpacePtr space, Eigen::VectorXd coefficients)
    : space_(std::move(space)), coeffs_(std::move(coefficients))
{
    if (!space_ || coeffs_.size() != space_->size()) {
        throw std::invalid_argument("FieldVector: coefficient length does not match the space");
    }
}

double FieldVector::value(int e, const Vec2& xi, int component) const
{
    Eigen::VectorXd phi(space_->local_size());
    space_->basis().eval(xi, phi);
    return phi.dot(element_block(e, component));
}

Vec2 FieldVector::gradient(int e, const Vec2& xi, int component) const
{
    const BasisValues b = basis_eval(*space_, e, xi);
    const Eigen::Vector2d g = b.gradients.transpose() * element_block(e, component);
    return {g[0], g[1]};
}

FieldVector& FieldVector::operator+=(const FieldVector& o)
{
    if (o.space_ != space_) {
        throw std::invalid_argument("FieldVector: space mismatch");
    }
    coeffs_ += o.coeffs_;
    return *this;
}

FieldVector& FieldVector::operator-=(const FieldVector& o)
{
    if (o.space_ != space_) {
        throw std::invalid_argument("FieldVector: space mismatch");
    }
    coeffs_ -= o.coeffs_;
    return *this;
}

FieldVector& FieldVector::operator*=(double s)
{
    coeffs_ *= s;
    return *this;
}

FieldVector operator+(FieldVector a, const FieldVector& b) { return a += b; }
FieldVector operator-(FieldVector a, const FieldVector& b) { return a -= b; }
FieldVector operator*(double s, FieldVector a) { return a *= s; }

BasisValues basis_eval(const BrokenSpace& space, int element, const Vec2& xi)
{
    if (element < 0 || element >= space.mesh().num_elements()) {
        throw std::invalid_argument("basis_eval: invalid element id");
    }
    const int n = space.local_size();
    BasisValues out{Eigen::VectorXd(n), Eigen::MatrixX2d(n, 2)};
    Eigen::MatrixX2d ref(n, 2);
    space.basis().eval(xi, out.values, ref);
    const AffineMap& m = space.mesh().map(element);
    for (int i = 0; i < n; ++i) {
        const Vec2 g = m.push_gradient({ref(i, 0), ref(i, 1)});
        out.gradients(i, 0) = g.x;
        out.gradients(i, 1) = g.y;
    }
    return out;
}

namespace {

template <int Components, typename Sampler>
FieldVector project_impl(const SpacePtr& space, Sampler&& sample, int quad_degree)
{
    const int p = space->poly_degree();
    const QuadratureRule rule = triangle_rule(quad_degree < 0 ? 2 * p + 6 : quad_degree);
    const int n = space->local_size();
    const auto mass_ref = space->reference_mass().ldlt();
    FieldVector out(space);
    Eigen::VectorXd phi(n);
    std::vector<Eigen::VectorXd> phis(rule.size());
    for (std::size_t q = 0; q < rule.size(); ++q) {
        space->basis().eval(rule.points[q], phi);
        phis[q] = phi;
    }
    const TriMesh& mesh = space->mesh();
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const AffineMap& m = mesh.map(e);
        std::array<Eigen::VectorXd, Components> rhs;
        rhs.fill(Eigen::VectorXd::Zero(n));
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const auto vals = sample(m.to_physical(rule.points[q]));
            for (int c = 0; c < Components; ++c) {
                rhs[c] += rule.weights[q] * vals[c] * phis[q];
            }
        }
        // the affine Jacobian cancels between mass matrix and load
        for (int c = 0; c < Components; ++c) {
            out.coefficients().segment(space->dof(e, c, 0), n) = mass_ref.solve(rhs[c]);
        }
    }
    return out;
}

}  // namespace

FieldVector project_field(const SpacePtr& space, const ScalarFunction& f, int quad_degree)
{
    if (space->components() != 1) {
        throw std::invalid_argument("project_field: scalar function onto vector space");
    }
    return project_impl<1>(
        space, [&](const Vec2& x) { return std::array<double, 1>{f(x)}; }, quad_degree);
}

FieldVector project_field(const SpacePtr& space, const VectorFunction& f, int quad_degree)
{
    if (space->components() != 2) {
        throw std::invalid_argument("project_field: vector function onto scalar space");
    }
    return project_impl<2>(
        space,
        [&](const Vec2& x) {
            const Vec2 v = f(x);
            return std::array<double, 2>{v.x, v.y};
        },
        quad_degree);
}

FieldVector interpolate_nodal(const SpacePtr& space, const ScalarFunction& f)
{
    if (space->components() != 1) {
        throw std::invalid_argument("interpolate_nodal: scalar spaces only");
    }
    const auto& nodes = space->basis().nodes();
    FieldVector out(space);
    Eigen::VectorXd vals(nodes.size());
    for (int e = 0; e < space->mesh().num_elements(); ++e) {
        for (std::size_t j = 0; j < nodes.size(); ++j) {
            vals[static_cast<Eigen::Index>(j)] = f(space->mesh().map(e).to_physical(nodes[j]));
        }
        out.coefficients().segment(space->dof(e, 0, 0), space->local_size()) =
            space->basis().interpolate_nodal(vals);
    }
    return out;
}

double integrate(const FieldVector& v, int component)
{
    const BrokenSpace& s = *v.space();
    const auto n = s.component_size();
    return v.coefficients().segment(component * n, n).dot(s.integral_weights().segment(component * n, n));
}

FieldVector enforce_zero_mean(const FieldVector& v)
{
    if (!v.space() || v.space()->components() != 1) {
        throw std::invalid_argument("enforce_zero_mean: scalar field required");
    }
    const double mean = integrate(v) / v.space()->mesh().total_area();
    FieldVector out = v;
    out.coefficients() -= mean * v.space()->constant_one();
    return out;
}

}  // namespace dgpnp
