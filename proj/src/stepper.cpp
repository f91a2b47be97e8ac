#include "dgpnp/stepper.hpp"

#include <stdexcept>

namespace dgpnp {

Discretization Discretization::make(std::shared_ptr<const TriMesh> mesh, int degree, bool zero_mean_potential,
                                    bool zero_mean_concentrations, BasisKind basis)
{
    Discretization d;
    d.mesh = mesh;
    d.degree = degree;
    d.potential = BrokenSpace::make(mesh, degree, SpaceKind::scalar, zero_mean_potential, basis);
    d.concentration = BrokenSpace::make(mesh, degree, SpaceKind::scalar, zero_mean_concentrations, basis);
    d.velocity = BrokenSpace::make(mesh, degree, SpaceKind::vector, false, basis);
    d.pressure = BrokenSpace::make(mesh, degree, SpaceKind::pressure, true, basis);
    return d;
}

FieldVector SystemState::concentration(int ion) const
{
    const FieldVector& c = ion == 1 ? c1 : c2;
    FieldVector out = c;
    out.coefficients() += m0 * c.space()->constant_one();
    return out;
}

void SchemeConfig::validate() const
{
    params.validate();
    if (!(dt > 0.0)) {
        throw std::invalid_argument("time step must be positive");
    }
    if (!(t_final >= dt * (1.0 - 1e-12))) {
        throw std::invalid_argument("final time must be at least one time step");
    }
}

namespace {

Eigen::VectorXd augment(const Eigen::VectorXd& rhs)
{
    Eigen::VectorXd out(rhs.size() + 1);
    out.head(rhs.size()) = rhs;
    out[rhs.size()] = 0.0;
    return out;
}

// Two scalar components <-> one vector coefficient array.
Eigen::VectorXd component(const Eigen::VectorXd& v, int c, Eigen::Index n) { return v.segment(c * n, n); }

}  // namespace

Stepper::Stepper(Discretization disc, SchemeConfig cfg)
    : disc_(std::move(disc)),
      cfg_(std::move(cfg)),
      potential_solver_(true, cfg_.solver),
      pressure_solver_(true, cfg_.solver),
      conc_solver_(false, cfg_.solver),
      momentum_solver_(false, cfg_.solver)
{
    cfg_.validate();
    if (!disc_.mesh || !disc_.potential || !disc_.concentration || !disc_.velocity || !disc_.pressure) {
        throw std::invalid_argument("Stepper: incomplete discretization");
    }
    const double sigma = cfg_.params.sigma;
    const auto& q = cfg_.quadrature;
    vel_component_ = BrokenSpace::make(disc_.mesh, disc_.degree, SpaceKind::scalar, false,
                                       disc_.velocity->basis().kind());
    a1_conc_ = assemble_A1(disc_.concentration, sigma, q).matrix;
    a2_comp_ = assemble_A2_component(vel_component_, sigma, q).matrix;
    d_ = assemble_D(disc_.velocity, disc_.pressure, q).matrix;
    mass_conc_ = assemble_mass(disc_.concentration, q).matrix;
    mass_vel_comp_ = assemble_mass(vel_component_, q).matrix;

    if (cfg_.boundary == BoundaryMode::reservoir) {
        const std::vector<PotentialBc> bcs = {
            {BoundaryTag::bottom, PotentialBcKind::flux, cfg_.reservoir.surface_charge},
            {BoundaryTag::top, PotentialBcKind::dirichlet, cfg_.reservoir.ground_value},
            {BoundaryTag::left, PotentialBcKind::insulated, 0.0},
            {BoundaryTag::right, PotentialBcKind::insulated, 0.0},
        };
        MixedBcSystem sys = assemble_A1_mixed_bc(disc_.potential, sigma, bcs, cfg_.params.mu, q);
        potential_op_ = std::move(sys.op.matrix);
        potential_bc_load_ = std::move(sys.load);
    } else {
        SparseMatrix a = cfg_.params.mu * assemble_A1(disc_.potential, sigma, q).matrix;
        potential_op_ = augment_with_constraint(a, disc_.potential->integral_weights());
        potential_bc_load_ = Eigen::VectorXd::Zero(disc_.potential->size());
    }
    potential_solver_.factor(potential_op_);

    pressure_op_ = augment_with_constraint(assemble_A1(disc_.pressure, sigma, q).matrix,
                                           disc_.pressure->integral_weights());
    pressure_solver_.factor(pressure_op_);
}

void Stepper::emit(const char* op, const char* field, const FieldVector& f) const
{
    if (hook_) {
        hook_(TraceEvent{op, field, f.coefficients()});
    }
}

SystemState Stepper::initial_state(const std::function<double(const Vec2&)>& c1,
                                   const std::function<double(const Vec2&)>& c2,
                                   const std::function<Vec2(const Vec2&)>& u,
                                   const std::function<double(const Vec2&)>& p, double t0)
{
    SystemState s;
    s.t = t0;
    s.step = 0;
    const SpacePtr& cs = disc_.concentration;
    const FieldVector c1h = project_field(cs, ScalarFunction(c1));
    const FieldVector c2h = project_field(cs, ScalarFunction(c2));
    s.m0 = integrate(c1h) / disc_.mesh->total_area();
    s.c1 = c1h;
    s.c1.coefficients() -= s.m0 * cs->constant_one();
    s.c2 = c2h;
    s.c2.coefficients() -= s.m0 * cs->constant_one();
    s.u = project_field(disc_.velocity, VectorFunction(u));
    s.u_hat = s.u;
    s.p = p ? enforce_zero_mean(project_field(disc_.pressure, ScalarFunction(p))) : FieldVector(disc_.pressure);
    s.phi = solve_potential(s.c1 - s.c2, t0);
    return s;
}

FieldVector Stepper::solve_potential(const FieldVector& charge, double t)
{
    const SpacePtr& ps = disc_.potential;
    emit("potential.rhs", "charge", charge);
    Eigen::VectorXd rhs = mass_conc_ * charge.coefficients() + potential_bc_load_;
    if (cfg_.sources.phi) {
        rhs += assemble_load(ps, ScalarFunction([&](const Vec2& x) { return cfg_.sources.phi(x, t); }));
    }
    if (cfg_.boundary == BoundaryMode::reservoir) {
        return FieldVector(ps, potential_solver_.solve(rhs).x);
    }
    const Eigen::VectorXd x = potential_solver_.solve(augment(rhs)).x;
    return enforce_zero_mean(FieldVector(ps, x.head(ps->size())));
}

FieldVector Stepper::step_potential(const SystemState& s) { return solve_potential(s.c1 - s.c2, s.t + cfg_.dt); }

std::pair<FieldVector, FieldVector> Stepper::step_concentrations(const SystemState& s, const FieldVector& phi_new)
{
    const SpacePtr& cs = disc_.concentration;
    const FormParams& fp = cfg_.params;
    const double dt = cfg_.dt;
    const double t_new = s.t + dt;
    const bool constrained = cs->zero_mean_constrained();

    emit("concentration.convection", "u", s.u);
    const SparseMatrix n1 = assemble_N1(s.u, cs, cfg_.quadrature).matrix;
    const SparseMatrix base = (1.0 / dt) * mass_conc_ + n1;

    const auto rhs_for = [&](int ion) {
        const FieldVector& c_old = ion == 1 ? s.c1 : s.c2;
        const double beta = ion == 1 ? fp.beta1 : fp.beta2;
        emit(ion == 1 ? "concentration.drift.coefficient.1" : "concentration.drift.coefficient.2",
             ion == 1 ? "c1" : "c2", c_old);
        emit("concentration.drift.potential", "phi", phi_new);
        const SparseMatrix g = assemble_G(c_old, s.m0, cs, cfg_.quadrature).matrix;
        Eigen::VectorXd rhs = (1.0 / dt) * (mass_conc_ * c_old.coefficients()) - beta * (g * phi_new.coefficients());
        const SpaceTimeScalar& f = ion == 1 ? cfg_.sources.c1 : cfg_.sources.c2;
        if (f) {
            rhs += assemble_load(cs, ScalarFunction([&](const Vec2& x) { return f(x, t_new); }));
        }
        return rhs;
    };
    const auto system_for = [&](double kappa) {
        SparseMatrix k = base + kappa * a1_conc_;
        return constrained ? augment_with_constraint(k, cs->integral_weights()) : k;
    };
    const auto finish = [&](const Eigen::VectorXd& x) {
        FieldVector c(cs, x.head(cs->size()));
        return constrained ? enforce_zero_mean(c) : c;
    };
    const auto solve = [&](const Eigen::VectorXd& rhs) {
        return conc_solver_.solve(constrained ? augment(rhs) : rhs).x;
    };

    const Eigen::VectorXd r1 = rhs_for(1);
    const Eigen::VectorXd r2 = rhs_for(2);
    conc_solver_.factor(system_for(fp.kappa1));
    FieldVector c1 = finish(solve(r1));
    if (fp.kappa2 != fp.kappa1) {
        conc_solver_.factor(system_for(fp.kappa2));
    }
    FieldVector c2 = finish(solve(r2));
    return {std::move(c1), std::move(c2)};
}

FieldVector Stepper::step_intermediate_velocity(const SystemState& s, const FieldVector& phi_new)
{
    const SpacePtr& vs = disc_.velocity;
    const double dt = cfg_.dt;
    const double t_new = s.t + dt;
    const Eigen::Index n = vel_component_->size();

    emit("momentum.convection", "u", s.u);
    const SparseMatrix n2 = assemble_N2_component(s.u, vel_component_, cfg_.quadrature).matrix;
    SparseMatrix k = (1.0 / dt) * mass_vel_comp_ + cfg_.params.nu * a2_comp_ + n2;
    momentum_solver_.factor(k);

    emit("momentum.inertia", "u", s.u);
    emit("momentum.pressure", "p", s.p);
    const FieldVector charge = s.c1 - s.c2;
    emit("momentum.force.charge", "charge", charge);
    emit("momentum.force.potential", "phi", phi_new);

    Eigen::VectorXd rhs(vs->size());
    for (int c = 0; c < 2; ++c) {
        rhs.segment(c * n, n) = (1.0 / dt) * (mass_vel_comp_ * component(s.u.coefficients(), c, n));
    }
    rhs += d_.transpose() * s.p.coefficients();
    rhs += assemble_T_rhs(charge, phi_new, vs, cfg_.quadrature);
    if (cfg_.sources.u) {
        rhs += assemble_load(vs, VectorFunction([&](const Vec2& x) { return cfg_.sources.u(x, t_new); }));
    }
    Eigen::VectorXd x(vs->size());
    for (int c = 0; c < 2; ++c) {
        x.segment(c * n, n) = momentum_solver_.solve(rhs.segment(c * n, n)).x;
    }
    return FieldVector(vs, std::move(x));
}

FieldVector Stepper::step_pressure(const FieldVector& u_hat, const FieldVector& p_old)
{
    const SpacePtr& ps = disc_.pressure;
    emit("pressure.divergence", "u_hat", u_hat);
    emit("pressure.previous", "p", p_old);
    const Eigen::VectorXd rhs = (-1.0 / cfg_.dt) * (d_ * u_hat.coefficients());
    const Eigen::VectorXd x = pressure_solver_.solve(augment(rhs)).x;
    FieldVector p = p_old;
    p.coefficients() += x.head(ps->size());
    return p;
}

Eigen::VectorXd Stepper::apply_mass_inverse(const SpacePtr& space, const Eigen::VectorXd& r) const
{
    const auto ref = space->reference_mass().ldlt();
    Eigen::VectorXd out(r.size());
    const int n = space->local_size();
    for (int c = 0; c < space->components(); ++c) {
        for (int e = 0; e < space->mesh().num_elements(); ++e) {
            const int d = space->dof(e, c, 0);
            out.segment(d, n) = ref.solve(r.segment(d, n)) / std::abs(space->mesh().map(e).det);
        }
    }
    return out;
}

FieldVector Stepper::step_velocity_correction(const FieldVector& u_hat, const FieldVector& p_new,
                                              const FieldVector& p_old) const
{
    emit("correction.velocity", "u_hat", u_hat);
    const FieldVector dp = p_new - p_old;
    emit("correction.increment", "dp", dp);
    FieldVector u = u_hat;
    u.coefficients() += cfg_.dt * apply_mass_inverse(disc_.velocity, d_.transpose() * dp.coefficients());
    return u;
}

SystemState Stepper::advance(const SystemState& s)
{
    SystemState next;
    next.m0 = s.m0;
    next.t = s.t + cfg_.dt;
    next.step = s.step + 1;
    next.phi = step_potential(s);
    std::tie(next.c1, next.c2) = step_concentrations(s, next.phi);
    next.u_hat = step_intermediate_velocity(s, next.phi);
    next.p = step_pressure(next.u_hat, s.p);
    next.u = step_velocity_correction(next.u_hat, next.p, s.p);
    return next;
}

}  // namespace dgpnp
