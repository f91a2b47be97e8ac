#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "dgpnp/forms.hpp"
#include "dgpnp/linalg.hpp"
#include "dgpnp/mms.hpp"
#include "dgpnp/space.hpp"

namespace dgpnp {

/// The four discrete spaces of one run, all on the same mesh.
struct Discretization {
    std::shared_ptr<const TriMesh> mesh;
    int degree{1};
    SpacePtr potential;      ///< P_k
    SpacePtr concentration;  ///< P_k
    SpacePtr velocity;       ///< (P_k)^2
    SpacePtr pressure;       ///< P_{k-1}

    static Discretization make(std::shared_ptr<const TriMesh> mesh, int degree, bool zero_mean_potential,
                               bool zero_mean_concentrations, BasisKind basis = BasisKind::orthonormal);
};

/// One time level. Concentrations are stored shifted: c_i = c_tilde_i + m0.
struct SystemState {
    double t{0.0};
    int step{0};
    FieldVector phi;
    FieldVector c1;
    FieldVector c2;
    FieldVector u_hat;
    FieldVector u;
    FieldVector p;
    double m0{0.0};

    /// Unshifted concentration of ion 1 or 2.
    [[nodiscard]] FieldVector concentration(int ion) const;
};

struct SourceTerms {
    SpaceTimeScalar phi;
    SpaceTimeScalar c1;
    SpaceTimeScalar c2;
    SpaceTimeVector u;

    static SourceTerms from(const ForcingTerms& f) { return {f.f_phi, f.f_c1, f.f_c2, f.f_u}; }
};

struct SchemeConfig {
    double dt{0.01};
    double t_final{0.1};
    FormParams params;
    SourceTerms sources;
    BoundaryMode boundary{BoundaryMode::homogeneous};
    ReservoirBc reservoir;
    SolverOptions solver;
    std::optional<QuadratureOrders> quadrature;

    void validate() const;
};

/// Emitted whenever a field enters an assembly, with a copy of the
/// coefficients that were actually consumed. Tests match these against the
/// old and new states to check which time level each operator used.
struct TraceEvent {
    std::string op;     ///< e.g. "potential.rhs", "concentration.convection"
    std::string field;  ///< e.g. "charge", "u", "phi"
    Eigen::VectorXd coefficients;
};

/// Decoupled IMEX pressure-correction time stepping.
///
/// Each step: potential from the lagged net charge; concentrations convected
/// by the lagged velocity and drifted against the new potential; an
/// intermediate velocity with lagged pressure; a pressure increment; and the
/// velocity correction.
class Stepper {
public:
    Stepper(Discretization disc, SchemeConfig cfg);

    [[nodiscard]] const Discretization& discretization() const { return disc_; }
    [[nodiscard]] const SchemeConfig& config() const { return cfg_; }

    /// Projects initial data. m0 is the mean of the projected c1; the
    /// potential is solved once so diagnostics at t0 have an energy.
    [[nodiscard]] SystemState initial_state(const std::function<double(const Vec2&)>& c1,
                                            const std::function<double(const Vec2&)>& c2,
                                            const std::function<Vec2(const Vec2&)>& u,
                                            const std::function<double(const Vec2&)>& p = {},
                                            double t0 = 0.0);

    [[nodiscard]] FieldVector step_potential(const SystemState& s);
    [[nodiscard]] std::pair<FieldVector, FieldVector> step_concentrations(const SystemState& s,
                                                                          const FieldVector& phi_new);
    [[nodiscard]] FieldVector step_intermediate_velocity(const SystemState& s, const FieldVector& phi_new);
    /// Returns the new pressure (previous pressure plus the increment).
    [[nodiscard]] FieldVector step_pressure(const FieldVector& u_hat, const FieldVector& p_old);
    [[nodiscard]] FieldVector step_velocity_correction(const FieldVector& u_hat, const FieldVector& p_new,
                                                       const FieldVector& p_old) const;

    /// All sub-steps in order. The input is never modified, so a failing
    /// sub-step leaves the caller's state untouched.
    [[nodiscard]] SystemState advance(const SystemState& s);

    void set_trace_hook(std::function<void(const TraceEvent&)> hook) { hook_ = std::move(hook); }

    /// Potential for a given net charge (used at t0 and by advance).
    [[nodiscard]] FieldVector solve_potential(const FieldVector& charge, double t);

private:
    void emit(const char* op, const char* field, const FieldVector& f) const;
    [[nodiscard]] Eigen::VectorXd apply_mass_inverse(const SpacePtr& space, const Eigen::VectorXd& r) const;

    Discretization disc_;
    SchemeConfig cfg_;
    std::function<void(const TraceEvent&)> hook_;

    SparseMatrix a1_conc_;
    SparseMatrix a2_comp_;
    SparseMatrix d_;
    SparseMatrix mass_conc_;
    SparseMatrix mass_vel_comp_;
    SpacePtr vel_component_;  ///< scalar space matching one velocity component

    SparseMatrix potential_op_;
    Eigen::VectorXd potential_bc_load_;
    LinearSolver potential_solver_;
    LinearSolver pressure_solver_;
    SparseMatrix pressure_op_;
    LinearSolver conc_solver_;
    LinearSolver momentum_solver_;
};

}  // namespace dgpnp
