#pragma once

#include <optional>

#include "dgpnp/mms.hpp"
#include "dgpnp/stepper.hpp"

namespace dgpnp {

struct ErrorNorms {
    double phi_l2{0.0};
    double c1_l2{0.0};
    double c2_l2{0.0};
    double u_l2{0.0};
    double p_l2{0.0};
    double phi_energy{0.0};
    double c1_energy{0.0};
    double c2_energy{0.0};
    double u_energy{0.0};
};

struct DiagnosticsRecord {
    double t{0.0};
    int step{0};
    double mass1{0.0};  ///< integral of the unshifted concentration
    double mass2{0.0};
    double min_c1{0.0};
    double max_c1{0.0};
    double min_c2{0.0};
    double max_c2{0.0};
    double e_elec{0.0};
    std::optional<double> e_total;  ///< empty when a concentration is not positive
    std::optional<ErrorNorms> errors;
};

/// Integral of a scalar field (exact for the polynomial representation).
double compute_mass(const FieldVector& c);

struct Extrema {
    double min{0.0};
    double max{0.0};
};

/// Min and max of field + shift over quadrature points and element vertices.
Extrema sample_extrema(const FieldVector& c, double shift = 0.0);

struct Energies {
    double e_elec{0.0};
    std::optional<double> e_total;
};

Energies compute_energies(const SystemState& s, const FormParams& params);

/// Energy norm of a discrete field: broken H1 seminorm plus sigma/h_e jumps,
/// over interior edges or all edges.
double energy_norm(const FieldVector& v, double sigma, bool all_edges);

/// Errors against exact fields at time t, with quadrature raised by `boost`
/// above the assembly degree.
ErrorNorms compute_errors(const SystemState& s, const ExactFields& exact, double t, double sigma, int boost = 3);

DiagnosticsRecord make_record(const SystemState& s, const FormParams& params,
                              const ExactFields* exact = nullptr);

}  // namespace dgpnp
