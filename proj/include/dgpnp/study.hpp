#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dgpnp/diagnostics.hpp"

namespace dgpnp {

struct ManufacturedRun {
    int degree{1};
    int n{4};           ///< cells per side of the unit square
    double dt{0.01};
    double t_final{0.1};
    std::optional<double> sigma;  ///< defaults to 10 for k = 1, 40 for k = 2
    SolverOptions solver;
    std::optional<QuadratureOrders> quadrature;
};

struct ManufacturedResult {
    double h{0.0};
    double dt{0.0};
    int steps{0};
    ErrorNorms errors;
};

/// Runs the manufactured-solution problem to t_final and measures errors.
ManufacturedResult run_manufactured(const ManufacturedRun& run);

enum class StudyMode { spatial_l2, spatial_h1, temporal };

StudyMode parse_study_mode(const std::string& s);
const char* to_string(StudyMode m);

struct StudyOptions {
    double dt_constant{0.1};   ///< spatial studies: dt = C h^(k+1)
    double t_final{0.1};
    /// Temporal study: cells per side at the first level. Later levels scale it
    /// by dt^(-1/(k+1)) so the spatial error shrinks at the temporal rate.
    int temporal_base_n{16};
    int first_level{1};        ///< h = 2^-i or dt = 0.1 * 2^-i starting here
    SolverOptions solver;
};

/// The nine error columns in a fixed order.
inline constexpr std::array<const char*, 9> kErrorColumns = {
    "phi_l2", "c1_l2", "c2_l2", "u_l2", "p_l2", "phi_energy", "c1_energy", "c2_energy", "u_energy"};

std::array<double, 9> error_array(const ErrorNorms& e);

struct ConvergenceTable {
    StudyMode mode{StudyMode::spatial_l2};
    int degree{1};
    std::vector<ManufacturedResult> levels;
    /// Least-squares slope of log(error) against log(h) (spatial) or
    /// log(dt) (temporal), per error column.
    std::array<double, 9> slopes{};
};

ConvergenceTable convergence_study(StudyMode mode, int degree, int levels, const StudyOptions& opts = {});

/// Slope of the least-squares line through (log x, log y).
double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y);

/// CSV with one row per level (with pairwise slopes against the previous
/// level) followed by a row holding the least-squares slopes.
void write_convergence_csv(std::ostream& out, const ConvergenceTable& table);

}  // namespace dgpnp
