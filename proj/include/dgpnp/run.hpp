#pragma once

#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dgpnp/diagnostics.hpp"

namespace dgpnp {

/// Invalid or unreadable configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Output could not be written (CLI exit code 4).
class OutputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Everything a single simulation needs. Starts from a preset when one is
/// named; without a preset the initial data are zero.
struct RunConfig {
    std::optional<std::string> preset;
    double lx{1.0};
    double ly{1.0};
    int nx{8};
    int ny{8};
    int degree{1};
    BasisKind basis{BasisKind::orthonormal};
    FormParams params;
    double dt{0.01};
    double t_final{0.1};
    BoundaryMode boundary{BoundaryMode::homogeneous};
    ReservoirBc reservoir;
    bool zero_mean_concentrations{true};
    SolverOptions solver;
    std::optional<QuadratureOrders> quadrature;
    std::string output_dir{"dgpnp-out"};
    int output_every{0};  ///< 0 disables cadence snapshots
    std::vector<double> snapshot_times;
    bool write_fields{true};
    double positivity_threshold{-1e-8};

    /// Throws ConfigError on non-positive sizes, coefficients or steps, or k outside {1, 2}.
    void validate() const;
};

/// Config with the values of a named preset.
RunConfig config_from_preset(const std::string& name);

/// Parses the sectioned key = value format. Unknown sections or keys are
/// rejected so that typos do not silently fall back to defaults.
RunConfig parse_run_config(std::istream& in);
RunConfig load_run_config(const std::string& path);

/// Column names of the diagnostics CSV, in order.
std::vector<std::string> csv_columns(bool with_errors);
void write_csv_header(std::ostream& out, bool with_errors);
/// One row; mass deviations are taken against the given initial masses.
void write_csv_row(std::ostream& out, const DiagnosticsRecord& r, double mass1_0, double mass2_0);

/// Legacy-VTK snapshots <field>_<step:06d>.vtk for phi, c1, c2, u and p in
/// `dir`. Each triangle gets its own three points, carrying the field values
/// at its vertices; cell data hold element means.
std::vector<std::string> write_fields(const SystemState& s, const std::string& dir);

struct RunSummary {
    std::vector<DiagnosticsRecord> records;  ///< step 0 first
    std::vector<std::string> files;          ///< snapshot files written
    double mass1_initial{0.0};
    double mass2_initial{0.0};
    double max_mass_deviation{0.0};
    /// Smallest sampled concentration over the evolved steps (step >= 1).
    /// The projected initial data are reported on their own, since an L2
    /// projection of data touching zero can undershoot slightly.
    double min_concentration{std::numeric_limits<double>::infinity()};
    double initial_min_concentration{0.0};
    bool positivity_violated{false};
    SystemState final_state;
};

/// Runs the time loop. Writes diagnostics.csv and snapshots into
/// cfg.output_dir unless `write_output` is false. The observer, when set,
/// sees every state including the initial one.
RunSummary run_simulation(const RunConfig& cfg, bool write_output = true,
                          const std::function<void(const SystemState&)>& observer = {});

}  // namespace dgpnp
