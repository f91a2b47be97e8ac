#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "dgpnp/oracle.hpp"
#include "dgpnp/run.hpp"
#include "dgpnp/study.hpp"

using namespace dgpnp;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitOutput = 4;

void print_record(const DiagnosticsRecord& r, double m1, double m2)
{
    std::printf("t = %.6g (step %d)\n", r.t, r.step);
    std::printf("  mass1 %.15g (deviation %.3e)\n", r.mass1, r.mass1 - m1);
    std::printf("  mass2 %.15g (deviation %.3e)\n", r.mass2, r.mass2 - m2);
    std::printf("  c1 in [%.6g, %.6g], c2 in [%.6g, %.6g]\n", r.min_c1, r.max_c1, r.min_c2, r.max_c2);
    std::printf("  E_elec %.10g\n", r.e_elec);
    if (r.e_total) {
        std::printf("  E_total %.10g\n", *r.e_total);
    } else {
        std::printf("  E_total undefined (non-positive concentration)\n");
    }
    if (r.errors) {
        const auto e = error_array(*r.errors);
        for (std::size_t i = 0; i < e.size(); ++i) {
            std::printf("  %-10s %.6e\n", kErrorColumns[i], e[i]);
        }
    }
}

int cmd_run(const std::string& path)
{
    const RunConfig cfg = load_run_config(path);
    const RunSummary s = run_simulation(cfg);
    print_record(s.records.back(), s.mass1_initial, s.mass2_initial);
    std::printf("  max mass deviation %.3e\n", s.max_mass_deviation);
    std::printf("  min concentration %.6g after step 0%s, %.6g in the projected initial data\n",
                s.min_concentration, s.positivity_violated ? " (below positivity threshold)" : "",
                s.initial_min_concentration);
    std::printf("wrote %s/diagnostics.csv and %zu field files\n", cfg.output_dir.c_str(), s.files.size());
    return 0;
}

int cmd_convergence(const std::string& mode, int degree, int levels, int first_level, const std::string& out)
{
    StudyOptions opts;
    opts.first_level = first_level;
    StudyMode m{};
    try {
        m = parse_study_mode(mode);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (degree != 1 && degree != 2) {
        throw ConfigError("degree must be 1 or 2");
    }
    if (levels < 3) {
        throw ConfigError("at least 3 levels are needed for a slope");
    }
    const ConvergenceTable t = convergence_study(m, degree, levels, opts);
    write_convergence_csv(std::cout, t);
    if (!out.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(out, ec);
        const std::string path = out + "/convergence_" + to_string(m) + "_k" + std::to_string(degree) + ".csv";
        std::ofstream f(path);
        if (ec || !f) {
            throw OutputError("cannot write '" + path + "'");
        }
        write_convergence_csv(f, t);
        if (!f) {
            throw OutputError("write failed for '" + path + "'");
        }
        std::cerr << "wrote " << path << '\n';
    }
    return 0;
}

int cmd_presets()
{
    for (const auto& name : preset_names()) {
        const ScenarioPreset p = preset(name);
        std::printf("%-10s %s (k=%d, %dx%d cells, dt=%g, T=%g)\n", name.c_str(), p.description.c_str(), p.degree,
                    p.nx, p.ny, p.dt, p.t_final);
    }
    return 0;
}

int cmd_oracle_check()
{
    bool ok = true;
    for (const auto& c : oracle::compare_forms(BasisKind::lagrange)) {
        const bool pass = c.max_abs_diff <= 1e-12;
        ok = ok && pass;
        std::printf("%-4s %-32s max |diff| %.3e\n", pass ? "ok" : "BAD", c.name.c_str(), c.max_abs_diff);
    }
    for (const auto& r : oracle::manufactured_residuals(FormParams{})) {
        const bool pass = r.max_residual <= 1e-9;
        ok = ok && pass;
        std::printf("%-4s residual %-25s %.3e\n", pass ? "ok" : "BAD", r.equation.c_str(), r.max_residual);
    }
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Discontinuous Galerkin solver for Poisson-Nernst-Planck-Navier-Stokes flow"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run = app.add_subcommand("run", "run a simulation described by a config file");
    run->add_option("config", config_path, "config file")->required();

    std::string mode;
    int degree = 1;
    int levels = 4;
    int first_level = 1;
    std::string out;
    auto* conv = app.add_subcommand("convergence", "manufactured-solution convergence study");
    conv->add_option("--mode", mode, "spatial-L2, spatial-H1 or temporal")->required();
    conv->add_option("--degree", degree, "polynomial degree (1 or 2)")->required();
    conv->add_option("--levels", levels, "number of refinement levels (at least 3)")->required();
    conv->add_option("--first-level", first_level, "first level i (h = 2^-i or dt = 0.1 * 2^-i)");
    conv->add_option("--out", out, "directory for the CSV table");

    auto* presets = app.add_subcommand("presets", "scenario presets");
    presets->add_subcommand("list", "list the presets")->required();
    presets->require_subcommand(1);

    auto* oracle_cmd = app.add_subcommand("oracle-check", "compare the assembly with the dense oracles");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (run->parsed()) {
            return cmd_run(config_path);
        }
        if (conv->parsed()) {
            return cmd_convergence(mode, degree, levels, first_level, out);
        }
        if (presets->parsed()) {
            return cmd_presets();
        }
        if (oracle_cmd->parsed()) {
            return cmd_oracle_check();
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const SolverFailure& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return kExitSolver;
    } catch (const OutputError& e) {
        std::cerr << "output error: " << e.what() << '\n';
        return kExitOutput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    return 0;
}
