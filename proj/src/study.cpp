#include "dgpnp/study.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace dgpnp {

ManufacturedResult run_manufactured(const ManufacturedRun& run)
{
    if (run.degree < 1 || run.degree > 2) {
        throw std::invalid_argument("manufactured run: degree must be 1 or 2");
    }
    if (run.n < 1) {
        throw std::invalid_argument("manufactured run: mesh size must be positive");
    }
    const ScenarioPreset pre = preset(run.degree == 1 ? "mms-k1" : "mms-k2");
    auto mesh = std::make_shared<const TriMesh>(build_rect_mesh(1.0, 1.0, run.n, run.n));
    Discretization disc = Discretization::make(mesh, run.degree, true, false);
    SchemeConfig cfg;
    cfg.dt = run.dt;
    cfg.t_final = run.t_final;
    cfg.params = pre.params;
    if (run.sigma) {
        cfg.params.sigma = *run.sigma;
    }
    cfg.sources = SourceTerms::from(forcing_terms(cfg.params));
    cfg.solver = run.solver;
    cfg.quadrature = run.quadrature;
    Stepper stepper(disc, cfg);
    SystemState s = stepper.initial_state(pre.c1_initial, pre.c2_initial, pre.u_initial, pre.p_initial);
    const int steps = static_cast<int>(std::llround(run.t_final / run.dt));
    for (int i = 0; i < steps; ++i) {
        s = stepper.advance(s);
    }
    ManufacturedResult r;
    r.h = mesh->h();
    r.dt = run.dt;
    r.steps = steps;
    r.errors = compute_errors(s, manufactured_exact(), s.t, cfg.params.sigma);
    return r;
}

StudyMode parse_study_mode(const std::string& s)
{
    if (s == "spatial-L2") {
        return StudyMode::spatial_l2;
    }
    if (s == "spatial-H1") {
        return StudyMode::spatial_h1;
    }
    if (s == "temporal") {
        return StudyMode::temporal;
    }
    throw std::invalid_argument("unknown convergence mode '" + s + "' (spatial-L2, spatial-H1, temporal)");
}

const char* to_string(StudyMode m)
{
    switch (m) {
    case StudyMode::spatial_l2:
        return "spatial-L2";
    case StudyMode::spatial_h1:
        return "spatial-H1";
    case StudyMode::temporal:
        return "temporal";
    }
    return "?";
}

std::array<double, 9> error_array(const ErrorNorms& e)
{
    return {e.phi_l2, e.c1_l2, e.c2_l2, e.u_l2, e.p_l2, e.phi_energy, e.c1_energy, e.c2_energy, e.u_energy};
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("least_squares_slope: need at least two matching points");
    }
    const auto n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ConvergenceTable convergence_study(StudyMode mode, int degree, int levels, const StudyOptions& opts)
{
    if (levels < 3) {
        throw std::invalid_argument("convergence study needs at least 3 levels");
    }
    ConvergenceTable table;
    table.mode = mode;
    table.degree = degree;
    for (int i = opts.first_level; i < opts.first_level + levels; ++i) {
        ManufacturedRun run;
        run.degree = degree;
        run.t_final = opts.t_final;
        run.solver = opts.solver;
        if (mode == StudyMode::temporal) {
            const int j = i - opts.first_level;
            run.n = static_cast<int>(std::lround(opts.temporal_base_n * std::pow(2.0, j / (degree + 1.0))));
            run.dt = 0.1 * std::ldexp(1.0, -i);
        } else {
            run.n = 1 << i;
            run.dt = opts.dt_constant * std::pow(1.0 / run.n, degree + 1);
        }
        table.levels.push_back(run_manufactured(run));
    }
    std::vector<double> x;
    for (const auto& l : table.levels) {
        x.push_back(mode == StudyMode::temporal ? l.dt : l.h);
    }
    for (std::size_t c = 0; c < kErrorColumns.size(); ++c) {
        std::vector<double> y;
        for (const auto& l : table.levels) {
            y.push_back(error_array(l.errors)[c]);
        }
        table.slopes[c] = least_squares_slope(x, y);
    }
    return table;
}

void write_convergence_csv(std::ostream& out, const ConvergenceTable& table)
{
    const bool temporal = table.mode == StudyMode::temporal;
    out << "h,dt,steps";
    for (const char* c : kErrorColumns) {
        out << ',' << c;
    }
    for (const char* c : kErrorColumns) {
        out << ",slope_" << c;
    }
    out << '\n';
    char buf[64];
    const auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.10e", v);
        return std::string(buf);
    };
    for (std::size_t i = 0; i < table.levels.size(); ++i) {
        const auto& l = table.levels[i];
        out << num(l.h) << ',' << num(l.dt) << ',' << l.steps;
        const auto e = error_array(l.errors);
        for (double v : e) {
            out << ',' << num(v);
        }
        for (std::size_t c = 0; c < e.size(); ++c) {
            if (i == 0) {
                out << ',';
                continue;
            }
            const auto& prev = table.levels[i - 1];
            const double dx = temporal ? std::log(l.dt / prev.dt) : std::log(l.h / prev.h);
            out << ',' << num(std::log(e[c] / error_array(prev.errors)[c]) / dx);
        }
        out << '\n';
    }
    out << "least_squares,,";
    for (std::size_t c = 0; c < kErrorColumns.size(); ++c) {
        out << ',';
    }
    for (double s : table.slopes) {
        out << ',' << num(s);
    }
    out << '\n';
}

}  // namespace dgpnp
