#include "dgpnp/run.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace dgpnp {

void RunConfig::validate() const
{
    if (!(lx > 0.0) || !(ly > 0.0)) {
        throw ConfigError("domain lengths must be positive");
    }
    if (nx < 1 || ny < 1) {
        throw ConfigError("mesh cell counts must be at least 1");
    }
    if (degree != 1 && degree != 2) {
        throw ConfigError("degree must be 1 or 2");
    }
    if (output_every < 0) {
        throw ConfigError("output_every must be non-negative");
    }
    try {
        params.validate();
        SchemeConfig sc;
        sc.dt = dt;
        sc.t_final = t_final;
        sc.params = params;
        sc.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (solver.kind == SolverKind::iterative && !(solver.tol > 0.0)) {
        throw ConfigError("solver tolerance must be positive");
    }
}

RunConfig config_from_preset(const std::string& name)
{
    ScenarioPreset p;
    try {
        p = preset(name);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    RunConfig c;
    c.preset = name;
    c.lx = p.lx;
    c.ly = p.ly;
    c.nx = p.nx;
    c.ny = p.ny;
    c.degree = p.degree;
    c.params = p.params;
    c.dt = p.dt;
    c.t_final = p.t_final;
    c.boundary = p.boundary;
    c.reservoir = p.reservoir;
    c.zero_mean_concentrations = p.zero_mean_concentrations;
    c.output_every = p.output_every;
    c.snapshot_times = p.snapshot_times;
    return c;
}

namespace {

namespace pt = boost::property_tree;

template <typename T>
T convert(const std::string& key, const std::string& raw)
{
    std::istringstream is(raw);
    T v{};
    is >> v;
    if (is.fail() || !(is >> std::ws).eof()) {
        throw ConfigError("bad value for '" + key + "': '" + raw + "'");
    }
    return v;
}

bool convert_bool(const std::string& key, const std::string& raw)
{
    if (raw == "true" || raw == "1" || raw == "yes") {
        return true;
    }
    if (raw == "false" || raw == "0" || raw == "no") {
        return false;
    }
    throw ConfigError("bad value for '" + key + "': expected true or false");
}

std::vector<double> convert_list(const std::string& key, const std::string& raw)
{
    std::vector<double> out;
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.find_first_not_of(" \t") == std::string::npos) {
            continue;
        }
        out.push_back(convert<double>(key, item));
    }
    return out;
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& raw)>;

template <typename T>
Setter field(T RunConfig::*member)
{
    return [member](RunConfig& c, const std::string& k, const std::string& v) { c.*member = convert<T>(k, v); };
}

template <typename T>
Setter param(T FormParams::*member)
{
    return [member](RunConfig& c, const std::string& k, const std::string& v) {
        c.params.*member = convert<T>(k, v);
    };
}

QuadratureOrders& quadrature_of(RunConfig& c)
{
    if (!c.quadrature) {
        c.quadrature = QuadratureOrders::for_degree(c.degree);
    }
    return *c.quadrature;
}

const std::map<std::string, std::map<std::string, Setter>>& schema()
{
    static const std::map<std::string, std::map<std::string, Setter>> s = {
        {"run",
         {
             {"preset", [](RunConfig&, const std::string&, const std::string&) {}},
             {"output_dir", [](RunConfig& c, const std::string&, const std::string& v) { c.output_dir = v; }},
             {"output_every", field(&RunConfig::output_every)},
             {"snapshot_times",
              [](RunConfig& c, const std::string& k, const std::string& v) { c.snapshot_times = convert_list(k, v); }},
             {"write_fields",
              [](RunConfig& c, const std::string& k, const std::string& v) { c.write_fields = convert_bool(k, v); }},
             {"positivity_threshold", field(&RunConfig::positivity_threshold)},
         }},
        {"mesh",
         {
             {"lx", field(&RunConfig::lx)},
             {"ly", field(&RunConfig::ly)},
             {"nx", field(&RunConfig::nx)},
             {"ny", field(&RunConfig::ny)},
         }},
        {"discretization",
         {
             {"degree", field(&RunConfig::degree)},
             {"sigma", param(&FormParams::sigma)},
             {"basis",
              [](RunConfig& c, const std::string& k, const std::string& v) {
                  if (v == "orthonormal") {
                      c.basis = BasisKind::orthonormal;
                  } else if (v == "lagrange") {
                      c.basis = BasisKind::lagrange;
                  } else {
                      throw ConfigError("bad value for '" + k + "': expected orthonormal or lagrange");
                  }
              }},
             {"zero_mean_concentrations",
              [](RunConfig& c, const std::string& k, const std::string& v) {
                  c.zero_mean_concentrations = convert_bool(k, v);
              }},
             {"quadrature_element",
              [](RunConfig& c, const std::string& k, const std::string& v) {
                  quadrature_of(c).element = convert<int>(k, v);
              }},
             {"quadrature_edge",
              [](RunConfig& c, const std::string& k, const std::string& v) {
                  quadrature_of(c).edge = convert<int>(k, v);
              }},
         }},
        {"physics",
         {
             {"mu", param(&FormParams::mu)},
             {"nu", param(&FormParams::nu)},
             {"kappa1", param(&FormParams::kappa1)},
             {"kappa2", param(&FormParams::kappa2)},
             {"beta1", param(&FormParams::beta1)},
             {"beta2", param(&FormParams::beta2)},
         }},
        {"time",
         {
             {"dt", field(&RunConfig::dt)},
             {"t_final", field(&RunConfig::t_final)},
         }},
        {"boundary",
         {
             {"mode",
              [](RunConfig& c, const std::string& k, const std::string& v) {
                  if (v == "homogeneous") {
                      c.boundary = BoundaryMode::homogeneous;
                  } else if (v == "reservoir") {
                      c.boundary = BoundaryMode::reservoir;
                  } else {
                      throw ConfigError("bad value for '" + k + "': expected homogeneous or reservoir");
                  }
              }},
             {"surface_charge",
              [](RunConfig& c, const std::string& k, const std::string& v) {
                  c.reservoir.surface_charge = convert<double>(k, v);
              }},
             {"ground_value",
              [](RunConfig& c, const std::string& k, const std::string& v) {
                  c.reservoir.ground_value = convert<double>(k, v);
              }},
         }},
        {"solver",
         {
             {"kind",
              [](RunConfig& c, const std::string& k, const std::string& v) {
                  if (v == "direct") {
                      c.solver.kind = SolverKind::direct;
                  } else if (v == "iterative") {
                      c.solver.kind = SolverKind::iterative;
                  } else {
                      throw ConfigError("bad value for '" + k + "': expected direct or iterative");
                  }
              }},
             {"tol",
              [](RunConfig& c, const std::string& k, const std::string& v) { c.solver.tol = convert<double>(k, v); }},
             {"max_iterations",
              [](RunConfig& c, const std::string& k, const std::string& v) {
                  c.solver.max_iterations = convert<int>(k, v);
              }},
         }},
    };
    return s;
}

}  // namespace

RunConfig parse_run_config(std::istream& in)
{
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    const auto& sch = schema();
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty()) {
            throw ConfigError("key '" + section + "' must be inside a section");
        }
        const auto it = sch.find(section);
        if (it == sch.end()) {
            throw ConfigError("unknown section [" + section + "]");
        }
        for (const auto& kv : body) {
            if (!it->second.count(kv.first)) {
                throw ConfigError("unknown key '" + kv.first + "' in [" + section + "]");
            }
        }
    }
    RunConfig cfg;
    if (const auto p = tree.get_optional<std::string>("run.preset")) {
        cfg = config_from_preset(*p);
    }
    // Degree first so a quadrature override starts from the right defaults.
    if (const auto k = tree.get_optional<std::string>("discretization.degree")) {
        cfg.degree = convert<int>("degree", *k);
    }
    for (const auto& [section, body] : tree) {
        const auto& setters = sch.at(section);
        for (const auto& kv : body) {
            setters.at(kv.first)(cfg, kv.first, kv.second.data());
        }
    }
    cfg.validate();
    return cfg;
}

RunConfig load_run_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file '" + path + "'");
    }
    return parse_run_config(in);
}

std::vector<std::string> csv_columns(bool with_errors)
{
    std::vector<std::string> c = {"t",      "mass1",  "mass2",    "min_c1",        "max_c1",       "min_c2",
                                  "max_c2", "E_elec", "E_total", "mass1_deviation", "mass2_deviation"};
    if (with_errors) {
        for (const char* e : {"phi_l2", "c1_l2", "c2_l2", "u_l2", "p_l2", "phi_energy", "c1_energy", "c2_energy",
                              "u_energy"}) {
            c.emplace_back(e);
        }
    }
    return c;
}

void write_csv_header(std::ostream& out, bool with_errors)
{
    const auto cols = csv_columns(with_errors);
    for (std::size_t i = 0; i < cols.size(); ++i) {
        out << (i ? "," : "") << cols[i];
    }
    out << '\n';
}

namespace {

std::string fmt(double v)
{
    if (std::isnan(v)) {
        return "nan";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12e", v);
    return buf;
}

}  // namespace

void write_csv_row(std::ostream& out, const DiagnosticsRecord& r, double mass1_0, double mass2_0)
{
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out << fmt(r.t) << ',' << fmt(r.mass1) << ',' << fmt(r.mass2) << ',' << fmt(r.min_c1) << ','
        << fmt(r.max_c1) << ',' << fmt(r.min_c2) << ',' << fmt(r.max_c2) << ',' << fmt(r.e_elec) << ','
        << fmt(r.e_total.value_or(nan)) << ',' << fmt(r.mass1 - mass1_0) << ',' << fmt(r.mass2 - mass2_0);
    if (r.errors) {
        const ErrorNorms& e = *r.errors;
        for (double v : {e.phi_l2, e.c1_l2, e.c2_l2, e.u_l2, e.p_l2, e.phi_energy, e.c1_energy, e.c2_energy,
                         e.u_energy}) {
            out << ',' << fmt(v);
        }
    }
    out << '\n';
}

namespace {

// Values of one component at the three vertices of every element, plus the
// element mean.
struct Samples {
    std::vector<double> vertex;  // 3 per element
    std::vector<double> mean;
};

Samples sample(const FieldVector& f, int comp, double shift)
{
    const BrokenSpace& s = *f.space();
    const TriMesh& m = s.mesh();
    Samples out;
    const std::array<Vec2, 3> corners = {Vec2{0.0, 0.0}, Vec2{1.0, 0.0}, Vec2{0.0, 1.0}};
    const Eigen::VectorXd& w = s.integral_weights();
    for (int e = 0; e < m.num_elements(); ++e) {
        for (const Vec2& xi : corners) {
            out.vertex.push_back(f.value(e, xi, comp) + shift);
        }
        const auto blk = f.element_block(e, comp);
        const int d0 = s.dof(e, comp, 0);
        out.mean.push_back(blk.dot(w.segment(d0, s.local_size())) / m.area(e) + shift);
    }
    return out;
}

void vtk_geometry(std::ostream& out, const TriMesh& m, const std::string& title)
{
    const int ne = m.num_elements();
    out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << 3 * ne << " double\n";
    for (int e = 0; e < ne; ++e) {
        for (int a = 0; a < 3; ++a) {
            const Vec2& v = m.vertices()[m.triangles()[e][a]];
            out << v.x << ' ' << v.y << " 0\n";
        }
    }
    out << "CELLS " << ne << ' ' << 4 * ne << '\n';
    for (int e = 0; e < ne; ++e) {
        out << "3 " << 3 * e << ' ' << 3 * e + 1 << ' ' << 3 * e + 2 << '\n';
    }
    out << "CELL_TYPES " << ne << '\n';
    for (int e = 0; e < ne; ++e) {
        out << "5\n";
    }
}

void vtk_scalars(std::ostream& out, const std::string& name, const std::vector<double>& v)
{
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (double x : v) {
        out << x << '\n';
    }
}

std::ofstream open_for_write(const std::string& path)
{
    std::ofstream out(path);
    if (!out) {
        throw OutputError("cannot write '" + path + "'");
    }
    out.precision(10);
    return out;
}

}  // namespace

std::vector<std::string> write_fields(const SystemState& s, const std::string& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw OutputError("cannot create directory '" + dir + "': " + ec.message());
    }
    char step[16];
    std::snprintf(step, sizeof step, "%06d", s.step);
    const TriMesh& m = s.phi.space()->mesh();
    const int ne = m.num_elements();
    std::vector<std::string> files;
    const auto title = [&](const std::string& f) { return f + " step " + step + " t=" + fmt(s.t); };

    const auto scalar_file = [&](const std::string& name, const FieldVector& f, double shift) {
        const std::string path = dir + "/" + name + "_" + step + ".vtk";
        std::ofstream out = open_for_write(path);
        vtk_geometry(out, m, title(name));
        const Samples smp = sample(f, 0, shift);
        out << "POINT_DATA " << 3 * ne << '\n';
        vtk_scalars(out, name, smp.vertex);
        out << "CELL_DATA " << ne << '\n';
        vtk_scalars(out, name + "_mean", smp.mean);
        if (!out) {
            throw OutputError("write failed for '" + path + "'");
        }
        files.push_back(path);
    };
    scalar_file("phi", s.phi, 0.0);
    scalar_file("c1", s.c1, s.m0);
    scalar_file("c2", s.c2, s.m0);
    scalar_file("p", s.p, 0.0);

    const std::string path = dir + "/u_" + step + ".vtk";
    std::ofstream out = open_for_write(path);
    vtk_geometry(out, m, title("u"));
    const Samples u0 = sample(s.u, 0, 0.0);
    const Samples u1 = sample(s.u, 1, 0.0);
    std::vector<double> mag(u0.vertex.size());
    for (std::size_t i = 0; i < mag.size(); ++i) {
        mag[i] = std::hypot(u0.vertex[i], u1.vertex[i]);
    }
    out << "POINT_DATA " << 3 * ne << '\n';
    out << "VECTORS u double\n";
    for (std::size_t i = 0; i < mag.size(); ++i) {
        out << u0.vertex[i] << ' ' << u1.vertex[i] << " 0\n";
    }
    vtk_scalars(out, "u_magnitude", mag);
    out << "CELL_DATA " << ne << '\n';
    out << "VECTORS u_mean double\n";
    for (int e = 0; e < ne; ++e) {
        out << u0.mean[e] << ' ' << u1.mean[e] << " 0\n";
    }
    if (!out) {
        throw OutputError("write failed for '" + path + "'");
    }
    files.push_back(path);
    return files;
}

RunSummary run_simulation(const RunConfig& cfg, bool write_output,
                          const std::function<void(const SystemState&)>& observer)
{
    cfg.validate();
    std::optional<ScenarioPreset> pre;
    if (cfg.preset) {
        pre = preset(*cfg.preset);
    }
    const bool manufactured = pre && pre->manufactured;
    const bool reservoir = cfg.boundary == BoundaryMode::reservoir;

    auto mesh = std::make_shared<const TriMesh>(build_rect_mesh(cfg.lx, cfg.ly, cfg.nx, cfg.ny));
    Discretization disc = Discretization::make(mesh, cfg.degree, !reservoir, cfg.zero_mean_concentrations, cfg.basis);
    SchemeConfig sc;
    sc.dt = cfg.dt;
    sc.t_final = cfg.t_final;
    sc.params = cfg.params;
    sc.boundary = cfg.boundary;
    sc.reservoir = cfg.reservoir;
    sc.solver = cfg.solver;
    sc.quadrature = cfg.quadrature;
    if (manufactured) {
        sc.sources = SourceTerms::from(forcing_terms(cfg.params));
    }
    Stepper stepper(disc, sc);

    const auto zero = [](const Vec2&) { return 0.0; };
    const auto zero_v = [](const Vec2&) { return Vec2{}; };
    SystemState s = pre ? stepper.initial_state(pre->c1_initial, pre->c2_initial, pre->u_initial, pre->p_initial)
                        : stepper.initial_state(zero, zero, zero_v);

    const ExactFields exact = manufactured_exact();
    const ExactFields* ex = manufactured ? &exact : nullptr;

    std::ofstream csv;
    if (write_output) {
        std::error_code ec;
        std::filesystem::create_directories(cfg.output_dir, ec);
        if (ec) {
            throw OutputError("cannot create directory '" + cfg.output_dir + "': " + ec.message());
        }
        csv = open_for_write(cfg.output_dir + "/diagnostics.csv");
        write_csv_header(csv, manufactured);
    }

    RunSummary sum;
    const auto snapshot_due = [&](const SystemState& st) {
        if (cfg.output_every > 0 && st.step > 0 && st.step % cfg.output_every == 0) {
            return true;
        }
        for (double t : cfg.snapshot_times) {
            if (std::abs(st.t - t) < 0.5 * cfg.dt) {
                return true;
            }
        }
        return false;
    };
    const auto visit = [&](const SystemState& st) {
        const DiagnosticsRecord r = make_record(st, cfg.params, ex);
        if (st.step == 0) {
            sum.mass1_initial = r.mass1;
            sum.mass2_initial = r.mass2;
            sum.initial_min_concentration = std::min(r.min_c1, r.min_c2);
        } else {
            sum.max_mass_deviation = std::max({sum.max_mass_deviation, std::abs(r.mass1 - sum.mass1_initial),
                                               std::abs(r.mass2 - sum.mass2_initial)});
            sum.min_concentration = std::min({sum.min_concentration, r.min_c1, r.min_c2});
            sum.positivity_violated = sum.min_concentration < cfg.positivity_threshold;
            if (write_output) {
                write_csv_row(csv, r, sum.mass1_initial, sum.mass2_initial);
            }
        }
        sum.records.push_back(r);
        if (write_output && cfg.write_fields && snapshot_due(st)) {
            for (auto& f : write_fields(st, cfg.output_dir)) {
                sum.files.push_back(std::move(f));
            }
        }
        if (observer) {
            observer(st);
        }
    };

    visit(s);
    const int steps = static_cast<int>(std::llround(cfg.t_final / cfg.dt));
    for (int i = 0; i < steps; ++i) {
        s = stepper.advance(s);
        visit(s);
    }
    if (write_output && !csv) {
        throw OutputError("write failed for '" + cfg.output_dir + "/diagnostics.csv'");
    }
    sum.final_state = std::move(s);
    return sum;
}

}  // namespace dgpnp
