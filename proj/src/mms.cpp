#include "dgpnp/mms.hpp"

#include <stdexcept>

namespace dgpnp {

namespace {

constexpr double kPi = std::numbers::pi;

struct Trig {
    double e, cx, sx, cy, sy, c2x, s2x, c2y, s2y;
};

Trig trig(const Vec2& x, double t)
{
    return {std::exp(-t),
            std::cos(kPi * x.x),
            std::sin(kPi * x.x),
            std::cos(kPi * x.y),
            std::sin(kPi * x.y),
            std::cos(2 * kPi * x.x),
            std::sin(2 * kPi * x.x),
            std::cos(2 * kPi * x.y),
            std::sin(2 * kPi * x.y)};
}

}  // namespace

Vec2 ManufacturedSolution::grad_phi(const Vec2& x, double t)
{
    const Trig g = trig(x, t);
    const double s = g.e / (2 * kPi * kPi);
    return {s * (-kPi * g.sx * g.cy + 0.5 * kPi * g.s2x * g.c2y),
            s * (-kPi * g.cx * g.sy + 0.5 * kPi * g.c2x * g.s2y)};
}

double ManufacturedSolution::lap_phi(const Vec2& x, double t)
{
    const Trig g = trig(x, t);
    return g.e * (g.c2x * g.c2y - g.cx * g.cy);
}

Vec2 ManufacturedSolution::grad_c1(const Vec2& x, double t)
{
    const Trig g = trig(x, t);
    return {-0.5 * kPi * g.e * g.sx * g.cy, -0.5 * kPi * g.e * g.cx * g.sy};
}

double ManufacturedSolution::lap_c1(const Vec2& x, double t)
{
    const Trig g = trig(x, t);
    return -kPi * kPi * g.e * g.cx * g.cy;
}

Vec2 ManufacturedSolution::grad_c2(const Vec2& x, double t)
{
    const Trig g = trig(x, t);
    return {-kPi * g.e * g.s2x * g.c2y, -kPi * g.e * g.c2x * g.s2y};
}

double ManufacturedSolution::lap_c2(const Vec2& x, double t)
{
    const Trig g = trig(x, t);
    return -4 * kPi * kPi * g.e * g.c2x * g.c2y;
}

std::array<Vec2, 2> ManufacturedSolution::grad_u(const Vec2& x, double t)
{
    const Trig g = trig(x, t);
    const double w = 2 * kPi * g.e;
    return {Vec2{w * g.s2y * g.s2x, w * g.c2y * (1 - g.c2x)},
            Vec2{-w * g.c2x * (1 - g.c2y), -w * g.s2x * g.s2y}};
}

Vec2 ManufacturedSolution::lap_u(const Vec2& x, double t)
{
    const Trig g = trig(x, t);
    const double w = 4 * kPi * kPi * g.e;
    return {w * g.s2y * (2 * g.c2x - 1), -w * g.s2x * (2 * g.c2y - 1)};
}

Vec2 ManufacturedSolution::grad_p(const Vec2& x, double t)
{
    const Trig g = trig(x, t);
    return {-2 * kPi * g.e * g.s2x, 2 * kPi * g.e * g.c2y};
}

double ManufacturedSolution::div_u(const Vec2& x, double t)
{
    const auto g = grad_u(x, t);
    return g[0].x + g[1].y;
}

ForcingTerms forcing_terms(const FormParams& params)
{
    using S = ManufacturedSolution;
    params.validate();
    ForcingTerms f;
    f.f_phi = [mu = params.mu](const Vec2& x, double t) {
        return -mu * S::lap_phi(x, t) - (S::c1(x, t) - S::c2(x, t));
    };
    f.f_c1 = [k = params.kappa1, b = params.beta1](const Vec2& x, double t) {
        const Vec2 gc = S::grad_c1(x, t);
        const double drift = dot(gc, S::grad_phi(x, t)) + S::c1(x, t) * S::lap_phi(x, t);
        return S::dt_c1(x, t) - k * S::lap_c1(x, t) + dot(S::u(x, t), gc) - b * drift;
    };
    f.f_c2 = [k = params.kappa2, b = params.beta2](const Vec2& x, double t) {
        const Vec2 gc = S::grad_c2(x, t);
        const double drift = dot(gc, S::grad_phi(x, t)) + S::c2(x, t) * S::lap_phi(x, t);
        return S::dt_c2(x, t) - k * S::lap_c2(x, t) + dot(S::u(x, t), gc) - b * drift;
    };
    f.f_u = [nu = params.nu](const Vec2& x, double t) {
        const Vec2 u = S::u(x, t);
        const auto gu = S::grad_u(x, t);
        const Vec2 conv{dot(u, gu[0]), dot(u, gu[1])};
        const double charge = S::c1(x, t) - S::c2(x, t);
        return S::dt_u(x, t) - nu * S::lap_u(x, t) + conv + S::grad_p(x, t) + charge * S::grad_phi(x, t);
    };
    return f;
}

ExactFields manufactured_exact()
{
    using S = ManufacturedSolution;
    return {S::phi, S::c1, S::c2, S::u, S::p, S::grad_phi, S::grad_c1, S::grad_c2, S::grad_u};
}

namespace {

constexpr double kGaussR = 0.25;
constexpr double kGaussMass = 3.0;

Vec2 gaussian_centre(int ion)
{
    const double q = ion == 1 ? 1.0 : -1.0;
    return {0.5 - q / 8.0, 1.0 - q / 2.0};
}

ScenarioPreset mms_preset(int k)
{
    using S = ManufacturedSolution;
    ScenarioPreset p;
    p.name = k == 1 ? "mms-k1" : "mms-k2";
    p.description = "manufactured solution on the unit square, P" + std::to_string(k) + " spaces";
    p.degree = k;
    p.params.sigma = k == 1 ? 10.0 : 40.0;
    p.nx = p.ny = 8;
    p.t_final = 0.1;
    p.dt = 0.1 * std::pow(1.0 / p.nx, k + 1);
    p.zero_mean_concentrations = false;
    p.manufactured = true;
    p.c1_initial = [](const Vec2& x) { return S::c1(x, 0.0); };
    p.c2_initial = [](const Vec2& x) { return S::c2(x, 0.0); };
    p.u_initial = [](const Vec2& x) { return S::u(x, 0.0); };
    p.p_initial = [](const Vec2& x) { return S::p(x, 0.0); };
    return p;
}

ScenarioPreset decay_preset()
{
    ScenarioPreset p;
    p.name = "decay";
    p.description = "free decay of a periodic ion and vortex field on the unit square";
    p.degree = 2;
    p.params.sigma = 40.0;
    p.nx = p.ny = 64;
    p.dt = 0.001;
    p.t_final = 0.5;
    p.output_every = 100;
    p.c1_initial = [](const Vec2& x) { return std::cos(2 * kPi * x.x) + 1.0; };
    p.c2_initial = [](const Vec2& x) { return std::cos(2 * kPi * x.y) + 1.0; };
    p.u_initial = [](const Vec2& x) {
        return Vec2{10.0 * std::sin(2 * kPi * x.x) * std::cos(2 * kPi * x.y),
                    -10.0 * std::sin(2 * kPi * x.y) * std::cos(2 * kPi * x.x)};
    };
    return p;
}

ScenarioPreset reservoir_preset()
{
    ScenarioPreset p;
    p.name = "reservoir";
    p.description = "ion spreading in a closed channel with a charged bottom wall and grounded top";
    p.lx = 1.0;
    p.ly = 2.0;
    p.nx = 64;
    p.ny = 128;
    p.degree = 2;
    p.params.sigma = 40.0;
    p.params.nu = 0.08;
    p.params.mu = 0.01;
    p.params.kappa1 = 0.5;
    p.params.kappa2 = 0.5;
    p.params.beta1 = 0.01;
    p.params.beta2 = -0.01;
    p.dt = 0.01;
    p.t_final = 10.0;
    p.boundary = BoundaryMode::reservoir;
    p.output_every = 25;
    p.snapshot_times = {0.01, 0.25, 0.5, 0.75, 1.0, 2.5, 5.0, 10.0};
    p.c1_initial = [](const Vec2& x) { return reservoir_gaussian(1, x); };
    p.c2_initial = [](const Vec2& x) { return reservoir_gaussian(2, x); };
    p.u_initial = [](const Vec2&) { return Vec2{}; };
    return p;
}

}  // namespace

double reservoir_gaussian(int ion, const Vec2& x)
{
    if (ion != 1 && ion != 2) {
        throw std::invalid_argument("reservoir_gaussian: ion must be 1 or 2");
    }
    const Vec2 c = gaussian_centre(ion);
    const Vec2 d = x - c;
    return kGaussMass / (2 * kPi * kGaussR * kGaussR) * std::exp(-dot(d, d) / (2 * kGaussR * kGaussR));
}

double reservoir_gaussian_mass()
{
    const Vec2 c = gaussian_centre(1);
    const double s = kGaussR * std::sqrt(2.0);
    // 1D integral of exp(-(z-c)^2 / (2R^2)) over [a, b]
    const auto line = [&](double a, double b, double centre) {
        return 0.5 * s * std::sqrt(kPi) * (std::erf((b - centre) / s) - std::erf((a - centre) / s));
    };
    return kGaussMass / (2 * kPi * kGaussR * kGaussR) * line(0.0, 1.0, c.x) * line(0.0, 2.0, c.y);
}

std::vector<std::string> preset_names() { return {"mms-k1", "mms-k2", "decay", "reservoir"}; }

ScenarioPreset preset(const std::string& name)
{
    if (name == "mms-k1") {
        return mms_preset(1);
    }
    if (name == "mms-k2") {
        return mms_preset(2);
    }
    if (name == "decay") {
        return decay_preset();
    }
    if (name == "reservoir") {
        return reservoir_preset();
    }
    throw std::invalid_argument("unknown preset '" + name + "'");
}

}  // namespace dgpnp
