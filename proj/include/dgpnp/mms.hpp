#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "dgpnp/forms.hpp"
#include "dgpnp/mesh.hpp"

namespace dgpnp {

using SpaceTimeScalar = std::function<double(const Vec2&, double)>;
using SpaceTimeVector = std::function<Vec2(const Vec2&, double)>;

/// Manufactured smooth solution on the unit square. Fields decay like
/// exp(-t); u is solenoidal and vanishes on the boundary, and phi, c1, c2
/// have zero normal derivative there.
///
/// The templated `*_raw` functions are the field definitions only; they are
/// what the finite-difference residual check differentiates (in long double).
struct ManufacturedSolution {
    template <typename T>
    static T phi_raw(T x, T y, T t)
    {
        const T pi = std::numbers::pi_v<T>;
        return std::exp(-t) * (std::cos(pi * x) * std::cos(pi * y) -
                               std::cos(2 * pi * x) * std::cos(2 * pi * y) / 4) /
               (2 * pi * pi);
    }
    template <typename T>
    static T c1_raw(T x, T y, T t)
    {
        const T pi = std::numbers::pi_v<T>;
        return std::exp(-t) * (std::cos(pi * x) * std::cos(pi * y) + 1) / 2;
    }
    template <typename T>
    static T c2_raw(T x, T y, T t)
    {
        const T pi = std::numbers::pi_v<T>;
        return std::exp(-t) * (std::cos(2 * pi * x) * std::cos(2 * pi * y) + 1) / 2;
    }
    template <typename T>
    static T u1_raw(T x, T y, T t)
    {
        const T pi = std::numbers::pi_v<T>;
        return std::exp(-t) * (std::sin(2 * pi * y) - std::cos(2 * pi * x) * std::sin(2 * pi * y));
    }
    template <typename T>
    static T u2_raw(T x, T y, T t)
    {
        const T pi = std::numbers::pi_v<T>;
        return -std::exp(-t) * (std::sin(2 * pi * x) - std::cos(2 * pi * y) * std::sin(2 * pi * x));
    }
    template <typename T>
    static T p_raw(T x, T y, T t)
    {
        const T pi = std::numbers::pi_v<T>;
        return std::exp(-t) * (std::cos(2 * pi * x) + std::sin(2 * pi * y));
    }

    static double phi(const Vec2& x, double t) { return phi_raw(x.x, x.y, t); }
    static double c1(const Vec2& x, double t) { return c1_raw(x.x, x.y, t); }
    static double c2(const Vec2& x, double t) { return c2_raw(x.x, x.y, t); }
    static Vec2 u(const Vec2& x, double t) { return {u1_raw(x.x, x.y, t), u2_raw(x.x, x.y, t)}; }
    static double p(const Vec2& x, double t) { return p_raw(x.x, x.y, t); }

    // hand-derived derivatives
    static Vec2 grad_phi(const Vec2& x, double t);
    static double lap_phi(const Vec2& x, double t);
    static Vec2 grad_c1(const Vec2& x, double t);
    static double lap_c1(const Vec2& x, double t);
    static Vec2 grad_c2(const Vec2& x, double t);
    static double lap_c2(const Vec2& x, double t);
    /// Rows: gradient of u1, gradient of u2.
    static std::array<Vec2, 2> grad_u(const Vec2& x, double t);
    static Vec2 lap_u(const Vec2& x, double t);
    static Vec2 grad_p(const Vec2& x, double t);
    static double div_u(const Vec2& x, double t);
    // every field is proportional to exp(-t)
    static double dt_c1(const Vec2& x, double t) { return -c1(x, t); }
    static double dt_c2(const Vec2& x, double t) { return -c2(x, t); }
    static Vec2 dt_u(const Vec2& x, double t) { return -1.0 * u(x, t); }
};

/// Sources that make the manufactured solution exact:
///   f_phi = -mu lap phi - (c1 - c2)
///   f_ci  = dt ci - kappa_i lap ci + u.grad ci - beta_i div(ci grad phi)
///   f_u   = dt u - nu lap u + (u.grad)u + grad p + (c1 - c2) grad phi
struct ForcingTerms {
    SpaceTimeScalar f_phi;
    SpaceTimeScalar f_c1;
    SpaceTimeScalar f_c2;
    SpaceTimeVector f_u;
};

ForcingTerms forcing_terms(const FormParams& params);

/// Exact fields in the form the diagnostics need.
struct ExactFields {
    SpaceTimeScalar phi;
    SpaceTimeScalar c1;
    SpaceTimeScalar c2;
    SpaceTimeVector u;
    SpaceTimeScalar p;
    std::function<Vec2(const Vec2&, double)> grad_phi;
    std::function<Vec2(const Vec2&, double)> grad_c1;
    std::function<Vec2(const Vec2&, double)> grad_c2;
    std::function<std::array<Vec2, 2>(const Vec2&, double)> grad_u;
};

ExactFields manufactured_exact();

enum class BoundaryMode { homogeneous, reservoir };

/// Potential boundary data of the charged-reservoir setup.
struct ReservoirBc {
    double surface_charge{1.0};  ///< mu grad phi . n on the bottom wall
    double ground_value{0.0};    ///< phi on the top wall
};

struct ScenarioPreset {
    std::string name;
    std::string description;
    double lx{1.0};
    double ly{1.0};
    int nx{8};
    int ny{8};
    int degree{1};
    FormParams params;
    double dt{0.01};
    double t_final{0.1};
    BoundaryMode boundary{BoundaryMode::homogeneous};
    ReservoirBc reservoir;
    /// X0h constraint on the shifted concentrations. Off for the manufactured
    /// solution, whose concentration mean decays in time.
    bool zero_mean_concentrations{true};
    bool manufactured{false};
    int output_every{0};
    std::vector<double> snapshot_times;

    std::function<double(const Vec2&)> c1_initial;
    std::function<double(const Vec2&)> c2_initial;
    std::function<Vec2(const Vec2&)> u_initial;
    std::function<double(const Vec2&)> p_initial;  ///< empty means zero
};

/// Known names: mms-k1, mms-k2, decay, reservoir. Throws std::invalid_argument otherwise.
ScenarioPreset preset(const std::string& name);
std::vector<std::string> preset_names();

/// Gaussian initial concentration of the reservoir setup for ion i (1 or 2).
double reservoir_gaussian(int ion, const Vec2& x);
/// Exact integral of reservoir_gaussian over [0,1]x[0,2] (error functions).
double reservoir_gaussian_mass();

}  // namespace dgpnp
