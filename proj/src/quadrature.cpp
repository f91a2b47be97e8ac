#include "dgpnp/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dgpnp {

namespace {

struct RuleBuilder {
    QuadratureRule rule;

    void centroid(double w)
    {
        rule.points.push_back({1.0 / 3.0, 1.0 / 3.0});
        rule.weights.push_back(0.5 * w);
    }

    // barycentric (a, a, 1-2a) and rotations
    void orbit3(double a, double w)
    {
        const double c = 1.0 - 2.0 * a;
        rule.points.push_back({a, a});
        rule.points.push_back({a, c});
        rule.points.push_back({c, a});
        for (int i = 0; i < 3; ++i) {
            rule.weights.push_back(0.5 * w);
        }
    }

    // barycentric (a, b, 1-a-b) and all permutations
    void orbit6(double a, double b, double w)
    {
        const double c = 1.0 - a - b;
        rule.points.push_back({a, b});
        rule.points.push_back({b, a});
        rule.points.push_back({a, c});
        rule.points.push_back({c, a});
        rule.points.push_back({b, c});
        rule.points.push_back({c, b});
        for (int i = 0; i < 6; ++i) {
            rule.weights.push_back(0.5 * w);
        }
    }
};

// Dunavant (1985) rules, weights normalized to sum 1 before the 1/2 area factor.
QuadratureRule dunavant(int degree)
{
    RuleBuilder b;
    b.rule.degree = degree;
    switch (degree) {
        case 1:
            b.centroid(1.0);
            break;
        case 2:
            b.orbit3(1.0 / 6.0, 1.0 / 3.0);
            break;
        case 4:
            b.orbit3(0.44594849091596488631832925388305, 0.22338158967801146569500700843312);
            b.orbit3(0.09157621350977074345957146340220, 0.10995174365532186763832632490021);
            break;
        case 5:
            b.centroid(0.225);
            b.orbit3(0.47014206410511508977044120951345, 0.13239415278850618073764938783315);
            b.orbit3(0.10128650732345633880098736191512, 0.12593918054482715259568394550018);
            break;
        case 6:
            b.orbit3(0.24928674517091042129163855310702, 0.11678627572637936602528961138558);
            b.orbit3(0.06308901449150222834033160287082, 0.05084490637020681692093680910686);
            b.orbit6(0.31035245103378440541660773395655, 0.63650249912139864723014259441205,
                     0.08285107561837357519355345642044);
            break;
        case 8:
            b.centroid(0.14431560767778716825109111048906);
            b.orbit3(0.17056930775176020662229350149146, 0.10321737053471825028179155029212);
            b.orbit3(0.05054722831703097545842355059660, 0.03245849762319808031092592834178);
            b.orbit3(0.45929258829272315602881551449417, 0.09509163426728462479389610438858);
            b.orbit6(0.26311282963463811342178578628464, 0.72849239295540428124100037917606,
                     0.02723031417443499426484469007390);
            break;
        case 9:
            b.centroid(0.09713579628279609890744676309485);
            b.orbit3(0.48968251919873762778370692483619, 0.03133470022713983234393199080984);
            b.orbit3(0.43708959149293663726993036443535, 0.07782754100477543338465495857972);
            b.orbit3(0.18820353561903273024096128046733, 0.07964773892720910288013526957424);
            b.orbit3(0.04472951339445297061024247196780, 0.02557767565869810438673914467637);
            b.orbit6(0.22196298916076569567510252769319, 0.74119859878449802069007987352342,
                     0.04328353937728937728937728937729);
            break;
        default:
            throw std::invalid_argument("dunavant: no tabulated rule");
    }
    return std::move(b.rule);
}

}  // namespace

LineRule gauss_legendre(int n)
{
    if (n < 1) {
        throw std::invalid_argument("gauss_legendre: n must be >= 1");
    }
    LineRule rule;
    rule.degree = 2 * n - 1;
    rule.points.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        // Newton iteration on P_n from the Chebyshev-like initial guess
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double pn = (n == 1) ? x : p1;
            const double pnm1 = (n == 1) ? 1.0 : p0;
            dp = n * (x * pn - pnm1) / (x * x - 1.0);
            const double dx = pn / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        // recompute derivative at the converged node
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        const double pn = (n == 1) ? x : p1;
        const double pnm1 = (n == 1) ? 1.0 : p0;
        dp = n * (x * pn - pnm1) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.points[n - 1 - i] = 0.5 * (x + 1.0);
        rule.weights[n - 1 - i] = 0.5 * w;
    }
    return rule;
}

LineRule line_rule(int degree)
{
    const int n = std::max(1, (degree + 2) / 2);
    LineRule rule = gauss_legendre(n);
    rule.degree = 2 * n - 1;
    return rule;
}

QuadratureRule collapsed_gauss_rule(int degree)
{
    // x = s, y = t (1 - s) on the unit square with Jacobian (1 - s); the extra
    // linear factor in s raises the required 1D exactness by one.
    const int n = std::max(1, (degree + 3) / 2);
    const LineRule g = gauss_legendre(n);
    QuadratureRule rule;
    rule.degree = 2 * n - 2;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double s = g.points[i];
            const double t = g.points[j];
            rule.points.push_back({s, t * (1.0 - s)});
            rule.weights.push_back(g.weights[i] * g.weights[j] * (1.0 - s));
        }
    }
    return rule;
}

QuadratureRule triangle_rule(int degree)
{
    if (degree < 0) {
        throw std::invalid_argument("triangle_rule: negative degree");
    }
    switch (degree) {
        case 0:
        case 1: return dunavant(1);
        case 2: return dunavant(2);
        case 3:
        case 4: return dunavant(4);
        case 5: return dunavant(5);
        case 6: return dunavant(6);
        case 7:
        case 8: return dunavant(8);
        case 9: return dunavant(9);
        default: return collapsed_gauss_rule(degree);
    }
}

}  // namespace dgpnp
