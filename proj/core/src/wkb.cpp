#include "stokes/wkb.hpp"

#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "stokes/error.hpp"
#include "stokes/special.hpp"

namespace stokes {

namespace {

using std::numbers::pi;

auto tight(double rel) {
    return [rel](double a, double b) { return std::abs(a - b) <= rel * std::max(std::abs(a), 1e-300); };
}

// root of V(side*y) = E on y > 0; V(side*y) - E is negative up to its minimum and then increases
double side_root(double E, const ModelSpec& spec, int side) {
    auto f = [&](double y) { return potential(side * y, spec) - E; };
    const double M = spec.M;
    const double coef = side > 0 ? spec.signed_alpha() : potential(-1.0, spec) - 1.0;  // coefficient of y^{M-1}
    double lo = 0.0;
    if (coef < 0.0) lo = std::pow(-coef * (M - 1.0) / (2.0 * M), 1.0 / (M + 1.0));
    if (E == 0.0) return coef < 0.0 ? std::pow(-coef, 1.0 / (M + 1.0)) : 0.0;
    double hi = std::max(1.0, 2.0 * lo);
    while (f(hi) < 0.0) hi *= 2.0;
    std::uintmax_t it = 200;
    auto r = boost::math::tools::toms748_solve(f, lo, hi, f(lo), f(hi), tight(1e-15), it);
    double x = 0.5 * (r.first + r.second);
    // one Newton polish
    const double h = 1e-7 * x;
    const double d = (f(x + h) - f(x - h)) / (2.0 * h);
    if (d > 0.0) {
        const double xn = x - f(x) / d;
        if (std::abs(f(xn)) < std::abs(f(x))) x = xn;
    }
    return x;
}

double half_action(double E, const ModelSpec& spec, double x0, int side) {
    if (x0 == 0.0) return 0.0;
    // x = x0 sin(phi) takes the square root out of the endpoint
    const auto& gl = gauss_legendre(96);
    double s = 0.0;
    for (std::size_t k = 0; k < gl.x.size(); ++k) {
        const double phi = 0.25 * pi * (gl.x[k] + 1.0);
        const double x = x0 * std::sin(phi);
        const double v = E - potential(side * x, spec);
        if (v < -1e-9 * std::max(1.0, std::abs(E))) throw Error(ErrorKind::validation, "classically forbidden gap inside the well");
        s += gl.w[k] * std::sqrt(std::max(v, 0.0)) * x0 * std::cos(phi);
    }
    return 0.25 * pi * s;
}

}  // namespace

std::string WkbLevel::marker() const {
    switch (status) {
        case WkbStatus::formal_zero: return "0*";
        case WkbStatus::no_root: return "◇";
        default: return "";
    }
}

TurningPointData turning_point(double E, const ModelSpec& spec) {
    spec.validate();
    if (!(E >= 0.0)) fail_validation("turning point needs E >= 0");
    TurningPointData t;
    t.E = E;
    t.signed_alpha = spec.signed_alpha();
    t.x0 = side_root(E, spec, +1);
    t.x0_neg = side_root(E, spec, -1);
    if (E == 0.0) {
        if (t.x0 == 0.0 && t.x0_neg == 0.0) fail_validation("E = 0 has no well to quantize");
        t.degenerate = true;
    }
    return t;
}

double wkb_action(double E, const ModelSpec& spec) {
    const auto t = turning_point(E, spec);
    return half_action(E, spec, t.x0, +1) + half_action(E, spec, t.x0_neg, -1);
}

WkbLevel wkb_energy(int j, const ModelSpec& spec) {
    if (j < 0) fail_validation("level index must be >= 0");
    spec.validate();
    const double target = (j + 0.5) * pi;
    WkbLevel lv;
    lv.j = j;
    // action at the bottom of the well; positive only for a double well
    const double a0 = (potential(1.0, spec) < 1.0 || potential(-1.0, spec) < 1.0) ? wkb_action(0.0, spec) : 0.0;
    if (std::abs(a0 - target) <= 1e-9 * target) {
        lv.status = WkbStatus::formal_zero;
        return lv;
    }
    if (a0 > target) {
        lv.status = WkbStatus::no_root;
        lv.E = std::numeric_limits<double>::quiet_NaN();
        return lv;
    }
    auto f = [&](double E) { return wkb_action(E, spec) - target; };
    double lo = 0.0, flo = a0 - target;
    double hi = 1.0, fhi = f(hi);
    while (fhi < 0.0) {
        lo = hi;
        flo = fhi;
        hi *= 2.0;
        fhi = f(hi);
    }
    std::uintmax_t it = 200;
    auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tight(1e-13), it);
    lv.E = 0.5 * (r.first + r.second);
    return lv;
}

double wkb_asymptotic_energy(int j, const SpectralConstants& c) {
    if (j < 0) fail_validation("level index must be >= 0");
    return std::pow(2.0 * pi * (j + 0.5) / c.b0, 1.0 / c.mu);
}

}  // namespace stokes
