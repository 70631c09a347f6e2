#include "stokes/model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "stokes/error.hpp"
#include "stokes/special.hpp"

namespace stokes {

using std::numbers::pi;

bool ModelSpec::odd_integer_M() const {
    double r = std::round(M);
    return std::abs(M - r) < 1e-12 && static_cast<long>(r) % 2 == 1;
}

int ModelSpec::m() const { return static_cast<int>(std::lround((M + 1.0) / 2.0)); }

void ModelSpec::validate() const {
    if (!(M > 1.0) || !std::isfinite(M)) fail_validation("M must be > 1, got " + std::to_string(M));
    if (!std::isfinite(alpha)) fail_validation("alpha must be finite");
    if (eps != 1 && eps != -1) fail_validation("eps must be +1 or -1");
    if (parity != 1 && parity != -1) fail_validation("parity must be +1 or -1");
}

void ModelSpec::validate_nlie() const {
    validate();
    if (alpha < 0.0 || alpha > M + 1e-12)
        fail_validation("NLIE requires 0 <= |alpha| <= M (got |alpha| = " + std::to_string(alpha) +
                        ", M = " + std::to_string(M) + "); beyond that levels go negative");
}

void ModelSpec::validate_relations() const {
    validate();
    if (!odd_integer_M()) fail_validation("functional relations need M = 2m-1 with integer m");
}

SpectralConstants compute_constants(double M) {
    if (!(M > 1.0)) fail_validation("M must be > 1");
    SpectralConstants c;
    c.M = M;
    c.mu = (M + 1.0) / (2.0 * M);
    c.b0 = std::sqrt(pi) * gamma_fn(1.0 / (2.0 * M)) / (M * gamma_fn(1.5 + 1.0 / (2.0 * M)));
    c.a0 = c.b0 / (2.0 * std::sin(c.mu * pi));
    c.nu = std::pow(2.0 * M + 2.0, -1.0 / (2.0 * c.mu)) / gamma_fn(1.0 / (2.0 * c.mu));
    c.drive_scale = c.b0 * std::pow(c.nu, -2.0 * c.mu);
    c.q = std::polar(1.0, pi / (M + 1.0));
    return c;
}

double theta_from_E(double E, const SpectralConstants& c) {
    if (!(E > 0.0)) fail_validation("theta_from_E needs E > 0 on the real branch");
    return c.mu * std::log(c.nu * c.nu * E);
}

double E_from_theta(double theta, const SpectralConstants& c) { return std::exp(theta / c.mu) / (c.nu * c.nu); }

cplx theta_from_E(cplx E, const SpectralConstants& c) { return c.mu * std::log(c.nu * c.nu * E); }

cplx E_from_theta(cplx theta, const SpectralConstants& c) { return std::exp(theta / c.mu) / (c.nu * c.nu); }

double potential(double x, double M, double signed_alpha) {
    double ax = std::abs(x);
    double x2M = std::pow(ax, 2.0 * M);
    // x^{M-1}: keep the sign for odd powers when M is an integer
    double xm1 = std::pow(ax, M - 1.0);
    if (x < 0.0) {
        double r = std::round(M - 1.0);
        if (std::abs(M - 1.0 - r) < 1e-12 && static_cast<long>(r) % 2 != 0) xm1 = -xm1;
    }
    return x2M + signed_alpha * xm1;
}

double level_target(int j, const ModelSpec& s) {
    return pi * (2.0 * j + 1.0 - 0.5 * s.parity + s.signed_alpha() / (2.0 * s.M));
}

cplx drive_term(cplx theta, const ModelSpec& s, const SpectralConstants& c) {
    const cplx i(0.0, 1.0);
    return -0.5 * i * c.drive_scale * std::exp(theta) + 0.5 * pi * i * (-s.parity + s.signed_alpha() / s.M);
}

}  // namespace stokes
