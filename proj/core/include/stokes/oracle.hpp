#pragma once

#include "stokes/model.hpp"
#include "stokes/spectrum.hpp"

namespace stokes {

struct IntegratorConfig {
    double x_max = 0.0;       // 0: chosen from the WKB smallness parameter
    double eta = 0.01;        // target |Q'|/|Q|^{3/2} at the start point
    double rtol = 1e-12;
    int wkb_orders = 10;      // Riccati series terms for the start data
    bool estimate_quality = false;  // rerun at 100x tighter rtol and 1.2x x_max
    double max_abs_E = 1e4;
};

// phi(0) and phi'(0) of the solution decaying like x^{-(M+a)/2} exp(-x^{M+1}/(M+1)), a = signed alpha
struct ConnectionPoint {
    cplx phi0;
    cplx dphi0;
    cplx E;
    double quality = 0.0;  // relative change under the rerun, 0 when not estimated
    double x_max = 0.0;
};

ConnectionPoint phi_at_origin(double M, double signed_alpha, cplx E, const IntegratorConfig& cfg = {});

// start abscissa where the WKB series is reliable
double choose_x_max(double M, double signed_alpha, cplx E, double eta);

// Riccati series u ~ phi'/phi at x, and log phi(x) including the integral out to infinity
struct AsymptoticData {
    cplx u;
    cplx log_phi;
    double last_term = 0.0;  // size of the smallest series term used
};
AsymptoticData asymptotic_data(double M, double signed_alpha, cplx E, double x, int orders);

// j-th level of the given parity (j counts within the parity)
Level shoot_eigenvalue(const ModelSpec& spec, int j, const IntegratorConfig& cfg = {});
// root of phi(0) (odd) or phi'(0) (even) in [lo, hi]; the bracket must hold one sign change
Level shoot_eigenvalue(const ModelSpec& spec, double lo, double hi, const IntegratorConfig& cfg = {});

// real phi and phi' at the points xs (returned ascending); E real
struct WavePoint {
    double x, psi, dpsi;
};
std::vector<WavePoint> wavefunction(double M, double signed_alpha, double E, std::vector<double> xs,
                                    const IntegratorConfig& cfg = {});

// number of zeros of phi on (0, x_max) at real E: the count of odd levels below E
int node_count(double M, double signed_alpha, double E, const IntegratorConfig& cfg = {});

// lowest n_levels of H, alternating even/odd
Spectrum spectrum_oracle(double M, double signed_alpha, int n_levels, const IntegratorConfig& cfg = {});

// levels of one parity, j = 0 .. count-1
std::vector<double> parity_levels(double M, double signed_alpha, int parity, int count, const IntegratorConfig& cfg = {});

}  // namespace stokes
