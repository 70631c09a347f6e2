#pragma once

#include <vector>

#include "stokes/kernels.hpp"
#include "stokes/model.hpp"
#include "stokes/spectrum.hpp"

namespace stokes {

struct SolverConfig {
    Grid grid{-20.0, 10.0, 4096};
    double delta = 0.1;
    double damping = 0.5;
    double tol = 1e-11;
    int max_iter = 500;
    // where the A ~ E plateau is replaced by its small-E model (alpha = M only)
    double theta_c = -6.0;

    void validate(double M) const;
};

// ln A = c0 + c1 * theta' continues the samples left of theta_min
struct LeftTail {
    cplx c0 = 0.0;
    cplx c1 = 0.0;
};

struct AuxiliaryState {
    double M = 3.0;
    double alpha = 0.0;
    int parity = +1;
    SolverConfig cfg;

    // samples on theta_i - i delta, index 0 is eps=+1, index 1 is eps=-1
    std::vector<cplx> ln_a[2];
    std::vector<cplx> ln_A[2];
    LeftTail tail[2];
    bool singular[2] = {false, false};

    std::vector<double> residual_history;
    int iterations = 0;
    int newton_steps = 0;
    double residual = 0.0;

    const std::vector<cplx>& lnA(int eps) const { return ln_A[eps > 0 ? 0 : 1]; }
    const std::vector<cplx>& lna(int eps) const { return ln_a[eps > 0 ? 0 : 1]; }
};

// Coupled equations for (a^{(+)}, a^{(-)}) at one parity.
AuxiliaryState solve(double M, double alpha, int parity, const SolverConfig& cfg, const KernelTable& kernels);

// Integrals dropped: the zeroth iterate, pure drive.
AuxiliaryState drive_only(double M, double alpha, int parity, const SolverConfig& cfg);

Level extract_level(const AuxiliaryState& st, const KernelTable& kernels, int j, int eps);
Spectrum spectrum(const AuxiliaryState& st, const KernelTable& kernels, int j_max);

struct CurveRow {
    double theta;
    double re_plus, im_plus, re_minus, im_minus;
};
std::vector<CurveRow> export_lnA(const AuxiliaryState& st);

}  // namespace stokes
