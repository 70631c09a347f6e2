#pragma once

#include <complex>

namespace stokes {

using cplx = std::complex<double>;

// H = -d^2/dx^2 + x^{2M} + eps*alpha*x^{M-1}; parity +1 even, -1 odd
struct ModelSpec {
    double M = 3.0;
    double alpha = 0.0;
    int eps = +1;
    int parity = +1;

    double signed_alpha() const { return eps * alpha; }
    bool odd_integer_M() const;
    int m() const;  // M = 2m-1, only meaningful when odd_integer_M()

    void validate() const;       // M > 1, eps and parity are +-1
    void validate_nlie() const;  // additionally 0 <= alpha <= M
    void validate_relations() const;
};

struct SpectralConstants {
    double M = 0;
    double mu = 0;
    double b0 = 0;
    double a0 = 0;
    double nu = 0;
    double drive_scale = 0;  // b0 * nu^{-2 mu}
    cplx q;
};

SpectralConstants compute_constants(double M);

double theta_from_E(double E, const SpectralConstants& c);
double E_from_theta(double theta, const SpectralConstants& c);
cplx theta_from_E(cplx E, const SpectralConstants& c);
cplx E_from_theta(cplx theta, const SpectralConstants& c);

double potential(double x, double M, double signed_alpha);
inline double potential(double x, const ModelSpec& s) { return potential(x, s.M, s.signed_alpha()); }

// pi*(2j+1 - parity/2 + eps*alpha/(2M)), the quantization target of level j
double level_target(int j, const ModelSpec& s);

cplx drive_term(cplx theta, const ModelSpec& s, const SpectralConstants& c);

}  // namespace stokes
