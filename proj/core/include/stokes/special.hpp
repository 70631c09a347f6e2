#pragma once

#include <vector>

namespace stokes {

// Lanczos approximation (g=7, 9 terms), reflection below 1/2
double gamma_fn(double x);
double lgamma_fn(double x);

struct GaussRule {
    std::vector<double> x;
    std::vector<double> w;
};

// n-point Gauss-Legendre on [-1, 1]
const GaussRule& gauss_legendre(int n);

}  // namespace stokes
