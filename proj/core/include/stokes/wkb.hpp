#pragma once

#include <string>

#include "stokes/model.hpp"

namespace stokes {

struct TurningPointData {
    double x0 = 0.0;      // right turning point
    double x0_neg = 0.0;  // |left turning point|, equal to x0 for an even potential
    double E = 0.0;
    double signed_alpha = 0.0;
    bool degenerate = false;  // E = 0 sitting on a second order turning point at the origin
};

TurningPointData turning_point(double E, const ModelSpec& spec);

// int sqrt(E - V) dx between the turning points
double wkb_action(double E, const ModelSpec& spec);

enum class WkbStatus { ok, formal_zero, no_root };

struct WkbLevel {
    int j = 0;
    double E = 0.0;
    WkbStatus status = WkbStatus::ok;
    std::string marker() const;  // "", "0*" or the diamond
};

// action(E) = (j + 1/2) pi on E >= 0
WkbLevel wkb_energy(int j, const ModelSpec& spec);

double wkb_asymptotic_energy(int j, const SpectralConstants& c);

}  // namespace stokes
