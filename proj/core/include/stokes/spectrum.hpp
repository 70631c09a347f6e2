#pragma once

#include <string>
#include <vector>

namespace stokes {

struct Level {
    int j = 0;
    int parity = +1;
    int eps = +1;
    double E = 0.0;
    double theta = 0.0;
    std::string method;
    double residual = 0.0;
    double err_est = 0.0;
};

struct Spectrum {
    std::vector<Level> entries;

    // levels of one (eps, parity) family in ascending order
    std::vector<double> energies(int eps, int parity) const;
    void sort();
};

}  // namespace stokes
