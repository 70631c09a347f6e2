#include "stokes/spectrum.hpp"

#include <algorithm>

namespace stokes {

std::vector<double> Spectrum::energies(int eps, int parity) const {
    std::vector<double> out;
    for (const auto& l : entries)
        if (l.eps == eps && l.parity == parity) out.push_back(l.E);
    std::sort(out.begin(), out.end());
    return out;
}

void Spectrum::sort() {
    std::stable_sort(entries.begin(), entries.end(), [](const Level& a, const Level& b) {
        if (a.eps != b.eps) return a.eps > b.eps;
        return a.E < b.E;
    });
}

}  // namespace stokes
