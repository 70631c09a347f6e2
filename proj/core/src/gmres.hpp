#pragma once

// Restarted GMRES for a matrix-free real operator.

#include <cmath>
#include <functional>
#include <vector>

namespace stokes::detail {

using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

struct GmresResult {
    Vec x;
    int matvecs = 0;
    double rel_residual = 1.0;
};

// Solves A x = b from x = 0 until |r| <= rtol |b|.
inline GmresResult gmres(const std::function<Vec(const Vec&)>& A, const Vec& b, double rtol, int restart,
                         int max_matvecs) {
    const std::size_t n = b.size();
    GmresResult res;
    res.x.assign(n, 0.0);
    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        res.rel_residual = 0.0;
        return res;
    }
    Vec r = b;
    while (res.matvecs < max_matvecs) {
        double beta = norm2(r);
        res.rel_residual = beta / bnorm;
        if (res.rel_residual <= rtol) break;

        std::vector<Vec> V;
        V.reserve(restart + 1);
        V.push_back(r);
        for (auto& v : V[0]) v /= beta;
        std::vector<std::vector<double>> H(restart + 1, std::vector<double>(restart, 0.0));
        std::vector<double> cs(restart), sn(restart), g(restart + 1, 0.0);
        g[0] = beta;
        int k = 0;
        for (; k < restart && res.matvecs < max_matvecs; ++k) {
            Vec w = A(V[k]);
            ++res.matvecs;
            for (int i = 0; i <= k; ++i) {
                H[i][k] = dot(w, V[i]);
                for (std::size_t t = 0; t < n; ++t) w[t] -= H[i][k] * V[i][t];
            }
            H[k + 1][k] = norm2(w);
            for (int i = 0; i < k; ++i) {
                double tmp = cs[i] * H[i][k] + sn[i] * H[i + 1][k];
                H[i + 1][k] = -sn[i] * H[i][k] + cs[i] * H[i + 1][k];
                H[i][k] = tmp;
            }
            double den = std::hypot(H[k][k], H[k + 1][k]);
            cs[k] = H[k][k] / den;
            sn[k] = H[k + 1][k] / den;
            double hk1 = H[k + 1][k];
            H[k][k] = den;
            H[k + 1][k] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] = cs[k] * g[k];
            res.rel_residual = std::abs(g[k + 1]) / bnorm;
            if (res.rel_residual <= rtol || hk1 == 0.0) {
                ++k;
                break;
            }
            for (auto& v : w) v /= hk1;
            V.push_back(std::move(w));
        }
        // back substitution
        std::vector<double> y(k, 0.0);
        for (int i = k - 1; i >= 0; --i) {
            double s = g[i];
            for (int j = i + 1; j < k; ++j) s -= H[i][j] * y[j];
            y[i] = s / H[i][i];
        }
        for (int i = 0; i < k; ++i)
            for (std::size_t t = 0; t < n; ++t) res.x[t] += y[i] * V[i][t];
        if (res.rel_residual <= rtol) break;
        // true residual for the restart
        Vec Ax = A(res.x);
        ++res.matvecs;
        for (std::size_t t = 0; t < n; ++t) r[t] = b[t] - Ax[t];
    }
    return res;
}

}  // namespace stokes::detail
