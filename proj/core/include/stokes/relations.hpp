#pragma once

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "stokes/model.hpp"
#include "stokes/oracle.hpp"

namespace stokes {

// D(E) = prod_j (1 - E/E_j) over one parity of H with signed alpha, D(0) = 1
struct SpectralDeterminant {
    double M = 3.0;
    double signed_alpha = 0.0;
    int parity = -1;
    std::vector<double> levels;
    bool tail = true;
    // levels beyond the stored ones follow b0 E_k^mu = 2 pi (2k + c + 1/2)
    double tail_c = 0.0;
    double S1 = 0.0;  // sum of 1/E_k over the modelled tail
    double S2 = 0.0;  // sum of 1/E_k^2

    static SpectralDeterminant from_levels(double M, double signed_alpha, int parity, std::vector<double> levels,
                                           bool tail = true);
    static SpectralDeterminant build(double M, double signed_alpha, int parity, int n_levels,
                                     const IntegratorConfig& cfg = {}, bool tail = true);
};

struct DeterminantValue {
    cplx value;
    double trunc_err = 0.0;  // relative
};

DeterminantValue determinant_value(const SpectralDeterminant& D, cplx E);

using Mat2 = std::array<std::array<cplx, 2>, 2>;

struct StokesMatrix {
    Mat2 m{};
    int k = 1;  // fused steps: M_{0,2k} has 2k single-step factors
    int eps = 1;
    cplx E;
    cplx det() const { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }
};

Mat2 operator*(const Mat2& a, const Mat2& b);

// y_j^(s)(x) = q^{j/2 + s(f0 - j alpha/2)}/sqrt(2i) phi(x q^{-j}, s alpha, q^{2j} E),
// f0 = alpha(m + 1/2) + m; it solves H with signed alpha s(-1)^j alpha
class Relations {
public:
    Relations(double M, double alpha, int n_levels = 60, IntegratorConfig cfg = {});

    double M() const { return M_; }
    double alpha() const { return alpha_; }
    cplx q() const { return q_; }
    cplx qpow(double s) const;

    // (y, y') at x = 0
    std::pair<cplx, cplx> y(int j, int s, cplx E);
    // W[y_j^(s), y_k^(t)] at x = 0
    cplx wronskian(int j, int s, int k, int t, cplx E);
    // W[y_j^(s), y_{j+2}^(s)]
    cplx tau(int j, int s, cplx E);

    cplx T11_wronskian(cplx E);
    cplx T11_dvf_minus(cplx E);
    cplx T11_dvf_plus(cplx E);

    StokesMatrix single_step(int j, int s, cplx E);
    // M_{2k-1,1} ... M_{0,1}, signs alternating from eps
    StokesMatrix fusion_matrix(int k, int eps, cplx E);
    // -q^{s alpha (m+1)} phi(0) phi'(0), the closed form of the (2,1) entry of M_{0,2m}
    cplx fused_21_closed_form(int eps, cplx E);

    // D^(eps)_parity, built from n_levels oracle levels on first use
    const SpectralDeterminant& determinant(int eps, int parity);
    // the same with another truncation, not cached
    SpectralDeterminant determinant_with(int eps, int parity, int n_levels) const;

    // 1 + q^{eps alpha - parity} D^(-eps)_parity(q^2 E)/D^(-eps)_parity(q^-2 E) at E = E^(eps)_{parity,j}
    cplx bethe_residual(int eps, int parity, int j);
    static cplx bethe_residual(double M, double alpha, int eps, int parity, double E, const SpectralDeterminant& Dother);

    // largest connection-data quality seen so far
    double worst_quality() const { return worst_quality_; }

private:
    ConnectionPoint connection(double signed_alpha, cplx E);

    double M_, alpha_;
    int m_;
    int n_levels_;
    IntegratorConfig cfg_;
    cplx q_;
    double f0_;
    std::map<std::tuple<double, double, double>, ConnectionPoint> cache_;
    std::map<std::pair<int, int>, std::unique_ptr<SpectralDeterminant>> dets_;
    double worst_quality_ = 0.0;
    std::mutex mu_;
};

struct DualityReport {
    double max_level_diff = 0.0;   // max_j |E^(+)_j - E^(-)_{j+1}| / E^(+)_j, j = 0..4
    double zero_mode_E = 0.0;      // lowest level of the eps = -1 Hamiltonian
    double zero_mode_residual = 0.0;
    double rayleigh_rel_diff = 0.0;  // D psi^(-)_1 under H^(+) against E^(-)_1
};

DualityReport duality_check(double M, const IntegratorConfig& cfg = {});

struct CheckRow {
    std::string check;
    std::string param_json;
    double value = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

// check groups: wronskian, stokes (determinants and fusion), T11, determinant, bethe; empty means all
std::vector<CheckRow> verify_relations(double M, double alpha, int n_levels = 60, const IntegratorConfig& cfg = {},
                                       const std::vector<std::string>& groups = {});

}  // namespace stokes
