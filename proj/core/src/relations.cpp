#include "stokes/relations.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <sstream>

#include "stokes/error.hpp"

namespace stokes {

namespace {

using std::numbers::pi;

// sum_{k >= N} (A(2k + c + 1/2))^{-p}: direct terms, then the integral from the last midpoint
double tail_sum(double A, double c, double p, int N) {
    double s = 0.0;
    const int K = 4000;
    for (int k = N; k < N + K; ++k) s += std::pow(A * (2.0 * k + c + 0.5), -p);
    const double u = 2.0 * (N + K - 0.5) + c + 0.5;
    return s + std::pow(A, -p) * std::pow(u, 1.0 - p) / (2.0 * (p - 1.0));
}

std::string params(double M, double alpha, const std::string& extra = "") {
    std::ostringstream o;
    o.imbue(std::locale::classic());
    o << "{\"M\":" << M << ",\"alpha\":" << alpha << extra << "}";
    return o.str();
}

std::string cfmt(cplx z) {
    std::ostringstream o;
    o.imbue(std::locale::classic());
    o << ",\"E\":[" << z.real() << "," << z.imag() << "]";
    return o.str();
}

}  // namespace

SpectralDeterminant SpectralDeterminant::from_levels(double M, double signed_alpha, int parity, std::vector<double> levels,
                                                     bool tail) {
    if (levels.empty()) fail_validation("determinant needs at least one level");
    SpectralDeterminant D;
    D.M = M;
    D.signed_alpha = signed_alpha;
    D.parity = parity;
    D.levels = std::move(levels);
    D.tail = tail;
    const auto c = compute_constants(M);
    const int N = static_cast<int>(D.levels.size());
    D.tail_c = c.b0 * std::pow(D.levels.back(), c.mu) / (2.0 * pi) - 0.5 - 2.0 * (N - 1);
    if (tail) {
        const double A = 2.0 * pi / c.b0, p = 1.0 / c.mu;
        D.S1 = tail_sum(A, D.tail_c, p, N);
        D.S2 = tail_sum(A, D.tail_c, 2.0 * p, N);
    }
    return D;
}

SpectralDeterminant SpectralDeterminant::build(double M, double signed_alpha, int parity, int n_levels,
                                               const IntegratorConfig& cfg, bool tail) {
    return from_levels(M, signed_alpha, parity, parity_levels(M, signed_alpha, parity, n_levels, cfg), tail);
}

DeterminantValue determinant_value(const SpectralDeterminant& D, cplx E) {
    const double Emax = D.levels.back();
    if (std::abs(E) > Emax / 4.0) fail_validation("|E| beyond a quarter of the largest stored level");
    cplx v = 1.0;
    for (double Ej : D.levels) v *= 1.0 - E / Ej;
    DeterminantValue r;
    if (D.tail) {
        v *= std::exp(-E * D.S1 - 0.5 * E * E * D.S2);
        // third order term of the tail plus a 1% error in the tail model
        r.trunc_err = std::pow(std::abs(E), 3) * D.S2 / (3.0 * Emax) + 0.01 * std::abs(E) * D.S1;
    } else {
        r.trunc_err = std::abs(E) * tail_sum(2.0 * pi / compute_constants(D.M).b0, D.tail_c, 1.0 / compute_constants(D.M).mu,
                                             static_cast<int>(D.levels.size()));
    }
    r.value = v;
    return r;
}

Mat2 operator*(const Mat2& a, const Mat2& b) {
    Mat2 c{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
    return c;
}

Relations::Relations(double M, double alpha, int n_levels, IntegratorConfig cfg)
    : M_(M), alpha_(alpha), n_levels_(n_levels), cfg_(cfg) {
    ModelSpec{M, alpha, 1, 1}.validate_relations();
    if (alpha < 0.0) fail_validation("alpha must be >= 0; the sign enters through eps");
    if (n_levels < 4) fail_validation("determinants need at least 4 levels");
    m_ = ModelSpec{M, alpha, 1, 1}.m();
    q_ = std::polar(1.0, pi / (M + 1.0));
    f0_ = alpha * (m_ + 0.5) + m_;
    cfg_.estimate_quality = true;
}

cplx Relations::qpow(double s) const { return std::polar(1.0, pi * s / (M_ + 1.0)); }

ConnectionPoint Relations::connection(double signed_alpha, cplx E) {
    const auto key = std::make_tuple(signed_alpha, E.real(), E.imag());
    {
        std::lock_guard lk(mu_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
    }
    auto p = phi_at_origin(M_, signed_alpha, E, cfg_);
    if (p.quality > 1e-7) throw Error(ErrorKind::convergence, "connection data quality too poor");
    std::lock_guard lk(mu_);
    worst_quality_ = std::max(worst_quality_, p.quality);
    cache_.emplace(key, p);
    return p;
}

std::pair<cplx, cplx> Relations::y(int j, int s, cplx E) {
    const cplx N = qpow(j / 2.0 + s * (f0_ - j * alpha_ / 2.0)) / std::sqrt(cplx(0.0, 2.0));
    const auto p = connection(s * alpha_, qpow(2.0 * j) * E);
    return {N * p.phi0, N * qpow(-j) * p.dphi0};
}

cplx Relations::wronskian(int j, int s, int k, int t, cplx E) {
    const auto a = y(j, s, E), b = y(k, t, E);
    return a.first * b.second - a.second * b.first;
}

cplx Relations::tau(int j, int s, cplx E) { return wronskian(j, s, j + 2, s, E); }

cplx Relations::T11_wronskian(cplx E) { return tau(1, -1, E) * tau(0, 1, E) - 1.0; }

cplx Relations::T11_dvf_minus(cplx E) {
    const auto& Dp = determinant(+1, -1);
    const auto& Dm = determinant(-1, -1);
    auto d = [](const SpectralDeterminant& D, cplx z) { return determinant_value(D, z).value; };
    const cplx q2 = qpow(2), q4 = qpow(4), q6 = qpow(6);
    const double a = alpha_;
    return qpow(a - 1) * d(Dp, E) / d(Dp, q4 * E) +
           qpow(2 * a) * d(Dp, E) * d(Dm, q6 * E) / (d(Dp, q4 * E) * d(Dm, q2 * E)) +
           qpow(a + 1) * d(Dm, q6 * E) / d(Dm, q2 * E);
}

cplx Relations::T11_dvf_plus(cplx E) {
    const auto& Dp = determinant(+1, +1);
    const auto& Dm = determinant(-1, +1);
    auto d = [](const SpectralDeterminant& D, cplx z) { return determinant_value(D, z).value; };
    const cplx q2 = qpow(2), q4 = qpow(4), q6 = qpow(6);
    const double a = alpha_;
    return qpow(a + 1) * d(Dp, E) / d(Dp, q4 * E) +
           qpow(2 * a) * d(Dp, E) * d(Dm, q6 * E) / (d(Dp, q4 * E) * d(Dm, q2 * E)) +
           qpow(a - 1) * d(Dm, q6 * E) / d(Dm, q2 * E);
}

StokesMatrix Relations::single_step(int j, int s, cplx E) {
    StokesMatrix S;
    S.m = {{{tau(j, s, E), 1.0}, {-1.0, 0.0}}};
    S.k = 0;
    S.eps = s;
    S.E = E;
    return S;
}

StokesMatrix Relations::fusion_matrix(int k, int eps, cplx E) {
    if (k < 1) fail_validation("fusion level must be >= 1");
    StokesMatrix F;
    F.m = {{{1.0, 0.0}, {0.0, 1.0}}};
    for (int j = 0; j < 2 * k; ++j) F.m = single_step(j, (j % 2 ? -eps : eps), E).m * F.m;
    F.k = k;
    F.eps = eps;
    F.E = E;
    return F;
}

cplx Relations::fused_21_closed_form(int eps, cplx E) {
    const auto p = connection(eps * alpha_, E);
    return -qpow(eps * alpha_ * (m_ + 1)) * p.phi0 * p.dphi0;
}

const SpectralDeterminant& Relations::determinant(int eps, int parity) {
    std::lock_guard lk(mu_);
    auto& d = dets_[{eps, parity}];
    if (!d) d = std::make_unique<SpectralDeterminant>(SpectralDeterminant::build(M_, eps * alpha_, parity, n_levels_, cfg_));
    return *d;
}

SpectralDeterminant Relations::determinant_with(int eps, int parity, int n_levels) const {
    return SpectralDeterminant::build(M_, eps * alpha_, parity, n_levels, cfg_);
}

cplx Relations::bethe_residual(double M, double alpha, int eps, int parity, double E, const SpectralDeterminant& Dother) {
    const cplx q2 = std::polar(1.0, 2.0 * pi / (M + 1.0));
    const cplx pre = std::polar(1.0, pi * (eps * alpha - parity) / (M + 1.0));
    return 1.0 + pre * determinant_value(Dother, q2 * E).value / determinant_value(Dother, std::conj(q2) * E).value;
}

cplx Relations::bethe_residual(int eps, int parity, int j) {
    const double E = determinant(eps, parity).levels.at(j);
    return bethe_residual(M_, alpha_, eps, parity, E, determinant(-eps, parity));
}

DualityReport duality_check(double M, const IntegratorConfig& cfg) {
    ModelSpec{M, M, -1, 1}.validate();
    DualityReport r;
    auto plus = spectrum_oracle(M, M, 5, cfg);
    auto minus = spectrum_oracle(M, -M, 6, cfg);
    for (int j = 0; j < 5; ++j)
        r.max_level_diff = std::max(r.max_level_diff, std::abs(plus.entries[j].E - minus.entries[j + 1].E) / plus.entries[j].E);
    r.zero_mode_E = minus.entries[0].E;

    // exp(-x^{M+1}/(M+1)) under H^(-): psi'' = (x^{2M} - M x^{M-1}) psi
    for (double x = 0.0; x <= 3.0; x += 0.01) {
        const double psi = std::exp(-std::pow(x, M + 1.0) / (M + 1.0));
        const double d2 = (std::pow(x, 2.0 * M) - M * std::pow(x, M - 1.0)) * psi;
        r.zero_mode_residual = std::max(r.zero_mode_residual, std::abs(-d2 + potential(x, M, -M) * psi));
    }

    // chi = D psi^(-)_1 up to a constant: psi' + x^M psi; chi' follows from the ODE
    const double E1 = minus.entries[1].E;
    const double x0 = choose_x_max(M, -M, E1, cfg.eta);
    const int n = 4000;
    std::vector<double> xs(n + 1);
    for (int i = 0; i <= n; ++i) xs[i] = x0 * i / n;
    auto w = wavefunction(M, -M, E1, xs, cfg);
    double num = 0.0, den = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double x = w[i].x, xm = std::pow(x, M);
        const double chi = w[i].dpsi + xm * w[i].psi;
        const double dchi = (potential(x, M, -M) - E1) * w[i].psi + M * std::pow(x, M - 1.0) * w[i].psi + xm * w[i].dpsi;
        const double sw = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        num += sw * (dchi * dchi + potential(x, M, M) * chi * chi);
        den += sw * chi * chi;
    }
    r.rayleigh_rel_diff = std::abs(num / den - E1) / E1;
    return r;
}

std::vector<CheckRow> verify_relations(double M, double alpha, int n_levels, const IntegratorConfig& cfg,
                                       const std::vector<std::string>& groups) {
    Relations R(M, alpha, n_levels, cfg);
    auto on = [&](const char* g) { return groups.empty() || std::find(groups.begin(), groups.end(), g) != groups.end(); };
    std::vector<CheckRow> rows;
    auto add = [&](std::string name, std::string p, double v, double tol) {
        rows.push_back({std::move(name), std::move(p), v, tol, v <= tol});
    };
    const int m = ModelSpec{M, alpha, 1, 1}.m();

    if (on("wronskian")) {
        for (cplx E : {cplx(0.5), cplx(2.0), cplx(1.0, 1.0)})
            for (int s : {1, -1})
                for (int j : {0, 1, 2})
                    add("wronskian", params(M, alpha, cfmt(E) + ",\"j\":" + std::to_string(j) + ",\"s\":" + std::to_string(s)),
                        std::abs(R.wronskian(j, s, j + 1, -s, E) - 1.0), 1e-6);
    }

    // Stokes matrices from Wronskians; det = 1 needs the normalisation of consecutive pairs
    auto wmat = [&](int n, int s, cplx E) {
        const int t = n % 2 ? -s : s;
        Mat2 W{};
        W[0][0] = R.wronskian(0, s, n + 1, -t, E);
        W[0][1] = R.wronskian(1, -s, n + 1, -t, E);
        W[1][0] = -R.wronskian(0, s, n, t, E);
        W[1][1] = -R.wronskian(1, -s, n, t, E);
        return W;
    };
    if (on("stokes")) {
        for (cplx E : {cplx(0.5), cplx(2.0)})
            for (int s : {1, -1}) {
                for (int n : {1, 2 * m}) {
                    const Mat2 W = wmat(n, s, E);
                    const cplx det = W[0][0] * W[1][1] - W[0][1] * W[1][0];
                    add(n == 1 ? "det_single" : "det_fused", params(M, alpha, cfmt(E) + ",\"s\":" + std::to_string(s)),
                        std::abs(det - 1.0), 1e-6);
                }
                const Mat2 W = wmat(2 * m, s, E);
                const Mat2 F = R.fusion_matrix(m, s, E).m;
                double d = 0.0;
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j) d = std::max(d, std::abs(F[i][j] - W[i][j]) / std::max(1.0, std::abs(W[i][j])));
                add("fusion_vs_wronskian", params(M, alpha, cfmt(E) + ",\"s\":" + std::to_string(s)), d, 1e-5);
                const cplx c = R.fused_21_closed_form(s, E);
                add("fused_21", params(M, alpha, cfmt(E) + ",\"s\":" + std::to_string(s)), std::abs(F[1][0] - c) / std::abs(c), 1e-4);
            }
    }

    if (on("T11")) {
        for (int i = 0; i < 10; ++i) {
            const cplx E = 0.1 + 1.9 * i / 9.0;
            const cplx tw = R.T11_wronskian(E), tm = R.T11_dvf_minus(E), tp = R.T11_dvf_plus(E);
            const std::string p = params(M, alpha, cfmt(E));
            add("T11_wronskian_vs_dvf_minus", p, std::abs(tw - tm) / std::abs(tw), 1e-3);
            add("T11_wronskian_vs_dvf_plus", p, std::abs(tw - tp) / std::abs(tw), 1e-3);
            add("T11_dvf_minus_vs_plus", p, std::abs(tm - tp) / std::abs(tm), 1e-3);
        }
    }

    // D against the oracle ratio, and zero placement of the oracle boundary values
    if (on("determinant")) {
        for (int eps : {1, -1})
            for (int par : {-1, 1}) {
                const auto& D = R.determinant(eps, par);
                const auto p0 = phi_at_origin(M, eps * alpha, 0.0, cfg);
                auto ratio = [&](cplx E) {
                    const auto p = phi_at_origin(M, eps * alpha, E, cfg);
                    return par < 0 ? p.phi0 / p0.phi0 : p.dphi0 / p0.dphi0;
                };
                const std::string fam = ",\"eps\":" + std::to_string(eps) + ",\"parity\":" + std::to_string(par);
                for (cplx E : {cplx(-1.0), cplx(0.0, 1.0), cplx(1.0, 1.0)}) {
                    const cplx r = ratio(E);
                    add("determinant_vs_oracle", params(M, alpha, fam + cfmt(E)), std::abs(determinant_value(D, E).value - r) / std::abs(r), 1e-3);
                }
                for (int j = 0; j < 3; ++j) {
                    const double Ej = D.levels[j], h = 1e-4 * Ej;
                    const cplx slope = (ratio(Ej + h) - ratio(Ej - h)) / (2.0 * h);
                    add("determinant_zero", params(M, alpha, fam + ",\"j\":" + std::to_string(j)),
                        std::abs(ratio(Ej) / slope) / Ej, 1e-6);
                }
            }
    }

    if (!on("bethe")) return rows;
    // Bethe residuals, and their decrease when the truncation doubles
    IntegratorConfig wide = cfg;
    wide.max_abs_E = std::max(cfg.max_abs_E, 4e4);
    std::map<std::pair<int, int>, std::future<SpectralDeterminant>> doubled;
    for (int eps : {1, -1})
        for (int par : {1, -1})
            doubled[{eps, par}] = std::async(std::launch::async, [=] {
                return SpectralDeterminant::build(M, -eps * alpha, par, 2 * n_levels, wide);
            });
    for (int eps : {1, -1})
        for (int par : {1, -1}) {
            const auto twice = doubled[{eps, par}].get();
            for (int j = 0; j < 3; ++j) {
                const double E = R.determinant(eps, par).levels[j];
                const double r = std::abs(R.bethe_residual(eps, par, j));
                const double r2 = std::abs(Relations::bethe_residual(M, alpha, eps, par, E, twice));
                const std::string p = params(M, alpha, ",\"eps\":" + std::to_string(eps) + ",\"parity\":" + std::to_string(par) +
                                                           ",\"j\":" + std::to_string(j) + ",\"levels\":" + std::to_string(n_levels));
                add("bethe", p, r, 1e-2);
                // ratio of the doubled-truncation residual to this one; below 1 means it decreased
                add("bethe_doubling", p, r2 / r, 1.0);
            }
        }
    return rows;
}

}  // namespace stokes
