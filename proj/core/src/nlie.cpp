#include "stokes/nlie.hpp"

#include <algorithm>
#include <array>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "gmres.hpp"
#include "stokes/error.hpp"

namespace stokes {

using std::numbers::pi;

namespace {

const cplx I(0.0, 1.0);

int fam(int eps) { return eps > 0 ? 0 : 1; }

// e^z - 1 without cancellation near z = 0
cplx cexpm1(cplx z) {
    const double x = z.real(), y = z.imag();
    const double s = std::sin(0.5 * y);
    return {std::expm1(x) * std::cos(y) - 2.0 * s * s, std::exp(x) * std::sin(y)};
}

// ln(1 + e^{la}) unwrapped from the right end, where it vanishes
void log_one_plus_exp(const std::vector<cplx>& la, std::vector<cplx>& out) {
    const std::size_t N = la.size();
    out.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
        const cplx z = la[i];
        if (z.real() > 30.0) {
            out[i] = z + std::log(1.0 + std::exp(-z));
            continue;
        }
        // 1 + e^z = -(e^{z - i pi} - 1), phase of z - i pi reduced to (-pi, pi]
        double y = std::remainder(z.imag() - pi, 2.0 * pi);
        out[i] = std::log(-cexpm1(cplx(z.real(), y)));
    }
    for (std::size_t k = N - 1; k-- > 0;) {
        double d = out[k].imag() - out[k + 1].imag();
        out[k] -= I * (2.0 * pi * std::round(d / (2.0 * pi)));
    }
}

bool is_singular(double M, double alpha, int eps, int parity) {
    return std::abs(alpha - M) < 1e-12 && eps == -parity;
}

class Map {
public:
    Map(double M, double alpha, int parity, const SolverConfig& cfg, const KernelTable& kt)
        : M_(M), cfg_(cfg), kt_(kt), c_(compute_constants(M)) {
        const Grid& g = cfg.grid;
        const int N = g.N;
        for (int e : {+1, -1}) {
            ModelSpec s{M, alpha, e, parity};
            auto& d = drive_[fam(e)];
            d.resize(N);
            for (int i = 0; i < N; ++i) d[i] = drive_term(cplx(g.at(i), -cfg.delta), s, c_);
            singular_[fam(e)] = is_singular(M, alpha, e, parity);
        }
        for (int r = 0; r <= kTerms; ++r)
            fit_[r] = static_cast<int>(std::ceil((cfg.theta_c + 0.5 * r - g.theta_min) / g.h()));
    }

    int N() const { return cfg_.grid.N; }
    bool singular(int f) const { return singular_[f]; }
    const std::vector<cplx>& drive(int f) const { return drive_[f]; }

    // ln a, ln A and the left tail of one family from its integral part
    void lnA(int f, const std::vector<cplx>& X, std::vector<cplx>& la, std::vector<cplx>& L, LeftTail& tail) const {
        const int n = N();
        la.resize(n);
        for (int i = 0; i < n; ++i) la[i] = drive_[f][i] + X[i];
        log_one_plus_exp(la, L);
        if (!singular_[f]) {
            tail = {L[0], 0.0};
            return;
        }
        // A ~ E: L = c0 + z/mu + sum_k c_k e^{k z/mu}, z = theta - i delta,
        // interpolated at kTerms+1 points from theta_c rightwards
        const Grid& g = cfg_.grid;
        const double mu = c_.mu;
        auto z = [&](int i) { return cplx(g.at(i), -cfg_.delta); };
        const cplx escale = std::exp(z(fit_[kTerms]) / mu);
        std::array<std::array<cplx, kTerms + 2>, kTerms + 1> m{};
        for (int r = 0; r <= kTerms; ++r) {
            const int i = fit_[r];
            const cplx t = std::exp(z(i) / mu) / escale;
            cplx p = 1.0;
            for (int k = 0; k <= kTerms; ++k, p *= t) m[r][k] = p;
            m[r][kTerms + 1] = L[i] - z(i) / mu;
        }
        const auto coef = solve_small(m);
        for (int i = 0; i < fit_[0]; ++i) {
            const cplx t = std::exp(z(i) / mu) / escale;
            cplx v = 0.0, p = 1.0;
            for (int k = 0; k <= kTerms; ++k, p *= t) v += coef[k] * p;
            L[i] = v + z(i) / mu;
        }
        tail = {coef[0] - I * cfg_.delta / mu, 1.0 / mu};
    }

    // integral part of the right-hand side for both families
    void apply(const std::vector<cplx> X[2], std::vector<cplx> out[2], AuxiliaryState* keep = nullptr) const {
        std::vector<cplx> la[2], L[2];
        LeftTail tail[2];
        for (int f = 0; f < 2; ++f) lnA(f, X[f], la[f], L[f], tail[f]);
        std::vector<cplx> Lc[2];
        for (int f = 0; f < 2; ++f) {
            Lc[f].resize(N());
            for (int i = 0; i < N(); ++i) Lc[f][i] = std::conj(L[f][i]);
        }
        for (int f = 0; f < 2; ++f) {
            out[f].assign(N(), 0.0);
            for (int kind = 1; kind <= 2; ++kind) {
                const int src = kind == 1 ? f : 1 - f;
                auto a = kt_.convolve(kind, false, L[src], tail[src].c0, tail[src].c1);
                auto b = kt_.convolve(kind, true, Lc[src], std::conj(tail[src].c0), std::conj(tail[src].c1));
                for (int i = 0; i < N(); ++i) out[f][i] += a[i] - b[i];
            }
        }
        if (keep) {
            for (int f = 0; f < 2; ++f) {
                keep->ln_a[f] = std::move(la[f]);
                keep->ln_A[f] = std::move(L[f]);
                keep->tail[f] = tail[f];
                keep->singular[f] = singular_[f];
            }
        }
    }

private:
    double M_;
    SolverConfig cfg_;
    const KernelTable& kt_;
    SpectralConstants c_;
    std::vector<cplx> drive_[2];
    bool singular_[2];
    static constexpr int kTerms = 3;
    std::array<int, kTerms + 1> fit_;

    // Gaussian elimination with partial pivoting on an augmented square system
    template <std::size_t R, std::size_t C>
    static std::array<cplx, R> solve_small(std::array<std::array<cplx, C>, R> m) {
        for (std::size_t col = 0; col < R; ++col) {
            std::size_t piv = col;
            for (std::size_t r = col + 1; r < R; ++r)
                if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
            std::swap(m[col], m[piv]);
            for (std::size_t r = col + 1; r < R; ++r) {
                const cplx f = m[r][col] / m[col][col];
                for (std::size_t k = col; k < C; ++k) m[r][k] -= f * m[col][k];
            }
        }
        std::array<cplx, R> x{};
        for (std::size_t r = R; r-- > 0;) {
            cplx v = m[r][C - 1];
            for (std::size_t k = r + 1; k < R; ++k) v -= m[r][k] * x[k];
            x[r] = v / m[r][r];
        }
        return x;
    }
};

double sup_diff(const std::vector<cplx> a[2], const std::vector<cplx> b[2]) {
    double r = 0.0;
    for (int f = 0; f < 2; ++f)
        for (std::size_t i = 0; i < a[f].size(); ++i) r = std::max(r, std::abs(a[f][i] - b[f][i]));
    return r;
}

bool all_finite(const std::vector<cplx> a[2]) {
    for (int f = 0; f < 2; ++f)
        for (auto v : a[f])
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

detail::Vec pack(const std::vector<cplx> X[2]) {
    const std::size_t n = X[0].size();
    detail::Vec v(4 * n);
    for (int f = 0; f < 2; ++f)
        for (std::size_t i = 0; i < n; ++i) {
            v[2 * f * n + i] = X[f][i].real();
            v[(2 * f + 1) * n + i] = X[f][i].imag();
        }
    return v;
}

void unpack(const detail::Vec& v, std::vector<cplx> X[2]) {
    const std::size_t n = v.size() / 4;
    for (int f = 0; f < 2; ++f) {
        X[f].resize(n);
        for (std::size_t i = 0; i < n; ++i) X[f][i] = {v[2 * f * n + i], v[(2 * f + 1) * n + i]};
    }
}

}  // namespace

void SolverConfig::validate(double M) const {
    const Grid& g = grid;
    if (!(delta > 0.0 && delta < std::min(0.5, pi / (2.0 * M))))
        fail_validation("delta must lie in (0, min(0.5, pi/(2M)))");
    if (g.theta_min > -16.0) fail_validation("theta_min must be <= -16");
    if (g.theta_max < 8.0) fail_validation("theta_max must be >= 8");
    if (g.N < 2048 || (g.N & (g.N - 1)) != 0) fail_validation("grid points must be a power of two >= 2048");
    if (!(damping > 0.0 && damping <= 1.0)) fail_validation("damping must lie in (0, 1]");
    if (!(tol > 0.0)) fail_validation("tol must be positive");
    if (max_iter < 1) fail_validation("max_iter must be >= 1");
    if (theta_c < g.theta_min + 2.0 || theta_c > -4.0) fail_validation("theta_c must lie in [theta_min+2, -4]");
}

AuxiliaryState drive_only(double M, double alpha, int parity, const SolverConfig& cfg) {
    ModelSpec{M, alpha, +1, parity}.validate_nlie();
    AuxiliaryState st;
    st.M = M;
    st.alpha = alpha;
    st.parity = parity;
    st.cfg = cfg;
    const auto c = compute_constants(M);
    for (int e : {+1, -1}) {
        ModelSpec s{M, alpha, e, parity};
        auto& la = st.ln_a[fam(e)];
        la.resize(cfg.grid.N);
        for (int i = 0; i < cfg.grid.N; ++i) la[i] = drive_term(cplx(cfg.grid.at(i), -cfg.delta), s, c);
        log_one_plus_exp(la, st.ln_A[fam(e)]);
        st.tail[fam(e)] = {st.ln_A[fam(e)][0], 0.0};
    }
    return st;
}

AuxiliaryState solve(double M, double alpha, int parity, const SolverConfig& cfg, const KernelTable& kt) {
    ModelSpec{M, alpha, +1, parity}.validate_nlie();
    cfg.validate(M);
    if (kt.M() != M || kt.grid().N != cfg.grid.N || kt.grid().theta_min != cfg.grid.theta_min ||
        kt.grid().theta_max != cfg.grid.theta_max || kt.delta() != cfg.delta)
        fail_validation("kernel table was built for a different M, grid or delta");

    Map map(M, alpha, parity, cfg, kt);
    const int N = map.N();
    const bool any_singular = map.singular(0) || map.singular(1);

    AuxiliaryState st;
    st.M = M;
    st.alpha = alpha;
    st.parity = parity;
    st.cfg = cfg;

    std::vector<cplx> X[2] = {std::vector<cplx>(N, 0.0), std::vector<cplx>(N, 0.0)};
    std::vector<cplx> F[2], best[2] = {X[0], X[1]};
    double r = std::numeric_limits<double>::infinity(), best_r = r;
    bool converged = false;

    // damped Picard
    int it = 0;
    for (; it < cfg.max_iter; ++it) {
        map.apply(X, F);
        if (!all_finite(F)) break;
        r = sup_diff(F, X);
        st.residual_history.push_back(r);
        if (r < best_r) {
            best_r = r;
            best[0] = X[0];
            best[1] = X[1];
        }
        if (r < cfg.tol) {
            converged = true;
            break;
        }
        const auto& h = st.residual_history;
        const bool stalled = it >= 40 && r > 0.9 * h[h.size() - 11];
        const bool blown = r > 1e3 * best_r || (any_singular && it >= 20);
        if (stalled || blown) break;
        for (int f = 0; f < 2; ++f)
            for (int i = 0; i < N; ++i) X[f][i] += cfg.damping * (F[f][i] - X[f][i]);
    }
    st.iterations = it;

    // Newton-GMRES on X = Phi(X) from the best Picard iterate
    if (!converged) {
        X[0] = best[0];
        X[1] = best[1];
        map.apply(X, F);
        r = sup_diff(F, X);
        // max_iter is the budget for Picard and Newton steps together
        const int newton_budget = std::min(40, cfg.max_iter - it);
        for (int step = 0; step < newton_budget && r >= cfg.tol; ++step) {
            ++st.newton_steps;
            const detail::Vec x = pack(X), fx = pack(F);
            detail::Vec rhs(x.size());
            for (std::size_t t = 0; t < x.size(); ++t) rhs[t] = fx[t] - x[t];
            double xnorm = 0.0;
            for (double v : x) xnorm = std::max(xnorm, std::abs(v));

            auto jvp = [&](const detail::Vec& v) {
                double vn = 0.0;
                for (double a : v) vn = std::max(vn, std::abs(a));
                detail::Vec out(v.size(), 0.0);
                if (vn == 0.0) return out;
                const double eta = 1e-7 * std::max(1.0, xnorm) / vn;
                detail::Vec xp(x.size());
                for (std::size_t t = 0; t < x.size(); ++t) xp[t] = x[t] + eta * v[t];
                std::vector<cplx> Xp[2], Fp[2];
                unpack(xp, Xp);
                map.apply(Xp, Fp);
                const detail::Vec fp = pack(Fp);
                for (std::size_t t = 0; t < v.size(); ++t) out[t] = v[t] - (fp[t] - fx[t]) / eta;
                return out;
            };
            auto g = detail::gmres(jvp, rhs, 1e-6, 150, 900);

            // backtracking on the sup-norm residual
            double lam = 1.0;
            std::vector<cplx> Xn[2], Fn[2];
            double rn = std::numeric_limits<double>::infinity();
            for (int bt = 0; bt < 6; ++bt, lam *= 0.5) {
                detail::Vec xn(x.size());
                for (std::size_t t = 0; t < x.size(); ++t) xn[t] = x[t] + lam * g.x[t];
                unpack(xn, Xn);
                map.apply(Xn, Fn);
                rn = all_finite(Fn) ? sup_diff(Fn, Xn) : std::numeric_limits<double>::infinity();
                if (rn < r) break;
            }
            if (!(rn < r)) break;
            for (int f = 0; f < 2; ++f) {
                X[f] = std::move(Xn[f]);
                F[f] = std::move(Fn[f]);
            }
            r = rn;
            st.residual_history.push_back(r);
        }
        converged = r < cfg.tol;
    }

    st.residual = r;
    if (!converged) {
        std::ostringstream os;
        os << "NLIE did not converge (alpha=" << alpha << ", parity=" << parity << "): residual " << r << " after "
           << st.iterations << " Picard and " << st.newton_steps << " Newton steps";
        throw Error(ErrorKind::convergence, os.str());
    }
    // store the fixed point itself: ln a = drive + Phi(X)
    map.apply(F, X, &st);
    for (int f = 0; f < 2; ++f)
        if (st.singular[f] == false && std::abs(std::exp(st.ln_A[f][0])) < 1e-6)
            throw Error(ErrorKind::convergence, "plateau of A collapsed near theta_min: alpha too close to M");
    return st;
}

namespace {

// 2 Im sum_k int K_k(theta - theta' + i delta) L_k(theta') dtheta'
double quantization_integral(const AuxiliaryState& st, const KernelTable& kt, int eps, double theta) {
    const Grid& g = st.cfg.grid;
    const int N = g.N;
    const double h = g.h();
    const cplx s(0.0, st.cfg.delta);
    cplx acc = 0.0;
    for (int kind = 1; kind <= 2; ++kind) {
        const int src = kind == 1 ? fam(eps) : 1 - fam(eps);
        const auto& L = st.ln_A[src];
        const auto& q = kt.quadrature(kind);
        cplx part = 0.0;
        for (int i = 0; i < N; ++i) part += (i == 0 ? 0.5 : 1.0) * q.value(theta - g.at(i) + s) * L[i];
        part *= h;
        const double a = theta - g.theta_min;
        const auto [T0, T1] = kt.tail_quadrature(kind).tail_moments(a, kt.tail_upper(), s);
        const LeftTail& t = st.tail[src];
        part += t.c0 * T0 + t.c1 * (theta * T0 - T1);
        part += h * h / 12.0 * (q.value(a + s) * t.c1 - q.derivative(a + s) * L[0]);
        acc += part;
    }
    return 2.0 * acc.imag();
}

}  // namespace

Level extract_level(const AuxiliaryState& st, const KernelTable& kt, int j, int eps) {
    if (j < 0) fail_validation("level index must be >= 0");
    const ModelSpec spec{st.M, st.alpha, eps, st.parity};
    const auto c = compute_constants(st.M);
    const double target = level_target(j, spec);
    Level lv;
    lv.j = j;
    lv.parity = st.parity;
    lv.eps = eps;
    lv.method = "nlie";
    if (std::abs(target) < 1e-12) {
        // zero mode: the left side vanishes only as theta -> -inf
        lv.E = 0.0;
        lv.theta = -std::numeric_limits<double>::infinity();
        return lv;
    }
    if (target < 0.0) fail_validation("negative quantization target: alpha outside [0, M]");

    const double B = c.drive_scale;
    auto F = [&](double th) { return 0.5 * B * std::exp(th) - target - quantization_integral(st, kt, eps, th); };
    const Grid& g = st.cfg.grid;
    const double lo_lim = g.theta_min + 2.0, hi_lim = g.theta_max - 2.0;
    double t0 = std::log(2.0 * target / B);
    double lo = std::clamp(t0 - 0.5, lo_lim, hi_lim), hi = std::clamp(t0 + 0.5, lo_lim, hi_lim);
    double flo = F(lo), fhi = F(hi);
    while (flo > 0.0 && lo > lo_lim) {
        lo = std::max(lo - 1.0, lo_lim);
        flo = F(lo);
    }
    while (fhi < 0.0 && hi < hi_lim) {
        hi = std::min(hi + 1.0, hi_lim);
        fhi = F(hi);
    }
    if (flo > 0.0 || fhi < 0.0)
        fail_validation("level " + std::to_string(j) + " lies outside the grid interior; widen theta range");

    std::uintmax_t iters = 60;
    auto tol = [](double a, double b) { return std::abs(a - b) < 1e-14 * std::max(1.0, std::abs(a)); };
    auto [a, b] = boost::math::tools::toms748_solve(F, lo, hi, flo, fhi, tol, iters);
    const double th = 0.5 * (a + b);
    lv.theta = th;
    lv.E = E_from_theta(th, c);
    lv.residual = std::abs(F(th));
    // dE/E = dtheta/mu; the fixed-point residual feeds straight into the integral term
    lv.err_est = lv.E * (lv.residual + 2.0 * st.residual) / (0.5 * B * std::exp(th)) / c.mu;
    return lv;
}

Spectrum spectrum(const AuxiliaryState& st, const KernelTable& kt, int j_max) {
    Spectrum sp;
    for (int eps : {+1, -1}) {
        double prev = -1.0;
        for (int j = 0; j <= j_max; ++j) {
            Level lv = extract_level(st, kt, j, eps);
            if (lv.E <= prev) throw Error(ErrorKind::convergence, "extracted levels are not increasing");
            prev = lv.E;
            sp.entries.push_back(lv);
        }
    }
    sp.sort();
    return sp;
}

std::vector<CurveRow> export_lnA(const AuxiliaryState& st) {
    std::vector<CurveRow> rows;
    const Grid& g = st.cfg.grid;
    for (int i = 0; i < g.N; ++i) {
        const cplx p = st.ln_A[0][i], m = st.ln_A[1][i];
        rows.push_back({g.at(i), p.real(), p.imag(), m.real(), m.imag()});
    }
    return rows;
}

}  // namespace stokes
