#include "stokes/oracle.hpp"

#include <algorithm>
#include <array>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "stokes/error.hpp"
#include "stokes/special.hpp"

namespace stokes {

namespace {

using Series = std::vector<cplx>;

Series mul(const Series& a, const Series& b) {
    Series c(a.size(), 0.0);
    for (std::size_t k = 0; k < a.size(); ++k)
        for (std::size_t i = 0; i <= k; ++i) c[k] += a[i] * b[k - i];
    return c;
}

Series divide(const Series& a, const Series& b) {
    Series c(a.size(), 0.0);
    for (std::size_t k = 0; k < a.size(); ++k) {
        cplx s = a[k];
        for (std::size_t i = 1; i <= k; ++i) s -= b[i] * c[k - i];
        c[k] = s / b[0];
    }
    return c;
}

Series deriv(const Series& a) {
    Series d(a.size(), 0.0);
    for (std::size_t k = 0; k + 1 < a.size(); ++k) d[k] = static_cast<double>(k + 1) * a[k + 1];
    return d;
}

Series sqrt_series(const Series& a) {
    Series s(a.size(), 0.0);
    s[0] = std::sqrt(a[0]);
    for (std::size_t k = 1; k < a.size(); ++k) {
        cplx v = a[k];
        for (std::size_t j = 1; j < k; ++j) v -= s[j] * s[k - j];
        s[k] = v / (2.0 * s[0]);
    }
    return s;
}

// Taylor coefficients of x^p about x0
Series power_series(double x0, double p, std::size_t n) {
    Series c(n);
    double coef = std::pow(x0, p);
    for (std::size_t k = 0; k < n; ++k) {
        c[k] = coef;
        coef *= (p - static_cast<double>(k)) / (static_cast<double>(k + 1) * x0);
    }
    return c;
}

cplx Q_at(double M, double a, cplx E, double x) { return std::pow(x, 2.0 * M) + a * std::pow(x, M - 1.0) - E; }

// constant terms u_n(x), n = 0..orders-1, of the Riccati series u = sum u_n
std::vector<cplx> riccati_terms(double M, double a, cplx E, double x, int orders) {
    const std::size_t n = static_cast<std::size_t>(orders) + 1;
    Series Q = power_series(x, 2.0 * M, n);
    Series xa = power_series(x, M - 1.0, n);
    for (std::size_t k = 0; k < n; ++k) Q[k] += a * xa[k];
    Q[0] -= E;
    std::vector<Series> u;
    u.push_back(sqrt_series(Q));
    for (auto& v : u[0]) v = -v;
    Series two_u0 = u[0];
    for (auto& v : two_u0) v *= 2.0;
    for (int m = 1; m < orders; ++m) {
        Series s = deriv(u[m - 1]);
        for (int k = 1; k < m; ++k) {
            Series p = mul(u[k], u[m - k]);
            for (std::size_t i = 0; i < n; ++i) s[i] += p[i];
        }
        Series um = divide(s, two_u0);
        for (auto& v : um) v = -v;
        u.push_back(std::move(um));
    }
    std::vector<cplx> out;
    for (auto& s : u) out.push_back(s[0]);
    return out;
}

using State = std::array<cplx, 2>;

struct Sample {
    double x;
    cplx psi, dpsi;
    double log_scale;
};

struct Shot {
    cplx psi0, dpsi0;  // psi(0), psi'(0) with psi(x_max) = 1
    double log_scale = 0.0;
    int nodes = 0;
    double x_max = 0.0;
};

double min_potential(double M, double a) {
    if (a >= 0.0) return 0.0;
    const double x = std::pow(-a * (M - 1.0) / (2.0 * M), 1.0 / (M + 1.0));
    return potential(x, M, a);
}

// stops exactly on each of `at` (descending, inside (0, x0]) and records the state there
Shot integrate(double M, double a, cplx E, double x0, cplx u0, double rtol, bool count_nodes,
               const std::vector<double>* at = nullptr, std::vector<Sample>* out = nullptr) {
    namespace ode = boost::numeric::odeint;
    auto sys = [&](const State& y, State& dy, double x) {
        dy[0] = y[1];
        dy[1] = Q_at(M, a, E, x) * y[0];
    };
    auto stepper = ode::make_controlled(1e-300, rtol, ode::runge_kutta_fehlberg78<State>());
    State y{cplx(1.0), u0};
    Shot s;
    s.x_max = x0;
    double x = x0;
    // keep steps under a quarter wavelength of the deepest well so no zero is skipped
    const double kmax = std::sqrt(std::abs(E) + std::abs(min_potential(M, a)) + 1.0);
    const double max_dt = 0.25 * std::numbers::pi / kmax;
    double dt = -std::min(0.01, max_dt);
    int fails = 0;
    std::size_t next = 0;
    auto record = [&] {
        while (at && next < at->size() && (*at)[next] >= x) {
            out->push_back({x, y[0], y[1], s.log_scale});
            ++next;
        }
    };
    record();
    while (x > 0.0) {
        dt = std::max(dt, -max_dt);
        const double stop = at && next < at->size() ? (*at)[next] : 0.0;
        if (x + dt < stop) dt = stop - x;
        const cplx prev = y[0];
        if (stepper.try_step(sys, y, x, dt) == ode::success) {
            fails = 0;
            if (count_nodes && ((prev.real() > 0.0) != (y[0].real() > 0.0)) && y[0].real() != 0.0) ++s.nodes;
            const double mag = std::abs(y[0]) + std::abs(y[1]);
            if (mag > 1e100) {
                y[0] /= mag;
                y[1] /= mag;
                s.log_scale += std::log(mag);
            }
            record();
        } else if (++fails > 200) {
            throw Error(ErrorKind::convergence, "ODE step size underflow");
        }
    }
    s.psi0 = y[0];
    s.dpsi0 = y[1];
    return s;
}

Shot shoot(double M, double a, cplx E, const IntegratorConfig& cfg, bool count_nodes) {
    const double x0 = cfg.x_max > 0.0 ? cfg.x_max : choose_x_max(M, a, E, cfg.eta);
    auto terms = riccati_terms(M, a, E, x0, cfg.wkb_orders);
    cplx u = 0.0;
    for (std::size_t n = 0; n < terms.size(); ++n) {
        if (n >= 2 && std::abs(terms[n]) > std::abs(terms[n - 1])) break;
        u += terms[n];
    }
    return integrate(M, a, E, x0, u, cfg.rtol, count_nodes);
}

void check_inputs(double M, cplx E, const IntegratorConfig& cfg) {
    if (!(M > 1.0)) fail_validation("oracle needs M > 1");
    if (!(std::abs(E) <= cfg.max_abs_E)) fail_validation("|E| beyond the validated oracle range");
}

}  // namespace

double choose_x_max(double M, double a, cplx E, double eta) {
    auto eta_at = [&](double x) {
        const cplx Q = Q_at(M, a, E, x);
        const double dQ = std::abs(2.0 * M * std::pow(x, 2.0 * M - 1.0) + a * (M - 1.0) * std::pow(x, M - 2.0));
        return dQ / std::pow(std::abs(Q), 1.5);
    };
    double x = std::max(1.0, 1.1 * std::pow(std::abs(E) + std::abs(a) + 1.0, 1.0 / (2.0 * M)));
    while (eta_at(x) > eta || std::real(Q_at(M, a, E, x)) <= 0.0) x *= 1.02;
    return x;
}

AsymptoticData asymptotic_data(double M, double a, cplx E, double x, int orders) {
    auto terms = riccati_terms(M, a, E, x, orders);
    std::size_t used = terms.size();
    for (std::size_t n = 2; n < terms.size(); ++n)
        if (std::abs(terms[n]) > std::abs(terms[n - 1])) {
            used = n;
            break;
        }
    AsymptoticData d;
    for (std::size_t n = 0; n < used; ++n) d.u += terms[n];
    d.last_term = std::abs(terms[used - 1]);

    // J = int_x^inf (u - L') dt with L = -t^{M+1}/(M+1) - ((M+a)/2) ln t,
    // leading pieces rewritten without cancellation; t = x s^{-beta}
    auto integrand = [&](double t) {
        const cplx Q = Q_at(M, a, E, t);
        const double tm = std::pow(t, M), tm1 = std::pow(t, M - 1.0);
        const cplx S = std::sqrt(Q) + tm;
        cplx g = E / S + a * (a * tm1 - E) / (2.0 * t * S * S);
        g += (a * (M + 1.0) * tm1 - 2.0 * M * E) / (4.0 * t * Q);
        if (used > 2) {
            auto tt = riccati_terms(M, a, E, t, static_cast<int>(used));
            for (std::size_t n = 2; n < used; ++n) g += tt[n];
        }
        return g;
    };
    const double beta = std::min(10.0, std::max(1.0, 1.0 / (std::min(M, 2.0) - 1.0)));
    const auto& gl = gauss_legendre(64);
    cplx J = 0.0;
    for (std::size_t k = 0; k < gl.x.size(); ++k) {
        const double s = 0.5 * (gl.x[k] + 1.0);
        const double t = x * std::pow(s, -beta);
        J += 0.5 * gl.w[k] * integrand(t) * beta * t / s;
    }
    d.log_phi = -std::pow(x, M + 1.0) / (M + 1.0) - 0.5 * (M + a) * std::log(x) - J;
    return d;
}

ConnectionPoint phi_at_origin(double M, double a, cplx E, const IntegratorConfig& cfg) {
    check_inputs(M, E, cfg);
    auto run = [&](const IntegratorConfig& c) {
        const double x0 = c.x_max > 0.0 ? c.x_max : choose_x_max(M, a, E, c.eta);
        const auto ad = asymptotic_data(M, a, E, x0, c.wkb_orders);
        const Shot s = integrate(M, a, E, x0, ad.u, c.rtol, false);
        const cplx norm = std::exp(ad.log_phi + s.log_scale);
        ConnectionPoint p;
        p.phi0 = s.psi0 * norm;
        p.dphi0 = s.dpsi0 * norm;
        p.E = E;
        p.x_max = x0;
        return p;
    };
    ConnectionPoint p = run(cfg);
    if (cfg.estimate_quality) {
        IntegratorConfig c2 = cfg;
        c2.rtol = cfg.rtol * 1e-2;
        c2.x_max = 1.2 * p.x_max;
        const ConnectionPoint q = run(c2);
        const double scale = std::hypot(std::abs(q.phi0), std::abs(q.dphi0));
        p.quality = std::hypot(std::abs(p.phi0 - q.phi0), std::abs(p.dphi0 - q.dphi0)) / scale;
    }
    return p;
}

std::vector<WavePoint> wavefunction(double M, double a, double E, std::vector<double> xs, const IntegratorConfig& cfg) {
    check_inputs(M, E, cfg);
    const double x0 = cfg.x_max > 0.0 ? cfg.x_max : choose_x_max(M, a, E, cfg.eta);
    std::sort(xs.begin(), xs.end(), std::greater<>());
    if (!xs.empty() && (xs.back() < 0.0 || xs.front() > x0)) fail_validation("sample points must lie in [0, x_max]");
    const auto ad = asymptotic_data(M, a, E, x0, cfg.wkb_orders);
    std::vector<Sample> raw;
    integrate(M, a, E, x0, ad.u, cfg.rtol, false, &xs, &raw);
    std::vector<WavePoint> pts;
    for (const auto& r : raw) {
        const double f = std::exp((ad.log_phi + r.log_scale).real());
        pts.push_back({r.x, (r.psi * f).real(), (r.dpsi * f).real()});
    }
    std::reverse(pts.begin(), pts.end());
    return pts;
}

int node_count(double M, double a, double E, const IntegratorConfig& cfg) {
    check_inputs(M, E, cfg);
    return shoot(M, a, E, cfg, true).nodes;
}

Level shoot_eigenvalue(const ModelSpec& spec, double lo, double hi, const IntegratorConfig& cfg) {
    spec.validate();
    const double M = spec.M, a = spec.signed_alpha();
    const bool odd = spec.parity < 0;
    auto f = [&](double E) {
        const Shot s = shoot(M, a, E, cfg, false);
        const double n = std::hypot(std::abs(s.psi0), std::abs(s.dpsi0));
        return (odd ? s.psi0 : s.dpsi0).real() / n;
    };
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) hi = lo;
    else if (fhi == 0.0) lo = hi;
    else if ((flo > 0.0) == (fhi > 0.0))
        throw Error(ErrorKind::convergence, "no sign change of the boundary value in the bracket");
    double E = lo;
    if (lo != hi) {
        std::uintmax_t iters = 100;
        auto tol = [](double x, double y) { return std::abs(x - y) <= 2e-14 * std::max(1.0, std::abs(x)); };
        auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
        E = 0.5 * (r.first + r.second);
    }
    Level lv;
    lv.parity = spec.parity;
    lv.eps = spec.eps;
    lv.E = E;
    lv.theta = std::numeric_limits<double>::quiet_NaN();
    lv.method = "oracle";
    lv.residual = std::abs(f(E));
    lv.err_est = 1e-10 * std::max(1.0, std::abs(E));
    return lv;
}

std::vector<double> parity_levels(double M, double a, int parity, int count, const IntegratorConfig& cfg) {
    if (count <= 0) return {};
    check_inputs(M, 0.0, cfg);
    // odd levels first: bracket each by the Sturm count of zeros of phi
    const int n_odd = parity < 0 ? count : count;
    std::vector<double> odd;
    const double vmin = min_potential(M, a);
    double lo = vmin;
    double hi = std::max(1.0, vmin + 1.0);
    for (int k = 0; k < n_odd; ++k) {
        while (node_count(M, a, hi, cfg) < k + 1) {
            if (hi >= cfg.max_abs_E) fail_validation("requested levels exceed the validated oracle range");
            lo = std::max(lo, hi);
            hi = std::min(1.5 * hi + 1.0, cfg.max_abs_E);
        }
        // tighten until exactly one odd level sits inside
        while (node_count(M, a, hi, cfg) > k + 1) {
            const double mid = 0.5 * (lo + hi);
            if (node_count(M, a, mid, cfg) <= k) lo = mid;
            else hi = mid;
        }
        while (node_count(M, a, lo, cfg) < k) lo = 0.5 * (lo + hi);
        const Level lv = shoot_eigenvalue(ModelSpec{M, std::abs(a), a < 0.0 ? -1 : 1, -1}, lo, hi, cfg);
        odd.push_back(lv.E);
        // step off the root: its boundary value is pure roundoff and would attract the next solve
        lo = lv.E + 1e-7 * std::max(1.0, lv.E);
        hi = lv.E + std::max(1.0, 0.5 * (lv.E - vmin));
    }
    if (parity < 0) return odd;
    std::vector<double> even;
    for (int k = 0; k < count; ++k) {
        const double blo = k == 0 ? vmin : odd[k - 1];
        const Level lv = shoot_eigenvalue(ModelSpec{M, std::abs(a), a < 0.0 ? -1 : 1, +1}, blo, odd[k], cfg);
        even.push_back(lv.E);
    }
    return even;
}

Level shoot_eigenvalue(const ModelSpec& spec, int j, const IntegratorConfig& cfg) {
    if (j < 0) fail_validation("level index must be >= 0");
    spec.validate();
    auto levels = parity_levels(spec.M, spec.signed_alpha(), spec.parity, j + 1, cfg);
    Level lv;
    lv.j = j;
    lv.parity = spec.parity;
    lv.eps = spec.eps;
    lv.E = levels[j];
    lv.theta = std::numeric_limits<double>::quiet_NaN();
    lv.method = "oracle";
    lv.err_est = 1e-10 * std::max(1.0, std::abs(lv.E));
    return lv;
}

Spectrum spectrum_oracle(double M, double a, int n_levels, const IntegratorConfig& cfg) {
    Spectrum sp;
    const int n_even = (n_levels + 1) / 2, n_odd = n_levels / 2;
    const int eps = a < 0.0 ? -1 : 1;
    auto ev = parity_levels(M, a, +1, n_even, cfg);
    auto od = parity_levels(M, a, -1, n_odd, cfg);
    for (int k = 0; k < n_even; ++k) sp.entries.push_back({k, +1, eps, ev[k], std::numeric_limits<double>::quiet_NaN(), "oracle", 0.0, 1e-10 * std::max(1.0, ev[k])});
    for (int k = 0; k < n_odd; ++k) sp.entries.push_back({k, -1, eps, od[k], std::numeric_limits<double>::quiet_NaN(), "oracle", 0.0, 1e-10 * std::max(1.0, od[k])});
    sp.sort();
    return sp;
}

}  // namespace stokes
