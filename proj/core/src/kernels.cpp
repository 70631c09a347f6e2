#include "stokes/kernels.hpp"

#include <fftw3.h>

#include <cmath>
#include <iomanip>
#include <mutex>
#include <numbers>
#include <ostream>

#include "stokes/error.hpp"

namespace stokes {

using std::numbers::pi;

namespace {

std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

// decay rate of f_kind(w) for large w
double decay_rate(int kind, double M) { return kind == 1 ? 2.0 * pi / M : pi / M; }

// e^{i n phase} and its inverse for n = 0..count-1, re-anchored every 32 steps
template <class F>
void for_each_power(cplx phase, std::size_t count, F&& body) {
    const cplx i(0.0, 1.0);
    cplx p = 1.0, pi_ = 1.0;
    const cplx e = std::exp(i * phase), ei = 1.0 / e;
    for (std::size_t n = 0; n < count; ++n) {
        if (n % 32 == 0 && n > 0) {
            p = std::exp(i * phase * static_cast<double>(n));
            pi_ = 1.0 / p;
        }
        body(n, p, pi_);
        p *= e;
        pi_ *= ei;
    }
}

}  // namespace

cplx G_of_theta(cplx theta, double M) {
    const cplx i(0.0, 1.0);
    const cplx q = std::polar(1.0, pi / (M + 1.0));
    const cplx arg = M * theta / (M + 1.0);
    const cplx num = std::sinh(arg + i * pi / (M + 1.0));
    const cplx den = std::sinh(arg - i * pi / (M + 1.0));
    if (std::abs(den) < 1e-300) fail_validation("G_of_theta: argument sits on a pole");
    return std::log(q * q * num / den);
}

double kernel_integrand(double w, int kind, double M) {
    if (kind != 1 && kind != 2) fail_validation("kernel kind must be 1 or 2");
    w = std::abs(w);
    const double a = pi * (M - 1.0) * w / (2.0 * M);
    const double b = pi * (M + 1.0) * w / (2.0 * M);
    const double c = pi * w;
    const double d = pi * w / M;
    if (w < 1e-4) {
        // sinh x = x (1 + x^2/6)
        if (kind == 1) return (M - 1.0) * (M - 1.0) / (4.0 * M) * (1.0 + a * a / 3.0 - (c * c + d * d) / 6.0);
        return (M * M - 1.0) / (4.0 * M) * (1.0 + (a * a + b * b - c * c - d * d) / 6.0);
    }
    // sinh x = e^x (1 - e^{-2x}) / 2, keeps large w finite
    auto r = [](double x) { return -std::expm1(-2.0 * x); };
    if (kind == 1) return std::exp(2.0 * a - c - d) * r(a) * r(a) / (r(c) * r(d));
    return std::exp(a + b - c - d) * r(a) * r(b) / (r(c) * r(d));
}

KernelQuadrature::KernelQuadrature(double M, int kind, double period, double max_imag) {
    const double rate = decay_rate(kind, M) - max_imag;
    if (rate <= 0.05) fail_validation("kernel evaluated too far off the real axis for its analyticity strip");
    const double wc = std::log(1e17) / rate + 2.0;
    dw_ = 2.0 * pi / period;
    const auto n = static_cast<std::size_t>(std::ceil(wc / dw_)) + 1;
    coef_.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        double wt = (k == 0 ? 0.5 : 1.0) * dw_;
        coef_[k] = -wt * kernel_integrand(k * dw_, kind, M) / pi;
    }
}

cplx KernelQuadrature::value(cplx z) const {
    cplx acc = 0.0;
    for_each_power(dw_ * z, coef_.size(), [&](std::size_t n, cplx p, cplx pinv) { acc += coef_[n] * (p + pinv); });
    return 0.5 * acc;
}

cplx KernelQuadrature::derivative(cplx z) const {
    const cplx i(0.0, 1.0);
    cplx acc = 0.0;
    for_each_power(dw_ * z, coef_.size(),
                   [&](std::size_t n, cplx p, cplx pinv) { acc += coef_[n] * (n * dw_) * (p - pinv); });
    return -acc / (2.0 * i);
}

std::pair<cplx, cplx> KernelQuadrature::tail_moments(double a, double U, cplx s) const {
    cplx t0 = coef_[0] * (U - a);
    cplx t1 = coef_[0] * 0.5 * (U * U - a * a);
    const cplx i(0.0, 1.0);
    std::vector<cplx> sU(coef_.size()), cU(coef_.size());
    for_each_power(dw_ * (U + s), coef_.size(), [&](std::size_t n, cplx p, cplx pinv) {
        sU[n] = (p - pinv) / (2.0 * i);
        cU[n] = 0.5 * (p + pinv);
    });
    for_each_power(dw_ * (a + s), coef_.size(), [&](std::size_t n, cplx p, cplx pinv) {
        if (n == 0) return;
        const double w = n * dw_;
        const cplx sa = (p - pinv) / (2.0 * i), ca = 0.5 * (p + pinv);
        t0 += coef_[n] * (sU[n] - sa) / w;
        t1 += coef_[n] * ((U * sU[n] - a * sa) / w + (cU[n] - ca) / (w * w));
    });
    return {t0, t1};
}

double kernel_value(double theta, int kind, double M) {
    const double period = 2.0 * std::abs(theta) + 90.0;
    return KernelQuadrature(M, kind, period).value(theta);
}

struct KernelTable::Fft {
    int L;
    fftw_plan fwd, bwd;
    explicit Fft(int n) : L(n) {
        std::vector<cplx> buf(n);
        auto* p = reinterpret_cast<fftw_complex*>(buf.data());
        std::lock_guard lock(fftw_planner_mutex());
        fwd = fftw_plan_dft_1d(n, p, p, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
        bwd = fftw_plan_dft_1d(n, p, p, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    }
    ~Fft() {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
    }
    void forward(std::vector<cplx>& v) const {
        auto* p = reinterpret_cast<fftw_complex*>(v.data());
        fftw_execute_dft(fwd, p, p);
    }
    void backward(std::vector<cplx>& v) const {
        auto* p = reinterpret_cast<fftw_complex*>(v.data());
        fftw_execute_dft(bwd, p, p);
    }
};

KernelTable::KernelTable(double M, const Grid& grid, double delta) : M_(M), grid_(grid), delta_(delta) {
    if (!(M > 1.0)) fail_validation("kernel table needs M > 1");
    if (grid.N < 16) fail_validation("kernel grid needs at least 16 points");
    if (!(grid.theta_max > grid.theta_min)) fail_validation("kernel grid needs theta_max > theta_min");
    if (grid.h() > 0.05) fail_validation("kernel grid spacing must be <= 0.05");
    if (!(delta >= 0.0)) fail_validation("delta must be >= 0");

    const int N = grid.N;
    const double h = grid.h();
    const double span = grid.span();
    tail_upper_ = span + 40.0;
    for (int kind = 1; kind <= 2; ++kind) {
        quad_[kind - 1] = std::make_unique<KernelQuadrature>(M, kind, span + 45.0, 2.0 * delta);
        tail_quad_[kind - 1] = std::make_unique<KernelQuadrature>(M, kind, tail_upper_ + 45.0, 2.0 * delta);
    }

    for (int kind = 1; kind <= 2; ++kind) {
        auto& k = kind == 1 ? k1_ : k2_;
        k.resize(2 * N - 1);
        for (int n = 0; n < N; ++n) {
            double v = quad_[kind - 1]->value(n * h);
            k[N - 1 + n] = v;
            k[N - 1 - n] = v;
        }
        double tr = 0.0;
        for (int n = 0; n < 2 * N - 1; ++n) tr += k[n];
        tr -= 0.5 * (k.front() + k.back());
        auto tail = tail_quad_[kind - 1]->tail_moments((N - 1) * h, tail_upper_, 0.0).first.real();
        (kind == 1 ? total1_ : total2_) = h * tr + 2.0 * tail;
    }

    const int L = 2 * N;
    fft_ = std::make_unique<Fft>(L);
    const cplx shifts[2] = {0.0, cplx(0.0, -2.0 * delta)};
    for (int kind = 1; kind <= 2; ++kind) {
        for (int sh = 0; sh < 2; ++sh) {
            const auto& qd = *quad_[kind - 1];
            auto& spec = spectrum_[kind - 1][sh];
            spec.assign(L, 0.0);
            for (int n = 0; n < N; ++n) spec[n] = qd.value(n * h + shifts[sh]);
            for (int n = 1; n < N; ++n) spec[L - n] = qd.value(-n * h + shifts[sh]);
            fft_->forward(spec);

            auto& T0 = T0_[kind - 1][sh];
            auto& T1 = T1_[kind - 1][sh];
            T0.resize(N);
            T1.resize(N);
            auto& Ke = Kedge_[kind - 1][sh];
            auto& dKe = dKedge_[kind - 1][sh];
            Ke.resize(N);
            dKe.resize(N);
            for (int i = 0; i < N; ++i) {
                Ke[i] = qd.value(i * h + shifts[sh]);
                dKe[i] = qd.derivative(i * h + shifts[sh]);
                auto [a0, a1] = tail_quad_[kind - 1]->tail_moments(i * h, tail_upper_, shifts[sh]);
                T0[i] = a0;
                T1[i] = a1;
            }
        }
    }
}

KernelTable::~KernelTable() = default;

std::vector<cplx> KernelTable::convolve(int kind, bool shifted, const std::vector<cplx>& g, cplx tail_c0,
                                        cplx tail_c1) const {
    const int N = grid_.N;
    if (static_cast<int>(g.size()) != N) fail_validation("convolve: samples do not match the kernel grid");
    if (kind != 1 && kind != 2) fail_validation("kernel kind must be 1 or 2");
    const double h = grid_.h();
    const int L = fft_->L;
    std::vector<cplx> buf(L, 0.0);
    for (int i = 0; i < N; ++i) buf[i] = g[i] * (i == 0 ? 0.5 * h : h);
    fft_->forward(buf);
    const auto& spec = spectrum_[kind - 1][shifted ? 1 : 0];
    for (int i = 0; i < L; ++i) buf[i] *= spec[i];
    fft_->backward(buf);

    const auto& T0 = T0_[kind - 1][shifted ? 1 : 0];
    const auto& T1 = T1_[kind - 1][shifted ? 1 : 0];
    const auto& Ke = Kedge_[kind - 1][shifted ? 1 : 0];
    const auto& dKe = dKedge_[kind - 1][shifted ? 1 : 0];
    std::vector<cplx> out(N);
    const double inv = 1.0 / L;
    const double em = h * h / 12.0;
    for (int i = 0; i < N; ++i) {
        out[i] = buf[i] * inv + tail_c0 * T0[i] + em * (Ke[i] * tail_c1 - dKe[i] * g[0]);
        if (tail_c1 != 0.0) out[i] += tail_c1 * (grid_.at(i) * T0[i] - T1[i]);
    }
    return out;
}

void KernelTable::write_csv(std::ostream& os) const {
    const int N = grid_.N;
    const double h = grid_.h();
    os << "theta,k1,k2\n" << std::setprecision(12);
    for (int n = 0; n < 2 * N - 1; ++n) os << (n - (N - 1)) * h << ',' << k1_[n] << ',' << k2_[n] << '\n';
}

}  // namespace stokes
