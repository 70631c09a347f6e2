#pragma once

#include <array>
#include <complex>
#include <iosfwd>
#include <memory>
#include <vector>

#include "stokes/model.hpp"

namespace stokes {

struct Grid {
    double theta_min = -20.0;
    double theta_max = 10.0;
    int N = 4096;

    double h() const { return (theta_max - theta_min) / (N - 1); }
    double at(int i) const { return theta_min + i * h(); }
    double span() const { return theta_max - theta_min; }
};

// log(q^2 sinh(M th/(M+1) + i pi/(M+1)) / sinh(M th/(M+1) - i pi/(M+1))), principal branch
cplx G_of_theta(cplx theta, double M);

// f_1, f_2 of the kernel Fourier transforms; even in w
double kernel_integrand(double w, int kind, double M);

// K(z) = -(1/pi) int_0^inf cos(w z) f(w) dw by a trapezoid in w.
// The trapezoid sum is periodic in z with period `period`; it is exact up to
// images K(z + n*period), so pick period > (largest |Re z| needed) + 45.
class KernelQuadrature {
public:
    KernelQuadrature(double M, int kind, double period, double max_imag = 0.0);

    cplx value(cplx z) const;
    double value(double u) const { return value(cplx(u, 0.0)).real(); }
    cplx derivative(cplx z) const;

    // T0 = int_a^U K(u+s) du, T1 = int_a^U u K(u+s) du for real a, U
    std::pair<cplx, cplx> tail_moments(double a, double U, cplx s) const;

    double step() const { return dw_; }
    double cutoff() const { return dw_ * (coef_.size() - 1); }
    std::size_t nodes() const { return coef_.size(); }

private:
    double dw_;
    std::vector<double> coef_;  // -(1/pi) * trapezoid weight * f(w_n)
};

double kernel_value(double theta, int kind, double M);

// Everything the NLIE needs at fixed (M, grid, delta): kernel spectra on the
// difference grid for the unshifted and -2i delta shifted kernels, and the
// left-tail moments at a_i = theta_i - theta_min for each.
class KernelTable {
public:
    KernelTable(double M, const Grid& grid, double delta);
    ~KernelTable();
    KernelTable(const KernelTable&) = delete;
    KernelTable& operator=(const KernelTable&) = delete;

    const Grid& grid() const { return grid_; }
    double M() const { return M_; }
    double delta() const { return delta_; }

    // samples K_kind(n h) for n = -(N-1) .. N-1
    const std::vector<double>& samples(int kind) const { return kind == 1 ? k1_ : k2_; }
    double total(int kind) const { return kind == 1 ? total1_ : total2_; }
    double w_cutoff(int kind) const { return quad_[kind - 1]->cutoff(); }
    double w_step(int kind) const { return quad_[kind - 1]->step(); }
    const KernelQuadrature& quadrature(int kind) const { return *quad_[kind - 1]; }
    const KernelQuadrature& tail_quadrature(int kind) const { return *tail_quad_[kind - 1]; }
    double tail_upper() const { return tail_upper_; }

    // out_i = int K(theta_i - theta' + s) g(theta') dtheta' over the whole line,
    // g continued left of theta_min by tail_c0 + tail_c1 * theta'.
    // The trapezoid's h^2 end term at theta_min is removed (Euler-Maclaurin).
    // shifted selects s = -2i delta instead of s = 0.
    std::vector<cplx> convolve(int kind, bool shifted, const std::vector<cplx>& g, cplx tail_c0,
                               cplx tail_c1 = 0.0) const;

    void write_csv(std::ostream& os) const;

private:
    struct Fft;
    double M_;
    Grid grid_;
    double delta_;
    std::vector<double> k1_, k2_;
    double total1_ = 0, total2_ = 0;
    double tail_upper_ = 0;
    std::array<std::unique_ptr<KernelQuadrature>, 2> quad_, tail_quad_;
    // index [kind-1][shifted]
    std::array<std::array<std::vector<cplx>, 2>, 2> spectrum_, T0_, T1_, Kedge_, dKedge_;
    std::unique_ptr<Fft> fft_;
};

}  // namespace stokes
