#pragma once

#include "qmlab/grids.hpp"
#include "qmlab/quasimode.hpp"

#include <vector>

namespace qmlab {

// f(t) = d/dt bump(t / s), supported in [-s, s].
struct MotherWavelet {
    double scale = 2.5;
    double admissibility = 0;  // C_f = int |f^(eta)|^2 / |eta| d eta
    double tail_bound = 0;     // bound on the part of C_f outside the integration window
    double norm2 = 0;          // ||f||_2^2

    double operator()(double t) const;
    double half_width() const { return scale; }
    // f^(eta) = int f(t) e^{-i eta t} dt
    cplx fourier(double eta) const;
};

MotherWavelet make_mother_wavelet(double scale = 2.5);

// Fourier transform of bump(t) on (-1, 1), which is real and even.
double bump_fourier(double omega);

// Translations may differ per scale.
struct WaveletCoefficients {
    std::vector<double> a;
    std::vector<std::vector<double>> b;  // b[ia]
    std::size_t slices = 1;
    std::vector<std::vector<cplx>> values;  // values[ia][ib * slices + s]
    cplx at(std::size_t ia, std::size_t ib, std::size_t s = 0) const { return values[ia][ib * slices + s]; }
};

// X(a, b, s) = |a|^{-1/2} int f((x1 - b)/a) v(x1, s) dx1 by the midpoint rule on v's x1 axis.
// v vanishes outside its sampled range. Axes after the first index the slices.
// b_grids holds one list per scale, or a single list shared by all scales.
WaveletCoefficients cwt(const GridField& v, const MotherWavelet& w, const std::vector<double>& a,
                        const std::vector<std::vector<double>>& b_grids);

// Uniform translations with spacing |a| / per_scale covering [lo - s|a|, hi + s|a|].
std::vector<std::vector<double>> covering_b_grids(const MotherWavelet& w, const std::vector<double>& a, double lo,
                                                  double hi, double per_scale = 8);

// (2 / C_f) int_a int_b a^{-5/2} X(a, b) f((x - b)/a) db da over a > 0: trapezoid in log a,
// uniform b spacing per scale. Single slice.
std::vector<cplx> icwt(const WaveletCoefficients& X, const MotherWavelet& w, const std::vector<double>& x);

// rho: smooth step from 0 at 1/2 to 1 at 3/4.
double dyadic_rho(double t);
// psi(t) = rho(t) for t <= 1, 1 - rho(t/2) beyond; supported in [1/2, 3/2].
double dyadic_psi(double t);
// psi_0(s) = 1 - rho(s/2); supported in [0, 3/2].
double dyadic_psi0(double s);

struct DyadicCutoffs {
    double base = 1;  // h^{1/(k+1)}
    int J = 0;        // ceil(log2 h^{-1/(k+1)})
    // psi_j(|xi_bar|) for 0 <= j <= J
    double operator()(int j, double r) const;
};
DyadicCutoffs dyadic_cutoffs(double h, int k);

// N(a, j) = || sqrt(psi_j) F_h[X_v(a, b, .)] || over (b, xi_bar) for the flat-model quasimode v = T_chi,
// with the b integral taken over one period of the x1 lattice.
struct WaveletEnergyRow {
    double a = 0;
    int j = 0;
    double N = 0;
    double bound = 0;  // 2^{-j(k+1)M} min(a^{3/2}, 1)
};
struct WaveletEnergyTable {
    std::vector<WaveletEnergyRow> rows;
    int J = 0;
    // per j: fitted log2-slopes of N in a for a <= 1 and a >= 1 (0 when N vanishes identically)
    std::vector<double> slope_small, slope_large;
    std::vector<bool> vanishes;
    // max over a of N(a, j+1)/N(a, j), j >= 1; 0 if N(a, j+1) is identically zero
    std::vector<double> j_ratio;
};
WaveletEnergyTable wavelet_energy_diagnostic(const CutoffGrid& chi, const MotherWavelet& w, int k, int M,
                                const std::vector<double>& a_grid);

// 2^{-6} .. 2^{6}, 25 points
std::vector<double> default_scale_grid();

}  // namespace qmlab
