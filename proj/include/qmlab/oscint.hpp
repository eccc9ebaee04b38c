#pragma once

#include "qmlab/common.hpp"
#include "qmlab/symbols.hpp"
#include "qmlab/wavelets.hpp"

#include <functional>
#include <string>
#include <vector>

namespace qmlab {

// int_box e^{i phi(xi)/h} a_h(xi) d xi
struct OscIntegrand {
    int d = 1;
    std::vector<double> lo, hi;
    std::function<double(const double*)> phase;
    // optional: phase = sum_d phase_parts[d](xi_d), used to tabulate the exponential per axis
    std::vector<std::function<double(double)>> phase_parts;
    std::function<cplx(const double*)> amplitude;
    // declared regularity loss f(h) of the amplitude: |d^alpha a_h| <~ f(h)^{|alpha|}
    std::function<double(double)> loss_rate;
};

struct EvalOptions {
    double points_per_wavelength = 20;  // target on the fine grid
    long points = 0;                    // fixed per-axis cell count; 0 chooses from the target
    double min_points_per_wavelength = 10;
    double max_nodes = 4e8;
};

struct OscResult {
    cplx value;
    double error_estimate = 0;       // |I_dx - I_2dx| / 3
    long points = 0;                 // per axis
    double points_per_wavelength = 0;
    double max_gradient = 0;
};

// Tensor trapezoid rule; refuses (ResolutionError) below min_points_per_wavelength.
OscResult evaluate(const OscIntegrand& I, double h, const EvalOptions& opt = {});

// max |grad phi| over the box, from a lattice of central differences
double max_phase_gradient(const OscIntegrand& I, int lattice = 33);

struct CriticalPoint {
    std::vector<double> xi;
    double hessian_det = 0;
};
// Damped Newton from the box centre and a 3^d lattice of starts; distinct limits inside the box.
std::vector<CriticalPoint> critical_points(const OscIntegrand& I);

// x indexes a family of phases (the sup in |I(h, x)|); the family may depend on h.
using OscFamily = std::function<OscIntegrand(double h, const std::vector<double>& x)>;

struct VdcRow {
    double h = 0, value = 0, bound = 0, ratio = 0;  // value = sup_x |I|, bound = h^{d/2} mu^{-d/2}
    double error_estimate = 0;
    bool admissible = true;  // f(h) <= h^{-1/2} mu^{1/2}
};
struct VdcReport {
    int d = 1;
    double mu = 1;
    std::vector<VdcRow> rows;
    double exponent = 0, exponent_stderr = 0;
    double max_ratio = 0;
    bool refused = false;
    std::string reason;
    bool pass = false;  // exponent >= d/2 - tolerance and certified critical point
};
VdcReport vdc_check(const OscFamily& family, const std::vector<std::vector<double>>& xs, const std::vector<double>& hs,
                    double mu, double tolerance = 0.1, const EvalOptions& opt = {});

// Quadratic model phi = mu |xi - xc|^2 / 2 on a box, separable.
OscIntegrand quadratic_integrand(int d, double mu, const std::vector<double>& xc, const std::vector<double>& lo,
                                 const std::vector<double>& hi, std::function<cplx(const double*)> amplitude);

// Kernel of T T^* for the wavelet-localised flattened operator with x-independent a1(xi_bar):
// K = (2 pi h)^{-(n-1)} B I, B = int f((x1-b)/a) f((z1-b)/a) db,
// I = int e^{i((xbar-zbar).xi_bar + (x1-z1) a1(xi_bar))/h} psi_j(|xi_bar|) d xi_bar.
struct KernelValue {
    cplx K;
    double B = 0;
    cplx I;
    double error_estimate = 0;
};
KernelValue ttstar_kernel(const PolySymbol& a1, const MotherWavelet& w, double a, int j, int k, double h, double x1,
                          double z1, const std::vector<double>& xbar, const std::vector<double>& zbar,
                          const EvalOptions& opt = {});

// |a| h^{-(n-1)/2} |x1-z1|^{-(n-1)/2} when |x1-z1| >= h^{1-2/(k+1)} 2^{-2j}, else |a| h^{-(n-1)(1-1/(k+1))} 2^{j(n-1)}
double ttstar_bound(int n, int k, int j, double h, double a, double dx1);

}  // namespace qmlab
