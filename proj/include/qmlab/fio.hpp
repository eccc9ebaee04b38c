#pragma once

#include "qmlab/grids.hpp"
#include "qmlab/quasimode.hpp"
#include "qmlab/symbols.hpp"

namespace qmlab {

// W(x1) = exp(-i x1 a1(hD_xbar)/h) for an x-independent a1(xi_bar).
struct FlatteningOp {
    PolySymbol a1;  // n-1 variables
    double h = 1;
};

// Applies W(x1) (or W(x1)^*) to one xi_bar slice, in whichever space the slice lives.
GridField apply_W(const FlatteningOp& op, const GridField& slice, double x1, bool adjoint = false);

// Egorov symbol for a trivial flow: a1 - a2.
PolySymbol egorov_symbol(const PolySymbol& a1, const PolySymbol& a2);

// u = T_chi and v(x1, .) = W(x1) u(x1, .) sampled on [0, period) in x1 plus ghost
// nodes on both sides, and on the FFT dual grid of the xi_bar axes.
struct FlatFields {
    double h = 1;
    double period = 0;
    long ghost = 0;
    GridField u, v;    // axes: x1 (with ghosts), then xbar
    GridField u_hat;   // partial transform in xbar, same layout, frequency axes for xbar
    long interior() const { return u.axes[0].points - 2 * ghost; }
};

// Cutoff axes whose xi_bar axes have power-of-two length so slices can be transformed.
std::vector<AxisSpec> fft_cutoff_axes(const FrequencyCutoff& spec, double h);

// x1 spacing is at most h / points_per_h; ghost nodes serve the difference stencils.
FlatFields transform_quasimode(const FlatteningOp& op, const CutoffGrid& chi, double points_per_h = 8, long ghost = 4);

struct FlatQuasimodeRatio {
    int M = 1;
    double ratio = 0;  // ||(hD_x1)^M v|| / (h^M ||u||), centred differences
    double slack = 0;  // discretization allowance M (dx/h)^2 / 6
    double exact = 0;  // same quantity from the frequency side
};
FlatQuasimodeRatio flat_quasimode_ratio(const FlatFields& f, const CutoffGrid& chi, const PolySymbol& p, int M);

// Largest relative deviation of ||W u|| and ||W^* W u - u|| over the interior slices.
struct UnitarityReport {
    double norm_error = 0, inverse_error = 0;
};
UnitarityReport check_unitarity(const FlatteningOp& op, const FlatFields& f, std::size_t max_slices = 64);

// ||q(hD_xbar) v(x1)|| versus ||q(hD_xbar) u(x1)|| per slice; returns the largest relative gap.
double intertwining_gap(const FlatFields& f, const PolySymbol& q, std::size_t max_slices = 64);

// Relative deviation of the slices of v from exp(-i x1 a1/h) applied to u_hat.
double frequency_side_gap(const FlatteningOp& op, const FlatFields& f, std::size_t max_slices = 64);

}  // namespace qmlab
