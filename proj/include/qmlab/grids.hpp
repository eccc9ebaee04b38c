#pragma once

#include "qmlab/common.hpp"
#include "qmlab/symbols.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace qmlab {

// Cell-centred axis: node i sits at center - half_width + (i + 1/2) * spacing.
struct AxisSpec {
    double center = 0;
    double half_width = 1;
    long points = 2;

    double spacing() const { return 2 * half_width / points; }
    double node(long i) const { return center - half_width + (i + 0.5) * spacing(); }
    double lo() const { return center - half_width; }
    double hi() const { return center + half_width; }
};

enum class Space { Position, Frequency };
enum class Direction { Forward, Inverse };

struct GridField {
    double h = 1;
    Space space = Space::Position;
    std::vector<AxisSpec> axes;
    std::vector<cplx> data;  // row-major, last axis fastest

    GridField() = default;
    GridField(double h, Space space, std::vector<AxisSpec> axes);

    int dim() const { return static_cast<int>(axes.size()); }
    std::size_t size() const { return data.size(); }
    double cell_volume() const;
    // multi-index <-> flat offset
    std::size_t offset(const std::vector<long>& idx) const;
    std::vector<long> index(std::size_t off) const;
    std::vector<double> coords(std::size_t off) const;
    void validate() const;
};

// Quadrature L^2 norm (midpoint weights).
double l2_norm(const GridField& f);

// Dual axis of an FFT: spacing 2*pi*h/(N*dx), N cells, centred at `center`.
AxisSpec dual_axis(const AxisSpec& a, double h, double center = 0.0);

// Semiclassical Fourier transform (2 pi h)^{-n/2} int e^{-i<x,xi>/h} u dx on
// cell-centred grids. Output axes are centred at dual_centers (default all zero).
GridField semiclassical_ft(const GridField& f, Direction dir, const std::vector<double>& dual_centers = {});

using SymbolFn = std::function<cplx(const double*)>;
SymbolFn symbol_fn(const PolySymbol& p);

// p(hD)u for an x-independent symbol; position input is transformed and returned in position space.
GridField apply_multiplier(const GridField& f, const SymbolFn& m);

// (2 pi h)^{-n/2} sum over cells of e^{i<x,xi>/h} chi(xi) dxi^n at each target.
std::vector<cplx> direct_synthesis(const GridField& cutoff, const std::vector<std::vector<double>>& targets);

// Container: "QMGF" magic, u32 version, u32 dims, f64 h, u8 space tag,
// per axis (f64 center, f64 half_width, u64 points), then interleaved f64 re/im.
void write_binary(const GridField& f, std::ostream& os);
GridField read_binary(std::istream& is);
void write_csv(const GridField& f, std::ostream& os);

}  // namespace qmlab
