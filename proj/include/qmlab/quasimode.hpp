#pragma once

#include "qmlab/common.hpp"
#include "qmlab/grids.hpp"
#include "qmlab/symbols.hpp"

#include <string>
#include <vector>

namespace qmlab {

enum class Bound { AtMost, AtLeast };

// |symbol(xi)| <= scale * h^exponent  (or >= for AtLeast).
struct Constraint {
    PolySymbol symbol;
    double scale = 1;
    double exponent = 1;
    Bound sense = Bound::AtMost;

    double bound(double h) const;
};

// Axis extent [-lo_c h^lo_e, hi_c h^hi_e] with spacing at most step_c h^step_e.
struct AxisLaw {
    double lo_c = 1, lo_e = 0, hi_c = 1, hi_e = 0, step_c = 1, step_e = 0;
    AxisSpec at(double h) const;
};

struct FrequencyCutoff {
    std::vector<Constraint> constraints;
    std::vector<AxisLaw> box;  // box[0] is the xi_1 axis
    int dim() const { return static_cast<int>(box.size()); }
};

class EmptySupportError : public ResolutionError {
public:
    explicit EmptySupportError(const std::string& what) : ResolutionError("quasimode", what) {}
};

// Indicator of the constraint set on a cell-centred grid, stored as runs of
// xi_1 indices per xi_bar column.
struct CutoffGrid {
    struct Run {
        long begin, end;  // half-open
    };
    struct Column {
        std::vector<long> index;  // xi_bar node indices
        std::vector<Run> runs;
    };

    double h = 1;
    std::vector<AxisSpec> axes;
    std::vector<Column> columns;  // nonempty columns only, row-major order
    long cell_count = 0;

    int dim() const { return static_cast<int>(axes.size()); }
    double cell_volume() const;
    double volume() const { return cell_count * cell_volume(); }
    double l2_norm() const;
    // largest |xi_d| over the support, per axis
    std::vector<double> extent() const;
    GridField indicator_field() const;
};

CutoffGrid build_cutoff(const FrequencyCutoff& spec, double h);
// Same constraints on caller-supplied axes; check_box refuses supports touching the box edge.
CutoffGrid build_cutoff_on(const FrequencyCutoff& spec, double h, const std::vector<AxisSpec>& axes,
                           bool check_box);

double support_volume(const CutoffGrid& c);

// T(x) at arbitrary points, normalised by the quadrature L^2 norm of the indicator.
std::vector<cplx> synthesize(const CutoffGrid& c, const std::vector<std::vector<double>>& targets);
// T on the product of per-axis coordinate lists, row-major (last axis fastest).
std::vector<cplx> synthesize_grid(const CutoffGrid& c, const std::vector<std::vector<double>>& coords);
// (2 pi h)^{-n/2} sqrt(Vol)
double peak_value(const CutoffGrid& c);

// Partial transform in xi_1 only: (2 pi h)^{-1/2} sum_{xi_1} e^{i x1 xi1/h} chi dxi1 / ||chi||,
// one value per column.
std::vector<cplx> column_profile(const CutoffGrid& c, double x1);

struct JointQuasimodeRatio {
    double ratio = 0;       // midpoint rule, the quadrature that defines ||chi||
    double cell_ratio = 0;  // chi taken constant on each support cell (2-point Gauss per axis)
};
// ||p1^M1 p2^M2 chi|| / (h^(M1+M2) ||chi||) as a frequency-side multiplier norm.
JointQuasimodeRatio verify_joint_quasimode(const CutoffGrid& c, const PolySymbol& p1, const PolySymbol& p2, int M1,
                                           int M2);

// Built-in cutoffs for the worked examples.
struct ExampleSpec {
    std::string id;
    int n = 2, k = 1;
    FrequencyCutoff cutoff;
    PolySymbol p1, p2;
    // non-oscillation box half-widths c h^e per position axis
    std::vector<std::pair<double, double>> flat_box;
    double volume_exponent = 0;  // Vol ~ h^volume_exponent
};

ExampleSpec example_large_p(int n, int k);  // |p1|, |p2| <= h
ExampleSpec example_small_p(int n, int k);  // adds |xi_j| <= h^{1/2}
ExampleSpec example_model_mixed(int k);     // n = 3, 1,k contact
ExampleSpec example_parabola();             // n = 3, contact hidden along xi_2 = xi_3^2
ExampleSpec example_flat(int n, int k);     // p1 = xi_1, p2 = xi_1 + |xi_bar|^(k+1)
// ids: ex21, ex22, ex23, kappa, flat
ExampleSpec example_by_id(const std::string& id, int n, int k);

}  // namespace qmlab
