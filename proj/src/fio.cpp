#include "qmlab/fio.hpp"

#include <bit>
#include <cmath>
#include <numbers>

namespace qmlab {

namespace {

void multiply_phase(GridField& F, const CompiledPoly& a1, double x1, double h, double sign) {
    std::vector<double> xi(F.dim());
    for (std::size_t i = 0; i < F.size(); ++i) {
        auto idx = F.index(i);
        for (int d = 0; d < F.dim(); ++d) xi[d] = F.axes[d].node(idx[d]);
        F.data[i] *= std::polar(1.0, sign * x1 * a1(xi.data()) / h);
    }
}

GridField slice_of(const GridField& f, long row, Space space) {
    std::vector<AxisSpec> axes(f.axes.begin() + 1, f.axes.end());
    GridField s(f.h, space, axes);
    std::copy(f.data.begin() + row * s.size(), f.data.begin() + (row + 1) * s.size(), s.data.begin());
    return s;
}

std::vector<long> sample_rows(const FlatFields& f, std::size_t max_slices) {
    const long n = f.interior();
    const long count = std::min<long>(n, static_cast<long>(max_slices));
    std::vector<long> rows;
    for (long i = 0; i < count; ++i) rows.push_back(f.ghost + i * n / count);
    return rows;
}

double x1_node(const FlatFields& f, long row) { return f.u.axes[0].node(row); }

}  // namespace

GridField apply_W(const FlatteningOp& op, const GridField& slice, double x1, bool adjoint) {
    slice.validate();
    if (slice.dim() != op.a1.dim()) throw std::invalid_argument("apply_W: slice dimension does not match a1");
    CompiledPoly a1(op.a1);
    const double sign = adjoint ? 1.0 : -1.0;
    if (slice.space == Space::Frequency) {
        GridField out = slice;
        multiply_phase(out, a1, x1, op.h, sign);
        return out;
    }
    std::vector<double> centers;
    for (const auto& a : slice.axes) centers.push_back(a.center);
    GridField F = semiclassical_ft(slice, Direction::Forward);
    multiply_phase(F, a1, x1, op.h, sign);
    return semiclassical_ft(F, Direction::Inverse, centers);
}

PolySymbol egorov_symbol(const PolySymbol& a1, const PolySymbol& a2) {
    if (a1.dim() != a2.dim()) throw std::invalid_argument("egorov_symbol: dimension mismatch");
    return a1 - a2;
}

std::vector<AxisSpec> fft_cutoff_axes(const FrequencyCutoff& spec, double h) {
    std::vector<AxisSpec> axes;
    axes.push_back(spec.box.at(0).at(h));
    for (std::size_t d = 1; d < spec.box.size(); ++d) {
        AxisSpec a = spec.box[d].at(h);
        const double step = a.spacing();
        const double r = std::max(std::abs(a.lo()), std::abs(a.hi()));
        auto n = std::bit_ceil(static_cast<unsigned long>(std::ceil(2 * r / step)));
        axes.push_back(AxisSpec{0.0, 0.5 * static_cast<double>(n) * step, static_cast<long>(n)});
    }
    return axes;
}

FlatFields transform_quasimode(const FlatteningOp& op, const CutoffGrid& chi, double points_per_h, long ghost) {
    const int n = chi.dim();
    if (op.a1.dim() != n - 1) throw std::invalid_argument("transform_quasimode: a1 must have n-1 variables");
    if (ghost < 1 || !(points_per_h >= 1)) throw std::invalid_argument("transform_quasimode: bad x1 resolution");
    const double h = chi.h;
    if (std::abs(op.h - h) > 1e-15 * h) throw std::invalid_argument("transform_quasimode: h mismatch");
    std::vector<AxisSpec> fbar(chi.axes.begin() + 1, chi.axes.end());
    for (const auto& a : fbar)
        if (a.center != 0.0 || std::popcount(static_cast<unsigned long>(a.points)) != 1)
            throw std::invalid_argument("transform_quasimode: xi_bar axes must be centred power-of-two grids");

    FlatFields f;
    f.h = h;
    f.ghost = ghost;
    f.period = 2 * std::numbers::pi * h / chi.axes[0].spacing();
    const long N1 = static_cast<long>(std::ceil(points_per_h * f.period / h));
    const double dx = f.period / N1;
    const double hw = 0.5 * (N1 + 2 * ghost) * dx;
    AxisSpec x1axis{hw - (ghost + 0.5) * dx, hw, N1 + 2 * ghost};

    std::vector<AxisSpec> pos{x1axis}, mixed{x1axis};
    for (const auto& a : fbar) {
        pos.push_back(dual_axis(a, h, 0.0));
        mixed.push_back(a);
    }
    f.u = GridField(h, Space::Position, pos);
    f.v = GridField(h, Space::Position, pos);
    f.u_hat = GridField(h, Space::Frequency, mixed);

    CompiledPoly a1(op.a1);
    GridField proto(h, Space::Frequency, fbar);
    std::vector<std::size_t> offs;
    std::vector<double> phase_sym;
    for (const auto& col : chi.columns) {
        std::size_t off = proto.offset(col.index);
        offs.push_back(off);
        std::vector<double> xi(n - 1);
        for (int d = 0; d < n - 1; ++d) xi[d] = fbar[d].node(col.index[d]);
        phase_sym.push_back(a1(xi.data()));
    }
    const std::size_t slice = proto.size();
    parallel_for(static_cast<std::size_t>(x1axis.points), [&](std::size_t row) {
        const double x1 = x1axis.node(static_cast<long>(row));
        auto g = column_profile(chi, x1);
        GridField F = proto;
        for (std::size_t k = 0; k < g.size(); ++k) F.data[offs[k]] = g[k];
        std::copy(F.data.begin(), F.data.end(), f.u_hat.data.begin() + row * slice);
        GridField us = semiclassical_ft(F, Direction::Inverse);
        for (std::size_t k = 0; k < g.size(); ++k) F.data[offs[k]] *= std::polar(1.0, -x1 * phase_sym[k] / h);
        GridField vs = semiclassical_ft(F, Direction::Inverse);
        std::copy(us.data.begin(), us.data.end(), f.u.data.begin() + row * slice);
        std::copy(vs.data.begin(), vs.data.end(), f.v.data.begin() + row * slice);
    });
    return f;
}

FlatQuasimodeRatio flat_quasimode_ratio(const FlatFields& f, const CutoffGrid& chi, const PolySymbol& p, int M) {
    if (M < 1 || M > f.ghost) throw std::invalid_argument("flat_quasimode_ratio: need 1 <= M <= ghost");
    const double h = f.h, dx = f.u.axes[0].spacing();
    const long rows = f.u.axes[0].points;
    const std::size_t slice = f.u.size() / rows;
    // centred difference (h/i)(w[i+1] - w[i-1]) / (2 dx), valid rows shrink by one per application
    std::vector<cplx> w = f.v.data, next(w.size());
    const cplx c = cplx(0, -1) * h / (2 * dx);
    for (int m = 1; m <= M; ++m) {
        for (long r = m; r < rows - m; ++r)
            for (std::size_t j = 0; j < slice; ++j)
                next[r * slice + j] = c * (w[(r + 1) * slice + j] - w[(r - 1) * slice + j]);
        std::swap(w, next);
    }
    std::vector<double> dv, uu;
    dv.reserve(f.interior() * slice);
    uu.reserve(f.interior() * slice);
    for (long r = f.ghost; r < f.ghost + f.interior(); ++r)
        for (std::size_t j = 0; j < slice; ++j) {
            dv.push_back(std::norm(w[r * slice + j]));
            uu.push_back(std::norm(f.u.data[r * slice + j]));
        }
    FlatQuasimodeRatio out;
    out.M = M;
    out.ratio = std::sqrt(pairwise_sum(dv) / pairwise_sum(uu)) / std::pow(h, M);
    out.slack = M * (dx / h) * (dx / h) / 6;
    out.exact = verify_joint_quasimode(chi, p, p, M, 0).ratio;
    return out;
}

UnitarityReport check_unitarity(const FlatteningOp& op, const FlatFields& f, std::size_t max_slices) {
    UnitarityReport rep;
    for (long row : sample_rows(f, max_slices)) {
        GridField u = slice_of(f.u, row, Space::Position);
        const double x1 = x1_node(f, row);
        GridField wu = apply_W(op, u, x1);
        GridField back = apply_W(op, wu, x1, true);
        const double nu = l2_norm(u);
        if (nu == 0) continue;
        rep.norm_error = std::max(rep.norm_error, std::abs(l2_norm(wu) - nu) / nu);
        for (std::size_t i = 0; i < back.size(); ++i) back.data[i] -= u.data[i];
        rep.inverse_error = std::max(rep.inverse_error, l2_norm(back) / nu);
    }
    return rep;
}

double intertwining_gap(const FlatFields& f, const PolySymbol& q, std::size_t max_slices) {
    double gap = 0;
    auto m = symbol_fn(q);
    for (long row : sample_rows(f, max_slices)) {
        const double a = l2_norm(apply_multiplier(slice_of(f.u, row, Space::Position), m));
        const double b = l2_norm(apply_multiplier(slice_of(f.v, row, Space::Position), m));
        if (a > 0) gap = std::max(gap, std::abs(a - b) / a);
    }
    return gap;
}

double frequency_side_gap(const FlatteningOp& op, const FlatFields& f, std::size_t max_slices) {
    double gap = 0;
    for (long row : sample_rows(f, max_slices)) {
        GridField vh = semiclassical_ft(slice_of(f.v, row, Space::Position), Direction::Forward);
        GridField expect = apply_W(op, slice_of(f.u_hat, row, Space::Frequency), x1_node(f, row));
        const double ref = l2_norm(expect);
        for (std::size_t i = 0; i < vh.size(); ++i) vh.data[i] -= expect.data[i];
        if (ref > 0) gap = std::max(gap, l2_norm(vh) / ref);
    }
    return gap;
}

}  // namespace qmlab
