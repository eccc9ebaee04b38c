#include "qmlab/quasimode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace qmlab {

double Constraint::bound(double h) const { return scale * std::pow(h, exponent); }

AxisSpec AxisLaw::at(double h) const {
    double lo = -lo_c * std::pow(h, lo_e), hi = hi_c * std::pow(h, hi_e);
    double step = step_c * std::pow(h, step_e);
    if (!(hi > lo) || !(step > 0)) throw std::invalid_argument("AxisLaw: empty axis");
    long n = static_cast<long>(std::ceil((hi - lo) / step - 1e-9));
    return AxisSpec{0.5 * (lo + hi), 0.5 * (hi - lo), std::max(n, 2L)};
}

double CutoffGrid::cell_volume() const {
    double v = 1;
    for (const auto& a : axes) v *= a.spacing();
    return v;
}

double CutoffGrid::l2_norm() const { return std::sqrt(volume()); }

std::vector<double> CutoffGrid::extent() const {
    std::vector<double> e(dim(), 0.0);
    for (const auto& col : columns) {
        for (const auto& r : col.runs)
            e[0] = std::max({e[0], std::abs(axes[0].node(r.begin)), std::abs(axes[0].node(r.end - 1))});
        for (int d = 1; d < dim(); ++d) e[d] = std::max(e[d], std::abs(axes[d].node(col.index[d - 1])));
    }
    return e;
}

GridField CutoffGrid::indicator_field() const {
    GridField f(h, Space::Frequency, axes);
    std::vector<long> idx(dim());
    for (const auto& col : columns) {
        for (int d = 1; d < dim(); ++d) idx[d] = col.index[d - 1];
        for (const auto& r : col.runs)
            for (long i = r.begin; i < r.end; ++i) {
                idx[0] = i;
                f.data[f.offset(idx)] = 1.0;
            }
    }
    return f;
}

namespace {

using Interval = CutoffGrid::Run;

struct PreparedConstraint {
    CompiledPoly full;
    bool affine = false;
    double c1 = 0;
    CompiledPoly rest;  // xi_bar part when affine
    double bound = 0;
    Bound sense = Bound::AtMost;

    bool holds(double v) const { return sense == Bound::AtMost ? std::abs(v) <= bound : std::abs(v) >= bound; }
};

PreparedConstraint prepare(const Constraint& c, double h, int n) {
    PreparedConstraint p;
    if (c.symbol.dim() != n) throw std::invalid_argument("cutoff constraint dimension mismatch");
    p.full = CompiledPoly(c.symbol);
    p.bound = c.bound(h);
    p.sense = c.sense;
    PolySymbol rest(std::max(n - 1, 1));
    bool affine = true;
    for (const auto& [a, coef] : c.symbol.coeffs()) {
        int tot = 0;
        for (int x : a) tot += x;
        if (a[0] == 0)
            rest.add_term(MultiIndex(a.begin() + 1, a.end()), coef);
        else if (a[0] == 1 && tot == 1)
            p.c1 = to_double(coef);
        else
            affine = false;
    }
    p.affine = affine;
    if (affine) p.rest = CompiledPoly(rest);
    return p;
}

std::vector<Interval> intersect(const std::vector<Interval>& a, const std::vector<Interval>& b) {
    std::vector<Interval> out;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        long lo = std::max(a[i].begin, b[j].begin), hi = std::min(a[i].end, b[j].end);
        if (lo < hi) out.push_back({lo, hi});
        if (a[i].end < b[j].end)
            ++i;
        else
            ++j;
    }
    return out;
}

long clamp_index(double v, long n) {
    if (v < 0) return 0;
    if (v > static_cast<double>(n)) return n;
    return static_cast<long>(v);
}

}  // namespace

CutoffGrid build_cutoff_on(const FrequencyCutoff& spec, double h, const std::vector<AxisSpec>& axes, bool check_box) {
    if (!(h > 0) || h > 1) throw std::invalid_argument("build_cutoff: h must lie in (0, 1]");
    const int n = static_cast<int>(axes.size());
    if (n < 2) throw std::invalid_argument("build_cutoff: need at least two axes");
    if (spec.constraints.empty()) throw std::invalid_argument("build_cutoff: no constraints");
    std::vector<PreparedConstraint> cons;
    for (const auto& c : spec.constraints) cons.push_back(prepare(c, h, n));

    CutoffGrid g;
    g.h = h;
    g.axes = axes;
    const AxisSpec& a1 = axes[0];
    const long N1 = a1.points;
    const double x0 = a1.node(0), dx = a1.spacing();
    std::size_t ncols = 1;
    for (int d = 1; d < n; ++d) ncols *= static_cast<std::size_t>(axes[d].points);

    const std::size_t chunk = 2048;
    const std::size_t nchunks = (ncols + chunk - 1) / chunk;
    std::vector<std::vector<CutoffGrid::Column>> parts(nchunks);
    parallel_for(nchunks, [&](std::size_t ch) {
        std::vector<double> pt(n);
        std::vector<long> idx(n - 1);
        auto pred = [&](long i) {
            pt[0] = a1.node(i);
            for (const auto& c : cons)
                if (!c.holds(c.full(pt.data()))) return false;
            return true;
        };
        const std::size_t end = std::min(ncols, (ch + 1) * chunk);
        for (std::size_t col = ch * chunk; col < end; ++col) {
            std::size_t rem = col;
            for (int d = n - 1; d >= 1; --d) {
                idx[d - 1] = static_cast<long>(rem % axes[d].points);
                rem /= axes[d].points;
                pt[d] = axes[d].node(idx[d - 1]);
            }
            std::vector<Interval> iv{{0, N1}};
            for (const auto& c : cons) {
                if (iv.empty()) break;
                if (!c.affine) {
                    std::vector<Interval> next;
                    for (const auto& r : iv)
                        for (long i = r.begin; i < r.end; ++i) {
                            pt[0] = a1.node(i);
                            if (!c.holds(c.full(pt.data()))) continue;
                            if (!next.empty() && next.back().end == i)
                                next.back().end = i + 1;
                            else
                                next.push_back({i, i + 1});
                        }
                    iv = std::move(next);
                    continue;
                }
                double r = c.rest(pt.data() + 1);
                if (c.c1 == 0) {
                    if (!c.holds(r)) iv.clear();
                    continue;
                }
                double lo = (-c.bound - r) / c.c1, hi = (c.bound - r) / c.c1;
                if (lo > hi) std::swap(lo, hi);
                double ilo = std::ceil((lo - x0) / dx), ihi = std::floor((hi - x0) / dx);
                std::vector<Interval> allowed;
                if (c.sense == Bound::AtMost) {
                    long b = clamp_index(ilo, N1), e = clamp_index(ihi + 1, N1);
                    if (b < e) allowed.push_back({b, e});
                } else {
                    long e = clamp_index(std::floor((lo - x0) / dx) + 1, N1);
                    long b = clamp_index(std::ceil((hi - x0) / dx), N1);
                    if (0 < e) allowed.push_back({0, e});
                    if (b < N1) {
                        if (!allowed.empty() && allowed.back().end >= b)
                            allowed.back().end = N1;
                        else
                            allowed.push_back({b, N1});
                    }
                }
                iv = intersect(iv, allowed);
            }
            // make the run ends agree with node-wise evaluation of the full constraints
            for (std::size_t q = 0; q < iv.size(); ++q) {
                auto& r = iv[q];
                while (r.begin < r.end && !pred(r.begin)) ++r.begin;
                while (r.end > r.begin && !pred(r.end - 1)) --r.end;
                if (r.begin == r.end) continue;
                long floor_b = q > 0 ? iv[q - 1].end : 0;
                while (r.begin > floor_b && pred(r.begin - 1)) --r.begin;
                long ceil_e = q + 1 < iv.size() ? iv[q + 1].begin : N1;
                while (r.end < ceil_e && pred(r.end)) ++r.end;
            }
            std::vector<Interval> runs;
            for (const auto& r : iv) {
                if (r.begin >= r.end) continue;
                if (!runs.empty() && runs.back().end >= r.begin)
                    runs.back().end = std::max(runs.back().end, r.end);
                else
                    runs.push_back(r);
            }
            if (!runs.empty()) parts[ch].push_back({idx, std::move(runs)});
        }
    });
    for (auto& p : parts)
        for (auto& c : p) g.columns.push_back(std::move(c));
    for (const auto& c : g.columns)
        for (const auto& r : c.runs) g.cell_count += r.end - r.begin;
    if (g.cell_count == 0) throw EmptySupportError("cutoff has empty support on the grid (h too large or inconsistent constraints)");
    if (check_box) {
        for (const auto& c : g.columns) {
            for (const auto& r : c.runs)
                if (r.begin == 0 || r.end == N1) throw ResolutionError("quasimode", "support reaches the xi_1 edge of the cutoff box");
            for (int d = 1; d < n; ++d)
                if (c.index[d - 1] == 0 || c.index[d - 1] == axes[d].points - 1)
                    throw ResolutionError("quasimode", "support reaches the xi_" + std::to_string(d + 1) + " edge of the cutoff box");
        }
    }
    return g;
}

CutoffGrid build_cutoff(const FrequencyCutoff& spec, double h) {
    std::vector<AxisSpec> axes;
    for (const auto& law : spec.box) axes.push_back(law.at(h));
    return build_cutoff_on(spec, h, axes, true);
}

double support_volume(const CutoffGrid& c) {
    if (c.cell_count == 0) throw EmptySupportError("empty support");
    return c.volume();
}

double peak_value(const CutoffGrid& c) {
    return std::pow(2 * std::numbers::pi * c.h, -0.5 * c.dim()) * std::sqrt(c.volume());
}

namespace {

// sum_{i=b}^{e-1} exp(i theta i)
cplx geometric(double theta, long b, long e) {
    const long L = e - b;
    const double m = std::round(theta / (2 * std::numbers::pi));
    const double eps = 0.5 * theta - std::numbers::pi * m;
    double ratio = std::sin(eps) == 0.0 ? static_cast<double>(L) : std::sin(L * eps) / std::sin(eps);
    if ((static_cast<long long>(m) * (L - 1)) % 2 != 0) ratio = -ratio;
    return std::polar(ratio, 0.5 * theta * static_cast<double>(b + e - 1));
}

// sum over the runs of one column of exp(i x1 xi1 / h)
cplx column_sum(const CutoffGrid& c, const CutoffGrid::Column& col, double x1) {
    const double x0 = c.axes[0].node(0), dx = c.axes[0].spacing();
    const double theta = x1 * dx / c.h;
    cplx s = 0;
    for (const auto& r : col.runs) s += geometric(theta, r.begin, r.end);
    return s * std::polar(1.0, x1 * x0 / c.h);
}

double synthesis_prefactor(const CutoffGrid& c) {
    return std::pow(2 * std::numbers::pi * c.h, -0.5 * c.dim()) * c.cell_volume() / c.l2_norm();
}

}  // namespace

std::vector<cplx> synthesize(const CutoffGrid& c, const std::vector<std::vector<double>>& targets) {
    if (c.cell_count == 0) throw EmptySupportError("empty support");
    if (targets.empty()) throw std::invalid_argument("synthesize: empty target list");
    const int n = c.dim();
    std::vector<std::vector<double>> xib(c.columns.size(), std::vector<double>(n - 1));
    for (std::size_t k = 0; k < c.columns.size(); ++k)
        for (int d = 1; d < n; ++d) xib[k][d - 1] = c.axes[d].node(c.columns[k].index[d - 1]);
    const double pref = synthesis_prefactor(c);
    std::vector<cplx> out(targets.size());
    parallel_for(targets.size(), [&](std::size_t t) {
        const auto& x = targets[t];
        if (static_cast<int>(x.size()) != n) throw std::invalid_argument("synthesize: target dimension mismatch");
        std::vector<cplx> terms(c.columns.size());
        for (std::size_t k = 0; k < c.columns.size(); ++k) {
            double ph = 0;
            for (int d = 1; d < n; ++d) ph += x[d] * xib[k][d - 1];
            terms[k] = column_sum(c, c.columns[k], x[0]) * std::polar(1.0, ph / c.h);
        }
        out[t] = pref * pairwise_sum(terms);
    });
    return out;
}

std::vector<cplx> synthesize_grid(const CutoffGrid& c, const std::vector<std::vector<double>>& coords) {
    const int n = c.dim();
    if (static_cast<int>(coords.size()) != n) throw std::invalid_argument("synthesize_grid: coordinate list count mismatch");
    if (n != 2) {
        std::vector<std::vector<double>> pts;
        std::size_t total = 1;
        for (const auto& v : coords) total *= v.size();
        pts.reserve(total);
        std::vector<std::size_t> idx(n, 0);
        for (std::size_t t = 0; t < total; ++t) {
            std::vector<double> p(n);
            std::size_t rem = t;
            for (int d = n - 1; d >= 0; --d) {
                p[d] = coords[d][rem % coords[d].size()];
                rem /= coords[d].size();
            }
            pts.push_back(std::move(p));
        }
        return synthesize(c, pts);
    }
    if (c.cell_count == 0) throw EmptySupportError("empty support");
    const auto& X1 = coords[0];
    const auto& X2 = coords[1];
    const std::size_t K = c.columns.size();
    std::vector<cplx> G(K * X1.size());
    parallel_for(X1.size(), [&](std::size_t i) {
        for (std::size_t k = 0; k < K; ++k) G[k * X1.size() + i] = column_sum(c, c.columns[k], X1[i]);
    });
    std::vector<double> xi2(K);
    for (std::size_t k = 0; k < K; ++k) xi2[k] = c.axes[1].node(c.columns[k].index[0]);
    const double pref = synthesis_prefactor(c);
    std::vector<cplx> out(X1.size() * X2.size());
    parallel_for(X2.size(), [&](std::size_t j) {
        std::vector<cplx> E(K), terms(K);
        for (std::size_t k = 0; k < K; ++k) E[k] = std::polar(1.0, X2[j] * xi2[k] / c.h);
        for (std::size_t i = 0; i < X1.size(); ++i) {
            for (std::size_t k = 0; k < K; ++k) terms[k] = G[k * X1.size() + i] * E[k];
            out[i * X2.size() + j] = pref * pairwise_sum(terms);
        }
    });
    return out;
}

std::vector<cplx> column_profile(const CutoffGrid& c, double x1) {
    const double pref = std::pow(2 * std::numbers::pi * c.h, -0.5) * c.axes[0].spacing() / c.l2_norm();
    std::vector<cplx> out(c.columns.size());
    for (std::size_t k = 0; k < c.columns.size(); ++k) out[k] = pref * column_sum(c, c.columns[k], x1);
    return out;
}

JointQuasimodeRatio verify_joint_quasimode(const CutoffGrid& c, const PolySymbol& p1, const PolySymbol& p2, int M1,
                                           int M2) {
    if (M1 < 0 || M2 < 0) throw std::invalid_argument("verify_joint_quasimode: negative power");
    const int n = c.dim();
    if (p1.dim() != n || p2.dim() != n) throw std::invalid_argument("verify_joint_quasimode: dimension mismatch");
    CompiledPoly q1(p1), q2(p2);
    const double h = c.h;
    const int npts = 1 << n;
    const double g = 0.5 / std::sqrt(3.0);  // 2-point Gauss offsets, in cell widths
    std::vector<double> gauss_part(c.columns.size()), node_part(c.columns.size());
    parallel_for(c.columns.size(), [&](std::size_t k) {
        const auto& col = c.columns[k];
        std::vector<double> centre(n), pt(n), gs, ns;
        for (int d = 1; d < n; ++d) centre[d] = c.axes[d].node(col.index[d - 1]);
        for (const auto& r : col.runs)
            for (long i = r.begin; i < r.end; ++i) {
                centre[0] = c.axes[0].node(i);
                auto weight = [&](const double* x) {
                    double a = std::abs(q1(x)) / h, b = std::abs(q2(x)) / h;
                    return std::pow(a, 2 * M1) * std::pow(b, 2 * M2);
                };
                ns.push_back(weight(centre.data()));
                double acc = 0;
                for (int m = 0; m < npts; ++m) {
                    for (int d = 0; d < n; ++d) pt[d] = centre[d] + ((m >> d) & 1 ? g : -g) * c.axes[d].spacing();
                    acc += weight(pt.data());
                }
                gs.push_back(acc / npts);
            }
        gauss_part[k] = pairwise_sum(gs);
        node_part[k] = pairwise_sum(ns);
    });
    JointQuasimodeRatio r;
    r.ratio = std::sqrt(pairwise_sum(node_part) / c.cell_count);
    r.cell_ratio = std::sqrt(pairwise_sum(gauss_part) / c.cell_count);
    return r;
}

// ---- worked examples ----

namespace {

PolySymbol xbar_norm2(int n) {
    PolySymbol s(n);
    for (int j = 1; j < n; ++j) s = s + PolySymbol::variable(n, j).pow(2);
    return s;
}

AxisLaw symmetric(double c, double e, double step_c, double step_e) { return AxisLaw{c, e, c, e, step_c, step_e}; }

}  // namespace

ExampleSpec example_large_p(int n, int k) {
    if (n < 2) throw std::invalid_argument("example: n must be >= 2");
    if (k < 1 || k % 2 == 0) throw std::invalid_argument("example: k must be odd and >= 1 (|xi_bar|^(k+1) must be a polynomial)");
    ExampleSpec e;
    e.id = "ex21";
    e.n = n;
    e.k = k;
    const PolySymbol x1 = PolySymbol::variable(n, 0), r2 = xbar_norm2(n);
    e.p1 = x1 - r2;
    e.p2 = x1 - (r2 - r2.pow((k + 1) / 2));
    e.cutoff.constraints = {{e.p1, 1, 1}, {e.p2, 1, 1}};
    const double ek = 1.0 / (k + 1);
    // |xi_bar|^{k+1} <= 2h and xi_1 <= |xi_bar|^2 + h
    e.cutoff.box.push_back(AxisLaw{1.5, 1, 1.25 * (std::pow(2.0, 2 * ek) + 1), 2 * ek, 1.0 / 16, 1});
    for (int j = 1; j < n; ++j) e.cutoff.box.push_back(symmetric(1.25 * std::pow(2.0, ek), ek, 1.0 / 16, ek));
    e.flat_box.push_back({1.0, 1 - 2 * ek});
    for (int j = 1; j < n; ++j) e.flat_box.push_back({1.0, 1 - ek});
    e.volume_exponent = 1 + (n - 1) * ek;
    return e;
}

ExampleSpec example_small_p(int n, int k) {
    ExampleSpec e = example_large_p(n, k);
    e.id = "ex22";
    for (int j = 1; j < n; ++j) e.cutoff.constraints.push_back({PolySymbol::variable(n, j), 1, 0.5});
    e.cutoff.box.resize(1);
    e.cutoff.box[0] = AxisLaw{1.5, 1, 1.25 * n, 1, 1.0 / 16, 1};
    for (int j = 1; j < n; ++j) e.cutoff.box.push_back(symmetric(1.25, 0.5, 1.0 / 16, 0.5));
    e.flat_box.assign(1, {1.0, 0.0});
    for (int j = 1; j < n; ++j) e.flat_box.push_back({1.0, 0.5});
    e.volume_exponent = 1 + 0.5 * (n - 1);
    return e;
}

ExampleSpec example_model_mixed(int k) {
    if (k < 1 || k % 2 == 0) throw std::invalid_argument("example: k must be odd and >= 1");
    ExampleSpec e;
    e.id = "ex23";
    e.n = 3;
    e.k = k;
    const PolySymbol x1 = PolySymbol::variable(3, 0), x2 = PolySymbol::variable(3, 1), x3 = PolySymbol::variable(3, 2);
    e.p1 = x1 - (x2.pow(2) + x3.pow(2));
    e.p2 = x1 - (x2.pow(2) * Rational(2) + x3.pow(2) + x3.pow(k + 1));
    e.cutoff.constraints = {{e.p1, 1, 1}, {e.p2, 1, 1}};
    const double ek = 1.0 / (k + 1);
    // xi_2^2 + xi_3^{k+1} <= 2h
    e.cutoff.box.push_back(AxisLaw{1.5, 1, 1.25 * (std::pow(2.0, 2 * ek) + 3), 2 * ek, 1.0 / 16, 1});
    e.cutoff.box.push_back(symmetric(1.25 * std::sqrt(2.0), 0.5, 1.0 / 16, 0.5));
    e.cutoff.box.push_back(symmetric(1.25 * std::pow(2.0, ek), ek, 1.0 / 16, ek));
    e.flat_box = {{1.0, 1 - 2 * ek}, {1.0, 0.5}, {1.0, 1 - ek}};
    e.volume_exponent = 1.5 + ek;
    return e;
}

ExampleSpec example_parabola() {
    ExampleSpec e;
    e.id = "kappa";
    e.n = 3;
    e.k = 3;
    const PolySymbol x1 = PolySymbol::variable(3, 0), x2 = PolySymbol::variable(3, 1), x3 = PolySymbol::variable(3, 2);
    e.p1 = x1 - (x2.pow(2) + x3.pow(2));
    e.p2 = x1 - (x2.pow(2) + x3.pow(2) - (x2 - x3.pow(2)).pow(2) - x2.pow(10));
    e.cutoff.constraints = {{e.p1, 1, 1}, {e.p2, 1, 1}};
    // (xi_2 - xi_3^2)^2 + xi_2^10 <= 2h: xi_2 <= (2h)^{1/10}, xi_3^2 <= xi_2 + (2h)^{1/2}
    const double a10 = std::pow(2.0, 0.1), a20 = std::pow(2.0, 0.05);
    e.cutoff.box.push_back(AxisLaw{1.5, 1, 1.25 * (2 * a10 * a10 + 1), 0.2, 1.0 / 16, 1});
    e.cutoff.box.push_back(AxisLaw{1.5 * std::sqrt(2.0), 0.5, 2.5 * a10, 0.1, 1.0 / 16, 0.5});
    // the band in xi_2 has width ~h^{1/2} and moves with slope 2 xi_3
    const double r3 = 1.25 * std::sqrt(2.0) * a20;
    e.cutoff.box.push_back(symmetric(r3, 0.05, 1.0 / (16 * 2 * r3), 0.45));
    e.flat_box = {{1.0, 0.8}, {1.0, 0.5}, {1.0, 0.95}};
    e.volume_exponent = 1.5 + 0.05;
    return e;
}

ExampleSpec example_flat(int n, int k) {
    if (n < 2) throw std::invalid_argument("example: n must be >= 2");
    if (k < 1 || k % 2 == 0) throw std::invalid_argument("example: k must be odd and >= 1");
    ExampleSpec e;
    e.id = "flat";
    e.n = n;
    e.k = k;
    const PolySymbol x1 = PolySymbol::variable(n, 0), r2 = xbar_norm2(n);
    e.p1 = x1;
    e.p2 = x1 + r2.pow((k + 1) / 2);
    e.cutoff.constraints = {{e.p1, 1, 1}, {e.p2, 1, 1}};
    const double ek = 1.0 / (k + 1);
    e.cutoff.box.push_back(symmetric(1.5, 1, 1.0 / 16, 1));
    for (int j = 1; j < n; ++j) e.cutoff.box.push_back(symmetric(1.25 * std::pow(2.0, ek), ek, 1.0 / 16, ek));
    e.flat_box.push_back({1.0, 0.0});
    for (int j = 1; j < n; ++j) e.flat_box.push_back({1.0, 1 - ek});
    e.volume_exponent = 1 + (n - 1) * ek;
    return e;
}

ExampleSpec example_by_id(const std::string& id, int n, int k) {
    if (id == "ex21") return example_large_p(n, k);
    if (id == "ex22") return example_small_p(n, k);
    if (id == "ex23") return example_model_mixed(k);
    if (id == "kappa") return example_parabola();
    if (id == "flat") return example_flat(n, k);
    throw std::invalid_argument("unknown example '" + id + "'");
}

}  // namespace qmlab
