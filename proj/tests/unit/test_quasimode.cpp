#include "qmlab/quasimode.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace qmlab;

namespace {

// every cell of the box tested against every constraint at its node
long brute_force_count(const FrequencyCutoff& spec, double h, const std::vector<AxisSpec>& axes) {
    const int n = static_cast<int>(axes.size());
    std::vector<CompiledPoly> polys;
    for (const auto& c : spec.constraints) polys.emplace_back(c.symbol);
    long total = 1;
    for (const auto& a : axes) total *= a.points;
    long count = 0;
    std::vector<double> xi(n);
    for (long t = 0; t < total; ++t) {
        long rem = t;
        for (int d = n - 1; d >= 0; --d) {
            xi[d] = axes[d].node(rem % axes[d].points);
            rem /= axes[d].points;
        }
        bool in = true;
        for (std::size_t i = 0; i < polys.size() && in; ++i) {
            const double v = std::abs(polys[i](xi.data())), b = spec.constraints[i].bound(h);
            in = spec.constraints[i].sense == Bound::AtMost ? v <= b : v >= b;
        }
        count += in;
    }
    return count;
}

}  // namespace

TEST_CASE("run enumeration matches a brute-force scan") {
    for (const char* id : {"ex21", "ex22", "flat"}) {
        for (int k : {1, 3}) {
            auto e = example_by_id(id, 2, k);
            for (double h : {1.0 / 16, 1.0 / 64}) {
                auto c = build_cutoff(e.cutoff, h);
                INFO(id << " k=" << k << " h=" << h);
                CHECK(c.cell_count == brute_force_count(e.cutoff, h, c.axes));
                CHECK(c.cell_count > 0);
            }
        }
    }
    auto e = example_model_mixed(3);
    auto c = build_cutoff(e.cutoff, 1.0 / 16);
    CHECK(c.cell_count == brute_force_count(e.cutoff, 1.0 / 16, c.axes));
}

TEST_CASE("normalisation and the peak identity") {
    for (const char* id : {"ex21", "ex22"}) {
        auto e = example_by_id(id, 2, 3);
        const double h = 1.0 / 256;
        auto c = build_cutoff(e.cutoff, h);
        CHECK(c.l2_norm() * c.l2_norm() == doctest::Approx(c.volume()).epsilon(1e-12));
        auto T0 = synthesize(c, {{0.0, 0.0}});
        const double pk = std::pow(2 * std::numbers::pi * h, -1.0) * std::sqrt(c.volume());
        CHECK(std::abs(T0[0] - pk) / pk < 1e-10);
        CHECK(peak_value(c) == doctest::Approx(pk).epsilon(1e-12));
    }
}

TEST_CASE("synthesis agrees with direct synthesis of the indicator field") {
    auto e = example_large_p(2, 3);
    auto c = build_cutoff(e.cutoff, 1.0 / 64);
    auto ind = c.indicator_field();
    std::vector<std::vector<double>> targets{{0.0, 0.0}, {0.3, -0.02}, {-1.5, 0.1}, {4.0, 0.7}};
    auto a = synthesize(c, targets), b = direct_synthesis(ind, targets);
    const double nrm = l2_norm(ind);
    for (std::size_t i = 0; i < targets.size(); ++i) CHECK(std::abs(a[i] - b[i] / nrm) < 1e-9 * std::abs(a[0]));
    // grid path
    std::vector<std::vector<double>> coords{{-0.5, 0.0, 0.25}, {-0.05, 0.0, 0.1}};
    auto g = synthesize_grid(c, coords);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            auto v = synthesize(c, {{coords[0][i], coords[1][j]}});
            CHECK(std::abs(g[i * 3 + j] - v[0]) < 1e-10 * std::abs(a[0]));
        }
}

TEST_CASE("column profile resums to the synthesis") {
    auto e = example_large_p(2, 1);
    const double h = 1.0 / 32;
    auto c = build_cutoff(e.cutoff, h);
    const double x1 = 0.4, x2 = -0.07;
    auto prof = column_profile(c, x1);
    cplx s = 0;
    for (std::size_t k = 0; k < c.columns.size(); ++k)
        s += prof[k] * std::polar(1.0, x2 * c.axes[1].node(c.columns[k].index[0]) / h);
    s *= c.axes[1].spacing() / std::sqrt(2 * std::numbers::pi * h);
    auto T = synthesize(c, {{x1, x2}});
    CHECK(std::abs(s - T[0]) < 1e-10 * std::abs(T[0]) + 1e-12);
}

TEST_CASE("joint quasimode ratio") {
    auto e = example_large_p(2, 3);
    const double h = 1.0 / 128;
    auto c = build_cutoff(e.cutoff, h);
    CHECK(verify_joint_quasimode(c, e.p1, e.p2, 0, 0).ratio == doctest::Approx(1).epsilon(1e-14));
    // midpoint-rule oracle on the indicator field
    auto ind = c.indicator_field();
    CompiledPoly p1(e.p1), p2(e.p2);
    for (int m1 = 0; m1 <= 3; ++m1)
        for (int m2 = 0; m2 <= 3; ++m2) {
            double num = 0, den = 0;
            for (std::size_t off = 0; off < ind.size(); ++off) {
                if (ind.data[off] == 0.0) continue;
                auto xi = ind.coords(off);
                num += std::pow(p1(xi.data()), 2 * m1) * std::pow(p2(xi.data()), 2 * m2);
                den += 1;
            }
            const double oracle = std::sqrt(num / den) / std::pow(h, m1 + m2);
            auto q = verify_joint_quasimode(c, e.p1, e.p2, m1, m2);
            CHECK(q.ratio == doctest::Approx(oracle).epsilon(1e-10));
            CHECK(q.ratio <= 1 + 1e-12);
            CHECK(q.cell_ratio > 0);
        }
}

TEST_CASE("support volume shrinks with h") {
    for (const char* id : {"ex21", "ex22"}) {
        auto e = example_by_id(id, 2, 3);
        double last = 1e300;
        for (int L = 4; L <= 10; ++L) {
            double v = build_cutoff(e.cutoff, std::exp2(-L)).volume();
            CHECK(v < last);
            last = v;
        }
    }
}

TEST_CASE("refusals") {
    FrequencyCutoff empty;
    empty.constraints.push_back({PolySymbol::parse("x1", 2), 1, 1, Bound::AtMost});
    empty.constraints.push_back({PolySymbol::parse("x1", 2), 1, 0, Bound::AtLeast});
    empty.box = {AxisLaw{1, 0, 1, 0, 1.0 / 64, 0}, AxisLaw{1, 0, 1, 0, 1.0 / 16, 0}};
    CHECK_THROWS_AS(build_cutoff(empty, 0.5), EmptySupportError);
    FrequencyCutoff tight;
    tight.constraints.push_back({PolySymbol::parse("x1^2 + x2^2", 2), 1, 0, Bound::AtMost});
    tight.box = {AxisLaw{0.5, 0, 0.5, 0, 1.0 / 64, 0}, AxisLaw{0.5, 0, 0.5, 0, 1.0 / 64, 0}};
    CHECK_THROWS_AS(build_cutoff(tight, 0.5), ResolutionError);
    CHECK_THROWS(build_cutoff(tight, 0.0));
}
