#include "qmlab/fio.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace qmlab;

namespace {

GridField random_slice(std::mt19937_64& rng, double h, Space s, std::vector<AxisSpec> axes) {
    std::normal_distribution<double> N;
    GridField f(h, s, std::move(axes));
    for (auto& z : f.data) z = cplx(N(rng), N(rng));
    return f;
}

double max_diff(const GridField& a, const GridField& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data[i] - b.data[i]));
    return m;
}

}  // namespace

TEST_CASE("W(0) is the identity and W is unitary") {
    std::mt19937_64 rng(8);
    const double h = 1.0 / 32;
    FlatteningOp op{PolySymbol::parse("x1^2 + x1^4", 1), h};
    auto fs = random_slice(rng, h, Space::Frequency, {AxisSpec{0, 0.5, 64}});
    CHECK(apply_W(op, fs, 0.0).data == fs.data);
    auto ps = random_slice(rng, h, Space::Position, {AxisSpec{0, 3, 128}});
    CHECK(max_diff(apply_W(op, ps, 0.0), ps) < 1e-13);
    for (double x1 : {0.1, -2.5, 17.0}) {
        for (const auto* s : {&fs, &ps}) {
            auto w = apply_W(op, *s, x1);
            CHECK(std::abs(l2_norm(w) - l2_norm(*s)) < 1e-12 * l2_norm(*s));
            auto back = apply_W(op, w, x1, true);
            CHECK(max_diff(back, *s) < 1e-12 * l2_norm(*s) / std::sqrt(s->cell_volume()));
        }
    }
    FlatteningOp op2{PolySymbol::parse("x1^2 + x2^2", 2), h};
    CHECK_THROWS(apply_W(op2, fs, 0.5));
}

TEST_CASE("linear a1 gives a translation") {
    // exp(-i x1 hD / h) u(x) = u(x - x1)
    const double h = 0.05, x1 = 0.75;
    FlatteningOp op{PolySymbol::parse("x1", 1), h};
    GridField u(h, Space::Position, {AxisSpec{0, 8, 512}});
    for (long i = 0; i < 512; ++i) u.data[i] = std::exp(-std::pow(u.axes[0].node(i), 2));
    auto w = apply_W(op, u, x1);
    double err = 0;
    for (long i = 0; i < 512; ++i) err = std::max(err, std::abs(w.data[i] - std::exp(-std::pow(u.axes[0].node(i) - x1, 2))));
    CHECK(err < 1e-10);
}

TEST_CASE("Egorov symbol for a trivial flow") {
    auto a1 = PolySymbol::parse("x1^2 + x2^2", 2), a2 = PolySymbol::parse("x1^2 + x2^2 - (x1^2 + x2^2)^2", 2);
    CHECK(egorov_symbol(a1, a2) == PolySymbol::parse("(x1^2 + x2^2)^2", 2));
}

TEST_CASE("transformed quasimode of the large-p pair") {
    auto e = example_large_p(2, 1);
    const double h = 1.0 / 16;
    auto chi = build_cutoff_on(e.cutoff, h, fft_cutoff_axes(e.cutoff, h), true);
    const auto a1 = graph_factor(e.p1).a, a2 = graph_factor(e.p2).a;
    FlatteningOp op{a1, h};
    auto f = transform_quasimode(op, chi);
    CHECK(f.interior() > 0);
    auto u = check_unitarity(op, f);
    CHECK(u.norm_error < 1e-12);
    CHECK(u.inverse_error < 1e-12);
    CHECK(intertwining_gap(f, egorov_symbol(a1, a2)) < 1e-10);
    CHECK(frequency_side_gap(op, f) < 1e-10);
    for (int M : {1, 2}) {
        auto r = flat_quasimode_ratio(f, chi, e.p1, M);
        CHECK(r.ratio <= 1 + r.slack);
        CHECK(std::abs(r.ratio - r.exact) <= r.slack);
    }
}
