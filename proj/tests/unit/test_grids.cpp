#include "qmlab/grids.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace qmlab;

namespace {

GridField gaussian(double h, double x0, long n = 256, double hw = 8) {
    GridField f(h, Space::Position, {AxisSpec{0, hw, n}});
    for (long i = 0; i < n; ++i) {
        double x = f.axes[0].node(i) - x0;
        f.data[i] = std::exp(-x * x / 2);
    }
    return f;
}

GridField random_field(std::mt19937_64& rng, double h, std::vector<AxisSpec> axes) {
    std::normal_distribution<double> N;
    GridField f(h, Space::Position, std::move(axes));
    for (auto& z : f.data) z = cplx(N(rng), N(rng));
    return f;
}

double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_CASE("axis nodes are cell centred") {
    AxisSpec a{1.0, 2.0, 8};
    CHECK(a.spacing() == doctest::Approx(0.5));
    CHECK(a.node(0) == doctest::Approx(-0.75));
    CHECK(a.node(7) == doctest::Approx(2.75));
}

TEST_CASE("Gaussian transform matches the closed form") {
    // (2 pi h)^{-1/2} int e^{-i x xi/h} e^{-x^2/2} dx = h^{-1/2} e^{-xi^2 / (2 h^2)}
    const double h = 0.25;
    auto f = gaussian(h, 0, 512, 12);
    auto F = semiclassical_ft(f, Direction::Forward);
    double err = 0;
    for (std::size_t i = 0; i < F.size(); ++i) {
        double xi = F.axes[0].node(static_cast<long>(i));
        err = std::max(err, std::abs(F.data[i] - std::exp(-xi * xi / (2 * h * h)) / std::sqrt(h)));
    }
    CHECK(err < 1e-10);
}

TEST_CASE("Parseval and inversion on random fields") {
    std::mt19937_64 rng(17);
    for (double h : {1.0, 0.1, 2e-3}) {
        auto f = random_field(rng, h, {AxisSpec{0.3, 2, 32}, AxisSpec{-1, 1.5, 16}});
        auto F = semiclassical_ft(f, Direction::Forward, {0.2, -0.1});
        CHECK(l2_norm(F) == doctest::Approx(l2_norm(f)).epsilon(1e-12));
        auto g = semiclassical_ft(F, Direction::Inverse, {0.3, -1});
        CHECK(max_diff(g.data, f.data) < 1e-12 * l2_norm(f) / std::sqrt(f.cell_volume()));
    }
}

TEST_CASE("linearity") {
    std::mt19937_64 rng(4);
    std::vector<AxisSpec> ax{AxisSpec{0, 1, 64}};
    auto f = random_field(rng, 0.05, ax), g = random_field(rng, 0.05, ax);
    const cplx a(0.3, -1.2), b(2.0, 0.5);
    GridField s = f;
    for (std::size_t i = 0; i < s.size(); ++i) s.data[i] = a * f.data[i] + b * g.data[i];
    auto Fs = semiclassical_ft(s, Direction::Forward), Ff = semiclassical_ft(f, Direction::Forward),
         Fg = semiclassical_ft(g, Direction::Forward);
    std::vector<cplx> lin(Fs.size());
    for (std::size_t i = 0; i < lin.size(); ++i) lin[i] = a * Ff.data[i] + b * Fg.data[i];
    CHECK(max_diff(Fs.data, lin) < 1e-12);
}

TEST_CASE("translation covariance") {
    const double h = 0.2, x0 = 1.25;
    auto F0 = semiclassical_ft(gaussian(h, 0), Direction::Forward);
    auto F1 = semiclassical_ft(gaussian(h, x0), Direction::Forward);
    double err = 0;
    for (std::size_t i = 0; i < F0.size(); ++i) {
        double xi = F0.axes[0].node(static_cast<long>(i));
        err = std::max(err, std::abs(F1.data[i] - std::polar(1.0, -x0 * xi / h) * F0.data[i]));
    }
    CHECK(err < 1e-10);
}

TEST_CASE("direct synthesis agrees with the inverse FFT") {
    std::mt19937_64 rng(9);
    const double h = 0.01;
    GridField chi(h, Space::Frequency, {AxisSpec{0.05, 0.1, 32}, AxisSpec{0, 0.2, 16}});
    std::uniform_real_distribution<double> U;
    for (auto& z : chi.data) z = U(rng) < 0.5 ? 1.0 : 0.0;
    auto u = semiclassical_ft(chi, Direction::Inverse);
    std::vector<std::vector<double>> targets;
    std::vector<cplx> ref;
    for (std::size_t off = 0; off < u.size(); off += 7) {
        targets.push_back(u.coords(off));
        ref.push_back(u.data[off]);
    }
    CHECK(max_diff(direct_synthesis(chi, targets), ref) < 1e-6);
    CHECK_THROWS(direct_synthesis(chi, {}));
}

TEST_CASE("multiplier hD on a Gaussian") {
    // hD e^{-x^2/2} = i h x e^{-x^2/2}
    const double h = 0.1;
    auto f = gaussian(h, 0, 512, 12);
    auto g = apply_multiplier(f, symbol_fn(PolySymbol::parse("x1", 1)));
    double err = 0;
    for (long i = 0; i < 512; ++i) {
        double x = f.axes[0].node(i);
        err = std::max(err, std::abs(g.data[i] - cplx(0, h * x) * f.data[i]));
    }
    CHECK(err < 1e-9);
}

TEST_CASE("binary and CSV serialisation") {
    std::mt19937_64 rng(1);
    auto f = random_field(rng, 0.125, {AxisSpec{0, 1, 4}, AxisSpec{2, 3, 2}});
    std::stringstream ss;
    write_binary(f, ss);
    auto g = read_binary(ss);
    CHECK(g.h == f.h);
    CHECK(g.axes.size() == 2);
    CHECK(g.axes[1].center == 2);
    CHECK(g.data == f.data);
    std::stringstream bad("XXXX");
    CHECK_THROWS(read_binary(bad));
    std::stringstream csv;
    write_csv(f, csv);
    const std::string text = csv.str();
    CHECK(std::count(text.begin(), text.end(), '\n') >= 8);
    CHECK_THROWS(semiclassical_ft(GridField(1, Space::Position, {AxisSpec{0, 1, 12}}), Direction::Forward));
}
