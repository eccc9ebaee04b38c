#include "qmlab/wavelets.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace qmlab;

namespace {

const MotherWavelet& wavelet() {
    static const MotherWavelet w = make_mother_wavelet(2.5);
    return w;
}

// f^(eta) by the trapezoid rule on the support, independent of bump_fourier
cplx direct_fourier(const MotherWavelet& w, double eta, int n = 8000) {
    const double s = w.half_width(), dt = 2 * s / n;
    cplx acc = 0;
    for (int i = 1; i < n; ++i) {
        const double t = -s + i * dt;
        acc += w(t) * std::polar(1.0, -eta * t);
    }
    return acc * dt;
}

GridField line_field(double lo, double hi, long n, const std::function<double(double)>& g) {
    GridField f(1, Space::Position, {AxisSpec{0.5 * (lo + hi), 0.5 * (hi - lo), n}});
    for (long i = 0; i < n; ++i) f.data[i] = g(f.axes[0].node(i));
    return f;
}

}  // namespace

TEST_CASE("mother wavelet constants") {
    const auto& w = wavelet();
    for (double eta : {0.0, 0.3, 1.0, 2.7, 8.0})
        CHECK(std::abs(w.fourier(eta) - direct_fourier(w, eta)) < 1e-9);
    // ||f||^2 by quadrature
    double n2 = 0;
    const int n = 20000;
    for (int i = 1; i < n; ++i) n2 += std::pow(w(-2.5 + 5.0 * i / n), 2) * 5.0 / n;
    CHECK(w.norm2 == doctest::Approx(n2).epsilon(1e-8));
    // C_f = 2 int_0^inf |f^|^2 / eta, Simpson in log eta with the direct transform
    const int m = 1200;
    const double lo = std::log(1e-4), hi = std::log(40.0), du = (hi - lo) / m;
    double cf = 0;
    for (int i = 0; i <= m; ++i) {
        const double eta = std::exp(lo + i * du);
        const double wgt = (i == 0 || i == m) ? 1 : (i % 2 ? 4 : 2);
        cf += wgt * std::norm(direct_fourier(w, eta, 2000));
    }
    cf *= 2 * du / 3;
    CHECK(w.admissibility == doctest::Approx(cf).epsilon(1e-5));
    CHECK(w.tail_bound < 1e-4 * w.admissibility);
}

TEST_CASE("cwt: autocorrelation, mean zero, support and linearity") {
    const auto& w = wavelet();
    auto v = line_field(-4, 4, 4096, [&](double x) { return w(x); });
    auto X = cwt(v, w, {1.0}, {{0.0}});
    CHECK(std::abs(X.at(0, 0) - w.norm2) < 1e-6);

    auto c = line_field(-200, 200, 1 << 17, [](double) { return 1.0; });
    auto Xc = cwt(c, w, {0.25, 0.5, 1.0}, {{-3.0, 0.0, 5.0}});
    for (std::size_t ia = 0; ia < 3; ++ia)
        for (std::size_t ib = 0; ib < 3; ++ib) CHECK(std::abs(Xc.at(ia, ib)) <= 1e-8 * std::sqrt(400.0));

    auto g = line_field(-1, 1, 1024, [](double x) { return bump(x); });
    const double a = 0.5, gap = 1 + w.half_width() * a;
    auto Xz = cwt(g, w, {a}, {{gap + 1e-9, gap + 0.5, -gap - 0.25, -gap - 3}});
    for (std::size_t ib = 0; ib < 4; ++ib) CHECK(Xz.at(0, ib) == cplx(0, 0));

    std::mt19937_64 rng(3);
    std::normal_distribution<double> N;
    auto p = line_field(-2, 2, 1024, [&](double) { return N(rng); });
    auto q = line_field(-2, 2, 1024, [&](double) { return N(rng); });
    GridField s = p;
    for (std::size_t i = 0; i < s.size(); ++i) s.data[i] = 2.0 * p.data[i] - 0.5 * q.data[i];
    std::vector<double> as{0.125, 1.0};
    auto bs = covering_b_grids(w, as, -2, 2);
    auto Xs = cwt(s, w, as, bs), Xp = cwt(p, w, as, bs), Xq = cwt(q, w, as, bs);
    for (std::size_t ia = 0; ia < 2; ++ia)
        for (std::size_t ib = 0; ib < Xs.b[ia].size(); ++ib)
            CHECK(std::abs(Xs.at(ia, ib) - (2.0 * Xp.at(ia, ib) - 0.5 * Xq.at(ia, ib))) < 1e-11);

    CHECK_THROWS(cwt(p, w, {0.0}, {{0.0}}));
    CHECK_THROWS_AS(cwt(p, w, {1e-4}, {{0.0}}), ResolutionError);
}

TEST_CASE("inverse transform reconstructs a compactly supported signal") {
    const auto& w = wavelet();
    // the bump spectrum decays slowly, so the scales span 18 octaves
    auto sig = [](double x) { return bump(x) * std::cos(6 * x); };
    auto v = line_field(-1, 1, 16384, [&](double x) { return sig(x); });
    std::vector<double> as;
    for (int i = 0; i <= 144; ++i) as.push_back(std::exp2(-10 + 18.0 * i / 144));
    auto X = cwt(v, w, as, covering_b_grids(w, as, -1, 1));
    std::vector<double> xs;
    for (int i = 0; i < 400; ++i) xs.push_back(-1 + (i + 0.5) / 200);
    auto rec = icwt(X, w, xs);
    double num = 0, den = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        num += std::norm(rec[i] - sig(xs[i]));
        den += std::norm(sig(xs[i]));
    }
    CHECK(std::sqrt(num / den) < 1e-3);
}

TEST_CASE("dyadic cutoffs") {
    auto c = dyadic_cutoffs(std::exp2(-8), 3);
    CHECK(c.J == 2);
    CHECK(c.base == doctest::Approx(0.25));
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> U(0, 1);
    for (int i = 0; i < 1000; ++i) {
        const double r = U(rng);
        double s = 0;
        for (int j = 0; j <= c.J; ++j) s += c(j, r);
        CHECK(std::abs(s - 1) < 1e-10);
    }
    auto big = dyadic_cutoffs(std::exp2(-40), 3);
    for (int i = 0; i < 2000; ++i) {
        const double r = U(rng);
        for (int j = 1; j <= big.J; ++j)
            for (int jj = j + 2; jj <= big.J; ++jj) CHECK(big(j, r) * big(jj, r) == 0.0);
    }
    CHECK(dyadic_psi(0.5) == 0.0);
    CHECK(dyadic_psi(1.5) == 0.0);
    CHECK(dyadic_psi(1.0) == 1.0);
    CHECK(default_scale_grid().size() == 25);
}
