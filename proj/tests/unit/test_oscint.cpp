#include "qmlab/oscint.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace qmlab;

namespace {

OscIntegrand bump_quadratic(int d, double mu, double R) {
    auto I = quadratic_integrand(d, mu, std::vector<double>(d, 0.0), std::vector<double>(d, -R),
                                 std::vector<double>(d, R), [d, R](const double* x) {
                                     double r2 = 0;
                                     for (int k = 0; k < d; ++k) r2 += x[k] * x[k];
                                     return cplx(bump(std::sqrt(r2) / R), 0);
                                 });
    I.loss_rate = [](double) { return 1.0; };
    return I;
}

}  // namespace

TEST_CASE("zero amplitude") {
    auto I = bump_quadratic(1, 1, 1);
    I.amplitude = [](const double*) { return cplx(0, 0); };
    CHECK(evaluate(I, 1.0 / 64).value == cplx(0, 0));
}

TEST_CASE("Fresnel closed form") {
    // |I| -> (2 pi h / mu)^{d/2} |a(0)|
    for (int d : {1, 2}) {
        const double mu = 1.5;
        auto I = bump_quadratic(d, mu, 1);
        for (int L : {8, 9, 10}) {
            if (d == 2 && L > 8) break;
            const double h = std::exp2(-L);
            const double oracle = std::pow(2 * std::numbers::pi * h / mu, d / 2.0) * bump(0);
            auto r = evaluate(I, h);
            CHECK(std::abs(std::abs(r.value) - oracle) / oracle < 0.05);
            CHECK(r.points_per_wavelength >= 10);
        }
    }
}

TEST_CASE("linear phase decays faster than h^3") {
    OscIntegrand I;
    I.d = 1;
    I.lo = {-1};
    I.hi = {1};
    I.phase = [](const double* x) { return x[0]; };
    I.phase_parts = {[](double t) { return t; }};
    I.amplitude = [](const double* x) { return cplx(bump(x[0]), 0); };
    std::vector<double> lh, lv;
    for (int L = 2; L <= 6; ++L) {
        const double h = std::exp2(-L);
        lh.push_back(std::log(h));
        lv.push_back(std::log(std::abs(evaluate(I, h).value)));
    }
    CHECK(fit_line(lh, lv).slope >= 3);
}

TEST_CASE("linearity in the amplitude and conjugation symmetry") {
    auto I = bump_quadratic(1, 1, 1);
    auto J = I;
    J.amplitude = [](const double* x) { return cplx(std::cos(3 * x[0]) * bump(x[0]), 0); };
    auto S = I;
    S.amplitude = [&](const double* x) { return 2.0 * I.amplitude(x) - cplx(0, 1) * J.amplitude(x); };
    const double h = 1.0 / 128;
    auto a = evaluate(I, h).value, b = evaluate(J, h).value, s = evaluate(S, h).value;
    CHECK(std::abs(s - (2.0 * a - cplx(0, 1) * b)) < 1e-12);
    auto C = I;
    C.phase = [f = I.phase](const double* x) { return -f(x); };
    C.phase_parts = {[f = I.phase_parts[0]](double t) { return -f(t); }};
    CHECK(std::abs(evaluate(C, h).value - std::conj(a)) < 1e-14);
}

TEST_CASE("resolution refusal") {
    auto I = bump_quadratic(1, 1, 1);
    EvalOptions opt;
    opt.points = 64;
    CHECK_THROWS_AS(evaluate(I, 1.0 / 1024, opt), ResolutionError);
}

TEST_CASE("critical points and the van der Corput verdict") {
    auto I = quadratic_integrand(2, 2.0, {0.1, -0.2}, {-1, -1}, {1, 1}, [](const double*) { return cplx(1, 0); });
    auto cps = critical_points(I);
    REQUIRE(cps.size() == 1);
    CHECK(cps[0].xi[0] == doctest::Approx(0.1));
    CHECK(cps[0].xi[1] == doctest::Approx(-0.2));
    CHECK(cps[0].hessian_det == doctest::Approx(4.0).epsilon(1e-4));

    std::vector<double> hs;
    for (int L = 5; L <= 10; ++L) hs.push_back(std::exp2(-L));
    auto fam = [](double, const std::vector<double>&) { return bump_quadratic(1, 1, 1); };
    auto rep = vdc_check(fam, {{0.0}}, hs, 1.0);
    CHECK(rep.pass);
    CHECK(rep.exponent == doctest::Approx(0.5).epsilon(0.02));

    // two critical points: the verdict is withheld
    auto two = [](double, const std::vector<double>&) {
        OscIntegrand J;
        J.d = 1;
        J.lo = {-1};
        J.hi = {1};
        J.phase = [](const double* x) { return x[0] * x[0] * x[0] / 3 - 0.25 * x[0]; };
        J.amplitude = [](const double* x) { return cplx(bump(x[0]), 0); };
        J.loss_rate = [](double) { return 1.0; };
        return J;
    };
    auto rep2 = vdc_check(two, {{0.0}}, hs, 1.0);
    CHECK(rep2.refused);
    CHECK_FALSE(rep2.pass);
    CHECK_THROWS(vdc_check(fam, {{0.0}}, {0.5, 0.25, 0.125}, 1.0));
}

TEST_CASE("TT* kernel vanishes beyond the wavelet overlap") {
    const auto w = make_mother_wavelet(2.5);
    const auto a1 = PolySymbol::parse("x1^2", 1);
    const double a = 0.125, gap = 2 * w.half_width() * a;
    for (double s : {gap * 1.0000001, 1.5 * gap, 3 * gap, 10 * gap}) {
        auto K = ttstar_kernel(a1, w, a, 0, 3, std::exp2(-8), s, 0, {0.0}, {0.0});
        CHECK(K.K == cplx(0, 0));
    }
    auto K = ttstar_kernel(a1, w, a, 0, 3, std::exp2(-8), 0.5 * gap, 0, {0.0}, {0.0});
    CHECK(std::abs(K.K) > 0);
    CHECK(ttstar_bound(2, 3, 0, std::exp2(-8), a, 0.125) == doctest::Approx(a * std::pow(2.0, 4) / std::sqrt(0.125)));
}
