#include "qmlab/symbols.hpp"

#include <doctest.h>

#include <random>

using namespace qmlab;

namespace {

PolySymbol random_poly(std::mt19937_64& rng, int dim, int terms, int max_deg) {
    std::uniform_int_distribution<int> deg(0, max_deg), coef(-9, 9);
    PolySymbol p(dim);
    for (int t = 0; t < terms; ++t) {
        MultiIndex a(dim);
        for (auto& x : a) x = deg(rng);
        p.add_term(a, Rational(coef(rng), 1 + std::abs(coef(rng))));
    }
    return p;
}

std::vector<Rational> random_point(std::mt19937_64& rng, int dim) {
    std::uniform_int_distribution<int> num(-20, 20), den(1, 7);
    std::vector<Rational> x(dim);
    for (auto& v : x) v = Rational(num(rng), den(rng));
    return x;
}

}  // namespace

TEST_CASE("parse, print and evaluate") {
    auto p = PolySymbol::parse("x1 - (x2^2 + 3/2*x3) * x2", 3);
    CHECK(p.eval(std::vector<Rational>{2, 3, 4}) == Rational(2) - Rational(45));
    CHECK(PolySymbol::parse(p.to_string(), 3) == p);
    CHECK(p.degree() == 3);
    CHECK_THROWS_AS(PolySymbol::parse("x4", 3), std::invalid_argument);
    CHECK_THROWS_AS(PolySymbol::parse("x1 +", 3), std::invalid_argument);
    CHECK_THROWS_AS(PolySymbol::parse("x1^-1", 3), std::invalid_argument);
}

TEST_CASE("ring operations agree with pointwise evaluation") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        auto p = random_poly(rng, 3, 5, 3), q = random_poly(rng, 3, 4, 3);
        auto x = random_point(rng, 3);
        CHECK((p + q).eval(x) == p.eval(x) + q.eval(x));
        CHECK((p * q).eval(x) == p.eval(x) * q.eval(x));
        CHECK(p.pow(3).eval(x) == p.eval(x) * p.eval(x) * p.eval(x));
        CHECK((p - p).is_zero());
        // compose with the identity substitution
        std::vector<PolySymbol> id;
        for (int i = 0; i < 3; ++i) id.push_back(PolySymbol::variable(3, i));
        CHECK(p.compose(id) == p);
    }
}

TEST_CASE("differentiation is linear and matches a difference quotient sign-free check") {
    std::mt19937_64 rng(5);
    auto p = random_poly(rng, 2, 6, 4), q = random_poly(rng, 2, 6, 4);
    MultiIndex d{1, 0};
    CHECK((p + q).differentiate(d) == p.differentiate(d) + q.differentiate(d));
    // product rule
    CHECK((p * q).differentiate(d) == p.differentiate(d) * q + p * q.differentiate(d));
    auto c = CompiledPoly(p);
    double x[2] = {0.3, -0.7};
    CHECK(c(x) == doctest::Approx(p.eval(std::vector<double>{0.3, -0.7})).epsilon(1e-14));
}

TEST_CASE("line restriction matches evaluation along the line") {
    std::mt19937_64 rng(3);
    auto p = random_poly(rng, 2, 6, 4);
    std::vector<Rational> v{Rational(2, 3), Rational(-5, 2)};
    auto coeffs = restrict_to_line(p, v);
    for (int t = -3; t <= 3; ++t) {
        Rational s = 0, tp = 1;
        for (const auto& c : coeffs) {
            s += c * tp;
            tp *= t;
        }
        CHECK(s == p.eval(std::vector<Rational>{v[0] * t, v[1] * t}));
    }
}

TEST_CASE("graph factor") {
    auto g = graph_factor(PolySymbol::parse("2*x1 - x2^2 - 4*x3^4", 3));
    REQUIRE(g.valid);
    CHECK(g.a == PolySymbol::parse("1/2*x1^2 + 2*x2^4", 2));
    CHECK_FALSE(graph_factor(PolySymbol::parse("x1^2 - x2", 2)).valid);
    CHECK_FALSE(graph_factor(PolySymbol::parse("x1*x2", 2)).valid);
    CHECK(graph_symbol(g.a, 2) == PolySymbol::parse("2*x1 - x2^2 - 4*x3^4", 3));
}

TEST_CASE("contact order along lines") {
    auto a1 = PolySymbol(2);
    auto a2 = PolySymbol::parse("x1^2 + x2^6", 2);
    // first nonvanishing derivative of order m means contact of order m - 1
    CHECK(*contact_order(a1, a2, {1, 3}, 12).order == 1);
    CHECK(*contact_order(a1, a2, {0, 1}, 12).order == 5);
    auto flat = contact_order(a2, a2, {1, 1}, 12);
    CHECK_FALSE(flat.order.has_value());
    auto even = contact_order(a1, PolySymbol::parse("x1^3", 2), {1, 0}, 12);
    CHECK(*even.order == 2);
    CHECK(even.outside_hypotheses);
    // curve along the parabola xi_2 = xi_3^2 sees the hidden order of the kappa pair
    auto d = PolySymbol::parse("(x1 - x2^2)^2 + x1^10", 2);
    auto c = contact_order_curve(PolySymbol(2), d, {{0, 0, 1}, {0, 1}}, 30);
    CHECK(*c.order == 19);
}

TEST_CASE("uniform contact profile of the large-p pairs") {
    for (int n : {2, 3})
        for (int k : {1, 3, 5}) {
            auto a1 = PolySymbol(n - 1), a2 = PolySymbol(n - 1);
            PolySymbol r2(n - 1);
            for (int j = 0; j < n - 1; ++j) r2 = r2 + PolySymbol::variable(n - 1, j).pow(2);
            a1 = r2;
            a2 = r2 - r2.pow((k + 1) / 2);
            auto prof = contact_profile(a1, a2, sample_directions(n - 1, 64), 12);
            CHECK(prof.uniform);
            CHECK(*prof.common_order == k);
            CHECK(vanishing_check(a1, a2, k).holds);
            auto bad = vanishing_check(a1, a2, k + 1);
            CHECK_FALSE(bad.holds);
            CHECK_FALSE(bad.offending.empty());
        }
}

TEST_CASE("sampled directions") {
    auto d2 = sample_directions(2, 64);
    CHECK(d2.size() >= 64);
    auto d1 = sample_directions(1, 64);
    CHECK(d1.size() >= 1);
    for (const auto& v : sample_directions(3, 64)) {
        bool nz = false;
        for (const auto& x : v) nz = nz || x != 0;
        CHECK(nz);
    }
}

TEST_CASE("curvature, determinant and ellipticity") {
    auto c = curvature_check(PolySymbol::parse("x1^2 + x2^2", 2));
    CHECK(c.nondegenerate);
    CHECK(c.determinant == 4);
    CHECK_FALSE(curvature_check(PolySymbol::parse("x1^2 + x2^4", 2)).nondegenerate);
    std::vector<std::vector<Rational>> m{{2, 1, 0}, {1, 3, 1}, {0, 1, 4}};
    CHECK(determinant(m) == Rational(2 * 11 - 1 * 4));
    auto e = ellipticity_constant(PolySymbol::parse("(x1^2 + x2^2)^2 + x1^4", 2), 3, 1.0);
    CHECK(e.c_est == doctest::Approx(1.0).epsilon(1e-3));
    CHECK_FALSE(e.outside_hypotheses);
}

TEST_CASE("rational helpers") {
    CHECK(parse_rational("3/4") == Rational(3, 4));
    CHECK(parse_rational("0.125") == Rational(1, 8));
    CHECK(to_double(Rational(1, 3)) == doctest::Approx(1.0 / 3));
    CHECK(to_rational(0.375) == Rational(3, 8));
}
