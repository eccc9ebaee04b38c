#include "qmlab/analysis.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace qmlab;

namespace {

Rational delta(int n, const std::string& p, int k) { return contact_exponent(n, PExp::parse(p), k); }

}  // namespace

TEST_CASE("contact exponent at hand-evaluated points") {
    // (n, p, k) -> value worked out by hand from the piecewise formula
    struct Row {
        int n;
        const char* p;
        int k;
        Rational v;
    };
    const std::vector<Row> rows = {
        {2, "2", 1, 0},
        {2, "4", 3, Rational(1, 8)},
        {2, "6", 1, Rational(1, 6)},
        {2, "6", 5, Rational(1, 6)},
        {2, "8", 1, Rational(3, 16)},
        {2, "8", 3, Rational(7, 32)},
        {2, "12", 1, Rational(5, 24)},
        {2, "inf", 1, Rational(1, 4)},
        {2, "inf", 3, Rational(3, 8)},
        {2, "inf", 5, Rational(5, 12)},
        {3, "3", 1, Rational(1, 6)},
        {3, "4", 3, Rational(1, 4)},
        {3, "8", 1, Rational(3, 8)},
        {3, "8", 3, Rational(1, 2)},
        {3, "inf", 1, Rational(1, 2)},
        {3, "inf", 3, Rational(3, 4)},
        {4, "inf", 1, Rational(3, 4)},
        {4, "10/3", 5, Rational(3, 10)},
    };
    for (const auto& r : rows) {
        INFO("n=" << r.n << " p=" << r.p << " k=" << r.k);
        CHECK(delta(r.n, r.p, r.k) == r.v);
    }
}

TEST_CASE("other exponent families") {
    CHECK(sogge_exponent(3, PExp::inf()) == 1);
    CHECK(sogge_exponent(2, PExp::parse("6")) == Rational(1, 6));
    CHECK(transverse_exponent(3, 1, PExp::inf()) == 1);
    CHECK(transverse_exponent(3, 3, PExp::parse("7")) == 0);
    for (int n = 2; n <= 6; ++n)
        for (int i = 0; i <= 20; ++i) {
            PExp p{Rational(i, 40)};
            CHECK(transverse_exponent(n, 1, p) == sogge_exponent(n, p));
            CHECK(contact_exponent(n, p, 1) <= sogge_exponent(n, p));
        }
    CHECK(submanifold_exponent(3, 1, PExp::inf()) == 1);
    CHECK_THROWS(exponent({Family::Contact, 2, PExp::parse("3/2"), 1}));
    CHECK_THROWS(exponent({Family::Submanifold, 3, PExp::inf(), 3}));
    CHECK_THROWS(PExp::parse("1/2"));
    CHECK(PExp::parse("8").to_string() == "8");
    CHECK(PExp::inf().to_string() == "inf");
}

TEST_CASE("contact exponent: continuity at p0 and the Sogge relationship") {
    for (int n = 2; n <= 8; ++n) {
        const Rational q0(n - 1, 2 * (n + 1));
        for (int k = 1; k <= 99; k += 2) {
            // both branches at the kink
            const Rational high = Rational(n - 1, 2) - n * q0 - Rational(1, k + 1) * (Rational(n - 1, 2) - (n + 1) * q0);
            const Rational low = Rational(n - 1, 4) - Rational(n - 1, 2) * q0;
            CHECK(high == low);
            CHECK(contact_exponent(n, PExp{q0}, k) == low);
            for (int i = 0; i <= 30; ++i) {
                PExp p{Rational(i, 60)};
                const Rational d = contact_exponent(n, p, k), s = sogge_exponent(n, p);
                CHECK(d <= s);
                if (p.inv >= q0) CHECK(d == s);
                else CHECK(s - d <= Rational(1, k + 1) * Rational(n - 1, 2));
            }
        }
    }
}

TEST_CASE("lp_norm") {
    // indicator of a unit box sampled by 1000 cells
    std::vector<double> v(1000, 1.0), w(1000, 1e-3);
    for (const char* p : {"2", "4", "7/2", "inf"}) CHECK(lp_norm(v, w, PExp::parse(p)).norm == doctest::Approx(1));
    std::vector<double> g(201), wg(201, 0.05);
    for (int i = 0; i < 201; ++i) g[i] = std::exp(-std::pow((i - 100) * 0.05, 2));
    std::vector<char> shell(201, 0);
    shell[0] = shell[200] = 1;
    auto r = lp_norm(g, wg, PExp::parse("2"), shell);
    CHECK(r.norm == doctest::Approx(std::pow(std::numbers::pi / 2, 0.25)).epsilon(1e-6));
    CHECK(r.tail_fraction < 1e-10);
    // a flat profile puts 20/201 of its mass in a 10-point shell
    std::vector<double> flat(201, 1.0);
    std::vector<char> wide(201, 0);
    for (int i = 0; i < 10; ++i) wide[i] = wide[200 - i] = 1;
    CHECK_THROWS_AS(lp_norm(flat, wg, PExp::parse("2"), wide), ResolutionError);
    CHECK(lp_norm(flat, wg, PExp::parse("2"), shell).tail_fraction == doctest::Approx(2.0 / 201));
    CHECK_THROWS_AS(lp_norm(v, std::vector<double>(1000, 0.0), PExp::parse("2")), std::invalid_argument);
}

TEST_CASE("fit_scaling recovers exact power laws") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> U(-2, 2);
    for (int t = 0; t < 20; ++t) {
        const double beta = U(rng), c = std::exp(U(rng));
        std::vector<double> h, y;
        for (int L = 4; L <= 10; ++L) {
            h.push_back(std::exp2(-L));
            y.push_back(c * std::pow(h.back(), -beta));
        }
        auto s = fit_scaling(h, y, -beta, 0.1);
        CHECK(std::abs(s.slope + beta) < 1e-10);
        CHECK(s.pass);
    }
    CHECK_THROWS(fit_scaling({0.5, 0.25, 0.125, 0.0625}, {1, 2, 3, 4}, 0, 0.1));
}
