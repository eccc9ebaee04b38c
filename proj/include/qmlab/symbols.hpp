#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qmlab {

using Rational = boost::multiprecision::cpp_rational;
using MultiIndex = std::vector<int>;

// Multivariate polynomial with exact rational coefficients.
// Zero coefficients are never stored.
class PolySymbol {
public:
    PolySymbol() = default;
    explicit PolySymbol(int dim);

    static PolySymbol constant(int dim, const Rational& c);
    static PolySymbol variable(int dim, int i);  // 0-based
    static PolySymbol monomial(const MultiIndex& alpha, const Rational& c);
    static PolySymbol parse(const std::string& text, int dim);

    int dim() const { return dim_; }
    const std::map<MultiIndex, Rational>& coeffs() const { return coeffs_; }
    bool is_zero() const { return coeffs_.empty(); }
    int degree() const;
    Rational coeff(const MultiIndex& alpha) const;
    void add_term(const MultiIndex& alpha, const Rational& c);

    PolySymbol operator+(const PolySymbol& o) const;
    PolySymbol operator-(const PolySymbol& o) const;
    PolySymbol operator-() const;
    PolySymbol operator*(const PolySymbol& o) const;
    PolySymbol operator*(const Rational& c) const;
    PolySymbol pow(int e) const;
    bool operator==(const PolySymbol& o) const { return dim_ == o.dim_ && coeffs_ == o.coeffs_; }

    Rational eval(const std::vector<Rational>& xi) const;
    double eval(const std::vector<double>& xi) const;
    double eval(const double* xi) const;

    PolySymbol differentiate(const MultiIndex& alpha) const;

    // p(q_0, ..., q_{dim-1}) for polynomials q_i sharing one target dimension.
    PolySymbol compose(const std::vector<PolySymbol>& subs) const;

    std::string to_string() const;

private:
    int dim_ = 0;
    std::map<MultiIndex, Rational> coeffs_;
};

// Floating-point snapshot of a PolySymbol for hot loops.
class CompiledPoly {
public:
    CompiledPoly() = default;
    explicit CompiledPoly(const PolySymbol& p);
    double operator()(const double* xi) const;
    int dim() const { return dim_; }

private:
    int dim_ = 0;
    std::vector<double> coef_;
    std::vector<int> exps_;  // dim_ entries per term
};

// Coefficients of a univariate polynomial, lowest degree first.
std::vector<Rational> restrict_to_line(const PolySymbol& p, const std::vector<Rational>& v);
std::vector<Rational> restrict_to_curve(const PolySymbol& p, const std::vector<std::vector<Rational>>& curve);

struct GraphForm {
    PolySymbol a;  // in the n-1 variables xi_bar
    bool valid = false;
    std::string note;
};

// p = c*xi_1 + r(xi_bar), c a nonzero constant  ->  a = -r/c.
GraphForm graph_factor(const PolySymbol& p);
// c*xi_1 - c*a(xi_bar) embedded in dim+1 variables.
PolySymbol graph_symbol(const PolySymbol& a, const Rational& c = 1);

struct ContactReport {
    std::vector<Rational> direction;
    std::vector<double> unit_direction;
    std::optional<int> order;  // nullopt means INFINITE
    Rational leading_coefficient;  // along the supplied direction vector
    double unit_leading_coefficient = 0.0;  // rescaled to |v| = 1
    int leading_sign = 0;
    bool outside_hypotheses = false;  // even order
};

ContactReport contact_order(const PolySymbol& a1, const PolySymbol& a2, const std::vector<Rational>& v,
                            int max_order);
// Polynomial curves t -> (c_2(t), ..., c_n(t)) through the origin; curve[i] holds coefficients of c_i.
ContactReport contact_order_curve(const PolySymbol& a1, const PolySymbol& a2,
                                  const std::vector<std::vector<Rational>>& curve, int max_order);

struct ContactProfile {
    std::vector<ContactReport> reports;
    bool uniform = false;
    std::optional<int> common_order;
};

ContactProfile contact_profile(const PolySymbol& a1, const PolySymbol& a2,
                               const std::vector<std::vector<Rational>>& directions, int max_order);

// Fibonacci (2 variables) or product-of-angles directions, all axes and all +-1 diagonals.
// Float directions are rounded to dyadic rationals with the given number of bits.
std::vector<std::vector<Rational>> sample_directions(int dim, int min_count = 64, int bits = 24);

struct VanishingResult {
    bool holds = false;
    std::vector<MultiIndex> offending;
};
VanishingResult vanishing_check(const PolySymbol& a1, const PolySymbol& a2, int k);

struct CurvatureResult {
    bool nondegenerate = false;
    Rational determinant;
    std::vector<std::vector<Rational>> hessian;
};
CurvatureResult curvature_check(const PolySymbol& a);
Rational determinant(std::vector<std::vector<Rational>> m);

struct EllipticityResult {
    double c_est = 0.0;
    std::vector<double> witness;
    bool outside_hypotheses = false;  // even k
};
// Minimum of q / |xi|^{k+1} over a polar sample of the punctured ball.
EllipticityResult ellipticity_constant(const PolySymbol& q, int k, double radius, int radial = 200,
                                       int angular = 720);

Rational to_rational(double x, int bits = 24);
Rational parse_rational(const std::string& s);
double to_double(const Rational& r);

}  // namespace qmlab
