#pragma once

#include "qmlab/common.hpp"
#include "qmlab/symbols.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qmlab {

// Lebesgue exponent p in [1, inf], stored as 1/p so that p = inf is exact.
struct PExp {
    Rational inv;  // 1/p

    static PExp inf() { return PExp{Rational(0)}; }
    static PExp of(const Rational& p);
    static PExp parse(const std::string& s);  // "inf" or a rational
    bool infinite() const { return inv == 0; }
    double value() const;  // +inf for infinite
    std::string to_string() const;
};

enum class Family { Sogge, Submanifold, Transverse, Contact };

struct ExponentQuery {
    Family family = Family::Contact;
    int n = 2;
    PExp p = PExp::inf();
    int extra = 1;  // d, r or k depending on the family
};

Family parse_family(const std::string& s);
std::string family_name(Family f);

Rational exponent(const ExponentQuery& q);
Rational sogge_exponent(int n, const PExp& p);
Rational contact_exponent(int n, const PExp& p, int k);
Rational submanifold_exponent(int n, int d, const PExp& p);
Rational transverse_exponent(int n, int r, const PExp& p);

struct LpResult {
    double norm = 0;
    double tail_fraction = 0;
};

// Weighted L^p norm. shell marks the outermost layer of the target set; its
// share of the p-th power mass is the tail estimate. For p = inf the tail is the
// amount by which the shell maximum exceeds the interior maximum.
// Throws ResolutionError when the tail exceeds max_tail.
LpResult lp_norm(const std::vector<double>& absval, const std::vector<double>& weights, const PExp& p,
                 const std::vector<char>& shell = {}, double max_tail = 0.01);

struct ScalingReport {
    std::vector<double> h, norm;
    double slope = 0, slope_stderr = 0, intercept = 0;
    double predicted = 0, tolerance = 0;
    bool pass = false;
};

ScalingReport fit_scaling(const std::vector<double>& h, const std::vector<double>& norm, double predicted,
                          double tolerance);

}  // namespace qmlab
