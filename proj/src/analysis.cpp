#include "qmlab/analysis.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace qmlab {

PExp PExp::of(const Rational& p) {
    if (p < 1) throw std::invalid_argument("p must be >= 1");
    return PExp{Rational(1) / p};
}

PExp PExp::parse(const std::string& s) {
    if (s == "inf" || s == "Inf" || s == "infinity" || s == "oo") return inf();
    return of(parse_rational(s));
}

double PExp::value() const {
    return infinite() ? std::numeric_limits<double>::infinity() : 1.0 / to_double(inv);
}

std::string PExp::to_string() const {
    if (infinite()) return "inf";
    Rational p = Rational(1) / inv;
    std::ostringstream os;
    os << p;
    return os.str();
}

Family parse_family(const std::string& s) {
    if (s == "sogge" || s == "SOGGE") return Family::Sogge;
    if (s == "submanifold" || s == "SUBMANIFOLD") return Family::Submanifold;
    if (s == "transverse" || s == "TRANSVERSE") return Family::Transverse;
    if (s == "contact" || s == "CONTACT") return Family::Contact;
    throw std::invalid_argument("unknown exponent family '" + s + "'");
}

std::string family_name(Family f) {
    switch (f) {
        case Family::Sogge: return "sogge";
        case Family::Submanifold: return "submanifold";
        case Family::Transverse: return "transverse";
        case Family::Contact: return "contact";
    }
    return "?";
}

namespace {

void check_np(int n, const PExp& p) {
    if (n < 2) throw std::invalid_argument("exponent: n must be >= 2");
    if (p.inv < 0 || p.inv > Rational(1, 2)) throw std::invalid_argument("exponent: p must lie in [2, inf]");
}

}  // namespace

// Branch choice compares 1/p against 1/p0; at the kink both branches agree.
Rational sogge_exponent(int n, const PExp& p) {
    check_np(n, p);
    const Rational q = p.inv;
    const Rational q0 = Rational(n - 1, 2 * (n + 1));
    if (q >= q0) return Rational(n - 1, 4) - Rational(n - 1, 2) * q;
    return Rational(n - 1, 2) - n * q;
}

Rational contact_exponent(int n, const PExp& p, int k) {
    check_np(n, p);
    if (k < 1) throw std::invalid_argument("exponent: k must be >= 1");
    const Rational q = p.inv;
    const Rational q0 = Rational(n - 1, 2 * (n + 1));
    if (q >= q0) return Rational(n - 1, 4) - Rational(n - 1, 2) * q;
    return Rational(n - 1, 2) - n * q - Rational(1, k + 1) * (Rational(n - 1, 2) - (n + 1) * q);
}

Rational submanifold_exponent(int n, int d, const PExp& p) {
    check_np(n, p);
    if (d < 1 || d > n - 1) throw std::invalid_argument("exponent: need 1 <= d <= n-1");
    const Rational q = p.inv;
    const Rational high = Rational(n - 1, 2) - d * q;
    if (d <= n - 2) return high;  // d = n-2, p = 2 taken as the limit p -> 2
    const Rational q0 = Rational(n - 1, 2 * n);
    if (q <= q0) return high;
    return Rational(n - 1, 4) - Rational(d - 1, 2) * q;
}

Rational transverse_exponent(int n, int r, const PExp& p) {
    check_np(n, p);
    if (r < 1 || r > n) throw std::invalid_argument("exponent: need 1 <= r <= n");
    const int m = n - r;
    const Rational q = p.inv;
    if (m == 0) return 0;
    const Rational q0 = Rational(m, 2 * (m + 2));
    if (q >= q0) return Rational(m, 4) - Rational(m, 2) * q;
    return Rational(m, 2) - (m + 1) * q;
}

Rational exponent(const ExponentQuery& q) {
    switch (q.family) {
        case Family::Sogge: return sogge_exponent(q.n, q.p);
        case Family::Submanifold: return submanifold_exponent(q.n, q.extra, q.p);
        case Family::Transverse: return transverse_exponent(q.n, q.extra, q.p);
        case Family::Contact: return contact_exponent(q.n, q.p, q.extra);
    }
    throw std::invalid_argument("exponent: unknown family");
}

LpResult lp_norm(const std::vector<double>& absval, const std::vector<double>& weights, const PExp& p,
                 const std::vector<char>& shell, double max_tail) {
    const std::size_t n = absval.size();
    if (n == 0) throw std::invalid_argument("lp_norm: empty target set");
    if (weights.size() != n) throw std::invalid_argument("lp_norm: weight count mismatch");
    if (!shell.empty() && shell.size() != n) throw std::invalid_argument("lp_norm: shell mask size mismatch");
    for (double w : weights)
        if (!(w > 0)) throw std::invalid_argument("lp_norm: weights must be positive");
    if (!p.infinite() && p.inv > 1) throw std::invalid_argument("lp_norm: p must be >= 1");
    LpResult r;
    if (p.infinite()) {
        double inner = 0, outer = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!shell.empty() && shell[i])
                outer = std::max(outer, absval[i]);
            else
                inner = std::max(inner, absval[i]);
        }
        r.norm = std::max(inner, outer);
        r.tail_fraction = r.norm > 0 ? std::max(0.0, outer - inner) / r.norm : 0.0;
    } else {
        const double pv = p.value();
        std::vector<double> mass(n), shell_mass;
        for (std::size_t i = 0; i < n; ++i) {
            mass[i] = weights[i] * std::pow(absval[i], pv);
            if (!shell.empty() && shell[i]) shell_mass.push_back(mass[i]);
        }
        double total = pairwise_sum(mass);
        r.norm = std::pow(total, 1.0 / pv);
        r.tail_fraction = total > 0 ? pairwise_sum(shell_mass) / total : 0.0;
    }
    if (r.tail_fraction > max_tail)
        throw ResolutionError("analysis", "tail estimate " + std::to_string(r.tail_fraction) +
                                              " exceeds the allowed fraction; enlarge the target box");
    return r;
}

ScalingReport fit_scaling(const std::vector<double>& h, const std::vector<double>& norm, double predicted,
                          double tolerance) {
    if (h.size() < 5) throw std::invalid_argument("fit_scaling: need at least 5 h values");
    if (norm.size() != h.size()) throw std::invalid_argument("fit_scaling: size mismatch");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (!(norm[i] > 0) || !(h[i] > 0)) throw std::invalid_argument("fit_scaling: values must be positive");
        lx.push_back(std::log(h[i]));
        ly.push_back(std::log(norm[i]));
    }
    LineFit f = fit_line(lx, ly);
    ScalingReport r;
    r.h = h;
    r.norm = norm;
    r.slope = f.slope;
    r.slope_stderr = f.slope_stderr;
    r.intercept = f.intercept;
    r.predicted = predicted;
    r.tolerance = tolerance;
    r.pass = std::abs(f.slope - predicted) <= tolerance;
    return r;
}

}  // namespace qmlab
