#include "qmlab/symbols.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace qmlab {

namespace {

void check_dim(int a, int b, const char* what) {
    if (a != b) throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

int total(const MultiIndex& a) {
    int s = 0;
    for (int x : a) s += x;
    return s;
}

}  // namespace

PolySymbol::PolySymbol(int dim) : dim_(dim) {
    if (dim < 1) throw std::invalid_argument("PolySymbol: dim must be >= 1");
}

PolySymbol PolySymbol::constant(int dim, const Rational& c) {
    PolySymbol p(dim);
    p.add_term(MultiIndex(dim, 0), c);
    return p;
}

PolySymbol PolySymbol::variable(int dim, int i) {
    if (i < 0 || i >= dim) throw std::invalid_argument("PolySymbol::variable: index out of range");
    MultiIndex a(dim, 0);
    a[i] = 1;
    return monomial(a, 1);
}

PolySymbol PolySymbol::monomial(const MultiIndex& alpha, const Rational& c) {
    PolySymbol p(static_cast<int>(alpha.size()));
    for (int x : alpha)
        if (x < 0) throw std::invalid_argument("PolySymbol::monomial: negative exponent");
    p.add_term(alpha, c);
    return p;
}

int PolySymbol::degree() const {
    int d = -1;
    for (const auto& [a, c] : coeffs_) d = std::max(d, total(a));
    return d;
}

Rational PolySymbol::coeff(const MultiIndex& alpha) const {
    check_dim(static_cast<int>(alpha.size()), dim_, "coeff");
    auto it = coeffs_.find(alpha);
    return it == coeffs_.end() ? Rational(0) : it->second;
}

void PolySymbol::add_term(const MultiIndex& alpha, const Rational& c) {
    check_dim(static_cast<int>(alpha.size()), dim_, "add_term");
    if (c == 0) return;
    auto [it, inserted] = coeffs_.try_emplace(alpha, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) coeffs_.erase(it);
    }
}

PolySymbol PolySymbol::operator+(const PolySymbol& o) const {
    check_dim(dim_, o.dim_, "add");
    PolySymbol r = *this;
    for (const auto& [a, c] : o.coeffs_) r.add_term(a, c);
    return r;
}

PolySymbol PolySymbol::operator-(const PolySymbol& o) const { return *this + (-o); }

PolySymbol PolySymbol::operator-() const {
    PolySymbol r = *this;
    for (auto& [a, c] : r.coeffs_) c = -c;
    return r;
}

PolySymbol PolySymbol::operator*(const PolySymbol& o) const {
    check_dim(dim_, o.dim_, "multiply");
    PolySymbol r(dim_);
    MultiIndex s(dim_);
    for (const auto& [a, c] : coeffs_)
        for (const auto& [b, d] : o.coeffs_) {
            for (int i = 0; i < dim_; ++i) s[i] = a[i] + b[i];
            r.add_term(s, c * d);
        }
    return r;
}

PolySymbol PolySymbol::operator*(const Rational& c) const {
    PolySymbol r(dim_);
    if (c == 0) return r;
    r.coeffs_ = coeffs_;
    for (auto& [a, v] : r.coeffs_) v *= c;
    return r;
}

PolySymbol PolySymbol::pow(int e) const {
    if (e < 0) throw std::invalid_argument("PolySymbol::pow: negative exponent");
    PolySymbol result = constant(dim_, 1), base = *this;
    while (e > 0) {
        if (e & 1) result = result * base;
        e >>= 1;
        if (e) base = base * base;
    }
    return result;
}

Rational PolySymbol::eval(const std::vector<Rational>& xi) const {
    check_dim(static_cast<int>(xi.size()), dim_, "eval");
    Rational s = 0;
    for (const auto& [a, c] : coeffs_) {
        Rational t = c;
        for (int i = 0; i < dim_; ++i)
            for (int e = 0; e < a[i]; ++e) t *= xi[i];
        s += t;
    }
    return s;
}

double PolySymbol::eval(const std::vector<double>& xi) const {
    check_dim(static_cast<int>(xi.size()), dim_, "eval");
    return eval(xi.data());
}

double PolySymbol::eval(const double* xi) const { return CompiledPoly(*this)(xi); }

CompiledPoly::CompiledPoly(const PolySymbol& p) : dim_(p.dim()) {
    for (const auto& [a, c] : p.coeffs()) {
        coef_.push_back(to_double(c));
        exps_.insert(exps_.end(), a.begin(), a.end());
    }
}

double CompiledPoly::operator()(const double* xi) const {
    double s = 0.0;
    const int* e = exps_.data();
    for (double c : coef_) {
        double t = c;
        for (int i = 0; i < dim_; ++i, ++e) {
            double b = xi[i], r = 1.0;
            for (int k = *e; k; k >>= 1) {
                if (k & 1) r *= b;
                b *= b;
            }
            t *= r;
        }
        s += t;
    }
    return s;
}

PolySymbol PolySymbol::differentiate(const MultiIndex& alpha) const {
    check_dim(static_cast<int>(alpha.size()), dim_, "differentiate");
    PolySymbol r(dim_);
    for (const auto& [a, c] : coeffs_) {
        MultiIndex b = a;
        Rational f = c;
        bool zero = false;
        for (int i = 0; i < dim_ && !zero; ++i) {
            if (alpha[i] > a[i]) {
                zero = true;
                break;
            }
            for (int e = 0; e < alpha[i]; ++e) f *= (a[i] - e);
            b[i] = a[i] - alpha[i];
        }
        if (!zero) r.add_term(b, f);
    }
    return r;
}

PolySymbol PolySymbol::compose(const std::vector<PolySymbol>& subs) const {
    check_dim(static_cast<int>(subs.size()), dim_, "compose");
    if (subs.empty()) throw std::invalid_argument("compose: empty substitution");
    const int m = subs[0].dim();
    for (const auto& s : subs) check_dim(s.dim(), m, "compose");
    std::vector<std::vector<PolySymbol>> powers(dim_);
    PolySymbol r(m);
    for (const auto& [a, c] : coeffs_) {
        PolySymbol t = constant(m, c);
        for (int i = 0; i < dim_; ++i) {
            auto& pw = powers[i];
            if (pw.empty()) pw.push_back(constant(m, 1));
            while (static_cast<int>(pw.size()) <= a[i]) pw.push_back(pw.back() * subs[i]);
            if (a[i]) t = t * pw[a[i]];
        }
        r = r + t;
    }
    return r;
}

std::string PolySymbol::to_string() const {
    if (coeffs_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [a, c] : coeffs_) {
        Rational mag = c < 0 ? Rational(-c) : c;
        if (first) {
            if (c < 0) os << "-";
        } else {
            os << (c < 0 ? " - " : " + ");
        }
        first = false;
        bool constant_term = total(a) == 0;
        bool wrote = false;
        if (mag != 1 || constant_term) {
            os << mag;
            wrote = true;
        }
        for (int i = 0; i < dim_; ++i) {
            if (!a[i]) continue;
            if (wrote) os << "*";
            os << "x" << (i + 1);
            if (a[i] > 1) os << "^" << a[i];
            wrote = true;
        }
    }
    return os.str();
}

// ---- parsing ----

namespace {

class Parser {
public:
    Parser(const std::string& s, int dim) : s_(s), dim_(dim) {}

    PolySymbol run() {
        PolySymbol p = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected character");
        return p;
    }

private:
    const std::string& s_;
    int dim_;
    size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw std::invalid_argument("symbol parse error at column " + std::to_string(pos_ + 1) + ": " + what +
                                    " in '" + s_ + "'");
    }
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    PolySymbol expr() {
        PolySymbol p = term();
        for (;;) {
            if (eat('+'))
                p = p + term();
            else if (eat('-'))
                p = p - term();
            else
                return p;
        }
    }

    PolySymbol term() {
        PolySymbol p = unary();
        for (;;) {
            if (eat('*')) {
                p = p * unary();
            } else if (eat('/')) {
                PolySymbol d = unary();
                if (d.degree() > 0 || d.is_zero()) fail("division by a non-constant or zero");
                p = p * (Rational(1) / d.coeff(MultiIndex(dim_, 0)));
            } else {
                return p;
            }
        }
    }

    PolySymbol unary() {
        if (eat('-')) return -unary();
        if (eat('+')) return unary();
        return power();
    }

    PolySymbol power() {
        PolySymbol base = primary();
        if (eat('^')) {
            skip();
            size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            if (start == pos_) fail("expected a non-negative integer exponent");
            base = base.pow(std::stoi(s_.substr(start, pos_ - start)));
        }
        return base;
    }

    PolySymbol primary() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            PolySymbol p = expr();
            if (!eat(')')) fail("expected ')'");
            return p;
        }
        if (c == 'x') {
            ++pos_;
            size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            if (start == pos_) fail("expected variable index after 'x'");
            int i = std::stoi(s_.substr(start, pos_ - start));
            if (i < 1 || i > dim_) fail("variable x" + std::to_string(i) + " outside x1..x" + std::to_string(dim_));
            return PolySymbol::variable(dim_, i - 1);
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            size_t start = pos_;
            while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
            return PolySymbol::constant(dim_, parse_rational(s_.substr(start, pos_ - start)));
        }
        fail(std::string("unexpected '") + c + "'");
    }
};

}  // namespace

PolySymbol PolySymbol::parse(const std::string& text, int dim) { return Parser(text, dim).run(); }

Rational parse_rational(const std::string& s) {
    auto slash = s.find('/');
    if (slash != std::string::npos) return parse_rational(s.substr(0, slash)) / parse_rational(s.substr(slash + 1));
    auto dot = s.find('.');
    if (dot == std::string::npos) {
        if (s.empty()) throw std::invalid_argument("empty number");
        return Rational(boost::multiprecision::cpp_int(s));
    }
    std::string ip = s.substr(0, dot), fp = s.substr(dot + 1);
    if (fp.find('.') != std::string::npos) throw std::invalid_argument("malformed number '" + s + "'");
    boost::multiprecision::cpp_int num(ip.empty() ? std::string("0") : ip), den = 1;
    for (char ch : fp) {
        num = num * 10 + (ch - '0');
        den *= 10;
    }
    return Rational(num, den);
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

Rational to_rational(double x, int bits) {
    double scale = std::ldexp(1.0, bits);
    long long n = std::llround(x * scale);
    return Rational(boost::multiprecision::cpp_int(n), boost::multiprecision::cpp_int(1) << bits);
}

// ---- restriction to lines and curves ----

std::vector<Rational> restrict_to_line(const PolySymbol& p, const std::vector<Rational>& v) {
    check_dim(static_cast<int>(v.size()), p.dim(), "restrict_to_line");
    int deg = std::max(p.degree(), 0);
    std::vector<Rational> c(deg + 1, Rational(0));
    for (const auto& [a, coef] : p.coeffs()) {
        Rational t = coef;
        for (int i = 0; i < p.dim(); ++i)
            for (int e = 0; e < a[i]; ++e) t *= v[i];
        c[total(a)] += t;
    }
    return c;
}

std::vector<Rational> restrict_to_curve(const PolySymbol& p, const std::vector<std::vector<Rational>>& curve) {
    check_dim(static_cast<int>(curve.size()), p.dim(), "restrict_to_curve");
    std::vector<PolySymbol> subs;
    for (const auto& ci : curve) {
        PolySymbol q(1);
        for (size_t e = 0; e < ci.size(); ++e) q.add_term({static_cast<int>(e)}, ci[e]);
        subs.push_back(q);
    }
    PolySymbol u = p.compose(subs);
    std::vector<Rational> c(std::max(u.degree(), 0) + 1, Rational(0));
    for (const auto& [a, coef] : u.coeffs()) c[a[0]] = coef;
    return c;
}

// ---- graph factorization ----

GraphForm graph_factor(const PolySymbol& p) {
    GraphForm g;
    const int n = p.dim();
    if (n < 2) {
        g.note = "needs at least two variables";
        return g;
    }
    g.a = PolySymbol(n - 1);
    Rational c = 0;
    for (const auto& [a, coef] : p.coeffs()) {
        if (a[0] == 0) {
            g.a.add_term(MultiIndex(a.begin() + 1, a.end()), -coef);
        } else if (a[0] == 1 && total(a) == 1) {
            c = coef;
        } else {
            g.note = a[0] > 1 ? "not affine in xi_1" : "xi_1 coefficient depends on xi_bar";
            g.a = PolySymbol(n - 1);
            return g;
        }
    }
    if (c == 0) {
        g.note = "no xi_1 term";
        g.a = PolySymbol(n - 1);
        return g;
    }
    g.a = g.a * (Rational(1) / c);
    g.valid = true;
    return g;
}

PolySymbol graph_symbol(const PolySymbol& a, const Rational& c) {
    const int n = a.dim() + 1;
    PolySymbol p(n);
    MultiIndex e1(n, 0);
    e1[0] = 1;
    p.add_term(e1, c);
    for (const auto& [al, coef] : a.coeffs()) {
        MultiIndex b(n, 0);
        std::copy(al.begin(), al.end(), b.begin() + 1);
        p.add_term(b, -c * coef);
    }
    return p;
}

// ---- contact ----

namespace {

ContactReport contact_from_series(const std::vector<Rational>& c, int max_order) {
    ContactReport r;
    if (!c.empty() && c[0] != 0) throw std::invalid_argument("contact_order: the graphs do not meet at the origin");
    if (max_order < 1) throw std::invalid_argument("contact_order: max_order must be >= 1");
    for (int m = 1; m <= max_order + 1 && m < static_cast<int>(c.size()); ++m) {
        if (c[m] != 0) {
            r.order = m - 1;
            r.leading_coefficient = c[m];
            r.leading_sign = c[m] > 0 ? 1 : -1;
            r.outside_hypotheses = (m - 1) % 2 == 0;
            return r;
        }
    }
    return r;
}

}  // namespace

ContactReport contact_order(const PolySymbol& a1, const PolySymbol& a2, const std::vector<Rational>& v,
                            int max_order) {
    check_dim(a1.dim(), a2.dim(), "contact_order");
    check_dim(static_cast<int>(v.size()), a1.dim(), "contact_order");
    Rational norm2 = 0;
    for (const auto& x : v) norm2 += x * x;
    if (norm2 == 0) throw std::invalid_argument("contact_order: zero direction vector");
    ContactReport r = contact_from_series(restrict_to_line(a1 - a2, v), max_order);
    r.direction = v;
    double nrm = std::sqrt(to_double(norm2));
    for (const auto& x : v) r.unit_direction.push_back(to_double(x) / nrm);
    if (r.order) r.unit_leading_coefficient = to_double(r.leading_coefficient) / std::pow(nrm, *r.order + 1);
    return r;
}

ContactReport contact_order_curve(const PolySymbol& a1, const PolySymbol& a2,
                                  const std::vector<std::vector<Rational>>& curve, int max_order) {
    check_dim(a1.dim(), a2.dim(), "contact_order_curve");
    for (const auto& ci : curve)
        if (!ci.empty() && ci[0] != 0) throw std::invalid_argument("contact_order_curve: curve must pass through 0");
    ContactReport r = contact_from_series(restrict_to_curve(a1 - a2, curve), max_order);
    // tangent direction of the curve at t = 0
    double nrm = 0;
    for (const auto& ci : curve) {
        Rational d = ci.size() > 1 ? ci[1] : Rational(0);
        r.direction.push_back(d);
        nrm += to_double(d) * to_double(d);
    }
    if (nrm == 0) throw std::invalid_argument("contact_order_curve: curve has zero velocity at 0");
    nrm = std::sqrt(nrm);
    for (const auto& d : r.direction) r.unit_direction.push_back(to_double(d) / nrm);
    if (r.order) r.unit_leading_coefficient = to_double(r.leading_coefficient);
    return r;
}

ContactProfile contact_profile(const PolySymbol& a1, const PolySymbol& a2,
                               const std::vector<std::vector<Rational>>& directions, int max_order) {
    if (directions.empty()) throw std::invalid_argument("contact_profile: empty direction sample");
    ContactProfile prof;
    prof.uniform = true;
    for (const auto& v : directions) {
        prof.reports.push_back(contact_order(a1, a2, v, max_order));
        const auto& o = prof.reports.back().order;
        if (!o) continue;
        if (!prof.common_order)
            prof.common_order = o;
        else if (*prof.common_order != *o)
            prof.uniform = false;
    }
    if (!prof.uniform) prof.common_order.reset();
    return prof;
}

std::vector<std::vector<Rational>> sample_directions(int dim, int min_count, int bits) {
    std::vector<std::vector<Rational>> out;
    auto push_float = [&](const std::vector<double>& v) {
        std::vector<Rational> r;
        for (double x : v) r.push_back(to_rational(x, bits));
        bool nz = false;
        for (const auto& x : r) nz = nz || x != 0;
        if (nz) out.push_back(r);
    };
    if (dim == 1) {
        out.push_back({Rational(1)});
        out.push_back({Rational(-1)});
        return out;
    }
    // axes and diagonals are exact
    for (int i = 0; i < dim; ++i)
        for (int s : {1, -1}) {
            std::vector<Rational> v(dim, Rational(0));
            v[i] = s;
            out.push_back(v);
        }
    for (int mask = 0; mask < (1 << dim); ++mask) {
        std::vector<Rational> v(dim);
        for (int i = 0; i < dim; ++i) v[i] = (mask >> i) & 1 ? -1 : 1;
        out.push_back(v);
    }
    int m = std::max(min_count, 8);
    const double pi = std::numbers::pi;
    if (dim == 2) {
        for (int i = 0; i < m; ++i) {
            double th = 2 * pi * (i + 0.5) / m;
            push_float({std::cos(th), std::sin(th)});
        }
    } else if (dim == 3) {
        const double golden = pi * (3.0 - std::sqrt(5.0));
        for (int i = 0; i < m; ++i) {
            double z = 1.0 - 2.0 * (i + 0.5) / m;
            double r = std::sqrt(1.0 - z * z);
            push_float({r * std::cos(golden * i), r * std::sin(golden * i), z});
        }
    } else {
        // hyperspherical angles on a product grid
        int per = std::max(3, static_cast<int>(std::ceil(std::pow(m, 1.0 / (dim - 1)))));
        int count = 1;
        for (int i = 0; i < dim - 1; ++i) count *= per;
        for (int idx = 0; idx < count; ++idx) {
            std::vector<double> ang(dim - 1);
            int rem = idx;
            for (int i = 0; i < dim - 1; ++i) {
                int q = rem % per;
                rem /= per;
                double span = i == dim - 2 ? 2 * pi : pi;
                ang[i] = span * (q + 0.5) / per;
            }
            std::vector<double> v(dim);
            double s = 1.0;
            for (int i = 0; i < dim - 1; ++i) {
                v[i] = s * std::cos(ang[i]);
                s *= std::sin(ang[i]);
            }
            v[dim - 1] = s;
            push_float(v);
        }
    }
    return out;
}

VanishingResult vanishing_check(const PolySymbol& a1, const PolySymbol& a2, int k) {
    check_dim(a1.dim(), a2.dim(), "vanishing_check");
    VanishingResult r;
    const PolySymbol d = a1 - a2;
    for (const auto& [a, c] : d.coeffs())
        if (total(a) <= k) r.offending.push_back(a);
    r.holds = r.offending.empty();
    return r;
}

Rational determinant(std::vector<std::vector<Rational>> m) {
    const size_t n = m.size();
    Rational det = 1;
    for (size_t c = 0; c < n; ++c) {
        size_t piv = c;
        while (piv < n && m[piv][c] == 0) ++piv;
        if (piv == n) return 0;
        if (piv != c) {
            std::swap(m[piv], m[c]);
            det = -det;
        }
        det *= m[c][c];
        for (size_t r = c + 1; r < n; ++r) {
            if (m[r][c] == 0) continue;
            Rational f = m[r][c] / m[c][c];
            for (size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
        }
    }
    return det;
}

CurvatureResult curvature_check(const PolySymbol& a) {
    const int d = a.dim();
    CurvatureResult r;
    r.hessian.assign(d, std::vector<Rational>(d, Rational(0)));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            MultiIndex al(d, 0);
            al[i] += 1;
            al[j] += 1;
            r.hessian[i][j] = a.coeff(al) * (i == j ? 2 : 1);
        }
    r.determinant = determinant(r.hessian);
    r.nondegenerate = r.determinant != 0;
    return r;
}

EllipticityResult ellipticity_constant(const PolySymbol& q, int k, double radius, int radial, int angular) {
    if (radius <= 0) throw std::invalid_argument("ellipticity_constant: radius must be positive");
    if (q.eval(std::vector<double>(q.dim(), 0.0)) != 0.0)
        throw std::invalid_argument("ellipticity_constant: q(0) must vanish");
    const int d = q.dim();
    std::vector<std::vector<double>> dirs;
    if (d == 1) {
        dirs = {{1.0}, {-1.0}};
    } else if (d == 2) {
        for (int i = 0; i < angular; ++i) {
            double th = 2 * std::numbers::pi * i / angular;
            dirs.push_back({std::cos(th), std::sin(th)});
        }
    } else {
        for (const auto& v : sample_directions(d, angular)) {
            std::vector<double> u;
            double nrm = 0;
            for (const auto& x : v) {
                u.push_back(to_double(x));
                nrm += u.back() * u.back();
            }
            for (auto& x : u) x /= std::sqrt(nrm);
            dirs.push_back(u);
        }
    }
    EllipticityResult r;
    r.c_est = std::numeric_limits<double>::infinity();
    r.outside_hypotheses = k % 2 == 0;
    std::vector<double> pt(d);
    for (int i = 1; i <= radial; ++i) {
        double rad = radius * i / radial;
        double denom = std::pow(rad, k + 1);
        for (const auto& u : dirs) {
            for (int t = 0; t < d; ++t) pt[t] = rad * u[t];
            double val = q.eval(pt) / denom;
            if (val < r.c_est) {
                r.c_est = val;
                r.witness = pt;
            }
        }
    }
    return r;
}

}  // namespace qmlab
