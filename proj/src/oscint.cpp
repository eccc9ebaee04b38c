#include "qmlab/oscint.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <numbers>

namespace qmlab {

namespace {

void check_box(const OscIntegrand& I) {
    if (I.d < 1 || static_cast<int>(I.lo.size()) != I.d || static_cast<int>(I.hi.size()) != I.d)
        throw std::invalid_argument("oscint: box does not match the dimension");
    for (int k = 0; k < I.d; ++k)
        if (!(I.hi[k] > I.lo[k])) throw std::invalid_argument("oscint: empty box");
    if (!I.phase) throw std::invalid_argument("oscint: missing phase");
    if (!I.phase_parts.empty() && static_cast<int>(I.phase_parts.size()) != I.d)
        throw std::invalid_argument("oscint: phase_parts must have one entry per axis");
}

std::vector<double> gradient(const OscIntegrand& I, const std::vector<double>& x, double step) {
    std::vector<double> g(I.d), p = x;
    for (int k = 0; k < I.d; ++k) {
        p[k] = x[k] + step;
        double fp = I.phase(p.data());
        p[k] = x[k] - step;
        double fm = I.phase(p.data());
        p[k] = x[k];
        g[k] = (fp - fm) / (2 * step);
    }
    return g;
}

std::vector<std::vector<double>> hessian(const OscIntegrand& I, const std::vector<double>& x, double step) {
    std::vector<std::vector<double>> H(I.d, std::vector<double>(I.d));
    for (int k = 0; k < I.d; ++k) {
        std::vector<double> p = x, m = x;
        p[k] += step;
        m[k] -= step;
        auto gp = gradient(I, p, step), gm = gradient(I, m, step);
        for (int l = 0; l < I.d; ++l) H[k][l] = (gp[l] - gm[l]) / (2 * step);
    }
    for (int k = 0; k < I.d; ++k)
        for (int l = 0; l < k; ++l) H[k][l] = H[l][k] = 0.5 * (H[k][l] + H[l][k]);
    return H;
}

// determinant and solution of H y = g by Gaussian elimination with partial pivoting
double solve(std::vector<std::vector<double>> H, std::vector<double>& g) {
    const int n = static_cast<int>(g.size());
    double det = 1;
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(H[r][c]) > std::abs(H[piv][c])) piv = r;
        if (H[piv][c] == 0) return 0;
        if (piv != c) {
            std::swap(H[piv], H[c]);
            std::swap(g[piv], g[c]);
            det = -det;
        }
        det *= H[c][c];
        for (int r = c + 1; r < n; ++r) {
            double f = H[r][c] / H[c][c];
            for (int q = c; q < n; ++q) H[r][q] -= f * H[c][q];
            g[r] -= f * g[c];
        }
    }
    for (int c = n - 1; c >= 0; --c) {
        for (int q = c + 1; q < n; ++q) g[c] -= H[c][q] * g[q];
        g[c] /= H[c][c];
    }
    return det;
}

double norm2(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double box_width(const OscIntegrand& I) {
    double w = 0;
    for (int k = 0; k < I.d; ++k) w = std::max(w, I.hi[k] - I.lo[k]);
    return w;
}

}  // namespace

double max_phase_gradient(const OscIntegrand& I, int lattice) {
    check_box(I);
    const double step = 1e-6 * std::max(1.0, box_width(I));
    std::size_t total = 1;
    for (int k = 0; k < I.d; ++k) total *= lattice;
    double G = 0;
    std::vector<double> x(I.d);
    for (std::size_t t = 0; t < total; ++t) {
        std::size_t rem = t;
        for (int k = 0; k < I.d; ++k) {
            x[k] = I.lo[k] + (I.hi[k] - I.lo[k]) * double(rem % lattice) / (lattice - 1);
            rem /= lattice;
        }
        G = std::max(G, norm2(gradient(I, x, step)));
    }
    return G;
}

OscResult evaluate(const OscIntegrand& I, double h, const EvalOptions& opt) {
    check_box(I);
    if (!(h > 0)) throw std::invalid_argument("oscint: h must be positive");
    OscResult res;
    res.max_gradient = max_phase_gradient(I);
    const double width = box_width(I);
    long N;
    if (opt.points > 0) {
        N = opt.points + (opt.points % 2);
    } else if (res.max_gradient == 0) {
        N = 64;
    } else {
        const double dx = 2 * std::numbers::pi * h / (opt.points_per_wavelength * res.max_gradient);
        N = std::max(16L, static_cast<long>(std::ceil(width / dx)));
        N += N % 2;
    }
    res.points = N;
    res.points_per_wavelength = res.max_gradient == 0
                                    ? std::numeric_limits<double>::infinity()
                                    : 2 * std::numbers::pi * h / (res.max_gradient * width / N);
    if (res.points_per_wavelength < opt.min_points_per_wavelength)
        throw ResolutionError("oscint", "quadrature resolves only " + std::to_string(res.points_per_wavelength) +
                                            " points per wavelength");
    if (std::pow(double(N + 1), I.d) > opt.max_nodes)
        throw ResolutionError("oscint", "quadrature grid exceeds the node budget");

    const int d = I.d;
    std::vector<double> dx(d);
    for (int k = 0; k < d; ++k) dx[k] = (I.hi[k] - I.lo[k]) / N;
    auto node = [&](int k, long i) { return I.lo[k] + i * dx[k]; };
    auto tw = [&](long i) { return (i == 0 || i == N) ? 0.5 : 1.0; };
    const bool separable = !I.phase_parts.empty();
    std::vector<std::vector<cplx>> E;
    if (separable) {
        E.resize(d);
        for (int k = 0; k < d; ++k) {
            E[k].resize(N + 1);
            for (long i = 0; i <= N; ++i) E[k][i] = std::polar(1.0, I.phase_parts[k](node(k, i)) / h);
        }
    }
    // rows along axis 0; the remaining axes are flattened
    std::size_t inner = 1;
    for (int k = 1; k < d; ++k) inner *= static_cast<std::size_t>(N + 1);
    std::vector<cplx> fine_rows(N + 1), coarse_rows(N + 1);
    parallel_for(static_cast<std::size_t>(N + 1), [&](std::size_t i0) {
        std::vector<double> x(d);
        std::vector<long> idx(d);
        std::vector<cplx> fine(inner), coarse;
        coarse.reserve(inner / 2 + 1);
        x[0] = node(0, static_cast<long>(i0));
        idx[0] = static_cast<long>(i0);
        for (std::size_t t = 0; t < inner; ++t) {
            std::size_t rem = t;
            double w = 1, wc = 1;
            bool even = idx[0] % 2 == 0;
            for (int k = d - 1; k >= 1; --k) {
                idx[k] = static_cast<long>(rem % (N + 1));
                rem /= (N + 1);
                x[k] = node(k, idx[k]);
            }
            for (int k = 0; k < d; ++k) {
                w *= tw(idx[k]);
                wc *= tw(idx[k]);
                even = even && idx[k] % 2 == 0;
            }
            cplx e;
            if (separable) {
                e = E[0][idx[0]];
                for (int k = 1; k < d; ++k) e *= E[k][idx[k]];
            } else {
                e = std::polar(1.0, I.phase(x.data()) / h);
            }
            cplx v = I.amplitude ? e * I.amplitude(x.data()) : cplx(0, 0);
            fine[t] = w * v;
            if (even) coarse.push_back(wc * v);
        }
        fine_rows[i0] = pairwise_sum(fine);
        coarse_rows[i0] = pairwise_sum(coarse);
    });
    double cell = 1;
    for (double s : dx) cell *= s;
    const cplx fine = pairwise_sum(fine_rows) * cell;
    const cplx coarse = pairwise_sum(coarse_rows) * cell * std::pow(2.0, d);
    res.value = fine;
    res.error_estimate = std::abs(fine - coarse) / 3;
    return res;
}

std::vector<CriticalPoint> critical_points(const OscIntegrand& I) {
    check_box(I);
    const int d = I.d;
    const double width = box_width(I);
    const double step = 1e-4 * width;
    std::vector<std::vector<double>> starts;
    std::vector<double> centre(d);
    for (int k = 0; k < d; ++k) centre[k] = 0.5 * (I.lo[k] + I.hi[k]);
    starts.push_back(centre);
    std::size_t total = 1;
    for (int k = 0; k < d; ++k) total *= 3;
    for (std::size_t t = 0; t < total; ++t) {
        std::vector<double> x(d);
        std::size_t rem = t;
        for (int k = 0; k < d; ++k) {
            x[k] = I.lo[k] + (I.hi[k] - I.lo[k]) * (0.2 + 0.3 * double(rem % 3));
            rem /= 3;
        }
        starts.push_back(x);
    }
    const double gscale = 1 + max_phase_gradient(I, 9);
    std::vector<CriticalPoint> found;
    for (auto x : starts) {
        bool ok = false;
        for (int it = 0; it < 100; ++it) {
            auto g = gradient(I, x, step);
            double gn = norm2(g);
            if (gn <= 1e-9 * gscale) {
                ok = true;
                break;
            }
            auto H = hessian(I, x, step);
            auto dir = g;
            if (solve(H, dir) == 0) break;
            double t = 1;
            bool moved = false;
            for (int ls = 0; ls < 30; ++ls, t *= 0.5) {
                std::vector<double> y(d);
                for (int k = 0; k < d; ++k) y[k] = x[k] - t * dir[k];
                if (norm2(gradient(I, y, step)) < gn) {
                    x = y;
                    moved = true;
                    break;
                }
            }
            if (!moved) break;
        }
        if (!ok) continue;
        bool inside = true;
        for (int k = 0; k < d; ++k)
            inside = inside && x[k] >= I.lo[k] - 1e-9 * width && x[k] <= I.hi[k] + 1e-9 * width;
        if (!inside) continue;
        bool dup = false;
        for (const auto& c : found) {
            std::vector<double> diff(d);
            for (int k = 0; k < d; ++k) diff[k] = c.xi[k] - x[k];
            dup = dup || norm2(diff) <= 1e-6 * width;
        }
        if (dup) continue;
        std::vector<double> dummy(d, 0.0);
        found.push_back({x, solve(hessian(I, x, step), dummy)});
    }
    return found;
}

VdcReport vdc_check(const OscFamily& family, const std::vector<std::vector<double>>& xs, const std::vector<double>& hs,
                    double mu, double tolerance, const EvalOptions& opt) {
    if (hs.size() < 6) throw std::invalid_argument("vdc_check: need at least 6 h values");
    if (xs.empty()) throw std::invalid_argument("vdc_check: empty parameter set");
    if (!(mu > 0)) throw std::invalid_argument("vdc_check: mu must be positive");
    VdcReport rep;
    rep.mu = mu;
    rep.d = family(hs.front(), xs.front()).d;
    for (const auto& x : xs) {
        auto cps = critical_points(family(hs.front(), x));
        if (cps.size() != 1) {
            rep.refused = true;
            rep.reason = cps.empty() ? "no critical point in the domain" : "several critical points in the domain";
            break;
        }
        if (std::abs(cps[0].hessian_det) < 0.5 * std::pow(mu, rep.d)) {
            rep.refused = true;
            rep.reason = "Hessian determinant below mu^d/2";
            break;
        }
    }
    std::vector<double> lh, lv;
    bool admissible = true;
    for (double h : hs) {
        VdcRow row;
        row.h = h;
        for (const auto& x : xs) {
            auto I = family(h, x);
            auto r = evaluate(I, h, opt);
            if (std::abs(r.value) >= row.value) {
                row.value = std::abs(r.value);
                row.error_estimate = r.error_estimate;
            }
            if (I.loss_rate && I.loss_rate(h) > std::sqrt(mu / h) * (1 + 1e-12)) row.admissible = false;
        }
        row.bound = std::pow(h / mu, 0.5 * rep.d);
        row.ratio = row.value / row.bound;
        rep.max_ratio = std::max(rep.max_ratio, row.ratio);
        admissible = admissible && row.admissible;
        if (row.value > 0) {
            lh.push_back(std::log(h));
            lv.push_back(std::log(row.value));
        }
        rep.rows.push_back(row);
    }
    if (lh.size() >= 2) {
        auto fit = fit_line(lh, lv);
        rep.exponent = fit.slope;
        rep.exponent_stderr = fit.slope_stderr;
    }
    rep.pass = !rep.refused && admissible && rep.exponent >= 0.5 * rep.d - tolerance;
    return rep;
}

OscIntegrand quadratic_integrand(int d, double mu, const std::vector<double>& xc, const std::vector<double>& lo,
                                 const std::vector<double>& hi, std::function<cplx(const double*)> amplitude) {
    if (static_cast<int>(xc.size()) != d) throw std::invalid_argument("quadratic_integrand: centre dimension");
    OscIntegrand I;
    I.d = d;
    I.lo = lo;
    I.hi = hi;
    I.phase = [d, mu, xc](const double* x) {
        double s = 0;
        for (int k = 0; k < d; ++k) s += (x[k] - xc[k]) * (x[k] - xc[k]);
        return 0.5 * mu * s;
    };
    for (int k = 0; k < d; ++k) {
        double c = xc[k];
        I.phase_parts.push_back([mu, c](double t) { return 0.5 * mu * (t - c) * (t - c); });
    }
    I.amplitude = std::move(amplitude);
    return I;
}

namespace {

// a1 as a sum of univariate polynomials, if possible
bool split_univariate(const PolySymbol& a, std::vector<std::vector<double>>& parts) {
    parts.assign(a.dim(), {});
    for (const auto& [alpha, c] : a.coeffs()) {
        int var = -1, deg = 0;
        for (int k = 0; k < a.dim(); ++k)
            if (alpha[k] > 0) {
                if (var >= 0) return false;
                var = k;
                deg = alpha[k];
            }
        if (var < 0) var = 0;
        auto& p = parts[var];
        if (static_cast<int>(p.size()) <= deg) p.resize(deg + 1, 0.0);
        p[deg] += to_double(c);
    }
    return true;
}

double horner(const std::vector<double>& c, double t) {
    double s = 0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * t + *it;
    return s;
}

}  // namespace

KernelValue ttstar_kernel(const PolySymbol& a1, const MotherWavelet& w, double a, int j, int k, double h, double x1,
                          double z1, const std::vector<double>& xbar, const std::vector<double>& zbar,
                          const EvalOptions& opt) {
    const int m = a1.dim();
    if (static_cast<int>(xbar.size()) != m || static_cast<int>(zbar.size()) != m)
        throw std::invalid_argument("ttstar_kernel: transverse dimension mismatch");
    if (!(a > 0)) throw std::invalid_argument("ttstar_kernel: scale must be positive");
    KernelValue out;
    const double s = w.half_width() * a;
    const double lo = std::max(x1, z1) - s, hi = std::min(x1, z1) + s;
    if (!(hi > lo)) return out;  // disjoint wavelet supports
    {
        const int panels = 64;
        const double pw = (hi - lo) / panels;
        auto g = [&](double b) { return w((x1 - b) / a) * w((z1 - b) / a); };
        for (int p = 0; p < panels; ++p)
            out.B += boost::math::quadrature::gauss<double, 20>::integrate(g, lo + p * pw, lo + (p + 1) * pw);
    }
    const auto cuts = dyadic_cutoffs(h, k);
    if (j > cuts.J) throw std::invalid_argument("ttstar_kernel: j exceeds J");
    const double R = 1.5 * std::ldexp(cuts.base, j);
    const double dx1 = x1 - z1;
    std::vector<double> dbar(m);
    for (int q = 0; q < m; ++q) dbar[q] = xbar[q] - zbar[q];
    CompiledPoly A(a1);
    OscIntegrand I;
    I.d = m;
    I.lo.assign(m, -R);
    I.hi.assign(m, R);
    I.phase = [A, dbar, dx1, m](const double* xi) {
        double s2 = dx1 * A(xi);
        for (int q = 0; q < m; ++q) s2 += dbar[q] * xi[q];
        return s2;
    };
    std::vector<std::vector<double>> parts;
    if (split_univariate(a1, parts)) {
        for (int q = 0; q < m; ++q) {
            auto c = parts[q];
            double lin = dbar[q];
            I.phase_parts.push_back([c, lin, dx1](double t) { return dx1 * horner(c, t) + lin * t; });
        }
    }
    I.amplitude = [cuts, j, m](const double* xi) {
        double r2 = 0;
        for (int q = 0; q < m; ++q) r2 += xi[q] * xi[q];
        return cplx(cuts(j, std::sqrt(r2)), 0);
    };
    auto r = evaluate(I, h, opt);
    out.I = r.value;
    out.error_estimate = r.error_estimate;
    out.K = std::pow(2 * std::numbers::pi * h, -double(m)) * out.B * out.I;
    return out;
}

double ttstar_bound(int n, int k, int j, double h, double a, double dx1) {
    const double m = n - 1;
    if (std::abs(dx1) >= std::pow(h, 1 - 2.0 / (k + 1)) * std::ldexp(1.0, -2 * j))
        return a * std::pow(h, -m / 2) * std::pow(std::abs(dx1), -m / 2);
    return a * std::pow(h, -m * (1 - 1.0 / (k + 1))) * std::ldexp(1.0, j * (n - 1));
}

}  // namespace qmlab
