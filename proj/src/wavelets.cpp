#include "qmlab/wavelets.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>

namespace qmlab {

namespace {

using boost::math::quadrature::gauss;
using boost::math::quadrature::gauss_kronrod;

// composite Gauss-Legendre on [lo, hi]
template <class F>
double composite(F f, double lo, double hi, int panels) {
    const double w = (hi - lo) / panels;
    double s = 0;
    for (int p = 0; p < panels; ++p) s += gauss<double, 20>::integrate(f, lo + p * w, lo + (p + 1) * w);
    return s;
}

double bump_second(double t) {
    if (std::abs(t) >= 1) return 0;
    const double q = 1 - t * t;
    const double g1 = -2 * t / (q * q);
    const double g2 = -2 / (q * q) - 8 * t * t / (q * q * q);
    return (g2 + g1 * g1) * bump(t);
}

// adaptive Gauss-Kronrod with an absolute tolerance, halved on each split
template <class F>
double adaptive(F f, double lo, double hi, double tol, int depth) {
    double err = 0;
    double v = gauss_kronrod<double, 31>::integrate(f, lo, hi, 0, 0, &err);
    if (depth == 0 || err <= tol) return v;
    const double mid = 0.5 * (lo + hi);
    return adaptive(f, lo, mid, 0.5 * tol, depth - 1) + adaptive(f, mid, hi, 0.5 * tol, depth - 1);
}

}  // namespace

double bump_fourier(double omega) {
    const int panels = std::max(4, static_cast<int>(std::ceil(std::abs(omega) / 10)));
    return 2 * composite([omega](double t) { return bump(t) * std::cos(omega * t); }, 0.0, 1.0, panels);
}

double MotherWavelet::operator()(double t) const { return bump_derivative(t / scale) / scale; }

cplx MotherWavelet::fourier(double eta) const { return cplx(0, eta * scale * bump_fourier(scale * eta)); }

MotherWavelet make_mother_wavelet(double scale) {
    if (!(scale > 0)) throw std::invalid_argument("mother wavelet scale must be positive");
    MotherWavelet w;
    w.scale = scale;
    const double lo = 1e-6, hi = 1e3;
    auto integrand = [&](double eta) { return std::norm(w.fourier(eta)) / eta; };
    // log-spaced panels, adaptive Gauss-Kronrod on each
    double cf = 0;
    const int panels = 90;
    for (int p = 0; p < panels; ++p) {
        double a = lo * std::pow(hi / lo, double(p) / panels), b = lo * std::pow(hi / lo, double(p + 1) / panels);
        cf += adaptive(integrand, a, b, 1e-15, 12);
    }
    w.admissibility = 2 * cf;
    // |f^(eta)| <= eta s B^(0) near 0 and |f^(eta)| <= ||f'||_1 / eta at infinity
    const double b0 = bump_fourier(0);
    const double df1 = composite([](double u) { return std::abs(bump_second(u)); }, -1.0, 1.0, 64) / scale;
    w.tail_bound = lo * lo * scale * scale * b0 * b0 + df1 * df1 / (hi * hi);
    w.norm2 = composite([](double u) { return bump_derivative(u) * bump_derivative(u); }, -1.0, 1.0, 64) / scale;
    return w;
}

WaveletCoefficients cwt(const GridField& v, const MotherWavelet& w, const std::vector<double>& a,
                        const std::vector<std::vector<double>>& b_grids) {
    v.validate();
    if (a.empty()) throw std::invalid_argument("cwt: empty scale grid");
    if (b_grids.size() != 1 && b_grids.size() != a.size())
        throw std::invalid_argument("cwt: need one translation grid or one per scale");
    const AxisSpec& ax = v.axes[0];
    const double dx = ax.spacing(), s = w.half_width();
    WaveletCoefficients X;
    X.a = a;
    X.slices = v.size() / ax.points;
    for (std::size_t ia = 0; ia < a.size(); ++ia) {
        if (a[ia] == 0) throw std::invalid_argument("cwt: scale a = 0");
        if (dx > s * std::abs(a[ia]) / 16)
            throw ResolutionError("wavelets", "x1 spacing does not resolve the wavelet at a = " + std::to_string(a[ia]));
        X.b.push_back(b_grids.size() == 1 ? b_grids[0] : b_grids[ia]);
    }
    X.values.resize(a.size());
    for (std::size_t ia = 0; ia < a.size(); ++ia) {
        const double sc = a[ia], width = s * std::abs(sc), norm = std::sqrt(std::abs(sc));
        const auto& bs = X.b[ia];
        auto& out = X.values[ia];
        out.assign(bs.size() * X.slices, cplx(0, 0));
        parallel_for(bs.size(), [&](std::size_t ib) {
            const double b = bs[ib];
            long i0 = static_cast<long>(std::ceil((b - width - ax.node(0)) / dx));
            long i1 = static_cast<long>(std::floor((b + width - ax.node(0)) / dx));
            i0 = std::max(i0, 0L);
            i1 = std::min(i1, ax.points - 1);
            std::vector<cplx> terms;
            for (std::size_t sl = 0; sl < X.slices; ++sl) {
                terms.clear();
                for (long i = i0; i <= i1; ++i) terms.push_back(w((ax.node(i) - b) / sc) * v.data[i * X.slices + sl]);
                out[ib * X.slices + sl] = pairwise_sum(terms) * dx / norm;
            }
        });
    }
    return X;
}

std::vector<std::vector<double>> covering_b_grids(const MotherWavelet& w, const std::vector<double>& a, double lo,
                                                  double hi, double per_scale) {
    std::vector<std::vector<double>> out;
    for (double sc : a) {
        const double step = std::abs(sc) / per_scale, r = w.half_width() * std::abs(sc);
        const long n = static_cast<long>(std::ceil((hi - lo + 2 * r) / step)) + 1;
        std::vector<double> b(n);
        for (long i = 0; i < n; ++i) b[i] = lo - r + i * step;
        out.push_back(std::move(b));
    }
    return out;
}

std::vector<cplx> icwt(const WaveletCoefficients& X, const MotherWavelet& w, const std::vector<double>& x) {
    if (X.slices != 1) throw std::invalid_argument("icwt: single-slice coefficients only");
    const std::size_t na = X.a.size();
    if (na < 2) throw std::invalid_argument("icwt: need at least two scales");
    std::vector<double> wl(na);
    for (std::size_t i = 0; i < na; ++i) {
        if (!(X.a[i] > 0) || (i > 0 && !(X.a[i] > X.a[i - 1])))
            throw std::invalid_argument("icwt: scales must be positive and increasing");
        double l = i > 0 ? std::log(X.a[i] / X.a[i - 1]) : 0.0;
        double r = i + 1 < na ? std::log(X.a[i + 1] / X.a[i]) : 0.0;
        wl[i] = 0.5 * (l + r);
    }
    std::vector<cplx> out(x.size());
    const double s = w.half_width();
    parallel_for(x.size(), [&](std::size_t t) {
        std::vector<cplx> per_scale(na);
        for (std::size_t ia = 0; ia < na; ++ia) {
            const double sc = X.a[ia];
            const auto& bs = X.b[ia];
            if (bs.size() < 2) continue;
            const double db = bs[1] - bs[0];
            std::vector<cplx> terms;
            for (std::size_t ib = 0; ib < bs.size(); ++ib) {
                double y = (x[t] - bs[ib]) / sc;
                if (std::abs(y) < s) terms.push_back(X.at(ia, ib) * w(y));
            }
            // da = a dlog(a)
            per_scale[ia] = pairwise_sum(terms) * db * std::pow(sc, -1.5) * wl[ia];
        }
        out[t] = pairwise_sum(per_scale) * (2 / w.admissibility);
    });
    return out;
}

double dyadic_rho(double t) { return smooth_step(t, 0.5, 0.75); }

double dyadic_psi(double t) {
    t = std::abs(t);
    return t <= 1 ? dyadic_rho(t) : 1 - dyadic_rho(t / 2);
}

double dyadic_psi0(double s) { return 1 - dyadic_rho(std::abs(s) / 2); }

double DyadicCutoffs::operator()(int j, double r) const {
    if (j < 0 || j > J) throw std::invalid_argument("dyadic cutoff index out of range");
    if (j == 0) return dyadic_psi0(r / base);
    return dyadic_psi(r / (std::ldexp(base, j)));
}

DyadicCutoffs dyadic_cutoffs(double h, int k) {
    if (!(h > 0) || h > 1) throw std::invalid_argument("dyadic_cutoffs: h must lie in (0, 1]");
    if (k < 1) throw std::invalid_argument("dyadic_cutoffs: k must be >= 1");
    DyadicCutoffs d;
    d.base = std::pow(h, 1.0 / (k + 1));
    d.J = static_cast<int>(std::ceil(std::log2(1 / d.base) - 1e-12));
    return d;
}

std::vector<double> default_scale_grid() {
    std::vector<double> a;
    for (int i = 0; i <= 24; ++i) a.push_back(std::ldexp(1.0, -6) * std::pow(2.0, i * 0.5));
    return a;
}

WaveletEnergyTable wavelet_energy_diagnostic(const CutoffGrid& chi, const MotherWavelet& w, int k, int M,
                                const std::vector<double>& a_grid) {
    if (a_grid.size() < 2) throw std::invalid_argument("wavelet_energy_diagnostic: degenerate scale grid");
    for (double a : a_grid)
        if (!(a > 0)) throw std::invalid_argument("wavelet_energy_diagnostic: scales must be positive");
    const double h = chi.h;
    const int n = chi.dim();
    const auto cuts = dyadic_cutoffs(h, k);
    const std::size_t K = chi.columns.size();
    double rmax = 0;
    std::vector<std::vector<double>> psi(cuts.J + 1, std::vector<double>(K));
    double barvol = 1;
    for (int d = 1; d < n; ++d) barvol *= chi.axes[d].spacing();
    long imin = chi.axes[0].points, imax = 0;
    for (std::size_t c = 0; c < K; ++c) {
        double r2 = 0;
        for (int d = 1; d < n; ++d) r2 += std::pow(chi.axes[d].node(chi.columns[c].index[d - 1]), 2);
        rmax = std::max(rmax, std::sqrt(r2));
        for (int j = 0; j <= cuts.J; ++j) psi[j][c] = cuts(j, std::sqrt(r2));
        for (const auto& r : chi.columns[c].runs) {
            imin = std::min(imin, r.begin);
            imax = std::max(imax, r.end);
        }
    }
    if (rmax > 1) throw std::invalid_argument("wavelet_energy_diagnostic: support must lie in |xi_bar| <= 1");
    const double period = 2 * std::numbers::pi * h / chi.axes[0].spacing();
    const double ximax = chi.extent()[0];
    const double s = w.half_width();

    WaveletEnergyTable tab;
    tab.J = cuts.J;
    std::vector<std::vector<double>> N(cuts.J + 1, std::vector<double>(a_grid.size()));
    for (std::size_t ia = 0; ia < a_grid.size(); ++ia) {
        const double a = a_grid[ia];
        // |X_hat|^2 is a trigonometric polynomial in b of degree < imax - imin, so this rule is exact
        const long nb = 4 * (imax - imin) + 8;
        // the midpoint rule in y converges like exp(-c sqrt(Q)) on the bump profile; Q >= 128 gives ~1e-7
        const long Q = std::max(128L, static_cast<long>(std::ceil(16 * 2 * s * a * ximax / (2 * std::numbers::pi * h))));
        std::vector<double> yq(Q), wq(Q);
        for (long q = 0; q < Q; ++q) {
            yq[q] = -s + (q + 0.5) * 2 * s / Q;
            wq[q] = w(yq[q]) * 2 * s / Q;
        }
        // energy per column of b -> X_hat(a, b, column), integrated over one period
        std::vector<std::vector<double>> energy(nb, std::vector<double>(K));
        parallel_for(static_cast<std::size_t>(nb), [&](std::size_t ib) {
            const double b = ib * period / nb;
            std::vector<cplx> acc(K, cplx(0, 0));
            for (long q = 0; q < Q; ++q) {
                auto g = column_profile(chi, b + a * yq[q]);
                for (std::size_t c = 0; c < K; ++c) acc[c] += wq[q] * g[c];
            }
            for (std::size_t c = 0; c < K; ++c) energy[ib][c] = std::norm(acc[c]) * a;
        });
        std::vector<double> e(K);
        for (std::size_t c = 0; c < K; ++c) {
            std::vector<double> col(nb);
            for (long ib = 0; ib < nb; ++ib) col[ib] = energy[ib][c];
            e[c] = pairwise_sum(col) * period / nb;
        }
        for (int j = 0; j <= cuts.J; ++j) {
            std::vector<double> t(K);
            for (std::size_t c = 0; c < K; ++c) t[c] = psi[j][c] * e[c] * barvol;
            N[j][ia] = std::sqrt(pairwise_sum(t));
            WaveletEnergyRow row;
            row.a = a;
            row.j = j;
            row.N = N[j][ia];
            row.bound = std::pow(2.0, -double(j) * (k + 1) * M) * std::min(std::pow(a, 1.5), 1.0);
            tab.rows.push_back(row);
        }
    }
    for (int j = 0; j <= cuts.J; ++j) {
        std::vector<double> ls, ns, ll, nl;
        for (std::size_t ia = 0; ia < a_grid.size(); ++ia) {
            if (N[j][ia] <= 0) continue;
            if (a_grid[ia] <= 1) {
                ls.push_back(std::log2(a_grid[ia]));
                ns.push_back(std::log2(N[j][ia]));
            }
            if (a_grid[ia] >= 1) {
                ll.push_back(std::log2(a_grid[ia]));
                nl.push_back(std::log2(N[j][ia]));
            }
        }
        tab.vanishes.push_back(ls.empty() && ll.empty());
        tab.slope_small.push_back(ls.size() >= 2 ? fit_line(ls, ns).slope : 0.0);
        tab.slope_large.push_back(ll.size() >= 2 ? fit_line(ll, nl).slope : 0.0);
    }
    for (int j = 1; j < cuts.J; ++j) {
        double r = 0;
        for (std::size_t ia = 0; ia < a_grid.size(); ++ia)
            if (N[j][ia] > 0) r = std::max(r, N[j + 1][ia] / N[j][ia]);
        tab.j_ratio.push_back(r);
    }
    return tab;
}

}  // namespace qmlab
