#include "qmlab/grids.hpp"

#include <fftw3.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <iomanip>
#include <istream>
#include <mutex>
#include <numbers>
#include <ostream>

namespace qmlab {

static_assert(std::endian::native == std::endian::little, "binary container assumes a little-endian host");

GridField::GridField(double h_, Space space_, std::vector<AxisSpec> axes_)
    : h(h_), space(space_), axes(std::move(axes_)) {
    std::size_t n = 1;
    for (const auto& a : axes) {
        if (a.points < 1 || !(a.half_width > 0)) throw std::invalid_argument("GridField: bad axis");
        n *= static_cast<std::size_t>(a.points);
    }
    data.assign(n, cplx(0, 0));
    validate();
}

void GridField::validate() const {
    if (!(h > 0)) throw std::invalid_argument("GridField: h must be positive");
    std::size_t n = 1;
    for (const auto& a : axes) n *= static_cast<std::size_t>(a.points);
    if (n != data.size()) throw std::invalid_argument("GridField: data length does not match axes");
}

double GridField::cell_volume() const {
    double v = 1;
    for (const auto& a : axes) v *= a.spacing();
    return v;
}

std::size_t GridField::offset(const std::vector<long>& idx) const {
    std::size_t off = 0;
    for (int d = 0; d < dim(); ++d) off = off * axes[d].points + idx[d];
    return off;
}

std::vector<long> GridField::index(std::size_t off) const {
    std::vector<long> idx(dim());
    for (int d = dim() - 1; d >= 0; --d) {
        idx[d] = static_cast<long>(off % axes[d].points);
        off /= axes[d].points;
    }
    return idx;
}

std::vector<double> GridField::coords(std::size_t off) const {
    auto idx = index(off);
    std::vector<double> x(dim());
    for (int d = 0; d < dim(); ++d) x[d] = axes[d].node(idx[d]);
    return x;
}

double l2_norm(const GridField& f) {
    std::vector<double> m(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) m[i] = std::norm(f.data[i]);
    return std::sqrt(pairwise_sum(m) * f.cell_volume());
}

AxisSpec dual_axis(const AxisSpec& a, double h, double center) {
    double d = 2 * std::numbers::pi * h / (a.points * a.spacing());
    return AxisSpec{center, 0.5 * d * a.points, a.points};
}

namespace {

std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

bool power_of_two(long n) { return n > 0 && (n & (n - 1)) == 0; }

// Applies a separable phase prod_d ph[d][i_d] in place.
void apply_phases(std::vector<cplx>& data, const std::vector<AxisSpec>& axes, const std::vector<std::vector<cplx>>& ph) {
    const int n = static_cast<int>(axes.size());
    std::size_t inner = 1;
    for (int d = n - 1; d >= 0; --d) {
        const long N = axes[d].points;
        const std::size_t outer = data.size() / (inner * N);
        for (std::size_t o = 0; o < outer; ++o)
            for (long i = 0; i < N; ++i) {
                cplx* p = data.data() + (o * N + i) * inner;
                for (std::size_t j = 0; j < inner; ++j) p[j] *= ph[d][i];
            }
        inner *= N;
    }
}

}  // namespace

GridField semiclassical_ft(const GridField& f, Direction dir, const std::vector<double>& dual_centers) {
    f.validate();
    const int n = f.dim();
    if (dir == Direction::Forward && f.space != Space::Position)
        throw std::invalid_argument("semiclassical_ft: forward transform needs a position-space field");
    if (dir == Direction::Inverse && f.space != Space::Frequency)
        throw std::invalid_argument("semiclassical_ft: inverse transform needs a frequency-space field");
    for (const auto& a : f.axes)
        if (!power_of_two(a.points)) throw std::invalid_argument("semiclassical_ft: axis length must be a power of two");
    if (!dual_centers.empty() && static_cast<int>(dual_centers.size()) != n)
        throw std::invalid_argument("semiclassical_ft: dual centre count mismatch");

    const double h = f.h;
    const double sgn = dir == Direction::Forward ? -1.0 : 1.0;
    std::vector<AxisSpec> out_axes;
    std::vector<std::vector<cplx>> pre(n), post(n);
    double scale = std::pow(2 * std::numbers::pi * h, -0.5 * n);
    for (int d = 0; d < n; ++d) {
        const AxisSpec& a = f.axes[d];
        AxisSpec b = dual_axis(a, h, dual_centers.empty() ? 0.0 : dual_centers[d]);
        out_axes.push_back(b);
        const double x0 = a.node(0), dx = a.spacing(), y0 = b.node(0), dy = b.spacing();
        scale *= dx;
        pre[d].resize(a.points);
        post[d].resize(b.points);
        // x_j y_m = x0 y0 + x0 m dy + j dx y0 + j m (2 pi h / N)
        for (long j = 0; j < a.points; ++j) pre[d][j] = std::polar(1.0, sgn * j * dx * y0 / h);
        for (long m = 0; m < b.points; ++m) post[d][m] = std::polar(1.0, sgn * x0 * (y0 + m * dy) / h);
    }

    GridField out(h, dir == Direction::Forward ? Space::Frequency : Space::Position, out_axes);
    std::vector<cplx> buf = f.data;
    apply_phases(buf, f.axes, pre);
    std::vector<int> dims(n);
    for (int d = 0; d < n; ++d) dims[d] = static_cast<int>(f.axes[d].points);
    auto* in = reinterpret_cast<fftw_complex*>(buf.data());
    auto* res = reinterpret_cast<fftw_complex*>(out.data.data());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(plan_mutex());
        plan = fftw_plan_dft(n, dims.data(), in, res, dir == Direction::Forward ? FFTW_FORWARD : FFTW_BACKWARD,
                             FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(plan_mutex());
        fftw_destroy_plan(plan);
    }
    apply_phases(out.data, out.axes, post);
    for (auto& v : out.data) v *= scale;
    return out;
}

SymbolFn symbol_fn(const PolySymbol& p) {
    return [p](const double* xi) { return cplx(p.eval(xi), 0.0); };
}

GridField apply_multiplier(const GridField& f, const SymbolFn& m) {
    f.validate();
    if (f.space == Space::Frequency) {
        GridField out = f;
        std::vector<double> xi(f.dim());
        for (std::size_t i = 0; i < f.size(); ++i) {
            auto idx = f.index(i);
            for (int d = 0; d < f.dim(); ++d) xi[d] = f.axes[d].node(idx[d]);
            out.data[i] *= m(xi.data());
        }
        return out;
    }
    std::vector<double> centers;
    for (const auto& a : f.axes) centers.push_back(a.center);
    GridField g = apply_multiplier(semiclassical_ft(f, Direction::Forward), m);
    return semiclassical_ft(g, Direction::Inverse, centers);
}

std::vector<cplx> direct_synthesis(const GridField& cutoff, const std::vector<std::vector<double>>& targets) {
    cutoff.validate();
    if (cutoff.space != Space::Frequency) throw std::invalid_argument("direct_synthesis: needs a frequency-space field");
    if (targets.empty()) throw std::invalid_argument("direct_synthesis: empty target list");
    const int n = cutoff.dim();
    for (const auto& t : targets)
        if (static_cast<int>(t.size()) != n) throw std::invalid_argument("direct_synthesis: target dimension mismatch");
    std::vector<std::size_t> support;
    for (std::size_t i = 0; i < cutoff.size(); ++i)
        if (cutoff.data[i] != cplx(0, 0)) support.push_back(i);
    std::vector<std::vector<double>> xi;
    for (std::size_t s : support) xi.push_back(cutoff.coords(s));
    const double h = cutoff.h;
    const double pref = std::pow(2 * std::numbers::pi * h, -0.5 * n) * cutoff.cell_volume();
    std::vector<cplx> out(targets.size());
    parallel_for(targets.size(), [&](std::size_t t) {
        std::vector<cplx> terms(support.size());
        for (std::size_t s = 0; s < support.size(); ++s) {
            double ph = 0;
            for (int d = 0; d < n; ++d) ph += targets[t][d] * xi[s][d];
            terms[s] = std::polar(1.0, ph / h) * cutoff.data[support[s]];
        }
        out[t] = pref * pairwise_sum(terms);
    });
    return out;
}

namespace {

template <class T>
void put(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
T get(std::istream& is) {
    T v;
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw std::runtime_error("read_binary: truncated stream");
    return v;
}

}  // namespace

void write_binary(const GridField& f, std::ostream& os) {
    f.validate();
    os.write("QMGF", 4);
    put<std::uint32_t>(os, 1);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(f.dim()));
    put<double>(os, f.h);
    put<std::uint8_t>(os, f.space == Space::Position ? 0 : 1);
    for (const auto& a : f.axes) {
        put<double>(os, a.center);
        put<double>(os, a.half_width);
        put<std::uint64_t>(os, static_cast<std::uint64_t>(a.points));
    }
    for (const auto& v : f.data) {
        put<double>(os, v.real());
        put<double>(os, v.imag());
    }
}

GridField read_binary(std::istream& is) {
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "QMGF", 4) != 0) throw std::runtime_error("read_binary: bad magic");
    if (get<std::uint32_t>(is) != 1) throw std::runtime_error("read_binary: unsupported version");
    auto n = get<std::uint32_t>(is);
    double h = get<double>(is);
    auto tag = get<std::uint8_t>(is);
    std::vector<AxisSpec> axes(n);
    for (auto& a : axes) {
        a.center = get<double>(is);
        a.half_width = get<double>(is);
        a.points = static_cast<long>(get<std::uint64_t>(is));
    }
    GridField f(h, tag == 0 ? Space::Position : Space::Frequency, axes);
    for (auto& v : f.data) {
        double re = get<double>(is);
        double im = get<double>(is);
        v = cplx(re, im);
    }
    return f;
}

void write_csv(const GridField& f, std::ostream& os) {
    const char* name = f.space == Space::Position ? "x" : "xi";
    for (int d = 0; d < f.dim(); ++d) os << name << (d + 1) << ",";
    os << "re,im\n";
    os << std::setprecision(17);
    for (std::size_t i = 0; i < f.size(); ++i) {
        for (double c : f.coords(i)) os << c << ",";
        os << f.data[i].real() << "," << f.data[i].imag() << "\n";
    }
}

}  // namespace qmlab
