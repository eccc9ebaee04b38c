#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmlab {

using cplx = std::complex<double>;

// Raised when a computation would be under-resolved or truncated; carries the refusing module.
class ResolutionError : public std::runtime_error {
public:
    ResolutionError(std::string module, const std::string& what)
        : std::runtime_error(module + ": " + what), module_(std::move(module)) {}
    const std::string& module() const { return module_; }

private:
    std::string module_;
};

// Worker count from QMLAB_THREADS, else hardware concurrency.
int thread_count();

// Calls fn(i) for i in [0, n). Each index is computed by exactly one worker, so
// results written per index do not depend on the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

template <class T>
T pairwise_sum(const T* x, std::size_t n) {
    if (n == 0) return T{};
    if (n <= 8) {
        T s = x[0];
        for (std::size_t i = 1; i < n; ++i) s += x[i];
        return s;
    }
    std::size_t m = n / 2;
    return pairwise_sum(x, m) + pairwise_sum(x + m, n - m);
}

template <class T>
T pairwise_sum(const std::vector<T>& x) {
    return pairwise_sum(x.data(), x.size());
}

struct LineFit {
    double slope = 0, intercept = 0, slope_stderr = 0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Smooth bump exp(-1/(1-t^2)) on (-1, 1) and its derivative.
double bump(double t);
double bump_derivative(double t);
// Smooth step: 0 for t <= lo, 1 for t >= hi.
double smooth_step(double t, double lo, double hi);

}  // namespace qmlab
