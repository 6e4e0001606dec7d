#include "inclab/numerics.hpp"

#include <algorithm>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <limits>

#include "inclab/errors.hpp"

namespace inclab {

MeanStderr mean_and_stderr(const std::vector<double>& xs) {
    MeanStderr r;
    r.n = xs.size();
    if (xs.empty()) return r;
    NeumaierSum s;
    for (double x : xs) s.add(x);
    r.mean = s.value() / static_cast<double>(xs.size());
    if (xs.size() < 2) return r;
    NeumaierSum v;
    for (double x : xs) v.add((x - r.mean) * (x - r.mean));
    const double var = v.value() / static_cast<double>(xs.size() - 1);
    r.stderr_ = std::sqrt(var / static_cast<double>(xs.size()));
    return r;
}

double ks_pvalue(double distance, double effective_n) {
    const double sn = std::sqrt(effective_n);
    const double lambda = (sn + 0.12 + 0.11 / sn) * distance;
    if (lambda < 1e-3) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 200; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
        if (term < 1e-18) break;
    }
    return std::clamp(sum, 0.0, 1.0);
}

double ks_one_sample(std::vector<double> samples, double (*cdf)(double, const void*), const void* ctx) {
    if (samples.empty()) throw InvalidArgument("KS test needs samples");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    std::size_t i = 0;
    while (i < samples.size()) {
        std::size_t j = i;
        while (j < samples.size() && samples[j] == samples[i]) ++j;
        const double f = cdf(samples[i], ctx);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(j) / n - f));
        i = j;
    }
    return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw InvalidArgument("KS test needs samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() || j < b.size()) {
        double x;
        if (j >= b.size() || (i < a.size() && a[i] <= b[j]))
            x = a[i];
        else
            x = b[j];
        while (i < a.size() && a[i] == x) ++i;
        while (j < b.size() && b[j] == x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

ChiSquareResult chi_square_test(const std::vector<double>& observed, const std::vector<double>& expected,
                                double min_expected) {
    if (observed.size() != expected.size()) throw InvalidArgument("chi-square inputs differ in length");
    double stat = 0.0;
    int cells = 0;
    double pooled_o = 0.0, pooled_e = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        if (expected[i] < min_expected) {
            pooled_o += observed[i];
            pooled_e += expected[i];
            continue;
        }
        stat += (observed[i] - expected[i]) * (observed[i] - expected[i]) / expected[i];
        ++cells;
    }
    if (pooled_e > 0.0) {
        stat += (pooled_o - pooled_e) * (pooled_o - pooled_e) / pooled_e;
        ++cells;
    } else if (pooled_o > 0.0) {
        return {std::numeric_limits<double>::infinity(), static_cast<double>(cells), 0.0};
    }
    ChiSquareResult r;
    r.statistic = stat;
    r.dof = static_cast<double>(std::max(cells - 1, 1));
    r.pvalue = boost::math::gamma_q(r.dof / 2.0, stat / 2.0);
    return r;
}

double integrate_function(double (*f)(double, const void*), const void* ctx, double a, double b,
                          double tol) {
    auto g = [&](double x) { return f(x, ctx); };
    if (std::isinf(b)) {
        boost::math::quadrature::exp_sinh<double> integrator;
        return integrator.integrate([&](double x) { return g(x); }, a, b, tol);
    }
    double err = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, a, b, 20, tol, &err);
}

}  // namespace inclab
