#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace inclab {

// Compensated summation that also handles addends larger than the running sum.
class NeumaierSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

struct MeanStderr {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t n = 0;
};

MeanStderr mean_and_stderr(const std::vector<double>& xs);

// Asymptotic Kolmogorov survival function with the small-sample correction
// sqrt(n) + 0.12 + 0.11/sqrt(n) applied to the effective size n.
double ks_pvalue(double distance, double effective_n);

// One-sample KS distance of samples against a continuous CDF.
double ks_one_sample(std::vector<double> samples, double (*cdf)(double, const void*), const void* ctx);

template <class Cdf>
double ks_one_sample(std::vector<double> samples, const Cdf& cdf) {
    return ks_one_sample(
        std::move(samples), [](double x, const void* c) { return (*static_cast<const Cdf*>(c))(x); },
        &cdf);
}

// Two-sample KS distance (finite samples only).
double ks_two_sample(std::vector<double> a, std::vector<double> b);

// Pearson chi-square goodness of fit; expected counts below `min_expected`
// are pooled into one cell. Returns the p-value.
struct ChiSquareResult {
    double statistic = 0.0;
    double dof = 0.0;
    double pvalue = 1.0;
};
ChiSquareResult chi_square_test(const std::vector<double>& observed, const std::vector<double>& expected,
                                double min_expected = 5.0);

// Adaptive Gauss-Kronrod integral on [a, b] (b may be +infinity).
double integrate_function(double (*f)(double, const void*), const void* ctx, double a, double b,
                          double tol = 1e-12);

template <class F>
double quad(const F& f, double a, double b, double tol = 1e-12) {
    return integrate_function([](double x, const void* c) { return (*static_cast<const F*>(c))(x); },
                              &f, a, b, tol);
}

}  // namespace inclab
