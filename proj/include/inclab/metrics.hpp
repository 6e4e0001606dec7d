#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "inclab/measure.hpp"
#include "inclab/observable.hpp"
#include "inclab/random.hpp"

namespace inclab {

struct ComparisonResult {
    std::string metric;
    double value = 0.0;
    double stderr_ = 0.0;
    std::size_t n1 = 0;
    std::size_t n2 = 0;
};

std::string comparison_csv(const std::vector<ComparisonResult>& rows);

// Sup of the CDF gap over all atom locations.
double ks_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu);
// Integral of |F_mu - F_nu|; on the Meso scale in the coordinate x/(1+x), with INF at 1.
double wasserstein1(const DiscreteMeasure& mu, const DiscreteMeasure& nu);
// Total variation over shared bins: `bins` quantile bins of the pooled finite
// atoms, plus INF as its own bin.
double tv_binned(const DiscreteMeasure& mu, const DiscreteMeasure& nu, std::size_t bins = 64);

// Same three distances against an absolutely continuous law on [0, INF) given
// by its CDF (in the original coordinate). Bins for TV are quantiles of mu.
double ks_distance_to_cdf(const DiscreteMeasure& mu, const std::function<double(double)>& cdf);
double wasserstein1_to_cdf(const DiscreteMeasure& mu, const std::function<double(double)>& cdf);
double tv_binned_to_cdf(const DiscreteMeasure& mu, const std::function<double(double)>& cdf,
                        std::size_t bins = 64);

// 99% bootstrap half-width of tv_binned_to_cdf for an equally weighted sample.
double tv_bootstrap_halfwidth(const std::vector<double>& samples, const std::function<double(double)>& cdf,
                              std::size_t bins, std::size_t resamples, Rng& rng);

struct QVSample {
    double time = 0.0;
    double value = 0.0;      // mu_t(h)
    double drift = 0.0;      // mu_t(A_theta h)
    double b_square = 0.0;   // mu_t((Bh)^2)
    double b_mean = 0.0;     // mu_t(Bh)
};

struct QVEstimate {
    std::vector<double> times;
    std::vector<double> realized;   // cumulative sum of squared compensated increments
    std::vector<double> predicted;  // cumulative trapezoid of the carre du champ
    double realized_total() const { return realized.empty() ? 0.0 : realized.back(); }
    double predicted_total() const { return predicted.empty() ? 0.0 : predicted.back(); }
};

// Realized quadratic variation of mu_t(h) minus its drift against
// int 2 (mu_s((Bh)^2) - mu_s(Bh)^2) ds.
QVEstimate qv_estimate(const std::vector<QVSample>& path, double min_samples_per_unit_time = 100.0);

}  // namespace inclab
