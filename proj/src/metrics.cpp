#include "inclab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "inclab/errors.hpp"
#include "inclab/numerics.hpp"

namespace inclab {

namespace {

double to_unit(double x, Scale scale) {
    if (scale == Scale::Macro) return x;
    if (std::isinf(x)) return 1.0;
    return x / (1.0 + x);
}

double from_unit(double u, Scale scale) {
    if (scale == Scale::Macro) return u;
    if (u >= 1.0) return INF;
    return u / (1.0 - u);
}

void require_same_scale(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    if (mu.scale() != nu.scale()) throw DomainMismatch("measures live on different scales");
}

struct Step {
    double location;
    double d_mu;
    double d_nu;
};

std::vector<Step> merged_steps(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    std::vector<Step> steps;
    steps.reserve(mu.size() + nu.size());
    for (const auto& a : mu.atoms()) steps.push_back({a.location, a.weight, 0.0});
    for (const auto& a : nu.atoms()) steps.push_back({a.location, 0.0, a.weight});
    std::sort(steps.begin(), steps.end(), [](const Step& a, const Step& b) { return a.location < b.location; });
    std::vector<Step> merged;
    for (const auto& s : steps) {
        if (!merged.empty() && merged.back().location == s.location) {
            merged.back().d_mu += s.d_mu;
            merged.back().d_nu += s.d_nu;
        } else {
            merged.push_back(s);
        }
    }
    return merged;
}

// Five-point Gauss-Legendre on [a, b].
template <class F>
double gauss5(const F& f, double a, double b) {
    static constexpr double x[5] = {0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640,
                                    0.9061798459386640};
    static constexpr double w[5] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
                                    0.2369268850561891, 0.2369268850561891};
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < 5; ++i) s += w[i] * f(c + h * x[i]);
    return s * h;
}

// Gauss-Legendre with interval halving until two levels agree.
template <class F>
double adaptive_gauss(const F& f, double a, double b, double whole, int depth) {
    const double mid = 0.5 * (a + b);
    const double left = gauss5(f, a, mid), right = gauss5(f, mid, b);
    if (depth == 0 || std::abs(left + right - whole) <= 1e-13 * std::max(1.0, b - a)) return left + right;
    return adaptive_gauss(f, a, mid, left, depth - 1) + adaptive_gauss(f, mid, b, right, depth - 1);
}

template <class F>
double adaptive_gauss(const F& f, double a, double b) {
    return adaptive_gauss(f, a, b, gauss5(f, a, b), 40);
}

// Integral over [a, b] of |level - G(u)| for nondecreasing G.
template <class G>
double abs_gap_integral(double level, const G& g, double a, double b) {
    if (b <= a) return 0.0;
    const double ga = level - g(a), gb = level - g(b);
    auto f = [&](double u) { return std::abs(level - g(u)); };
    if (ga * gb >= 0.0) return adaptive_gauss(f, a, b);
    double lo = a, hi = b;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        if ((level - g(mid)) * ga > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return adaptive_gauss(f, a, lo) + adaptive_gauss(f, lo, b);
}

std::vector<double> quantile_edges(const std::vector<std::pair<double, double>>& finite_atoms, std::size_t bins) {
    // finite_atoms sorted by location, weights need not be normalized
    std::vector<double> edges;
    if (finite_atoms.empty() || bins < 1) return edges;
    if (finite_atoms.size() <= bins) {
        for (std::size_t i = 0; i + 1 < finite_atoms.size(); ++i) edges.push_back(finite_atoms[i].first);
        return edges;
    }
    double total = 0.0;
    for (const auto& a : finite_atoms) total += a.second;
    double cum = 0.0;
    std::size_t k = 1;
    for (std::size_t i = 0; i + 1 < finite_atoms.size() && k < bins; ++i) {
        cum += finite_atoms[i].second;
        bool crossed = false;
        while (k < bins && cum >= total * static_cast<double>(k) / static_cast<double>(bins)) {
            ++k;
            crossed = true;
        }
        if (crossed) edges.push_back(finite_atoms[i].first);
    }
    return edges;
}

std::size_t bin_of(const std::vector<double>& edges, double x) {
    return static_cast<std::size_t>(std::lower_bound(edges.begin(), edges.end(), x) - edges.begin());
}

}  // namespace

std::string comparison_csv(const std::vector<ComparisonResult>& rows) {
    std::ostringstream os;
    os.precision(17);
    os << "metric,value,stderr,n1,n2\n";
    for (const auto& r : rows) os << r.metric << ',' << r.value << ',' << r.stderr_ << ',' << r.n1 << ',' << r.n2 << '\n';
    return os.str();
}

double ks_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    require_same_scale(mu, nu);
    double fm = 0.0, fn = 0.0, d = 0.0;
    for (const auto& s : merged_steps(mu, nu)) {
        fm += s.d_mu;
        fn += s.d_nu;
        d = std::max(d, std::abs(fm - fn));
    }
    return std::min(d, 1.0);
}

double wasserstein1(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    require_same_scale(mu, nu);
    const auto steps = merged_steps(mu, nu);
    double fm = 0.0, fn = 0.0, w = 0.0;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        fm += steps[i].d_mu;
        fn += steps[i].d_nu;
        if (i + 1 < steps.size())
            w += std::abs(fm - fn) *
                 (to_unit(steps[i + 1].location, mu.scale()) - to_unit(steps[i].location, mu.scale()));
    }
    return w;
}

double tv_binned(const DiscreteMeasure& mu, const DiscreteMeasure& nu, std::size_t bins) {
    require_same_scale(mu, nu);
    const auto steps = merged_steps(mu, nu);
    std::vector<std::pair<double, double>> pooled;
    double inf_mu = 0.0, inf_nu = 0.0;
    for (const auto& s : steps) {
        if (std::isinf(s.location)) {
            inf_mu += s.d_mu;
            inf_nu += s.d_nu;
        } else {
            pooled.emplace_back(s.location, 0.5 * (s.d_mu + s.d_nu));
        }
    }
    const auto edges = quantile_edges(pooled, bins);
    std::vector<double> diff(edges.size() + 1, 0.0);
    for (const auto& s : steps)
        if (!std::isinf(s.location)) diff[bin_of(edges, s.location)] += s.d_mu - s.d_nu;
    double tv = std::abs(inf_mu - inf_nu);
    for (double v : diff) tv += std::abs(v);
    return std::min(0.5 * tv, 1.0);
}

double ks_distance_to_cdf(const DiscreteMeasure& mu, const std::function<double(double)>& cdf) {
    double f = 0.0, d = 0.0;
    for (const auto& a : mu.atoms()) {
        if (std::isinf(a.location)) break;
        const double g = cdf(a.location);
        d = std::max(d, std::abs(f - g));
        f += a.weight;
        d = std::max(d, std::abs(f - g));
    }
    d = std::max(d, std::abs(f - 1.0));
    return std::min(d, 1.0);
}

double wasserstein1_to_cdf(const DiscreteMeasure& mu, const std::function<double(double)>& cdf) {
    const Scale scale = mu.scale();
    auto g = [&](double u) {
        if (u <= 0.0) return cdf(0.0);
        const double x = from_unit(u, scale);
        return std::isinf(x) ? 1.0 : cdf(x);
    };
    double w = 0.0, f = 0.0, prev = 0.0;
    for (const auto& a : mu.atoms()) {
        const double u = to_unit(a.location, scale);
        w += abs_gap_integral(f, g, prev, u);
        f += a.weight;
        prev = u;
    }
    w += abs_gap_integral(std::min(f, 1.0), g, prev, 1.0);
    return w;
}

double tv_binned_to_cdf(const DiscreteMeasure& mu, const std::function<double(double)>& cdf, std::size_t bins) {
    std::vector<std::pair<double, double>> finite;
    double inf_mass = 0.0;
    for (const auto& a : mu.atoms()) {
        if (std::isinf(a.location))
            inf_mass += a.weight;
        else
            finite.emplace_back(a.location, a.weight);
    }
    const auto edges = quantile_edges(finite, bins);
    std::vector<double> diff(edges.size() + 1, 0.0);
    for (const auto& [x, w] : finite) diff[bin_of(edges, x)] += w;
    double lower = 0.0;
    for (std::size_t b = 0; b < diff.size(); ++b) {
        const double upper = b < edges.size() ? cdf(edges[b]) : 1.0;
        diff[b] -= upper - lower;
        lower = upper;
    }
    double tv = inf_mass;
    for (double v : diff) tv += std::abs(v);
    return std::min(0.5 * tv, 1.0);
}

double tv_bootstrap_halfwidth(const std::vector<double>& samples, const std::function<double(double)>& cdf,
                              std::size_t bins, std::size_t resamples, Rng& rng) {
    if (samples.empty() || resamples < 2) throw InvalidArgument("bootstrap needs samples and resamples");
    std::vector<double> stats(resamples);
    std::vector<double> draw(samples.size());
    for (auto& s : stats) {
        for (auto& x : draw) x = samples[uniform_index(rng, samples.size())];
        s = tv_binned_to_cdf(DiscreteMeasure::empirical(draw, Scale::Meso), cdf, bins);
    }
    std::sort(stats.begin(), stats.end());
    auto q = [&](double p) {
        const auto i = static_cast<std::size_t>(std::clamp(p * static_cast<double>(resamples - 1), 0.0,
                                                           static_cast<double>(resamples - 1)));
        return stats[i];
    };
    return 0.5 * (q(0.995) - q(0.005));
}

QVEstimate qv_estimate(const std::vector<QVSample>& path, double min_samples_per_unit_time) {
    if (path.size() < 2) throw TooSparse("need at least two samples");
    const double span = path.back().time - path.front().time;
    if (!(span > 0.0)) throw TooSparse("samples do not span positive time");
    const double density = static_cast<double>(path.size() - 1) / span;
    if (density < min_samples_per_unit_time)
        throw TooSparse("only " + std::to_string(density) + " samples per unit time");
    QVEstimate q;
    q.times.push_back(path.front().time);
    q.realized.push_back(0.0);
    q.predicted.push_back(0.0);
    double realized = 0.0, predicted = 0.0;
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
        const double dt = path[k + 1].time - path[k].time;
        if (!(dt > 0.0)) throw InvalidArgument("QV sample times must increase");
        const double increment = path[k + 1].value - path[k].value - 0.5 * (path[k].drift + path[k + 1].drift) * dt;
        realized += increment * increment;
        const double g0 = 2.0 * (path[k].b_square - path[k].b_mean * path[k].b_mean);
        const double g1 = 2.0 * (path[k + 1].b_square - path[k + 1].b_mean * path[k + 1].b_mean);
        predicted += 0.5 * (g0 + g1) * dt;
        q.times.push_back(path[k + 1].time);
        q.realized.push_back(realized);
        q.predicted.push_back(predicted);
    }
    return q;
}

}  // namespace inclab
