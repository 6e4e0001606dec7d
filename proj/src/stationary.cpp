#include "inclab/stationary.hpp"

#include <algorithm>
#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>

#include "inclab/errors.hpp"

namespace inclab {

namespace {

// Tail of the Stirling series for log Gamma(x), x >= 10.
double stirling_tail(double x) {
    const double r = 1.0 / x, r2 = r * r;
    return r * (1.0 / 12 - r2 * (1.0 / 360 - r2 * (1.0 / 1260 - r2 * (1.0 / 1680 - r2 * (1.0 / 1188)))));
}

// log Gamma(base + da) / Gamma(base + db). The offsets are kept apart from the
// base so that their difference stays exact when base is large.
double log_gamma_ratio(double base, double da, double db) {
    double shift = 0.0;
    while (base + da < 10.0 || base + db < 10.0) {
        shift += std::log(base + db) - std::log(base + da);
        base += 1.0;
    }
    const double a = base + da, b = base + db, gap = da - db;
    return shift + (a - 0.5) * std::log1p(gap / b) + gap * (std::log(b) - 1.0) + stirling_tail(a) -
           stirling_tail(b);
}

double ell(double t) { return -std::expm1(-t) / 2.0; }

}  // namespace

double log_weight(std::int64_t n, double d) {
    if (n < 0) throw InvalidArgument("occupation must be nonnegative");
    if (!(d > 0.0)) throw InvalidArgument("d must be positive");
    if (n == 0) return 0.0;
    return log_gamma_ratio(static_cast<double>(n), d, 1.0) - boost::math::lgamma(d);
}

double log_partition(std::int64_t L, std::int64_t N, double d) {
    if (L < 0 || N < 0) throw InvalidArgument("L and N must be nonnegative");
    if (!(d > 0.0)) throw InvalidArgument("d must be positive");
    if (L == 0) return N == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    if (N == 0) return 0.0;
    const double dl = d * static_cast<double>(L);
    return log_gamma_ratio(static_cast<double>(N), dl, 1.0) - boost::math::lgamma(dl);
}

CanonicalMeasure::CanonicalMeasure(std::size_t L, std::int64_t N, double d) : L_(L), N_(N), d_(d) {
    if (L < 1) throw InvalidArgument("L must be at least 1");
    if (N < 0) throw InvalidArgument("N must be nonnegative");
    if (!(d > 0.0)) throw InvalidArgument("d must be positive");
}

double CanonicalMeasure::log_probability(const Configuration& config) const {
    if (config.sites() != L_ || config.particles() != N_) return -std::numeric_limits<double>::infinity();
    double s = -log_partition(static_cast<std::int64_t>(L_), N_, d_);
    for (auto v : config.occupations()) s += log_weight(v, d_);
    return s;
}

double CanonicalMeasure::marginal(std::int64_t n) const {
    if (n < 0 || n > N_) return 0.0;
    const auto l = static_cast<std::int64_t>(L_);
    return std::exp(log_weight(n, d_) + log_partition(l - 1, N_ - n, d_) - log_partition(l, N_, d_));
}

std::vector<double> CanonicalMeasure::marginal_pmf() const {
    std::vector<double> p(static_cast<std::size_t>(N_) + 1);
    for (std::int64_t n = 0; n <= N_; ++n) p[static_cast<std::size_t>(n)] = marginal(n);
    return p;
}

Configuration CanonicalMeasure::sample(Rng& rng) const {
    std::vector<std::int64_t> occ(L_, 0);
    std::int64_t left = N_;
    for (std::size_t x = 0; x + 1 < L_ && left > 0; ++x) {
        const auto l = static_cast<std::int64_t>(L_ - x);  // sites still to fill, including x
        const double rest = d_ * static_cast<double>(l - 1);
        const double log_p0 = log_partition(l - 1, left, d_) - log_partition(l, left, d_);
        const double u = uniform01(rng);
        std::int64_t n = 0;
        if (log_p0 > -700.0) {
            // P(n)/P(n-1) = (n-1+d)/n * (M-n+1)/(M-n+d(l-1))
            double p = std::exp(log_p0);
            double cum = p;
            while (u >= cum && n < left) {
                ++n;
                const auto nn = static_cast<double>(n), m = static_cast<double>(left);
                p *= (nn - 1.0 + d_) / nn * (m - nn + 1.0) / (m - nn + rest);
                cum += p;
            }
        } else {
            std::vector<double> logp(static_cast<std::size_t>(left) + 1);
            double top = -std::numeric_limits<double>::infinity();
            for (std::int64_t k = 0; k <= left; ++k) {
                logp[static_cast<std::size_t>(k)] = log_weight(k, d_) + log_partition(l - 1, left - k, d_);
                top = std::max(top, logp[static_cast<std::size_t>(k)]);
            }
            double total = 0.0;
            for (auto& v : logp) total += (v = std::exp(v - top));
            double cum = logp[0];
            while (u * total >= cum && n < left) cum += logp[static_cast<std::size_t>(++n)];
        }
        occ[x] = n;
        left -= n;
    }
    occ[L_ - 1] += left;
    return Configuration(std::move(occ));
}

double size_biased_marginal(std::int64_t n, std::size_t L, std::int64_t N, double d) {
    if (n <= 0 || n > N) return 0.0;
    const auto l = static_cast<std::int64_t>(L);
    return std::exp(std::log(static_cast<double>(L)) - std::log(static_cast<double>(N)) +
                    std::log(static_cast<double>(n)) + log_weight(n, d) + log_partition(l - 1, N - n, d) -
                    log_partition(l, N, d));
}

std::vector<double> size_biased_pmf(std::size_t L, std::int64_t N, double d) {
    std::vector<double> p(static_cast<std::size_t>(N) + 1, 0.0);
    for (std::int64_t n = 1; n <= N; ++n) p[static_cast<std::size_t>(n)] = size_biased_marginal(n, L, N, d);
    return p;
}

double geometric_limit_pmf(std::int64_t n, double gamma) {
    if (n < 1) return 0.0;
    if (gamma < 0.0) throw InvalidArgument("gamma must be nonnegative");
    if (gamma == 0.0) return n == 1 ? 1.0 : 0.0;
    return std::exp(static_cast<double>(n - 1) * std::log(gamma) - static_cast<double>(n) * std::log1p(gamma));
}

double sample_beta_1_theta(double theta, Rng& rng) {
    if (!(theta > 0.0)) throw InvalidArgument("theta must be positive");
    return -std::expm1(std::log(uniform_open(rng)) / theta);
}

double sample_exp1(Rng& rng) { return exponential(rng, 1.0); }

GemSample sample_gem(double theta, double tol, Rng& rng) {
    if (!(tol > 0.0 && tol < 1.0)) throw InvalidArgument("tol must lie in (0,1)");
    GemSample g;
    double remaining = 1.0;
    while (remaining >= tol) {
        const double v = sample_beta_1_theta(theta, rng);
        g.weights.push_back(remaining * v);
        remaining *= 1.0 - v;
    }
    g.dust = remaining;
    return g;
}

Partition sample_pd(double theta, double tol, Rng& rng) {
    GemSample g = sample_gem(theta, tol, rng);
    std::sort(g.weights.begin(), g.weights.end(), std::greater<>());
    std::vector<double> kept;
    for (double w : g.weights)
        if (w > tol) kept.push_back(w);
    return Partition(std::move(kept));
}

double size_biased_pick(const Partition& p, Rng& rng) {
    double u = uniform01(rng);
    for (double m : p.masses()) {
        if (u < m) return m;
        u -= m;
    }
    return 0.0;
}

double beta_moment(int k, double theta) {
    double m = 1.0;
    for (int i = 1; i <= k; ++i) m *= static_cast<double>(i) / (theta + i);
    return m;
}

double beta_1_theta_cdf(double z, double theta) {
    if (z <= 0.0) return 0.0;
    if (z >= 1.0) return 1.0;
    return -std::expm1(theta * std::log1p(-z));
}

double pd_stationary_moment(int m, double theta) { return beta_moment(m - 1, theta); }

double beta_generator_pairing(const Observable& h, const Observable& g, double theta) {
    h.coefficients();
    g.coefficients();
    const Observable d1 = h.derivative(), d2 = d1.derivative();
    const Observable generated = Observable::polynomial({0.0, 1.0, -1.0}) * d2 +
                                 Observable::polynomial({2.0, -(2.0 + theta)}) * d1 +
                                 (Observable::constant(h.value(0.0)) - h) * theta;
    const std::vector<double> c = (g * generated).coefficients();
    double s = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) s += c[k] * beta_moment(static_cast<int>(k), theta);
    return s;
}

double cir_transition_density(double u, double z, double z0) {
    if (!(u > 0.0)) throw NonpositiveTime("transition time must be positive");
    if (z <= 0.0) return 0.0;
    const double l = ell(u);
    const double lambda = z0 * std::exp(-u) / l;
    if (lambda == 0.0) return z / (4.0 * l * l) * std::exp(-z / (2.0 * l));
    boost::math::non_central_chi_squared_distribution<double> dist(4.0, lambda);
    return boost::math::pdf(dist, z / l) / l;
}

double cir_transition_cdf(double u, double z, double z0) {
    if (!(u > 0.0)) throw NonpositiveTime("transition time must be positive");
    if (z <= 0.0) return 0.0;
    const double l = ell(u);
    const double lambda = z0 * std::exp(-u) / l;
    if (lambda == 0.0) {
        const double y = z / (2.0 * l);
        return -std::expm1(-y) - y * std::exp(-y);
    }
    boost::math::non_central_chi_squared_distribution<double> dist(4.0, lambda);
    return boost::math::cdf(dist, z / l);
}

double closed_form_density(double t, double z, double z0) {
    if (!(t > 0.0)) throw NonpositiveTime("density needs t > 0");
    if (z <= 0.0) return z == 0.0 ? 1.0 : 0.0;
    const double l = ell(t);
    const double reset = std::exp(-z / (2.0 * l));
    if (std::isinf(z0)) return reset;
    return std::exp(-t) * cir_transition_density(t, z, z0) + reset;
}

double closed_form_cdf_from_zero(double t, double z) {
    if (!(t > 0.0)) throw NonpositiveTime("cdf needs t > 0");
    if (z <= 0.0) return 0.0;
    const double l = ell(t);
    const double y = z / (2.0 * l);
    return std::exp(-t) * (-std::expm1(-y) - y * std::exp(-y)) + 2.0 * l * -std::expm1(-y);
}

double GriddedDensity::operator()(double x) const {
    if (x <= z.front()) return f.front();
    if (x >= z.back()) return 0.0;
    const auto it = std::upper_bound(z.begin(), z.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - z.begin());
    const double w = (x - z[i - 1]) / (z[i] - z[i - 1]);
    return (1.0 - w) * f[i - 1] + w * f[i];
}

namespace {

GriddedDensity solve_on_grid(const std::function<double(double)>& initial, double duration,
                             const FokkerPlanckGrid& grid) {
    const std::size_t m = grid.intervals;
    if (m < 4) throw InvalidArgument("grid needs at least 4 intervals");
    if (grid.z_max < 20.0) throw InvalidArgument("z_max must be at least 20");
    if (!(duration > 0.0)) throw NonpositiveTime("solve duration must be positive");
    GriddedDensity out;
    out.z.resize(m + 1);
    const double k = grid.stretch;
    for (std::size_t i = 0; i <= m; ++i) {
        const double s = static_cast<double>(i) / static_cast<double>(m);
        out.z[i] = k > 0.0 ? grid.z_max * std::expm1(k * s) / std::expm1(k) : grid.z_max * s;
    }
    out.z[m] = grid.z_max;

    // Row i of the spatial operator: lo[i] f[i-1] + mid[i] f[i] + hi[i] f[i+1].
    std::vector<double> lo(m + 1, 0.0), mid(m + 1, 0.0), hi(m + 1, 0.0);
    for (std::size_t i = 1; i < m; ++i) {
        const double hm = out.z[i] - out.z[i - 1], hp = out.z[i + 1] - out.z[i], z = out.z[i];
        const double d2l = 2.0 / (hm * (hm + hp)), d2m = -2.0 / (hm * hp), d2h = 2.0 / (hp * (hm + hp));
        const double d1l = -hp / (hm * (hm + hp)), d1m = (hp - hm) / (hm * hp), d1h = hm / (hp * (hm + hp));
        lo[i] = z * (d2l + d1l);
        mid[i] = z * (d2m + d1m);
        hi[i] = z * (d2h + d1h);
    }

    std::vector<double> f(m + 1), prev;
    for (std::size_t i = 0; i <= m; ++i) f[i] = initial(out.z[i]);
    f[0] = 1.0;
    f[m] = 0.0;

    const auto steps = static_cast<std::size_t>(std::ceil(duration / grid.dt - 1e-9));
    const double dt = duration / static_cast<double>(steps);
    std::vector<double> rhs(m + 1), cp(m + 1), dp(m + 1);
    for (std::size_t n = 0; n < steps; ++n) {
        // Backward Euler for the first step, BDF2 afterwards.
        const bool bdf2 = n > 0;
        const double diag = bdf2 ? 1.5 : 1.0;
        for (std::size_t i = 0; i <= m; ++i) rhs[i] = bdf2 ? 2.0 * f[i] - 0.5 * prev[i] : f[i];
        rhs[0] = 1.0;
        rhs[m] = 0.0;
        // Thomas algorithm with Dirichlet rows at both ends.
        cp[0] = 0.0;
        dp[0] = rhs[0];
        for (std::size_t i = 1; i < m; ++i) {
            const double a = -dt * lo[i], b = diag - dt * mid[i], c = -dt * hi[i];
            const double denom = b - a * cp[i - 1];
            cp[i] = c / denom;
            dp[i] = (rhs[i] - a * dp[i - 1]) / denom;
        }
        std::vector<double> next(m + 1);
        next[m] = rhs[m];
        for (std::size_t i = m; i-- > 0;) next[i] = dp[i] - cp[i] * next[i + 1];
        next[0] = 1.0;
        prev = std::move(f);
        f = std::move(next);
    }
    out.f = std::move(f);
    out.time = duration;
    return out;
}

}  // namespace

GriddedDensity fokker_planck_solve(const std::function<double(double)>& initial, double duration,
                                   const FokkerPlanckGrid& grid, bool check_refinement) {
    GriddedDensity coarse = solve_on_grid(initial, duration, grid);
    if (check_refinement) {
        FokkerPlanckGrid finer = grid;
        finer.intervals = grid.intervals * 2;
        const GriddedDensity fine = solve_on_grid(initial, duration, finer);
        double gap = 0.0;
        for (std::size_t i = 0; i < coarse.z.size(); ++i) gap = std::max(gap, std::abs(coarse.f[i] - fine.f[2 * i]));
        if (gap > 10.0 * grid.tolerance)
            throw GridTooCoarse("halving the grid spacing moved the solution by " + std::to_string(gap));
    }
    return coarse;
}

GriddedDensity fokker_planck_from_zero(double t, const FokkerPlanckGrid& grid, double eps, bool check_refinement) {
    if (!(t > eps)) throw NonpositiveTime("t must exceed the start time eps");
    GriddedDensity g = fokker_planck_solve([eps](double z) { return closed_form_density(eps, z, 0.0); }, t - eps,
                                           grid, check_refinement);
    g.time = t;
    return g;
}

}  // namespace inclab
