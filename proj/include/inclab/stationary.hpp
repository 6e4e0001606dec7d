#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "inclab/configuration.hpp"
#include "inclab/observable.hpp"
#include "inclab/random.hpp"

namespace inclab {

// log of Gamma(n+d) / (n! Gamma(d))
double log_weight(std::int64_t n, double d);
// log of Gamma(N+dL) / (N! Gamma(dL)); Z_{0,0} = 1 and Z_{0,N>0} = 0.
double log_partition(std::int64_t L, std::int64_t N, double d);

/// Product-form stationary law of the inclusion process on L sites with N particles.
class CanonicalMeasure {
public:
    CanonicalMeasure(std::size_t L, std::int64_t N, double d);

    std::size_t L() const { return L_; }
    std::int64_t N() const { return N_; }
    double d() const { return d_; }

    double log_probability(const Configuration& config) const;
    // Law of the occupation of one site.
    double marginal(std::int64_t n) const;
    std::vector<double> marginal_pmf() const;
    // Exact draw by sampling the sites one after another from their conditionals.
    Configuration sample(Rng& rng) const;

private:
    std::size_t L_;
    std::int64_t N_;
    double d_;
};

// Law of the occupation of a size-biased site: (L/N) n w(n) Z_{L-1,N-n} / Z_{L,N}.
double size_biased_marginal(std::int64_t n, std::size_t L, std::int64_t N, double d);
std::vector<double> size_biased_pmf(std::size_t L, std::int64_t N, double d);

// gamma^{n-1} / (1+gamma)^n on n >= 1.
double geometric_limit_pmf(std::int64_t n, double gamma);

struct GemSample {
    std::vector<double> weights;  // stick-breaking order
    double dust = 0.0;
};

GemSample sample_gem(double theta, double tol, Rng& rng);
Partition sample_pd(double theta, double tol, Rng& rng);
double sample_beta_1_theta(double theta, Rng& rng);
double sample_exp1(Rng& rng);
// Mass of a size-biased pick from the partition (dust picks return 0).
double size_biased_pick(const Partition& p, Rng& rng);

double beta_moment(int k, double theta);
double beta_1_theta_cdf(double z, double theta);
// Stationary E[phi_m] under PD(theta): (m-1)! Gamma(theta+1) / Gamma(theta+m).
double pd_stationary_moment(int m, double theta);

// Beta(1, theta) expectation of g * A_theta h by exact moment algebra; polynomials only.
double beta_generator_pairing(const Observable& h, const Observable& g, double theta);

// Density at z > 0 of the resetting mesoscopic dual process at time t started
// at z0 (z0 may be INF; then only the part that has reset carries mass).
double closed_form_density(double t, double z, double z0);
// Mass in [0, z] of the same law started at 0.
double closed_form_cdf_from_zero(double t, double z);
// Between-reset transition density of the square-root diffusion z h'' + (2-z) h'.
double cir_transition_density(double u, double z, double z0);
double cir_transition_cdf(double u, double z, double z0);

struct FokkerPlanckGrid {
    double z_max = 30.0;
    std::size_t intervals = 4000;
    double stretch = 8.0;  // exponential clustering of nodes towards 0
    double dt = 2e-4;
    double tolerance = 1e-3;  // used by the refinement check
};

struct GriddedDensity {
    std::vector<double> z;
    std::vector<double> f;
    double time = 0.0;

    double operator()(double x) const;
};

// Implicit BDF2 solution of f_t = z f'' + z f' on [0, z_max] with f(0) = 1 and
// f(z_max) = 0, run for `duration` from the given initial density. With
// check_refinement the solve is repeated on a grid with half the spacing and
// GridTooCoarse is thrown if the two differ by more than 10x the tolerance.
GriddedDensity fokker_planck_solve(const std::function<double(double)>& initial, double duration,
                                   const FokkerPlanckGrid& grid = {}, bool check_refinement = false);
// Starts from the closed-form density at time eps (start at 0) and returns the solution at t.
GriddedDensity fokker_planck_from_zero(double t, const FokkerPlanckGrid& grid = {}, double eps = 0.01,
                                       bool check_refinement = false);

}  // namespace inclab
