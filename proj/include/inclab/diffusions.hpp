#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "inclab/measure.hpp"
#include "inclab/observable.hpp"
#include "inclab/random.hpp"

namespace inclab {

/// Single-particle jump-diffusion on [0, upper]:
///   dZ = (a0 + a1 Z) dt + sqrt(s1 Z + s2 Z^2) dW
/// between resets to `reset_target` at constant rate `reset_rate`.
struct JumpDiffusionSpec {
    std::string name;
    double drift_const = 0.0;
    double drift_linear = 0.0;
    double sigma2_linear = 0.0;
    double sigma2_quadratic = 0.0;
    double reset_rate = 0.0;
    double reset_target = 0.0;
    double upper = 1.0;  // INF for the half line
    bool square_root_affine = false;  // drift 2 - z, sigma2 2z: admits the exact transition
    bool absorbing_at_zero = false;

    double drift(double z) const { return drift_const + drift_linear * z; }
    double sigma2(double z) const { return sigma2_linear * z + sigma2_quadratic * z * z; }
};

// Macroscopic dual: drift 2-(2+theta)z, sigma2 2z(1-z), resets at rate theta.
JumpDiffusionSpec macro_dual_spec(double theta);
// Mesoscopic dual: drift 2-z, sigma2 2z, resets at rate 1, on [0, INF].
JumpDiffusionSpec meso_dual_spec();
// Jacobi diffusion: drift -theta z, sigma2 2z(1-z), absorbed at 0.
JumpDiffusionSpec jacobi_spec(double theta);

enum class SchemeKind { Euler, ExactCir };

struct Scheme {
    SchemeKind kind = SchemeKind::Euler;
    double dt = 1e-3;

    static Scheme euler(double dt = 1e-3) { return {SchemeKind::Euler, dt}; }
    static Scheme exact_cir() { return {SchemeKind::ExactCir, 0.0}; }
};

// Exact draw from the between-reset transition of the mesoscopic dual over time u.
double sample_cir_transition(double z0, double u, Rng& rng);
// Central chi-square with 2m degrees of freedom.
double sample_chi_square_even(std::int64_t m, Rng& rng);

double simulate_jump_diffusion(const JumpDiffusionSpec& spec, double z0, double t, const Scheme& scheme,
                               Rng& rng);

struct EnsembleLaw {
    std::vector<double> states;  // may contain INF
    double time = 0.0;
    std::uint64_t seed = 0;

    double finite_fraction() const;
    std::vector<double> finite_states() const;
    DiscreteMeasure to_measure(Scale scale) const;
};

double sample_from_measure(const DiscreteMeasure& law, Rng& rng);

EnsembleLaw ensemble_law(const JumpDiffusionSpec& spec, const DiscreteMeasure& initial, double t,
                         std::size_t replicas, const Scheme& scheme, std::uint64_t seed, std::size_t workers = 1);

struct DualitySide {
    double time = 0.0;
    Scale scale = Scale::Macro;
    std::vector<double> values;  // per-replica statistic
};

struct DualityResult {
    double particle_mean = 0.0;
    double dual_mean = 0.0;
    double residual = 0.0;
    double stderr_ = 0.0;  // bootstrap standard error of the difference
};

// |mean over particle replicas of mu_t(h) - mean over dual replicas of h(Z_t)|.
DualityResult duality_residual(const DualitySide& particle, const DualitySide& dual, std::uint64_t seed,
                               std::size_t bootstrap = 400);
DualityResult duality_residual(const std::vector<DiscreteMeasure>& particle_measures, double particle_time,
                               const EnsembleLaw& dual, const Observable& h, Scale scale, std::uint64_t seed);
// Product form: (pooled mu_t(h))^n from the particle replicas, where the pooled
// value is the mean of the per-replica integrals, against the mean of
// h(Z_1)...h(Z_n) over disjoint groups of n dual replicas.
DualityResult product_duality_residual(const std::vector<double>& particle_integrals, double particle_time,
                                       const EnsembleLaw& dual, const Observable& h, int n, std::uint64_t seed,
                                       std::size_t bootstrap = 400);

enum class MomentSystem { MacroMean, PdMoments, Mass };

// Mean of mu_t(z): 1/(1+theta) + (m0 - 1/(1+theta)) e^{-2(1+theta)t}.
double macro_mean_solution(double theta, double m0, double t);
// E[phi_m(t)] for m = 1..initial.size(), phi_1 = 1, exact solution of the triangular system.
std::vector<double> pd_moments_solution(double theta, const std::vector<double>& initial, double t);
// Finite mass 1 - (1 - alpha0) e^{-t}.
double mass_solution(double alpha0, double t);

std::vector<double> simulate_wright_fisher(std::size_t n, double theta, const std::vector<double>& z0, double t,
                                           double dt, Rng& rng);

struct JacobiOutcome {
    double state = 0.0;
    bool absorbed = false;    // hit 0
    bool touched_one = false; // reached 1 at some step
};

JacobiOutcome simulate_jacobi(double theta, double z0, double t, double dt, Rng& rng);

}  // namespace inclab
