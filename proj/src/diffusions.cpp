#include "inclab/diffusions.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "inclab/errors.hpp"
#include "inclab/numerics.hpp"
#include "inclab/parallel.hpp"

namespace inclab {

JumpDiffusionSpec macro_dual_spec(double theta) {
    if (theta < 0.0) throw InvalidArgument("theta must be nonnegative");
    JumpDiffusionSpec s;
    s.name = "macro_dual";
    s.drift_const = 2.0;
    s.drift_linear = -(2.0 + theta);
    s.sigma2_linear = 2.0;
    s.sigma2_quadratic = -2.0;
    s.reset_rate = theta;
    s.upper = 1.0;
    return s;
}

JumpDiffusionSpec meso_dual_spec() {
    JumpDiffusionSpec s;
    s.name = "meso_dual";
    s.drift_const = 2.0;
    s.drift_linear = -1.0;
    s.sigma2_linear = 2.0;
    s.reset_rate = 1.0;
    s.upper = INF;
    s.square_root_affine = true;
    return s;
}

JumpDiffusionSpec jacobi_spec(double theta) {
    if (theta < 0.0) throw InvalidArgument("theta must be nonnegative");
    JumpDiffusionSpec s;
    s.name = "jacobi";
    s.drift_linear = -theta;
    s.sigma2_linear = 2.0;
    s.sigma2_quadratic = -2.0;
    s.upper = 1.0;
    s.absorbing_at_zero = true;
    return s;
}

double sample_chi_square_even(std::int64_t m, Rng& rng) {
    if (m <= 16) {
        double s = 0.0;
        for (std::int64_t i = 0; i < m; ++i) s -= std::log(uniform_open(rng));
        return 2.0 * s;
    }
    std::gamma_distribution<double> g(static_cast<double>(m), 2.0);
    return g(rng);
}

double sample_cir_transition(double z0, double u, Rng& rng) {
    if (!(u > 0.0)) throw NonpositiveTime("transition time must be positive");
    const double l = -std::expm1(-u) / 2.0;
    const double lambda = z0 * std::exp(-u) / l;
    std::int64_t k = 0;
    if (lambda > 0.0) {
        std::poisson_distribution<std::int64_t> poisson(lambda / 2.0);
        k = poisson(rng);
    }
    // noncentral chi-square(4, lambda) as chi-square(4 + 2K)
    return l * sample_chi_square_even(2 + k, rng);
}

namespace {

double euler_path(const JumpDiffusionSpec& spec, double z, double duration, double dt, Rng& rng) {
    if (!(dt > 0.0)) throw InvalidArgument("Euler step must be positive");
    const auto steps = static_cast<std::int64_t>(std::ceil(duration / dt - 1e-9));
    if (steps <= 0) return z;
    const double h = duration / static_cast<double>(steps);
    const double sqrt_h = std::sqrt(h);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::int64_t i = 0; i < steps; ++i) {
        if (spec.absorbing_at_zero && z <= 0.0) return 0.0;
        const double zp = std::max(z, 0.0);
        const double vol = std::sqrt(std::max(spec.sigma2(zp), 0.0));
        z = zp + spec.drift(zp) * h + vol * sqrt_h * normal(rng);
        z = std::clamp(z, 0.0, spec.upper);
    }
    if (spec.absorbing_at_zero && z <= 0.0) return 0.0;
    return z;
}

}  // namespace

double simulate_jump_diffusion(const JumpDiffusionSpec& spec, double z0, double t, const Scheme& scheme,
                               Rng& rng) {
    if (t < 0.0 || std::isnan(t)) throw NonpositiveTime("simulation time must be nonnegative");
    if (scheme.kind == SchemeKind::ExactCir && !spec.square_root_affine)
        throw SchemeMismatch("exact transition is only available for the mesoscopic dual, not " + spec.name);
    if (std::isinf(z0)) {
        if (!(spec.reset_rate > 0.0)) throw InvalidArgument("a start at INF needs a positive reset rate");
    } else if (z0 < 0.0 || z0 > spec.upper) {
        throw InvalidArgument("initial state outside the domain");
    }
    if (t == 0.0) return z0;

    // Splice in reset times; only the segment after the last one matters.
    double last_reset = -1.0;
    if (spec.reset_rate > 0.0) {
        double s = 0.0;
        for (;;) {
            s += exponential(rng, spec.reset_rate);
            if (s > t) break;
            last_reset = s;
        }
    }
    const double start = last_reset >= 0.0 ? spec.reset_target : z0;
    const double duration = last_reset >= 0.0 ? t - last_reset : t;
    if (std::isinf(start)) return INF;
    if (duration <= 0.0) return start;
    if (scheme.kind == SchemeKind::ExactCir) return sample_cir_transition(start, duration, rng);
    return euler_path(spec, start, duration, scheme.dt, rng);
}

double EnsembleLaw::finite_fraction() const {
    if (states.empty()) return 0.0;
    const auto finite = std::count_if(states.begin(), states.end(), [](double s) { return std::isfinite(s); });
    return static_cast<double>(finite) / static_cast<double>(states.size());
}

std::vector<double> EnsembleLaw::finite_states() const {
    std::vector<double> out;
    for (double s : states)
        if (std::isfinite(s)) out.push_back(s);
    return out;
}

DiscreteMeasure EnsembleLaw::to_measure(Scale scale) const { return DiscreteMeasure::empirical(states, scale); }

double sample_from_measure(const DiscreteMeasure& law, Rng& rng) {
    double u = uniform01(rng);
    const auto& atoms = law.atoms();
    for (const auto& a : atoms) {
        if (u < a.weight) return a.location;
        u -= a.weight;
    }
    return atoms.back().location;
}

EnsembleLaw ensemble_law(const JumpDiffusionSpec& spec, const DiscreteMeasure& initial, double t,
                         std::size_t replicas, const Scheme& scheme, std::uint64_t seed, std::size_t workers) {
    if (replicas < 1) throw InvalidArgument("replicas must be at least 1");
    for (const auto& a : initial.atoms())
        if (a.location > spec.upper && !(std::isinf(a.location) && spec.reset_rate > 0.0))
            throw InvalidArgument("initial law has atoms outside the domain");
    EnsembleLaw law;
    law.time = t;
    law.seed = seed;
    law.states.assign(replicas, 0.0);
    parallel_for(replicas, workers, [&](std::size_t r) {
        Rng rng = derive_stream(seed, r);
        const double z0 = sample_from_measure(initial, rng);
        law.states[r] = simulate_jump_diffusion(spec, z0, t, scheme, rng);
    });
    return law;
}

namespace {

double bootstrap_mean(const std::vector<double>& xs, Rng& rng) {
    NeumaierSum s;
    for (std::size_t i = 0; i < xs.size(); ++i) s.add(xs[uniform_index(rng, xs.size())]);
    return s.value() / static_cast<double>(xs.size());
}

double plain_mean(const std::vector<double>& xs) {
    NeumaierSum s;
    for (double x : xs) s.add(x);
    return s.value() / static_cast<double>(xs.size());
}

double stdev(const std::vector<double>& xs) {
    const double m = plain_mean(xs);
    double v = 0.0;
    for (double x : xs) v += (x - m) * (x - m);
    return std::sqrt(v / static_cast<double>(xs.size() > 1 ? xs.size() - 1 : 1));
}

}  // namespace

DualityResult duality_residual(const DualitySide& particle, const DualitySide& dual, std::uint64_t seed,
                               std::size_t bootstrap) {
    if (std::abs(particle.time - dual.time) > 1e-12 * std::max(1.0, std::abs(particle.time)))
        throw MismatchedSetup("particle and dual ensembles are at different times");
    if (particle.scale != dual.scale) throw MismatchedSetup("particle and dual ensembles use different scales");
    if (particle.values.empty() || dual.values.empty()) throw MismatchedSetup("empty ensemble");
    DualityResult r;
    r.particle_mean = plain_mean(particle.values);
    r.dual_mean = plain_mean(dual.values);
    r.residual = std::abs(r.particle_mean - r.dual_mean);
    Rng rng = derive_stream(seed, 0xB007);
    std::vector<double> diffs(bootstrap);
    for (auto& d : diffs) d = bootstrap_mean(particle.values, rng) - bootstrap_mean(dual.values, rng);
    r.stderr_ = stdev(diffs);
    return r;
}

DualityResult duality_residual(const std::vector<DiscreteMeasure>& particle_measures, double particle_time,
                               const EnsembleLaw& dual, const Observable& h, Scale scale, std::uint64_t seed) {
    DualitySide p{particle_time, scale, {}}, q{dual.time, scale, {}};
    for (const auto& m : particle_measures) {
        if (m.scale() != scale) throw MismatchedSetup("particle measures are on a different scale");
        p.values.push_back(integrate(m, h));
    }
    for (double z : dual.states) q.values.push_back(h.value(z));
    return duality_residual(p, q, seed);
}

DualityResult product_duality_residual(const std::vector<double>& particle_integrals, double particle_time,
                                       const EnsembleLaw& dual, const Observable& h, int n, std::uint64_t seed,
                                       std::size_t bootstrap) {
    if (n < 1) throw InvalidArgument("product order must be positive");
    if (std::abs(particle_time - dual.time) > 1e-12 * std::max(1.0, std::abs(particle_time)))
        throw MismatchedSetup("particle and dual ensembles are at different times");
    const auto groups = dual.states.size() / static_cast<std::size_t>(n);
    if (groups < 2 || particle_integrals.empty()) throw MismatchedSetup("ensembles too small for the product");
    std::vector<double> products(groups);
    for (std::size_t g = 0; g < groups; ++g) {
        double p = 1.0;
        for (int k = 0; k < n; ++k) p *= h.value(dual.states[g * static_cast<std::size_t>(n) + static_cast<std::size_t>(k)]);
        products[g] = p;
    }
    DualityResult r;
    r.particle_mean = std::pow(plain_mean(particle_integrals), n);
    r.dual_mean = plain_mean(products);
    r.residual = std::abs(r.particle_mean - r.dual_mean);
    Rng rng = derive_stream(seed, 0xB008);
    std::vector<double> diffs(bootstrap);
    for (auto& d : diffs)
        d = std::pow(bootstrap_mean(particle_integrals, rng), n) - bootstrap_mean(products, rng);
    r.stderr_ = stdev(diffs);
    return r;
}

double macro_mean_solution(double theta, double m0, double t) {
    const double fixed = 1.0 / (1.0 + theta);
    return fixed + (m0 - fixed) * std::exp(-2.0 * (1.0 + theta) * t);
}

std::vector<double> pd_moments_solution(double theta, const std::vector<double>& initial, double t) {
    if (t < 0.0) throw NonpositiveTime("t must be nonnegative");
    const std::size_t top = initial.size();
    std::vector<double> out(top, 0.0);
    if (top == 0) return out;
    // x_m(t) = sum_j c[m][j] exp(-b_j t), with b_1 = 0 and b_m = m(m-1+theta).
    std::vector<double> rate(top + 1, 0.0);
    for (std::size_t m = 2; m <= top; ++m) rate[m] = static_cast<double>(m) * (static_cast<double>(m) - 1.0 + theta);
    std::vector<std::vector<double>> coef(top + 1, std::vector<double>(top + 1, 0.0));
    coef[1][1] = 1.0;
    for (std::size_t m = 2; m <= top; ++m) {
        const double feed = static_cast<double>(m) * (static_cast<double>(m) - 1.0);
        double particular_at_zero = 0.0;
        for (std::size_t j = 1; j < m; ++j) {
            coef[m][j] = feed * coef[m - 1][j] / (rate[m] - rate[j]);
            particular_at_zero += coef[m][j];
        }
        coef[m][m] = initial[m - 1] - particular_at_zero;
    }
    for (std::size_t m = 1; m <= top; ++m) {
        double v = 0.0;
        for (std::size_t j = 1; j <= m; ++j) v += coef[m][j] * std::exp(-rate[j] * t);
        out[m - 1] = v;
    }
    return out;
}

double mass_solution(double alpha0, double t) { return 1.0 - (1.0 - alpha0) * std::exp(-t); }

std::vector<double> simulate_wright_fisher(std::size_t n, double theta, const std::vector<double>& z0, double t,
                                           double dt, Rng& rng) {
    if (z0.size() != n + 1) throw BadSimplexPoint("expected " + std::to_string(n + 1) + " coordinates");
    double total = 0.0;
    for (double v : z0) {
        if (!(v >= 0.0)) throw BadSimplexPoint("coordinates must be nonnegative");
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-9) throw BadSimplexPoint("coordinates must sum to 1");
    if (t < 0.0) throw NonpositiveTime("t must be nonnegative");
    if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
    std::vector<double> z = z0;
    const auto steps = static_cast<std::int64_t>(std::ceil(t / dt - 1e-9));
    if (steps <= 0) return z;
    const double h = t / static_cast<double>(steps);
    const double sqrt_h = std::sqrt(h);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> root(n + 1), dw(n + 1);
    for (std::int64_t s = 0; s < steps; ++s) {
        // sigma = sqrt(2) (diag(sqrt z) - z sqrt(z)^T) satisfies sigma sigma^T = 2 (diag z - z z^T).
        double projected = 0.0;
        for (std::size_t i = 0; i <= n; ++i) {
            root[i] = std::sqrt(z[i]);
            dw[i] = sqrt_h * normal(rng);
            projected += root[i] * dw[i];
        }
        double outflow = 0.0;
        for (std::size_t i = 1; i <= n; ++i) outflow += z[i];
        std::vector<double> next(n + 1);
        for (std::size_t i = 0; i <= n; ++i) {
            const double drift = i == 0 ? theta * outflow : -theta * z[i];
            next[i] = z[i] + drift * h + std::sqrt(2.0) * (root[i] * dw[i] - z[i] * projected);
            next[i] = std::max(next[i], 0.0);
        }
        double sum = 0.0;
        for (double v : next) sum += v;
        if (sum <= 0.0) throw BadSimplexPoint("Wright-Fisher step left the simplex");
        for (std::size_t i = 0; i <= n; ++i) z[i] = next[i] / sum;
    }
    return z;
}

JacobiOutcome simulate_jacobi(double theta, double z0, double t, double dt, Rng& rng) {
    if (!(z0 >= 0.0 && z0 <= 1.0)) throw InvalidArgument("Jacobi start must lie in [0,1]");
    if (t < 0.0) throw NonpositiveTime("t must be nonnegative");
    if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
    JacobiOutcome out;
    double z = z0;
    if (z <= 0.0) {
        out.absorbed = true;
        return out;
    }
    const auto steps = static_cast<std::int64_t>(std::ceil(t / dt - 1e-9));
    const double h = steps > 0 ? t / static_cast<double>(steps) : 0.0;
    const double sqrt_h = std::sqrt(h);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::int64_t s = 0; s < steps; ++s) {
        z += -theta * z * h + std::sqrt(std::max(2.0 * z * (1.0 - z), 0.0)) * sqrt_h * normal(rng);
        if (z <= 0.0) {
            out.absorbed = true;
            out.state = 0.0;
            return out;
        }
        if (z >= 1.0) {
            z = 1.0;
            out.touched_one = true;
        }
    }
    out.state = z;
    return out;
}

}  // namespace inclab
