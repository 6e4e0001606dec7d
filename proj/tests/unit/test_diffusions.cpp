#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "inclab/diffusions.hpp"
#include "inclab/embeddings.hpp"
#include "inclab/errors.hpp"
#include "inclab/ip_simulator.hpp"
#include "inclab/metrics.hpp"
#include "inclab/numerics.hpp"
#include "inclab/stationary.hpp"

using namespace inclab;

namespace {

double sorted_w1(std::vector<double> a, std::vector<double> b) {
    REQUIRE(a.size() == b.size());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s / static_cast<double>(a.size());
}

// Classical fourth-order Runge-Kutta on the triangular moment system.
std::vector<double> moments_by_rk4(double theta, std::vector<double> x, double t) {
    const std::size_t top = x.size();
    auto rhs = [&](const std::vector<double>& y) {
        std::vector<double> out(top, 0.0);
        for (std::size_t i = 1; i < top; ++i) {
            const double m = static_cast<double>(i + 1);
            out[i] = m * (m - 1) * y[i - 1] - m * (m - 1 + theta) * y[i];
        }
        return out;
    };
    const int steps = 20000;
    const double h = t / steps;
    for (int s = 0; s < steps; ++s) {
        auto k1 = rhs(x);
        std::vector<double> y(top);
        for (std::size_t i = 0; i < top; ++i) y[i] = x[i] + 0.5 * h * k1[i];
        auto k2 = rhs(y);
        for (std::size_t i = 0; i < top; ++i) y[i] = x[i] + 0.5 * h * k2[i];
        auto k3 = rhs(y);
        for (std::size_t i = 0; i < top; ++i) y[i] = x[i] + h * k3[i];
        auto k4 = rhs(y);
        for (std::size_t i = 0; i < top; ++i) x[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    }
    return x;
}

}  // namespace

TEST_CASE("zero time returns the start") {
    Rng rng(1);
    CHECK(simulate_jump_diffusion(meso_dual_spec(), 3.5, 0.0, Scheme::exact_cir(), rng) == 3.5);
    CHECK(simulate_jump_diffusion(macro_dual_spec(1.0), 0.25, 0.0, Scheme::euler(), rng) == 0.25);
    CHECK(std::isinf(simulate_jump_diffusion(meso_dual_spec(), INF, 0.0, Scheme::exact_cir(), rng)));
    CHECK_THROWS_AS(simulate_jump_diffusion(macro_dual_spec(1.0), 0.5, 1.0, Scheme::exact_cir(), rng), SchemeMismatch);
    CHECK_THROWS_AS(simulate_jump_diffusion(meso_dual_spec(), 0.5, -1.0, Scheme::exact_cir(), rng), NonpositiveTime);
}

TEST_CASE("exact square-root transition from zero") {
    JumpDiffusionSpec spec = meso_dual_spec();
    spec.reset_rate = 0.0;
    Rng rng(2);
    std::vector<double> xs;
    for (int i = 0; i < 100000; ++i) xs.push_back(simulate_jump_diffusion(spec, 0.0, 1.0, Scheme::exact_cir(), rng));
    const double scale = -std::expm1(-1.0);  // 2 l_1
    const double D = ks_one_sample(xs, [&](double z) {
        const double y = z / scale;
        return 1.0 - std::exp(-y) * (1.0 + y);
    });
    CHECK(D < 0.01);
}

TEST_CASE("exact transition agrees with a fine Euler scheme") {
    JumpDiffusionSpec spec = meso_dual_spec();
    spec.reset_rate = 0.0;
    const std::size_t n = 100000;
    const auto exact = ensemble_law(spec, DiscreteMeasure::dirac(2.0, Scale::Meso), 1.0, n, Scheme::exact_cir(), 10);
    const auto euler = ensemble_law(spec, DiscreteMeasure::dirac(2.0, Scale::Meso), 1.0, n, Scheme::euler(1e-4), 11);
    CHECK(sorted_w1(exact.states, euler.states) < 0.02);
    const double D = ks_one_sample(exact.states, [](double z) { return cir_transition_cdf(1.0, z, 2.0); });
    CHECK(D < 0.01);
}

TEST_CASE("ensembles of the dual processes") {
    const auto zero = ensemble_law(meso_dual_spec(), DiscreteMeasure::dirac(0.0, Scale::Meso), 0.0, 50,
                                   Scheme::exact_cir(), 3);
    for (double s : zero.states) CHECK(s == 0.0);

    for (double t : {0.5, 1.0, 2.0}) {
        const std::size_t n = 40000;
        const auto law = ensemble_law(meso_dual_spec(), DiscreteMeasure::dirac(INF, Scale::Meso), t, n,
                                      Scheme::exact_cir(), 4);
        const double p = mass_solution(0.0, t);
        CHECK(std::abs(law.finite_fraction() - p) < 3 * std::sqrt(p * (1 - p) / n));
    }

    const auto beta = ensemble_law(macro_dual_spec(1.0), DiscreteMeasure::dirac(0.5, Scale::Macro), 20.0, 100000,
                                   Scheme::euler(1e-3), 5);
    CHECK(ks_one_sample(beta.states, [](double z) { return z; }) < 0.02);

    const auto a = ensemble_law(meso_dual_spec(), DiscreteMeasure::dirac(1.0, Scale::Meso), 0.7, 300,
                                Scheme::euler(1e-2), 9, 1);
    const auto b = ensemble_law(meso_dual_spec(), DiscreteMeasure::dirac(1.0, Scale::Meso), 0.7, 300,
                                Scheme::euler(1e-2), 9, 3);
    CHECK(a.states == b.states);
}

TEST_CASE("stationary mean and ergodicity of the mesoscopic dual") {
    const auto law = ensemble_law(meso_dual_spec(), DiscreteMeasure::dirac(5.0, Scale::Meso), 12.0, 100000,
                                  Scheme::exact_cir(), 6);
    const auto m = mean_and_stderr(law.states);
    CHECK(std::abs(m.mean - 1.0) < 3 * m.stderr_);

    Rng rng(7);
    auto exp_cdf = [](double z) { return -std::expm1(-z); };
    for (double t : {1.0, 2.0, 3.0}) {
        const auto at = ensemble_law(meso_dual_spec(), DiscreteMeasure::dirac(5.0, Scale::Meso), t, 20000,
                                     Scheme::exact_cir(), 8);
        const double tv = tv_binned_to_cdf(at.to_measure(Scale::Meso), exp_cdf);
        const double eps = tv_bootstrap_halfwidth(at.states, exp_cdf, 64, 100, rng);
        CHECK(tv <= std::exp(-t) + eps);
    }
}

TEST_CASE("Euler weak error is below Monte Carlo resolution") {
    const auto coarse = ensemble_law(macro_dual_spec(1.0), DiscreteMeasure::dirac(1.0, Scale::Macro), 1.0, 100000,
                                     Scheme::euler(2e-3), 12);
    const auto fine = ensemble_law(macro_dual_spec(1.0), DiscreteMeasure::dirac(1.0, Scale::Macro), 1.0, 100000,
                                   Scheme::euler(1e-3), 13);
    const auto a = mean_and_stderr(coarse.states), b = mean_and_stderr(fine.states);
    CHECK(std::abs(a.mean - b.mean) < 3 * std::hypot(a.stderr_, b.stderr_));
    CHECK(std::abs(b.mean - macro_mean_solution(1.0, 1.0, 1.0)) < 3 * b.stderr_ + 2e-3);
}

TEST_CASE("moment equations") {
    CHECK(mass_solution(0.0, std::log(2.0)) == doctest::Approx(0.5));
    CHECK(mass_solution(0.3, 0.0) == doctest::Approx(0.3));
    CHECK(macro_mean_solution(1.0, 1.0, 50.0) == doctest::Approx(0.5));
    CHECK(macro_mean_solution(3.0, 0.2, 0.0) == doctest::Approx(0.2));
    CHECK(macro_mean_solution(1.0, 1.0, 0.5) == doctest::Approx(0.5 + 0.5 * std::exp(-2.0)));

    const auto stationary = pd_moments_solution(1.0, {1.0, 1.0, 1.0, 1.0}, 60.0);
    CHECK(stationary[0] == doctest::Approx(1.0));
    CHECK(stationary[1] == doctest::Approx(0.5));
    CHECK(stationary[2] == doctest::Approx(1.0 / 3.0));
    CHECK(stationary[3] == doctest::Approx(pd_stationary_moment(4, 1.0)));

    for (double theta : {0.5, 2.0}) {
        const std::vector<double> start = {1.0, 0.6, 0.4, 0.3, 0.25};
        for (double t : {0.05, 0.4, 1.5}) {
            const auto exact = pd_moments_solution(theta, start, t);
            const auto rk = moments_by_rk4(theta, start, t);
            for (std::size_t i = 0; i < start.size(); ++i) CHECK(exact[i] == doctest::Approx(rk[i]).epsilon(1e-9));
        }
    }
}

TEST_CASE("Wright-Fisher and Jacobi diffusions") {
    Rng rng(21);
    for (int i = 0; i < 20; ++i) {
        const auto z = simulate_wright_fisher(3, 0.8, {0.1, 0.4, 0.3, 0.2}, 0.5, 1e-3, rng);
        double s = 0.0;
        for (double v : z) {
            CHECK(v >= 0.0);
            s += v;
        }
        CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK_THROWS_AS(simulate_wright_fisher(2, 1.0, {0.5, 0.6, 0.1}, 1.0, 1e-3, rng), BadSimplexPoint);
    CHECK_THROWS_AS(simulate_wright_fisher(2, 1.0, {0.5, 0.5}, 1.0, 1e-3, rng), BadSimplexPoint);

    for (double t : {0.1, 5.0}) {
        const auto j = simulate_jacobi(1.0, 0.0, t, 1e-3, rng);
        CHECK(j.state == 0.0);
        CHECK(j.absorbed);
    }
    int absorbed = 0;
    for (int i = 0; i < 1000; ++i) absorbed += simulate_jacobi(1.0, 0.5, 200.0, 1e-3, rng).absorbed ? 1 : 0;
    CHECK(absorbed >= 990);
}

TEST_CASE("duality with the particle system") {
    // At finite dL the particle side carries an O(1/dL) bias, so the residual
    // must shrink as the system grows rather than vanish at one size.
    const Observable h = Observable::window(0, 3.0, 4);
    const double t = 0.5;
    std::vector<double> linear, product;
    for (std::size_t L : {64, 1024}) {
        const double d = 1.0 / std::sqrt(static_cast<double>(L));
        const IPParams params{L, static_cast<std::int64_t>(L), d, TimeScale::Meso};
        const Configuration init =
            config_from_measure(DiscreteMeasure::dirac(1.0, Scale::Meso), L, static_cast<std::int64_t>(L), d);
        const auto ip = run_ensemble(params, init, {t}, 300, 41, Scale::Meso);
        const auto dual =
            ensemble_law(meso_dual_spec(), embed(init, Scale::Meso, d), t, 100000, Scheme::exact_cir(), 42);
        linear.push_back(duality_residual(ip.measures[0], t, dual, h, Scale::Meso, 43).residual);
        std::vector<double> integrals;
        for (const auto& m : ip.measures[0]) integrals.push_back(integrate(m, h));
        product.push_back(product_duality_residual(integrals, t, dual, h, 2, 44).residual);
        CHECK_THROWS_AS(duality_residual(ip.measures[0], 0.4, dual, h, Scale::Meso, 1), MismatchedSetup);
    }
    CHECK(linear[1] < linear[0] / 2.5);
    CHECK(product[1] < product[0] / 2.5);

    const std::size_t L = 256;
    const double d = 1.0 / 16.0;
    const IPParams params{L, 256, d, TimeScale::Meso};
    const Configuration init = config_from_measure(DiscreteMeasure::dirac(1.0, Scale::Meso), L, 256, d);
    const auto at_zero = run_ensemble(params, init, {0.0}, 20, 45, Scale::Meso);
    const auto dual_zero = ensemble_law(meso_dual_spec(), embed(init, Scale::Meso, d), 0.0, 1000,
                                        Scheme::exact_cir(), 46);
    CHECK(duality_residual(at_zero.measures[0], 0.0, dual_zero, h, Scale::Meso, 47).residual < 1e-12);
}
