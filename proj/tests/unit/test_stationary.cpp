#include <cmath>
#include <map>

#include "doctest.h"
#include "inclab/configuration.hpp"
#include "inclab/errors.hpp"
#include "inclab/generators.hpp"
#include "inclab/numerics.hpp"
#include "inclab/stationary.hpp"

using namespace inclab;

namespace {

// log of prod_{k<n} (k + d) / (k + 1), accumulated in extended precision.
double log_weight_by_product(std::int64_t n, double d) {
    long double s = 0.0L;
    for (std::int64_t k = 0; k < n; ++k)
        s += std::log1p(static_cast<long double>(d - 1.0) / static_cast<long double>(k + 1));
    return static_cast<double>(s);
}

std::map<std::vector<std::int64_t>, double> exhaustive_law(std::size_t L, std::int64_t N, double d) {
    std::map<std::vector<std::int64_t>, double> law;
    double total = 0.0;
    for (const auto& c : enumerate_configurations(L, N)) {
        double w = 1.0;
        for (auto n : c.occupations()) w *= std::exp(log_weight_by_product(n, d));
        law[c.occupations()] = w;
        total += w;
    }
    for (auto& [k, v] : law) v /= total;
    return law;
}

}  // namespace

TEST_CASE("weights and partition functions") {
    const double d = 0.37;
    CHECK(std::exp(log_weight(0, d)) == doctest::Approx(1.0));
    CHECK(std::exp(log_weight(1, d)) == doctest::Approx(d));
    CHECK(std::exp(log_weight(2, d)) == doctest::Approx(d * (d + 1) / 2));
    for (std::int64_t n : {0, 1, 5, 100, 10000}) CHECK(log_weight(n, 1.0) == doctest::Approx(0.0).scale(1.0));
    CHECK(std::exp(log_partition(2, 2, 1.0)) == doctest::Approx(3.0));
    for (std::int64_t n : {0, 3, 50, 12345}) CHECK(log_partition(1, n, d) == doctest::Approx(log_weight(n, d)).epsilon(1e-10));
    for (double dd : {0.01, 0.5, 3.0})
        for (std::int64_t n : {1, 17, 1000, 100000}) {
            const double ref = log_weight_by_product(n, dd);
            CHECK(std::abs(log_weight(n, dd) - ref) <= 1e-12 * std::max(1.0, std::abs(ref)));
        }
    CHECK(log_partition(7, 30, 0.2) == doctest::Approx(log_weight(30, 1.4)).epsilon(1e-12));
}

TEST_CASE("single-site marginals") {
    const CanonicalMeasure small(2, 2, 1.0);
    CHECK(small.marginal(1) == doctest::Approx(1.0 / 3.0));
    const CanonicalMeasure pi(6, 9, 0.4);
    CHECK(pi.marginal(9) == doctest::Approx(std::exp(log_weight(9, 0.4) - log_partition(6, 9, 0.4))));
    const CanonicalMeasure big(50, 200, 0.02);
    double total = 0.0;
    for (double p : big.marginal_pmf()) total += p;
    CHECK(std::abs(total - 1.0) < 1e-10);
}

TEST_CASE("exact sampler reproduces the product law") {
    Rng rng(77);
    for (auto [L, N] : {std::pair<std::size_t, std::int64_t>{3, 4}, {4, 3}}) {
        for (double d : {0.1, 1.0, 3.0}) {
            const auto law = exhaustive_law(L, N, d);
            const CanonicalMeasure pi(L, N, d);
            std::map<std::vector<std::int64_t>, double> seen;
            const int draws = 100000;
            for (int i = 0; i < draws; ++i) seen[pi.sample(rng).occupations()] += 1.0;
            std::vector<double> observed, expected;
            for (const auto& [k, p] : law) {
                observed.push_back(seen[k]);
                expected.push_back(p * draws);
                CHECK(std::abs(std::exp(pi.log_probability(Configuration(k))) - p) < 1e-12);
            }
            CHECK(chi_square_test(observed, expected).pvalue > 0.001);
        }
    }
}

TEST_CASE("extreme parameters stay finite") {
    Rng rng(1);
    const CanonicalMeasure pi(100000, 1000, 0.01);
    const Configuration c = pi.sample(rng);
    CHECK(c.particles() == 1000);
    CHECK(c.sites() == 100000);
    const CanonicalMeasure condensed(50, 5000, 1e-4);
    CHECK(condensed.sample(rng).particles() == 5000);
}

TEST_CASE("size-biased marginal") {
    CHECK(size_biased_marginal(2, 2, 2, 1.0) == doctest::Approx(2.0 / 3.0));
    CHECK(size_biased_marginal(1, 2, 2, 1.0) == doctest::Approx(1.0 / 3.0));
    CHECK(size_biased_marginal(0, 5, 7, 0.3) == 0.0);
    double total = 0.0;
    for (double p : size_biased_pmf(40, 300, 0.05)) total += p;
    CHECK(std::abs(total - 1.0) < 1e-9);

    const auto law = exhaustive_law(3, 4, 0.6);
    for (std::int64_t n = 1; n <= 4; ++n) {
        double oracle = 0.0;
        for (const auto& [occ, p] : law)
            for (auto v : occ)
                if (v == n) oracle += p * static_cast<double>(n) / 4.0;
        CHECK(std::abs(size_biased_marginal(n, 3, 4, 0.6) - oracle) < 1e-10);
    }

    for (std::int64_t n = 1; n <= 10; ++n) {
        const double exact = size_biased_marginal(n, 100000, 1000, 0.01);
        CHECK(std::abs(exact / std::ldexp(1.0, -static_cast<int>(n)) - 1.0) < 0.02);
    }
}

TEST_CASE("geometric limit") {
    CHECK(geometric_limit_pmf(1, 0.0) == 1.0);
    CHECK(geometric_limit_pmf(2, 0.0) == 0.0);
    for (std::int64_t n = 1; n < 20; ++n) CHECK(geometric_limit_pmf(n, 1.0) == doctest::Approx(std::ldexp(1.0, -int(n))));
    double total = 0.0;
    for (std::int64_t n = 1; n < 2000; ++n) total += geometric_limit_pmf(n, 3.5);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("stick-breaking samplers") {
    Rng rng(19);
    std::vector<double> beta;
    for (int i = 0; i < 1000000; ++i) beta.push_back(sample_beta_1_theta(1.0, rng));
    const auto m = mean_and_stderr(beta);
    CHECK(std::abs(m.mean - 0.5) < 3 * m.stderr_);

    for (int i = 0; i < 200; ++i) {
        const auto g = sample_gem(0.7, 1e-6, rng);
        CHECK(g.dust < 1e-6);
        double s = g.dust;
        for (double w : g.weights) s += w;
        CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }

    std::vector<double> phi2;
    for (int i = 0; i < 20000; ++i) phi2.push_back(pd_phi(sample_pd(1.0, 1e-8, rng), 2));
    const auto p2 = mean_and_stderr(phi2);
    CHECK(std::abs(p2.mean - 0.5) < 3 * p2.stderr_);

    for (double theta : {0.5, 1.0, 5.0}) {
        std::vector<double> picks;
        for (int i = 0; i < 20000; ++i) picks.push_back(size_biased_pick(sample_pd(theta, 1e-8, rng), rng));
        CHECK(ks_one_sample(picks, [&](double z) { return beta_1_theta_cdf(z, theta); }) < 0.02);
    }

    std::vector<double> scaled;
    for (int i = 0; i < 100000; ++i) scaled.push_back(100.0 * sample_beta_1_theta(100.0, rng));
    CHECK(ks_one_sample(scaled, [](double z) { return -std::expm1(-z); }) < 0.02);

    std::vector<double> e;
    for (int i = 0; i < 100000; ++i) e.push_back(sample_exp1(rng));
    CHECK(ks_one_sample(e, [](double z) { return -std::expm1(-z); }) < 0.01);
}

TEST_CASE("Beta moments") {
    CHECK(beta_moment(0, 2.0) == 1.0);
    CHECK(beta_moment(1, 1.0) == doctest::Approx(0.5));
    for (double theta : {0.3, 1.0, 4.0})
        for (int k = 1; k <= 5; ++k) {
            // Beta(1, theta) is the law of 1 - U^{1/theta} for uniform U.
            const double oracle = quad([&](double u) { return std::pow(1 - std::pow(u, 1 / theta), k); }, 0.0, 1.0, 1e-13);
            CHECK(beta_moment(k, theta) == doctest::Approx(oracle).epsilon(1e-9));
        }
    CHECK(pd_stationary_moment(3, 1.0) == doctest::Approx(1.0 / 3.0));
    CHECK(pd_stationary_moment(3, 2.0) == doctest::Approx(2.0 / (3.0 * 4.0)));
}

TEST_CASE("pairing of the mutation operator with Beta(1, theta)") {
    const Observable z = Observable::monomial(1), z2 = Observable::monomial(2);
    for (double theta : {0.5, 1.0, 2.5, 7.0}) {
        auto oracle = [&](const Observable& h, const Observable& g) {
            return quad(
                [&](double u) {
                    const double x = 1 - std::pow(u, 1 / theta);
                    return g(x) * mutation_macro(h, x, theta);
                },
                0.0, 1.0, 1e-13);
        };
        CHECK(beta_generator_pairing(z, z2, theta) == doctest::Approx(oracle(z, z2)).epsilon(1e-9));
        CHECK(beta_generator_pairing(z2, z, theta) == doctest::Approx(oracle(z2, z)).epsilon(1e-9));
        const Observable h = Observable::polynomial({0.5, -1.0, 2.0, 0.3});
        CHECK(std::abs(beta_generator_pairing(h, Observable::constant(1.0), theta)) < 1e-12);
        const double scale = theta * std::tgamma(theta + 1) / std::tgamma(theta + 4);
        CHECK(beta_generator_pairing(z, z2, theta) == doctest::Approx(-8 * scale).epsilon(1e-12));
        CHECK(beta_generator_pairing(z2, z, theta) == doctest::Approx(-6 * scale).epsilon(1e-12));
    }
    CHECK(beta_generator_pairing(z, z2, 1.0) == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
    CHECK(beta_generator_pairing(z2, z, 1.0) == doctest::Approx(-1.0 / 4.0).epsilon(1e-12));
}

TEST_CASE("closed-form density of the resetting process") {
    for (double x : {0.1, 1.0, 4.0}) CHECK(closed_form_density(60.0, x, 0.0) == doctest::Approx(std::exp(-x)));
    const double t = 1.0;
    const double from_zero = quad([&](double x) { return closed_form_density(t, x, 0.0); }, 0.0, INF, 1e-12);
    CHECK(from_zero == doctest::Approx(1.0).epsilon(1e-8));
    const double from_inf = quad([&](double x) { return closed_form_density(t, x, INF); }, 0.0, INF, 1e-12);
    CHECK(from_inf == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-8));
    CHECK(from_inf == doctest::Approx(0.632121).epsilon(1e-6));
    const double from_two = quad([&](double x) { return closed_form_density(0.7, x, 2.0); }, 0.0, INF, 1e-12);
    CHECK(from_two == doctest::Approx(1.0).epsilon(1e-7));
    for (double x : {0.05, 0.5, 2.0, 6.0})
        CHECK(closed_form_cdf_from_zero(0.8, x) ==
              doctest::Approx(quad([&](double y) { return closed_form_density(0.8, y, 0.0); }, 0.0, x, 1e-13))
                  .epsilon(1e-9));
    const double ell = 0.5 * (1 - std::exp(-1.0));
    CHECK(ell == doctest::Approx(0.316060).epsilon(1e-6));
    for (double x : {0.2, 1.0, 3.0})
        CHECK(cir_transition_density(1.0, x, 0.0) ==
              doctest::Approx(x / (4 * ell * ell) * std::exp(-x / (2 * ell))).epsilon(1e-10));
    CHECK_THROWS_AS(closed_form_density(0.0, 1.0, 0.0), NonpositiveTime);
}

TEST_CASE("Fokker-Planck solver") {
    const auto sol = fokker_planck_from_zero(1.0);
    CHECK(sol.f.front() == 1.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < sol.z.size(); ++i)
        if (sol.z[i] >= 0.1 && sol.z[i] <= 10.0)
            worst = std::max(worst, std::abs(sol.f[i] - closed_form_density(1.0, sol.z[i], 0.0)));
    CHECK(worst < 1e-3);

    const auto stationary = fokker_planck_solve([](double x) { return std::exp(-x); }, 3.0);
    double drift = 0.0;
    for (std::size_t i = 0; i < stationary.z.size(); ++i)
        if (stationary.z[i] <= 20.0) drift = std::max(drift, std::abs(stationary.f[i] - std::exp(-stationary.z[i])));
    CHECK(drift < 1e-4);
    CHECK(stationary.f.front() == 1.0);

    FokkerPlanckGrid coarse;
    coarse.intervals = 8;
    coarse.tolerance = 1e-6;
    CHECK_THROWS_AS(fokker_planck_from_zero(0.5, coarse, 0.01, true), GridTooCoarse);
}
