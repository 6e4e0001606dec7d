#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "inclab/errors.hpp"
#include "inclab/metrics.hpp"
#include "inclab/numerics.hpp"
#include "inclab/random.hpp"

using namespace inclab;

namespace {

DiscreteMeasure random_measure(Rng& rng, std::size_t atoms, Scale scale, bool with_inf = false) {
    std::vector<Atom> a;
    double total = 0.0;
    for (std::size_t i = 0; i < atoms; ++i) {
        const double loc = scale == Scale::Macro ? uniform01(rng) : 4.0 * uniform01(rng);
        const double w = 0.1 + uniform01(rng);
        a.push_back({loc, w});
        total += w;
    }
    if (with_inf) {
        a.push_back({INF, 0.5});
        total += 0.5;
    }
    for (auto& x : a) x.weight /= total;
    return DiscreteMeasure(a, scale);
}

DiscreteMeasure shifted(const DiscreteMeasure& mu, double c) {
    std::vector<Atom> a = mu.atoms();
    for (auto& x : a) x.location += c;
    return DiscreteMeasure(a, mu.scale());
}

}  // namespace

TEST_CASE("distance examples") {
    const auto zero = DiscreteMeasure::dirac(0.0, Scale::Macro);
    const auto one = DiscreteMeasure::dirac(1.0, Scale::Macro);
    const DiscreteMeasure half({{0.0, 0.5}, {1.0, 0.5}}, Scale::Macro);
    Rng rng(1);
    const auto mu = random_measure(rng, 10, Scale::Macro);
    CHECK(ks_distance(mu, mu) == 0.0);
    CHECK(wasserstein1(mu, mu) == 0.0);
    CHECK(tv_binned(mu, mu) == 0.0);
    CHECK(ks_distance(zero, one) == 1.0);
    CHECK(wasserstein1(zero, one) == doctest::Approx(1.0));
    CHECK(tv_binned(zero, one) == 1.0);
    CHECK(tv_binned(zero, half) == doctest::Approx(0.5));
    CHECK_THROWS_AS(ks_distance(zero, DiscreteMeasure::dirac(0.0, Scale::Meso)), DomainMismatch);
    CHECK_THROWS_AS(wasserstein1(zero, DiscreteMeasure::dirac(0.0, Scale::Meso)), DomainMismatch);
    CHECK_THROWS_AS(tv_binned(zero, DiscreteMeasure::dirac(0.0, Scale::Meso)), DomainMismatch);
}

TEST_CASE("mesoscopic distances use the compactified coordinate") {
    const auto zero = DiscreteMeasure::dirac(0.0, Scale::Meso);
    const auto inf = DiscreteMeasure::dirac(INF, Scale::Meso);
    const auto one = DiscreteMeasure::dirac(1.0, Scale::Meso);
    CHECK(wasserstein1(zero, inf) == doctest::Approx(1.0));
    CHECK(wasserstein1(zero, one) == doctest::Approx(0.5));
    CHECK(wasserstein1(one, inf) == doctest::Approx(0.5));
    CHECK(ks_distance(one, inf) == 1.0);
    CHECK(tv_binned(one, inf) == 1.0);
    const DiscreteMeasure split({{1.0, 0.25}, {INF, 0.75}}, Scale::Meso);
    CHECK(tv_binned(one, split) == doctest::Approx(0.75));
}

TEST_CASE("metric properties on random atom sets") {
    Rng rng(2);
    for (int trial = 0; trial < 300; ++trial) {
        const Scale scale = trial % 2 ? Scale::Macro : Scale::Meso;
        const bool inf = scale == Scale::Meso && trial % 3 == 0;
        const auto a = random_measure(rng, 1 + trial % 20, scale, inf);
        const auto b = random_measure(rng, 1 + (trial * 7) % 25, scale);
        const auto c = random_measure(rng, 1 + (trial * 3) % 15, scale, inf);
        const double ks = ks_distance(a, b), tv = tv_binned(a, b), w = wasserstein1(a, b);
        CHECK(ks >= 0.0);
        CHECK(w >= 0.0);
        CHECK(ks <= tv + 1e-12);
        CHECK(tv <= 1.0);
        CHECK(ks == doctest::Approx(ks_distance(b, a)));
        CHECK(w == doctest::Approx(wasserstein1(b, a)));
        CHECK(w <= wasserstein1(a, c) + wasserstein1(c, b) + 1e-12);
        CHECK(tv <= tv_binned(a, c) + tv_binned(c, b) + 1e-12);
    }
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<Atom> atoms;
        for (int i = 0; i < 8; ++i) atoms.push_back({0.4 * uniform01(rng), 0.125});
        const DiscreteMeasure mu(atoms, Scale::Macro);
        const double c = 0.5 * uniform01(rng);
        CHECK(wasserstein1(mu, shifted(mu, c)) == doctest::Approx(c).epsilon(1e-10));
        const double s = 0.1 * uniform01(rng);
        CHECK(wasserstein1(shifted(mu, s), shifted(mu, c + s)) == doctest::Approx(c).epsilon(1e-10));
    }
}

TEST_CASE("distances against a continuous law") {
    auto uniform_cdf = [](double z) { return std::clamp(z, 0.0, 1.0); };
    const auto zero = DiscreteMeasure::dirac(0.0, Scale::Macro);
    CHECK(ks_distance_to_cdf(zero, uniform_cdf) == doctest::Approx(1.0));
    CHECK(wasserstein1_to_cdf(zero, uniform_cdf) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(wasserstein1_to_cdf(DiscreteMeasure::dirac(0.5, Scale::Macro), uniform_cdf) ==
          doctest::Approx(0.25).epsilon(1e-9));

    auto exp_cdf = [](double z) { return -std::expm1(-z); };
    const double oracle = quad([](double u) { return std::exp(-u / (1.0 - u)); }, 0.0, 1.0 - 1e-15);
    CHECK(wasserstein1_to_cdf(DiscreteMeasure::dirac(0.0, Scale::Meso), exp_cdf) ==
          doctest::Approx(oracle).epsilon(1e-8));
    const double to_inf = quad([](double u) { return -std::expm1(-u / (1.0 - u)); }, 0.0, 1.0 - 1e-15);
    CHECK(wasserstein1_to_cdf(DiscreteMeasure::dirac(INF, Scale::Meso), exp_cdf) ==
          doctest::Approx(to_inf).epsilon(1e-8));

    Rng rng(3);
    std::vector<double> xs;
    for (int i = 0; i < 100000; ++i) xs.push_back(exponential(rng, 1.0));
    const auto emp = DiscreteMeasure::empirical(xs, Scale::Meso);
    CHECK(ks_distance_to_cdf(emp, exp_cdf) == doctest::Approx(ks_one_sample(xs, exp_cdf)).epsilon(1e-9));
    CHECK(ks_distance_to_cdf(emp, exp_cdf) < 0.01);
    CHECK(wasserstein1_to_cdf(emp, exp_cdf) < 0.005);
    CHECK(tv_binned_to_cdf(emp, exp_cdf) < 0.03);
    CHECK(tv_binned_to_cdf(DiscreteMeasure::dirac(INF, Scale::Meso), exp_cdf) == doctest::Approx(1.0));
}

TEST_CASE("bootstrap half-width shrinks with the sample size") {
    auto exp_cdf = [](double z) { return -std::expm1(-z); };
    Rng rng(4);
    std::vector<double> small, large;
    for (int i = 0; i < 1000; ++i) small.push_back(exponential(rng, 1.0));
    for (int i = 0; i < 16000; ++i) large.push_back(exponential(rng, 1.0));
    const double a = tv_bootstrap_halfwidth(small, exp_cdf, 16, 200, rng);
    const double b = tv_bootstrap_halfwidth(large, exp_cdf, 16, 200, rng);
    CHECK(a > 0.0);
    CHECK(b > 0.0);
    CHECK(b < a / 2.0);
}

TEST_CASE("quadratic variation estimator") {
    std::vector<QVSample> sparse = {{0.0, 1.0, 0.0, 0.0, 0.0}, {1.0, 1.0, 0.0, 0.0, 0.0}};
    CHECK_THROWS_AS(qv_estimate(sparse), TooSparse);
    CHECK_THROWS_AS(qv_estimate({{0.0, 1.0, 0.0, 0.0, 0.0}}), TooSparse);

    std::vector<QVSample> constant;
    for (int k = 0; k <= 500; ++k) constant.push_back({k * 0.002, 0.7, 0.0, 0.49, 0.7});
    const auto c = qv_estimate(constant);
    CHECK(c.realized_total() == 0.0);
    CHECK(c.predicted_total() == doctest::Approx(0.0).scale(1.0));

    // Point mass at z: (Bh)^2 integrates to the square of the integral of Bh.
    std::vector<QVSample> point;
    for (int k = 0; k <= 200; ++k) {
        const double z = 0.3 + 0.001 * k, bh = 2 * z;
        point.push_back({k * 0.005, z, 0.2, bh * bh, bh});
    }
    const auto p = qv_estimate(point);
    CHECK(p.predicted_total() == doctest::Approx(0.0).scale(1.0));
    CHECK(p.realized_total() < 1e-12);

    // Brownian motion with drift: the estimator must recover sigma^2 t.
    Rng rng(5);
    const double sigma = 0.8, drift = 1.5, dt = 1e-4;
    std::vector<double> totals;
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<QVSample> bm;
        double x = 0.0;
        for (int k = 0; k <= 10000; ++k) {
            bm.push_back({k * dt, x, drift, 0.5 * sigma * sigma + 0.25, 0.5});
            x += drift * dt + sigma * std::sqrt(dt) * standard_normal(rng);
        }
        const auto q = qv_estimate(bm);
        CHECK(q.predicted_total() == doctest::Approx(sigma * sigma));
        totals.push_back(q.realized_total());
    }
    const auto m = mean_and_stderr(totals);
    CHECK(std::abs(m.mean - sigma * sigma) < 3 * m.stderr_ + 1e-3);
}

TEST_CASE("comparison csv") {
    const std::string csv = comparison_csv({{"ks", 0.25, 0.01, 10, 20}});
    CHECK(csv.rfind("metric,value,stderr,n1,n2\n", 0) == 0);
    CHECK(csv.find("ks,") != std::string::npos);
}
