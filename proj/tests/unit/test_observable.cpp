#include <cmath>

#include "doctest.h"
#include "inclab/errors.hpp"
#include "inclab/observable.hpp"
#include "inclab/random.hpp"

using namespace inclab;

namespace {

std::vector<Observable> sample_family() {
    return {
        Observable::polynomial({0.3, -1.2, 0.7, 2.0}),
        Observable::window(0, 4.0, 4),
        Observable::window(2, 1.5, 5),
        Observable::window(1, 2.0, 4) * Observable::window(0, 3.0, 6) + Observable::constant(0.25),
        Observable::window(0, 2.5, 4).b_transform(),
        Observable::window(3, 5.0, 7).rescaled(0.6),
    };
}

double central(const Observable& h, double z, int order) {
    const double step = 1e-4;
    if (order == 1) return (h(z + step) - h(z - step)) / (2 * step);
    if (order == 2) return (h(z + step) - 2 * h(z) + h(z - step)) / (step * step);
    const double s = 1e-3;
    return (h(z + 2 * s) - 2 * h(z + s) + 2 * h(z - s) - h(z - 2 * s)) / (2 * s * s * s);
}

}  // namespace

TEST_CASE("jets match central finite differences") {
    Rng rng(3);
    for (const auto& h : sample_family()) {
        for (int i = 0; i < 100; ++i) {
            const double z = 0.01 + 5.9 * uniform01(rng);
            const Jet j = h.jet(z);
            CHECK(j[0] == doctest::Approx(h(z)).epsilon(1e-15));
            for (int order = 1; order <= 3; ++order) {
                const double fd = central(h, z, order);
                const double tol = 1e-6 * std::max(1.0, std::abs(j[order])) * (order == 3 ? 100.0 : 1.0) +
                                   (order == 1 ? 1e-7 : order == 2 ? 1e-5 : 1e-3);
                CHECK(std::abs(fd - j[order]) <= tol);
                CHECK(h.derivative_at(z, order) == doctest::Approx(j[order]).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("windows are three times differentiable at the cutoff") {
    for (int q : {4, 5, 8}) {
        const double a = 1.7;
        const Observable w = Observable::window(1, a, q);
        const Jet at = w.jet(a);
        for (double v : at) CHECK(v == doctest::Approx(0.0).scale(1.0));
        const double eps = 1e-5;
        const Jet left = w.jet(a - eps), right = w.jet(a + eps);
        for (int k = 0; k < 3; ++k) {
            CHECK(std::abs(left[k]) < 1e-9);
            CHECK(right[k] == 0.0);
        }
        CHECK(w.at_infinity() == 0.0);
    }
    CHECK_THROWS_AS(Observable::window(0, 1.0, 3), InvalidArgument);
    CHECK_THROWS_AS(Observable::window(0, -1.0, 4), InvalidArgument);
}

TEST_CASE("values at infinity") {
    CHECK(Observable::constant(3.0).at_infinity() == 3.0);
    CHECK((Observable::window(0, 2.0, 4) + Observable::constant(-1.0)).at_infinity() == -1.0);
    CHECK_THROWS_AS(Observable::monomial(1).at_infinity(), DomainMismatch);
    CHECK(Observable::window(0, 2.0, 4).value(INF) == 0.0);
}

TEST_CASE("symbolic operations agree with pointwise evaluation") {
    Rng rng(8);
    const auto family = sample_family();
    for (std::size_t a = 0; a < family.size(); ++a) {
        const Observable& f = family[a];
        const Observable& g = family[(a + 1) % family.size()];
        const Observable prod = f * g, sum = f + g, diff = f - g;
        const Observable der = f.derivative(), bt = f.b_transform(), resc = f.rescaled(1.7);
        for (int i = 0; i < 50; ++i) {
            const double z = 6.0 * uniform01(rng);
            CHECK(prod(z) == doctest::Approx(f(z) * g(z)).epsilon(1e-12).scale(1.0));
            CHECK(sum(z) == doctest::Approx(f(z) + g(z)).epsilon(1e-12).scale(1.0));
            CHECK(diff(z) == doctest::Approx(f(z) - g(z)).epsilon(1e-12).scale(1.0));
            const Jet j = f.jet(z);
            CHECK(der(z) == doctest::Approx(j[1]).epsilon(1e-10).scale(1.0));
            CHECK(bt(z) == doctest::Approx(j[0] + z * j[1]).epsilon(1e-10).scale(1.0));
            CHECK(resc(z) == doctest::Approx(f(1.7 * z)).epsilon(1e-12).scale(1.0));
        }
    }
}

TEST_CASE("polynomial coefficients") {
    const Observable p = Observable::polynomial({1.0, 0.0, -2.0});
    CHECK(p.is_polynomial());
    CHECK(p.coefficients() == std::vector<double>{1.0, 0.0, -2.0});
    CHECK(p.derivative().coefficients() == std::vector<double>{0.0, -4.0});
    CHECK(p.b_transform().coefficients() == std::vector<double>{1.0, 0.0, -6.0});
    CHECK(Observable::constant(2.0).is_constant());
    CHECK_THROWS_AS(Observable::window(0, 1.0, 4).coefficients(), DomainMismatch);
    CHECK(!Observable::monomial(2).is_bounded());
    CHECK(Observable::window(2, 1.0, 4).is_bounded());
}
