#include <cmath>

#include "doctest.h"
#include "inclab/embeddings.hpp"
#include "inclab/errors.hpp"
#include "inclab/fleming_viot.hpp"
#include "inclab/ip_simulator.hpp"
#include "inclab/numerics.hpp"

using namespace inclab;

namespace {

// Sums H(nu(sigma')) - H(nu(sigma)) over every particle event with its rate.
double labelled_generator_by_events(const LabelledState& s, const CylindricalFunction& H, double d) {
    const double before = H(type_embedding(s));
    double total = 0.0;
    for (std::size_t i = 0; i < s.positions.size(); ++i) {
        for (std::size_t j = 0; j < s.positions.size(); ++j) {
            LabelledState t = s;
            t.positions[i] = s.positions[j];
            total += H(type_embedding(t)) - before;
        }
        for (std::size_t x = 0; x < s.L; ++x) {
            LabelledState t = s;
            t.positions[i] = static_cast<std::uint32_t>(x);
            total += d * (H(type_embedding(t)) - before);
        }
    }
    return total;
}

}  // namespace

TEST_CASE("type embedding") {
    const LabelledState top{5, {4, 4, 4}};
    const auto nu = type_embedding(top);
    REQUIRE(nu.size() == 1);
    CHECK(nu.atoms()[0].location == 1.0);
    CHECK(nu.atoms()[0].weight == 1.0);

    const LabelledState spread{4, {0, 1, 2, 3}};
    const auto flat = type_embedding(spread);
    REQUIRE(flat.size() == 4);
    for (const auto& a : flat.atoms()) CHECK(a.weight == doctest::Approx(0.25));

    Rng rng(1);
    const auto s = LabelledState::uniform(30, 45, rng);
    double sum = 0.0;
    for (auto p : s.positions) sum += p + 1.0;
    CHECK(integrate(type_embedding(s), Observable::monomial(1)) == doctest::Approx(sum / (45.0 * 30.0)));
    CHECK(iota(s).particles() == 45);
    CHECK(LabelledState::from_configuration(iota(s)).positions.size() == 45);
    CHECK(iota(LabelledState::from_configuration(Configuration({2, 0, 3}))) == Configuration({2, 0, 3}));
}

TEST_CASE("mutation operator and Fleming-Viot generator") {
    CHECK(mutation_fv(Observable::constant(2.0), 0.3, 1.5) == doctest::Approx(0.0).scale(1.0));
    for (double u : {0.0, 0.2, 0.9}) CHECK(mutation_fv(Observable::monomial(1), u, 2.0) == doctest::Approx(2.0 * (0.5 - u)));
    CHECK(integral_unit_interval(Observable::window(0, 0.5, 4)) == doctest::Approx(0.1));

    const DiscreteMeasure nu({{0.2, 0.5}, {0.8, 0.5}}, Scale::Macro);
    const double theta = 1.3;
    const auto z = Observable::monomial(1);
    CHECK(fv_generator(nu, CylindricalFunction::linear(z), theta) == doctest::Approx(theta * (0.5 - 0.5)).scale(1.0));
    // nu(z)^2: 2 nu(z) A nu(z) + 2 Var_nu(z)
    const double mean = 0.5, var = 0.5 * 0.04 + 0.5 * 0.64 - 0.25;
    CHECK(fv_generator(nu, CylindricalFunction::product({z, z}), theta) ==
          doctest::Approx(2 * mean * theta * (0.5 - mean) + 2 * var));
    CHECK_THROWS_AS(fv_generator(DiscreteMeasure::dirac(1.0, Scale::Meso), CylindricalFunction::linear(z), 1.0),
                    DomainMismatch);
}

TEST_CASE("labelled generator identity") {
    Rng rng(2);
    const auto s = LabelledState::uniform(50, 70, rng);
    const auto id = labelled_generator_identity(s, Observable::monomial(3), 0.3);
    CHECK(std::abs(id.lhs - id.rhs) < 1e-10);
    CHECK(id.lhs == doctest::Approx(labelled_generator(s, CylindricalFunction::linear(Observable::monomial(3)), 0.3)));
    const auto c = labelled_generator_identity(s, Observable::constant(4.0), 0.3);
    CHECK(std::abs(c.lhs) < 1e-10);
    CHECK(std::abs(c.rhs) < 1e-10);
    for (int trial = 0; trial < 20; ++trial) {
        const auto t = LabelledState::uniform(3 + trial, 2 + 3 * trial, rng);
        const auto w = labelled_generator_identity(t, Observable::window(1, 0.7, 4), 0.05 * trial + 0.01);
        CHECK(std::abs(w.lhs - w.rhs) < 1e-10);
    }
}

TEST_CASE("labelled generator agrees with summation over particle events") {
    Rng rng(3);
    const auto z = Observable::monomial(1), z2 = Observable::monomial(2);
    const std::vector<CylindricalFunction> tests = {
        CylindricalFunction::linear(z2),
        CylindricalFunction::product({z, z2}),
        CylindricalFunction::product({z, Observable::window(0, 0.6, 4), z2}, 0.5) + CylindricalFunction::linear(z),
    };
    for (int trial = 0; trial < 15; ++trial) {
        const auto s = LabelledState::uniform(2 + trial % 6, 1 + trial % 7, rng);
        for (const auto& H : tests) {
            const double fast = labelled_generator(s, H, 0.4);
            CHECK(fast == doctest::Approx(labelled_generator_by_events(s, H, 0.4)).epsilon(1e-10).scale(1.0));
        }
    }
}

TEST_CASE("labelled dynamics") {
    const double d = 0.7;
    {
        const IPParams params{5, 1, d, TimeScale::Raw};
        std::vector<double> counts(5, 0.0);
        const int reps = 5000;
        for (int r = 0; r < reps; ++r) {
            Rng rng = derive_stream(10, r);
            const auto traj = labelled_simulate(params, LabelledState{5, {0}}, {20.0}, rng);
            counts[traj.snapshots[0].positions[0]] += 1.0;
        }
        CHECK(chi_square_test(counts, std::vector<double>(5, reps / 5.0)).pvalue > 1e-3);
    }
    {
        const IPParams params{2, 2, 1.0, TimeScale::Raw};
        std::vector<double> counts(3, 0.0);
        const int reps = 6000;
        for (int r = 0; r < reps; ++r) {
            Rng rng = derive_stream(11, r);
            const auto traj = labelled_simulate(params, LabelledState{2, {0, 0}}, {10.0}, rng);
            counts[iota(traj.snapshots[0])[0]] += 1.0;
        }
        CHECK(chi_square_test(counts, std::vector<double>(3, reps / 3.0)).pvalue > 1e-3);
    }
    {
        const IPParams params{6, 9, d, TimeScale::Raw};
        const double T = 0.5, rate = labelled_rate(6, 9, d);
        CHECK(rate == doctest::Approx(81 + d * 54));
        std::vector<double> events;
        std::uint64_t noops = 0, total = 0;
        for (int r = 0; r < 2000; ++r) {
            Rng rng = derive_stream(12, r);
            const auto traj = labelled_simulate(params, LabelledState{6, {0, 1, 2, 3, 4, 5, 0, 1, 2}}, {T}, rng);
            events.push_back(static_cast<double>(traj.event_count));
            noops += traj.noop_count;
            total += traj.event_count;
        }
        const auto m = mean_and_stderr(events);
        CHECK(std::abs(m.mean - rate * T) < 3 * m.stderr_);
        CHECK(noops > 0);
        CHECK(noops < total);
    }
    CHECK_THROWS_AS(labelled_simulate(IPParams{4, 3, d, TimeScale::Raw}, LabelledState{4, {0, 1}}, {1.0}, 1ULL),
                    MismatchedSetup);
}

TEST_CASE("labelled and unlabelled dynamics have the same projection") {
    const std::size_t L = 64;
    const std::int64_t N = 64;
    const double d = 1.0 / 8.0;
    const IPParams params{L, N, d, TimeScale::Raw};
    std::vector<std::int64_t> flat(L, 1);
    const Configuration init(flat);
    const LabelledState linit = LabelledState::from_configuration(init);
    std::vector<double> a, b;
    const double t = 0.1;
    for (int r = 0; r < 1500; ++r) {
        Rng ra = derive_stream(20, r), rb = derive_stream(21, r);
        a.push_back(phi_moment(iota(labelled_simulate(params, linit, {t}, ra).snapshots[0]), 2));
        b.push_back(phi_moment(simulate(params, init, {t}, rb).snapshots[0], 2));
    }
    CHECK(ks_pvalue(ks_two_sample(a, b), 750.0) > 1e-3);
}

TEST_CASE("Fleming-Viot convergence report") {
    const auto report = fv_convergence_report({1024, 64, 256}, 1.0, 1.0);
    CHECK(report.grid() == std::vector<std::size_t>{64, 256, 1024});
    CHECK(report.rows.size() == 36);
    CHECK(report.max_error(1024) <= report.max_error(64) / 2.0);
    CHECK(report.max_error(256) < report.max_error(64));
}
