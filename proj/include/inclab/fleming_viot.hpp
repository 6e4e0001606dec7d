#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "inclab/configuration.hpp"
#include "inclab/generators.hpp"
#include "inclab/ip_simulator.hpp"
#include "inclab/measure.hpp"
#include "inclab/observable.hpp"
#include "inclab/random.hpp"

namespace inclab {

/// Positions of N labelled particles on sites 0..L-1. Site s sits at type
/// (s + 1) / L.
struct LabelledState {
    std::size_t L = 1;
    std::vector<std::uint32_t> positions;

    std::int64_t particles() const { return static_cast<std::int64_t>(positions.size()); }
    void validate() const;

    static LabelledState from_configuration(const Configuration& config);
    static LabelledState uniform(std::size_t L, std::int64_t N, Rng& rng);
};

// Occupation counts of a labelled state.
Configuration iota(const LabelledState& state);

struct LabelledEvent {
    std::size_t particle = 0;
    std::size_t target = 0;
    double wait = 0.0;
    bool pair = false;  // copied the site of another particle
    bool noop = false;  // target equals the current site
};

// Total clock rate N^2 + dLN, self events included.
double labelled_rate(std::size_t L, std::int64_t N, double d);

// Samples and applies one event of the clock.
LabelledEvent labelled_step(LabelledState& state, double d, Rng& rng);

struct LabelledTrajectory {
    std::vector<double> times;
    std::vector<LabelledState> snapshots;
    std::uint64_t event_count = 0;
    std::uint64_t noop_count = 0;
};

// Snapshots at each schedule time (interpreted on params.time_scale).
LabelledTrajectory labelled_simulate(const IPParams& params, const LabelledState& init,
                                     const std::vector<double>& schedule, Rng& rng);
LabelledTrajectory labelled_simulate(const IPParams& params, const LabelledState& init,
                                     const std::vector<double>& schedule, std::uint64_t seed);

// (1/N) sum_i delta_{(sigma_i + 1)/L}
DiscreteMeasure type_embedding(const LabelledState& state);

// theta * (int_0^1 h - h(u))
double mutation_fv(const Observable& h, double u, double theta);
double integral_unit_interval(const Observable& h);

double fv_generator(const DiscreteMeasure& nu, const CylindricalFunction& H, double theta);

// Exact labelled generator applied to H composed with the type embedding,
// summed over site pairs with rate c_from (c_to + d).
double labelled_generator(const LabelledState& state, const CylindricalFunction& H, double d);

struct LabelledIdentity {
    double lhs = 0.0;  // generator by summation over every particle event
    double rhs = 0.0;  // dL nu((1/L) sum_x h(x/L) - h)
};

LabelledIdentity labelled_generator_identity(const LabelledState& state, const Observable& h, double d);

struct LabelledBatteryCase {
    std::string id;
    LabelledState state;
    CylindricalFunction H;
};

// Condensed, two-cluster, round-robin and ramp states against nu(z),
// nu(z)nu(z^2) and nu(z^2).
std::vector<LabelledBatteryCase> fv_battery(std::size_t L, std::int64_t N);

// |labelled generator - Fleming-Viot generator| over the battery with
// N = round(rho L) and d = theta / L.
GeneratorReport fv_convergence_report(const std::vector<std::size_t>& L_grid, double rho, double theta,
                                      std::size_t workers = 1);

}  // namespace inclab
