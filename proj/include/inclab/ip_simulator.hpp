#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "inclab/configuration.hpp"
#include "inclab/fenwick.hpp"
#include "inclab/measure.hpp"
#include "inclab/random.hpp"

namespace inclab {

enum class TimeScale { Raw, Meso };

struct IPParams {
    std::size_t L = 2;
    std::int64_t N = 1;
    double d = 1.0;
    TimeScale time_scale = TimeScale::Raw;

    void validate() const;
    // Physical time corresponding to a schedule time.
    double physical_time(double t) const;
};

struct Move {
    std::size_t from = 0;
    std::size_t to = 0;
    double wait = 0.0;
};

// sum over ordered pairs x != y of eta_x (d + eta_y), in O(1).
double total_rate(const Configuration& config, double d);

// Draws the next move of the configuration with an O(L) scan; does not modify it.
Move step(const Configuration& config, double d, Rng& rng);

/// Event-driven simulator holding one configuration and its sampling indices.
class IPSimulator {
public:
    IPSimulator(double d, Configuration init);

    const Configuration& config() const { return config_; }
    double time() const { return time_; }
    std::uint64_t events() const { return events_; }
    double rate() const { return total_rate(config_, d_); }

    // Samples and applies one move.
    Move step(Rng& rng);
    // Runs until physical time `t`; the pending event beyond `t` is discarded,
    // which is exact because waiting times are memoryless.
    void advance_to(double t, Rng& rng);

    // Throws if any cached quantity disagrees with a full recomputation.
    void audit() const;

private:
    void apply(std::size_t from, std::size_t to);
    std::size_t sample_source(Rng& rng) const;
    std::size_t sample_destination(std::size_t from, Rng& rng) const;

    double d_;
    Configuration config_;
    FenwickTree occupancy_;   // eta_x
    FenwickTree inclusion_;   // eta_x (N - eta_x)
    std::vector<std::size_t> site_of_;               // particle -> site
    std::vector<std::vector<std::uint32_t>> members_;  // site -> particles
    double time_ = 0.0;
    double time_comp_ = 0.0;
    std::uint64_t events_ = 0;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Configuration> snapshots;
    std::uint64_t event_count = 0;
    std::uint64_t seed = 0;
};

using SnapshotRecorder = std::function<void(std::size_t index, double time, const Configuration&)>;

// Snapshots at each schedule time (interpreted on params.time_scale). When a
// recorder is supplied it is called instead of storing configurations.
Trajectory simulate(const IPParams& params, const Configuration& init, const std::vector<double>& schedule,
                    Rng& rng, const SnapshotRecorder& recorder = {});
Trajectory simulate(const IPParams& params, const Configuration& init, const std::vector<double>& schedule,
                    std::uint64_t seed, const SnapshotRecorder& recorder = {});

using InitialSampler = std::function<Configuration(std::size_t replica, Rng& rng)>;

struct EnsembleResult {
    std::vector<double> times;
    // measures[time][replica]
    std::vector<std::vector<DiscreteMeasure>> measures;
    std::vector<DiscreteMeasure> pooled;
    std::vector<std::uint64_t> events;  // per replica
    std::uint64_t seed = 0;
};

// Independent replicas seeded by (seed, replica index); embeds each snapshot
// on `embedding` scale and pools per schedule time.
EnsembleResult run_ensemble(const IPParams& params, const Configuration& init,
                            const std::vector<double>& schedule, std::size_t replicas, std::uint64_t seed,
                            Scale embedding, std::size_t workers = 1);
EnsembleResult run_ensemble(const IPParams& params, const InitialSampler& init,
                            const std::vector<double>& schedule, std::size_t replicas, std::uint64_t seed,
                            Scale embedding, std::size_t workers = 1);

void validate_schedule(const std::vector<double>& schedule);

}  // namespace inclab
