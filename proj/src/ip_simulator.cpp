#include "inclab/ip_simulator.hpp"

#include <cmath>

#include "inclab/embeddings.hpp"
#include "inclab/errors.hpp"
#include "inclab/parallel.hpp"

namespace inclab {

// Sampling the pair (x, y) with probability eta_x (d + eta_y) / R.
//
// Summing the rate over destinations y != x gives the source weight
//   eta_x (d (L-1) + N - eta_x),
// and these weights sum to R = d N (L-1) + N^2 - sum eta^2. Given x, the
// destination weight d + eta_y is split into a diffusive part d (uniform over
// the L-1 other sites, mass d (L-1)) and an inclusion part eta_y (mass N - eta_x).
// Choosing the diffusive branch with probability d(L-1) / (d(L-1) + N - eta_x)
// therefore gives
//   P(y | x) = d / (d(L-1) + N - eta_x) + eta_y / (d(L-1) + N - eta_x),
// and P(x) P(y | x) = eta_x (d + eta_y) / R as required.
//
// The source weight is itself a mixture: d (L-1) eta_x plus eta_x (N - eta_x).
// The first part is sampled by a uniformly chosen particle, the second from an
// integer partial-sum tree, both exactly.

void IPParams::validate() const {
    if (L < 2) throw InvalidArgument("L must be at least 2");
    if (N < 1) throw InvalidArgument("N must be at least 1");
    if (!(d > 0.0) || !std::isfinite(d)) throw InvalidArgument("d must be positive and finite");
}

double IPParams::physical_time(double t) const {
    return time_scale == TimeScale::Meso ? t / (d * static_cast<double>(L)) : t;
}

double total_rate(const Configuration& config, double d) {
    const auto n = static_cast<double>(config.particles());
    const auto l = static_cast<double>(config.sites());
    const auto inclusion = static_cast<double>(config.particles() * config.particles() - config.sum_squares());
    return d * n * (l - 1.0) + inclusion;
}

Move step(const Configuration& config, double d, Rng& rng) {
    const double rate = total_rate(config, d);
    if (!(rate > 0.0)) throw Frozen("total jump rate is zero");
    const std::size_t sites = config.sites();
    const auto n = static_cast<double>(config.particles());
    const double diffusive = d * static_cast<double>(sites - 1);

    Move m;
    m.wait = exponential(rng, rate);

    double u = uniform01(rng) * rate;
    std::size_t x = 0;
    for (;; ++x) {
        const auto eta = static_cast<double>(config[x]);
        const double w = eta * (diffusive + n - eta);
        if (u < w || x + 1 == sites) break;
        u -= w;
    }
    while (config[x] == 0) --x;  // rounding at the far end of the scan
    m.from = x;

    const auto eta_x = static_cast<double>(config[x]);
    if (uniform01(rng) * (diffusive + n - eta_x) < diffusive) {
        std::size_t y = uniform_index(rng, sites - 1);
        m.to = y >= x ? y + 1 : y;
        return m;
    }
    auto r = static_cast<std::int64_t>(
        uniform_index(rng, static_cast<std::uint64_t>(config.particles() - config[x])));
    for (std::size_t y = 0; y < sites; ++y) {
        if (y == x) continue;
        if (r < config[y]) {
            m.to = y;
            return m;
        }
        r -= config[y];
    }
    throw Frozen("destination scan exhausted");
}

IPSimulator::IPSimulator(double d, Configuration init) : d_(d), config_(std::move(init)) {
    if (!(d > 0.0)) throw InvalidArgument("d must be positive");
    if (config_.sites() < 2) throw InvalidArgument("L must be at least 2");
    const std::size_t sites = config_.sites();
    const std::int64_t n = config_.particles();
    std::vector<std::int64_t> inclusion(sites);
    for (std::size_t x = 0; x < sites; ++x) inclusion[x] = config_[x] * (n - config_[x]);
    occupancy_.assign(config_.occupations());
    inclusion_.assign(inclusion);
    members_.assign(sites, {});
    site_of_.resize(static_cast<std::size_t>(n));
    std::uint32_t id = 0;
    for (std::size_t x = 0; x < sites; ++x)
        for (std::int64_t k = 0; k < config_[x]; ++k) {
            members_[x].push_back(id);
            site_of_[id] = x;
            ++id;
        }
}

std::size_t IPSimulator::sample_source(Rng& rng) const {
    const auto n = config_.particles();
    const double diffusive_mass = d_ * static_cast<double>(config_.sites() - 1) * static_cast<double>(n);
    const std::int64_t inclusion_mass = inclusion_.total();
    const double u = uniform01(rng) * (diffusive_mass + static_cast<double>(inclusion_mass));
    if (u < diffusive_mass || inclusion_mass == 0)
        return site_of_[uniform_index(rng, static_cast<std::uint64_t>(n))];
    const auto r = static_cast<std::int64_t>(uniform_index(rng, static_cast<std::uint64_t>(inclusion_mass)));
    return inclusion_.find(r);
}

std::size_t IPSimulator::sample_destination(std::size_t from, Rng& rng) const {
    const std::size_t sites = config_.sites();
    const std::int64_t n = config_.particles();
    const std::int64_t eta_x = config_[from];
    const double diffusive = d_ * static_cast<double>(sites - 1);
    if (uniform01(rng) * (diffusive + static_cast<double>(n - eta_x)) < diffusive) {
        const std::size_t y = uniform_index(rng, sites - 1);
        return y >= from ? y + 1 : y;
    }
    if (2 * eta_x <= n) {
        // Rejection of particles sitting on `from`; acceptance probability >= 1/2.
        for (;;) {
            const std::size_t y = site_of_[uniform_index(rng, static_cast<std::uint64_t>(n))];
            if (y != from) return y;
        }
    }
    auto r = static_cast<std::int64_t>(uniform_index(rng, static_cast<std::uint64_t>(n - eta_x)));
    if (r >= occupancy_.prefix(from)) r += eta_x;
    return occupancy_.find(r);
}

void IPSimulator::apply(std::size_t from, std::size_t to) {
    const std::int64_t n = config_.particles();
    config_.move(from, to);
    occupancy_.add(from, -1);
    occupancy_.add(to, 1);
    inclusion_.set(from, config_[from] * (n - config_[from]));
    inclusion_.set(to, config_[to] * (n - config_[to]));
    const std::uint32_t id = members_[from].back();
    members_[from].pop_back();
    members_[to].push_back(id);
    site_of_[id] = to;
}

Move IPSimulator::step(Rng& rng) {
    const double rate = total_rate(config_, d_);
    if (!(rate > 0.0)) throw Frozen("total jump rate is zero");
    Move m;
    m.wait = exponential(rng, rate);
    m.from = sample_source(rng);
    m.to = sample_destination(m.from, rng);
    apply(m.from, m.to);
    const double y = m.wait - time_comp_;
    const double t = time_ + y;
    time_comp_ = (t - time_) - y;
    time_ = t;
    ++events_;
    return m;
}

void IPSimulator::advance_to(double t, Rng& rng) {
    if (t < time_) throw InvalidArgument("cannot advance backwards in time");
    for (;;) {
        const double rate = total_rate(config_, d_);
        if (!(rate > 0.0)) throw Frozen("total jump rate is zero");
        const double wait = exponential(rng, rate);
        if (time_ + wait > t) {
            time_ = t;
            time_comp_ = 0.0;
            return;
        }
        const std::size_t from = sample_source(rng);
        const std::size_t to = sample_destination(from, rng);
        apply(from, to);
        const double y = wait - time_comp_;
        const double s = time_ + y;
        time_comp_ = (s - time_) - y;
        time_ = s;
        ++events_;
    }
}

void IPSimulator::audit() const {
    if (config_.sum_squares() != config_.recomputed_sum_squares())
        throw Error("cached sum of squares drifted from recomputation");
    const std::int64_t n = config_.particles();
    std::int64_t count = 0;
    for (std::size_t x = 0; x < config_.sites(); ++x) {
        count += config_[x];
        if (occupancy_.weight(x) != config_[x] ||
            inclusion_.weight(x) != config_[x] * (n - config_[x]) ||
            static_cast<std::int64_t>(members_[x].size()) != config_[x])
            throw Error("sampling index out of sync at site " + std::to_string(x));
    }
    if (count != n || occupancy_.total() != n) throw Error("particle count not conserved");
}

void validate_schedule(const std::vector<double>& schedule) {
    if (schedule.empty()) throw InvalidArgument("times: schedule must be nonempty");
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        if (!(schedule[i] >= 0.0) || !std::isfinite(schedule[i]))
            throw InvalidArgument("times: schedule entries must be finite and nonnegative");
        if (i > 0 && !(schedule[i] > schedule[i - 1]))
            throw InvalidArgument("times: schedule must be strictly increasing");
    }
}

namespace {

void check_init(const IPParams& params, const Configuration& init) {
    if (init.sites() != params.L || init.particles() != params.N)
        throw MismatchedSetup("initial configuration has L=" + std::to_string(init.sites()) +
                              ", N=" + std::to_string(init.particles()) + " but parameters say L=" +
                              std::to_string(params.L) + ", N=" + std::to_string(params.N));
}

}  // namespace

Trajectory simulate(const IPParams& params, const Configuration& init, const std::vector<double>& schedule,
                    Rng& rng, const SnapshotRecorder& recorder) {
    params.validate();
    validate_schedule(schedule);
    check_init(params, init);
    IPSimulator sim(params.d, init);
    Trajectory traj;
    traj.times = schedule;
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        sim.advance_to(params.physical_time(schedule[i]), rng);
        if (recorder)
            recorder(i, schedule[i], sim.config());
        else
            traj.snapshots.push_back(sim.config());
    }
    traj.event_count = sim.events();
    return traj;
}

Trajectory simulate(const IPParams& params, const Configuration& init, const std::vector<double>& schedule,
                    std::uint64_t seed, const SnapshotRecorder& recorder) {
    Rng rng = derive_stream(seed, 0);
    Trajectory traj = simulate(params, init, schedule, rng, recorder);
    traj.seed = seed;
    return traj;
}

EnsembleResult run_ensemble(const IPParams& params, const InitialSampler& init,
                            const std::vector<double>& schedule, std::size_t replicas, std::uint64_t seed,
                            Scale embedding, std::size_t workers) {
    params.validate();
    validate_schedule(schedule);
    if (replicas < 1) throw InvalidArgument("replicas must be at least 1");
    EnsembleResult out;
    out.times = schedule;
    out.seed = seed;
    out.measures.assign(schedule.size(), std::vector<DiscreteMeasure>(replicas));
    out.events.assign(replicas, 0);
    parallel_for(replicas, workers, [&](std::size_t r) {
        Rng rng = derive_stream(seed, r);
        const Configuration start = init(r, rng);
        const Trajectory traj = simulate(params, start, schedule, rng,
                                         [&](std::size_t i, double, const Configuration& c) {
                                             out.measures[i][r] = embed(c, embedding, params.d);
                                         });
        out.events[r] = traj.event_count;
    });
    for (const auto& per_time : out.measures) out.pooled.push_back(DiscreteMeasure::pooled(per_time));
    return out;
}

EnsembleResult run_ensemble(const IPParams& params, const Configuration& init,
                            const std::vector<double>& schedule, std::size_t replicas, std::uint64_t seed,
                            Scale embedding, std::size_t workers) {
    return run_ensemble(
        params, [&](std::size_t, Rng&) { return init; }, schedule, replicas, seed, embedding, workers);
}

}  // namespace inclab
