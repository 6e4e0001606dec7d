#include "inclab/fleming_viot.hpp"

#include <algorithm>
#include <cmath>

#include "inclab/errors.hpp"
#include "inclab/numerics.hpp"
#include "inclab/parallel.hpp"

namespace inclab {

namespace {

double type_of(std::size_t site, std::size_t L) { return static_cast<double>(site + 1) / static_cast<double>(L); }

void apply_random_event(LabelledState& state, double d, LabelledEvent& ev, Rng& rng) {
    const auto N = static_cast<double>(state.positions.size());
    const auto L = static_cast<double>(state.L);
    ev.particle = uniform_index(rng, state.positions.size());
    ev.pair = uniform01(rng) * (N + d * L) < N;
    ev.target = ev.pair ? state.positions[uniform_index(rng, state.positions.size())] : uniform_index(rng, state.L);
    ev.noop = state.positions[ev.particle] == ev.target;
    state.positions[ev.particle] = static_cast<std::uint32_t>(ev.target);
}

double product_except(const std::vector<double>& v, std::size_t skip) {
    double p = 1.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (i != skip) p *= v[i];
    return p;
}

}  // namespace

void LabelledState::validate() const {
    if (L < 1) throw InvalidArgument("L must be at least 1");
    for (auto s : positions)
        if (s >= L) throw InvalidArgument("particle position outside 0..L-1");
}

LabelledState LabelledState::from_configuration(const Configuration& config) {
    LabelledState s;
    s.L = config.sites();
    for (std::size_t x = 0; x < config.sites(); ++x)
        for (std::int64_t k = 0; k < config[x]; ++k) s.positions.push_back(static_cast<std::uint32_t>(x));
    return s;
}

LabelledState LabelledState::uniform(std::size_t L, std::int64_t N, Rng& rng) {
    if (L < 1 || N < 0) throw InvalidArgument("need L >= 1 and N >= 0");
    LabelledState s;
    s.L = L;
    s.positions.resize(static_cast<std::size_t>(N));
    for (auto& p : s.positions) p = static_cast<std::uint32_t>(uniform_index(rng, L));
    return s;
}

Configuration iota(const LabelledState& state) {
    state.validate();
    std::vector<std::int64_t> counts(state.L, 0);
    for (auto s : state.positions) ++counts[s];
    return Configuration(std::move(counts));
}

double labelled_rate(std::size_t L, std::int64_t N, double d) {
    const auto n = static_cast<double>(N);
    return n * n + d * static_cast<double>(L) * n;
}

LabelledEvent labelled_step(LabelledState& state, double d, Rng& rng) {
    if (state.positions.empty()) throw InvalidArgument("no particles to move");
    LabelledEvent ev;
    ev.wait = exponential(rng, labelled_rate(state.L, state.particles(), d));
    apply_random_event(state, d, ev, rng);
    return ev;
}

LabelledTrajectory labelled_simulate(const IPParams& params, const LabelledState& init,
                                     const std::vector<double>& schedule, Rng& rng) {
    params.validate();
    validate_schedule(schedule);
    init.validate();
    if (init.L != params.L || init.particles() != params.N)
        throw MismatchedSetup("initial labelled state does not have L sites and N particles");
    LabelledState state = init;
    LabelledTrajectory traj;
    traj.times = schedule;
    const double rate = labelled_rate(params.L, params.N, params.d);
    double time = 0.0, comp = 0.0;
    LabelledEvent ev;
    for (double t : schedule) {
        const double target = params.physical_time(t);
        for (;;) {
            const double wait = exponential(rng, rate);
            if (time + wait > target) {
                time = target;
                comp = 0.0;
                break;
            }
            const double y = wait - comp;
            const double s = time + y;
            comp = (s - time) - y;
            time = s;
            apply_random_event(state, params.d, ev, rng);
            ++traj.event_count;
            if (ev.noop) ++traj.noop_count;
        }
        traj.snapshots.push_back(state);
    }
    return traj;
}

LabelledTrajectory labelled_simulate(const IPParams& params, const LabelledState& init,
                                     const std::vector<double>& schedule, std::uint64_t seed) {
    Rng rng = derive_stream(seed, 0);
    return labelled_simulate(params, init, schedule, rng);
}

DiscreteMeasure type_embedding(const LabelledState& state) {
    if (state.positions.empty()) throw InvalidArgument("type embedding needs at least one particle");
    const Configuration c = iota(state);
    const auto N = static_cast<double>(state.particles());
    std::vector<Atom> atoms;
    for (std::size_t x = 0; x < c.sites(); ++x)
        if (c[x] > 0) atoms.push_back({type_of(x, state.L), static_cast<double>(c[x]) / N});
    return DiscreteMeasure(std::move(atoms), Scale::Macro);
}

double integral_unit_interval(const Observable& h) {
    std::vector<double> breaks = {0.0, 1.0};
    for (const auto& t : h.terms())
        for (const auto& w : t.windows)
            if (w.cutoff > 0.0 && w.cutoff < 1.0) breaks.push_back(w.cutoff);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
        total += quad([&](double u) { return h.value(u); }, breaks[i], breaks[i + 1]);
    return total;
}

double mutation_fv(const Observable& h, double u, double theta) {
    return theta * (integral_unit_interval(h) - h.value(u));
}

double fv_generator(const DiscreteMeasure& nu, const CylindricalFunction& H, double theta) {
    if (nu.scale() != Scale::Macro || nu.mass_at_infinity() > 0.0)
        throw DomainMismatch("Fleming-Viot generator needs a measure on [0,1]");
    double total = 0.0;
    for (const auto& p : H.products()) {
        const std::size_t n = p.factors.size();
        std::vector<double> base(n), drift(n);
        for (std::size_t k = 0; k < n; ++k) {
            base[k] = integrate(nu, p.factors[k]);
            drift[k] = theta * (integral_unit_interval(p.factors[k]) - base[k]);
        }
        double value = 0.0;
        for (std::size_t k = 0; k < n; ++k) value += drift[k] * product_except(base, k);
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t l = k + 1; l < n; ++l) {
                double rest = 1.0;
                for (std::size_t j = 0; j < n; ++j)
                    if (j != k && j != l) rest *= base[j];
                const double cov = integrate(nu, p.factors[k] * p.factors[l]) - base[k] * base[l];
                value += 2.0 * cov * rest;
            }
        total += p.coef * value;
    }
    return total;
}

double labelled_generator(const LabelledState& state, const CylindricalFunction& H, double d) {
    const Configuration c = iota(state);
    const std::size_t L = state.L;
    const auto N = static_cast<double>(state.particles());
    if (N == 0.0) return 0.0;
    std::vector<std::size_t> occupied;
    for (std::size_t x = 0; x < L; ++x)
        if (c[x] > 0) occupied.push_back(x);
    double total = 0.0;
    for (const auto& p : H.products()) {
        const std::size_t n = p.factors.size();
        std::vector<std::vector<double>> hv(n, std::vector<double>(L));
        std::vector<double> base(n);
        for (std::size_t k = 0; k < n; ++k) {
            NeumaierSum s;
            for (std::size_t x = 0; x < L; ++x) {
                hv[k][x] = p.factors[k].value(type_of(x, L));
                if (c[x] > 0) s.add(static_cast<double>(c[x]) * hv[k][x]);
            }
            base[k] = s.value() / N;
        }
        // suffix[k] = prod_{j >= k} base_j
        std::vector<double> suffix(n + 1, 1.0);
        for (std::size_t k = n; k-- > 0;) suffix[k] = suffix[k + 1] * base[k];
        NeumaierSum acc;
        std::vector<double> delta(n);
        for (std::size_t a : occupied) {
            const auto ca = static_cast<double>(c[a]);
            for (std::size_t b = 0; b < L; ++b) {
                if (b == a) continue;
                const double rate = ca * (static_cast<double>(c[b]) + d);
                double change = 0.0, prefix = 1.0;
                for (std::size_t k = 0; k < n; ++k) {
                    delta[k] = (hv[k][b] - hv[k][a]) / N;
                    change += delta[k] * prefix * suffix[k + 1];
                    prefix *= base[k] + delta[k];
                }
                acc.add(rate * change);
            }
        }
        total += p.coef * acc.value();
    }
    return total;
}

LabelledIdentity labelled_generator_identity(const LabelledState& state, const Observable& h, double d) {
    state.validate();
    const std::size_t L = state.L;
    const auto N = static_cast<double>(state.particles());
    LabelledIdentity out;
    if (N == 0.0) return out;
    std::vector<double> at_particle(state.positions.size());
    for (std::size_t i = 0; i < at_particle.size(); ++i) at_particle[i] = h.value(type_of(state.positions[i], L));
    std::vector<double> at_site(L);
    for (std::size_t x = 0; x < L; ++x) at_site[x] = h.value(type_of(x, L));

    NeumaierSum lhs;
    for (std::size_t i = 0; i < at_particle.size(); ++i)
        for (std::size_t j = 0; j < at_particle.size(); ++j) lhs.add((at_particle[j] - at_particle[i]) / N);
    for (std::size_t i = 0; i < at_particle.size(); ++i)
        for (std::size_t x = 0; x < L; ++x) lhs.add(d * (at_site[x] - at_particle[i]) / N);
    out.lhs = lhs.value();

    NeumaierSum site_sum, particle_sum;
    for (double v : at_site) site_sum.add(v);
    for (double v : at_particle) particle_sum.add(v);
    const double site_average = site_sum.value() / static_cast<double>(L);
    out.rhs = d * static_cast<double>(L) * (site_average - particle_sum.value() / N);
    return out;
}

std::vector<LabelledBatteryCase> fv_battery(std::size_t L, std::int64_t N) {
    if (L < 4 || N < 2) throw InvalidArgument("battery needs L >= 4 and N >= 2");
    const auto n = static_cast<std::size_t>(N);
    std::vector<std::pair<std::string, LabelledState>> states;

    LabelledState condensed{L, std::vector<std::uint32_t>(n, static_cast<std::uint32_t>(L - 1))};
    states.emplace_back("condensed", condensed);

    LabelledState clusters{L, {}};
    for (std::size_t i = 0; i < n; ++i)
        clusters.positions.push_back(static_cast<std::uint32_t>(i % 2 == 0 ? L / 4 : (3 * L) / 4));
    states.emplace_back("two_cluster", clusters);

    LabelledState round_robin{L, {}};
    for (std::size_t i = 0; i < n; ++i) round_robin.positions.push_back(static_cast<std::uint32_t>(i % L));
    states.emplace_back("round_robin", round_robin);

    LabelledState ramp{L, {}};
    for (std::size_t i = 0; i < n; ++i) {
        const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
        ramp.positions.push_back(static_cast<std::uint32_t>(std::min<double>(L - 1, std::floor(u * u * L))));
    }
    states.emplace_back("ramp", ramp);

    const Observable z = Observable::monomial(1);
    const Observable z2 = Observable::monomial(2);
    const std::vector<std::pair<std::string, CylindricalFunction>> tests = {
        {"nu(z)", CylindricalFunction::linear(z)},
        {"nu(z)nu(z^2)", CylindricalFunction::product({z, z2})},
        {"nu(z^2)", CylindricalFunction::linear(z2)},
    };
    std::vector<LabelledBatteryCase> cases;
    for (const auto& [sid, s] : states)
        for (const auto& [tid, H] : tests) cases.push_back({sid + ":" + tid, s, H});
    return cases;
}

GeneratorReport fv_convergence_report(const std::vector<std::size_t>& L_grid, double rho, double theta,
                                      std::size_t workers) {
    GeneratorReport report;
    report.scale = Scale::Macro;
    report.battery_description = "labelled states vs Fleming-Viot generator";
    std::vector<std::size_t> grid = L_grid;
    std::sort(grid.begin(), grid.end());
    std::vector<std::vector<GeneratorReportRow>> per_L(grid.size());
    parallel_for(grid.size(), workers, [&](std::size_t gi) {
        const std::size_t L = grid[gi];
        const auto N = static_cast<std::int64_t>(std::llround(rho * static_cast<double>(L)));
        const double d = theta / static_cast<double>(L);
        for (const auto& c : fv_battery(L, N)) {
            const double err =
                std::abs(labelled_generator(c.state, c.H, d) - fv_generator(type_embedding(c.state), c.H, theta));
            per_L[gi].push_back({L, N, d, theta, c.id, err});
        }
    });
    for (auto& rows : per_L) report.rows.insert(report.rows.end(), rows.begin(), rows.end());
    return report;
}

}  // namespace inclab
