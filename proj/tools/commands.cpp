#include <algorithm>
#include <cmath>
#include <sstream>

#include "cli.hpp"
#include "inclab/diffusions.hpp"
#include "inclab/embeddings.hpp"
#include "inclab/errors.hpp"
#include "inclab/fleming_viot.hpp"
#include "inclab/generators.hpp"
#include "inclab/ip_simulator.hpp"
#include "inclab/metrics.hpp"
#include "inclab/numerics.hpp"
#include "inclab/parallel.hpp"
#include "inclab/stationary.hpp"

namespace inclab::cli {

namespace {

std::vector<double> numbers_after(const std::string& key, const std::string& spec, std::size_t colon) {
    std::vector<double> xs;
    std::istringstream in(spec.substr(colon + 1));
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            xs.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ValidationError(key, "bad number '" + item + "' in '" + spec + "'");
        }
    }
    return xs;
}

Observable parse_observable(const std::string& key, const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) throw ValidationError(key, "expected kind:arguments, got '" + spec + "'");
    const std::string kind = spec.substr(0, colon);
    const auto xs = numbers_after(key, spec, colon);
    if (kind == "poly" && !xs.empty()) return Observable::polynomial(xs);
    if (kind == "const" && xs.size() == 1) return Observable::constant(xs[0]);
    if (kind == "window" && xs.size() == 3) {
        try {
            return Observable::window(static_cast<int>(xs[0]), xs[1], static_cast<int>(xs[2]));
        } catch (const InvalidArgument& e) {
            throw ValidationError(key, e.what());
        }
    }
    throw ValidationError(key, "unknown observable '" + spec + "' (poly:..., const:c, window:power,cutoff,exponent)");
}

Scale parse_scale(const std::string& key, const std::string& s) {
    if (s == "macro") return Scale::Macro;
    if (s == "meso") return Scale::Meso;
    throw ValidationError(key, "expected macro or meso");
}

TimeScale parse_time_scale(const std::string& key, const std::string& s) {
    if (s == "raw") return TimeScale::Raw;
    if (s == "meso") return TimeScale::Meso;
    throw ValidationError(key, "expected raw or meso");
}

IPParams ip_params(const Params& p) {
    IPParams ip;
    ip.L = static_cast<std::size_t>(p.positive_int("L"));
    ip.N = p.positive_int("N");
    ip.d = p.positive_real("d");
    if (p.tree().contains("time_scale")) ip.time_scale = parse_time_scale("time_scale", p.text("time_scale"));
    return ip;
}

InitialSampler initial_sampler(const Params& p, const IPParams& ip) {
    const std::string spec = p.text("init");
    if (spec == "stationary") {
        const CanonicalMeasure pi(ip.L, ip.N, ip.d);
        return [pi](std::size_t, Rng& rng) { return pi.sample(rng); };
    }
    Configuration fixed;
    try {
        if (spec == "flat") {
            fixed = config_from_partition(Partition(), ip.L, ip.N);
        } else if (spec == "condensed") {
            fixed = config_from_partition(Partition({1.0}), ip.L, ip.N);
        } else if (spec.rfind("partition:", 0) == 0) {
            auto masses = numbers_after("init", spec, spec.find(':'));
            std::sort(masses.rbegin(), masses.rend());
            fixed = config_from_partition(Partition(masses), ip.L, ip.N);
        } else if (spec.rfind("dirac:", 0) == 0) {
            const auto z = numbers_after("init", spec, spec.find(':'));
            if (z.size() != 1) throw ValidationError("init", "dirac takes one location");
            fixed = config_from_measure(DiscreteMeasure::dirac(z[0], Scale::Meso), ip.L, ip.N, ip.d);
        } else {
            throw ValidationError("init", "unknown initial condition '" + spec + "'");
        }
    } catch (const Error& e) {
        throw ValidationError("init", e.what());
    }
    return [fixed](std::size_t, Rng&) { return fixed; };
}

std::string measures_csv(const std::vector<double>& times, const std::vector<std::vector<DiscreteMeasure>>& measures,
                         const char* extra = nullptr) {
    std::ostringstream os;
    os << "time,replica,location,weight" << (extra ? std::string(",") + extra : "") << '\n';
    for (std::size_t k = 0; k < times.size(); ++k)
        for (std::size_t r = 0; r < measures[k].size(); ++r)
            for (const auto& a : measures[k][r].atoms()) {
                os << number(times[k]) << ',' << r << ',' << number(a.location) << ',' << number(a.weight);
                if (extra) os << ",1";
                os << '\n';
            }
    return os.str();
}

RunResult simulate_ip(const Params& p) {
    const IPParams ip = ip_params(p);
    const auto times = p.schedule("times");
    const auto replicas = static_cast<std::size_t>(p.positive_int("replicas"));
    const Scale embedding = parse_scale("embedding", p.text("embedding"));
    const std::string obs = p.text("observable");
    const Observable h = obs.empty() ? Observable::constant(0.0) : parse_observable("observable", obs);
    const auto ens = run_ensemble(ip, initial_sampler(p, ip), times, replicas, p.seed(), embedding, p.workers());
    RunResult result;
    write_file(p, result, "trajectory.csv", measures_csv(times, ens.measures));
    if (!obs.empty()) {
        std::ostringstream os;
        os << "time,replica,value\n";
        for (std::size_t k = 0; k < times.size(); ++k)
            for (std::size_t r = 0; r < replicas; ++r)
                os << number(times[k]) << ',' << r << ',' << number(integrate(ens.measures[k][r], h)) << '\n';
        write_file(p, result, "observable.csv", os.str());
    }
    std::ostringstream ev;
    ev << "replica,events\n";
    for (std::size_t r = 0; r < replicas; ++r) ev << r << ',' << ens.events[r] << '\n';
    write_file(p, result, "events.csv", ev.str());
    return result;
}

RunResult simulate_labelled(const Params& p) {
    const IPParams ip = ip_params(p);
    const auto times = p.schedule("times");
    const auto replicas = static_cast<std::size_t>(p.positive_int("replicas"));
    const std::string init = p.text("init");
    if (init != "flat" && init != "condensed" && init != "uniform")
        throw ValidationError("init", "expected flat, condensed or uniform");
    std::vector<std::vector<DiscreteMeasure>> measures(times.size(), std::vector<DiscreteMeasure>(replicas));
    std::vector<std::uint64_t> events(replicas), noops(replicas);
    parallel_for(replicas, p.workers(), [&](std::size_t r) {
        Rng rng = derive_stream(p.seed(), r);
        LabelledState start;
        if (init == "uniform")
            start = LabelledState::uniform(ip.L, ip.N, rng);
        else
            start = LabelledState::from_configuration(
                config_from_partition(init == "flat" ? Partition() : Partition({1.0}), ip.L, ip.N));
        const auto traj = labelled_simulate(ip, start, times, rng);
        for (std::size_t k = 0; k < times.size(); ++k) measures[k][r] = type_embedding(traj.snapshots[k]);
        events[r] = traj.event_count;
        noops[r] = traj.noop_count;
    });
    RunResult result;
    write_file(p, result, "trajectory.csv", measures_csv(times, measures, "labelled"));
    std::ostringstream ev;
    ev << "replica,events,noop_events\n";
    for (std::size_t r = 0; r < replicas; ++r) ev << r << ',' << events[r] << ',' << noops[r] << '\n';
    write_file(p, result, "events.csv", ev.str());
    return result;
}

JumpDiffusionSpec diffusion_spec(const Params& p) {
    const std::string process = p.text("process");
    if (process == "meso") return meso_dual_spec();
    if (process == "macro") return macro_dual_spec(p.positive_real("theta"));
    if (process == "jacobi") return jacobi_spec(p.positive_real("theta"));
    throw ValidationError("process", "expected meso, macro or jacobi");
}

Scheme diffusion_scheme(const Params& p) {
    std::string s = p.text("scheme");
    if (s == "auto") s = p.text("process") == "meso" ? "exact" : "euler";
    if (s == "exact") return Scheme::exact_cir();
    if (s == "euler") return Scheme::euler(p.positive_real("dt"));
    throw ValidationError("scheme", "expected auto, exact or euler");
}

RunResult simulate_diffusion(const Params& p) {
    const auto spec = diffusion_spec(p);
    const Scheme scheme = diffusion_scheme(p);
    if (scheme.kind == SchemeKind::ExactCir && !spec.square_root_affine)
        throw ValidationError("scheme", "the exact scheme needs process meso");
    const double z0 = p.real("z0");
    if (z0 < 0.0 || z0 > spec.upper) throw ValidationError("z0", "outside the state space of the process");
    const auto times = p.schedule("times");
    const auto replicas = static_cast<std::size_t>(p.positive_int("replicas"));
    const Scale scale = spec.upper == INF ? Scale::Meso : Scale::Macro;
    std::ostringstream os;
    os << "time,replica,value\n";
    for (std::size_t k = 0; k < times.size(); ++k) {
        const auto law = ensemble_law(spec, DiscreteMeasure::dirac(z0, scale), times[k], replicas, scheme,
                                      splitmix64(p.seed() + k), p.workers());
        for (std::size_t r = 0; r < replicas; ++r)
            os << number(times[k]) << ',' << r << ',' << number(law.states[r]) << '\n';
    }
    RunResult result;
    write_file(p, result, "samples.csv", os.str());
    return result;
}

RunResult generator_check(const Params& p) {
    const std::string scale = p.text("scale");
    std::vector<std::size_t> grid;
    for (auto L : p.integers("grid")) {
        if (L < 4) throw ValidationError("grid", "every L must be at least 4");
        grid.push_back(static_cast<std::size_t>(L));
    }
    if (grid.size() < 2) throw ValidationError("grid", "needs at least two values of L");
    const double rho = p.positive_real("rho");
    const double theta = p.positive_real("theta");
    const double exponent = p.positive_real("d_exponent");
    const std::string battery = p.text("battery");
    if (battery != "default" && battery != "constant") throw ValidationError("battery", "expected default or constant");
    double factor = p.real("factor");
    if (factor < 0.0) throw ValidationError("factor", "must be nonnegative");

    GeneratorReport report;
    if (scale == "fv") {
        report = fv_convergence_report(grid, rho, theta, p.workers());
        if (factor == 0.0) factor = 2.0;
    } else {
        const Scale s = parse_scale("scale", scale);
        BatteryBuilder builder = battery == "constant" ? BatteryBuilder(constant_battery)
                                 : s == Scale::Macro   ? BatteryBuilder(macro_battery)
                                                       : BatteryBuilder(meso_battery);
        std::function<double(std::size_t)> d_of_L;
        if (s == Scale::Macro)
            d_of_L = [theta](std::size_t L) { return theta / static_cast<double>(L); };
        else
            d_of_L = [exponent](std::size_t L) { return std::pow(static_cast<double>(L), -exponent); };
        report = convergence_report(s, grid, rho, d_of_L, builder, battery + " battery", p.workers());
        if (factor == 0.0) factor = 4.0;
    }
    RunResult result;
    write_file(p, result, "generator_report.csv", report.to_csv());
    const auto sorted = report.grid();
    const double first = report.max_error(sorted.front()), last = report.max_error(sorted.back());
    result.gate_passed = last <= first / factor;
    result.gate_message = "max error " + number(first) + " at L=" + std::to_string(sorted.front()) + ", " +
                          number(last) + " at L=" + std::to_string(sorted.back()) + ", required factor " +
                          number(factor);
    return result;
}

RunResult duality_check(const Params& p) {
    const Scale scale = parse_scale("scale", p.text("scale"));
    IPParams ip;
    ip.L = static_cast<std::size_t>(p.positive_int("L"));
    ip.N = p.positive_int("N");
    ip.d = p.positive_real("d");
    ip.time_scale = scale == Scale::Meso ? TimeScale::Meso : TimeScale::Raw;
    const auto times = p.schedule("times");
    const auto replicas = static_cast<std::size_t>(p.positive_int("replicas"));
    const auto dual_samples = static_cast<std::size_t>(p.positive_int("dual_samples"));
    const Observable h = parse_observable("observable", p.text("observable"));
    const double sigmas = p.positive_real("sigmas");
    const double z0 = p.real("z0");
    const double theta = ip.d * static_cast<double>(ip.L);

    Configuration init;
    try {
        if (scale == Scale::Meso) {
            init = config_from_measure(DiscreteMeasure::dirac(z0, Scale::Meso), ip.L, ip.N, ip.d);
        } else {
            if (z0 != 1.0) throw ValidationError("z0", "macro duality starts fully condensed, z0 must be 1");
            init = config_from_partition(Partition({1.0}), ip.L, ip.N);
        }
    } catch (const Error& e) {
        throw ValidationError("z0", e.what());
    }
    const auto spec = scale == Scale::Meso ? meso_dual_spec() : macro_dual_spec(theta);
    const Scheme scheme = scale == Scale::Meso ? Scheme::exact_cir() : Scheme::euler(1e-3);
    const auto ens = run_ensemble(ip, init, times, replicas, p.seed(), scale, p.workers());

    std::vector<ComparisonResult> rows;
    RunResult result;
    for (std::size_t k = 0; k < times.size(); ++k) {
        const auto dual = ensemble_law(spec, embed(init, scale, ip.d), times[k], dual_samples, scheme,
                                       splitmix64(p.seed() ^ (k + 1)), p.workers());
        const auto r = duality_residual(ens.measures[k], times[k], dual, h, scale, p.seed() + k);
        rows.push_back({"duality_residual@" + number(times[k]), r.residual, r.stderr_, replicas, dual_samples});
        rows.push_back({"particle_mean@" + number(times[k]), r.particle_mean, 0.0, replicas, 0});
        rows.push_back({"dual_mean@" + number(times[k]), r.dual_mean, 0.0, dual_samples, 0});
        if (!(r.residual < sigmas * r.stderr_)) {
            result.gate_passed = false;
            result.gate_message += "t=" + number(times[k]) + ": residual " + number(r.residual) + " >= " +
                                   number(sigmas) + " x " + number(r.stderr_) + "; ";
        }
    }
    if (result.gate_passed) result.gate_message = "all residuals within " + number(sigmas) + " standard errors";
    write_file(p, result, "duality.csv", comparison_csv(rows));
    return result;
}

RunResult stationary(const Params& p) {
    const auto L = static_cast<std::size_t>(p.positive_int("L"));
    const std::int64_t N = p.positive_int("N");
    const double d = p.positive_real("d");
    double gamma = p.real("gamma");
    if (gamma < 0.0) throw ValidationError("gamma", "must be nonnegative");
    if (gamma == 0.0) gamma = static_cast<double>(N) / (d * static_cast<double>(L));
    const std::int64_t nmax = std::min(p.positive_int("nmax"), N);
    const auto pmf = size_biased_pmf(L, N, d);
    std::ostringstream os;
    os << "n,pmf,geometric,relative_error\n";
    for (std::int64_t n = 1; n <= nmax; ++n) {
        const double ref = geometric_limit_pmf(n, gamma);
        const double v = pmf[static_cast<std::size_t>(n)];
        os << n << ',' << number(v) << ',' << number(ref) << ',' << number(std::abs(v - ref) / ref) << '\n';
    }
    RunResult result;
    write_file(p, result, "pmf_vs_geometric.csv", os.str());
    return result;
}

RunResult density(const Params& p) {
    const auto times = p.schedule("times");
    for (double t : times)
        if (!(t > 0.0)) throw ValidationError("times", "density needs positive times");
    const double z0 = p.real("z0");
    if (z0 < 0.0) throw ValidationError("z0", "must be nonnegative");
    const double zmax = p.positive_real("zmax");
    const auto points = p.positive_int("points");
    std::ostringstream os;
    os << "time,z,density,exp1\n";
    for (double t : times)
        for (std::int64_t i = 1; i <= points; ++i) {
            const double z = zmax * static_cast<double>(i) / static_cast<double>(points);
            os << number(t) << ',' << number(z) << ',' << number(closed_form_density(t, z, z0)) << ','
               << number(std::exp(-z)) << '\n';
        }
    RunResult result;
    write_file(p, result, "density.csv", os.str());
    return result;
}

RunResult pde(const Params& p) {
    const double t = p.positive_real("t");
    FokkerPlanckGrid grid;
    grid.z_max = p.positive_real("zmax");
    grid.intervals = static_cast<std::size_t>(p.positive_int("intervals"));
    grid.stretch = p.positive_real("stretch");
    grid.dt = p.positive_real("dt");
    grid.tolerance = p.positive_real("tolerance");
    RunResult result;
    GriddedDensity sol;
    try {
        sol = fokker_planck_from_zero(t, grid, 0.01, p.flag("check_refinement"));
    } catch (const GridTooCoarse& e) {
        result.gate_passed = false;
        result.gate_message = e.what();
        return result;
    }
    std::ostringstream os;
    os << "z,pde,closed_form,abs_error\n";
    double worst = 0.0;
    for (std::size_t i = 0; i < sol.z.size(); ++i) {
        const double exact = sol.z[i] > 0.0 ? closed_form_density(t, sol.z[i], 0.0) : sol.f[i];
        const double err = std::abs(sol.f[i] - exact);
        worst = std::max(worst, err);
        os << number(sol.z[i]) << ',' << number(sol.f[i]) << ',' << number(exact) << ',' << number(err) << '\n';
    }
    write_file(p, result, "pde.csv", os.str());
    result.gate_passed = worst < grid.tolerance;
    result.gate_message = "max error " + number(worst) + " against tolerance " + number(grid.tolerance);
    return result;
}

RunResult moments(const Params& p) {
    const std::string system = p.text("system");
    const double theta = p.positive_real("theta");
    const auto initial = p.reals("initial");
    const auto times = p.schedule("times");
    if (initial.empty()) throw ValidationError("initial", "must not be empty");
    std::ostringstream os;
    os << "time,index,value\n";
    for (double t : times) {
        if (system == "macro_mean") {
            os << number(t) << ",1," << number(macro_mean_solution(theta, initial[0], t)) << '\n';
        } else if (system == "mass") {
            if (initial[0] < 0.0 || initial[0] > 1.0) throw ValidationError("initial", "mass must lie in [0,1]");
            os << number(t) << ",0," << number(mass_solution(initial[0], t)) << '\n';
        } else if (system == "pd") {
            if (initial[0] != 1.0) throw ValidationError("initial", "phi_1 must equal 1");
            const auto v = pd_moments_solution(theta, initial, t);
            for (std::size_t m = 0; m < v.size(); ++m) os << number(t) << ',' << m + 1 << ',' << number(v[m]) << '\n';
        } else {
            throw ValidationError("system", "expected macro_mean, pd or mass");
        }
    }
    RunResult result;
    write_file(p, result, "moments.csv", os.str());
    return result;
}

RunResult reproduce_figure(const Params& p) {
    IPParams ip;
    ip.L = static_cast<std::size_t>(p.positive_int("L"));
    ip.N = p.positive_int("N");
    ip.d = p.positive_real("d");
    ip.time_scale = TimeScale::Meso;
    const auto times = p.schedule("times");
    const auto replicas = static_cast<std::size_t>(p.positive_int("replicas"));
    const auto dual_samples = static_cast<std::size_t>(p.positive_int("dual_samples"));
    Configuration init;
    try {
        init = config_from_measure(DiscreteMeasure::dirac(p.positive_real("z0"), Scale::Meso), ip.L, ip.N, ip.d);
    } catch (const Error& e) {
        throw ValidationError("z0", e.what());
    }
    const auto start = embed(init, Scale::Meso, ip.d);
    const auto ens = run_ensemble(ip, init, times, replicas, p.seed(), Scale::Meso, p.workers());
    RunResult result;
    write_file(p, result, "ip_measures.csv", measures_csv(times, ens.measures));

    std::ostringstream dual_csv;
    dual_csv << "time,replica,value\n";
    std::vector<ComparisonResult> rows;
    auto exp_cdf = [](double z) { return -std::expm1(-z); };
    for (std::size_t k = 0; k < times.size(); ++k) {
        const auto dual = ensemble_law(meso_dual_spec(), start, times[k], dual_samples, Scheme::exact_cir(),
                                       splitmix64(p.seed() ^ (k + 1)), p.workers());
        for (std::size_t r = 0; r < dual_samples; ++r)
            dual_csv << number(times[k]) << ',' << r << ',' << number(dual.states[r]) << '\n';
        const auto dual_measure = dual.to_measure(Scale::Meso);
        const std::string at = "@" + number(times[k]);
        rows.push_back({"w1_ip_dual" + at, wasserstein1(ens.pooled[k], dual_measure), 0.0, replicas, dual_samples});
        rows.push_back({"w1_ip_exp1" + at, wasserstein1_to_cdf(ens.pooled[k], exp_cdf), 0.0, replicas, 0});
        rows.push_back({"w1_dual_exp1" + at, wasserstein1_to_cdf(dual_measure, exp_cdf), 0.0, dual_samples, 0});
        rows.push_back({"tv_ip_dual" + at, tv_binned(ens.pooled[k], dual_measure), 0.0, replicas, dual_samples});
    }
    write_file(p, result, "dual_samples.csv", dual_csv.str());
    write_file(p, result, "comparison.csv", comparison_csv(rows));

    std::ostringstream ref;
    ref << "time,z,density,exp1\n";
    for (double t : times)
        for (int i = 1; i <= 400; ++i) {
            const double z = 8.0 * i / 400.0;
            ref << number(t) << ',' << number(z) << ',' << number(closed_form_density(t, z, p.real("z0"))) << ','
                << number(std::exp(-z)) << '\n';
        }
    write_file(p, result, "reference_density.csv", ref.str());
    return result;
}

}  // namespace

RunResult run_command(const std::string& command, const Params& params) {
    if (command == "simulate-ip") return simulate_ip(params);
    if (command == "simulate-labelled") return simulate_labelled(params);
    if (command == "simulate-diffusion") return simulate_diffusion(params);
    if (command == "generator-check") return generator_check(params);
    if (command == "duality-check") return duality_check(params);
    if (command == "stationary") return stationary(params);
    if (command == "density") return density(params);
    if (command == "pde") return pde(params);
    if (command == "moments") return moments(params);
    if (command == "reproduce-figure") return reproduce_figure(params);
    throw ValidationError("command", "unknown subcommand '" + command + "'");
}

}  // namespace inclab::cli
