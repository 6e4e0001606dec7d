#include "inclab/embeddings.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "inclab/errors.hpp"

namespace inclab {

namespace {

DiscreteMeasure embed_with_stretch(const Configuration& config, double stretch, Scale scale) {
    const auto n = static_cast<double>(config.particles());
    if (config.particles() <= 0) throw InvalidArgument("cannot embed a configuration without particles");
    std::map<std::int64_t, std::int64_t> histogram;
    for (auto v : config.occupations())
        if (v > 0) histogram[v] += 1;
    std::vector<Atom> atoms;
    atoms.reserve(histogram.size());
    for (const auto& [v, count] : histogram)
        atoms.push_back({stretch * static_cast<double>(v) / n, static_cast<double>(v * count) / n});
    return DiscreteMeasure(std::move(atoms), scale);
}

}  // namespace

DiscreteMeasure embed_macroscopic(const Configuration& config) {
    return embed_with_stretch(config, 1.0, Scale::Macro);
}

DiscreteMeasure embed_mesoscopic(const Configuration& config, double d) {
    if (!(d > 0.0)) throw InvalidArgument("diffusivity d must be positive");
    return embed_with_stretch(config, d * static_cast<double>(config.sites()), Scale::Meso);
}

DiscreteMeasure embed(const Configuration& config, Scale scale, double d) {
    return scale == Scale::Macro ? embed_macroscopic(config) : embed_mesoscopic(config, d);
}

DiscreteMeasure partition_to_measure(const Partition& p) {
    std::vector<Atom> atoms;
    atoms.reserve(p.size() + 1);
    if (p.dust() > 0.0) atoms.push_back({0.0, p.dust()});
    for (double m : p.masses()) atoms.push_back({m, m});
    return DiscreteMeasure(std::move(atoms), Scale::Macro);
}

Partition measure_to_partition(const DiscreteMeasure& mu, double tolerance) {
    std::vector<double> masses;
    for (const auto& a : mu.atoms()) {
        if (std::isinf(a.location)) throw NotInE("atom at INF has no partition preimage");
        if (a.location == 0.0) continue;
        const double ratio = a.weight / a.location;
        const double k = std::round(ratio);
        if (k < 1.0 || std::abs(ratio - k) > tolerance * std::max(1.0, k))
            throw NotInE("atom at " + std::to_string(a.location) + " has weight/location ratio " +
                         std::to_string(ratio) + ", not a positive integer");
        for (int i = 0; i < static_cast<int>(k); ++i) masses.push_back(a.location);
    }
    std::sort(masses.begin(), masses.end(), std::greater<>());
    return Partition(std::move(masses));
}

Partition order_configuration(const Configuration& config) {
    const auto n = static_cast<double>(config.particles());
    std::vector<std::int64_t> occ = config.occupations();
    std::sort(occ.begin(), occ.end(), std::greater<>());
    std::vector<double> masses;
    for (auto v : occ)
        if (v > 0) masses.push_back(static_cast<double>(v) / n);
    return Partition(std::move(masses), 0.0);
}

std::vector<std::int64_t> size_biased_sample(const Configuration& config, std::size_t k, Rng& rng) {
    std::vector<std::int64_t> remaining;
    for (auto v : config.occupations())
        if (v > 0) remaining.push_back(v);
    if (k > remaining.size())
        throw TooManyDraws("requested " + std::to_string(k) + " draws but only " +
                           std::to_string(remaining.size()) + " sites are occupied");
    std::int64_t total = config.particles();
    std::vector<std::int64_t> out;
    out.reserve(k);
    for (std::size_t draw = 0; draw < k; ++draw) {
        auto r = static_cast<std::int64_t>(uniform_index(rng, static_cast<std::uint64_t>(total)));
        std::size_t i = 0;
        while (r >= remaining[i]) r -= remaining[i++];
        out.push_back(remaining[i]);
        total -= remaining[i];
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(i));
    }
    return out;
}

Configuration config_from_partition(const Partition& p, std::size_t L, std::int64_t N) {
    if (p.size() > L)
        throw TooManyParts(std::to_string(p.size()) + " positive masses do not fit on " +
                           std::to_string(L) + " sites");
    std::vector<std::int64_t> occ(L, 0);
    std::int64_t used = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        occ[i] = static_cast<std::int64_t>(std::floor(p[i] * static_cast<double>(N)));
        used += occ[i];
    }
    const std::int64_t spare = N - used;
    const auto sites = static_cast<std::int64_t>(L);
    for (std::size_t x = 0; x < L; ++x)
        occ[x] += spare / sites + (static_cast<std::int64_t>(x) < spare % sites ? 1 : 0);
    return Configuration(std::move(occ));
}

Configuration config_from_measure(const DiscreteMeasure& nu, std::size_t L, std::int64_t N, double d) {
    if (nu.scale() != Scale::Meso) throw DomainMismatch("config_from_measure expects a mesoscopic measure");
    if (!(d > 0.0)) throw InvalidArgument("diffusivity d must be positive");
    const double dl = d * static_cast<double>(L);
    const double n = static_cast<double>(N);
    std::vector<std::int64_t> occ;
    occ.reserve(L);
    std::int64_t placed = 0;
    double alpha_inf = 0.0;
    for (const auto& a : nu.atoms()) {
        if (std::isinf(a.location)) {
            alpha_inf += a.weight;
            continue;
        }
        if (a.location == 0.0) continue;
        const auto cluster = static_cast<std::int64_t>(std::floor(n / dl * a.location));
        if (cluster < 1)
            throw DoesNotFit("atom at " + std::to_string(a.location) +
                             " is below one particle per site at this L, N, d");
        const auto copies = static_cast<std::int64_t>(std::floor(a.weight * n / static_cast<double>(cluster)));
        for (std::int64_t c = 0; c < copies; ++c) {
            if (occ.size() >= L) throw DoesNotFit("cluster sites exceed the " + std::to_string(L) + " available");
            occ.push_back(cluster);
            placed += cluster;
        }
    }
    if (alpha_inf > 0.0) {
        if (occ.size() >= L) throw DoesNotFit("no site left for the mass at INF");
        const auto k_inf = static_cast<std::int64_t>(std::floor(alpha_inf * n));
        occ.push_back(k_inf);
        placed += k_inf;
    }
    const std::int64_t leftover = N - placed;
    const auto empty_sites = static_cast<std::int64_t>(L - occ.size());
    if (leftover < 0) throw DoesNotFit("cluster construction overshoots N");
    if (leftover > 0 && empty_sites == 0) throw DoesNotFit("no empty sites left for the remaining particles");
    for (std::int64_t x = 0; x < empty_sites; ++x)
        occ.push_back(leftover / empty_sites + (x < leftover % empty_sites ? 1 : 0));
    return Configuration(std::move(occ));
}

double phi_moment(const Configuration& config, int m) {
    const auto n = static_cast<double>(config.particles());
    double s = 0.0;
    for (auto v : config.occupations())
        if (v > 0) s += std::pow(static_cast<double>(v) / n, m);
    return s;
}

}  // namespace inclab
