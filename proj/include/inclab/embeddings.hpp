#pragma once

#include <cstdint>
#include <vector>

#include "inclab/configuration.hpp"
#include "inclab/measure.hpp"
#include "inclab/random.hpp"

namespace inclab {

// Size-biased empirical measure of mass fractions on [0,1].
DiscreteMeasure embed_macroscopic(const Configuration& config);
// Same weights, locations stretched by dL (mesoscopic cluster sizes).
DiscreteMeasure embed_mesoscopic(const Configuration& config, double d);
DiscreteMeasure embed(const Configuration& config, Scale scale, double d);

DiscreteMeasure partition_to_measure(const Partition& p);
// Inverse on the image: each atom at z > 0 must carry weight k z for an integer k >= 1.
Partition measure_to_partition(const DiscreteMeasure& mu, double tolerance = 1e-9);

Partition order_configuration(const Configuration& config);

// Successive size-biased picks of sites without replacement; returns their occupations.
std::vector<std::int64_t> size_biased_sample(const Configuration& config, std::size_t k, Rng& rng);

// Floors of p_i N on the first sites, remainder spread as evenly as possible.
Configuration config_from_partition(const Partition& p, std::size_t L, std::int64_t N);

// Clusters of floor(N p / (dL)) particles for each finite atom, one site for the
// mass at INF, leftover particles spread over the remaining empty sites.
Configuration config_from_measure(const DiscreteMeasure& nu, std::size_t L, std::int64_t N, double d);

// sum_x (eta_x / N)^m
double phi_moment(const Configuration& config, int m);

}  // namespace inclab
