#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace inclab {

/// Occupation numbers of N particles on L sites, with cached N and sum of squares.
class Configuration {
public:
    Configuration() = default;
    explicit Configuration(std::vector<std::int64_t> occupations);
    static Configuration empty(std::size_t sites);

    std::size_t sites() const { return occ_.size(); }
    std::int64_t particles() const { return n_; }
    std::int64_t sum_squares() const { return sum_sq_; }
    std::int64_t operator[](std::size_t x) const { return occ_[x]; }
    const std::vector<std::int64_t>& occupations() const { return occ_; }

    // Moves one particle from site `from` to site `to`; `from` must be occupied.
    void move(std::size_t from, std::size_t to);
    void add(std::size_t x, std::int64_t count);
    std::int64_t recomputed_sum_squares() const;

    std::string to_csv_row() const;
    bool operator==(const Configuration& o) const { return occ_ == o.occ_; }

private:
    std::vector<std::int64_t> occ_;
    std::int64_t n_ = 0;
    std::int64_t sum_sq_ = 0;
};

/// Point of the Kingman simplex: nonincreasing masses plus the unrepresented dust.
class Partition {
public:
    Partition() : dust_(1.0) {}
    // Dust is inferred as 1 - sum(masses).
    explicit Partition(std::vector<double> masses);
    Partition(std::vector<double> masses, double dust);

    const std::vector<double>& masses() const { return masses_; }
    double dust() const { return dust_; }
    double l1() const;
    std::size_t size() const { return masses_.size(); }
    double operator[](std::size_t i) const { return masses_[i]; }

private:
    void validate();
    std::vector<double> masses_;
    double dust_;
};

/// All configurations of Omega_{L,N} in lexicographic order (small instances only).
std::vector<Configuration> enumerate_configurations(std::size_t sites, std::int64_t particles);

}  // namespace inclab
