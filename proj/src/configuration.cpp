#include "inclab/configuration.hpp"

#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "inclab/errors.hpp"

namespace inclab {

Configuration::Configuration(std::vector<std::int64_t> occupations) : occ_(std::move(occupations)) {
    if (occ_.empty()) throw InvalidArgument("configuration needs at least one site");
    for (auto v : occ_) {
        if (v < 0) throw InvalidArgument("occupation numbers must be nonnegative");
        n_ += v;
        sum_sq_ += v * v;
    }
}

Configuration Configuration::empty(std::size_t sites) {
    return Configuration(std::vector<std::int64_t>(sites, 0));
}

void Configuration::move(std::size_t from, std::size_t to) {
    if (occ_[from] <= 0) throw InvalidArgument("cannot move a particle from an empty site");
    if (from == to) return;
    // (a-1)^2 + (b+1)^2 - a^2 - b^2 = 2(b - a + 1)
    sum_sq_ += 2 * (occ_[to] - occ_[from] + 1);
    --occ_[from];
    ++occ_[to];
}

void Configuration::add(std::size_t x, std::int64_t count) {
    if (occ_[x] + count < 0) throw InvalidArgument("occupation would become negative");
    sum_sq_ += 2 * occ_[x] * count + count * count;
    occ_[x] += count;
    n_ += count;
}

std::int64_t Configuration::recomputed_sum_squares() const {
    std::int64_t s = 0;
    for (auto v : occ_) s += v * v;
    return s;
}

std::string Configuration::to_csv_row() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < occ_.size(); ++i) os << (i ? "," : "") << occ_[i];
    return os.str();
}

Partition::Partition(std::vector<double> masses) : masses_(std::move(masses)), dust_(0.0) {
    double s = 0.0;
    for (double m : masses_) s += m;
    dust_ = 1.0 - s;
    if (dust_ < 0.0 && dust_ > -1e-12) dust_ = 0.0;
    validate();
}

Partition::Partition(std::vector<double> masses, double dust)
    : masses_(std::move(masses)), dust_(dust) {
    validate();
}

double Partition::l1() const {
    double s = 0.0;
    for (double m : masses_) s += m;
    return s;
}

void Partition::validate() {
    while (!masses_.empty() && masses_.back() == 0.0) masses_.pop_back();
    double s = 0.0;
    for (std::size_t i = 0; i < masses_.size(); ++i) {
        const double m = masses_[i];
        if (!(m >= 0.0 && m <= 1.0)) throw InvalidArgument("partition masses must lie in [0,1]");
        if (i > 0 && m > masses_[i - 1]) throw InvalidArgument("partition masses must be nonincreasing");
        if (m > 1.0 / static_cast<double>(i + 1) + 1e-12)
            throw InvalidArgument("partition mass p_i exceeds 1/i");
        s += m;
    }
    if (!(dust_ >= -1e-12 && dust_ <= 1.0 + 1e-12)) throw InvalidArgument("dust must lie in [0,1]");
    if (std::abs(s + dust_ - 1.0) > 1e-12)
        throw InvalidArgument("partition masses plus dust must sum to 1");
    if (dust_ < 0.0) dust_ = 0.0;
}

std::vector<Configuration> enumerate_configurations(std::size_t sites, std::int64_t particles) {
    std::vector<Configuration> out;
    std::vector<std::int64_t> occ(sites, 0);
    std::function<void(std::size_t, std::int64_t)> rec = [&](std::size_t x, std::int64_t left) {
        if (x + 1 == sites) {
            occ[x] = left;
            out.emplace_back(occ);
            return;
        }
        for (std::int64_t k = left; k >= 0; --k) {
            occ[x] = k;
            rec(x + 1, left - k);
        }
    };
    if (sites > 0) rec(0, particles);
    return out;
}

}  // namespace inclab
