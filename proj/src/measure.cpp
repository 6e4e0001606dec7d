#include "inclab/measure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "inclab/errors.hpp"
#include "inclab/numerics.hpp"

namespace inclab {

DiscreteMeasure::DiscreteMeasure(std::vector<Atom> atoms, Scale scale) : scale_(scale) {
    NeumaierSum total;
    for (const auto& a : atoms) {
        if (std::isnan(a.location) || a.location < 0.0)
            throw InvalidArgument("atom locations must be nonnegative");
        if (!(a.weight >= 0.0)) throw InvalidArgument("atom weights must be nonnegative");
        if (scale == Scale::Macro && (std::isinf(a.location) || a.location > 1.0 + kMergeTolerance))
            throw InvalidArgument("macroscopic measures live on [0,1]");
        total.add(a.weight);
    }
    if (std::abs(total.value() - 1.0) > kMassTolerance)
        throw InvalidArgument("measure weights must sum to 1 (got " + std::to_string(total.value()) + ")");
    std::sort(atoms.begin(), atoms.end(),
              [](const Atom& a, const Atom& b) { return a.location < b.location; });
    for (const auto& a : atoms) {
        if (a.weight == 0.0) continue;
        if (!atoms_.empty() && (atoms_.back().location == a.location ||
                                a.location - atoms_.back().location <= kMergeTolerance))
            atoms_.back().weight += a.weight;
        else
            atoms_.push_back(a);
    }
    if (scale == Scale::Macro)
        for (auto& a : atoms_) a.location = std::min(a.location, 1.0);
}

DiscreteMeasure DiscreteMeasure::dirac(double location, Scale scale) {
    return DiscreteMeasure({{location, 1.0}}, scale);
}

DiscreteMeasure DiscreteMeasure::empirical(const std::vector<double>& points, Scale scale) {
    if (points.empty()) throw InvalidArgument("empirical measure needs at least one point");
    std::vector<Atom> atoms;
    atoms.reserve(points.size());
    const double w = 1.0 / static_cast<double>(points.size());
    for (double p : points) atoms.push_back({p, w});
    return DiscreteMeasure(std::move(atoms), scale);
}

DiscreteMeasure DiscreteMeasure::pooled(const std::vector<DiscreteMeasure>& parts) {
    if (parts.empty()) throw InvalidArgument("cannot pool an empty list of measures");
    const Scale scale = parts.front().scale();
    std::size_t count = 0;
    for (const auto& p : parts) {
        if (p.scale() != scale) throw DomainMismatch("pooled measures must share a scale");
        count += p.size();
    }
    std::vector<Atom> atoms;
    atoms.reserve(count);
    const double w = 1.0 / static_cast<double>(parts.size());
    for (const auto& p : parts)
        for (const auto& a : p.atoms()) atoms.push_back({a.location, a.weight * w});
    return DiscreteMeasure(std::move(atoms), scale);
}

double DiscreteMeasure::mass_at_infinity() const {
    double m = 0.0;
    for (const auto& a : atoms_)
        if (std::isinf(a.location)) m += a.weight;
    return m;
}

DiscreteMeasure DiscreteMeasure::scaled(double s) const {
    if (!(s > 0.0)) throw InvalidArgument("scale factor must be positive");
    std::vector<Atom> atoms = atoms_;
    for (auto& a : atoms)
        if (!std::isinf(a.location)) a.location *= s;
    return DiscreteMeasure(std::move(atoms), Scale::Meso);
}

std::string format_location(double x) {
    if (std::isinf(x)) return "inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string DiscreteMeasure::to_csv() const {
    std::ostringstream os;
    os << "location,weight\n";
    for (const auto& a : atoms_) os << format_location(a.location) << ',' << format_location(a.weight) << '\n';
    return os.str();
}

double integrate(const DiscreteMeasure& mu, const Observable& h) {
    NeumaierSum s;
    for (const auto& a : mu.atoms()) s.add(a.weight * h.value(a.location));
    return s.value();
}

}  // namespace inclab
