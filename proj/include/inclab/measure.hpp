#pragma once

#include <string>
#include <vector>

#include "inclab/observable.hpp"

namespace inclab {

enum class Scale { Macro, Meso };

struct Atom {
    double location;  // may be INF on the Meso scale
    double weight;
};

/// Probability measure with finitely many atoms, kept sorted with near-equal
/// locations merged.
class DiscreteMeasure {
public:
    static constexpr double kMergeTolerance = 1e-12;
    static constexpr double kMassTolerance = 1e-12;

    DiscreteMeasure() = default;
    DiscreteMeasure(std::vector<Atom> atoms, Scale scale);

    static DiscreteMeasure dirac(double location, Scale scale);
    // Equal-weight atoms at the given points, e.g. an ensemble of samples.
    static DiscreteMeasure empirical(const std::vector<double>& points, Scale scale);
    // Averages measures with equal weight; scales must agree.
    static DiscreteMeasure pooled(const std::vector<DiscreteMeasure>& parts);

    const std::vector<Atom>& atoms() const { return atoms_; }
    Scale scale() const { return scale_; }
    std::size_t size() const { return atoms_.size(); }
    double mass_at_infinity() const;
    double finite_mass() const { return 1.0 - mass_at_infinity(); }

    // Multiplies every location by s (INF stays INF) and tags the result Meso.
    DiscreteMeasure scaled(double s) const;

    std::string to_csv() const;

private:
    std::vector<Atom> atoms_;
    Scale scale_ = Scale::Macro;
};

double integrate(const DiscreteMeasure& mu, const Observable& h);

std::string format_location(double x);

}  // namespace inclab
