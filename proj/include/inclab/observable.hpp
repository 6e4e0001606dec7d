#pragma once

#include <array>
#include <limits>
#include <string>
#include <vector>

namespace inclab {

inline constexpr double INF = std::numeric_limits<double>::infinity();

/// Value and first three derivatives at a point.
using Jet = std::array<double, 4>;

struct WindowFactor {
    double cutoff;  // the factor is (1 - z/cutoff)_+^exponent
    int exponent;
};

struct ObservableTerm {
    double coef = 0.0;
    int power = 0;
    std::vector<WindowFactor> windows;
};

/// Test function from the closed family spanned by
///   coef * z^power * prod (1 - z/a)_+^q.
/// Terms without windows are polynomials (bounded only when constant); terms
/// with at least one window vanish beyond their smallest cutoff and at INF.
/// The family is closed under sums, products, differentiation, h -> (z h)'
/// and precomposition with z -> s z.
class Observable {
public:
    Observable() = default;

    static Observable constant(double c);
    static Observable monomial(int power, double coef = 1.0);
    static Observable polynomial(const std::vector<double>& coeffs);
    // z^power (1 - z/cutoff)^exponent on [0, cutoff], zero beyond; exponent >= 4.
    static Observable window(int power, double cutoff, int exponent);
    static Observable from_terms(std::vector<ObservableTerm> terms);

    const std::vector<ObservableTerm>& terms() const { return terms_; }

    double operator()(double z) const { return value(z); }
    double value(double z) const;
    Jet jet(double z) const;
    double derivative_at(double z, int order) const;
    // Declared value at INF; throws DomainMismatch for unbounded polynomials.
    double at_infinity() const;

    bool is_polynomial() const;
    bool is_constant() const;
    bool is_bounded() const;
    // Dense coefficient list; throws DomainMismatch if any term carries a window.
    std::vector<double> coefficients() const;

    Observable derivative() const;
    Observable b_transform() const;  // h + z h'
    Observable rescaled(double s) const;  // z -> h(s z)

    Observable operator+(const Observable& o) const;
    Observable operator-(const Observable& o) const;
    Observable operator*(const Observable& o) const;
    Observable operator*(double s) const;
    friend Observable operator*(double s, const Observable& o) { return o * s; }

    std::string describe() const;

private:
    void canonicalize();
    std::vector<ObservableTerm> terms_;
};

}  // namespace inclab
