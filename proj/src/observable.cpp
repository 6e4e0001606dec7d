#include "inclab/observable.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "inclab/errors.hpp"

namespace inclab {

namespace {

Jet monomial_jet(int power, double z) {
    Jet j{0.0, 0.0, 0.0, 0.0};
    for (int k = 0; k <= 3 && k <= power; ++k) {
        double falling = 1.0;
        for (int i = 0; i < k; ++i) falling *= static_cast<double>(power - i);
        j[k] = falling * std::pow(z, power - k);
    }
    return j;
}

Jet window_jet(const WindowFactor& w, double z) {
    Jet j{0.0, 0.0, 0.0, 0.0};
    if (z >= w.cutoff) return j;
    const double u = 1.0 - z / w.cutoff;
    const double slope = -1.0 / w.cutoff;
    for (int k = 0; k <= 3 && k <= w.exponent; ++k) {
        double falling = 1.0;
        for (int i = 0; i < k; ++i) falling *= static_cast<double>(w.exponent - i);
        j[k] = falling * std::pow(u, w.exponent - k) * std::pow(slope, k);
    }
    return j;
}

Jet jet_product(const Jet& f, const Jet& g) {
    static constexpr double binom[4][4] = {{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};
    Jet out{0.0, 0.0, 0.0, 0.0};
    for (int n = 0; n < 4; ++n)
        for (int k = 0; k <= n; ++k) out[n] += binom[n][k] * f[k] * g[n - k];
    return out;
}

bool same_shape(const ObservableTerm& a, const ObservableTerm& b) {
    if (a.power != b.power || a.windows.size() != b.windows.size()) return false;
    for (std::size_t i = 0; i < a.windows.size(); ++i)
        if (a.windows[i].cutoff != b.windows[i].cutoff ||
            a.windows[i].exponent != b.windows[i].exponent)
            return false;
    return true;
}

bool shape_less(const ObservableTerm& a, const ObservableTerm& b) {
    if (a.windows.size() != b.windows.size()) return a.windows.size() < b.windows.size();
    if (a.power != b.power) return a.power < b.power;
    for (std::size_t i = 0; i < a.windows.size(); ++i) {
        if (a.windows[i].cutoff != b.windows[i].cutoff)
            return a.windows[i].cutoff < b.windows[i].cutoff;
        if (a.windows[i].exponent != b.windows[i].exponent)
            return a.windows[i].exponent < b.windows[i].exponent;
    }
    return false;
}

}  // namespace

Observable Observable::constant(double c) {
    Observable h;
    h.terms_.push_back({c, 0, {}});
    h.canonicalize();
    return h;
}

Observable Observable::monomial(int power, double coef) {
    if (power < 0) throw InvalidArgument("monomial power must be nonnegative");
    Observable h;
    h.terms_.push_back({coef, power, {}});
    h.canonicalize();
    return h;
}

Observable Observable::polynomial(const std::vector<double>& coeffs) {
    Observable h;
    for (std::size_t k = 0; k < coeffs.size(); ++k)
        h.terms_.push_back({coeffs[k], static_cast<int>(k), {}});
    h.canonicalize();
    return h;
}

Observable Observable::window(int power, double cutoff, int exponent) {
    if (power < 0) throw InvalidArgument("window power must be nonnegative");
    if (!(cutoff > 0.0) || !std::isfinite(cutoff))
        throw InvalidArgument("window cutoff must be a positive finite number");
    if (exponent < 4) throw InvalidArgument("window exponent must be at least 4");
    Observable h;
    h.terms_.push_back({1.0, power, {{cutoff, exponent}}});
    h.canonicalize();
    return h;
}

Observable Observable::from_terms(std::vector<ObservableTerm> terms) {
    Observable h;
    h.terms_ = std::move(terms);
    h.canonicalize();
    return h;
}

void Observable::canonicalize() {
    for (auto& t : terms_) {
        std::sort(t.windows.begin(), t.windows.end(),
                  [](const WindowFactor& a, const WindowFactor& b) { return a.cutoff < b.cutoff; });
        std::vector<WindowFactor> merged;
        for (const auto& w : t.windows) {
            if (!merged.empty() && merged.back().cutoff == w.cutoff)
                merged.back().exponent += w.exponent;
            else
                merged.push_back(w);
        }
        t.windows = std::move(merged);
    }
    std::sort(terms_.begin(), terms_.end(), shape_less);
    std::vector<ObservableTerm> out;
    for (auto& t : terms_) {
        if (!out.empty() && same_shape(out.back(), t))
            out.back().coef += t.coef;
        else
            out.push_back(std::move(t));
    }
    out.erase(std::remove_if(out.begin(), out.end(),
                             [](const ObservableTerm& t) { return t.coef == 0.0; }),
              out.end());
    terms_ = std::move(out);
}

Jet Observable::jet(double z) const {
    if (std::isinf(z)) return {at_infinity(), 0.0, 0.0, 0.0};
    Jet total{0.0, 0.0, 0.0, 0.0};
    for (const auto& t : terms_) {
        Jet j = monomial_jet(t.power, z);
        for (const auto& w : t.windows) j = jet_product(j, window_jet(w, z));
        for (int k = 0; k < 4; ++k) total[k] += t.coef * j[k];
    }
    return total;
}

double Observable::value(double z) const {
    if (std::isinf(z)) return at_infinity();
    double total = 0.0;
    for (const auto& t : terms_) {
        double v = t.coef * std::pow(z, t.power);
        for (const auto& w : t.windows) {
            if (z >= w.cutoff) {
                v = 0.0;
                break;
            }
            v *= std::pow(1.0 - z / w.cutoff, w.exponent);
        }
        total += v;
    }
    return total;
}

double Observable::derivative_at(double z, int order) const {
    if (order < 0 || order > 3) throw InvalidArgument("derivative order must be in 0..3");
    return jet(z)[order];
}

double Observable::at_infinity() const {
    double c = 0.0;
    for (const auto& t : terms_) {
        if (!t.windows.empty()) continue;
        if (t.power > 0)
            throw DomainMismatch("unbounded polynomial observable has no value at INF: " +
                                 describe());
        c += t.coef;
    }
    return c;
}

bool Observable::is_polynomial() const {
    return std::all_of(terms_.begin(), terms_.end(),
                       [](const ObservableTerm& t) { return t.windows.empty(); });
}

bool Observable::is_constant() const {
    return std::all_of(terms_.begin(), terms_.end(),
                       [](const ObservableTerm& t) { return t.windows.empty() && t.power == 0; });
}

bool Observable::is_bounded() const {
    return std::all_of(terms_.begin(), terms_.end(),
                       [](const ObservableTerm& t) { return !t.windows.empty() || t.power == 0; });
}

std::vector<double> Observable::coefficients() const {
    if (!is_polynomial()) throw DomainMismatch("observable is not a polynomial: " + describe());
    int top = 0;
    for (const auto& t : terms_) top = std::max(top, t.power);
    std::vector<double> c(static_cast<std::size_t>(top) + 1, 0.0);
    for (const auto& t : terms_) c[static_cast<std::size_t>(t.power)] += t.coef;
    return c;
}

Observable Observable::derivative() const {
    std::vector<ObservableTerm> out;
    for (const auto& t : terms_) {
        if (t.power > 0) out.push_back({t.coef * t.power, t.power - 1, t.windows});
        for (std::size_t i = 0; i < t.windows.size(); ++i) {
            const auto& w = t.windows[i];
            if (w.exponent == 0) continue;  // indicator pieces are locally constant
            ObservableTerm d{t.coef * (-static_cast<double>(w.exponent) / w.cutoff), t.power,
                             t.windows};
            d.windows[i].exponent -= 1;
            out.push_back(std::move(d));
        }
    }
    return from_terms(std::move(out));
}

Observable Observable::b_transform() const {
    return *this + Observable::monomial(1) * derivative();
}

Observable Observable::rescaled(double s) const {
    if (s < 0.0 || !std::isfinite(s)) throw InvalidArgument("rescaling factor must be finite and >= 0");
    if (s == 0.0) return constant(value(0.0));
    std::vector<ObservableTerm> out;
    for (const auto& t : terms_) {
        ObservableTerm r{t.coef * std::pow(s, t.power), t.power, t.windows};
        for (auto& w : r.windows) w.cutoff /= s;
        out.push_back(std::move(r));
    }
    return from_terms(std::move(out));
}

Observable Observable::operator+(const Observable& o) const {
    std::vector<ObservableTerm> all = terms_;
    all.insert(all.end(), o.terms_.begin(), o.terms_.end());
    return from_terms(std::move(all));
}

Observable Observable::operator-(const Observable& o) const { return *this + o * -1.0; }

Observable Observable::operator*(const Observable& o) const {
    std::vector<ObservableTerm> out;
    for (const auto& a : terms_)
        for (const auto& b : o.terms_) {
            ObservableTerm p{a.coef * b.coef, a.power + b.power, a.windows};
            p.windows.insert(p.windows.end(), b.windows.begin(), b.windows.end());
            out.push_back(std::move(p));
        }
    return from_terms(std::move(out));
}

Observable Observable::operator*(double s) const {
    std::vector<ObservableTerm> out = terms_;
    for (auto& t : out) t.coef *= s;
    return from_terms(std::move(out));
}

std::string Observable::describe() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    os.precision(12);
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        const auto& t = terms_[i];
        if (i > 0) os << " + ";
        os << t.coef;
        if (t.power > 0) os << "*z^" << t.power;
        for (const auto& w : t.windows) os << "*(1-z/" << w.cutoff << ")_+^" << w.exponent;
    }
    return os.str();
}

}  // namespace inclab
