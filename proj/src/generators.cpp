#include "inclab/generators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "inclab/embeddings.hpp"
#include "inclab/errors.hpp"
#include "inclab/numerics.hpp"
#include "inclab/parallel.hpp"

namespace inclab {

CylindricalFunction CylindricalFunction::linear(const Observable& h) { return product({h}); }

CylindricalFunction CylindricalFunction::product(std::vector<Observable> factors, double coef) {
    CylindricalFunction H;
    H.products_.push_back({coef, std::move(factors)});
    return H;
}

double CylindricalFunction::evaluate(const DiscreteMeasure& mu) const {
    double total = 0.0;
    for (const auto& p : products_) {
        double v = p.coef;
        for (const auto& h : p.factors) v *= integrate(mu, h);
        total += v;
    }
    return total;
}

CylindricalFunction CylindricalFunction::rescaled(double s) const {
    CylindricalFunction H = *this;
    for (auto& p : H.products_)
        for (auto& h : p.factors) h = h.rescaled(s);
    return H;
}

CylindricalFunction CylindricalFunction::operator+(const CylindricalFunction& o) const {
    CylindricalFunction H = *this;
    H.products_.insert(H.products_.end(), o.products_.begin(), o.products_.end());
    return H;
}

CylindricalFunction CylindricalFunction::operator*(double s) const {
    CylindricalFunction H = *this;
    for (auto& p : H.products_) p.coef *= s;
    return H;
}

std::string CylindricalFunction::describe() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < products_.size(); ++i) {
        if (i > 0) os << " + ";
        os << products_[i].coef;
        for (const auto& h : products_[i].factors) os << "*mu(" << h.describe() << ")";
    }
    return os.str();
}

Observable b_operator(const Observable& h) { return h.b_transform(); }

double mutation_macro(const Observable& h, double z, double theta) {
    const Jet j = h.jet(z);
    return z * (1.0 - z) * j[2] + (2.0 - (2.0 + theta) * z) * j[1] + theta * (h.value(0.0) - j[0]);
}

double mutation_meso(const Observable& h, double z) {
    if (std::isinf(z)) return h.value(0.0) - h.at_infinity();
    const Jet j = h.jet(z);
    return z * j[2] + (2.0 - z) * j[1] + (h.value(0.0) - j[0]);
}

namespace {

double stretch_for(const Configuration& config, Scale embedding, double d) {
    return embedding == Scale::Macro ? 1.0 : d * static_cast<double>(config.sites());
}

// H(new) - H(old) where each factor integral moves from I_k to I_k + delta_k,
// summed as a telescoping product to avoid cancellation.
double product_increment(const std::vector<double>& base, const std::vector<double>& delta) {
    const std::size_t n = base.size();
    double total = 0.0;
    double head = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        double tail = 1.0;
        for (std::size_t j = k + 1; j < n; ++j) tail *= base[j];
        total += head * delta[k] * tail;
        head *= base[k] + delta[k];
    }
    return total;
}

}  // namespace

double discrete_generator_apply(const Configuration& config, const CylindricalFunction& H, double d,
                                Scale embedding) {
    const auto n = static_cast<double>(config.particles());
    const double stretch = stretch_for(config, embedding, d);
    std::map<std::int64_t, std::int64_t> histogram;
    for (auto v : config.occupations()) histogram[v] += 1;

    // Contribution of one site holding v particles to mu(h).
    auto contribution = [&](const Observable& h, std::int64_t v) {
        if (v == 0) return 0.0;
        const double frac = static_cast<double>(v) / n;
        return frac * h.value(stretch * frac);
    };

    const DiscreteMeasure mu = embed(config, embedding, d);
    struct ProductData {
        double coef;
        const std::vector<Observable>* factors;
        std::vector<double> base;
    };
    std::vector<ProductData> prods;
    for (const auto& p : H.products()) {
        ProductData pd{p.coef, &p.factors, {}};
        for (const auto& h : p.factors) pd.base.push_back(integrate(mu, h));
        prods.push_back(std::move(pd));
    }

    NeumaierSum total;
    std::vector<double> delta;
    for (const auto& [a, count_a] : histogram) {
        if (a == 0) continue;
        for (const auto& [b, count_b] : histogram) {
            const double pairs = a == b ? static_cast<double>(count_a) * static_cast<double>(count_a - 1)
                                        : static_cast<double>(count_a) * static_cast<double>(count_b);
            if (pairs == 0.0) continue;
            const double rate = static_cast<double>(a) * (d + static_cast<double>(b));
            double change = 0.0;
            for (const auto& pd : prods) {
                delta.clear();
                for (const auto& h : *pd.factors)
                    delta.push_back(contribution(h, a - 1) + contribution(h, b + 1) - contribution(h, a) -
                                    contribution(h, b));
                change += pd.coef * product_increment(pd.base, delta);
            }
            total.add(pairs * rate * change);
        }
    }
    return total.value();
}

double discrete_generator_naive(const Configuration& config, const CylindricalFunction& H, double d,
                                Scale embedding) {
    const double before = H.evaluate(embed(config, embedding, d));
    double total = 0.0;
    for (std::size_t x = 0; x < config.sites(); ++x) {
        if (config[x] == 0) continue;
        for (std::size_t y = 0; y < config.sites(); ++y) {
            if (y == x) continue;
            Configuration moved = config;
            moved.move(x, y);
            const double after = H.evaluate(embed(moved, embedding, d));
            total += static_cast<double>(config[x]) * (d + static_cast<double>(config[y])) * (after - before);
        }
    }
    return total;
}

namespace {

double product_except(const std::vector<double>& v, std::size_t skip1, std::size_t skip2) {
    double p = 1.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (i != skip1 && i != skip2) p *= v[i];
    return p;
}

}  // namespace

double limit_generator_macro(const DiscreteMeasure& mu, const CylindricalFunction& H, double theta) {
    if (mu.scale() != Scale::Macro) throw DomainMismatch("macroscopic limit generator needs a Macro measure");
    const auto& atoms = mu.atoms();
    const std::size_t none = static_cast<std::size_t>(-1);
    double total = 0.0;
    for (const auto& p : H.products()) {
        const std::size_t n = p.factors.size();
        std::vector<double> base(n), drift(n);
        std::vector<std::vector<double>> bvals(n, std::vector<double>(atoms.size()));
        std::vector<double> bmean(n, 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            NeumaierSum ib, idrift, imean;
            for (std::size_t a = 0; a < atoms.size(); ++a) {
                const double z = atoms[a].location, w = atoms[a].weight;
                const Jet j = p.factors[k].jet(z);
                ib.add(w * j[0]);
                idrift.add(w * mutation_macro(p.factors[k], z, theta));
                bvals[k][a] = j[0] + z * j[1];
                imean.add(w * bvals[k][a]);
            }
            base[k] = ib.value();
            drift[k] = idrift.value();
            bmean[k] = imean.value();
        }
        double value = 0.0;
        for (std::size_t k = 0; k < n; ++k) value += drift[k] * product_except(base, k, none);
        if (atoms.size() > 1) {
            for (std::size_t k = 0; k < n; ++k)
                for (std::size_t l = k + 1; l < n; ++l) {
                    NeumaierSum cov;
                    for (std::size_t a = 0; a < atoms.size(); ++a)
                        cov.add(atoms[a].weight * (bvals[k][a] - bmean[k]) * (bvals[l][a] - bmean[l]));
                    value += 2.0 * cov.value() * product_except(base, k, l);
                }
        }
        total += p.coef * value;
    }
    return total;
}

double limit_generator_meso(const DiscreteMeasure& mu, const CylindricalFunction& H) {
    if (mu.scale() != Scale::Meso) throw DomainMismatch("mesoscopic limit generator needs a Meso measure");
    const std::size_t none = static_cast<std::size_t>(-1);
    double total = 0.0;
    for (const auto& p : H.products()) {
        const std::size_t n = p.factors.size();
        std::vector<double> base(n), drift(n);
        for (std::size_t k = 0; k < n; ++k) {
            NeumaierSum ib, idrift;
            for (const auto& a : mu.atoms()) {
                ib.add(a.weight * p.factors[k].value(a.location));
                idrift.add(a.weight * mutation_meso(p.factors[k], a.location));
            }
            base[k] = ib.value();
            drift[k] = idrift.value();
        }
        double value = 0.0;
        for (std::size_t k = 0; k < n; ++k) value += drift[k] * product_except(base, k, none);
        total += p.coef * value;
    }
    return total;
}

double pd_phi(const std::vector<double>& p, int m) {
    if (m < 1) throw InvalidArgument("phi_m needs m >= 1");
    double s = 0.0;
    for (double x : p) s += std::pow(x, m);
    return s;
}

double pd_phi(const Partition& p, int m) { return pd_phi(p.masses(), m); }

double pd_generator_monomial(const std::vector<double>& p, const std::vector<int>& powers, double theta) {
    const std::size_t n = powers.size();
    const std::size_t none = static_cast<std::size_t>(-1);
    std::vector<double> phi(n);
    for (std::size_t k = 0; k < n; ++k) phi[k] = pd_phi(p, powers[k]);
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double m = powers[k];
        const double lower = powers[k] >= 2 ? pd_phi(p, powers[k] - 1) : 0.0;
        const double single = m * (m - 1.0) * lower - m * (m - 1.0 + theta) * phi[k];
        total += single * product_except(phi, k, none);
    }
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = k + 1; l < n; ++l) {
            const double cross = static_cast<double>(powers[k]) * powers[l] *
                                 (pd_phi(p, powers[k] + powers[l] - 1) - phi[k] * phi[l]);
            total += 2.0 * cross * product_except(phi, k, l);
        }
    return total;
}

double pd_generator_monomial(const Partition& p, const std::vector<int>& powers, double theta) {
    return pd_generator_monomial(p.masses(), powers, theta);
}

double ek_identity_residual(const Partition& p, const Observable& h, double theta) {
    const double lhs = limit_generator_macro(partition_to_measure(p), CylindricalFunction::linear(h), theta);
    const double h0 = h.value(0.0);
    double pd_part = 0.0;
    for (double pi : p.masses()) {
        const Jet j = h.jet(pi);
        const double first = j[0] - h0 + pi * j[1];
        const double second = 2.0 * j[1] + pi * j[2];
        pd_part += pi * (1.0 - pi) * second - theta * pi * first;
    }
    const double correction = 2.0 * h.derivative_at(0.0, 1) * (1.0 - p.l1());
    return lhs - pd_part - correction;
}

double jacobi_generator(const Observable& h, double z, double theta) {
    const Jet j = h.jet(z);
    return z * (1.0 - z) * j[2] - theta * z * j[1];
}

double QuadraticFunction::value(const std::vector<double>& z) const {
    double v = c;
    for (std::size_t i = 0; i < z.size(); ++i) {
        v += b[i] * z[i];
        for (std::size_t j = 0; j < z.size(); ++j) v += z[i] * Q[i][j] * z[j];
    }
    return v;
}

std::vector<double> QuadraticFunction::gradient(const std::vector<double>& z) const {
    std::vector<double> g(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        g[i] = b[i];
        for (std::size_t j = 0; j < z.size(); ++j) g[i] += (Q[i][j] + Q[j][i]) * z[j];
    }
    return g;
}

std::vector<std::vector<double>> QuadraticFunction::hessian() const {
    std::vector<std::vector<double>> h(Q.size(), std::vector<double>(Q.size()));
    for (std::size_t i = 0; i < Q.size(); ++i)
        for (std::size_t j = 0; j < Q.size(); ++j) h[i][j] = Q[i][j] + Q[j][i];
    return h;
}

double wf_generator(const std::vector<double>& gradient, const std::vector<std::vector<double>>& hessian,
                    const std::vector<double>& z, double theta) {
    double s = 0.0;
    double zsum = 0.0;
    for (double zi : z) zsum += zi;
    if (z.empty() || std::abs(zsum - 1.0) > 1e-9) throw BadSimplexPoint("simplex point must sum to 1");
    for (double zi : z)
        if (zi < 0.0) throw BadSimplexPoint("simplex point has a negative coordinate");
    for (std::size_t i = 0; i < z.size(); ++i)
        for (std::size_t j = 0; j < z.size(); ++j)
            s += z[i] * ((i == j ? 1.0 : 0.0) - z[j]) * hessian[i][j];
    for (std::size_t i = 1; i < z.size(); ++i) s += theta * z[i] * (gradient[0] - gradient[i]);
    return s;
}

double wf_generator(const QuadraticFunction& h, const std::vector<double>& z, double theta) {
    return wf_generator(h.gradient(z), h.hessian(), z, theta);
}

double fixed_site_generator(const Configuration& config, const Observable& h, double d) {
    const auto n = static_cast<double>(config.particles());
    const auto l = static_cast<double>(config.sites());
    const auto eta = static_cast<double>(config[0]);
    const double here = h.value(eta / n);
    double out = 0.0;
    if (config[0] > 0) out += eta * (d * (l - 1.0) + n - eta) * (h.value((eta - 1.0) / n) - here);
    if (config[0] < config.particles()) out += (n - eta) * (d + eta) * (h.value((eta + 1.0) / n) - here);
    return out;
}

double fixed_site_residual(const Configuration& config, const Observable& h, double d) {
    const double theta = d * static_cast<double>(config.sites());
    const double z = static_cast<double>(config[0]) / static_cast<double>(config.particles());
    return std::abs(fixed_site_generator(config, h, d) - jacobi_generator(h, z, theta));
}

DiscreteMeasure scale_measure(const DiscreteMeasure& mu, double theta) {
    if (mu.scale() != Scale::Macro) throw DomainMismatch("scale_measure expects a Macro measure");
    return mu.scaled(theta);
}

double theta_limit_residual(const DiscreteMeasure& mu, const CylindricalFunction& H, double theta) {
    if (!(theta > 0.0)) throw InvalidArgument("theta must be positive");
    const double macro = limit_generator_macro(mu, H.rescaled(theta), theta) / theta;
    const double meso = limit_generator_meso(scale_measure(mu, theta), H);
    return std::abs(macro - meso);
}

double GeneratorReport::max_error(std::size_t L) const {
    double m = 0.0;
    bool found = false;
    for (const auto& r : rows)
        if (r.L == L) {
            m = std::max(m, r.error);
            found = true;
        }
    if (!found) throw InvalidArgument("L=" + std::to_string(L) + " is not on the report grid");
    return m;
}

std::vector<std::size_t> GeneratorReport::grid() const {
    std::set<std::size_t> s;
    for (const auto& r : rows) s.insert(r.L);
    return {s.begin(), s.end()};
}

std::string GeneratorReport::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "L,N,d,theta,test_id,error\n";
    for (const auto& r : rows)
        os << r.L << ',' << r.N << ',' << r.d << ',' << r.theta << ',' << r.test_id << ',' << r.error << '\n';
    return os.str();
}

std::vector<BatteryCase> macro_battery(std::size_t L, std::int64_t N, double) {
    std::vector<std::pair<std::string, Configuration>> configs;
    std::vector<std::int64_t> condensed(L, 0);
    condensed[0] = N;
    configs.emplace_back("condensed", Configuration(condensed));
    configs.emplace_back("two_cluster", config_from_partition(Partition({0.5, 0.5}, 0.0), L, N));
    configs.emplace_back("flat", config_from_partition(Partition({}, 1.0), L, N));
    std::vector<double> zipf;
    double zsum = 0.0;
    for (int i = 1; i <= 8; ++i) zsum += 1.0 / (i * i);
    for (int i = 1; i <= 8; ++i) zipf.push_back(0.8 / (i * i) / zsum);
    configs.emplace_back("zipf", config_from_partition(Partition(zipf), L, N));

    const Observable z = Observable::monomial(1), z2 = Observable::monomial(2);
    std::vector<std::pair<std::string, CylindricalFunction>> tests = {
        {"mu(z)", CylindricalFunction::linear(z)},
        {"mu(z)^2", CylindricalFunction::product({z, z})},
        {"mu(z^2)", CylindricalFunction::linear(z2)},
    };
    std::vector<BatteryCase> out;
    for (const auto& [cid, c] : configs)
        for (const auto& [tid, H] : tests) out.push_back({cid + ":" + tid, c, H});
    return out;
}

std::vector<BatteryCase> meso_battery(std::size_t L, std::int64_t N, double d) {
    std::vector<std::pair<std::string, DiscreteMeasure>> targets = {
        {"dust", DiscreteMeasure::dirac(0.0, Scale::Meso)},
        {"condensed", DiscreteMeasure::dirac(INF, Scale::Meso)},
        {"clusters_1", DiscreteMeasure::dirac(1.0, Scale::Meso)},
        {"clusters_half_two", DiscreteMeasure({{0.5, 0.5}, {2.0, 0.5}}, Scale::Meso)},
        {"mixed", DiscreteMeasure({{0.0, 1.0 / 3}, {1.0, 1.0 / 3}, {INF, 1.0 / 3}}, Scale::Meso)},
    };
    const Observable w0 = Observable::window(0, 4.0, 4), w1 = Observable::window(1, 4.0, 4);
    std::vector<std::pair<std::string, CylindricalFunction>> tests = {
        {"mu(w0)", CylindricalFunction::linear(w0)},
        {"mu(w1)", CylindricalFunction::linear(w1)},
        {"mu(w0)mu(w1)", CylindricalFunction::product({w0, w1})},
    };
    std::vector<BatteryCase> out;
    for (const auto& [cid, nu] : targets) {
        const Configuration c = config_from_measure(nu, L, N, d);
        for (const auto& [tid, H] : tests) out.push_back({cid + ":" + tid, c, H});
    }
    return out;
}

std::vector<BatteryCase> constant_battery(std::size_t L, std::int64_t N, double d) {
    std::vector<BatteryCase> out;
    const auto base = macro_battery(L, N, d);
    for (std::size_t i = 0; i < base.size(); i += 3)
        out.push_back({base[i].id.substr(0, base[i].id.find(':')) + ":const",
                       base[i].config, CylindricalFunction::linear(Observable::constant(2.5))});
    return out;
}

GeneratorReport convergence_report(Scale scale, const std::vector<std::size_t>& L_grid, double rho,
                                   const std::function<double(std::size_t)>& d_of_L,
                                   const BatteryBuilder& battery, const std::string& battery_description,
                                   std::size_t workers) {
    GeneratorReport report;
    report.scale = scale;
    report.battery_description = battery_description;
    std::vector<std::size_t> grid = L_grid;
    std::sort(grid.begin(), grid.end());
    std::vector<std::vector<GeneratorReportRow>> per_L(grid.size());
    parallel_for(grid.size(), workers, [&](std::size_t gi) {
        const std::size_t L = grid[gi];
        const auto N = static_cast<std::int64_t>(std::llround(rho * static_cast<double>(L)));
        const double d = d_of_L(L);
        const double theta = d * static_cast<double>(L);
        for (const auto& c : battery(L, N, d)) {
            const double discrete = discrete_generator_apply(c.config, c.H, d, scale);
            const DiscreteMeasure mu = embed(c.config, scale, d);
            const double err = scale == Scale::Macro
                                   ? std::abs(discrete - limit_generator_macro(mu, c.H, theta))
                                   : std::abs(discrete / theta - limit_generator_meso(mu, c.H));
            per_L[gi].push_back({L, N, d, theta, c.id, err});
        }
    });
    for (auto& rows : per_L) report.rows.insert(report.rows.end(), rows.begin(), rows.end());
    return report;
}

}  // namespace inclab
