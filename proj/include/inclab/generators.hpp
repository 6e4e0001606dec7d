#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "inclab/configuration.hpp"
#include "inclab/measure.hpp"
#include "inclab/observable.hpp"

namespace inclab {

/// Linear combination of products mu(h_1) ... mu(h_n).
class CylindricalFunction {
public:
    struct Product {
        double coef = 1.0;
        std::vector<Observable> factors;
    };

    CylindricalFunction() = default;
    static CylindricalFunction linear(const Observable& h);
    static CylindricalFunction product(std::vector<Observable> factors, double coef = 1.0);

    const std::vector<Product>& products() const { return products_; }

    double operator()(const DiscreteMeasure& mu) const { return evaluate(mu); }
    double evaluate(const DiscreteMeasure& mu) const;
    // Every factor precomposed with z -> s z.
    CylindricalFunction rescaled(double s) const;

    CylindricalFunction operator+(const CylindricalFunction& o) const;
    CylindricalFunction operator*(double s) const;

    std::string describe() const;

private:
    std::vector<Product> products_;
};

Observable b_operator(const Observable& h);

// z(1-z)h'' + (2-(2+theta)z)h' + theta(h(0)-h(z)) on [0,1].
double mutation_macro(const Observable& h, double z, double theta);
// z h'' + (2-z)h' + h(0)-h(z) on [0,INF], with h(0)-h(INF) at INF.
double mutation_meso(const Observable& h, double z);

// Exact discrete generator on H composed with the chosen embedding, grouping
// sites with equal occupation.
double discrete_generator_apply(const Configuration& config, const CylindricalFunction& H, double d,
                                Scale embedding);
// Double sum over all ordered site pairs; reference implementation.
double discrete_generator_naive(const Configuration& config, const CylindricalFunction& H, double d,
                                Scale embedding);

double limit_generator_macro(const DiscreteMeasure& mu, const CylindricalFunction& H, double theta);
double limit_generator_meso(const DiscreteMeasure& mu, const CylindricalFunction& H);

// phi_m(p) = sum p_i^m, with m = 1 evaluated literally as the l1 norm.
double pd_phi(const Partition& p, int m);
double pd_phi(const std::vector<double>& p, int m);
// Generator of the Poisson-Dirichlet diffusion on prod_k phi_{m_k}.
double pd_generator_monomial(const Partition& p, const std::vector<int>& powers, double theta);
double pd_generator_monomial(const std::vector<double>& p, const std::vector<int>& powers, double theta);

// L H(mu^(p)) - B f(p) - 2 h'(0)(1 - |p|_1) for H = mu(h), f(p) = mu^(p)(h).
double ek_identity_residual(const Partition& p, const Observable& h, double theta);

// z(1-z)h'' - theta z h'
double jacobi_generator(const Observable& h, double z, double theta);

/// Quadratic function c + b.z + z.Q.z on R^{n+1}.
struct QuadraticFunction {
    double c = 0.0;
    std::vector<double> b;
    std::vector<std::vector<double>> Q;

    double value(const std::vector<double>& z) const;
    std::vector<double> gradient(const std::vector<double>& z) const;
    std::vector<std::vector<double>> hessian() const;
};

// Wright-Fisher generator on the simplex with mutation from types 1..n into type 0.
double wf_generator(const std::vector<double>& gradient, const std::vector<std::vector<double>>& hessian,
                    const std::vector<double>& z, double theta);
double wf_generator(const QuadraticFunction& h, const std::vector<double>& z, double theta);

// Exact discrete generator on h(eta_1 / N) (first site).
double fixed_site_generator(const Configuration& config, const Observable& h, double d);
// |exact discrete value - Jacobi generator at eta_1/N| with theta = dL.
double fixed_site_residual(const Configuration& config, const Observable& h, double d);

DiscreteMeasure scale_measure(const DiscreteMeasure& mu, double theta);
double theta_limit_residual(const DiscreteMeasure& mu, const CylindricalFunction& H, double theta);

struct BatteryCase {
    std::string id;
    Configuration config;
    CylindricalFunction H;
};

struct GeneratorReportRow {
    std::size_t L = 0;
    std::int64_t N = 0;
    double d = 0.0;
    double theta = 0.0;
    std::string test_id;
    double error = 0.0;
};

/// Per-(L, test) generator approximation errors. The supremum over all
/// configurations is replaced by the battery, so the reported maxima are lower
/// bounds on the true supremum.
struct GeneratorReport {
    Scale scale = Scale::Macro;
    std::string battery_description;
    std::vector<GeneratorReportRow> rows;

    double max_error(std::size_t L) const;
    std::vector<std::size_t> grid() const;
    std::string to_csv() const;
};

using BatteryBuilder = std::function<std::vector<BatteryCase>(std::size_t L, std::int64_t N, double d)>;

// Condensed, two-cluster, flat and Zipf-profile configurations against
// mu(z), mu(z)^2 and mu(z^2).
std::vector<BatteryCase> macro_battery(std::size_t L, std::int64_t N, double d);
// Configurations built from mesoscopic target measures against window observables.
std::vector<BatteryCase> meso_battery(std::size_t L, std::int64_t N, double d);
std::vector<BatteryCase> constant_battery(std::size_t L, std::int64_t N, double d);

// For each L on the grid: N = round(rho L), d = d_of_L(L). Macro error is
// |discrete - limit| with theta = dL; Meso error is |discrete/(dL) - limit|.
GeneratorReport convergence_report(Scale scale, const std::vector<std::size_t>& L_grid, double rho,
                                   const std::function<double(std::size_t)>& d_of_L,
                                   const BatteryBuilder& battery,
                                   const std::string& battery_description, std::size_t workers = 1);

}  // namespace inclab
