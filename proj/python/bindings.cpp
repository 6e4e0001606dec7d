#include <pybind11/functional.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "inclab/diffusions.hpp"
#include "inclab/embeddings.hpp"
#include "inclab/errors.hpp"
#include "inclab/fleming_viot.hpp"
#include "inclab/generators.hpp"
#include "inclab/ip_simulator.hpp"
#include "inclab/metrics.hpp"
#include "inclab/stationary.hpp"

namespace py = pybind11;
using namespace inclab;

PYBIND11_MODULE(_inclab, m) {
    m.doc() = "Inclusion process simulation and limit-process tools";
    m.attr("INF") = INF;

    auto base = py::register_exception<Error>(m, "Error", PyExc_ValueError);
    py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
    py::register_exception<NotInE>(m, "NotInE", base.ptr());
    py::register_exception<TooManyDraws>(m, "TooManyDraws", base.ptr());
    py::register_exception<TooManyParts>(m, "TooManyParts", base.ptr());
    py::register_exception<DoesNotFit>(m, "DoesNotFit", base.ptr());
    py::register_exception<DomainMismatch>(m, "DomainMismatch", base.ptr());
    py::register_exception<Frozen>(m, "Frozen", base.ptr());
    py::register_exception<SchemeMismatch>(m, "SchemeMismatch", base.ptr());
    py::register_exception<NonpositiveTime>(m, "NonpositiveTime", base.ptr());
    py::register_exception<BadSimplexPoint>(m, "BadSimplexPoint", base.ptr());
    py::register_exception<TooSparse>(m, "TooSparse", base.ptr());
    py::register_exception<MismatchedSetup>(m, "MismatchedSetup", base.ptr());
    py::register_exception<GridTooCoarse>(m, "GridTooCoarse", base.ptr());

    py::enum_<Scale>(m, "Scale").value("MACRO", Scale::Macro).value("MESO", Scale::Meso);
    py::enum_<TimeScale>(m, "TimeScale").value("RAW", TimeScale::Raw).value("MESO", TimeScale::Meso);

    py::class_<Configuration>(m, "Configuration")
        .def(py::init<std::vector<std::int64_t>>(), py::arg("occupations"))
        .def_property_readonly("sites", &Configuration::sites)
        .def_property_readonly("particles", &Configuration::particles)
        .def_property_readonly("sum_squares", &Configuration::sum_squares)
        .def_property_readonly("occupations", &Configuration::occupations)
        .def("__getitem__", &Configuration::operator[])
        .def("__len__", &Configuration::sites)
        .def(py::self == py::self)
        .def("__repr__", [](const Configuration& c) { return "Configuration(" + c.to_csv_row() + ")"; });
    m.def("enumerate_configurations", &enumerate_configurations, py::arg("sites"), py::arg("particles"));

    py::class_<Partition>(m, "Partition")
        .def(py::init<>())
        .def(py::init<std::vector<double>>(), py::arg("masses"))
        .def(py::init<std::vector<double>, double>(), py::arg("masses"), py::arg("dust"))
        .def_property_readonly("masses", &Partition::masses)
        .def_property_readonly("dust", &Partition::dust)
        .def("l1", &Partition::l1);

    py::class_<Observable>(m, "Observable")
        .def_static("constant", &Observable::constant, py::arg("c"))
        .def_static("monomial", &Observable::monomial, py::arg("power"), py::arg("coef") = 1.0)
        .def_static("polynomial", &Observable::polynomial, py::arg("coeffs"))
        .def_static("window", &Observable::window, py::arg("power"), py::arg("cutoff"), py::arg("exponent"))
        .def("__call__", &Observable::value)
        .def("derivative", &Observable::derivative)
        .def("derivative_at", &Observable::derivative_at, py::arg("z"), py::arg("order"))
        .def("b_transform", &Observable::b_transform)
        .def("rescaled", &Observable::rescaled, py::arg("s"))
        .def("at_infinity", &Observable::at_infinity)
        .def("is_bounded", &Observable::is_bounded)
        .def(py::self + py::self)
        .def(py::self - py::self)
        .def(py::self * py::self)
        .def(py::self * double())
        .def(double() * py::self)
        .def("__repr__", &Observable::describe);

    py::class_<DiscreteMeasure>(m, "DiscreteMeasure")
        .def(py::init([](const std::vector<std::pair<double, double>>& atoms, Scale scale) {
                 std::vector<Atom> a;
                 for (const auto& [loc, w] : atoms) a.push_back({loc, w});
                 return DiscreteMeasure(std::move(a), scale);
             }),
             py::arg("atoms"), py::arg("scale"))
        .def_static("dirac", &DiscreteMeasure::dirac, py::arg("location"), py::arg("scale"))
        .def_static("empirical", &DiscreteMeasure::empirical, py::arg("points"), py::arg("scale"))
        .def_property_readonly("atoms",
                               [](const DiscreteMeasure& mu) {
                                   std::vector<std::pair<double, double>> out;
                                   for (const auto& a : mu.atoms()) out.emplace_back(a.location, a.weight);
                                   return out;
                               })
        .def_property_readonly("scale", &DiscreteMeasure::scale)
        .def("mass_at_infinity", &DiscreteMeasure::mass_at_infinity)
        .def("integrate", [](const DiscreteMeasure& mu, const Observable& h) { return integrate(mu, h); });

    m.def("embed", &embed, py::arg("config"), py::arg("scale"), py::arg("d"));
    m.def("config_from_partition", &config_from_partition, py::arg("partition"), py::arg("L"), py::arg("N"));
    m.def("config_from_measure", &config_from_measure, py::arg("measure"), py::arg("L"), py::arg("N"), py::arg("d"));
    m.def("order_configuration", &order_configuration, py::arg("config"));
    m.def("phi_moment", &phi_moment, py::arg("config"), py::arg("m"));

    py::class_<IPParams>(m, "IPParams")
        .def(py::init([](std::size_t L, std::int64_t N, double d, TimeScale ts) {
                 IPParams p{L, N, d, ts};
                 p.validate();
                 return p;
             }),
             py::arg("L"), py::arg("N"), py::arg("d"), py::arg("time_scale") = TimeScale::Raw)
        .def_readonly("L", &IPParams::L)
        .def_readonly("N", &IPParams::N)
        .def_readonly("d", &IPParams::d)
        .def_readonly("time_scale", &IPParams::time_scale);

    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("times", &Trajectory::times)
        .def_readonly("snapshots", &Trajectory::snapshots)
        .def_readonly("event_count", &Trajectory::event_count);
    m.def(
        "simulate",
        [](const IPParams& p, const Configuration& init, const std::vector<double>& schedule, std::uint64_t seed) {
            py::gil_scoped_release release;
            return simulate(p, init, schedule, seed);
        },
        py::arg("params"), py::arg("init"), py::arg("schedule"), py::arg("seed"));

    py::class_<EnsembleResult>(m, "EnsembleResult")
        .def_readonly("times", &EnsembleResult::times)
        .def_readonly("measures", &EnsembleResult::measures)
        .def_readonly("pooled", &EnsembleResult::pooled)
        .def_readonly("events", &EnsembleResult::events);
    m.def(
        "run_ensemble",
        [](const IPParams& p, const Configuration& init, const std::vector<double>& schedule, std::size_t replicas,
           std::uint64_t seed, Scale embedding, std::size_t workers) {
            py::gil_scoped_release release;
            return run_ensemble(p, init, schedule, replicas, seed, embedding, workers);
        },
        py::arg("params"), py::arg("init"), py::arg("schedule"), py::arg("replicas"), py::arg("seed"),
        py::arg("embedding"), py::arg("workers") = 1);

    py::class_<CanonicalMeasure>(m, "CanonicalMeasure")
        .def(py::init<std::size_t, std::int64_t, double>(), py::arg("L"), py::arg("N"), py::arg("d"))
        .def("log_probability", &CanonicalMeasure::log_probability)
        .def("marginal_pmf", &CanonicalMeasure::marginal_pmf)
        .def("sample", [](const CanonicalMeasure& pi, std::uint64_t seed) {
            Rng rng(seed);
            return pi.sample(rng);
        });
    m.def("size_biased_pmf", &size_biased_pmf, py::arg("L"), py::arg("N"), py::arg("d"));
    m.def("geometric_limit_pmf", &geometric_limit_pmf, py::arg("n"), py::arg("gamma"));
    m.def("pd_stationary_moment", &pd_stationary_moment, py::arg("m"), py::arg("theta"));
    m.def("beta_generator_pairing", &beta_generator_pairing, py::arg("h"), py::arg("g"), py::arg("theta"));
    m.def(
        "sample_pd",
        [](double theta, double tol, std::uint64_t seed) {
            Rng rng(seed);
            return sample_pd(theta, tol, rng);
        },
        py::arg("theta"), py::arg("tol"), py::arg("seed"));
    m.def("closed_form_density", &closed_form_density, py::arg("t"), py::arg("z"), py::arg("z0"));
    m.def("closed_form_cdf_from_zero", &closed_form_cdf_from_zero, py::arg("t"), py::arg("z"));

    py::class_<CylindricalFunction>(m, "CylindricalFunction")
        .def_static("linear", &CylindricalFunction::linear, py::arg("h"))
        .def_static("product", &CylindricalFunction::product, py::arg("factors"), py::arg("coef") = 1.0)
        .def("__call__", &CylindricalFunction::evaluate)
        .def(py::self + py::self)
        .def(py::self * double())
        .def("__repr__", &CylindricalFunction::describe);
    m.def("discrete_generator", &discrete_generator_apply, py::arg("config"), py::arg("H"), py::arg("d"),
          py::arg("embedding"));
    m.def("limit_generator_macro", &limit_generator_macro, py::arg("mu"), py::arg("H"), py::arg("theta"));
    m.def("limit_generator_meso", &limit_generator_meso, py::arg("mu"), py::arg("H"));
    m.def("mutation_macro", &mutation_macro, py::arg("h"), py::arg("z"), py::arg("theta"));
    m.def("mutation_meso", &mutation_meso, py::arg("h"), py::arg("z"));
    m.def("ek_identity_residual", &ek_identity_residual, py::arg("partition"), py::arg("h"), py::arg("theta"));

    py::class_<JumpDiffusionSpec>(m, "JumpDiffusionSpec").def_readonly("name", &JumpDiffusionSpec::name);
    m.def("macro_dual_spec", &macro_dual_spec, py::arg("theta"));
    m.def("meso_dual_spec", &meso_dual_spec);
    m.def("jacobi_spec", &jacobi_spec, py::arg("theta"));
    m.def(
        "ensemble_law",
        [](const JumpDiffusionSpec& spec, const DiscreteMeasure& initial, double t, std::size_t replicas,
           const std::string& scheme, double dt, std::uint64_t seed, std::size_t workers) {
            Scheme s;
            if (scheme == "exact")
                s = Scheme::exact_cir();
            else if (scheme == "euler")
                s = Scheme::euler(dt);
            else
                throw InvalidArgument("scheme must be 'exact' or 'euler'");
            py::gil_scoped_release release;
            return ensemble_law(spec, initial, t, replicas, s, seed, workers).states;
        },
        py::arg("spec"), py::arg("initial"), py::arg("t"), py::arg("replicas"), py::arg("scheme") = "euler",
        py::arg("dt") = 1e-3, py::arg("seed") = 0, py::arg("workers") = 1);

    m.def("ks_distance", &ks_distance);
    m.def("wasserstein1", &wasserstein1);
    m.def("tv_binned", &tv_binned, py::arg("mu"), py::arg("nu"), py::arg("bins") = 64);
    m.def("wasserstein1_to_cdf", &wasserstein1_to_cdf, py::arg("mu"), py::arg("cdf"));

    py::class_<LabelledState>(m, "LabelledState")
        .def_static("from_configuration", &LabelledState::from_configuration)
        .def_readonly("L", &LabelledState::L)
        .def_readonly("positions", &LabelledState::positions);
    m.def("type_embedding", &type_embedding, py::arg("state"));
    m.def("labelled_generator_identity", [](const LabelledState& s, const Observable& h, double d) {
        const auto r = labelled_generator_identity(s, h, d);
        return std::make_pair(r.lhs, r.rhs);
    });
}
