#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cvqe/error.hpp"
#include "cvqe/experiment.hpp"
#include "cvqe/info_metrics.hpp"
#include "cvqe/oracle.hpp"
#include "cvqe/serialization.hpp"
#include "cvqe/subspace.hpp"
#include "cvqe/trotter.hpp"

namespace py = pybind11;
using namespace cvqe;

namespace {

template <typename T>
py::array_t<T> to_array(const std::vector<T>& v) {
    py::array_t<T> out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

RunConfig config_from_settings(const std::map<std::string, std::string>& settings) {
    RunConfig c;
    for (const auto& [key, value] : settings) apply_setting(c, key, value);
    return c;
}

py::dict census_dict(const StateCensus& c) {
    py::dict d;
    d["threshold"] = c.threshold;
    d["n_psi"] = c.n_psi;
    d["spin_bins"] = c.spin_bins;
    return d;
}

py::dict row_dict(const CensusRow& r) {
    py::dict d;
    d["coupling"] = r.delta_j;
    d["n_q"] = r.n_q;
    d["n_realizations"] = r.n_realizations;
    d["mean_n_psi"] = r.mean_n_psi;
    d["stderr_n_psi"] = r.stderr_n_psi;
    d["mean_proxy_size"] = r.mean_proxy_size;
    d["spin_bins"] = r.spin_bins;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Guided-sampling subspace solver for the transverse-field Ising model";
    m.attr("__version__") = kVersion;

    PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> validation_error;
    validation_error.call_once_and_store_result([&]() {
        return py::object(py::exception<ValidationError>(m, "ValidationError", PyExc_ValueError));
    });
    py::register_exception<RuntimeError>(m, "SolverError", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ValidationError& e) {
            py::object cls = validation_error.get_stored();
            py::object inst = cls(e.what());
            inst.attr("code") = e.code();
            PyErr_SetObject(cls.ptr(), inst.ptr());
        }
    });

    py::class_<Lattice>(m, "Lattice")
        .def_static("heavy_hex", &Lattice::heavy_hex, py::arg("n_x"), py::arg("n_y"))
        .def_static("square", &Lattice::square, py::arg("l_x"), py::arg("l_y"))
        .def_static("from_edges", &Lattice::from_edge_list, py::arg("n_sites"), py::arg("edges"))
        .def_property_readonly("n_sites", &Lattice::n_sites)
        .def_property_readonly("n_edges", &Lattice::n_edges)
        .def_property_readonly("kind", [](const Lattice& l) { return to_string(l.kind()); })
        .def_property_readonly("edges",
                               [](const Lattice& l) {
                                   std::vector<std::pair<int, int>> out;
                                   for (const auto& e : l.edges()) out.emplace_back(e.first, e.second);
                                   return out;
                               })
        .def_property_readonly("positions",
                               [](const Lattice& l) {
                                   std::vector<std::pair<int, int>> out;
                                   for (const auto& p : l.positions()) out.emplace_back(p.x, p.y);
                                   return out;
                               })
        .def("degrees", &Lattice::degrees)
        .def("to_json", [](const Lattice& l) { return lattice_to_json(l, true).dump(); })
        .def("__repr__", [](const Lattice& l) {
            return "<Lattice " + to_string(l.kind()) + " sites=" + std::to_string(l.n_sites()) +
                   " edges=" + std::to_string(l.n_edges()) + ">";
        });

    py::class_<IsingModel>(m, "IsingModel")
        .def(py::init<Lattice, double, std::vector<double>>(), py::arg("lattice"),
             py::arg("field_b"), py::arg("couplings"))
        .def_static("homogeneous", &IsingModel::homogeneous, py::arg("lattice"), py::arg("j0"),
                    py::arg("field_b") = 1.0)
        .def_static("random_uniform", &IsingModel::random_uniform, py::arg("lattice"),
                    py::arg("delta_j"), py::arg("seed"), py::arg("field_b") = 1.0)
        .def_property_readonly("lattice", &IsingModel::lattice)
        .def_property_readonly("n_sites", &IsingModel::n_sites)
        .def_property_readonly("field_b", &IsingModel::field_b)
        .def_property_readonly("couplings", &IsingModel::couplings)
        .def("diagonal_energy", py::overload_cast<Bits>(&IsingModel::diagonal_energy, py::const_),
             py::arg("bits"));

    py::class_<StateVector>(m, "StateVector")
        .def_property_readonly("n_qubits", &StateVector::n_qubits)
        .def("probabilities", [](const StateVector& s) { return to_array(s.probabilities()); })
        .def("amplitudes", [](const StateVector& s) { return to_array(s.amplitudes()); })
        .def("norm_squared", &StateVector::norm_squared);

    m.def(
        "evolve",
        [](const IsingModel& model, double dt, int n_steps) {
            return evolve(model, RampSchedule(dt, n_steps));
        },
        py::arg("model"), py::arg("dt") = RampSchedule::kDefaultStep,
        py::arg("n_steps") = RampSchedule::kDefaultSteps);

    py::class_<SampleSet>(m, "SampleSet")
        .def_static(
            "from_counts",
            [](int n_qubits, const std::map<Bits, std::int64_t>& counts) {
                std::vector<std::pair<Bits, std::int64_t>> c(counts.begin(), counts.end());
                return SampleSet::from_counts(n_qubits, c, SampleSource::External);
            },
            py::arg("n_qubits"), py::arg("counts"))
        .def_property_readonly("n_qubits", &SampleSet::n_qubits)
        .def_property_readonly("n_shots", &SampleSet::n_shots)
        .def_property_readonly("n_distinct", &SampleSet::n_distinct)
        .def_property_readonly("odd_parity_fraction", &SampleSet::odd_parity_fraction)
        .def_property_readonly("external",
                               [](const SampleSet& s) { return s.source() == SampleSource::External; })
        .def("counts", [](const SampleSet& s) {
            std::map<Bits, std::int64_t> out;
            for (const auto& e : s.entries()) out[e.config.bits] = e.count;
            return out;
        });

    m.def("sample", &sample, py::arg("state"), py::arg("n_shots"), py::arg("seed"));
    m.def(
        "parse_counts",
        [](const std::string& text, int n_qubits, const std::string& endianness) {
            return parse_counts(text, n_qubits, endianness_from_string(endianness));
        },
        py::arg("json_text"), py::arg("n_qubits"), py::arg("endianness") = "big");

    py::class_<Subspace>(m, "Subspace")
        .def_property_readonly("basis", [](const Subspace& s) { return to_array(s.basis); })
        .def_property_readonly("lambda_", [](const Subspace& s) { return s.lambda; })
        .def("__len__", &Subspace::size)
        .def("__contains__", &Subspace::contains);

    m.def(
        "expand",
        [](const SampleSet& samples, const IsingModel& model, int lambda) {
            return expand(samples, model, lambda);
        },
        py::arg("samples"), py::arg("model"), py::arg("lam") = 1);
    m.def(
        "expand_states",
        [](const std::vector<Bits>& seeds, const IsingModel& model, int lambda) {
            return expand(seeds, model, lambda);
        },
        py::arg("states"), py::arg("model"), py::arg("lam") = 1);

    py::class_<ProjectedHamiltonian>(m, "ProjectedHamiltonian")
        .def_property_readonly("dimension", &ProjectedHamiltonian::dimension)
        .def("dense", [](const ProjectedHamiltonian& h) {
            const auto d = static_cast<py::ssize_t>(h.dimension());
            auto flat = h.dense();
            py::array_t<double> out({d, d});
            std::copy(flat.begin(), flat.end(), out.mutable_data());
            return out;
        });
    m.def("project", &project, py::arg("model"), py::arg("subspace"));

    py::class_<SubspaceSolution>(m, "SubspaceSolution")
        .def_readonly("energy", &SubspaceSolution::energy)
        .def_readonly("second_energy", &SubspaceSolution::second_energy)
        .def_readonly("residual", &SubspaceSolution::residual)
        .def_readonly("converged", &SubspaceSolution::converged)
        .def_readonly("degenerate", &SubspaceSolution::degenerate)
        .def_property_readonly("amplitudes",
                               [](const SubspaceSolution& s) { return to_array(s.amplitudes); })
        .def_property_readonly("probabilities",
                               [](const SubspaceSolution& s) { return to_array(s.probabilities); });
    m.def(
        "ground_state",
        [](const ProjectedHamiltonian& h, double tolerance) {
            SolverOptions o;
            o.tolerance = tolerance;
            return ground_state(h, o);
        },
        py::arg("hamiltonian"), py::arg("tolerance") = 1e-10);
    m.def("average_spin", &average_spin, py::arg("solution"), py::arg("subspace"));
    m.def(
        "census",
        [](const SubspaceSolution& s, const Subspace& b) {
            return census_dict(significant_state_census(s, b));
        },
        py::arg("solution"), py::arg("subspace"));
    m.def(
        "info_report",
        [](const SampleSet& samples, const SubspaceSolution& solution, const IsingModel& model) {
            return info_to_json(info_report(samples, solution, model)).dump();
        },
        py::arg("samples"), py::arg("solution"), py::arg("model"));

    m.def(
        "exact_diagonalize",
        [](const IsingModel& model, int n_levels) {
            const auto s = exact_diagonalize(model, n_levels);
            py::dict d;
            d["energies"] = s.energies;
            d["gap"] = s.gap;
            d["converged"] = s.converged;
            d["ground_vector"] = to_array(s.ground_vector);
            return d;
        },
        py::arg("model"), py::arg("n_levels") = 1);
    m.def(
        "ensemble_census",
        [](const Lattice& lattice, const std::vector<double>& grid, int realizations,
           std::uint64_t seed, int workers) {
            EnsembleOptions o;
            o.workers = workers;
            py::list out;
            for (const auto& r : ensemble_census(lattice, grid, realizations, seed, o)) {
                out.append(row_dict(r));
            }
            return out;
        },
        py::arg("lattice"), py::arg("delta_j"), py::arg("realizations"), py::arg("seed"),
        py::arg("workers") = 1);

    m.def("config_keys", &config_keys);
    m.def(
        "run_json",
        [](const std::map<std::string, std::string>& settings) {
            return record_to_json(run_gsa(config_from_settings(settings))).dump();
        },
        py::arg("settings"), py::call_guard<py::gil_scoped_release>());
    m.def(
        "sweep_json",
        [](const std::map<std::string, std::string>& settings) {
            std::vector<std::string> lines;
            for (const auto& r : sweep(config_from_settings(settings)).records) {
                lines.push_back(record_to_line(r));
            }
            return lines;
        },
        py::arg("settings"), py::call_guard<py::gil_scoped_release>());
}
