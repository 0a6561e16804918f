#include "endolab/experiment.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace endolab;

namespace {

Vec toVec(const std::vector<double>& v) {
  Vec x(static_cast<int>(v.size()));
  for (int i = 0; i < x.size(); ++i) x[i] = v[static_cast<size_t>(i)];
  return x;
}

std::vector<double> fromVec(const Vec& x) {
  return {x.data(), x.data() + x.size()};
}

IntMatrix toMatrix(const std::vector<std::vector<long long>>& rows) {
  return IntMatrix::fromRows(rows);
}

}  // namespace

PYBIND11_MODULE(_endolab, m) {
  m.doc() = "toral endomorphism laboratory: linear algebra of the "
            "linearization, perturbed models, Lyapunov spectra, periodic "
            "orbits, conjugacy and specialness diagnostics";

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<Error>(m, "EndolabError");

  m.def("eigen_moduli", [](const std::vector<std::vector<long long>>& rows) {
    return spectral_splitting(toMatrix(rows)).moduli;
  }, "eigenvalue moduli of an integer matrix, ascending");

  m.def("periodic_count", [](const std::vector<std::vector<long long>>& rows, int n) {
    return count_linear_periodic(toMatrix(rows), n);
  }, "number of n-periodic points of the induced toral map");

  m.def("preimage_offsets", [](const std::vector<std::vector<long long>>& rows) {
    std::vector<std::vector<long long>> out;
    for (const auto& o : preimage_offsets(toMatrix(rows)))
      out.push_back({o.data(), o.data() + o.size()});
    return out;
  }, "coset representatives of Z^d / M Z^d");

  m.def("irreducible_model", [](int bound) {
    IntMatrix found = search_irreducible_model(bound);
    std::vector<std::vector<long long>> rows;
    for (int i = 0; i < found.dim; ++i) {
      std::vector<long long> row;
      for (int j = 0; j < found.dim; ++j) row.push_back(found.at(i, j));
      rows.push_back(row);
    }
    return rows;
  }, "first companion-cubic model with the 1 < wu < su spectrum shape");

  py::class_<EndomorphismModel>(m, "Model")
      .def_static("from_config",
                  [](const std::string& json_text) {
                    auto doc = nlohmann::json::parse(json_text);
                    if (!doc.contains("seed")) doc["seed"] = 0;
                    return build_model(parse_config(doc));
                  },
                  "build from the JSON model block used by the CLI")
      .def_static("linear",
                  [](const std::vector<std::vector<long long>>& rows) {
                    return EndomorphismModel::linear(toMatrix(rows));
                  })
      .def("dim", &EndomorphismModel::dim)
      .def("degree", &EndomorphismModel::degree)
      .def("conservative", &EndomorphismModel::conservative)
      .def("apply", [](const EndomorphismModel& f, const std::vector<double>& x) {
        return fromVec(f.apply(toVec(x)));
      })
      .def("log_jacobian", [](const EndomorphismModel& f, const std::vector<double>& x) {
        return f.logJacobian(toVec(x));
      })
      .def("preimages", [](const EndomorphismModel& f, const std::vector<double>& y) {
        std::vector<std::vector<double>> out;
        for (const auto& p : f.preimages(toVec(y))) out.push_back(fromVec(p));
        return out;
      })
      .def("c1_distance_estimate", &EndomorphismModel::c1DistanceEstimate)
      .def("c1_budget", &EndomorphismModel::c1Budget);

  m.def("qr_spectrum",
        [](const EndomorphismModel& f, const std::vector<double>& x0, long n,
           long burn_in) {
          LyapunovReport r = qr_spectrum(f, toVec(x0), n, burn_in);
          py::dict d;
          d["exponents"] = r.exponents;
          d["stderrs"] = r.stderrs;
          d["avg_log_jac"] = r.avg_log_jac;
          return d;
        },
        py::arg("model"), py::arg("x0"), py::arg("n"), py::arg("burn_in") = 1000);

  m.def("ensemble_spectrum",
        [](const EndomorphismModel& f, int orbits, long steps, std::uint64_t seed,
           int workers) {
          EnsembleReport r = ensemble_spectrum(f, orbits, steps, seed, workers);
          py::dict d;
          d["mean_exponents"] = r.mean_exponents;
          d["stderrs"] = r.stderrs;
          d["unstable_sum"] = r.mean_unstable_pair_sum;
          d["unstable_sum_stderr"] = r.unstable_pair_sum_stderr;
          d["avg_log_jac"] = r.mean_avg_log_jac;
          return d;
        },
        py::arg("model"), py::arg("orbits"), py::arg("steps"), py::arg("seed"),
        py::arg("workers") = 1);

  m.def("periodic_orbits", [](const EndomorphismModel& f, int n) {
    std::vector<py::dict> out;
    for (const auto& rec : continue_all_periodic(f, n).records) {
      py::dict d;
      d["period"] = rec.period;
      d["point"] = fromVec(rec.point);
      d["jacobian"] = rec.jacobian;
      d["moduli"] = rec.moduli;
      d["residual"] = rec.residual;
      out.push_back(std::move(d));
    }
    return out;
  });

  m.def("specialness_scan",
        [](const EndomorphismModel& f, int points, int chain_len, int chains,
           std::uint64_t seed) {
          SpecialnessDiagnostic diag =
              specialness_scan(f, points, chain_len, chains, seed);
          py::dict d;
          d["per_point_variance"] = diag.per_point_variance;
          d["max_variance"] = diag.max_variance;
          return d;
        },
        py::arg("model"), py::arg("points") = 20, py::arg("chain_len") = 60,
        py::arg("chains") = 12, py::arg("seed") = 1);

  m.def("conjugacy_residual",
        [](const EndomorphismModel& f, int grid, std::uint64_t seed) {
          ConjugacyField field = solve_unstable_component(f, grid);
          if (f.conservative() ||
              f.perturbation().kind == PerturbationKind::ManufacturedConjugacy)
            attach_stable(f, field);
          return conjugacy_residual(field, f, 1000, seed);
        },
        py::arg("model"), py::arg("grid") = 32, py::arg("seed") = 1);

  m.def("run_scenario",
        [](const std::string& name, const std::string& config_json) {
          ExperimentConfig cfg = parse_config(nlohmann::json::parse(config_json));
          ScenarioResult res = run_scenario(name, cfg);
          return py::make_tuple(res.status, res.lines);
        },
        "run a named CLI scenario from a JSON config string");
}
