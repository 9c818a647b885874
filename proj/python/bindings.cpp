#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "hcent/analysis.hpp"
#include "hcent/cli_io.hpp"
#include "hcent/errors.hpp"
#include "hcent/experiments.hpp"
#include "hcent/measures.hpp"
#include "hcent/oracle.hpp"
#include "hcent/spectral.hpp"

namespace py = pybind11;
using namespace hcent;

namespace {

py::array_t<double> to_array(std::span<const double> v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

analysis::Rows rows_from(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DomainError("x and y differ in length");
  analysis::Rows rows;
  for (std::size_t i = 0; i < x.size(); ++i) rows.push_back({x[i], y[i]});
  return rows;
}

py::dict fit_dict(const analysis::FitResult& f) {
  py::dict coeffs;
  for (const auto& [k, v] : f.coefficients) coeffs[py::str(k)] = v;
  py::dict d;
  d["model"] = analysis::to_string(f.model);
  d["coefficients"] = coeffs;
  d["residual_rms"] = f.residual_rms;
  d["window"] = py::make_tuple(f.window.lo, f.window.hi);
  d["n_points"] = f.n_points;
  d["converged"] = f.converged;
  return d;
}

ReducedGaussianState state_from(const Eigen::MatrixXd& g, const Eigen::MatrixXd& h,
                                const std::vector<std::size_t>& transpose_sites) {
  auto st = ReducedGaussianState::from_blocks(g, h);
  if (!transpose_sites.empty()) st = partial_transpose(st, transpose_sites);
  return st;
}

}  // namespace

PYBIND11_MODULE(_hcent, m) {
  m.doc() = "Entanglement between two blocks of a periodic harmonic chain vacuum";
  m.attr("__version__") = library_version();

  auto value_error = py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ResourceError>(m, "ResourceError", PyExc_MemoryError);
  py::register_exception<NotPositiveDefinite>(m, "NotPositiveDefinite", PyExc_ArithmeticError);
  py::register_exception<InvalidSpectrum>(m, "InvalidSpectrum", PyExc_ArithmeticError);
  py::register_exception<FitError>(m, "FitError", PyExc_RuntimeError);
  (void)value_error;

  m.def("xi", &xi, py::arg("coupling"), "Correlation length for a coupling.");
  m.def("coupling_for_xi", &coupling_for_xi, py::arg("xi"));

  py::class_<ChainSpec>(m, "ChainSpec")
      .def_static("from_coupling", &ChainSpec::from_coupling, py::arg("n_sites"), py::arg("coupling"))
      .def_static("from_xi", &ChainSpec::from_xi, py::arg("n_sites"), py::arg("xi"))
      .def_property_readonly("n_sites", &ChainSpec::n_sites)
      .def_property_readonly("coupling", &ChainSpec::coupling)
      .def_property_readonly("gap", &ChainSpec::gap)
      .def_property_readonly("xi", &ChainSpec::xi)
      .def_property_readonly("mass", &ChainSpec::mass)
      .def("__eq__", [](const ChainSpec& a, const ChainSpec& b) { return a == b; })
      .def("__repr__", [](const ChainSpec& s) {
        std::ostringstream os;
        os.precision(17);
        os << "ChainSpec(n_sites=" << s.n_sites() << ", coupling=" << s.coupling() << ")";
        return os.str();
      });
  m.def("critical_preset", &critical_preset, py::arg("n_sites") = kDeskSites);
  m.def("dispersion", &dispersion, py::arg("k"), py::arg("spec"));

  py::class_<CorrelationKernel>(m, "CorrelationKernel")
      .def_property_readonly("spec", &CorrelationKernel::spec)
      .def_property_readonly("n_sites", &CorrelationKernel::n_sites)
      .def_property_readonly("g", [](const CorrelationKernel& k) { return to_array(k.g()); })
      .def_property_readonly("h", [](const CorrelationKernel& k) { return to_array(k.h()); });
  m.def("build_kernel",
        [](const ChainSpec& spec, std::size_t max_sites) {
          py::gil_scoped_release release;
          return build_kernel(spec, {max_sites});
        },
        py::arg("spec"), py::arg("max_sites") = KernelOptions{}.max_sites);

  py::class_<BlockPair>(m, "BlockPair")
      .def(py::init(&BlockPair::make), py::arg("n_sites"), py::arg("block_len"), py::arg("separation"),
           py::arg("offset") = 0)
      .def_property_readonly("n_sites", &BlockPair::n_sites)
      .def_property_readonly("block_len", &BlockPair::block_len)
      .def_property_readonly("separation", &BlockPair::separation)
      .def_property_readonly("offset_a", &BlockPair::offset_a)
      .def_property_readonly("offset_b", &BlockPair::offset_b)
      .def_property_readonly("r", &BlockPair::r)
      .def("sites_a", &BlockPair::sites_a)
      .def("sites_b", &BlockPair::sites_b);

  py::class_<MeasureRecord>(m, "MeasureRecord")
      .def_readonly("entropy_a", &MeasureRecord::entropy_a)
      .def_readonly("entropy_b", &MeasureRecord::entropy_b)
      .def_readonly("entropy_ab", &MeasureRecord::entropy_ab)
      .def_readonly("mutual_information", &MeasureRecord::mutual_information)
      .def_readonly("log_negativity", &MeasureRecord::log_negativity)
      .def_readonly("spec", &MeasureRecord::spec)
      .def_readonly("pair", &MeasureRecord::pair)
      .def("as_dict", [](const MeasureRecord& r) {
        return py::dict(py::arg("S_A") = r.entropy_a, py::arg("S_B") = r.entropy_b, py::arg("S_AB") = r.entropy_ab,
                        py::arg("I_nats") = r.mutual_information, py::arg("E_LN_bits") = r.log_negativity);
      });

  m.def("measure_pair",
        [](const CorrelationKernel& k, const BlockPair& p) {
          py::gil_scoped_release release;
          return measure_pair(k, p);
        },
        py::arg("kernel"), py::arg("pair"));
  m.def("measure",
        [](std::size_t n_sites, double coupling, std::size_t block_len, std::size_t separation, std::size_t offset) {
          py::gil_scoped_release release;
          const auto pair = BlockPair::make(n_sites, block_len, separation, offset);
          return measure_pair(build_kernel(ChainSpec::from_coupling(n_sites, coupling)), pair);
        },
        py::arg("n_sites"), py::arg("coupling"), py::arg("block_len"), py::arg("separation"), py::arg("offset") = 0,
        "All measures for one block pair, building the kernel on the fly.");
  m.def("log_negativity",
        [](const CorrelationKernel& k, const BlockPair& p) {
          py::gil_scoped_release release;
          return log_negativity(k, p);
        },
        py::arg("kernel"), py::arg("pair"), "E_LN in bits.");
  m.def("mutual_information",
        [](const CorrelationKernel& k, const BlockPair& p) {
          py::gil_scoped_release release;
          return mutual_information(k, p);
        },
        py::arg("kernel"), py::arg("pair"), "I in nats.");

  m.def("symplectic_spectrum",
        [](const Eigen::MatrixXd& g, const Eigen::MatrixXd& h, const std::vector<std::size_t>& transpose_sites) {
          const auto st = state_from(g, h, transpose_sites);
          py::gil_scoped_release release;
          return symplectic_spectrum(st).values;
        },
        py::arg("g"), py::arg("h"), py::arg("transpose_sites") = std::vector<std::size_t>{},
        "Symplectic eigenvalues of explicit position/momentum blocks, optionally time-reversing some sites.");
  m.def("entropy",
        [](const std::vector<double>& nu) { return entropy({nu, SpectrumSource::plain}); }, py::arg("spectrum"),
        "Von Neumann entropy (nats) of a symplectic spectrum.");
  m.def("renyi_half_entropy",
        [](const std::vector<double>& nu) { return renyi_half_entropy({nu, SpectrumSource::plain}); },
        py::arg("spectrum"));
  m.def("log_negativity",
        [](const std::vector<double>& nu) { return log_negativity({nu, SpectrumSource::partial_transpose}); },
        py::arg("transposed_spectrum"), "E_LN (bits) of a partially transposed spectrum.");

  m.def("fit",
        [](const std::string& model, const std::vector<double>& x, const std::vector<double>& y, double lo, double hi,
           double alpha, double beta_c) {
          const auto rows = rows_from(x, y);
          const analysis::Window w{lo, hi};
          switch (analysis::model_from_string(model)) {
            case analysis::Model::linear: return fit_dict(analysis::fit_linear(rows, w));
            case analysis::Model::exp_linear: return fit_dict(analysis::fit_exponential(rows, w));
            case analysis::Model::power_law: return fit_dict(analysis::fit_power(rows, w));
            case analysis::Model::exp_quadratic: return fit_dict(analysis::fit_quadratic_exponent(rows, w));
            case analysis::Model::overall_model: {
              analysis::OverallModelOptions o;
              o.alpha = alpha;
              o.beta_c = beta_c;
              return fit_dict(analysis::fit_overall_model(rows, w, o));
            }
          }
          throw ConfigError("model", "unknown model");
        },
        py::arg("model"), py::arg("x"), py::arg("y"), py::arg("lo") = -std::numeric_limits<double>::infinity(),
        py::arg("hi") = std::numeric_limits<double>::infinity(), py::arg("alpha") = 1.0 / 3.0,
        py::arg("beta_c") = 2.8284271247461903,
        "Fit one of linear, exp_linear, power_law, exp_quadratic, overall_model on the window [lo, hi].");
  m.def("loglog_slope",
        [](const std::vector<double>& x, const std::vector<double>& y) {
          std::vector<std::pair<double, double>> out;
          for (const auto& p : analysis::loglog_slope(rows_from(x, y))) out.emplace_back(p.x, p.slope);
          return out;
        },
        py::arg("x"), py::arg("y"));
  m.def("detect_saturation",
        [](const std::vector<double>& x, const std::vector<double>& y) {
          const auto s = analysis::detect_saturation(rows_from(x, y));
          return py::dict(py::arg("onset") = s.onset, py::arg("plateau") = s.plateau);
        },
        py::arg("x"), py::arg("y"));

  m.def("run_sweep",
        [](const std::string& config_json, std::size_t threads) {
          const auto config = io::parse_sweep_config(io::json::parse(config_json));
          std::ostringstream os;
          {
            py::gil_scoped_release release;
            RunOptions o;
            o.threads = threads;
            io::write_csv(os, run_sweep(config, o));
          }
          return os.str();
        },
        py::arg("config_json"), py::arg("threads") = 0, "Run a sweep config (JSON text); returns the CSV text.");

  m.def("self_check",
        [](std::vector<std::size_t> sizes, std::size_t max_block_len) {
          oracle::SelfCheckOptions o;
          if (!sizes.empty()) o.sizes = std::move(sizes);
          o.max_block_len = max_block_len;
          oracle::SelfCheckSummary s;
          {
            py::gil_scoped_release release;
            s = oracle::run_self_check(o);
          }
          return py::dict(py::arg("passed") = s.passed, py::arg("instances") = s.instances,
                          py::arg("kernel") = s.kernel.max_abs_diff, py::arg("spectrum") = s.spectrum.max_abs_diff,
                          py::arg("two_mode") = s.two_mode.max_abs_diff);
        },
        py::arg("sizes") = std::vector<std::size_t>{}, py::arg("max_block_len") = 8);
}
