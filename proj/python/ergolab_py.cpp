#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ergolab/acceptance.hpp"
#include "ergolab/artifact.hpp"
#include "ergolab/boweneye.hpp"
#include "ergolab/cocycle.hpp"
#include "ergolab/gluing.hpp"
#include "ergolab/measures.hpp"
#include "ergolab/shiftspace.hpp"
#include "ergolab/splicer.hpp"

namespace py = pybind11;
using json = nlohmann::json;
using namespace ergolab;

// Structured values cross the boundary as JSON text; the Python package
// wraps these with json.loads / json.dumps.
namespace {

SubshiftSpec spec_of(const std::string& text) { return SubshiftSpec::from_json(json::parse(text)); }

CylinderFunction observable_of(const std::string& text, const Alphabet& alphabet) {
  if (text == "coordinate") return CylinderFunction::coordinate(alphabet);
  return CylinderFunction::from_json(json::parse(text), alphabet);
}

std::string count_language_json(const std::string& spec, std::size_t n, bool list_words, unsigned threads) {
  const auto lc = count_language(spec_of(spec), n, list_words, threads);
  json out = {{"n", n}, {"count", lc.count}};
  if (list_words) {
    out["words"] = json::array();
    for (const auto& w : lc.words) out["words"].push_back(to_compact(w));
  }
  return out.dump();
}

std::string entropy_table_json(const std::string& spec, std::size_t n_max, unsigned threads) {
  json rows = json::array();
  for (const auto& r : entropy_table(spec_of(spec), n_max, threads)) {
    rows.push_back({{"n", r.n}, {"count", r.count}, {"ratio", r.ratio}, {"log_growth", r.log_growth}});
  }
  return rows.dump();
}

std::string verify_json(const std::string& spec, std::size_t w_max, std::size_t u_max, unsigned threads) {
  VerifyOptions opt;
  opt.w_max_length = w_max;
  opt.u_max_length = u_max;
  opt.threads = threads;
  return verify_m_transitivity(spec_of(spec), opt).to_json().dump();
}

std::optional<std::vector<std::string>> app_falsifier_py(const std::string& spec, std::size_t n, std::size_t f,
                                                         std::size_t g) {
  const auto hit = app_falsifier(spec_of(spec), n, f, g);
  if (!hit) return std::nullopt;
  return std::vector<std::string>{to_compact(hit->w_hat), to_compact(hit->connector), to_compact(hit->u_hat)};
}

double rho_periodic(const std::string& p, const std::string& q, std::size_t terms) {
  const MetricTruncation trunc(terms);
  const std::size_t depth = trunc.required_depth(Alphabet::signed_ternary());
  return rho_distance(periodic_measure(parse_compact(p), depth), periodic_measure(parse_compact(q), depth), trunc)
      .value;
}

std::string plan_json(const std::string& spec_text, double alpha, double beta, double tau, std::size_t checkpoints,
                      double growth, const std::string& p_lo, const std::string& p_hi) {
  const auto spec = spec_of(spec_text);
  const OscillationSpec osc{CylinderFunction::coordinate(spec.alphabet()), alpha, beta, tau, checkpoints, growth};
  return plan_oscillation(spec, osc, parse_compact(p_lo), parse_compact(p_hi)).to_json().dump();
}

std::vector<double> splice_averages(const std::string& spec_text, const std::string& program_text) {
  const auto spec = spec_of(spec_text);
  const auto program = SpliceProgram::from_json(json::parse(program_text));
  const Word w = build_point(spec, program);
  const auto f = CylinderFunction::coordinate(spec.alphabet());
  std::vector<double> out;
  StreamingSum sum(f);
  std::size_t done = 0;
  for (auto c : program.checkpoints) {
    sum.push(w.view().subspan(done, c - done));
    done = c;
    out.push_back(sum.average());
  }
  return out;
}

double lyapunov_py(const std::string& cocycle, const std::string& word, std::size_t n, const std::string& norm) {
  if (norm != "spectral" && norm != "frobenius") throw Error(ErrorKind::kValidation, "norm must be spectral or frobenius");
  const auto a = CocycleSpec::from_json(json::parse(cocycle), Alphabet::signed_ternary());
  return lyapunov_estimate(a, parse_compact(word), n, norm == "spectral" ? NormKind::kSpectral : NormKind::kFrobenius);
}

std::pair<double, double> bowen_weights(double lambda, double sigma, double s0, std::size_t cycles, double t) {
  const auto trace = sojourn_sequence(EyeParams::from_ratios(lambda, sigma), s0, cycles);
  const auto w = time_average_weights(trace, t);
  return {w.a, w.b};
}

std::string coverage_json(double lambda, double sigma, double s0, std::size_t cycles, std::size_t grid, double eps) {
  CoverageOptions opt;
  opt.grid = grid;
  opt.eps = eps;
  return segment_coverage_check(EyeParams::from_ratios(lambda, sigma), s0, cycles, opt).to_json().dump();
}

std::string acceptance_json(const std::vector<int>& only, unsigned threads, bool thread_check) {
  AcceptanceOptions opt;
  opt.only = only;
  opt.threads = threads;
  opt.check_thread_invariance = thread_check;
  return run_acceptance(opt).to_json().dump();
}

}  // namespace

PYBIND11_MODULE(_ergolab, m) {
  py::exception<Error>(m, "ErgolabError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    const auto raise = [](const std::string& message) {
      const py::object type = py::module_::import("ergolab._ergolab").attr("ErgolabError");
      py::set_error(type, message.c_str());
    };
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      raise(std::string(to_string(e.kind())) + ": " + e.what());
    } catch (const json::exception& e) {
      raise(std::string("validation: ") + e.what());
    }
  });

  m.attr("__version__") = tool_version();
  m.attr("SCHEMA_VERSION") = kSchemaVersion;

  m.def("count_language", &count_language_json, py::arg("spec"), py::arg("n"), py::arg("list_words") = false,
        py::arg("threads") = 1, py::call_guard<py::gil_scoped_release>());
  m.def("entropy_table", &entropy_table_json, py::arg("spec"), py::arg("n_max"), py::arg("threads") = 1,
        py::call_guard<py::gil_scoped_release>());
  m.def(
      "is_legal", [](const std::string& spec, const std::string& w) { return is_legal(spec_of(spec), parse_compact(w)); },
      py::arg("spec"), py::arg("word"));
  m.def(
      "minimal_gap",
      [](const std::string& spec, const std::string& w, const std::string& u, std::int64_t v_max) {
        return minimal_gap(spec_of(spec), parse_compact(w), parse_compact(u), v_max);
      },
      py::arg("spec"), py::arg("w"), py::arg("u"), py::arg("v_max") = 1000);
  m.def("verify_m_transitivity", &verify_json, py::arg("spec"), py::arg("w_max") = 8, py::arg("u_max") = 8,
        py::arg("threads") = 1, py::call_guard<py::gil_scoped_release>());
  m.def("app_falsifier", &app_falsifier_py, py::arg("spec"), py::arg("n"), py::arg("f_budget"), py::arg("g_budget"),
        py::call_guard<py::gil_scoped_release>());
  m.def(
      "birkhoff_average",
      [](const std::string& observable, const std::string& w, std::size_t n) {
        return birkhoff_average(observable_of(observable, Alphabet::signed_ternary()), parse_compact(w), n);
      },
      py::arg("observable"), py::arg("word"), py::arg("n"));
  m.def("rho_periodic", &rho_periodic, py::arg("p"), py::arg("q"), py::arg("terms") = 16);
  m.def("plan_oscillation", &plan_json, py::arg("spec"), py::arg("alpha"), py::arg("beta"), py::arg("tau") = 0.05,
        py::arg("checkpoints") = 4, py::arg("growth") = 10.0, py::arg("p_lo") = "m", py::arg("p_hi") = "p");
  m.def("splice_averages", &splice_averages, py::arg("spec"), py::arg("program"),
        py::call_guard<py::gil_scoped_release>());
  m.def("lyapunov_estimate", &lyapunov_py, py::arg("cocycle"), py::arg("word"), py::arg("n"),
        py::arg("norm") = "spectral");
  m.def("bowen_weights", &bowen_weights, py::arg("lam"), py::arg("sigma"), py::arg("s0"), py::arg("cycles"), py::arg("t"));
  m.def("bowen_coverage", &coverage_json, py::arg("lam"), py::arg("sigma"), py::arg("s0") = 1.0,
        py::arg("cycles") = 20, py::arg("grid") = 50, py::arg("eps") = 0.02);
  m.def("run_acceptance", &acceptance_json, py::arg("only") = std::vector<int>{}, py::arg("threads") = 1,
        py::arg("check_thread_invariance") = false, py::call_guard<py::gil_scoped_release>());
}
