#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hjm/cli.hpp"
#include "hjm/ostro.hpp"

namespace py = pybind11;

namespace {

hjm::JobConfig config_from(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw hjm::ConfigError(e.what());
  }
  return hjm::JobConfig::from_json(j);
}

hjm::Binding binding_from(const std::map<std::string, double>& values) {
  hjm::Binding b;
  for (const auto& [k, v] : values) b[hjm::symbol_named(k)] = v;
  return b;
}

py::tuple result(const hjm::CommandResult& r) { return py::make_tuple(r.report.dump(), r.csv, r.exit_code); }

}  // namespace

PYBIND11_MODULE(_hjmech, m) {
  m.doc() = "Hamilton-Jacobi toolkit for higher-order Lagrangians (native core)";

  static py::exception<hjm::Error> error(m, "HjmError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const hjm::Error& e) {
      py::object inst = py::reinterpret_borrow<py::object>(error)(e.what());
      inst.attr("exit_code") = static_cast<int>(e.code());
      PyErr_SetObject(error.ptr(), inst.ptr());
    }
  });

  m.def("simplify", [](const std::string& e) { return hjm::render(hjm::simplify(hjm::parse(e))); });
  m.def("diff", [](const std::string& e, const std::string& s) {
    return hjm::render(hjm::diff(hjm::parse(e), hjm::symbol_named(s)));
  });
  m.def("evaluate", [](const std::string& e, const std::map<std::string, double>& at) {
    return hjm::eval(hjm::parse(e), binding_from(at));
  });
  m.def("equal_numeric",
        [](const std::string& a, const std::string& b, int trials, double tol) {
          return hjm::equal_numeric(hjm::parse(a), hjm::parse(b), trials, tol);
        },
        py::arg("a"), py::arg("b"), py::arg("trials") = 50, py::arg("tol") = 1e-10);
  m.def("euler_lagrange", [](int n, int k, const std::string& L) {
    std::vector<std::string> out;
    for (const auto& e : hjm::euler_lagrange(hjm::LagrangianSpec::make(n, k, hjm::parse(L))))
      out.push_back(hjm::render(hjm::simplify(e)));
    return out;
  });

  m.def("_derive", [](const std::string& c) { return result(hjm::cmd_derive(config_from(c))); });
  m.def("_simulate", [](const std::string& c) { return result(hjm::cmd_simulate(config_from(c))); });
  m.def("_hj_check", [](const std::string& c) { return result(hjm::cmd_hjcheck(config_from(c))); });
  m.def("_solve_affine", [](const std::string& c) { return result(hjm::cmd_solve_affine(config_from(c))); });
  m.def("_corpus_list", [](const std::string& filter) { return result(hjm::cmd_corpus_list(filter)); });
  m.def("_corpus_run", [](std::optional<std::string> filter, std::optional<std::uint64_t> seed) {
    return result(hjm::cmd_corpus_run(filter, seed));
  });
}
