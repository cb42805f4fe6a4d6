#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "hjm/cli.hpp"

namespace {

struct Globals {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::string format = "text";
};

hjm::JobConfig job_config(const Globals& g) {
  if (g.config.empty()) throw hjm::ConfigError("--config is required");
  auto cfg = hjm::load_config(g.config);
  if (g.seed) cfg.seed = *g.seed;
  if (g.tol) cfg.tolerances.hj = *g.tol;
  return cfg;
}

void write_file(const std::filesystem::path& p, const std::string& body) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw hjm::ConfigError("cannot write '" + p.string() + "'");
  os << body;
}

int emit(const Globals& g, const hjm::CommandResult& r) {
  std::string body = g.format == "json" ? r.report.dump(2) + "\n" : hjm::report_text(r.report);
  if (!g.out.empty()) {
    std::filesystem::create_directories(g.out);
    std::filesystem::path dir(g.out);
    write_file(dir / (g.format == "json" ? "report.json" : "report.txt"), body);
    if (!r.csv.empty()) write_file(dir / "trajectory.csv", r.csv);
    std::cout << body;
  } else if (!r.csv.empty()) {
    std::cout << r.csv;
    std::cerr << body;
  } else {
    std::cout << body;
  }
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hamilton-Jacobi toolkit for higher-order Lagrangians"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "job configuration (JSON)");
  app.add_option("--out", g.out, "directory for report and CSV files");
  app.add_option("--seed", g.seed, "sampling seed");
  app.add_option("--tol", g.tol, "residual tolerance");
  app.add_option("--format", g.format, "report format")->check(CLI::IsMember({"text", "json"}));

  auto* derive = app.add_subcommand("derive", "energy, momenta, Euler-Lagrange and implicit system");
  auto* simulate = app.add_subcommand("simulate", "integrate the implicit system");
  auto* hjcheck = app.add_subcommand("hj-check", "residuals of the Hamilton-Jacobi system for W or gamma");
  auto* affine = app.add_subcommand("hj-solve-affine", "solve the affine-in-acceleration problem");
  auto* corpus = app.add_subcommand("corpus", "built-in examples");
  corpus->require_subcommand(1);
  auto* run = corpus->add_subcommand("run", "run every entry and compare against expectations");
  auto* list = corpus->add_subcommand("list", "list entries");
  std::optional<std::string> filter;
  run->add_option("--filter", filter, "substring of entry ids");
  list->add_option("--filter", filter, "substring of entry ids");

  for (auto* sub : {derive, simulate, hjcheck, affine, run, list}) sub->fallthrough();
  corpus->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(hjm::ExitCode::usage);
  }

  try {
    if (*derive) return emit(g, hjm::cmd_derive(job_config(g)));
    if (*simulate) return emit(g, hjm::cmd_simulate(job_config(g)));
    if (*hjcheck) return emit(g, hjm::cmd_hjcheck(job_config(g)));
    if (*affine) return emit(g, hjm::cmd_solve_affine(job_config(g)));
    if (*list) return emit(g, hjm::cmd_corpus_list(filter.value_or("")));
    if (*run) return emit(g, hjm::cmd_corpus_run(filter, g.seed));
  } catch (const hjm::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return static_cast<int>(hjm::ExitCode::numeric);
  }
  return static_cast<int>(hjm::ExitCode::usage);
}
