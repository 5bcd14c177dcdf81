// ncmart command-line tool: gen | kcurve | decompose | check | suite | report.
// Exit codes: 0 pass, 1 failed asserted check, 2 usage or input error.

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ncmart/ncmart.hpp"

namespace {

using namespace ncmart;
using io::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError("'" + path + "': " + e.what());
  }
}

void write_out(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << text;
}

std::string utc_now() {
  std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

void add_check_options(CLI::App* cmd, CheckOptions& o) {
  cmd->add_option("--epsilon", o.eps, "ε in the Jones λ")->capture_default_str();
  cmd->add_option("--lambda-points", o.lambda_points, "λ-grid size per t")->capture_default_str();
  cmd->add_option("--grid-points", o.grid_points, "t-grid size")->capture_default_str();
  cmd->add_option("--span", o.span, "t-grid covers [t*/span, t*·span]")->capture_default_str();
  cmd->add_option("--tol", o.tol, "relative tolerance on asserted constants")->capture_default_str();
  cmd->add_option("--scale", o.scale, "multiply x and derived sequences")->capture_default_str();
}

int run(int argc, char** argv) {
  CLI::App app{"Noncommutative martingale Hardy-space toolkit"};
  app.require_subcommand(1);

  // gen
  InstanceSpec gspec;
  std::string gmode = "noncommutative", gout;
  auto* gen = app.add_subcommand("gen", "Generate a seeded instance as JSON");
  gen->add_option("--seed", gspec.seed, "seed")->required();
  gen->add_option("--dim", gspec.dim, "total matrix dimension")->capture_default_str();
  gen->add_option("--levels", gspec.levels, "filtration length N")->capture_default_str();
  gen->add_option("--mode", gmode, "noncommutative | dyadic")->capture_default_str();
  gen->add_option("--out", gout, "output file (default stdout)");

  // kcurve
  std::string kin, kout, kvariant = "martingale";
  double kp = 2.0, tmin = 0.0, tmax = 0.0;
  int kpoints = defaults::kcurve_points;
  KCurveOptions kopt;
  auto* kc = app.add_subcommand("kcurve", "Certified K-curve of x in (h_p, h_∞) as CSV");
  kc->add_option("--in", kin, "instance JSON")->required();
  kc->add_option("--p", kp, "A_0 = h_p")->capture_default_str();
  kc->add_option("--tmin", tmin, "smallest t (default: automatic)");
  kc->add_option("--tmax", tmax, "largest t (default: automatic)");
  kc->add_option("--points", kpoints, "number of t values")->capture_default_str();
  kc->add_option("--lambda-points", kopt.lambda_points, "λ-grid size per t")->capture_default_str();
  kc->add_option("--epsilon", kopt.eps, "ε in the Jones λ")->capture_default_str();
  kc->add_option("--variant", kvariant, "martingale | conditioned | adapted")->capture_default_str();
  kc->add_option("--out", kout, "output file (default stdout)");

  // decompose
  std::string din, dout, dvariant = "martingale";
  double dt = 1.0, deps = defaults::epsilon;
  auto* dec = app.add_subcommand("decompose", "Jones decomposition at one t with certificates");
  dec->add_option("--in", din, "instance JSON")->required();
  dec->add_option("--t", dt, "K-functional parameter")->required();
  dec->add_option("--epsilon", deps, "ε in the Jones λ")->capture_default_str();
  dec->add_option("--variant", dvariant, "martingale | conditioned | adapted")->capture_default_str();
  dec->add_option("--out", dout, "output file (default stdout)");

  // check
  std::string cin_, cout_, cspace, cfamily;
  CheckSpec cspec;
  CheckOptions copt;
  std::string cvariant = "martingale", cdirection = "forward", cflavor = "norm";
  auto* chk = app.add_subcommand("check", "Run one check on one instance");
  chk->add_option("--in", cin_, "instance JSON")->required();
  chk->add_option("--name", cspec.name,
                  "k_closedness | jones_certificates | interpolation | dual_doob | stein | lepingle_yor | hardy | davis")
      ->required();
  chk->add_option("--space", cspace, "space, e.g. L1, L1.5, Orlicz(two_power,1,2), Lorentz(2,1)");
  chk->add_option("--p", cspec.p, "exponent for k_closedness")->capture_default_str();
  chk->add_option("--variant", cvariant, "martingale | conditioned | adapted")->capture_default_str();
  chk->add_option("--direction", cdirection, "forward | reverse (dual_doob)")->capture_default_str();
  chk->add_option("--flavor", cflavor, "norm | phi_moment")->capture_default_str();
  chk->add_option("--family", cfamily, "interpolation family: power | orlicz | gen_lorentz | bmo_power");
  chk->add_option("--points", cspec.points, "t values for jones_certificates")->capture_default_str();
  chk->add_option("--out", cout_, "output file (default stdout)");
  add_check_options(chk, copt);

  // suite
  std::string sconfig, sout, scsv;
  int sthreads = 0;
  auto* suite = app.add_subcommand("suite", "Run a configured suite; exit 0 iff every check passes");
  suite->add_option("--config", sconfig, "suite config JSON")->required();
  suite->add_option("--out", sout, "report JSON (default stdout)");
  suite->add_option("--csv", scsv, "also write one CSV row per seed×check");
  suite->add_option("--threads", sthreads, "worker threads (default NCMART_THREADS or hardware)");

  // report
  std::string rin;
  auto* rep = app.add_subcommand("report", "Summarize a report JSON as a table");
  rep->add_option("--in", rin, "report JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (*gen) {
    gspec.mode = parse_mode(gmode);
    write_out(gout, io::to_json(generate(gspec)).dump(1) + "\n");
    return 0;
  }

  if (*kc) {
    Instance inst = io::instance_from_json(read_json(kin));
    HardyInput in = hardy_input(inst, parse_hardy_variant(kvariant), CheckOptions{});
    std::vector<double> grid;
    if (tmin > 0.0 || tmax > 0.0) {
      if (!(tmin > 0.0) || !(tmax >= tmin)) throw UsageError("kcurve: need 0 < tmin ≤ tmax");
      grid = log_grid(tmin, tmax, kpoints);
    } else {
      grid = default_grid(sequence_norm(in, kp), sequence_norm(in, inf), kpoints);
    }
    write_out(kout, io::kcurve_csv(k_curve(in, kp, grid, kopt)));
    return 0;
  }

  if (*dec) {
    Instance inst = io::instance_from_json(read_json(din));
    HardyInput in = hardy_input(inst, parse_hardy_variant(dvariant), CheckOptions{});
    JonesDecomposition J = jones_decompose(in, dt, deps);
    write_out(dout, io::to_json(J).dump(1) + "\n");
    return J.cert.all() ? 0 : 1;
  }

  if (*chk) {
    Instance inst = io::instance_from_json(read_json(cin_));
    cspec.variant = parse_hardy_variant(cvariant);
    cspec.direction = parse_doob_direction(cdirection);
    cspec.flavor = parse_flavor(cflavor);
    if (!cspace.empty()) cspec.space = io::parse_space(cspace);
    if (!cfamily.empty()) cspec.family.kind = parse_interp_family(cfamily);
    auto reports = run_check(inst, cspec, copt);
    json out = json::array();
    bool pass = true;
    for (auto& r : reports) {
      finalize(r);
      pass = pass && r.pass;
      out.push_back(io::to_json(r));
    }
    write_out(cout_, out.dump(1) + "\n");
    return pass ? 0 : 1;
  }

  if (*suite) {
    SuiteConfig cfg = io::config_from_json(read_json(sconfig));
    if (sthreads > 0) cfg.threads = sthreads;
    auto t0 = std::chrono::steady_clock::now();
    std::string started = utc_now();
    Report report = run_suite(cfg);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json j = io::to_json(report);
    j["header"] = {{"started", started}, {"seconds", secs}};
    write_out(sout, j.dump(1) + "\n");
    if (!scsv.empty()) write_out(scsv, io::report_csv(report));
    std::cerr << io::summary_table(report);
    return report.pass ? 0 : 1;
  }

  if (*rep) {
    json j = read_json(rin);
    Report report = io::report_from_json(j);
    if (j.contains("header")) std::cout << "report: " << j["header"].dump() << "\n";
    std::cout << io::summary_table(report);
    return report.pass ? 0 : 1;
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
