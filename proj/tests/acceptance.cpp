// Acceptance run: one PASS/FAIL line per criterion. Exit 0 iff all pass.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "ncmart/ncmart.hpp"
#include "support/scalar_oracle.hpp"

using namespace ncmart;

namespace {

// Tolerances pinned here.
constexpr double kCucTol = 1e-8;         // property certificates, times scale
constexpr double kOracleTol = 1e-12;     // commutative indicators vs scalar recursion
constexpr double kSumTol = 1e-10;        // x = y + z
constexpr double kTruncL1Tol = 1e-10;    // truncation_k vs ∫_0^t μ
constexpr double kBracketSlack = 1e-9;   // [1, 2] bracket edges
constexpr double kRuntimeC1 = 60.0;      // seconds
constexpr double kRuntimeC6 = 600.0;     // seconds
constexpr double kSpecQuoted = 9.996;    // value quoted next to the constant formula
constexpr std::pair<double, double> kBand{0.05, 20.0};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::vector<Instance> corpus() {
  std::vector<Instance> v;
  for (std::uint64_t seed = 0; seed < 50; ++seed)
    for (int dim : {4, 8, 16, 32}) {
      InstanceSpec s;
      s.seed = seed;
      s.dim = dim;
      s.mode = seed % 2 ? Mode::dyadic : Mode::noncommutative;
      s.levels = 2 + static_cast<int>((seed / 2) % 5);
      v.push_back(generate(s));
    }
  return v;
}

int failures = 0;

void report(int n, bool ok, const std::string& detail) {
  std::printf("criterion %d: %s  %s\n", n, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string f6(double v) {
  char b[64];
  std::snprintf(b, sizeof b, "%.6g", v);
  return b;
}

// 1. Cuculescu properties and the scalar oracle.
void criterion1(const std::vector<Instance>& C) {
  auto t0 = Clock::now();
  int runs = 0, bad = 0, oracle_bad = 0, dyadic = 0;
  double worst_oracle = 0.0;
  for (const auto& inst : C) {
    Martingale m(inst.F, inst.x);
    const auto& w = m.sc_partials();
    double top = detail::positive_norm(w.back());
    for (double frac : {0.1, 0.4, 0.8}) {
      CuculescuRun run = cuculescu(w, frac * top, inst.F);
      ++runs;
      const auto& c = run.cert;
      double tol = kCucTol * (1.0 + run.lambda_sq + top);
      if (!(c.measurability <= tol && c.commutation <= tol && c.bounded <= tol && c.stopped <= tol) ||
          !c.projections_hold())
        ++bad;
      if (inst.spec.mode == Mode::dyadic) {
        oracle::Dyadic D(inst.spec.dim, inst.spec.levels);
        auto ws = D.partial_sc(D.diffs(oracle::diagonal_of(inst)));
        auto q = D.stopping(ws, frac * top);
        for (std::size_t k = 0; k < q.size(); ++k)
          for (int i = 0; i < inst.spec.dim; ++i) {
            double d = std::abs(run.q[k].block(static_cast<std::size_t>(i))(0, 0).real() - q[k][static_cast<std::size_t>(i)]);
            worst_oracle = std::max(worst_oracle, d);
            if (d > kOracleTol) ++oracle_bad;
          }
        ++dyadic;
      }
    }
  }
  double secs = seconds_since(t0);
  bool ok = C.size() >= 200 && bad == 0 && oracle_bad == 0 && secs <= kRuntimeC1;
  report(1, ok,
         std::to_string(C.size()) + " instances, " + std::to_string(runs) + " runs, property failures " +
             std::to_string(bad) + ", oracle runs " + std::to_string(dyadic) + " max |q - q_oracle| " +
             f6(worst_oracle) + ", " + f6(secs) + " s (limit " + f6(kRuntimeC1) + ")");
}

// 2. Jones certificates at 20 t per instance.
void criterion2(const std::vector<Instance>& C) {
  int decs = 0, z = 0, y = 0, tr = 0, sum = 0;
  double worst_sum = 0.0;
  for (const auto& inst : C) {
    HardyInput in = HardyInput::of(Martingale(inst.F, inst.x));
    for (double t : default_grid(sequence_norm(in, 2.0), sequence_norm(in, inf), 20, 1e2)) {
      JonesDecomposition J = jones_decompose(in, t);
      ++decs;
      z += !J.cert.z_ok;
      y += !J.cert.y_ok;
      tr += !J.cert.trace_ok;
      double res = max_abs(J.y + J.z - in.sum());
      worst_sum = std::max(worst_sum, res);
      sum += res > kSumTol;
    }
  }
  report(2, z + y + tr + sum == 0,
         std::to_string(decs) + " decompositions; failures z " + std::to_string(z) + ", y " + std::to_string(y) +
             ", trace " + std::to_string(tr) + ", sum " + std::to_string(sum) + " (max residual " + f6(worst_sum) + ")");
}

// 3. K-closedness sandwich for the three variants.
void criterion3(const std::vector<Instance>& C) {
  const double bound = defaults::jones_constant(0.01);
  CheckOptions o;
  bool ok = true;
  std::string detail;
  double overall = 0.0;
  for (auto v : {HardyVariant::martingale, HardyVariant::conditioned, HardyVariant::adapted}) {
    double worst = 0.0;
    int fails = 0, lower_fails = 0;
    for (const auto& inst : C) {
      RatioReport r = check_k_closedness(inst, 2.0, v, o);
      const SeedRow& row = r.rows[0];
      worst = std::max(worst, row.ratio);
      if (row.note.find("lower bound") != std::string::npos) ++lower_fails;
      if (!(row.ratio <= bound * (1.0 + o.tol)) || !row.pass) ++fails;
    }
    overall = std::max(overall, worst);
    ok = ok && fails == 0 && lower_fails == 0;
    detail += std::string(to_string(v)) + " max " + f6(worst) + " (fail " + std::to_string(fails) + ", lower>cost " +
              std::to_string(lower_fails) + "); ";
  }
  detail += "constant " + f6(bound) + ", all below quoted " + f6(kSpecQuoted) + ": " +
            (overall <= kSpecQuoted ? "yes" : "no");
  report(3, ok, detail);
}

// 4. Reference functionals on 1000 random step functions.
void criterion4() {
  Rng rng(2024);
  int l1_bad = 0, l2_bad = 0;
  double worst_l1 = 0.0, lo = inf, hi = 0.0;
  for (int i = 0; i < 1000; ++i) {
    std::vector<std::pair<double, double>> pairs;
    int n = 1 + rng.below(10);
    for (int j = 0; j < n; ++j) pairs.emplace_back(std::exp(rng.uniform(-3.0, 3.0)), std::exp(rng.uniform(-3.0, 1.0)));
    StepFunction f = StepFunction::from_pairs(pairs);
    double t = std::exp(rng.uniform(-4.0, 4.0));
    double k1 = truncation_k(Lp{1.0}, f, t), ref1 = partial_integral(f, t);
    double e = std::abs(k1 - ref1) / std::max(1.0, ref1);
    worst_l1 = std::max(worst_l1, e);
    l1_bad += e > kTruncL1Tol;
    double k2 = truncation_k(Lp{2.0}, f, t), ref2 = std::sqrt(integrate_power(f, 2.0, t * t));
    double r = k2 / ref2;
    lo = std::min(lo, r), hi = std::max(hi, r);
    l2_bad += !(r >= 1.0 - kBracketSlack && r <= 2.0 + kBracketSlack);
  }
  report(4, l1_bad == 0 && l2_bad == 0,
         "L1 max rel error " + f6(worst_l1) + " (fail " + std::to_string(l1_bad) + "); L2 ratio range [" + f6(lo) + ", " +
             f6(hi) + "] (fail " + std::to_string(l2_bad) + ")");
}

SuiteConfig interp_config() {
  SuiteConfig cfg;
  for (std::uint64_t s = 0; s < 20; ++s) cfg.seeds.push_back(s);
  cfg.dims = {4, 8, 16, 32};
  cfg.threads = 1;
  auto add = [&](InterpFamily fam) {
    CheckSpec c;
    c.name = "interpolation";
    c.family = fam;
    c.band = kBand;
    cfg.checks.push_back(c);
  };
  InterpFamily power;
  add(power);
  InterpFamily orl;
  orl.kind = InterpFamilyKind::orlicz;
  orl.thetas = {1.0 / 3.0};
  add(orl);
  InterpFamily gl;
  gl.kind = InterpFamilyKind::gen_lorentz;
  add(gl);
  return cfg;
}

// 5. Interpolation brackets: fixed band and no growth across dims 4 to 32.
void criterion5() {
  auto t0 = Clock::now();
  Report rep = run_suite(interp_config());
  int band_fail = 0, growth = 0;
  std::string grown;
  double lo = inf, hi = 0.0;
  for (const auto& r : rep.reports) {
    for (const auto& row : r.rows) lo = std::min(lo, row.ratio_lo), hi = std::max(hi, row.ratio);
    if (!r.pass) ++band_fail;
    if (!r.trend_ok) {
      ++growth;
      std::string per, per_lo;
      for (auto [d, m] : r.trend.per_dim_max) {
        double mlo = 0.0;
        for (const auto& row : r.rows)
          if (row.dim == d) mlo = std::max(mlo, row.ratio_lo);
        per += (per.empty() ? "" : "/") + f6(m);
        per_lo += (per_lo.empty() ? "" : "/") + f6(mlo);
      }
      grown += "\n    growth: " + r.check + " max by dim " + per + " (lower bracket " + per_lo + ") p=" +
               f6(r.trend.p_value);
    }
  }
  report(5, band_fail == 0 && growth == 0,
         std::to_string(rep.reports.size()) + " members, " + std::to_string(rep.instances) + " instances, ratio range [" +
             f6(lo) + ", " + f6(hi) + "] in band [" + f6(kBand.first) + ", " + f6(kBand.second) + "] (fail " +
             std::to_string(band_fail) + "), growth flagged on " + std::to_string(growth) + ", " +
             f6(seconds_since(t0)) + " s" + grown);
}

bool appendix_check(const std::string& name) {
  for (const char* p : {"dual_doob[", "stein[", "lepingle_yor[", "hardy[", "davis["})
    if (name.rfind(p, 0) == 0) return true;
  return false;
}

// 6. Appendix inequalities within the full default suite.
void criterion6() {
  std::ifstream in(NCMART_DEFAULT_CONFIG);
  SuiteConfig cfg = io::config_from_json(io::json::parse(in));
  cfg.threads = 1;
  auto t0 = Clock::now();
  Report rep = run_suite(cfg);
  double secs = seconds_since(t0);
  int n = 0, fail = 0, growth = 0;
  bool exact_l1 = false;
  std::string notes;
  for (const auto& r : rep.reports) {
    if (!appendix_check(r.check)) continue;
    ++n;
    if (!r.pass) ++fail, notes += "\n    fail: " + r.check;
    if (!r.trend_ok) ++growth, notes += "\n    growth: " + r.check;
    if (r.check == "dual_doob[forward,norm,L_1]") exact_l1 = r.pass && r.rows.size() == rep.instances;
  }
  bool ok = fail == 0 && growth == 0 && exact_l1 && rep.pass && secs <= kRuntimeC6;
  report(6, ok,
         std::to_string(n) + " appendix reports over " + std::to_string(rep.instances) + " instances; fail " +
             std::to_string(fail) + ", growth " + std::to_string(growth) + ", forward L1 exact " +
             (exact_l1 ? "yes" : "no") + "; full suite rows " + (rep.pass ? "PASS" : "FAIL") + " in " + f6(secs) +
             " s (limit " + f6(kRuntimeC6) + ")" + notes);
}

// 7. Golden files reproduced.
void criterion7() {
  std::string cmd = std::string(NCMART_UNIT_TESTS) + " --gtest_filter='*Golden*' --gtest_brief=1 > /dev/null 2>&1";
  int st = std::system(cmd.c_str());
  bool ok = WIFEXITED(st) && WEXITSTATUS(st) == 0;
  report(7, ok, "golden tests (" + std::string(NCMART_GOLDEN_DIR) + ") " + (ok ? "reproduced" : "mismatch"));
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  auto want = [&](int n) { return only.empty() || std::find(only.begin(), only.end(), n) != only.end(); };
  std::vector<Instance> C;
  if (want(1) || want(2) || want(3)) C = corpus();
  if (want(1)) criterion1(C);
  if (want(2)) criterion2(C);
  if (want(3)) criterion3(C);
  if (want(4)) criterion4();
  if (want(5)) criterion5();
  if (want(6)) criterion6();
  if (want(7)) criterion7();
  std::printf("acceptance: %s (%d failing)\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
