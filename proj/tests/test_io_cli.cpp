#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <sys/wait.h>

#include "support/common.hpp"

using namespace ncmart;
using namespace testing_support;
namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  fs::path p = fs::temp_directory_path() / ("ncmart_cli_" + std::to_string(::getpid()));
  fs::create_directories(p);
  return p;
}

int run(const std::string& args) {
  std::string cmd = std::string(NCMART_CLI) + " " + args + " >/dev/null 2>&1";
  int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST(Io, InstanceRoundTrip) {
  for (auto mode : {Mode::noncommutative, Mode::dyadic}) {
    Instance a = make(17, 8, 4, mode);
    Instance b = io::instance_from_json(json::parse(io::to_json(a).dump()));
    EXPECT_EQ(io::to_json(a).dump(), io::to_json(b).dump());
    EXPECT_LE(max_abs(a.x - b.x), 0.0);
    Operator y = random_operator(a.algebra(), *std::make_unique<Rng>(3));
    EXPECT_LE(max_abs(a.F.expect(y, 2) - b.F.expect(y, 2)), 1e-15);
  }
}

TEST(Io, RejectsUnknownKeysAndBadShapes) {
  json j = io::to_json(make(1, 4, 2, Mode::dyadic));
  j["extra"] = 1;
  EXPECT_THROW(io::instance_from_json(j), std::invalid_argument);
  j.erase("extra");
  j["dim"] = 5;
  EXPECT_THROW(io::instance_from_json(j), std::invalid_argument);
}

TEST(Io, ParseSpace) {
  EXPECT_EQ(describe(io::parse_space("L1.5")), "L_1.5");
  EXPECT_EQ(describe(io::parse_space("Lorentz(2,1)")), "L_{2,1}");
  EXPECT_EQ(describe(io::parse_space("Orlicz(two_power,1,2)")), "L_Phi[two_power(1,2)]");
  EXPECT_EQ(describe(io::parse_space("Orlicz(x_log)")), "L_Phi[x_log]");
  EXPECT_THROW(io::parse_space("Lfoo"), std::invalid_argument);
  EXPECT_THROW(io::parse_space("Orlicz(cubic,3)"), std::invalid_argument);
  for (const char* s : {"L2", "Lorentz(3,inf)", "Orlicz(power,1.5)", "GenLorentz(0.4,2)"}) {
    SpaceSpec a = io::parse_space(s);
    EXPECT_EQ(describe(io::space_from_json(io::to_json(a))), describe(a)) << s;
  }
}

TEST(Io, ConfigRoundTrip) {
  SuiteConfig cfg = io::config_from_json(json::parse(slurp(NCMART_DEFAULT_CONFIG)));
  EXPECT_EQ(cfg.seeds.size(), 100u);
  SuiteConfig back = io::config_from_json(io::to_json(cfg));
  EXPECT_EQ(io::to_json(cfg).dump(), io::to_json(back).dump());
}

TEST(Io, CsvQuoting) {
  EXPECT_EQ(io::csv_field("plain"), "plain");
  EXPECT_EQ(io::csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(io::csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(io::csv_line({"a", "b,c"}), "a,\"b,c\"\r\n");
  EXPECT_EQ(io::fmt(0.1), "0.1");
  EXPECT_EQ(io::fmt(inf), "inf");
}

TEST(Io, ReportRoundTrip) {
  SuiteConfig cfg;
  cfg.seeds = {0, 1, 2};
  cfg.dims = {4, 8};
  CheckSpec c;
  c.name = "davis";
  c.space = Lp{1.0};
  cfg.checks = {c};
  cfg.threads = 1;
  Report r = run_suite(cfg);
  Report back = io::report_from_json(io::to_json(r));
  EXPECT_EQ(io::to_json(r).dump(), io::to_json(back).dump());
  EXPECT_EQ(io::report_csv(r), io::report_csv(back));
}

TEST(Cli, GenIsDeterministic) {
  fs::path d = scratch();
  ASSERT_EQ(run("gen --seed 5 --dim 8 --levels 3 --out " + (d / "a.json").string()), 0);
  ASSERT_EQ(run("gen --seed 5 --dim 8 --levels 3 --out " + (d / "b.json").string()), 0);
  ASSERT_EQ(run("gen --seed 6 --dim 8 --levels 3 --out " + (d / "c.json").string()), 0);
  EXPECT_EQ(slurp(d / "a.json"), slurp(d / "b.json"));
  EXPECT_NE(slurp(d / "a.json"), slurp(d / "c.json"));
  fs::remove_all(d);
}

TEST(Cli, DecomposeAndCheck) {
  fs::path d = scratch();
  std::string in = (d / "i.json").string();
  ASSERT_EQ(run("gen --seed 2 --dim 8 --levels 4 --mode dyadic --out " + in), 0);
  ASSERT_EQ(run("decompose --in " + in + " --t 0.7 --out " + (d / "dec.json").string()), 0);
  json dec = json::parse(slurp(d / "dec.json"));
  EXPECT_TRUE(dec["all_ok"].get<bool>());
  EXPECT_EQ(run("check --in " + in + " --name hardy --space L1 --out " + (d / "h.json").string()), 0);
  EXPECT_EQ(run("check --in " + in + " --name k_closedness --lambda-points 3 --out " + (d / "k.json").string()), 0);
  ASSERT_EQ(run("kcurve --in " + in + " --points 9 --out " + (d / "k.csv").string()), 0);
  std::string csv = slurp(d / "k.csv");
  EXPECT_EQ(csv.rfind("t,lower,upper,ratio,certificate_id\r\n", 0), 0u);
  fs::remove_all(d);
}

TEST(Cli, UsageErrorsExitTwo) {
  fs::path d = scratch();
  std::string in = (d / "i.json").string();
  ASSERT_EQ(run("gen --seed 1 --out " + in), 0);
  EXPECT_EQ(run("gen --seed 1 --bogus 3"), 2);
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("check --in " + in + " --name nonsense"), 2);
  EXPECT_EQ(run("check --in " + in + " --name hardy --space Lfoo"), 2);
  EXPECT_EQ(run("decompose --in " + (d / "missing.json").string() + " --t 1"), 2);
  EXPECT_EQ(run("gen --seed 1 --dim 6 --mode dyadic"), 2);
  fs::remove_all(d);
}

TEST(Cli, SuiteSmall) {
  fs::path d = scratch();
  json cfg = {{"seeds", {{"from", 0}, {"count", 4}}},
              {"dims", {4, 8}},
              {"checks", {{{"name", "jones_certificates"}, {"points", 5}}, {{"name", "stein"}, {"space", "L2"}}}}};
  std::ofstream(d / "cfg.json") << cfg.dump();
  EXPECT_EQ(run("suite --config " + (d / "cfg.json").string() + " --out " + (d / "r.json").string() + " --csv " +
                (d / "r.csv").string()),
            0);
  json r = json::parse(slurp(d / "r.json"));
  EXPECT_TRUE(r["pass"].get<bool>());
  EXPECT_EQ(r["instances"].get<int>(), 8);
  EXPECT_EQ(run("report --in " + (d / "r.json").string()), 0);
  fs::remove_all(d);
}
