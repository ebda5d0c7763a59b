#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "crowdmarket/cli.hpp"
#include "crowdmarket/io.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "crowdmarket");
  std::ostringstream out, err;
  Run r;
  r.code = crowdmarket::cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string fixture(const std::string& name) {
  return std::string(CROWDMARKET_FIXTURE_DIR) + "/" + name;
}

std::string scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "crowdmarket_cli_tests";
  fs::create_directories(dir);
  return (dir / name).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

bool contains(const std::string& text, const std::string& needle) {
  return text.find(needle) != std::string::npos;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("check") {
  const Run r = cli({"check", "--input", fixture("n2_no_ties.json")});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "Assumption 1: PASS (min margin 1.000)\n"));
  CHECK(contains(r.out, "Assumption 2: FAIL"));
  CHECK(contains(r.out, "Positive definite: PASS (min eigenvalue 2.000000)"));

  const Run tied = cli({"check", "-i", fixture("n2.json"), "--set", "graph.0.1=0.6",
                        "--set", "graph.1.0=0.6"});
  CHECK(tied.code == 0);
  CHECK(contains(tied.out, "min margin 0.700"));
}

TEST_CASE("solve") {
  const std::string out = scratch("solve.json");
  const Run r = cli({"solve", "--input", fixture("n2.json"), "--reward", fixture("reward_n2.json"),
                     "--epsilon", "1e-12", "--max-iter", "500", "--output", out});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "best-response: converged"));
  CHECK(contains(r.out, "closed-form: interior"));
  CHECK(contains(r.out, "x = [1.000000, 1.000000]"));
  CHECK(contains(r.out, "cross-validation: ||x_closed - x_br||_inf = "));
  const auto doc = crowdmarket::io::load_json_file(out);
  CHECK(doc["cross_validation"].get<double>() <= 1e-8);

  const Run bad = cli({"solve", "-i", fixture("n2.json"), "-r", fixture("reward_n3.json")});
  CHECK(bad.code == 3);
  CHECK(contains(bad.err, "length 3"));
  CHECK(contains(bad.err, "2 users"));
}

TEST_CASE("optimize") {
  const Run uni = cli({"optimize", "--input", fixture("n1.json"), "--regime", "uniform"});
  CHECK(uni.code == 0);
  CHECK(contains(uni.out, "r* = 0.666667, Π = 2.083333"));

  const std::string out = scratch("disc.json");
  const Run disc =
      cli({"optimize", "-i", fixture("n2.json"), "--regime", "disc", "--output", out});
  CHECK(disc.code == 0);
  CHECK(contains(disc.out, "r* = [0.500000, 0.500000], Π = 5.000000"));
  CHECK(crowdmarket::io::load_json_file(out)["regime"] == "discriminatory");

  const Run bound = cli({"optimize", "-i", fixture("n2.json"), "--regime", "bound", "--set",
                         "params.c=7"});
  CHECK(bound.code == 0);
  CHECK(contains(bound.out, "regime: uniform-bound"));

  const Run violated = cli({"optimize", "-i", fixture("n2.json"), "--regime", "bound"});
  CHECK(violated.code == 4);

  const Run unknown = cli({"optimize", "-i", fixture("n2.json"), "--regime", "auction"});
  CHECK(unknown.code == 2);
}

TEST_CASE("error categories") {
  const Run malformed = cli({"check", "-i", fixture("malformed.json")});
  CHECK(malformed.code == 2);
  CHECK(contains(malformed.err, "malformed.json:3:"));

  const Run missing = cli({"check", "-i", fixture("missing_key.json")});
  CHECK(missing.code == 2);
  CHECK(contains(missing.err, "profiles[0].b"));

  CHECK(cli({"check", "-i", fixture("asymmetric.json")}).code == 3);
  CHECK(cli({"optimize", "-i", fixture("singular.json")}).code == 4);
  CHECK(cli({"check", "-i", fixture("does_not_exist.json")}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
  CHECK(cli({}).code == 2);
  CHECK(cli({"solve", "-i", fixture("n2.json")}).code == 2);
  CHECK(cli({"check", "--help"}).code == 0);
}

TEST_CASE("sweeps write CSV") {
  const std::string out = scratch("sweep_n.csv");
  const Run r = cli({"sweep-n", "--values", "4,6", "--replicates", "2", "--seed", "3",
                     "--output", out});
  CHECK(r.code == 0);
  const std::string csv = slurp(out);
  CHECK(csv.rfind("experiment_id,seed,sweep_name,", 0) == 0);
  CHECK(contains(csv, "sweep-n,3,n,4,discriminatory,"));
  CHECK(contains(csv, "sweep-n,4,n,6,uniform-bound,"));
  CHECK(contains(r.out, "mean_revenue"));

  const Run stdout_run = cli({"sweep-n", "--values", "4,6", "--replicates", "2", "--seed", "3"});
  CHECK(stdout_run.out == csv);

  const Run social = cli({"sweep-social", "--values", "0.05,0.1", "--replicates", "1", "--set",
                          "n=5", "--evaluation", "realized"});
  CHECK(social.code == 0);
  CHECK(contains(social.out, "sweep-social,1,mu_g,0.05,"));

  const Run scenario_file =
      cli({"sweep-n", "-i", fixture("scenario_small.json"), "--values", "3", "--replicates", "1"});
  CHECK(contains(scenario_file.out, "sweep-n,7,n,3,"));

  CHECK(cli({"sweep-n", "--values", "4,x"}).code == 2);
  CHECK(cli({"sweep-n", "--values", "4", "--evaluation", "both"}).code == 2);
}

TEST_CASE("case study") {
  const std::string out = scratch("case.csv");
  const Run r = cli({"case-study", "--output", out});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "uniform participation argmax: index "));
  const std::string csv = slurp(out);
  CHECK(csv.rfind("index,uniform_r,uniform_x,disc_r,disc_x,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 52);

  const Run small = cli({"case-study", "--set", "n=5", "--set", "a=17"});
  CHECK(small.code == 0);
  CHECK(std::count(small.out.begin(), small.out.end(), '\n') == 6);
  CHECK(cli({"case-study", "--set", "n=1"}).code == 2);
}

TEST_CASE("scenario dump and its alias") {
  const Run a = cli({"scenario-dump", "--seed", "4", "--set", "n=3"});
  const Run b = cli({"scenario", "dump", "--seed", "4", "--set", "n=3"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  const auto doc = crowdmarket::io::parse_json(a.out, "dump");
  CHECK(doc["profiles"].size() == 3);
  const auto inst = crowdmarket::io::instance_from_json(doc);
  CHECK(inst.size() == 3);

  const std::string out = scratch("dump.json");
  CHECK(cli({"scenario-dump", "-i", fixture("scenario_small.json"), "-o", out}).code == 0);
  CHECK(crowdmarket::io::load_json_file(out)["scenario"]["seed"] == 7);
}

TEST_CASE("oracle") {
  const Run uni = cli({"oracle", "-i", fixture("n1.json"), "--regime", "uniform"});
  CHECK(uni.code == 0);
  CHECK(contains(uni.out, "agreement: PASS"));

  const Run disc = cli({"oracle", "-i", fixture("n2.json"), "--regime", "disc", "--steps", "101"});
  CHECK(disc.code == 0);
  CHECK(contains(disc.out, "agreement: PASS"));

  CHECK(cli({"oracle", "-i", fixture("n2.json"), "--regime", "bound"}).code == 3);
}

TEST_CASE("identical invocations give identical output") {
  const std::vector<std::string> args{"optimize", "-i", fixture("n2.json"), "--regime", "uniform"};
  CHECK(cli(args).out == cli(args).out);
  const std::vector<std::string> sweep{"sweep-social", "--replicates", "2", "--set", "n=6"};
  CHECK(cli(sweep).out == cli(sweep).out);
}

}  // TEST_SUITE
