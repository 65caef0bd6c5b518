#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = POLYOPT_CLI_PATH;
const fs::path kInstances = POLYOPT_INSTANCE_DIR;

struct RunResult {
  int exit_code = -1;
  std::string stdout_text;
};

RunResult run(const std::string& args) {
  const fs::path out = fs::temp_directory_path() / "polyopt_cli_stdout.txt";
  const std::string cmd = kCli + " " + args + " > " + out.string() + " 2>&1";
  const int raw = std::system(cmd.c_str());
  RunResult res;
  res.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  res.stdout_text = ss.str();
  return res;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / "polyopt_cli_test";
  fs::create_directories(dir);
  return dir;
}

// strips fields that legitimately vary between runs (wall-clock times)
nlohmann::json normalized_report(const fs::path& p) {
  auto doc = nlohmann::json::parse(slurp(p));
  doc.erase("time_seconds");
  return doc;
}

std::string strip_elapsed_column(const std::string& csv) {
  std::stringstream in(csv), out;
  std::string line;
  while (std::getline(in, line)) {
    const auto cut = line.rfind(',');
    out << line.substr(0, cut) << "\n";
  }
  return out.str();
}

}  // namespace

TEST_CASE("solve writes a report and succeeds on the trust region instance") {
  const auto dir = scratch();
  const auto report_path = dir / "trust.json";
  const auto res = run("solve " + (kInstances / "trust_region.json").string() +
                       " --tol-admm 1e-6 --tol-coord 1e-7 --max-outer 20000 --out " +
                       report_path.string());
  CHECK(res.exit_code == 0);
  const auto doc = nlohmann::json::parse(slurp(report_path));
  CHECK(doc["status"] == "flat-extension");
  CHECK(std::abs(doc["lower_bound"].get<double>() + 1.4142) <= 1e-3);
  CHECK(doc["x"].size() == 2);
}

TEST_CASE("missing and malformed inputs exit with code 2") {
  CHECK(run("solve /nonexistent/missing.json").exit_code == 2);

  const auto dir = scratch();
  const auto bad = dir / "bad.json";
  std::ofstream(bad) << "{ not json";
  CHECK(run("solve " + bad.string()).exit_code == 2);

  const auto schema = dir / "schema.json";
  std::ofstream(schema) << R"({"n": 1, "objective": []})";
  CHECK(run("solve " + schema.string()).exit_code == 2);

  CHECK(run("solve").exit_code == 2);           // missing positional
  CHECK(run("solve x.json --bogus").exit_code == 2);
  CHECK(run("frobnicate").exit_code == 2);      // unknown subcommand
}

TEST_CASE("non-convergent solves exit with code 1") {
  const auto dir = scratch();
  const auto inst = dir / "unbounded.json";
  std::ofstream(inst) << R"({"n": 1, "objective": [{"coef": -1.0, "expo": [1]}]})";
  const auto res = run("solve " + inst.string() + " --max-outer 200 --w-max 2");
  CHECK(res.exit_code == 1);
}

TEST_CASE("oracle subcommand") {
  const auto dir = scratch();
  const auto out = dir / "oracle.json";
  const auto res = run("oracle " + (kInstances / "shifted_parabola.json").string() +
                       " --resolution 601 --out " + out.string());
  CHECK(res.exit_code == 0);
  const auto doc = nlohmann::json::parse(slurp(out));
  CHECK(std::abs(doc["f_best"].get<double>() - 1.0) <= 1e-4);
  CHECK(std::abs(doc["x_best"][0].get<double>() - 1.0) <= 1e-4);
}

TEST_CASE("inspect prints the block structure without solving") {
  const auto res =
      run("inspect " + (kInstances / "trust_region.json").string() + " --level 2");
  CHECK(res.exit_code == 0);
  CHECK(res.stdout_text.find("moment") != std::string::npos);
  CHECK(res.stdout_text.find("localizing") != std::string::npos);
}

TEST_CASE("single level solves via --level") {
  const auto dir = scratch();
  const auto out = dir / "level.json";
  const auto res = run("solve " + (kInstances / "trust_region.json").string() +
                       " --level 1 --tol-admm 1e-6 --max-outer 20000 --out " +
                       out.string());
  CHECK(res.exit_code == 0);
  const auto doc = nlohmann::json::parse(slurp(out));
  CHECK(doc["status"] == "converged");
  REQUIRE(doc["levels"].size() == 1);
  CHECK(doc["levels"][0]["w"] == 1);
  CHECK(std::abs(doc["lower_bound"].get<double>() + 1.4142) <= 2e-3);
}

TEST_CASE("reports and traces are deterministic for a fixed seed") {
  const auto dir = scratch();
  const std::string flags = " --tol-admm 1e-5 --max-outer 10000 --seed 7 --trace ";
  const auto instance = (kInstances / "trust_region.json").string();

  const auto r1 = dir / "det1.json";
  const auto t1 = dir / "det1.csv";
  const auto r2 = dir / "det2.json";
  const auto t2 = dir / "det2.csv";
  CHECK(run("solve " + instance + flags + t1.string() + " --out " + r1.string())
            .exit_code == 0);
  CHECK(run("solve " + instance + flags + t2.string() + " --out " + r2.string())
            .exit_code == 0);

  CHECK(normalized_report(r1) == normalized_report(r2));
  CHECK(strip_elapsed_column(slurp(t1)) == strip_elapsed_column(slurp(t2)));
}

TEST_CASE("trace row count equals total iterations plus header") {
  const auto dir = scratch();
  const auto report_path = dir / "trace_count.json";
  const auto trace_path = dir / "trace_count.csv";
  const auto res = run("solve " + (kInstances / "shifted_parabola.json").string() +
                       " --tol-admm 1e-6 --max-outer 20000 --out " +
                       report_path.string() + " --trace " + trace_path.string());
  REQUIRE(res.exit_code == 0);

  const auto doc = nlohmann::json::parse(slurp(report_path));
  const std::string csv = slurp(trace_path);
  int lines = 0;
  for (char c : csv)
    if (c == '\n') ++lines;
  CHECK(lines == doc["iterations_total"].get<int>() + 1);
  CHECK(csv.rfind("iter,level,q,", 0) == 0);
}

TEST_CASE("strategy flag selects the full-level path") {
  const auto dir = scratch();
  const auto out = dir / "full.json";
  const auto res = run("solve " + (kInstances / "interval_linear.json").string() +
                       " --strategy full --tol-admm 1e-6 --max-outer 20000 --out " +
                       out.string());
  CHECK(res.exit_code == 0);
  const auto doc = nlohmann::json::parse(slurp(out));
  CHECK(std::abs(doc["lower_bound"].get<double>() + 1.0) <= 2e-3);
  CHECK(doc["levels"][0]["blocks_active"] == 2);
  CHECK(doc["levels"][0]["s_history"].size() <= 1);
}

TEST_CASE("help exits zero") {
  CHECK(run("--help").exit_code == 0);
  CHECK(run("solve --help").exit_code == 0);
}
