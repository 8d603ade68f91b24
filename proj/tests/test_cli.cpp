#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <unistd.h>

#include "cli/config.hpp"
#include "cli/runner.hpp"

using namespace stf;
using namespace stf::cli;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("stf-test-" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string read(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Runs the installed binary; returns its exit status and leaves stderr in `err`.
int run_stf(const std::string& args, std::string* err = nullptr) {
  fs::path log = fs::temp_directory_path() / ("stf-test-" + std::to_string(::getpid())) / "stderr.txt";
  fs::create_directories(log.parent_path());
  int status = std::system((std::string(STF_BINARY) + " " + args + " >/dev/null 2>" + log.string()).c_str());
  if (err) *err = read(log);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path config(const fs::path& dir, const json& doc) {
  json d = doc;
  d["schema"] = kSchema;
  fs::path p = dir / "config.json";
  write(p, d.dump());
  return p;
}

std::map<std::string, std::string> contents(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) out[e.path().filename().string()] = read(e.path());
  return out;
}

}  // namespace

TEST_CASE("config parsing") {
  json base{{"schema", kSchema}};
  CHECK_NOTHROW(parse_config(base));
  CHECK_THROWS_AS(parse_config(json{{"schema", kSchema}, {"alhpa", 1.5}}), UsageError);
  CHECK_THROWS_AS(parse_config(json{{"action", "boundary-free-2"}}), UsageError);
  CHECK_THROWS_AS(parse_config(json{{"schema", "stf.config/0"}}), UsageError);
  CHECK_THROWS_AS(parse_config(json{{"schema", kSchema}, {"alpha", 2.5}}), UsageError);

  auto g = parse_config(json{{"schema", kSchema}, {"group", {{"kind", "free"}, {"k", 3}}}});
  CHECK(*g.group == GroupSpec::free(3));
  CHECK(*parse_config(json{{"schema", kSchema}, {"group", "Z^2"}}).group == GroupSpec::lattice(2));
  CHECK_THROWS_AS(parse_config(json{{"schema", kSchema}, {"group", {{"kind", "free"}, {"rank", 3}}}}), UsageError);

  auto f = parse_config(json{{"schema", kSchema}, {"f_e", json::array({{{"region", json::array({"a", "b"})}, {"value", "1/2"}}, {{"region", "ab"}, {"value", 2}}})}});
  CHECK(f.f_e == std::vector<std::pair<std::string, std::string>>{{"a", "1/2"}, {"b", "1/2"}, {"ab", "2"}});
  auto fo = parse_config(json{{"schema", kSchema}, {"f_e", {{"a", 0.25}}}});
  CHECK(fo.f_e == std::vector<std::pair<std::string, std::string>>{{"a", "1/4"}});
  CHECK(parse_config(json{{"schema", kSchema}, {"alpha", "3/2"}}).alpha == Rational(3, 2));
}

TEST_CASE("override precedence: file, then environment, then flags") {
  auto dir = scratch("precedence");
  auto path = config(dir, {{"seed", 1}, {"workers", 2}});
  Overrides flags;
  flags.config_path = path.string();
  CHECK(*load_config(flags).seed == 1);
  ::setenv("STF_SEED", "7", 1);
  CHECK(*load_config(flags).seed == 7);
  flags.seed = 9;
  CHECK(*load_config(flags).seed == 9);
  ::unsetenv("STF_SEED");
  ::setenv("STF_WORKERS", "0", 1);
  flags.seed.reset();
  CHECK_THROWS_AS(load_config(flags), UsageError);
  ::unsetenv("STF_WORKERS");
  // Workers and output directory do not enter the config hash.
  auto a = load_config(flags);
  auto b = a;
  b.workers = 5;
  b.out = "elsewhere";
  CHECK(config_hash(a) == config_hash(b));
  b.seed = 123;
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("gross writes the exact closed form") {
  auto dir = scratch("gross");
  auto cfg = config(dir, {{"group", {{"kind", "lattice"}, {"d", 1}}}, {"action", "lattice-translation-null"}, {"n", {2, 4, 8}}});
  REQUIRE(run_stf("gross --config " + cfg.string() + " --out " + (dir / "out").string()) == 0);
  std::string csv = read(dir / "out" / "gross-lattice-translation-null.csv");
  CHECK(csv.rfind("n,value,exact_p_over_q,verdict\n", 0) == 0);
  CHECK(csv.find("2,0.2,1/5,") != std::string::npos);
  CHECK(csv.find("4,0.1111111111111111,1/9,") != std::string::npos);
  CHECK(csv.find("8,0.058823529411764705,1/17,") != std::string::npos);
  CHECK(fs::exists(dir / "out" / "gross-lattice-translation-null.svg"));
  CHECK(read(dir / "out" / "gross-lattice-translation-null.svg").find("<polyline") != std::string::npos);
  auto manifest = json::parse(read(dir / "out" / "gross-lattice-translation-null.manifest.json"));
  CHECK(manifest["schema"] == "stf.manifest/1");
  CHECK(manifest["config_hash"].get<std::string>().size() == 16);
}

TEST_CASE("exit codes") {
  auto dir = scratch("exits");
  std::string out = " --out " + (dir / "out").string();
  CHECK(run_stf("no-such-subcommand") == 1);
  write(dir / "bad.json", R"({"schema":"stf.config/1","bogus":1})");
  std::string err;
  CHECK(run_stf("gross --config " + (dir / "bad.json").string() + out, &err) == 1);
  CHECK(err.find("bogus") != std::string::npos);
  // Seeded subcommands refuse to run without a seed.
  auto walk = config(dir, {{"action", "boundary-free-2"}});
  CHECK(run_stf("walk --config " + walk.string() + out) == 1);
  // 1/3 then 1/9 is neither decay nor stall: inconclusive, exit 3 only when strict.
  auto inc = config(dir, {{"action", "lattice-translation-null"}, {"n", {1, 4}}});
  CHECK(run_stf("gross --config " + inc.string() + out) == 0);
  CHECK(run_stf("gross --strict --config " + inc.string() + out) == 3);
  ::setenv("STF_STRICT", "1", 1);
  CHECK(run_stf("gross --config " + inc.string() + out) == 3);
  ::unsetenv("STF_STRICT");
  CHECK(run_stf("audit" + out) == 0);
}

TEST_CASE("simulate is byte-identical across runs and worker counts") {
  auto dir = scratch("simulate");
  auto cfg = config(dir, {{"action", "boundary-free-2"}, {"index_set", {"e", "a", "b"}}, {"replicates", 1000}});
  for (const char* run : {"a", "b"}) REQUIRE(run_stf("simulate --seed 11 --workers 1 --config " + cfg.string() + " --out " + (dir / run).string()) == 0);
  REQUIRE(run_stf("simulate --seed 11 --workers 3 --config " + cfg.string() + " --out " + (dir / "c").string()) == 0);
  auto a = contents(dir / "a");
  CHECK(a.size() == 4);
  CHECK(a == contents(dir / "b"));
  CHECK(a == contents(dir / "c"));
  CHECK(a["simulate-boundary-free-2-samples.csv"].rfind("replicate,g,value\n", 0) == 0);
  REQUIRE(run_stf("simulate --seed 12 --config " + cfg.string() + " --out " + (dir / "d").string()) == 0);
  CHECK(a["simulate-boundary-free-2-samples.csv"] != contents(dir / "d")["simulate-boundary-free-2-samples.csv"]);
}

TEST_CASE("report") {
  auto dir = scratch("report");
  fs::create_directories(dir / "empty");
  CHECK(run_stf("report --out " + (dir / "empty").string()) == 0);
  auto empty = json::parse(read(dir / "empty" / "report.json"));
  CHECK(empty["runs"].empty());
  CHECK(run_stf("report --out " + (dir / "missing").string()) == 1);

  // Every built-in, through both averaged diagnostics and the classifier.
  fs::path all = dir / "all";
  for (const auto& name : builtin_action_names()) {
    auto cfg = config(dir, {{"action", name}});
    for (const char* sub : {"gross", "mpns"}) REQUIRE(run_stf(std::string(sub) + " --config " + cfg.string() + " --out " + all.string()) == 0);
  }
  REQUIRE(run_stf("report --out " + all.string()) == 0);
  auto rep = json::parse(read(all / "report.json"));
  CHECK(rep["schema"] == "stf.report/1");
  CHECK(rep["mismatches"] == 0);
  CHECK(rep["runs"].size() == 2 * builtin_action_names().size());
  for (const auto& name : builtin_action_names()) CHECK(rep["summary"]["gross"][name]["matches_ground_truth"] == true);

  fs::path corrupt = dir / "corrupt";
  fs::create_directories(corrupt);
  write(corrupt / "gross-x.manifest.json", "{ not json");
  std::string err;
  CHECK(run_stf("report --out " + corrupt.string(), &err) == 1);
  CHECK(err.find("gross-x.manifest.json") != std::string::npos);
}

TEST_CASE("run() maps library errors to exit codes in process") {
  auto dir = scratch("inproc");
  ExperimentConfig cfg = parse_config(json{{"schema", kSchema}, {"action", "no-such-action"}});
  cfg.out = (dir / "out").string();
  std::ostringstream log;
  CHECK(run("gross", cfg, log) == kUsage);
  CHECK(log.str().find("no-such-action") != std::string::npos);
  cfg = parse_config(json{{"schema", kSchema}, {"action", "boundary-free-2"}, {"m", {0, 1, 2}}});
  cfg.out = (dir / "out").string();
  CHECK(run("cond-suff", cfg, log) == kOk);
}
