// Drives the built executable; exit codes and files are the contract.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const fs::path& workdir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "degennes_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = "cd '" + workdir().string() + "' && '" DEGENNES_CLI "' " + args +
                          " > last.out 2> last.err";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& name) {
  std::ifstream in(workdir() / name, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json json_file(const std::string& name) { return nlohmann::json::parse(slurp(name)); }

}  // namespace

TEST_CASE("band: default run passes, JSON schema") {
  CHECK(run("band -o band.json") == 0);
  const auto j = json_file("band.json");
  const auto& b = j["bands"][0];
  CHECK(b.contains("band_index"));
  CHECK(b.contains("samples"));
  CHECK(b.contains("minimum"));
  CHECK(j["properties"]["checks"].size() == 15);
}

TEST_CASE("band: missing minimum names NoBracket") {
  CHECK(run("band --xi-max 0.5 --format csv -o short.csv") == 2);
  CHECK(slurp("last.err").find("NoBracket") != std::string::npos);
}

TEST_CASE("band: CSV header") {
  CHECK(run("band --format csv -o band.csv") == 0);
  CHECK(slurp("band.csv").find("\nband_index,xi,mu,mu_prime,est_error\n") != std::string::npos);
}

TEST_CASE("conjecture verdicts") {
  CHECK(run("conjecture -o v.json") == 0);
  const auto v = json_file("v.json");
  CHECK(v["verdict"] == "SUPPORTED");
  CHECK(v["third_derivative"].get<double>() < 0.0);
  CHECK(run("conjecture --grid-points 64 -o coarse.json") == 0);
  CHECK(json_file("coarse.json")["verdict"] == "INCONCLUSIVE");
}

TEST_CASE("current scan CSV") {
  CHECK(run("current --scan --scan-points 10 --format csv -o scan.csv") == 0);
  const auto s = slurp("scan.csv");
  CHECK(s.find("# e_star_candidate=NONE_FOUND") != std::string::npos);
  CHECK(s.find("\ne,c\n") != std::string::npos);
}

TEST_CASE("agmon and mourre JSON") {
  CHECK(run("agmon --e 0.9 --K 1 -o agmon.json") == 0);
  const auto a = json_file("agmon.json")["report"];
  CHECK(a["per_xi"].size() == 25);
  CHECK(a.contains("sup_weighted_norm"));
  CHECK(run("mourre --alpha 0.25 -o m.json") == 0);
  const auto m = json_file("m.json");
  CHECK(m["exponents"]["final_exponent"]["value"].get<double>() == -1.25);
  CHECK(m["exponents"]["final_exponent"]["exact"] == "-5/4");
}

TEST_CASE("audit mismatch exits 2") {
  CHECK(run("audit --alpha 0.25 --h-points 5 -o audit.json") == 2);
  CHECK(json_file("audit.json")["audit"].contains("slope"));
}

TEST_CASE("exit codes for bad input and non-convergence") {
  CHECK(run("band --format xml") == 4);
  CHECK(run("band -o /nonexistent/dir/x.json") == 4);
  CHECK(run("mourre --alpha 0.2 --beta 0.3") == 4);
  CHECK(slurp("last.err").find("beta > 2·alpha") != std::string::npos);
  CHECK(run("band --grid-points 32 --target-tol 1e-16") == 3);
}

TEST_CASE("identical runs give identical bytes") {
  CHECK(run("current -o same.json") == 0);
  const auto first = slurp("same.json");
  CHECK(run("current -o same.json") == 0);
  CHECK(slurp("same.json") == first);
  CHECK(run("band --format csv --plot -o p.csv") == 0);
  const auto csv = slurp("p.csv");
  CHECK(run("band --format csv --plot -o p.csv") == 0);
  CHECK(slurp("p.csv") == csv);
}

TEST_CASE("flags override the config file, which overrides defaults") {
  std::ofstream(workdir() / "c.ini") << "grid-points=640\nseed=7\n";
  CHECK(run("conjecture --config c.ini --seed 9 -o cfg.json") == 0);
  const auto c = json_file("cfg.json")["config"];
  CHECK(c["grid-points"] == "640");
  CHECK(c["seed"] == "9");
  CHECK(c["target-tol"] == "1e-08");
}
