#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result run(const std::string& args) {
  const std::string cmd = std::string(DALE_CLI_PATH) + " " + args + " 2>&1";
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[512];
  while (std::fgets(buf, sizeof buf, p)) r.out += buf;
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Workdir {
  fs::path path = fs::temp_directory_path() / ("dale_cli_" + std::to_string(::getpid()));
  Workdir() {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~Workdir() { fs::remove_all(path); }
  std::string operator/(const std::string& s) const { return (path / s).string(); }
};

}  // namespace

TEST_CASE("command line: outputs and exit codes") {
  Workdir w;
  auto gen = run("gen --generator case2 -N 400 --seed 3 --out " + w / "d.csv");
  CHECK(gen.code == 0);

  SUBCASE("repeat runs give byte-identical curve files") {
    const std::string base = "effect --data " + w / "d.csv" + " --model builtin:case2 --method ale -K 8 --feature x1 --out ";
    REQUIRE(run(base + w / "a").code == 0);
    REQUIRE(run(base + w / "b").code == 0);
    CHECK(slurp(w / "a/ale_x1_K8.json") == slurp(w / "b/ale_x1_K8.json"));
    CHECK(!slurp(w / "a/ale_x1_K8.json").empty());
  }

  SUBCASE("dale with cache then rebin") {
    auto r = run("effect --data " + w / "d.csv" + " --model builtin:case2 -K 10 --save-jacobian " + w / "c.json" +
                 " --out " + w / "e");
    CHECK(r.code == 0);
    CHECK(r.out.find("gradient=400") != std::string::npos);
    r = run("rebin --cache " + w / "c.json" + " -K 5,25 --feature x3 --out " + w / "r");
    CHECK(r.code == 0);
    CHECK(fs::exists(w / "r/dale_x3_K5.json"));
    CHECK(fs::exists(w / "r/dale_x3_K25.json"));
    CHECK(r.out.find("value=0 gradient=0 second=0") != std::string::npos);
  }

  SUBCASE("usage errors exit 2") {
    CHECK(run("effect --data " + w / "d.csv" + " --model builtin:case2 --method shap --out " + w / "o").code == 2);
    CHECK(run("effect --data " + w / "d.csv").code == 2);
    CHECK(run("frobnicate").code == 2);
    CHECK(run("effect --data " + w / "d.csv" + " --model builtin:case2 -K 0 --out " + w / "o").code == 2);
    CHECK(run("--help").code == 0);
    CHECK(!fs::exists(w / "o"));
  }

  SUBCASE("parse errors exit 3 and name the line") {
    std::ofstream(w / "bad.csv") << "x1,x2,x3\n1,2,3\n4,oops,6\n";
    const auto r = run("effect --data " + w / "bad.csv" + " --model builtin:case2 --out " + w / "o");
    CHECK(r.code == 3);
    CHECK(r.out.find(":3:") != std::string::npos);
    CHECK(!fs::exists(w / "o"));
    std::ofstream(w / "c.json") << "{}";
    CHECK(run("rebin --cache " + w / "c.json" + " -K 5 --out " + w / "o").code != 0);
  }

  SUBCASE("schema errors exit 4") {
    CHECK(run("effect --data " + w / "d.csv" + " --model builtin:case2 --feature nope --out " + w / "o").code == 4);
    CHECK(run("effect --data " + w / "d.csv" + " --model builtin:toy --out " + w / "o").code == 4);
    CHECK(!fs::exists(w / "o"));
  }

  SUBCASE("numeric errors exit 5") {
    std::ofstream(w / "gap.csv") << "x1,x2,x3\n0,0,0\n0.05,0,0\n1,1,1\n";
    const auto r = run("effect --data " + w / "gap.csv" +
                       " --model builtin:case2 -K 10 --empty-bin-policy fail --out " + w / "o");
    CHECK(r.code == 5);
    CHECK(!fs::exists(w / "o"));
  }

  SUBCASE("i/o errors exit 6") {
    CHECK(run("effect --data " + w / "missing.csv" + " --model builtin:case2 --out " + w / "o").code == 6);
    CHECK(run("effect --data " + w / "d.csv" + " --model " + w / "missing.txt" + " --out " + w / "o").code == 6);
    CHECK(!fs::exists(w / "o"));
  }
}
