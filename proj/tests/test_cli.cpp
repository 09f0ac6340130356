#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "commands.hpp"
#include "config.hpp"
#include "doctest.h"

namespace fs = std::filesystem;
using namespace andersonlab;
using namespace andersonlab::cli;

namespace {

struct Run {
  int rc;
  std::string out, err;
};

Run invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "andersonlab");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  int rc = run_cli(int(argv.size()), argv.data(), out, err);
  return {rc, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("andersonlab-cli-" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p.parent_path());
  return p;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("usage errors exit with 2") {
    CHECK(invoke({}).rc == kUsage);
    CHECK(invoke({"frobnicate"}).rc == kUsage);
    CHECK(invoke({"sample", "--preset", "no-such-preset"}).rc == kUsage);
    CHECK(invoke({"sample", "--M", "48"}).rc == kUsage);
    CHECK(invoke({"sample", "--eps", "abc"}).rc == kUsage);
    CHECK(invoke({"sample", "--no-such-key", "1"}).rc == kUsage);
    CHECK(invoke({"strichartz", "--preset", "spectrum-2d"}).rc == kUsage);
  }

  TEST_CASE("config files need the schema tag and known keys") {
    fs::path dir = scratch("cfg");
    fs::create_directories(dir);
    std::ofstream(dir / "bad.json") << R"({"M": 32})";
    std::ofstream(dir / "unknown.json") << R"({"schema": "andersonlab.config/1", "MM": 32})";
    std::ofstream(dir / "typed.json") << R"({"schema": "andersonlab.config/1", "M": "32"})";
    std::ofstream(dir / "good.json") << R"({"schema": "andersonlab.config/1", "M": 32, "seed": 9})";
    CHECK_THROWS_AS(resolve_config("sample", (dir / "bad.json").string(), "", {}), ConfigError);
    CHECK_THROWS_AS(resolve_config("sample", (dir / "unknown.json").string(), "", {}), ConfigError);
    CHECK_THROWS_AS(resolve_config("sample", (dir / "typed.json").string(), "", {}), ConfigError);
    json cfg = resolve_config("sample", (dir / "good.json").string(), "", {{"seed", "11"}});
    CHECK(cfg["M"] == 32);
    CHECK(cfg["seed"] == 11);
    CHECK(cfg["eps"] == 0.03125);
  }

  TEST_CASE("precedence: defaults < preset < flags") {
    json a = resolve_config("spectrum", "", "spectrum-2d", {});
    CHECK(a["M"] == 128);
    json b = resolve_config("spectrum", "", "spectrum-2d", {{"M", "64"}});
    CHECK(b["M"] == 64);
    CHECK(b["K"] == 24.0);
    json c = resolve_config("strichartz", "", "free-d2-p4", {{"N_list", "4,8"}});
    CHECK(get_int_list(c, "N_list") == std::vector<int>{4, 8});
    for (const auto& p : preset_table()) CHECK(find_preset(p.name) == &p);
  }

  TEST_CASE("sample writes artifacts and a manifest, byte-identical on rerun") {
    fs::path a = scratch("a"), b = scratch("b");
    REQUIRE(invoke({"sample", "--M", "16", "--seed", "3", "--out", a.string()}).rc == kOk);
    std::string first = slurp(a / "manifest.json");
    REQUIRE(invoke({"sample", "--M", "16", "--seed", "3", "--out", b.string()}).rc == kOk);
    REQUIRE(invoke({"sample", "--M", "16", "--seed", "3", "--out", a.string()}).rc == kOk);
    json m = json::parse(slurp(a / "manifest.json"));
    CHECK(m["schema"] == "andersonlab.manifest/1");
    CHECK(m["command"] == "sample");
    CHECK(m["config"]["M"] == 16);
    CHECK(m["config_schema"] == kSchema);
    CHECK(m["status"] == "ok");
    for (const auto& art : m["artifacts"]) {
      std::string name = art["name"];
      std::string bytes = slurp(a / name);
      CHECK(bytes.size() == art["bytes"].get<std::size_t>());
      CHECK(fnv1a_hex(bytes) == art["fnv1a"]);
      CHECK(bytes == slurp(b / name));
    }
    CHECK(slurp(a / "manifest.json") == first);
    for (const auto& entry : fs::directory_iterator(a)) CHECK(entry.path().extension() != ".tmp");
  }

  TEST_CASE("atomic writer replaces files in place") {
    fs::path dir = scratch("w");
    ArtifactWriter w(dir.string());
    w.write("x.txt", "first", "text");
    w.write("x.txt", "second", "text");
    CHECK(slurp(dir / "x.txt") == "second");
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
  }

  TEST_CASE("verify noise-zero passes and names nothing") {
    fs::path dir = scratch("v");
    Run r = invoke({"verify", "--preset", "verify-noise-zero", "--out", dir.string()});
    CHECK(r.rc == kOk);
    CHECK(r.err.empty());
    CHECK(slurp(dir / "report.txt").find("FAIL") == std::string::npos);
  }

  TEST_CASE("defaults and presets listings") {
    Run d = invoke({"defaults"});
    CHECK(d.rc == kOk);
    for (const auto& e : default_table()) CHECK(d.out.find(std::string("`") + e.key + "`") != std::string::npos);
    Run p = invoke({"presets"});
    CHECK(p.out.find("free-d2-p4") != std::string::npos);
  }
}
