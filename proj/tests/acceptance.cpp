// Acceptance experiments, one pass/fail line per criterion.
//   acceptance                 runs all twelve
//   acceptance --criterion 4   runs one

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "verify.hpp"

namespace fs = std::filesystem;
using andersonlab::cli::json;

namespace {

struct Criterion {
  int id;
  const char* title;
  const char* profile;  // verify profile, empty for the determinism check
};

const std::vector<Criterion> kCriteria = {
    {1, "paraproduct reconstruction", "reconstruction"},
    {2, "Bernstein exactness on single modes", "bernstein"},
    {3, "renormalization constants", "renormalization"},
    {4, "enhanced-noise Cauchy property", "noise-cauchy"},
    {5, "Gamma machinery in 2d", "gamma"},
    {6, "norm equivalences", "norm-equivalence"},
    {7, "perturbation scalings of H#", "perturbation"},
    {8, "unitarity and conservation", "conservation"},
    {9, "Duhamel identity", "duhamel"},
    {10, "Strichartz slopes", "strichartz"},
    {11, "NLS splitting, Picard, LWP and GWP", "nls"},
    {12, "determinism of the verify suite", ""},
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool determinism(std::string& detail) {
  fs::path base = fs::temp_directory_path() / ("andersonlab-determinism-" + std::to_string(::getpid()));
  std::vector<std::string> reports;
  bool ok = true;
  for (int run = 0; run < 2; ++run) {
    fs::path out = base / ("run" + std::to_string(run));
    std::string cmd = std::string("\"") + ANDERSONLAB_CLI_PATH + "\" verify --preset verify-full --out \"" +
                      out.string() + "\" > \"" + (base / "log.txt").string() + "\" 2>&1";
    fs::create_directories(base);
    int rc = std::system(cmd.c_str());
    if (rc != 0) {
      detail += "run " + std::to_string(run) + " exited with status " + std::to_string(rc) + "; ";
      ok = false;
    }
    reports.push_back(slurp(out / "report.txt") + slurp(out / "report.json"));
    std::cout << slurp(out / "report.txt");
  }
  bool same = !reports[0].empty() && reports[0] == reports[1];
  detail += same ? "reports byte-identical" : "reports differ";
  std::error_code ec;
  fs::remove_all(base, ec);
  return ok && same;
}

bool run(const Criterion& c) {
  auto t0 = std::chrono::steady_clock::now();
  bool pass = false;
  std::string detail;
  try {
    if (c.profile[0] == '\0') {
      pass = determinism(detail);
    } else {
      auto rep = andersonlab::cli::run_verify(c.profile, json::object());
      std::cout << rep.text();
      pass = rep.pass();
      for (const auto& f : rep.failures()) detail += (detail.empty() ? "failed: " : ", ") + f;
    }
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("criterion %02d %-40s %s  (%.1f s)%s%s\n", c.id, c.title, pass ? "PASS" : "FAIL", secs,
              detail.empty() ? "" : "  ", detail.c_str());
  std::fflush(stdout);
  return pass;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a == "--criterion" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::cerr << "usage: acceptance [--criterion n]\n";
      return 2;
    }
  }
  if (only < 0 || only > int(kCriteria.size())) {
    std::cerr << "criterion must be 1.." << kCriteria.size() << "\n";
    return 2;
  }
  bool all = true;
  for (const auto& c : kCriteria)
    if (only == 0 || c.id == only) all = run(c) && all;
  return all ? 0 : 1;
}
