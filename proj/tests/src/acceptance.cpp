#include <cstdio>
#include <exception>
#include <stdexcept>
#include <string>
#include <vector>

#include "steinpp_tools/checks.hpp"

// Runs the full acceptance suite (no arguments) or a single numbered check,
// printing one PASS/FAIL line per check. Exit code 0 when everything passed,
// 1 on a failed check, 2 on a bad selector.
int main(int argc, char** argv) {
  try {
    std::vector<steinpp::checks::CheckResult> results;
    if (argc > 1) {
      results.push_back(steinpp::checks::run_check(std::stoi(argv[1])));
    } else {
      results = steinpp::checks::run_all_checks();
    }
    bool all_pass = true;
    int index = argc > 1 ? std::stoi(argv[1]) : 1;
    for (const steinpp::checks::CheckResult& r : results) {
      std::printf("%s %2d %s: %s\n", r.pass ? "PASS" : "FAIL", index++, r.name.c_str(),
                  r.detail.c_str());
      std::fflush(stdout);
      if (!r.pass) all_pass = false;
    }
    return all_pass ? 0 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
