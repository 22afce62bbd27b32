// Acceptance battery: one PASS/FAIL line per criterion; exit status 1 if any fails.
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "mpthermo/verify.hpp"

int main(int argc, char** argv) {
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
  bool all = true;
  double total = 0.0;
  for (const auto& r : mpt::run_battery(ids)) {
    std::printf("%s\n", mpt::format_result(r).c_str());
    std::fflush(stdout);
    all = all && r.pass;
    total += r.seconds;
  }
  std::printf("%s  total %.2fs\n", all ? "ALL PASS" : "SOME FAILED", total);
  return all ? 0 : 1;
}
