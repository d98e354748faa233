// Runs every acceptance criterion on the default seeds and prints one
// pass/fail line per criterion; exits nonzero if any fails.

#include <cstdint>
#include <cstdio>
#include <cstdlib>

#include "sgp/acceptance.hpp"

int main(int argc, char** argv) {
  std::uint64_t seed = sgp::kAcceptanceSeed;
  if (argc > 1) seed = std::strtoull(argv[1], nullptr, 10);

  const sgp::AcceptanceReport report = sgp::run_acceptance_suite(seed);
  for (const auto& c : report.criteria) {
    std::printf("%s criterion %d: %s (%s)\n", c.passed ? "PASS" : "FAIL", c.id, c.name.c_str(),
                c.detail.c_str());
  }
  if (!report.all_passed()) {
    std::printf("acceptance suite FAILED (seed %llu)\n", static_cast<unsigned long long>(seed));
    return 1;
  }
  std::printf("acceptance suite passed (seed %llu)\n", static_cast<unsigned long long>(seed));
  return 0;
}
