// Runs the full acceptance suite and prints one line per criterion.
#include <cstdio>
#include <cstdlib>
#include <string>

#include "fwdrel/acceptance.hpp"

int main(int argc, char** argv) {
  fwdrel::AcceptanceOptions o;
  if (argc > 1) o.paths = std::strtoull(argv[1], nullptr, 10);
  const fwdrel::AcceptanceResult r = fwdrel::run_acceptance(o);
  for (const auto& v : r.verdicts) {
    std::printf("%s criterion %d (%s): %s\n", v.passed ? "PASS" : "FAIL", v.id, v.name.c_str(),
                v.detail.c_str());
  }
  for (const auto& n : r.notes) std::printf("note: %s\n", n.c_str());
  return r.all_passed() ? 0 : 1;
}
