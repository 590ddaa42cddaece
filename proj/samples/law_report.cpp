// Runs the weak and strong suites and prints the JSON report.
#include <iostream>

#include "sigma/sigma.hpp"

int main() {
  using namespace sigma;
  Budget budget;
  budget.max_finite_size = 4;
  budget.seed = 7;

  const auto extnat = ext_nat_instance();
  const auto report = check_strong(extnat, budget);
  for (const auto& line : report_lines(report, ext_nat_syntax())) std::cout << line.dump() << '\n';

  const auto pm = pm_instance();
  const auto pm_report = check_strong(pm, budget);
  for (const auto& r : pm_report.laws) {
    if (r.verdict != Verdict::fail) continue;
    std::cout << r.law << " fails on " << format_family(r.witness->family, pm_syntax())
              << (replay(pm, r.law, *r.witness) ? " (replayed)" : " (did not replay)") << '\n';
  }
  std::cout << "pm satisfies:";
  for (auto f : pm_report.satisfied) std::cout << ' ' << to_string(f);
  std::cout << '\n';
  return 0;
}
