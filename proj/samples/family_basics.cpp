// Families, literals and a few sums in the shipped instances.
#include <iostream>

#include "sigma/sigma.hpp"

int main() {
  using namespace sigma;
  const auto pm = pm_instance();
  const auto syntax = pm_syntax();

  const auto f = parse_family("{finite: [+, +, -], omega: [0]}", syntax);
  std::cout << format_family(f, syntax) << " has " << f.finite_size() << " finite and " << f.omega_size() << " omega entries" << '\n';

  for (const char* text : {"{finite: [+, +, -]}", "{finite: [+, +]}", "{omega: [+, -]}"}) {
    const auto g = parse_family(text, syntax);
    const auto s = pm.sum(g);
    std::cout << "pm: " << format_family(g, syntax) << " -> " << (s ? syntax.format(*s) : "undefined") << '\n';
  }

  const auto parity = powerset_parity_instance({"a", "b"});
  const auto ps = parity_syntax();
  const auto g = parse_family("{finite: [[a], [a,b]]}", ps);
  std::cout << "parity: " << format_family(g, ps) << " -> " << ps.format(*parity.sum(g)) << '\n';

  // Every partition of {+, +, -} into at most four blocks.
  const auto parts = enumerate_partitions(f.without(Pm::zero), PartitionShape::unconstrained);
  std::cout << parts.partitions.size() << " partitions of {+, +, -}\n";
  return 0;
}
