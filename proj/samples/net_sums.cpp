// Sums as limits of finite partial sums: certified real series and a
// discrete finite monoid.
#include <iostream>

#include "sigma/sigma.hpp"

int main() {
  using namespace sigma;
  for (const char* spec : {"geometric(0.5, 0.5)", "finite(1, 2, 3)", "power(2)", "alternating_harmonic"}) {
    const auto f = parse_generator(spec);
    std::cout << spec << ": " << net_verdict_json(extended_sum_real(f, 1e-9)).dump() << '\n';
  }

  const auto shuffled = reorder_within_blocks(geometric_family(0.5, 0.5), 8, 42);
  std::cout << "shuffled: " << net_verdict_json(extended_sum_real(shuffled, 1e-9)).dump() << '\n';

  const auto z4 = FiniteMonoid::cyclic(4);
  const auto syntax = monoid_syntax(z4);
  for (const char* text : {"{finite: [1, 1, 3]}", "{omega: [0]}", "{finite: [1], omega: [2]}"}) {
    const auto g = parse_family(text, syntax);
    const auto s = extended_sum_discrete(z4, g);
    std::cout << "Z/4: " << format_family(g, syntax) << " -> " << (s ? syntax.format(*s) : "undefined") << '\n';
  }
  return 0;
}
