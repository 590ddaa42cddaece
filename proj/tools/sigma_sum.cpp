// Command-line front end: law suites, single sums and net sums.
//
// Exit codes: 0 pass, 1 law failure, 2 usage or input error.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sigma/sigma.hpp"

namespace {

using namespace sigma;

constexpr int kPass = 0;
constexpr int kLawFailure = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CheckOutcome {
  std::vector<nlohmann::ordered_json> lines;
  bool failed = false;
};

/// An instance with its element type erased.
struct Erased {
  std::string name;
  std::function<CheckOutcome(const std::vector<std::string>&, const Budget&)> check;
  std::function<std::pair<std::string, nlohmann::ordered_json>(const std::string&)> sum;
};

template <class E>
Erased erase(SigmaInstance<E> X, ElementSyntax<E> syntax) {
  Erased out;
  out.name = X.name();
  out.check = [X, syntax](const std::vector<std::string>& law_names, const Budget& budget) {
    const auto report = check_laws(X, law_names, budget);
    return CheckOutcome{report_lines(report, syntax), report.any_failure()};
  };
  out.sum = [X, syntax](const std::string& literal) {
    const auto family = parse_family(literal, syntax);
    const auto result = X.sum_unchecked(family);
    nlohmann::ordered_json line;
    line["instance"] = X.name();
    line["family"] = format_family(family, syntax);
    line["verdict"] = result ? "defined" : "undefined";
    if (result) line["value"] = syntax.format(*result);
    return std::pair{result ? "defined " + syntax.format(*result) : std::string("undefined"), line};
  };
  return out;
}

std::uint32_t parse_order(const std::string& text) {
  std::uint64_t n = 0;
  try {
    n = detail::parse_u64(text);
  } catch (const ParseError&) {
    throw UsageError("zmod needs a positive order, got '" + text + "'");
  }
  if (n == 0 || n > 4096) throw UsageError("zmod order must be between 1 and 4096");
  return static_cast<std::uint32_t>(n);
}

Erased select_instance(const std::string& selector) {
  const auto colon = selector.find(':');
  const std::string head = selector.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : selector.substr(colon + 1);
  auto no_arg = [&] {
    if (colon != std::string::npos) throw UsageError("instance '" + head + "' takes no argument");
  };
  if (head == "pm") return no_arg(), erase(pm_instance(), pm_syntax());
  if (head == "real") return no_arg(), erase(real_abs_instance(), real_syntax());
  if (head == "real-interval") return no_arg(), erase(interval_instance().instance, real_syntax());
  if (head == "int") return no_arg(), erase(int_group_instance(), real_syntax());
  if (head == "extnat") return no_arg(), erase(ext_nat_instance(), ext_nat_syntax());
  if (head == "unit") return no_arg(), erase(unit_instance(), unit_syntax());
  if (head == "parity") {
    std::vector<std::string> points;
    std::stringstream in(arg);
    for (std::string p; std::getline(in, p, ',');) {
      if (p.empty()) throw UsageError("empty point name in '" + selector + "'");
      points.push_back(p);
    }
    if (points.empty()) throw UsageError("parity needs points, e.g. parity:a,b");
    return erase(powerset_parity_instance(points), parity_syntax());
  }
  if (head == "zmod") {
    const auto n = parse_order(arg);
    return erase(cyclic_instance(n), residue_syntax(n));
  }
  if (head == "file") {
    if (arg.empty()) throw UsageError("file needs a path, e.g. file:table.json");
    auto t = read_table_file(arg);
    return erase(std::move(t.instance), std::move(t.syntax));
  }
  throw UsageError("unknown instance '" + selector + "'");
}

const std::vector<std::string>& known_laws() {
  static const std::vector<std::string> v = [] {
    std::vector<std::string> all;
    for (const auto* group : {&laws::weak(), &laws::strong(), &laws::finitely_total(), &laws::group()}) {
      all.insert(all.end(), group->begin(), group->end());
    }
    all.push_back("padding");
    return all;
  }();
  return v;
}

/// Flavor names expand to their laws; law names stand for themselves.
std::vector<std::string> expand_laws(const std::string& spec) {
  std::vector<std::string> out;
  auto push = [&](const std::string& law) {
    if (std::find(out.begin(), out.end(), law) == out.end()) out.push_back(law);
  };
  std::stringstream in(spec);
  for (std::string item; std::getline(in, item, ',');) {
    if (auto flavor = parse_flavor(item)) {
      for (const auto& law : laws::for_flavor(*flavor)) push(law);
    } else if (std::find(known_laws().begin(), known_laws().end(), item) != known_laws().end()) {
      push(item);
    } else {
      throw UsageError("unknown law or flavor '" + item + "'");
    }
  }
  if (out.empty()) throw UsageError("no laws requested");
  return out;
}

std::uint64_t parse_seed(const std::string& text, const std::string& source) {
  try {
    return detail::parse_u64(text);
  } catch (const ParseError&) {
    throw UsageError(source + " must be a 64-bit unsigned integer, got '" + text + "'");
  }
}

/// An explicit --seed wins; otherwise SIGMA_SUM_SEED replaces the default.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("SIGMA_SUM_SEED"); env && *env) return parse_seed(env, "SIGMA_SUM_SEED");
  return 0;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open '" + path + "'");
  std::stringstream text;
  text << in.rdbuf();
  return text.str();
}

std::string format_double(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::string describe(const NetVerdict& v) {
  if (const auto* c = std::get_if<Converged>(&v)) {
    return "converged " + format_double(c->value, 12) + " ±" + format_double(c->error_bound, 3);
  }
  if (const auto* d = std::get_if<Diverged>(&v)) {
    return std::string("diverged: ") + (d->witness.sign > 0 ? "positive" : "negative") + " terms among the first " +
           std::to_string(d->witness.prefix) + " sum to " + format_double(d->witness.sum, 8) +
           ", against 0 for the empty subfamily (" + d->reason + ", threshold " + format_double(d->threshold, 6) +
           ")";
  }
  return "inconclusive after " + std::to_string(std::get<Inconclusive>(v).terms) + " terms";
}

struct Options {
  std::string instance;
  std::string laws = "weak";
  std::size_t max_size = Budget{}.max_finite_size;
  std::size_t omega = Budget{}.max_omega_elems;
  std::size_t max_blocks = PartitionCaps{}.max_blocks;
  std::size_t max_block_size = PartitionCaps{}.max_block_size;
  std::size_t omega_splits = PartitionCaps{}.max_omega_splits;
  std::size_t trials = Budget{}.trials;
  std::optional<std::uint64_t> seed;
  std::string output;
  std::string family;
  std::string family_file;
  std::string gen;
  double eps = 1e-9;
  std::uint64_t max_terms = NetOptions{}.max_terms;
  bool require_certificate = false;
  bool json = false;
};

int run_check(const Options& o) {
  const Erased X = select_instance(o.instance);
  const auto law_names = expand_laws(o.laws);
  Budget budget;
  budget.max_finite_size = o.max_size;
  budget.max_omega_elems = o.omega;
  budget.caps = PartitionCaps{o.max_blocks, o.max_block_size, o.omega_splits};
  budget.trials = o.trials;
  budget.seed = resolve_seed(o.seed);

  std::ofstream file;
  if (!o.output.empty()) {
    file.open(o.output);
    if (!file) throw UsageError("cannot write '" + o.output + "'");
  }
  std::ostream& out = o.output.empty() ? std::cout : file;
  const auto outcome = X.check(law_names, budget);
  for (const auto& line : outcome.lines) out << line.dump() << '\n';
  out.flush();
  return outcome.failed ? kLawFailure : kPass;
}

int run_sum(const Options& o) {
  const Erased X = select_instance(o.instance);
  if (o.family.empty() == o.family_file.empty()) throw UsageError("give exactly one of --family and --family-file");
  const std::string literal = o.family.empty() ? read_text_file(o.family_file) : o.family;
  auto [text, line] = X.sum(literal);
  line["seed"] = resolve_seed(o.seed);
  std::cout << (o.json ? line.dump() : text) << '\n';
  return kPass;
}

int run_net(const Options& o) {
  const GeneratorFamily f = parse_generator(o.gen);
  if (o.require_certificate && !f.certificate) {
    throw UsageError(f.description + " has no absolute-bound certificate");
  }
  NetOptions options;
  options.max_terms = o.max_terms;
  const NetVerdict v = extended_sum_real(f, o.eps, options);
  if (o.json) {
    auto line = net_verdict_json(v);
    line["generator"] = f.description;
    line["eps"] = o.eps;
    line["certified"] = f.certificate.has_value();
    line["seed"] = resolve_seed(o.seed);
    std::cout << line.dump() << '\n';
  } else {
    std::cout << describe(v) << '\n';
  }
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Law checks, sums and net sums for partial infinitary monoids"};
  app.require_subcommand(1);
  Options o;

  auto* check = app.add_subcommand("check", "Run law suites; one JSON object per law");
  check->add_option("--instance", o.instance, "pm, parity:a,b, real, real-interval, int, extnat, unit, zmod:N, file:PATH")
      ->required();
  check->add_option("--laws", o.laws, "Comma list of flavors (weak, strong, ft, group) or law names");
  check->add_option("--max-size", o.max_size, "Largest finite part enumerated exhaustively");
  check->add_option("--omega", o.omega, "Most ω entries per enumerated family");
  check->add_option("--max-blocks", o.max_blocks, "Partition cap: block slots");
  check->add_option("--max-block-size", o.max_block_size, "Partition cap: block size");
  check->add_option("--omega-splits", o.omega_splits, "Partition cap: slots sharing one ω element");
  check->add_option("--trials", o.trials, "Random families beyond the exhaustive region");
  check->add_option("--seed", o.seed, "Seed for random trials (default: SIGMA_SUM_SEED or 0)");
  check->add_option("--output", o.output, "Write the report here instead of standard output");

  auto* sum = app.add_subcommand("sum", "Evaluate one family");
  sum->add_option("--instance", o.instance, "Instance selector")->required();
  sum->add_option("--family", o.family, "Family literal, e.g. '{finite: [+, +, -], omega: []}'");
  sum->add_option("--family-file", o.family_file, "File holding a family literal");
  sum->add_option("--seed", o.seed, "Echoed in JSON output");
  sum->add_flag("--json", o.json, "Print a JSON object");

  auto* net = app.add_subcommand("net", "Sum a real generator family as a net of finite partial sums");
  net->add_option("--gen", o.gen, "geometric(a,r), power(p), finite(x,...) or alternating_harmonic")->required();
  net->add_option("--eps", o.eps, "Tolerance for certified families");
  net->add_option("--max-terms", o.max_terms, "Terms evaluated before giving up");
  net->add_option("--seed", o.seed, "Echoed in JSON output");
  net->add_flag("--require-certificate", o.require_certificate, "Reject families without a certificate");
  net->add_flag("--json", o.json, "Print a JSON object");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (check->parsed()) return run_check(o);
    if (sum->parsed()) return run_sum(o);
    return run_net(o);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
  } catch (const UnsupportedError& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return kUsage;
}
