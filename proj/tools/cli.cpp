#include "cli.hpp"

#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cds/bounds.hpp"
#include "cds/errors.hpp"
#include "cds/harness.hpp"
#include "cds/rational.hpp"
#include "cds/schemes.hpp"

namespace cds::cli {

namespace {

struct Options {
  std::size_t k = 0;
  std::size_t n = 0;
  std::size_t d = 12;
  std::string storage;
  std::uint64_t seed = 0;
  std::size_t iters = 100;
  std::size_t points = 5;
  std::string out;
  std::string scheme = "auto";
  bool exact = false;
  std::uint64_t max_pairs = kDefaultMaxPairs;
};

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

Scheme named_scheme(const std::string& name, std::size_t k, std::size_t n) {
  if (name == "full") return Scheme::full_storage(k, n);
  if (name == "k2min" && k == 2) return Scheme::k2_min(n);
  if (name == "k3min" && k == 3) return Scheme::k3_min(n);
  if (name == "k3twothirds" && k == 3) return Scheme::k3_two_thirds(n);
  throw UsageError("scheme '" + name + "' is not available for K=" + std::to_string(k));
}

Scheme resolve_scheme(const Options& o) {
  if (o.k == 0 || o.n % o.k != 0) {
    throw UsageError("K=" + std::to_string(o.k) + " does not divide N=" + std::to_string(o.n));
  }
  if (o.k != 2 && o.k != 3) {
    throw UsageError("only K=2 and K=3 are supported");
  }
  std::optional<Rational> storage;
  if (!o.storage.empty()) storage = parse_rational(o.storage);

  if (o.scheme == "auto") {
    if (!storage) throw UsageError("--storage is required unless --scheme names a corner");
    return select_scheme(o.k, o.n, *storage);
  }
  Scheme s = named_scheme(o.scheme, o.k, o.n);
  if (storage && *storage != s.storage_points()) {
    throw UsageError("--scheme " + o.scheme + " runs at storage " +
                     to_exact_string(s.storage_points()) + ", not " + to_exact_string(*storage));
  }
  return s;
}

/// Writes to --out if set, else to `fallback`.
void emit(const Options& o, const std::string& text, std::ostream& fallback) {
  if (o.out.empty()) {
    fallback << text;
    return;
  }
  std::ofstream file(o.out, std::ios::binary);
  if (!file) throw UsageError("cannot open '" + o.out + "' for writing");
  file << text;
}

std::string cell(const Rational& r) { return to_decimal_string(r, 6); }

int cmd_run(const Options& o, std::ostream& out) {
  const Scheme scheme = resolve_scheme(o);
  validate_dimensions(scheme, o.d);
  std::ostringstream csv;
  csv << "iter,rate_bits,rate_points" << (o.exact ? ",rate_points_exact" : "") << '\n';
  for (const auto& rec : run_chain(scheme, o.n, o.d, o.seed, o.iters)) {
    csv << rec.iteration << ',' << rec.rate_bits << ',' << cell(rec.rate_points);
    if (o.exact) csv << ',' << to_exact_string(rec.rate_points);
    csv << '\n';
  }
  emit(o, csv.str(), out);
  return kExitOk;
}

int cmd_worstcase(const Options& o, std::ostream& out) {
  const Scheme scheme = resolve_scheme(o);
  const auto report = worst_case_search(scheme, o.n, o.d, o.max_pairs, o.seed);
  const auto S = scheme.storage_points();
  out << "scheme: " << scheme.name() << '\n'
      << "storage_points: " << to_exact_string(S) << '\n'
      << "pairs_checked: " << report.pairs_checked << '\n'
      << "all_decoded: " << (report.all_decoded ? "true" : "false") << '\n';
  if (!report.all_decoded) {
    out << "failing_pair: " << report.failing_pair->first.to_string() << " -> "
        << report.failing_pair->second.to_string() << '\n'
        << "failure: " << report.failure << '\n';
    return kExitViolation;
  }
  out << "max_rate_points: " << to_exact_string(report.max_rate_points) << " ("
      << cell(report.max_rate_points) << ")\n"
      << "optimal_rate_points: " << to_exact_string(opt_rate(o.k, o.n, S)) << '\n'
      << "lower_bound_points: " << to_exact_string(combined_lower_bound(o.k, o.n, S)) << '\n'
      << "argmax: " << report.argmax_pair->first.to_string() << " -> "
      << report.argmax_pair->second.to_string() << '\n';
  return kExitOk;
}

int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.k == 0 || o.n % o.k != 0) {
    throw UsageError("K=" + std::to_string(o.k) + " does not divide N=" + std::to_string(o.n));
  }
  if (o.points == 0) throw UsageError("--points must be at least 1");
  const Rational lo(static_cast<std::int64_t>(o.n / o.k));
  const Rational hi(static_cast<std::int64_t>(o.n));

  std::vector<Rational> grid;
  for (std::size_t i = 0; i < o.points; ++i) {
    grid.push_back(o.points == 1 ? lo
                                 : lo + (hi - lo) * static_cast<std::int64_t>(i) /
                                            static_cast<std::int64_t>(o.points - 1));
  }

  // Every grid point must be realisable before any search starts.
  std::vector<Scheme> schemes;
  for (const auto& S : grid) {
    try {
      schemes.push_back(select_scheme(o.k, o.n, S));
      validate_dimensions(schemes.back(), o.d);
    } catch (const DivisibilityError& e) {
      throw DivisibilityError("storage S=" + to_exact_string(S) + ": " + e.what());
    }
  }

  std::ostringstream csv;
  csv << "S,measured,optimal,lower_bound";
  if (o.exact) csv << ",S_exact,measured_exact,optimal_exact,lower_bound_exact";
  csv << '\n';
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& S = grid[i];
    const auto report = worst_case_search(schemes[i], o.n, o.d, o.max_pairs, o.seed);
    if (!report.all_decoded) {
      err << "sweep: decoding failed at S=" << to_exact_string(S) << ": " << report.failure
          << '\n';
      return kExitViolation;
    }
    const auto optimal = opt_rate(o.k, o.n, S);
    const auto bound = combined_lower_bound(o.k, o.n, S);
    csv << cell(S) << ',' << cell(report.max_rate_points) << ',' << cell(optimal) << ','
        << cell(bound);
    if (o.exact) {
      csv << ',' << to_exact_string(S) << ',' << to_exact_string(report.max_rate_points) << ','
          << to_exact_string(optimal) << ',' << to_exact_string(bound);
    }
    csv << '\n';
  }
  emit(o, csv.str(), out);
  return kExitOk;
}

void add_shape(CLI::App* cmd, Options& o) {
  cmd->add_option("--k", o.k, "number of workers (2 or 3)")->required();
  cmd->add_option("--n", o.n, "number of data points")->required();
  cmd->add_option("--d", o.d, "bits per data point (even)")->capture_default_str();
  cmd->add_option("--seed", o.seed, "dataset and shuffle seed")->capture_default_str();
  cmd->add_option("--max-pairs", o.max_pairs, "cap on enumerated shuffle pairs")
      ->capture_default_str();
}

void add_scheme(CLI::App* cmd, Options& o) {
  cmd->add_option("--storage", o.storage, "storage per worker in points (p/q or decimal)");
  cmd->add_option("--scheme", o.scheme, "auto, full, k2min, k3min, k3twothirds")
      ->capture_default_str();
}

}  // namespace

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Coded data shuffling: chains, worst-case search, tradeoff sweeps"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "step a random shuffle chain and emit per-step rates");
  add_shape(run, o);
  add_scheme(run, o);
  run->add_option("--iters", o.iters, "number of shuffle transitions")->capture_default_str();
  run->add_option("--out", o.out, "CSV output path (default stdout)");
  run->add_flag("--exact", o.exact, "add an exact p/q column");

  auto* worst = app.add_subcommand("worstcase", "exhaustive worst case over shuffle pairs");
  add_shape(worst, o);
  add_scheme(worst, o);

  auto* sweep = app.add_subcommand("sweep", "worst-case rate across the storage axis");
  add_shape(sweep, o);
  sweep->add_option("--points", o.points, "evenly spaced storage values from N/K to N")
      ->capture_default_str();
  sweep->add_option("--out", o.out, "CSV output path (default stdout)");
  sweep->add_flag("--exact", o.exact, "add exact p/q columns");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n' << app.help();
    return kExitUsage;
  }

  try {
    if (run->parsed()) return cmd_run(o, out);
    if (worst->parsed()) return cmd_worstcase(o, out);
    return cmd_sweep(o, out, err);
  } catch (const InvariantViolation& e) {
    err << "invariant violated: " << e.what() << '\n';
    return kExitViolation;
  } catch (const ProtocolError& e) {
    err << "protocol violation: " << e.what() << '\n';
    return kExitViolation;
  } catch (const EnumerationCapExceeded& e) {
    err << "refused: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace cds::cli
