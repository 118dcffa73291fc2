// Command-line front end for the loewner library.
//
// Every subcommand prints a JSON report on stdout (or writes the requested files and then a
// JSON summary). Exit codes: 0 success, 2 invalid input, 3 numerical failure.

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "loewner/loewner.hpp"
#include "loewner/report.hpp"

namespace {

using loewner::cd;
using nlohmann::json;

constexpr int exit_invalid = 2;
constexpr int exit_numerical = 3;

json resolved_config(const CLI::App &sub) {
  json cfg = json::object();
  for (const CLI::Option *opt : sub.get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string name = opt->get_lnames().front();
    if (name == "help" || name == "config") continue;
    if (opt->get_items_expected_max() == 0) {
      cfg[name] = opt->count() > 0;
    } else if (opt->count() > 0) {
      const auto &res = opt->results();
      cfg[name] = res.size() == 1 ? json(res.front()) : json(res);
    } else {
      cfg[name] = opt->get_default_str();
    }
  }
  return cfg;
}

json report(const CLI::App &sub, json result) {
  return {{"tool_version", loewner::tool_version},
          {"command", sub.get_name()},
          {"config", resolved_config(sub)},
          {"result", std::move(result)}};
}

// Set when a subcommand streams its data to stdout; the JSON report then goes to stderr.
bool report_to_stderr = false;

enum class Format { Csv, Svg };

Format resolve_format(const std::string &format, const std::string &path) {
  if (format == "csv") return Format::Csv;
  if (format == "svg") return Format::Svg;
  if (!format.empty()) throw loewner::PreconditionError("--format must be csv or svg");
  return std::filesystem::path(path).extension() == ".svg" ? Format::Svg : Format::Csv;
}

void emit_trace(const loewner::TracePolyline &tr, const std::string &out, const std::string &format) {
  const Format f = resolve_format(format, out);
  auto write = [&](std::ostream &os) {
    if (f == Format::Csv)
      loewner::write_trace_csv(os, tr);
    else
      loewner::write_trace_svg(os, tr);
  };
  if (out.empty() || out == "-") {
    report_to_stderr = true;
    write(std::cout);
    return;
  }
  std::ofstream os(out, std::ios::binary);
  if (!os) throw loewner::PreconditionError("cannot open output file " + out);
  write(os);
}

std::pair<std::uint64_t, std::uint64_t> parse_seed_range(const std::string &text) {
  const auto dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      const auto s = std::stoull(text);
      return {s, s};
    }
    const auto a = std::stoull(text.substr(0, dots));
    const auto b = std::stoull(text.substr(dots + 2));
    if (b < a) throw std::invalid_argument(text);
    return {a, b};
  } catch (const std::exception &) {
    throw loewner::PreconditionError("--seeds must look like a..b with a <= b");
  }
}

/// Runs fn(i) for i in [0, count) on `jobs` threads; fn must write only to slot i.
template <class Fn> void parallel_for(std::size_t count, unsigned jobs, Fn &&fn) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(count)));
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(jobs);
  auto worker = [&](unsigned w) {
    try {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < jobs; ++w) pool.emplace_back(worker, w);
  worker(0);
  for (auto &t : pool) t.join();
  for (auto &e : errors)
    if (e) std::rethrow_exception(e);
}

std::vector<loewner::RangeProbe> parse_probes(double s, const std::vector<std::string> &zs,
                                              const std::string &v) {
  std::vector<loewner::RangeProbe> probes;
  const cd vv = loewner::parse_complex(v);
  for (const auto &z : zs) probes.push_back({s, loewner::parse_complex(z), vv});
  return probes;
}

/// Splices `key=value` lines from a --config file into the argument list right after the
/// subcommand name. Keys also given on the command line are skipped, so explicit flags win;
/// unknown keys surface as ordinary parse errors.
std::vector<std::string> expand_config(int argc, char **argv) {
  std::vector<std::string> args(argv, argv + argc), rest, injected;
  std::string path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw loewner::PreconditionError("cannot read config file " + path);
  auto given = [&](const std::string &key) {
    for (const auto &a : rest)
      if (a == "--" + key || a.rfind("--" + key + "=", 0) == 0) return true;
    return false;
  };
  auto trim = [](std::string x) {
    const auto b = x.find_first_not_of(" \t\r"), e = x.find_last_not_of(" \t\r");
    x = b == std::string::npos ? "" : x.substr(b, e - b + 1);
    if (x.size() >= 2 && x.front() == '"' && x.back() == '"') x = x.substr(1, x.size() - 2);
    return x;
  };
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw loewner::PreconditionError("config line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.empty()) throw loewner::PreconditionError("config line " + std::to_string(lineno) + ": empty key");
    if (given(key)) continue;
    if (value == "true" || value == "false") {
      if (value == "true") injected.push_back("--" + key);
    } else {
      injected.push_back("--" + key);
      injected.push_back(value);
    }
  }
  std::vector<std::string> out{args[0]};
  std::size_t j = 0;
  for (; j < rest.size() && !rest[j].empty() && rest[j][0] == '-'; ++j) out.push_back(rest[j]);
  if (j < rest.size()) out.push_back(rest[j++]);
  out.insert(out.end(), injected.begin(), injected.end());
  out.insert(out.end(), rest.begin() + static_cast<std::ptrdiff_t>(j), rest.end());
  return out;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Numerical Loewner evolution toolkit", "loewner"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  std::function<json()> run;
  std::string config_path; // consumed by expand_config before parsing

  // radial-evolve
  struct {
    std::string z = "0", driving = "const:1";
    double s = 0.0, t = 0.0, rel_tol = 1e-9, abs_tol = 1e-12;
  } re;
  auto *radial = app.add_subcommand("radial-evolve", "phi_{s,t}(z) of the radial equation");
  radial->add_option("--config", config_path, "key=value file pre-populating flags");
  radial->add_option("--z", re.z, "start point in the disc (complex literal)");
  radial->add_option("--s", re.s, "start time");
  radial->add_option("--t", re.t, "end time");
  radial->add_option("--driving", re.driving, "driving spec (unimodular)");
  radial->add_option("--rel-tol", re.rel_tol, "relative tolerance");
  radial->add_option("--abs-tol", re.abs_tol, "absolute tolerance");
  radial->callback([&] {
    run = [&] {
      const auto d = loewner::parse_driving(re.driving, loewner::Codomain::Unimodular);
      const loewner::DiscPoint z(loewner::parse_complex(re.z));
      const auto w = loewner::evolve({z, re.s, re.t, d, re.rel_tol, re.abs_tol});
      return report(*radial, {{"value", loewner::complex_json(w.value())}});
    };
  });

  // trace
  struct {
    std::string driving = "const:0", out, format;
    double T = 1.0, y0 = 0.0;
    std::size_t n = 100;
  } tr;
  auto *trace = app.add_subcommand("trace", "chordal hull trace for a driving term");
  trace->add_option("--config", config_path, "key=value file pre-populating flags");
  trace->add_option("--driving", tr.driving, "driving spec (real)");
  trace->add_option("--T", tr.T, "final time");
  trace->add_option("--n", tr.n, "number of grid cells");
  trace->add_option("--y0", tr.y0, "seed offset above the driving value (0: automatic)");
  trace->add_option("--out", tr.out, "output path ('-' or empty: stdout)");
  trace->add_option("--format", tr.format, "csv or svg (default from extension)");
  trace->callback([&] {
    run = [&] {
      const auto d = loewner::parse_driving(tr.driving, loewner::Codomain::Real);
      const auto poly = loewner::trace(tr.T, tr.n, d,
                                       tr.y0 > 0.0 ? std::optional(tr.y0) : std::nullopt);
      emit_trace(poly, tr.out, tr.format);
      std::size_t invalid = 0;
      for (bool v : poly.valid) invalid += !v;
      return report(*trace, {{"points", poly.points.size()}, {"invalid_points", invalid}});
    };
  });

  // sle
  struct {
    double kappa = 0.0, T = 1.0, y0 = 0.0;
    std::uint64_t seed = 0;
    std::size_t n = 1000;
    std::string out, format;
  } sl;
  auto *sle = app.add_subcommand("sle", "chordal SLE_kappa trace for one seed");
  sle->add_option("--config", config_path, "key=value file pre-populating flags");
  sle->add_option("--kappa", sl.kappa, "SLE parameter");
  sle->add_option("--seed", sl.seed, "random seed");
  sle->add_option("--T", sl.T, "final time");
  sle->add_option("--n", sl.n, "number of grid cells");
  sle->add_option("--y0", sl.y0, "seed offset (0: automatic)");
  sle->add_option("--out", sl.out, "output path ('-' or empty: stdout)");
  sle->add_option("--format", sl.format, "csv or svg (default from extension)");
  sle->callback([&] {
    run = [&] {
      const auto poly = loewner::chordal_sle_trace(
          sl.kappa, sl.seed, sl.T, sl.n, sl.y0 > 0.0 ? std::optional(sl.y0) : std::nullopt);
      emit_trace(poly, sl.out, sl.format);
      const auto path = loewner::brownian_path(sl.seed, sl.kappa, sl.T, sl.n);
      return report(*sle, {{"points", poly.points.size()},
                           {"terminal_driving", path.values.back()}});
    };
  });

  // sle-batch
  struct {
    double kappa = 0.0, T = 1.0, y0 = 0.0;
    std::string seeds = "0..9", out_dir = "sle_batch";
    std::size_t n = 1000;
    unsigned jobs = 1;
  } sb;
  auto *batch = app.add_subcommand("sle-batch", "SLE traces for a range of seeds");
  batch->add_option("--config", config_path, "key=value file pre-populating flags");
  batch->add_option("--kappa", sb.kappa, "SLE parameter");
  batch->add_option("--seeds", sb.seeds, "seed range a..b (inclusive)");
  batch->add_option("--T", sb.T, "final time");
  batch->add_option("--n", sb.n, "number of grid cells");
  batch->add_option("--y0", sb.y0, "seed offset (0: automatic)");
  batch->add_option("--jobs", sb.jobs, "worker threads (results do not depend on it)");
  batch->add_option("--out-dir", sb.out_dir, "directory for per-seed CSVs and summary.json");
  batch->callback([&] {
    run = [&] {
      const auto [first, last] = parse_seed_range(sb.seeds);
      const std::size_t count = last - first + 1;
      std::filesystem::create_directories(sb.out_dir);
      std::vector<double> terminal(count);
      parallel_for(count, sb.jobs, [&](std::size_t i) {
        const std::uint64_t seed = first + i;
        const auto poly = loewner::chordal_sle_trace(
            sb.kappa, seed, sb.T, sb.n, sb.y0 > 0.0 ? std::optional(sb.y0) : std::nullopt);
        std::ofstream os(std::filesystem::path(sb.out_dir) / ("sle_" + std::to_string(seed) + ".csv"),
                         std::ios::binary);
        loewner::write_trace_csv(os, poly);
        terminal[i] = loewner::brownian_path(seed, sb.kappa, sb.T, sb.n).values.back();
      });
      double mean = 0.0;
      for (double x : terminal) mean += x;
      mean /= static_cast<double>(count);
      double var = 0.0;
      for (double x : terminal) var += (x - mean) * (x - mean);
      var = count > 1 ? var / static_cast<double>(count - 1) : 0.0;
      json summary = report(*batch, {{"seeds", count},
                                     {"terminal_mean", mean},
                                     {"terminal_variance", var},
                                     {"expected_variance", sb.kappa * sb.T},
                                     {"terminal_values", terminal}});
      std::ofstream(std::filesystem::path(sb.out_dir) / "summary.json", std::ios::binary)
          << summary.dump(2) << '\n';
      return summary;
    };
  });

  // check-generator
  struct {
    std::string field = "-z";
    std::size_t grid_n = 32;
    double tol = 1e-9;
  } cg;
  auto *check = app.add_subcommand("check-generator", "test whether H(z) generates a semigroup");
  check->add_option("--config", config_path, "key=value file pre-populating flags");
  check->add_option("--field", cg.field, "field expression in z");
  check->add_option("--grid-n", cg.grid_n, "test grid resolution (>= 16)");
  check->add_option("--tol", cg.tol, "acceptance tolerance");
  check->callback([&] {
    run = [&] {
      const auto H = loewner::FieldExpression::parse(cg.field).as_field();
      const auto v = loewner::generator_test(H, cg.grid_n, cg.tol);
      json result = loewner::to_json(v);
      result["aq_test"] = loewner::to_json(loewner::aq_test(H, cg.grid_n));
      return report(*check, result);
    };
  });

  // decompose
  struct {
    std::string field = "-z";
  } dc;
  auto *decompose = app.add_subcommand("decompose", "Berkson-Porta decomposition of a generator");
  decompose->add_option("--config", config_path, "key=value file pre-populating flags");
  decompose->add_option("--field", dc.field, "field expression in z");
  decompose->callback([&] {
    run = [&] {
      const auto H = loewner::FieldExpression::parse(dc.field).as_field();
      const auto v = loewner::generator_test(H);
      if (!v.accepted) throw loewner::PreconditionError("decompose: field is not a generator");
      return report(*decompose, loewner::to_json(loewner::berkson_porta(H)));
    };
  });

  // coeffs
  struct {
    std::string driving = "const:-1";
    double s = 0.0, t_max = 0.0;
    bool cross_check = false;
  } co;
  auto *coeffs = app.add_subcommand("coeffs", "a2, a3 of the Loewner chain and Bieberbach check");
  coeffs->add_option("--config", config_path, "key=value file pre-populating flags");
  coeffs->add_option("--driving", co.driving, "driving spec (unimodular)");
  coeffs->add_option("--s", co.s, "chain time");
  coeffs->add_option("--t-max", co.t_max, "quadrature horizon (0: s + 40)");
  coeffs->add_flag("--cross-check", co.cross_check, "also compute coefficients from the jet limit");
  coeffs->callback([&] {
    run = [&] {
      const auto d = loewner::parse_driving(co.driving, loewner::Codomain::Unimodular);
      const double t_max = co.t_max > 0.0 ? co.t_max : co.s + 40.0;
      json result = loewner::to_json(loewner::bieberbach_verify(d, co.s, t_max));
      if (co.cross_check) result["jet"] = loewner::to_json(loewner::coeffs_from_jet(co.s, d, t_max));
      return report(*coeffs, result);
    };
  });

  // range-classify
  struct {
    std::string field = "-z", v = "1";
    std::vector<std::string> z{"0.3"};
    double s = 0.0;
  } rc;
  auto *range = app.add_subcommand("range-classify", "Loewner range (Disc or Plane) of G(z, t)");
  range->add_option("--config", config_path, "key=value file pre-populating flags");
  range->add_option("--field", rc.field, "field expression in z and t");
  range->add_option("--s", rc.s, "start time of the probes");
  range->add_option("--z", rc.z, "probe points (repeatable)");
  range->add_option("--v", rc.v, "tangent vector");
  range->callback([&] {
    run = [&] {
      const auto G = loewner::FieldExpression::parse(rc.field).as_time_field();
      return report(*range, loewner::to_json(loewner::classify_range(G, parse_probes(rc.s, rc.z, rc.v))));
    };
  });

  std::vector<std::string> args;
  try {
    args = expand_config(argc, argv);
  } catch (const loewner::PreconditionError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_invalid;
  }
  std::vector<char *> cargs;
  for (auto &a : args) cargs.push_back(a.data());

  try {
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return exit_invalid;
  }

  try {
    const json r = run();
    (report_to_stderr ? std::cerr : std::cout) << r.dump(2) << '\n';
  } catch (const loewner::PreconditionError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_invalid;
  } catch (const loewner::NumericalError &e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return exit_numerical;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_invalid;
  }
  return 0;
}
