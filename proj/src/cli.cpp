#include "permoments/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "permoments/asymptotics.hpp"
#include "permoments/errors.hpp"
#include "permoments/feller.hpp"
#include "permoments/moments.hpp"
#include "permoments/partitions.hpp"
#include "permoments/version.hpp"

namespace permoments::cli {

namespace {

using json = nlohmann::json;

const std::vector<std::string> kCommands = {"exact",  "gf",         "limit",
                                            "simulate", "zinfty",   "asymptotic",
                                            "sweep",  "selftest"};

double finite(double v) {
  if (!std::isfinite(v)) throw std::runtime_error("non-finite result");
  return v;
}

json complex_json(cplx z) { return {{"re", finite(z.real())}, {"im", finite(z.imag())}}; }

json complex_list(const std::vector<cplx>& zs) {
  json out = json::array();
  for (auto z : zs) out.push_back(complex_json(z));
  return out;
}

json inputs_json(const RunConfig& c) {
  return {{"n", c.n}, {"x", complex_list(c.xs)}, {"s", complex_list(c.ss)}};
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << finite(v);
  return os.str();
}

std::optional<std::vector<int>> integer_exponents(const std::vector<cplx>& ss) {
  std::vector<int> out;
  for (auto s : ss) {
    auto k = as_nonnegative_integer(s);
    if (!k) return std::nullopt;
    out.push_back(*k);
  }
  return out;
}

// Calls body(i) for i in [0, count) on up to `threads` workers.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& body) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t i; !failed && (i = next++) < count;) {
          try {
            body(i);
          } catch (...) {
            if (!failed.exchange(true)) failure = std::current_exception();
          }
        }
      });
  }
  if (failure) std::rethrow_exception(failure);
}

struct Document {
  json body;                     // JSON form
  std::vector<std::string> csv;  // CSV form, header first
};

Document value_document(const RunConfig& c, const std::string& method, cplx value,
                        json extra = json::object()) {
  json body = {{"method", method}, {"inputs", inputs_json(c)}, {"value", complex_json(value)}};
  for (auto& [k, v] : extra.items()) body[k] = v;
  std::string bound;
  if (extra.contains("std_error")) bound = format_double(extra["std_error"].get<double>());
  if (extra.contains("relative_error_bound"))
    bound = format_double(extra["relative_error_bound"].get<double>());
  return {body,
          {"n,method,re,im,error", std::to_string(c.n) + "," + method + "," +
                                       format_double(value.real()) + "," +
                                       format_double(value.imag()) + "," + bound}};
}

Document run_exact(const RunConfig& c) {
  const MomentQuery q(c.n, c.xs, c.ss);
  std::string method = c.method == "auto" ? "partition_sum" : c.method;
  if (method == "partition_sum") return value_document(c, method, exact_moment_partition_sum(q));
  if (method == "brute_force") return value_document(c, method, brute_force_moment(q));
  throw std::invalid_argument("exact --method must be partition_sum or brute_force");
}

Document run_gf(const RunConfig& c) {
  const MomentQuery q(c.n, c.xs, c.ss);
  std::string method = c.method;
  if (method == "auto") method = q.is_integer() ? "gf_integer" : "gf_complex";
  if (method == "gf_integer") return value_document(c, method, gf_moment_integer(q));
  if (method == "gf_complex") return value_document(c, method, gf_moment_complex(q));
  throw std::invalid_argument("gf --method must be gf_integer or gf_complex");
}

Document run_limit(const RunConfig& c) {
  MomentQuery(c.n, c.xs, c.ss).validate();
  auto ints = integer_exponents(c.ss);
  std::string method = c.method;
  if (method == "auto") method = ints ? "product" : "lattice";
  if (method == "product") {
    if (!ints) throw std::invalid_argument("limit --method product needs integer s");
    return value_document(c, method, limit_integer(c.xs, *ints),
                          {{"relative_error_bound", 0.0}});
  }
  if (method == "lattice") {
    const auto r = limit_complex(c.xs, c.ss, c.tol);
    return value_document(c, method, r.value,
                          {{"relative_error_bound", r.tail_bound}, {"radius", r.radius}});
  }
  throw std::invalid_argument("limit --method must be product or lattice");
}

MonteCarloOptions mc_options(const RunConfig& c) {
  MonteCarloOptions o;
  o.samples = c.samples;
  o.seed = c.seed;
  o.threads = c.threads;
  return o;
}

json estimate_json(const MonteCarloEstimate& e) {
  return {{"std_error", finite(e.std_error)}, {"samples", e.samples}, {"seed", e.seed}};
}

Document run_simulate(const RunConfig& c) {
  const MomentQuery q(c.n, c.xs, c.ss);
  const auto e = mc_moment(q, mc_options(c));
  if (!c.dump_path.empty()) {
    if (c.n < 1) throw std::invalid_argument("--dump needs n >= 1");
    // Draws use a stream the estimator never reaches.
    Rng rng(c.seed, std::uint64_t{1} << 63);
    std::vector<CoupledCounts> draws;
    for (std::size_t i = 0; i < c.dump_draws; ++i) {
      const int n = static_cast<int>(c.n);
      draws.push_back(simulate_coupling(n, n, 8 * static_cast<std::int64_t>(n), rng));
    }
    std::ofstream file(c.dump_path);
    if (!file) throw std::runtime_error("cannot open " + c.dump_path);
    write_coupling_csv(file, draws);
  }
  return value_document(c, "monte_carlo", e.mean, estimate_json(e));
}

Document run_zinfty(const RunConfig& c) {
  MomentQuery(c.n, c.xs, c.ss).validate();
  if (c.xs.size() != 1) throw std::invalid_argument("zinfty takes one --x and one --s");
  const auto e = mc_z_infty(c.xs[0], c.ss[0], c.tol, mc_options(c));
  json extra = estimate_json(e);
  extra["truncation"] = z_infty_truncation(c.xs[0], c.ss[0], c.tol);
  return value_document(c, "z_infinity_monte_carlo", e.mean, extra);
}

Document run_asymptotic(const RunConfig& c) {
  if (c.xs.size() != 1) throw std::invalid_argument("asymptotic takes exactly one --x");
  if (c.s1 < 0 || c.s2 < 0) throw std::invalid_argument("--s1 and --s2 must be nonnegative");
  if (c.n < 1) throw std::invalid_argument("asymptotic needs n >= 1");
  const auto p = leading_terms(c.s1, c.s2, c.xs[0]);
  const auto r = verify_ratio(p, static_cast<long long>(c.n));
  json terms = json::array();
  for (const auto& t : p.terms) terms.push_back({{"k0", t.k0}, {"constant", complex_json(t.constant)}});
  json body = {{"method", "leading_terms"},
               {"inputs", {{"n", c.n}, {"x", complex_json(p.x)}, {"s1", c.s1}, {"s2", c.s2}}},
               {"order", p.order},
               {"exponent", p.exponent()},
               {"terms", terms},
               {"exact", complex_json(r.exact)},
               {"predicted", complex_json(r.predicted)},
               {"prediction_vanishes", r.prediction_vanishes}};
  if (!r.prediction_vanishes) body["ratio"] = complex_json(r.ratio);
  std::ostringstream header, row;
  write_ratio_csv_header(header);
  write_ratio_csv_row(row, r);
  auto strip = [](std::string s) {
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
    return s;
  };
  return {body, {strip(header.str()), strip(row.str())}};
}

Document run_sweep(const RunConfig& c) {
  MomentQuery(c.n, c.xs, c.ss).validate();
  if (c.n_step == 0) throw std::invalid_argument("--n-step must be positive");
  if (c.n_from > c.n) throw std::invalid_argument("--n-from exceeds --n");
  std::vector<std::size_t> ns;
  for (std::size_t n = c.n_from; n <= c.n; n += c.n_step) ns.push_back(n);
  std::vector<cplx> values(ns.size());
  auto ints = integer_exponents(c.ss);
  std::string method = c.method;
  if (method == "auto") method = ints ? "gf_integer" : "gf_complex";
  if (method == "gf_integer") {
    if (!ints) throw std::invalid_argument("gf_integer needs integer s");
    const auto all = gf_moments_integer(c.xs, *ints, c.n);
    for (std::size_t i = 0; i < ns.size(); ++i) values[i] = all[ns[i]];
  } else if (method == "gf_complex" || method == "partition_sum") {
    parallel_for(ns.size(), c.threads, [&](std::size_t i) {
      const MomentQuery q(ns[i], c.xs, c.ss);
      values[i] = method == "gf_complex" ? gf_moment_complex(q)
                                         : exact_moment_partition_sum(q);
    });
  } else {
    throw std::invalid_argument("sweep --method must be gf_integer, gf_complex or partition_sum");
  }
  Document d;
  json rows = json::array();
  d.csv.push_back("n,re,im");
  for (std::size_t i = 0; i < ns.size(); ++i) {
    rows.push_back({{"n", ns[i]}, {"value", complex_json(values[i])}});
    d.csv.push_back(std::to_string(ns[i]) + "," + format_double(values[i].real()) + "," +
                    format_double(values[i].imag()));
  }
  d.body = {{"method", method},
            {"inputs", {{"x", complex_list(c.xs)}, {"s", complex_list(c.ss)},
                        {"n_from", c.n_from}, {"n_to", c.n}, {"n_step", c.n_step}}},
            {"rows", rows}};
  return d;
}

double relative_gap(cplx a, cplx b) {
  return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

// Oracle-equivalence grid: determinant average, partition sum and generating
// function must agree; complex exponents compare partition sum with the
// cycle-index series.
Document run_selftest(const RunConfig& c) {
  Rng rng(c.seed, 0);
  auto random_point = [&](double radius) {
    const double r = radius * std::sqrt(rng.uniform());
    return std::polar(r, 2.0 * M_PI * rng.uniform());
  };
  std::size_t cases = 0, failures = 0;
  double worst = 0.0;
  auto record = [&](double gap, double tol) {
    ++cases;
    worst = std::max(worst, gap);
    if (!(gap <= tol)) ++failures;
  };
  for (std::size_t n = 0; n <= 6; ++n) {
    for (int p = 1; p <= 2; ++p) {
      for (int draw = 0; draw < 3; ++draw) {
        std::vector<cplx> xs, ss;
        for (int j = 0; j < p; ++j) {
          xs.push_back(random_point(0.9));
          ss.push_back(static_cast<double>(rng.next_u64() % 4));
        }
        const MomentQuery q(n, xs, ss);
        const cplx part = exact_moment_partition_sum(q);
        record(relative_gap(brute_force_moment(q), part), 1e-9);
        record(relative_gap(gf_moment_integer(q), part), 1e-9);
      }
    }
  }
  for (cplx s : {cplx{0.5, 0.0}, cplx{1.0, 1.0}, cplx{-0.7, 0.2}}) {
    for (std::size_t n : {1u, 5u, 12u}) {
      const MomentQuery q(n, {random_point(0.6)}, {s});
      record(relative_gap(gf_moment_complex(q), exact_moment_partition_sum(q)), 1e-9);
    }
  }
  for (std::size_t n = 1; n <= 20; ++n) {
    const cplx x = random_point(0.99);
    record(std::abs(gf_moment_integer(MomentQuery(n, {x}, {1.0})) - (1.0 - x)), 1e-12);
  }
  Document d;
  d.body = {{"method", "oracle_grid"},
            {"inputs", {{"seed", c.seed}}},
            {"cases", cases},
            {"failures", failures},
            {"max_relative_gap", finite(worst)},
            {"passed", failures == 0}};
  d.csv = {"cases,failures,max_relative_gap",
           std::to_string(cases) + "," + std::to_string(failures) + "," + format_double(worst)};
  return d;
}

Document dispatch(const RunConfig& c) {
  if (c.command == "exact") return run_exact(c);
  if (c.command == "gf") return run_gf(c);
  if (c.command == "limit") return run_limit(c);
  if (c.command == "simulate") return run_simulate(c);
  if (c.command == "zinfty") return run_zinfty(c);
  if (c.command == "asymptotic") return run_asymptotic(c);
  if (c.command == "sweep") return run_sweep(c);
  if (c.command == "selftest") return run_selftest(c);
  throw std::invalid_argument("unknown command '" + c.command + "'");
}

std::string default_output(const std::string& command) {
  return command == "asymptotic" || command == "sweep" ? "csv" : "json";
}

unsigned threads_from_env() {
  const char* v = std::getenv(kThreadsEnv);
  if (!v || !*v) return 1;
  char* end = nullptr;
  const unsigned long t = std::strtoul(v, &end, 10);
  if (*end != '\0' || t == 0) return 1;
  return static_cast<unsigned>(std::min<unsigned long>(t, 256));
}

}  // namespace

std::optional<cplx> parse_complex(std::string_view text) {
  bool polar = false;
  if (text.starts_with("polar:")) {
    polar = true;
    text.remove_prefix(6);
  }
  auto parse_double = [](std::string_view s) -> std::optional<double> {
    if (s.empty()) return std::nullopt;
    std::string buf(s);
    char* end = nullptr;
    const double v = std::strtod(buf.c_str(), &end);
    if (end != buf.c_str() + buf.size() || !std::isfinite(v)) return std::nullopt;
    return v;
  };
  const auto comma = text.find(',');
  auto a = parse_double(text.substr(0, comma));
  if (!a) return std::nullopt;
  std::optional<double> b = 0.0;
  if (comma != std::string_view::npos) b = parse_double(text.substr(comma + 1));
  else if (polar) return std::nullopt;
  if (!b) return std::nullopt;
  if (polar) {
    if (*a < 0.0) return std::nullopt;
    return std::polar(*a, *b);
  }
  return cplx{*a, *b};
}

void validate(const RunConfig& c) {
  if (std::find(kCommands.begin(), kCommands.end(), c.command) == kCommands.end())
    throw std::invalid_argument("unknown command '" + c.command + "'");
  const std::string output = c.output.empty() ? default_output(c.command) : c.output;
  if (output != "json" && output != "csv")
    throw std::invalid_argument("--output must be json or csv");
  if (c.command == "selftest") return;
  if (c.command == "asymptotic") {
    if (c.xs.size() != 1) throw std::invalid_argument("asymptotic takes exactly one --x");
    return;
  }
  if (c.xs.empty()) throw std::invalid_argument("at least one --x is required");
  if (c.xs.size() != c.ss.size())
    throw std::invalid_argument("got " + std::to_string(c.xs.size()) + " --x values but " +
                                std::to_string(c.ss.size()) + " --s values");
  if (!(c.tol > 0.0)) throw std::invalid_argument("--tol must be positive");
  if ((c.command == "simulate" || c.command == "zinfty") && c.samples < 2)
    throw std::invalid_argument("--samples must be at least 2");
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    validate(config);
    const auto start = std::chrono::steady_clock::now();
    Document d = dispatch(config);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::ofstream file;
    std::ostream* sink = &out;
    if (!config.out_path.empty()) {
      file.open(config.out_path);
      if (!file) throw std::runtime_error("cannot open " + config.out_path);
      sink = &file;
    }
    const std::string output = config.output.empty() ? default_output(config.command)
                                                      : config.output;
    if (output == "json") {
      d.body["schema"] = 1;
      d.body["command"] = config.command;
      d.body["elapsed_seconds"] = elapsed;
      d.body["version"] = kVersion;
      *sink << d.body.dump(2) << '\n';
    } else {
      for (const auto& line : d.csv) *sink << line << '\n';
    }
    if (config.command == "selftest" && !d.body["passed"].get<bool>()) {
      err << "selftest: " << d.body["failures"].get<std::size_t>() << " of "
          << d.body["cases"].get<std::size_t>() << " cases disagree\n";
      return kExitComputation;
    }
    return kExitOk;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitComputation;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitComputation;
  }
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Moments of characteristic polynomials of random permutation matrices"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  RunConfig config;
  config.threads = threads_from_env();
  std::vector<std::string> x_text, s_text;
  std::string seed_text;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--output", config.output, "json or csv");
    sub->add_option("--out", config.out_path, "write the document to this file");
  };
  auto add_query = [&](CLI::App* sub) {
    sub->add_option("--n", config.n, "matrix size");
    sub->add_option("--x", x_text, "point: re,im or polar:r,phi (repeatable)");
    sub->add_option("--s", s_text, "exponent: re[,im] (repeatable)");
    sub->add_option("--method", config.method, "evaluation method");
  };
  auto add_mc = [&](CLI::App* sub) {
    sub->add_option("--samples", config.samples, "Monte Carlo draws");
    sub->add_option("--seed", seed_text, "RNG seed");
    sub->add_option("--threads", config.threads, "worker threads");
  };

  std::vector<CLI::App*> subs;
  const std::map<std::string, std::string> help{
      {"exact", "exact moment by cycle-type sum or determinant average"},
      {"gf", "exact moment as a generating-function coefficient"},
      {"limit", "limit as n grows, for |x| < 1"},
      {"simulate", "Monte Carlo over uniform permutations"},
      {"zinfty", "Monte Carlo of the limiting variable"},
      {"asymptotic", "exact vs predicted growth on the unit circle"},
      {"sweep", "one value per n over a range"},
      {"selftest", "agreement grid between the exact methods"}};
  for (const auto& name : kCommands) {
    auto* sub = app.add_subcommand(name, help.at(name));
    add_common(sub);
    subs.push_back(sub);
  }
  auto sub = [&](const std::string& name) { return app.get_subcommand(name); };
  for (const char* name : {"exact", "gf", "limit", "simulate", "zinfty", "sweep"})
    add_query(sub(name));
  for (const char* name : {"limit", "zinfty"})
    sub(name)->add_option("--tol", config.tol, "truncation tolerance");
  for (const char* name : {"simulate", "zinfty"}) add_mc(sub(name));
  sub("simulate")->add_option("--dump", config.dump_path, "CSV of coupling draws");
  sub("simulate")->add_option("--dump-draws", config.dump_draws, "draws in the dump");
  sub("sweep")->add_option("--n-from", config.n_from, "first n");
  sub("sweep")->add_option("--n-step", config.n_step, "step in n");
  sub("sweep")->add_option("--threads", config.threads, "worker threads");
  sub("asymptotic")->add_option("--n", config.n, "matrix size");
  sub("asymptotic")->add_option("--x", x_text, "point on the unit circle");
  sub("asymptotic")->add_option("--s1", config.s1, "power of Z_n(x)");
  sub("asymptotic")->add_option("--s2", config.s2, "power of Z_n(conj x)");
  sub("selftest")->add_option("--seed", seed_text, "RNG seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    for (auto* s : subs)
      if (s->parsed()) config.command = s->get_name();
    for (const auto& t : x_text) {
      auto z = parse_complex(t);
      if (!z) throw std::invalid_argument("cannot parse point '" + t + "'");
      config.xs.push_back(*z);
    }
    for (const auto& t : s_text) {
      auto z = parse_complex(t);
      if (!z || t.starts_with("polar:")) throw std::invalid_argument("cannot parse exponent '" + t + "'");
      config.ss.push_back(*z);
    }
    if (!seed_text.empty()) {
      std::size_t used = 0;
      config.seed = std::stoull(seed_text, &used, 0);
      if (used != seed_text.size()) throw std::invalid_argument("bad --seed");
    }
  } catch (const std::exception& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitValidation;
  }
  return run(config, out, err);
}

}  // namespace permoments::cli
