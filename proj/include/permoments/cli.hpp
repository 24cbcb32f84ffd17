#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "permoments/moment_query.hpp"
#include "permoments/rng.hpp"

namespace permoments::cli {

// Exit statuses of run().
inline constexpr int kExitOk = 0;
inline constexpr int kExitComputation = 1;
inline constexpr int kExitValidation = 2;

// Environment variable holding the default worker count.
inline constexpr const char* kThreadsEnv = "PERMOMENTS_THREADS";

struct RunConfig {
  std::string command;  // exact, gf, limit, simulate, zinfty, asymptotic, sweep, selftest
  std::size_t n = 0;
  std::vector<cplx> xs;
  std::vector<cplx> ss;
  std::string method = "auto";
  double tol = 1e-12;
  std::size_t samples = 100000;
  std::uint64_t seed = kDefaultSeed;
  unsigned threads = 1;
  std::string output;    // json or csv; empty picks the command default
  std::string out_path;  // empty writes to the given stream
  // asymptotic
  int s1 = 1;
  int s2 = 0;
  // sweep: n = n_from, n_from + n_step, ..., <= n
  std::size_t n_from = 0;
  std::size_t n_step = 1;
  // simulate: coupling draws written as CSV
  std::string dump_path;
  std::size_t dump_draws = 100;
};

// "re,im", a bare real "re", or "polar:r,phi".
std::optional<cplx> parse_complex(std::string_view text);

// Checks arity and per-command requirements; throws std::invalid_argument.
void validate(const RunConfig& config);

// Runs one command. The document goes to `out` (or config.out_path), one-line
// diagnostics to `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

// Parses argv and calls run().
int main(int argc, const char* const* argv, std::ostream& out,
         std::ostream& err);

}  // namespace permoments::cli
