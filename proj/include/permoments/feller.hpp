#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <ostream>
#include <vector>

#include "permoments/moment_query.hpp"
#include "permoments/rng.hpp"

namespace permoments {

// One draw of the Feller coupling. A single Bernoulli sequence xi with
// P(xi_t = 1) = 1/t gives C_m (m-spacings of 1 xi_2 ... xi_n 1) and Y_m
// (m-spacings of the whole sequence) on the same probability space.
struct CoupledCounts {
  int n = 0;
  int max_length = 0;  // M: C and Y are tracked for m = 1..M
  // Y counts the spacings whose left end lies at or before this position.
  std::int64_t horizon = 0;
  std::vector<int> c;  // c[m-1] = C_m^{(n)}
  std::vector<int> y;  // y[m-1] = Y_m (truncated at horizon)
  // The unique m with xi_{n+1-m} = 1 and xi_{n+2-m} = ... = xi_{n+1} = 0,
  // if any. It may exceed max_length.
  std::optional<int> boundary;

  int cycles(int m) const { return c[m - 1]; }
  int spacings(int m) const { return y[m - 1]; }
};

// Positions of the ones of xi, generated by jumping: after a one at i the
// next one is at floor(i / U) + 1, U uniform on (0, 1], because
// P(no one in i+1..j) = i / j.
class FellerSequence {
 public:
  explicit FellerSequence(Rng& rng) : rng_(rng) {}

  // Position of the next one (the first call returns 1).
  std::int64_t next_one();

 private:
  Rng& rng_;
  std::int64_t last_ = 0;
};

// Draws one coupled (C, Y) pair. Requires 1 <= M <= n and horizon >= n;
// xi_{n+1} is always drawn, whatever the horizon.
CoupledCounts simulate_coupling(int n, int max_length, std::int64_t horizon,
                                Rng& rng);

// Cycle counts of a uniform random permutation of n: result[m] = C_m for
// m = 1..n (result[0] is 0).
std::vector<int> sample_cycle_counts(int n, Rng& rng);

struct MonteCarloEstimate {
  cplx mean;
  // Max over real and imaginary parts of sample stddev / sqrt(samples).
  double std_error = 0.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
};

struct MonteCarloOptions {
  std::size_t samples = 100000;
  std::uint64_t seed = kDefaultSeed;
  // Worker threads; 0 uses std::thread::hardware_concurrency(). The result
  // does not depend on this value.
  unsigned threads = 1;
  // Draws per RNG stream. Chunk i uses stream i; chunk results are reduced in
  // chunk order.
  std::size_t chunk = 4096;
};

// Z_n^s(x) = prod_m (1 - x^m)^{s C_m} for a given cycle-count vector
// (indexed as returned by sample_cycle_counts).
cplx z_from_cycle_counts(const std::vector<int>& counts,
                         std::span<const cplx> xs, std::span<const cplx> ss);

// Monte Carlo estimate of E[Z_n^s(x)] from independent uniform
// permutations. Complex exponents need ||x|| < 1, integer ones ||x|| <= 1.
MonteCarloEstimate mc_moment(const MomentQuery& q,
                             const MonteCarloOptions& opts = {});

// Truncation point M for Z_infty: the smallest M with
// |s| * c * sum_{m>M} |x|^m / m < tol, c = 4 / (1 - |x|).
int z_infty_truncation(cplx x, cplx s, double tol);

// One draw of prod_{m<=M} (1 - x^m)^{s Y_m} with independent
// Y_m ~ Poisson(1/m). Requires |x| < 1.
cplx sample_z_infty(cplx x, cplx s, double tol, Rng& rng);

MonteCarloEstimate mc_z_infty(cplx x, cplx s, double tol,
                              const MonteCarloOptions& opts = {});

struct CouplingReport {
  struct Row {
    int n = 0;
    double mismatch = 0.0;  // P((C_1..C_b) != (Y_1..Y_b))
    double mismatch_stderr = 0.0;
  };
  struct PoissonRow {
    int m = 0;
    double mean = 0.0;
    double mean_stderr = 0.0;
    double variance = 0.0;
  };
  int b = 0;
  std::size_t samples = 0;
  std::int64_t horizon = 0;
  std::vector<Row> rows;
  std::vector<PoissonRow> poisson;  // Y_m for m = 1..b, from the last n
};

// Empirical mismatch probability for each n in `ns`, and mean/variance of
// Y_m against 1/m. horizon = 0 uses 8 * n.
CouplingReport coupling_distribution_check(const std::vector<int>& ns, int b,
                                           std::size_t samples,
                                           std::uint64_t seed = kDefaultSeed,
                                           std::int64_t horizon = 0);

// CSV dump of coupling draws: draw,m,C_m,Y_m,B (B empty when no boundary
// event occurred).
void write_coupling_csv(std::ostream& out,
                        const std::vector<CoupledCounts>& draws);

}  // namespace permoments
