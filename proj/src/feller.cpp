#include "permoments/feller.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "permoments/errors.hpp"

namespace permoments {

std::int64_t FellerSequence::next_one() {
  if (last_ == 0) {
    last_ = 1;
    return last_;
  }
  constexpr double kMaxPosition = 4.0e18;
  const double jump = std::floor(static_cast<double>(last_) / rng_.uniform_open_left());
  last_ = jump >= kMaxPosition ? static_cast<std::int64_t>(kMaxPosition)
                               : static_cast<std::int64_t>(jump) + 1;
  return last_;
}

CoupledCounts simulate_coupling(int n, int max_length, std::int64_t horizon,
                                Rng& rng) {
  if (n < 1) throw std::invalid_argument("simulate_coupling needs n >= 1");
  if (max_length < 1 || max_length > n)
    throw std::invalid_argument("simulate_coupling needs 1 <= M <= n");
  if (horizon < n)
    throw std::invalid_argument("simulate_coupling needs horizon >= n");

  CoupledCounts out;
  out.n = n;
  out.max_length = max_length;
  out.horizon = horizon;
  out.c.assign(max_length, 0);
  out.y.assign(max_length, 0);
  auto bump = [max_length](std::vector<int>& counts, std::int64_t length) {
    if (length <= max_length) ++counts[length - 1];
  };

  FellerSequence seq(rng);
  std::int64_t prev = seq.next_one();
  // Spacings are visited while the left end is within the C window or the
  // horizon; the right end of the last one may lie beyond the horizon.
  while (prev <= std::max<std::int64_t>(n, horizon)) {
    const std::int64_t next = seq.next_one();
    if (prev <= n) {
      if (next <= n) {
        bump(out.c, next - prev);
      } else {
        // 1 xi_2 ... xi_n 1: the final spacing closes at the forced one.
        const std::int64_t closing = n + 1 - prev;
        bump(out.c, closing);
        if (next != n + 1) out.boundary = static_cast<int>(closing);
      }
    }
    if (prev <= horizon) bump(out.y, next - prev);
    prev = next;
  }
  return out;
}

std::vector<int> sample_cycle_counts(int n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("sample_cycle_counts needs n >= 1");
  std::vector<int> counts(n + 1, 0);
  FellerSequence seq(rng);
  std::int64_t prev = seq.next_one();
  while (true) {
    const std::int64_t next = seq.next_one();
    if (next > n) {
      ++counts[n + 1 - prev];
      break;
    }
    ++counts[next - prev];
    prev = next;
  }
  return counts;
}

cplx z_from_cycle_counts(const std::vector<int>& counts,
                         std::span<const cplx> xs, std::span<const cplx> ss) {
  cplx value = 1.0;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    const auto k = as_nonnegative_integer(ss[j]);
    cplx log_sum = 0.0;
    for (std::size_t m = 1; m < counts.size(); ++m) {
      if (counts[m] == 0) continue;
      const cplx w = 1.0 - int_pow(xs[j], static_cast<long long>(m));
      if (k)
        value *= int_pow(w, static_cast<long long>(*k) * counts[m]);
      else
        log_sum += static_cast<double>(counts[m]) * std::log(w);
    }
    if (!k) value *= std::exp(ss[j] * log_sum);
  }
  return value;
}

namespace {

// Running mean and M2 for the real and imaginary parts.
struct Moments {
  std::size_t count = 0;
  cplx mean = 0.0;
  double m2_re = 0.0;
  double m2_im = 0.0;

  void add(cplx v) {
    ++count;
    const cplx delta = v - mean;
    mean += delta / static_cast<double>(count);
    const cplx delta2 = v - mean;
    m2_re += delta.real() * delta2.real();
    m2_im += delta.imag() * delta2.imag();
  }

  void merge(const Moments& o) {
    if (o.count == 0) return;
    const double total = static_cast<double>(count + o.count);
    const cplx delta = o.mean - mean;
    const double wa = static_cast<double>(count), wb = static_cast<double>(o.count);
    mean += delta * (wb / total);
    m2_re += o.m2_re + delta.real() * delta.real() * wa * wb / total;
    m2_im += o.m2_im + delta.imag() * delta.imag() * wa * wb / total;
    count += o.count;
  }
};

template <class Draw>
MonteCarloEstimate run_chunks(const MonteCarloOptions& opts, Draw draw) {
  if (opts.samples == 0) throw std::invalid_argument("need at least one sample");
  const std::size_t chunk = std::max<std::size_t>(opts.chunk, 1);
  const std::size_t chunks = (opts.samples + chunk - 1) / chunk;
  std::vector<Moments> partial(chunks);

  auto work = [&](std::size_t index) {
    Rng rng(opts.seed, index);
    const std::size_t begin = index * chunk;
    const std::size_t end = std::min(opts.samples, begin + chunk);
    Moments m;
    for (std::size_t i = begin; i < end; ++i) m.add(draw(rng));
    partial[index] = m;
  };

  unsigned threads = opts.threads == 0 ? std::thread::hardware_concurrency()
                                       : opts.threads;
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(chunks)));
  if (threads == 1) {
    for (std::size_t i = 0; i < chunks; ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < chunks;) work(i);
      });
  }

  Moments total;
  for (const auto& m : partial) total.merge(m);
  MonteCarloEstimate est;
  est.mean = total.mean;
  est.samples = total.count;
  est.seed = opts.seed;
  if (total.count > 1) {
    const double denom = static_cast<double>(total.count - 1);
    const double sd = std::sqrt(std::max(total.m2_re, total.m2_im) / denom);
    est.std_error = sd / std::sqrt(static_cast<double>(total.count));
  }
  return est;
}

}  // namespace

MonteCarloEstimate mc_moment(const MomentQuery& q,
                             const MonteCarloOptions& opts) {
  q.validate();
  const bool integer = q.is_integer();
  if (integer ? q.norm() > 1.0 + 1e-12 : q.norm() >= 1.0)
    throw DomainError(integer ? "integer exponents need ||x|| <= 1"
                              : "complex exponents need ||x|| < 1");
  if (q.n == 0) {
    MonteCarloEstimate est;
    est.mean = 1.0;
    est.samples = opts.samples;
    est.seed = opts.seed;
    return est;
  }
  const int n = static_cast<int>(q.n);
  return run_chunks(opts, [&](Rng& rng) {
    return z_from_cycle_counts(sample_cycle_counts(n, rng), q.xs, q.ss);
  });
}

int z_infty_truncation(cplx x, cplx s, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  const double r = std::abs(x);
  if (r >= 1.0) throw DomainError("Z_infty needs |x| < 1");
  if (r == 0.0 || std::abs(s) == 0.0) return 0;
  const double c = 4.0 / (1.0 - r);
  // sum_{m>M} r^m / m <= r^{M+1} / ((M+1)(1-r))
  for (int m = 0; m < 1'000'000; ++m) {
    const double tail = std::abs(s) * c * std::pow(r, m + 1) / ((m + 1) * (1.0 - r));
    if (tail < tol) return m;
  }
  throw DomainError("Z_infty truncation did not reach the tolerance");
}

cplx sample_z_infty(cplx x, cplx s, double tol, Rng& rng) {
  const int cutoff = z_infty_truncation(x, s, tol);
  cplx log_sum = 0.0;
  cplx power = 1.0;
  for (int m = 1; m <= cutoff; ++m) {
    power *= x;
    const int y = rng.poisson(1.0 / m);
    if (y > 0) log_sum += static_cast<double>(y) * std::log(1.0 - power);
  }
  return std::exp(s * log_sum);
}

MonteCarloEstimate mc_z_infty(cplx x, cplx s, double tol,
                              const MonteCarloOptions& opts) {
  z_infty_truncation(x, s, tol);  // validates
  return run_chunks(opts, [&](Rng& rng) { return sample_z_infty(x, s, tol, rng); });
}

CouplingReport coupling_distribution_check(const std::vector<int>& ns, int b,
                                           std::size_t samples,
                                           std::uint64_t seed,
                                           std::int64_t horizon) {
  if (ns.empty()) throw std::invalid_argument("need at least one n");
  if (samples < 2) throw std::invalid_argument("need at least two samples");
  CouplingReport report;
  report.b = b;
  report.samples = samples;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const int n = ns[i];
    if (b < 1 || b > n) throw std::invalid_argument("need 1 <= b <= n");
    const std::int64_t h = horizon > 0 ? std::max<std::int64_t>(horizon, n) : 8LL * n;
    report.horizon = h;
    Rng rng(seed, i);
    std::size_t mismatches = 0;
    std::vector<Moments> ym(b);
    for (std::size_t d = 0; d < samples; ++d) {
      const auto cc = simulate_coupling(n, b, h, rng);
      if (cc.c != cc.y) ++mismatches;
      for (int m = 0; m < b; ++m) ym[m].add(static_cast<double>(cc.y[m]));
    }
    const double p = static_cast<double>(mismatches) / samples;
    report.rows.push_back({n, p, std::sqrt(p * (1.0 - p) / samples)});
    if (i + 1 == ns.size()) {
      for (int m = 0; m < b; ++m) {
        const double var = ym[m].m2_re / static_cast<double>(samples - 1);
        report.poisson.push_back(
            {m + 1, ym[m].mean.real(), std::sqrt(var / samples), var});
      }
    }
  }
  return report;
}

void write_coupling_csv(std::ostream& out,
                        const std::vector<CoupledCounts>& draws) {
  out << "draw,m,C_m,Y_m,B\n";
  for (std::size_t d = 0; d < draws.size(); ++d) {
    const auto& cc = draws[d];
    for (int m = 1; m <= cc.max_length; ++m) {
      out << d << ',' << m << ',' << cc.cycles(m) << ',' << cc.spacings(m) << ',';
      if (cc.boundary) out << *cc.boundary;
      out << '\n';
    }
  }
}

}  // namespace permoments
