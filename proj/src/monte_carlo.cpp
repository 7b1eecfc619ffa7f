#include "heatlab/monte_carlo.hpp"

#include <algorithm>
#include <cmath>

#include "heatlab/error.hpp"
#include "heatlab/parallel.hpp"

namespace heatlab {

SplitMix64 SplitMix64::for_trial(std::uint64_t seed, std::uint64_t trial) noexcept {
  SplitMix64 mix(seed);
  std::uint64_t base = mix.next();
  SplitMix64 t(base ^ (trial * 0xD1B54A32D192ED03ULL));
  t.next();
  return t;
}

std::uint64_t SplitMix64::next() noexcept {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

WalkSampler::WalkSampler(const WeightedGraph& g) : g_(&g) {
  offsets_.reserve(static_cast<std::size_t>(g.vertex_count()) + 1);
  offsets_.push_back(0);
  for (Vertex x = 0; x < g.vertex_count(); ++x) {
    double acc = 0.0;
    for (const auto& nb : g.neighbors(x)) {
      acc += nb.weight / g.measure(x);
      cumulative_.push_back(acc);
    }
    cumulative_.back() = 1.0;
    offsets_.push_back(static_cast<int>(cumulative_.size()));
  }
}

Vertex WalkSampler::step(Vertex x, SplitMix64& rng) const {
  const double u = rng.uniform();
  auto first = cumulative_.begin() + offsets_[x], last = cumulative_.begin() + offsets_[x + 1];
  auto it = std::upper_bound(first, last, u);
  if (it == last) --it;
  return g_->neighbors(x)[static_cast<std::size_t>(it - first)].id;
}

double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  std::size_t h = n / 2;
  return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

double McEstimate::three_sigma() const noexcept {
  return trials > 0 ? 3.0 * stddev / std::sqrt(static_cast<double>(trials)) : 0.0;
}

nlohmann::json to_json(const McEstimate& e) {
  return {{"quantity", e.quantity}, {"estimate", e.estimate}, {"half_width", e.half_width},
          {"stddev", e.stddev},     {"trials", e.trials},     {"seed", e.seed}};
}

nlohmann::json to_json(const McExitSite& e) {
  return {{"boundary", e.boundary}, {"counts", e.counts}, {"frequency", e.frequency},
          {"half_width", e.half_width}, {"trials", e.trials}, {"seed", e.seed}};
}

namespace {

void check_trials(long trials) {
  if (trials < 100) throw Error(ErrorCode::UsageError, "Monte Carlo needs at least 100 trials");
}

int workers(int threads) { return threads > 0 ? threads : default_thread_count(); }

McEstimate summarize(std::string quantity, const std::vector<double>& samples, std::uint64_t seed) {
  McEstimate e;
  e.quantity = std::move(quantity);
  e.trials = static_cast<long>(samples.size());
  e.seed = seed;
  const double n = static_cast<double>(samples.size());
  e.estimate = pairwise_sum(samples.data(), samples.size()) / n;
  std::vector<double> dev(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) dev[i] = (samples[i] - e.estimate) * (samples[i] - e.estimate);
  e.stddev = samples.size() > 1 ? std::sqrt(pairwise_sum(dev.data(), dev.size()) / (n - 1)) : 0.0;
  e.half_width = 1.96 * e.stddev / std::sqrt(n);
  return e;
}

void check_vertex(const WeightedGraph& g, Vertex v) {
  if (!g.contains(v)) throw Error(ErrorCode::InvalidVertex, "vertex out of range");
}

}  // namespace

McEstimate mc_exit_time(const WeightedGraph& g, Vertex x, int R, long trials, std::uint64_t seed,
                        int threads) {
  check_trials(trials);
  check_vertex(g, x);
  if (R < 1) throw Error(ErrorCode::RadiusOrderViolation, "radius must be positive");
  auto dist = distances_from(g, x, R);
  WalkSampler walk(g);
  std::vector<double> samples(static_cast<std::size_t>(trials));
  parallel_for(samples.size(), workers(threads), [&](std::size_t t) {
    auto rng = SplitMix64::for_trial(seed, t);
    Vertex v = x;
    long k = 0;
    while (dist[v] >= 0 && dist[v] < R) {
      v = walk.step(v, rng);
      ++k;
    }
    samples[t] = static_cast<double>(k);
  });
  return summarize("exit_time", samples, seed);
}

McExitSite mc_exit_site(const WeightedGraph& g, Vertex x, int R, long trials, std::uint64_t seed,
                        int threads) {
  check_trials(trials);
  check_vertex(g, x);
  if (R < 1) throw Error(ErrorCode::RadiusOrderViolation, "radius must be positive");
  auto dist = distances_from(g, x, R);
  WalkSampler walk(g);
  std::vector<Vertex> site(static_cast<std::size_t>(trials));
  parallel_for(site.size(), workers(threads), [&](std::size_t t) {
    auto rng = SplitMix64::for_trial(seed, t);
    Vertex v = x;
    while (dist[v] >= 0 && dist[v] < R) v = walk.step(v, rng);
    site[t] = v;
  });
  McExitSite out;
  out.trials = trials;
  out.seed = seed;
  for (Vertex v = 0; v < g.vertex_count(); ++v)
    if (dist[v] == R) out.boundary.push_back(v);
  out.counts.assign(out.boundary.size(), 0);
  for (Vertex v : site) {
    auto it = std::lower_bound(out.boundary.begin(), out.boundary.end(), v);
    ++out.counts[static_cast<std::size_t>(it - out.boundary.begin())];
  }
  for (long c : out.counts) {
    double p = static_cast<double>(c) / trials;
    out.frequency.push_back(p);
    out.half_width.push_back(1.96 * std::sqrt(p * (1 - p) * trials / (trials - 1.0)) / std::sqrt(double(trials)));
  }
  return out;
}

McEstimate mc_kernel(const WeightedGraph& g, Vertex x, Vertex y, long n, long trials, std::uint64_t seed,
                     int threads) {
  check_trials(trials);
  check_vertex(g, x);
  check_vertex(g, y);
  if (n < 0) throw Error(ErrorCode::TimeMismatch, "time must be nonnegative");
  WalkSampler walk(g);
  const double inv_mu = 1.0 / g.measure(y);
  std::vector<double> samples(static_cast<std::size_t>(trials));
  parallel_for(samples.size(), workers(threads), [&](std::size_t t) {
    auto rng = SplitMix64::for_trial(seed, t);
    Vertex v = x;
    for (long k = 0; k < n; ++k) v = walk.step(v, rng);
    double hits = v == y ? 1.0 : 0.0;
    v = walk.step(v, rng);
    if (v == y) hits += 1.0;
    samples[t] = hits * inv_mu;
  });
  return summarize("kernel_tilde", samples, seed);
}

}  // namespace heatlab
