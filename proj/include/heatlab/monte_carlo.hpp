#ifndef HEATLAB_MONTE_CARLO_HPP
#define HEATLAB_MONTE_CARLO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "heatlab/graph.hpp"

namespace heatlab {

/// SplitMix64; one independent stream per (seed, trial).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t state) noexcept : state_(state) {}
  static SplitMix64 for_trial(std::uint64_t seed, std::uint64_t trial) noexcept;

  std::uint64_t next() noexcept;
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

/// Per-vertex cumulative transition tables for sampling X_{k+1} given X_k.
class WalkSampler {
 public:
  explicit WalkSampler(const WeightedGraph& g);
  Vertex step(Vertex x, SplitMix64& rng) const;

 private:
  const WeightedGraph* g_;
  std::vector<double> cumulative_;  // aligned with the CSR neighbour array
  std::vector<int> offsets_;
};

struct McEstimate {
  std::string quantity;
  double estimate = 0.0;
  double half_width = 0.0;  ///< 1.96 sd / sqrt(trials)
  double stddev = 0.0;
  long trials = 0;
  std::uint64_t seed = 0;

  /// 3 sd / sqrt(trials).
  double three_sigma() const noexcept;
};

nlohmann::json to_json(const McEstimate& e);

/// Mean of T_{B(x,R)} = min{k : X_k outside B(x,R)} started at x.
McEstimate mc_exit_time(const WeightedGraph& g, Vertex x, int R, long trials, std::uint64_t seed,
                        int threads = 0);

struct McExitSite {
  std::vector<Vertex> boundary;   ///< dB(x,R), sorted
  std::vector<long> counts;
  std::vector<double> frequency;
  std::vector<double> half_width;
  long trials = 0;
  std::uint64_t seed = 0;
};

nlohmann::json to_json(const McExitSite& e);

McExitSite mc_exit_site(const WeightedGraph& g, Vertex x, int R, long trials, std::uint64_t seed,
                        int threads = 0);

/// p~_n(x,y): the frequency of X_n = y plus that of X_{n+1} = y, over mu(y).
McEstimate mc_kernel(const WeightedGraph& g, Vertex x, Vertex y, long n, long trials, std::uint64_t seed,
                     int threads = 0);

/// Pairwise (cascade) summation.
double pairwise_sum(const double* v, std::size_t n);

}  // namespace heatlab

#endif  // HEATLAB_MONTE_CARLO_HPP
