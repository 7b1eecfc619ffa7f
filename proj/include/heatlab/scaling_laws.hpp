#ifndef HEATLAB_SCALING_LAWS_HPP
#define HEATLAB_SCALING_LAWS_HPP

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "heatlab/graph.hpp"
#include "heatlab/potential_theory.hpp"

namespace heatlab {

enum class ScalingSource { ExitTime, RhoV, User };

std::string_view to_string(ScalingSource s) noexcept;
ScalingSource scaling_source_from_string(const std::string& name);

struct MonotonicityViolation {
  Vertex center = 0;
  int radius = 0;       ///< F(center, radius) <= F(center, radius - 1)
  double previous = 0.0;
  double value = 0.0;
};

/// F(x,R) for a set of sample centers. Rows are indexed by R - 1; radii that
/// were never tabulated hold NaN.
class ScalingTable {
 public:
  ScalingSource source = ScalingSource::User;

  const std::map<Vertex, std::vector<double>>& rows() const noexcept { return rows_; }
  std::vector<Vertex> centers() const;

  void set(Vertex x, int R, double value);
  bool has(Vertex x, int R) const;
  /// F(x,0) = 0 by convention; throws OutOfTabulatedRange when missing.
  double value(Vertex x, int R) const;
  /// Largest R such that F(x,1..R) are all tabulated (0 if none).
  int contiguous_radius(Vertex x) const;

  /// Scans every row and records places where F fails to increase strictly.
  /// Values are never altered.
  void check_monotone();
  bool monotone_completed() const noexcept { return completed_; }
  const std::vector<MonotonicityViolation>& violations() const noexcept { return violations_; }

 private:
  std::map<Vertex, std::vector<double>> rows_;
  std::vector<MonotonicityViolation> violations_;
  bool completed_ = false;
};

/// E(x,R) (exit time) or rho(x,R,2R) v(x,R,2R).
double scaling_value(const WeightedGraph& g, ScalingSource source, Vertex x, int R,
                     SolverOptions options = {});

ScalingTable build_scaling_table(const WeightedGraph& g, ScalingSource source,
                                 std::span<const Vertex> centers, std::span<const int> radii,
                                 SolverOptions options = {}, int threads = 1);

/// V(x,R) on the same layout, for fit_exponents.
ScalingTable build_volume_table(const WeightedGraph& g, std::span<const Vertex> centers,
                                std::span<const int> radii);

/// Table filled on demand from solves; safe to share between threads.
class ScalingOracle {
 public:
  ScalingOracle(const WeightedGraph& g, ScalingSource source, SolverOptions options = {});
  /// Seeds the cache with precomputed values.
  ScalingOracle(const WeightedGraph& g, ScalingTable seed, SolverOptions options = {});

  double F(Vertex x, int R) const;
  /// f(x,n) = min{R : F(x,R) >= n}. Uses monotonicity of F in R; radii are
  /// capped so the ball stays a proper subset of the graph.
  int inverse(Vertex x, double n) const;
  ScalingTable snapshot() const;
  const WeightedGraph& graph() const noexcept { return *g_; }

 private:
  const WeightedGraph* g_;
  SolverOptions options_;
  mutable std::mutex mutex_;
  mutable ScalingTable cache_;
};

/// Exact generalized inverse on a tabulated row by binary search.
int inverse_scaling(const ScalingTable& table, Vertex x, double n);

enum class WClass { NotW0, W0, W1 };
std::string_view to_string(WClass w) noexcept;

struct ScalingExponents {
  double beta = 0.0;
  double beta_prime = 0.0;
  double c_F = 0.0;
  double C_F = 0.0;
  double alpha = 0.0;
  double alpha_prime = 0.0;
  double quadratic_c = 0.0;   ///< min F(x,R)/R^2 on the grid
  double ls_beta = 0.0;       ///< least-squares slope, diagnostic
  double ls_alpha = 0.0;
  std::vector<int> grid;
  int centers_used = 0;
  int pairs = 0;
  WClass verdict = WClass::NotW0;
};

/// Worst-pair exponents: beta/beta' are the extreme same-center log slopes
/// over grid pairs r < R; c_F/C_F the extreme constants over pairs
/// (x,R), (y,r) with r <= R and y in B(x,R) (only y = x without a graph).
ScalingExponents fit_exponents(const ScalingTable& F, const ScalingTable& volumes,
                               std::span<const int> grid, const WeightedGraph* g = nullptr);

nlohmann::json to_json(const ScalingExponents& e);

/// r -> F-like value; must return 0 at r = 0.
using RadiusFunction = std::function<double(int)>;

/// Maximal k with n/k <= q min_F(floor(R/k)); 1 when none.
int sub_gaussian_k(const RadiusFunction& min_F, long n, int R, double q);
/// Minimal l in [1,n] with n/l >= C F(ceil(R/l)); n when none.
int sub_gaussian_l(const RadiusFunction& F, long n, int R, double C);
/// Maximal l in [1,n] with n/l >= C max_F(ceil(R/l)); n when none.
int sub_gaussian_l_set(const RadiusFunction& max_F, long n, int R, double C);

/// Table forms. The min/max over y in B(x,R) runs over the table centers in
/// that ball (x included); global_m uses every interior center.
int sub_gaussian_k(const ScalingTable& table, const WeightedGraph& g, Vertex x, long n, int R,
                   double q);
int sub_gaussian_l(const ScalingTable& table, Vertex x, long n, int R, double C);
int sub_gaussian_l_set(const ScalingTable& table, std::span<const Vertex> A, long n, int R,
                       double C);
int global_m(const ScalingTable& table, const WeightedGraph& g, long n, int R, double q);

void write_table_csv(const ScalingTable& t, std::ostream& out);
ScalingTable read_table_csv(std::istream& in);
ScalingTable read_table_csv(const std::filesystem::path& path);
nlohmann::json to_json(const ScalingTable& t);
ScalingTable table_from_json(const nlohmann::json& j);

}  // namespace heatlab

#endif  // HEATLAB_SCALING_LAWS_HPP
