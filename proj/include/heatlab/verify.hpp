#ifndef HEATLAB_VERIFY_HPP
#define HEATLAB_VERIFY_HPP

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "json.hpp"

#include "heatlab/graph.hpp"
#include "heatlab/potential_theory.hpp"
#include "heatlab/scaling_laws.hpp"

namespace heatlab {

enum class Verdict { HoldsStably, Drifts, Fails };
std::string_view to_string(Verdict v) noexcept;
Verdict verdict_from_string(const std::string& s);

/// Upper: the constant must stay bounded. Lower: bounded away from zero.
/// TwoSided: a ratio that must stay inside [1/C, C].
enum class BoundKind { Upper, Lower, TwoSided };
std::string_view to_string(BoundKind k) noexcept;

struct VerifierConfig {
  std::vector<Vertex> centers;  ///< explicit sample centers; empty selects automatically
  int center_count = 1;
  int center_spacing = 4;
  std::vector<int> radii{4, 8, 16, 32};
  std::vector<int> parabolic_radii{4, 8, 16};
  std::vector<long> kernel_times{16, 24, 32, 48, 64, 96, 128, 192, 256, 400};

  std::array<double, 5> pmv_c{0.125, 0.25, 0.5, 0.75, 1.0};
  double pmv_delta = 1.0;
  std::array<double, 5> psmv_c{0.0625, 0.125, 0.1875, 0.25, 0.25};
  double psmv_delta = 0.25;
  double psmv_epsilon = 0.25;
  double ndle_delta = 0.25;
  double ple_delta = 0.25;
  double ple_epsilon = 0.25;
  int tc_layer_samples = 4;  ///< vertices taken from each sampled layer of B(x,R)

  double q = 1.0 / 16.0;
  double Cl = 2.0;

  double stability_factor = 2.0;
  double blowup_factor = 4.0;
  double ue_headroom = 2.0;  ///< C in (UE) is this multiple of the largest p~V seen
  double witness_tolerance = 1e-9;

  SolverOptions solver;
  int threads = 0;  ///< 0 reads HEATLAB_THREADS

  /// Throws ConfigOrderViolation on any broken ordering or range constraint.
  void validate() const;
};

nlohmann::json to_json(const VerifierConfig& cfg);
/// Keys present in `j` override `base`.
VerifierConfig config_from_json(const nlohmann::json& j, VerifierConfig base = {});

/// One (condition, x, R) evaluation. Kernel-time conditions also set `n`.
struct CellResult {
  std::string condition;
  Vertex x = 0;
  int R = 0;
  long n = 0;
  double value = 0.0;
  std::map<std::string, double> aux;
  bool skipped = false;
  std::string note;
};

struct ConditionReport {
  std::string name;
  BoundKind kind = BoundKind::Upper;
  std::string axis = "R";  ///< "R" or "n"
  std::string grid;
  std::vector<CellResult> samples;
  double constant = 0.0;
  CellResult witness;
  std::vector<std::pair<long, double>> stability_curve;
  Verdict verdict = Verdict::Fails;
  std::string direction;  ///< which function class the constant is exact for
  std::map<std::string, double> extras;
  std::map<std::string, double> parameters;  ///< shared inputs each cell used
  std::vector<std::string> notes;
  int skipped = 0;
};

nlohmann::json to_json(const CellResult& c);
nlohmann::json to_json(const ConditionReport& r);
ConditionReport report_from_json(const nlohmann::json& j);

/// Shared read-only inputs of the cell functions.
struct VerifyContext {
  const WeightedGraph& g;
  const ScalingOracle& F;  ///< scaling function used by the conditions
  const ScalingOracle& E;  ///< mean exit times (may be the same oracle as F)
  const VerifierConfig& cfg;
};

/// Cell names: vd tc wtc harnack gf_upper gf_lower er lambda mv due dle ue le
/// ndle ple pmv psmv ph. `params` carries the shared constants a cell needs
/// (beta for ue, beta_prime and c for le, C for ue).
CellResult evaluate_cell(const VerifyContext& ctx, const std::string& cell, Vertex x, int R,
                         long n = 0, const std::map<std::string, double>& params = {});

/// Radius that must be clean around x for the cell to be exact.
int required_clean_radius(const std::string& cell, int R);

/// Verdict from the stability curve alone.
Verdict stability_verdict(const std::vector<std::pair<long, double>>& curve, BoundKind kind,
                          double factor, double blowup);

std::vector<Vertex> select_centers(const WeightedGraph& g, const VerifierConfig& cfg, int need_radius);

/// Runs the named conditions (CLI names: vd tc h gf er due ndle ple le pmv
/// psmv ph mv lambda; each may yield several reports).
struct VerifyOutcome {
  std::vector<ConditionReport> reports;
  std::optional<ScalingExponents> exponents;
  std::vector<std::pair<std::string, std::string>> skipped;  ///< condition, reason
  ScalingTable table;
};

VerifyOutcome verify(const WeightedGraph& g, const std::vector<std::string>& conditions,
                     const VerifierConfig& cfg);

/// Individual verifiers; each evaluates its cells over the configured grid.
std::vector<ConditionReport> verify_vd(const VerifyContext& ctx, std::span<const Vertex> centers);
std::vector<ConditionReport> verify_tc(const VerifyContext& ctx, std::span<const Vertex> centers);
std::vector<ConditionReport> verify_harnack(const VerifyContext& ctx, std::span<const Vertex> centers);
std::vector<ConditionReport> verify_gF(const VerifyContext& ctx, std::span<const Vertex> centers);
std::vector<ConditionReport> verify_einstein(const VerifyContext& ctx, std::span<const Vertex> centers);
std::vector<ConditionReport> verify_lambda_bound(const VerifyContext& ctx, std::span<const Vertex> centers);
std::vector<ConditionReport> verify_mv(const VerifyContext& ctx, std::span<const Vertex> centers);
std::vector<ConditionReport> verify_due_ue(const VerifyContext& ctx, std::span<const Vertex> centers,
                                           const ScalingExponents& exps);
std::vector<ConditionReport> verify_ndle_ple(const VerifyContext& ctx, std::span<const Vertex> centers);
/// Throws NotApplicableBetaPrime when the fitted beta' <= 1.
std::vector<ConditionReport> verify_le(const VerifyContext& ctx, std::span<const Vertex> centers,
                                       const ScalingExponents& exps, double dle_constant);
std::vector<ConditionReport> verify_pmv_psmv(const VerifyContext& ctx, std::span<const Vertex> centers);
std::vector<ConditionReport> verify_ph(const VerifyContext& ctx, std::span<const Vertex> centers);

// Space-time cylinder functionals. `u` has one row per time 0..T and one
// column per position of `region`.

/// Integer times n with a <= n <= b.
std::pair<long, long> closed_times(double a, double b);

struct MeanValueGeometry {
  VertexSet region;        ///< B(x,R)
  VertexSet inner;         ///< B(x,delta R)
  std::pair<long, long> minus;  ///< D- times
  std::pair<long, long> plus;   ///< D+ times
  double nu = 0.0;              ///< number of D- time slices times V(x,delta R)
};

MeanValueGeometry pmv_geometry(const WeightedGraph& g, Vertex x, int R, double F,
                               const std::array<double, 5>& c, double delta);

/// max_{D+} u * nu(D-) / sum_{D-} u mu.
double pmv_ratio(const WeightedGraph& g, const MeanValueGeometry& geo, const Eigen::MatrixXd& u);
/// min_{D+} u~ * nu(D-) / sum_{D-} u~ mu; needs rows up to plus.second + 1.
double psmv_ratio(const WeightedGraph& g, const MeanValueGeometry& geo, const Eigen::MatrixXd& u);

struct HarnackGeometry {
  VertexSet region;  ///< B(x,2R)
  VertexSet inner;   ///< B(x,R)
  std::pair<long, long> minus;  ///< [F/4, F/2]
  std::pair<long, long> plus;   ///< [3F/4, F)
  long final_time = 0;          ///< ceil(F)
};

HarnackGeometry ph_geometry(const WeightedGraph& g, Vertex x, int R, double F);

/// The pair constraint d(x-,x+) <= n+ - n-.
constexpr bool smdist_admissible(int d, long n_minus, long n_plus) noexcept {
  return n_plus > n_minus && d <= n_plus - n_minus;
}

/// max over admissible pairs of u_{n-}(x-) / u~_{n+}(x+); u indexed by region.
double ph_ratio(const WeightedGraph& g, const HarnackGeometry& geo, const Eigen::MatrixXd& u);

struct CoherenceGroup {
  std::string name;
  std::vector<std::string> members;
  bool present = false;
  Verdict verdict = Verdict::Fails;
};

struct Coherence {
  std::vector<CoherenceGroup> groups;
  bool coherent = true;  ///< every present group shares one verdict
  std::vector<std::string> flags;
};

Coherence coherence(const std::vector<ConditionReport>& reports);
nlohmann::json to_json(const Coherence& c);

}  // namespace heatlab

#endif  // HEATLAB_VERIFY_HPP
