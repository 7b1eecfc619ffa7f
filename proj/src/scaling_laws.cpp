#include "heatlab/scaling_laws.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "heatlab/error.hpp"
#include "heatlab/parallel.hpp"

namespace heatlab {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

void require_scan_args(long n, int R) {
  if (n < 1 || R < 1) throw Error(ErrorCode::UsageError, "exponent scans need n >= 1 and R >= 1");
}

int ceil_div(int a, int b) { return (a + b - 1) / b; }

}  // namespace

std::string_view to_string(ScalingSource s) noexcept {
  switch (s) {
    case ScalingSource::ExitTime: return "exit_time";
    case ScalingSource::RhoV: return "rho_v";
    case ScalingSource::User: return "user";
  }
  return "user";
}

ScalingSource scaling_source_from_string(const std::string& name) {
  if (name == "exit_time" || name == "exittime") return ScalingSource::ExitTime;
  if (name == "rho_v" || name == "rhov") return ScalingSource::RhoV;
  if (name == "user") return ScalingSource::User;
  throw Error(ErrorCode::UsageError, "unknown scaling source '" + name + "'");
}

std::string_view to_string(WClass w) noexcept {
  switch (w) {
    case WClass::NotW0: return "not-W0";
    case WClass::W0: return "W0";
    case WClass::W1: return "W1";
  }
  return "not-W0";
}

std::vector<Vertex> ScalingTable::centers() const {
  std::vector<Vertex> out;
  for (const auto& [x, row] : rows_) out.push_back(x);
  return out;
}

void ScalingTable::set(Vertex x, int R, double value) {
  if (R < 1) throw Error(ErrorCode::RadiusOrderViolation, "table radii start at 1");
  auto& row = rows_[x];
  if (static_cast<int>(row.size()) < R) row.resize(R, kMissing);
  row[R - 1] = value;
  completed_ = false;
}

bool ScalingTable::has(Vertex x, int R) const {
  if (R == 0) return true;
  auto it = rows_.find(x);
  return R > 0 && it != rows_.end() && R <= static_cast<int>(it->second.size()) &&
         !std::isnan(it->second[R - 1]);
}

double ScalingTable::value(Vertex x, int R) const {
  if (R == 0) return 0.0;
  if (!has(x, R)) {
    std::ostringstream os;
    os << "F(" << x << "," << R << ") is not tabulated";
    throw Error(ErrorCode::OutOfTabulatedRange, os.str());
  }
  return rows_.at(x)[R - 1];
}

int ScalingTable::contiguous_radius(Vertex x) const {
  auto it = rows_.find(x);
  if (it == rows_.end()) return 0;
  int R = 0;
  while (R < static_cast<int>(it->second.size()) && !std::isnan(it->second[R])) ++R;
  return R;
}

void ScalingTable::check_monotone() {
  violations_.clear();
  for (const auto& [x, row] : rows_) {
    double prev = kMissing;
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (std::isnan(row[i])) continue;
      if (!std::isnan(prev) && !(row[i] > prev))
        violations_.push_back({x, static_cast<int>(i) + 1, prev, row[i]});
      prev = row[i];
    }
  }
  completed_ = violations_.empty();
}

double scaling_value(const WeightedGraph& g, ScalingSource source, Vertex x, int R,
                     SolverOptions options) {
  switch (source) {
    case ScalingSource::ExitTime:
      return mean_exit_time(g, x, R, options).at_center;
    case ScalingSource::RhoV: {
      if (R < 1) throw Error(ErrorCode::RadiusOrderViolation, "radius must be positive");
      auto res = annulus_resistance(g, x, R, 2 * R, options);
      return res.resistance * annulus_volume(g, x, R, 2 * R);
    }
    case ScalingSource::User: break;
  }
  throw Error(ErrorCode::UsageError, "user tables cannot be computed from a graph");
}

ScalingTable build_scaling_table(const WeightedGraph& g, ScalingSource source,
                                 std::span<const Vertex> centers, std::span<const int> radii,
                                 SolverOptions options, int threads) {
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (radii[i] <= radii[i - 1])
      throw Error(ErrorCode::RadiusOrderViolation, "table radii must increase");
  std::vector<std::vector<double>> values(centers.size(), std::vector<double>(radii.size()));
  const std::size_t cells = centers.size() * radii.size();
  parallel_for(cells, threads, [&](std::size_t k) {
    std::size_t i = k / radii.size(), j = k % radii.size();
    values[i][j] = scaling_value(g, source, centers[i], radii[j], options);
  });
  ScalingTable t;
  t.source = source;
  for (std::size_t i = 0; i < centers.size(); ++i)
    for (std::size_t j = 0; j < radii.size(); ++j) t.set(centers[i], radii[j], values[i][j]);
  t.check_monotone();
  return t;
}

ScalingTable build_volume_table(const WeightedGraph& g, std::span<const Vertex> centers,
                                std::span<const int> radii) {
  ScalingTable t;
  for (Vertex x : centers)
    for (int R : radii) t.set(x, R, volume(g, x, R));
  t.check_monotone();
  return t;
}

ScalingOracle::ScalingOracle(const WeightedGraph& g, ScalingSource source, SolverOptions options)
    : g_(&g), options_(options) {
  if (source == ScalingSource::User)
    throw Error(ErrorCode::UsageError, "an oracle needs a computable source");
  cache_.source = source;
}

ScalingOracle::ScalingOracle(const WeightedGraph& g, ScalingTable seed, SolverOptions options)
    : g_(&g), options_(options), cache_(std::move(seed)) {}

double ScalingOracle::F(Vertex x, int R) const {
  if (R == 0) return 0.0;
  {
    std::lock_guard lock(mutex_);
    if (cache_.has(x, R)) return cache_.value(x, R);
  }
  double v = scaling_value(*g_, cache_.source, x, R, options_);
  std::lock_guard lock(mutex_);
  cache_.set(x, R, v);
  return v;
}

int ScalingOracle::inverse(Vertex x, double n) const {
  if (n <= 1.0) return 1;
  auto dist = distances_from(*g_, x);
  int ecc = *std::max_element(dist.begin(), dist.end());
  // Largest radius for which the defining solve is on a proper subset.
  int cap = cache_.source == ScalingSource::RhoV ? ecc / 2 : ecc;
  if (cap < 1 || F(x, cap) < n) {
    std::ostringstream os;
    os << "n = " << n << " exceeds F(" << x << ",.) on this graph";
    throw Error(ErrorCode::OutOfTabulatedRange, os.str());
  }
  int lo = 1, hi = 1;  // F(lo) < n <= F(hi) once the bracket is set
  if (F(x, 1) >= n) return 1;
  while (F(x, hi) < n) {
    lo = hi;
    hi = std::min(2 * hi, cap);
  }
  while (hi - lo > 1) {
    int mid = lo + (hi - lo) / 2;
    (F(x, mid) >= n ? hi : lo) = mid;
  }
  return hi;
}

ScalingTable ScalingOracle::snapshot() const {
  std::lock_guard lock(mutex_);
  ScalingTable t = cache_;
  t.check_monotone();
  return t;
}

int inverse_scaling(const ScalingTable& table, Vertex x, double n) {
  if (n <= 0) throw Error(ErrorCode::UsageError, "inverse needs n >= 1");
  int top = table.contiguous_radius(x);
  if (top == 0 || table.value(x, top) < n) {
    std::ostringstream os;
    os << "n = " << n << " exceeds the tabulated F(" << x << ",.)";
    throw Error(ErrorCode::OutOfTabulatedRange, os.str());
  }
  int lo = 0, hi = top;  // F(lo) < n <= F(hi), F(0) = 0
  while (hi - lo > 1) {
    int mid = lo + (hi - lo) / 2;
    (table.value(x, mid) >= n ? hi : lo) = mid;
  }
  return hi;
}

ScalingExponents fit_exponents(const ScalingTable& F, const ScalingTable& volumes,
                               std::span<const int> grid, const WeightedGraph* g) {
  std::vector<int> radii(grid.begin(), grid.end());
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
  if (radii.size() < 3 || radii.front() < 1 || radii.back() < 4 * radii.front())
    throw Error(ErrorCode::InsufficientGrid, "fits need at least three radii spanning two doublings");

  ScalingExponents e;
  e.grid = radii;
  std::vector<Vertex> used;
  for (Vertex x : F.centers()) {
    bool complete = std::all_of(radii.begin(), radii.end(),
                                [&](int R) { return F.has(x, R) && volumes.has(x, R); });
    if (complete) used.push_back(x);
  }
  if (used.empty()) throw Error(ErrorCode::InsufficientGrid, "no center has the whole grid tabulated");
  e.centers_used = static_cast<int>(used.size());

  e.beta = e.alpha = -std::numeric_limits<double>::infinity();
  e.beta_prime = e.alpha_prime = e.quadratic_c = std::numeric_limits<double>::infinity();
  double ls_beta = 0.0, ls_alpha = 0.0;
  for (Vertex x : used) {
    for (std::size_t i = 0; i < radii.size(); ++i) {
      e.quadratic_c = std::min(e.quadratic_c, F.value(x, radii[i]) / (double(radii[i]) * radii[i]));
      for (std::size_t j = i + 1; j < radii.size(); ++j) {
        double lr = std::log(double(radii[j]) / radii[i]);
        double sf = std::log(F.value(x, radii[j]) / F.value(x, radii[i])) / lr;
        double sv = std::log(volumes.value(x, radii[j]) / volumes.value(x, radii[i])) / lr;
        e.beta = std::max(e.beta, sf);
        e.beta_prime = std::min(e.beta_prime, sf);
        e.alpha = std::max(e.alpha, sv);
        e.alpha_prime = std::min(e.alpha_prime, sv);
        ++e.pairs;
      }
    }
    // Least-squares slope of log F and log V against log R.
    double mx = 0, mf = 0, mv = 0;
    for (int R : radii) {
      mx += std::log(R);
      mf += std::log(F.value(x, R));
      mv += std::log(volumes.value(x, R));
    }
    mx /= radii.size();
    mf /= radii.size();
    mv /= radii.size();
    double sxx = 0, sxf = 0, sxv = 0;
    for (int R : radii) {
      double dx = std::log(R) - mx;
      sxx += dx * dx;
      sxf += dx * (std::log(F.value(x, R)) - mf);
      sxv += dx * (std::log(volumes.value(x, R)) - mv);
    }
    ls_beta += sxf / sxx;
    ls_alpha += sxv / sxx;
  }
  e.ls_beta = ls_beta / used.size();
  e.ls_alpha = ls_alpha / used.size();

  e.C_F = 0.0;
  e.c_F = std::numeric_limits<double>::infinity();
  for (Vertex x : used) {
    std::vector<int> dist;
    if (g) dist = distances_from(*g, x, radii.back());
    for (Vertex y : used) {
      if (y != x && (!g || dist[y] < 0)) continue;
      for (int R : radii) {
        if (y != x && dist[y] >= R) continue;
        for (int r : radii) {
          if (r > R) break;
          double ratio = F.value(x, R) / F.value(y, r);
          double scale = double(r) / R;
          e.C_F = std::max(e.C_F, ratio * std::pow(scale, e.beta));
          e.c_F = std::min(e.c_F, ratio * std::pow(scale, e.beta_prime));
        }
      }
    }
  }

  bool finite = std::isfinite(e.beta) && std::isfinite(e.beta_prime) && std::isfinite(e.c_F) &&
                std::isfinite(e.C_F);
  if (finite && e.beta_prime > 0 && e.c_F > 0 && e.quadratic_c > 0)
    e.verdict = e.beta_prime > 1 ? WClass::W1 : WClass::W0;
  return e;
}

nlohmann::json to_json(const ScalingExponents& e) {
  return {{"beta", e.beta},
          {"beta_prime", e.beta_prime},
          {"c_F", e.c_F},
          {"C_F", e.C_F},
          {"alpha", e.alpha},
          {"alpha_prime", e.alpha_prime},
          {"quadratic_c", e.quadratic_c},
          {"ls_beta", e.ls_beta},
          {"ls_alpha", e.ls_alpha},
          {"grid", e.grid},
          {"centers_used", e.centers_used},
          {"pairs", e.pairs},
          {"verdict", std::string(to_string(e.verdict))}};
}

int sub_gaussian_k(const RadiusFunction& min_F, long n, int R, double q) {
  require_scan_args(n, R);
  if (!(q > 0)) throw Error(ErrorCode::UsageError, "q must be positive");
  // k > R gives floor(R/k) = 0 and F = 0, so the scan starts at R.
  for (int k = R; k >= 2; --k)
    if (double(n) / k <= q * min_F(R / k)) return k;
  return 1;
}

int sub_gaussian_l(const RadiusFunction& F, long n, int R, double C) {
  require_scan_args(n, R);
  if (!(C > 0)) throw Error(ErrorCode::UsageError, "Cl must be positive");
  for (long l = 1; l <= n; ++l) {
    int r = l >= R ? 1 : ceil_div(R, static_cast<int>(l));
    if (double(n) / l >= C * F(r)) return static_cast<int>(l);
  }
  return static_cast<int>(n);
}

int sub_gaussian_l_set(const RadiusFunction& max_F, long n, int R, double C) {
  require_scan_args(n, R);
  if (!(C > 0)) throw Error(ErrorCode::UsageError, "Cl must be positive");
  for (long l = n; l >= 1; --l) {
    int r = l >= R ? 1 : ceil_div(R, static_cast<int>(l));
    if (double(n) / l >= C * max_F(r)) return static_cast<int>(l);
  }
  return static_cast<int>(n);
}

namespace {

/// min over the given centers of F(y, r); centers missing r are skipped.
double min_over(const ScalingTable& t, const std::vector<Vertex>& ys, int r) {
  if (r == 0) return 0.0;
  double m = std::numeric_limits<double>::infinity();
  for (Vertex y : ys)
    if (t.has(y, r)) m = std::min(m, t.value(y, r));
  if (!std::isfinite(m)) {
    std::ostringstream os;
    os << "no sampled center has F(.," << r << ") tabulated";
    throw Error(ErrorCode::OutOfTabulatedRange, os.str());
  }
  return m;
}

}  // namespace

int sub_gaussian_k(const ScalingTable& table, const WeightedGraph& g, Vertex x, long n, int R,
                   double q) {
  auto dist = distances_from(g, x, R);
  std::vector<Vertex> ys;
  for (Vertex y : table.centers())
    if (dist[y] >= 0 && dist[y] < R) ys.push_back(y);
  if (std::find(ys.begin(), ys.end(), x) == ys.end())
    throw Error(ErrorCode::OutOfTabulatedRange, "center is not in the table");
  return sub_gaussian_k([&](int r) { return min_over(table, ys, r); }, n, R, q);
}

int sub_gaussian_l(const ScalingTable& table, Vertex x, long n, int R, double C) {
  return sub_gaussian_l([&](int r) { return table.value(x, r); }, n, R, C);
}

int sub_gaussian_l_set(const ScalingTable& table, std::span<const Vertex> A, long n, int R,
                       double C) {
  if (A.empty()) throw Error(ErrorCode::EmptyInput, "set variant needs a nonempty set");
  return sub_gaussian_l_set(
      [&](int r) {
        double m = 0.0;
        for (Vertex z : A) m = std::max(m, table.value(z, r));
        return m;
      },
      n, R, C);
}

int global_m(const ScalingTable& table, const WeightedGraph& g, long n, int R, double q) {
  std::vector<Vertex> ys;
  for (Vertex y : table.centers())
    if (g.is_interior(y)) ys.push_back(y);
  if (ys.empty()) throw Error(ErrorCode::EmptyInput, "no interior center in the table");
  return sub_gaussian_k([&](int r) { return min_over(table, ys, r); }, n, R, q);
}

void write_table_csv(const ScalingTable& t, std::ostream& out) {
  out << "center,R,F\n";
  char buf[40];
  for (const auto& [x, row] : t.rows())
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (std::isnan(row[i])) continue;
      std::snprintf(buf, sizeof buf, "%.17g", row[i]);
      out << x << ',' << i + 1 << ',' << buf << '\n';
    }
}

ScalingTable read_table_csv(std::istream& in) {
  ScalingTable t;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line.rfind("center", 0) == 0) continue;
    std::istringstream ls(line);
    std::string a, b, c;
    if (!std::getline(ls, a, ',') || !std::getline(ls, b, ',') || !std::getline(ls, c))
      throw Error(ErrorCode::ParseError, "table line " + std::to_string(lineno) + ": expected center,R,F");
    try {
      t.set(std::stoi(a), std::stoi(b), std::stod(c));
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, "table line " + std::to_string(lineno) + ": bad number");
    }
  }
  t.check_monotone();
  return t;
}

ScalingTable read_table_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open table '" + path.string() + "'");
  return read_table_csv(in);
}

nlohmann::json to_json(const ScalingTable& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& [x, row] : t.rows()) {
    nlohmann::json radii = nlohmann::json::array(), values = nlohmann::json::array();
    for (std::size_t i = 0; i < row.size(); ++i)
      if (!std::isnan(row[i])) {
        radii.push_back(i + 1);
        values.push_back(row[i]);
      }
    rows.push_back({{"center", x}, {"R", radii}, {"F", values}});
  }
  nlohmann::json viol = nlohmann::json::array();
  for (const auto& v : t.violations())
    viol.push_back({{"center", v.center}, {"R", v.radius}, {"previous", v.previous}, {"value", v.value}});
  return {{"source", std::string(to_string(t.source))},
          {"rows", rows},
          {"monotone", t.monotone_completed()},
          {"violations", viol}};
}

ScalingTable table_from_json(const nlohmann::json& j) {
  ScalingTable t;
  try {
    t.source = scaling_source_from_string(j.at("source").get<std::string>());
    for (const auto& row : j.at("rows")) {
      Vertex x = row.at("center").get<Vertex>();
      const auto& radii = row.at("R");
      const auto& values = row.at("F");
      if (radii.size() != values.size()) throw Error(ErrorCode::ParseError, "table row length mismatch");
      for (std::size_t i = 0; i < radii.size(); ++i) t.set(x, radii[i].get<int>(), values[i].get<double>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("table json: ") + e.what());
  }
  t.check_monotone();
  return t;
}

}  // namespace heatlab
