// Acceptance battery: one PASS/FAIL line per criterion, exit status 1 when
// any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "heatlab/error.hpp"
#include "heatlab/generators.hpp"
#include "heatlab/markov_kernel.hpp"
#include "heatlab/monte_carlo.hpp"
#include "heatlab/potential_theory.hpp"
#include "heatlab/report.hpp"
#include "heatlab/scaling_laws.hpp"
#include "heatlab/verify.hpp"

using namespace heatlab;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [FAILED: " << what << "]";
    }
  }
};

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

int pos(const VertexSet& A, Vertex v) {
  return static_cast<int>(std::lower_bound(A.begin(), A.end(), v) - A.begin());
}

// --- 1 -----------------------------------------------------------------------

void resistance_volume_gate(Outcome& o) {
  std::vector<std::pair<std::string, WeightedGraph>> graphs;
  graphs.emplace_back("lattice1", lattice(1, 201));
  graphs.emplace_back("lattice2", lattice(2, 41));
  for (int n : {5, 6, 7}) graphs.emplace_back("gasket" + std::to_string(n), sierpinski_gasket(n));
  for (int n : {3, 4}) graphs.emplace_back("vicsek" + std::to_string(n), vicsek_tree(n));
  {
    auto sq = lattice(2, 21), gs = sierpinski_gasket(5);
    graphs.emplace_back("lattice2+gasket", glue(sq, gs, sq.landmark("center"), gs.landmark("apex")));
    auto path = lattice(1, 61), vt = vicsek_tree(3);
    graphs.emplace_back("path+vicsek", glue(path, vt, path.landmark("center"), vt.landmark("center")));
  }
  std::mt19937 rng(2024);
  int samples = 0, violations = 0;
  double worst = INFINITY;
  for (const auto& [name, g] : graphs) {
    std::uniform_int_distribution<Vertex> pick(0, g.vertex_count() - 1);
    std::uniform_int_distribution<int> rr(1, 6), width(1, 10);
    int taken = 0;
    while (taken < 60) {
      Vertex x = pick(rng);
      int r = rr(rng), R = r + width(rng);
      if (complement(g, ball(g, x, R)).empty()) continue;
      double rho = annulus_resistance(g, x, r, R).resistance;
      double v = annulus_volume(g, x, r, R);
      double ratio = rho * v / (double(R - r) * (R - r));
      worst = std::min(worst, ratio);
      if (ratio < 1 - 1e-9) ++violations;
      ++taken;
      ++samples;
    }
  }
  o.detail << "samples=" << samples << " graphs=" << graphs.size() << " min rho*v/(R-r)^2=" << worst;
  o.require(samples >= 500, "at least 500 samples");
  o.require(violations == 0, std::to_string(violations) + " violations");
}

// --- 2 -----------------------------------------------------------------------

void identity_battery(Outcome& o) {
  std::vector<WeightedGraph> graphs{sierpinski_gasket(4), vicsek_tree(3), lattice(2, 15),
                                    reweight(sierpinski_gasket(4), WeightScheme::parse("uniform:0.5:2:3")),
                                    reweight(lattice(2, 15), WeightScheme::parse("uniform:0.25:4:9"))};
  std::mt19937 rng(77);
  double sym = 0, mass = 0, semi = 0, green_exit = 0, rows = 0;
  for (const auto& g : graphs) {
    if (g.vertex_count() > 300) throw Error(ErrorCode::UsageError, "battery graphs must be small");
    std::uniform_int_distribution<Vertex> pick(0, g.vertex_count() - 1);
    for (int t = 0; t < 10; ++t) {
      Vertex x = pick(rng), y = pick(rng);
      long n = 1 + t * 7, m = 2 + t * 3;
      auto kx = heat_kernel(g, x, n), ky = heat_kernel(g, y, n);
      sym = std::max(sym, std::abs(kx.values[y] - ky.values[x]));
      mass = std::max(mass, std::abs(kx.mass(g) - 1.0));
      auto km = heat_kernel(g, y, m);
      double conv = 0;
      for (Vertex w = 0; w < g.vertex_count(); ++w) conv += kx.values[w] * km.values[w] * g.measure(w);
      semi = std::max(semi, std::abs(heat_kernel(g, x, n + m).values[y] - conv));
    }
    for (int t = 0; t < 5; ++t) {
      Vertex x = pick(rng);
      for (int R : {2, 4, 6}) {
        auto B = ball(g, x, R);
        if (complement(g, B).empty()) continue;
        auto E = mean_exit_time(g, B);
        green_exit = std::max(green_exit, rel(green(g, B, x).weighted_sum(g), E.at(x)));
        auto K = poisson_kernel(g, B);
        rows = std::max(rows, (K.values.rowwise().sum().array() - 1.0).abs().maxCoeff());
      }
    }
  }
  o.detail << "symmetry=" << sym << " mass=" << mass << " semigroup=" << semi << " green/exit=" << green_exit
           << " poisson rows=" << rows;
  o.require(sym <= 1e-12, "kernel symmetry");
  o.require(mass <= 1e-12, "mass conservation");
  o.require(semi <= 1e-10, "semigroup");
  o.require(green_exit <= 1e-8, "green/exit identity");
  o.require(rows <= 1e-12, "poisson rows");
}

// --- 3 -----------------------------------------------------------------------

void closed_form_goldens(Outcome& o) {
  auto z = lattice(1, 101);
  Vertex c = z.landmark("center");
  double e_err = 0, rho_err = 0, lam_err = 0, ruin_err = 0;
  for (int R = 1; R <= 30; ++R) e_err = std::max(e_err, rel(mean_exit_time(z, c, R).at_center, double(R) * R));
  for (int r = 1; r <= 10; ++r)
    for (int R = r + 1; R <= 25; ++R)
      rho_err = std::max(rho_err, rel(annulus_resistance(z, c, r, R).resistance, (R - r) / 2.0));
  for (int p = 1; p <= 40; ++p) {
    std::vector<Vertex> A;
    for (int i = 0; i < p; ++i) A.push_back(10 + i);
    double lam = smallest_eigenvalue(z, VertexSet(A)).lambda;
    lam_err = std::max(lam_err, std::abs(lam - (1 - std::cos(std::numbers::pi / (p + 1)))));
  }
  for (int L : {4, 12, 30}) {
    auto p = lattice(1, L + 1);
    std::vector<Vertex> inside;
    for (Vertex v = 1; v < L; ++v) inside.push_back(v);
    auto K = poisson_kernel(p, VertexSet(inside));
    int top = pos(K.boundary, L);
    for (Vertex y = 1; y < L; ++y) ruin_err = std::max(ruin_err, std::abs(K.values(pos(K.domain, y), top) - double(y) / L));
  }
  o.detail << "E=R^2 rel=" << e_err << " rho=(R-r)/2 rel=" << rho_err << " lambda abs=" << lam_err
           << " ruin abs=" << ruin_err;
  o.require(e_err <= 1e-9, "exit time");
  o.require(rho_err <= 1e-9, "resistance");
  o.require(lam_err <= 1e-7, "interval eigenvalue");
  o.require(ruin_err <= 1e-10, "gambler's ruin");
}

// --- 4 -----------------------------------------------------------------------

ScalingExponents fit_at(const WeightedGraph& g, Vertex x, std::vector<int> grid) {
  std::vector<Vertex> centers{x};
  auto F = build_scaling_table(g, ScalingSource::ExitTime, centers, grid);
  auto V = build_volume_table(g, centers, grid);
  return fit_exponents(F, V, grid, &g);
}

void scaling_exponents(Outcome& o) {
  auto z2 = lattice(2, 65);
  auto e = fit_at(z2, z2.landmark("center"), {8, 16, 32});
  o.detail << "Z2 {8,16,32}: beta=[" << e.beta_prime << "," << e.beta << "] alpha=[" << e.alpha_prime << ","
           << e.alpha << "]";
  o.require(e.beta_prime >= 1.9 && e.beta <= 2.1, "Z2 beta");
  o.require(e.alpha_prime >= 1.85 && e.alpha <= 2.15, "Z2 alpha");
  const std::vector<std::vector<int>> grids{{8, 16, 32}, {16, 32, 64}, {32, 64, 128}};
  for (int level = 5; level <= 7; ++level) {
    auto g = sierpinski_gasket(level);
    const auto& grid = grids[level - 5];
    auto eg = fit_at(g, g.landmark("apex"), grid);
    o.detail << "; gasket" << level << " {" << grid[0] << "," << grid[1] << "," << grid[2] << "}: beta=["
             << eg.beta_prime << "," << eg.beta << "] alpha=[" << eg.alpha_prime << "," << eg.alpha << "]";
    o.require(eg.beta_prime >= 2.22 && eg.beta <= 2.42, "gasket beta level " + std::to_string(level));
    o.require(eg.alpha_prime >= 1.48 && eg.alpha <= 1.68, "gasket alpha level " + std::to_string(level));
  }
}

// --- 5 -----------------------------------------------------------------------

std::vector<double> cell_curve(const WeightedGraph& g, const std::string& cell, Vertex x, const std::vector<int>& radii,
                               const VerifierConfig& cfg = {}) {
  ScalingOracle E(g, ScalingSource::ExitTime);
  VerifyContext ctx{g, E, E, cfg};
  std::vector<double> out;
  for (int R : radii) out.push_back(evaluate_cell(ctx, cell, x, R).value);
  return out;
}

double max_drift(const std::vector<double>& v) {
  double d = 0;
  for (std::size_t i = 1; i < v.size(); ++i) d = std::max(d, std::max(v[i], v[i - 1]) / std::min(v[i], v[i - 1]) - 1);
  return d;
}

std::string list(const std::vector<double>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "/" : "") << v[i];
  return os.str();
}

void einstein_relation(Outcome& o) {
  auto z = lattice(1, 129);
  auto path = cell_curve(z, "er", z.landmark("center"), {4, 8, 16});
  double worst = 0;
  for (double v : path) worst = std::max(worst, std::abs(v - 2) / 2);
  o.detail << "Z " << list(path);
  o.require(worst <= 0.05, "path ratio 2 +- 5%");
  auto z2 = lattice(2, 65);
  auto sq = cell_curve(z2, "er", z2.landmark("center"), {4, 8, 16});
  auto gs = sierpinski_gasket(7);
  auto gk = cell_curve(gs, "er", gs.landmark("apex"), {8, 16, 32});
  o.detail << "; Z2 " << list(sq) << " drift " << max_drift(sq) << "; gasket7 " << list(gk) << " drift "
           << max_drift(gk);
  for (const auto* v : {&sq, &gk}) {
    for (double x : *v) o.require(x >= 1.0 / 16 && x <= 16, "ratio inside [1/16,16]");
    o.require(max_drift(*v) < 0.25, "drift < 25% per doubling");
  }
}

// --- 6 -----------------------------------------------------------------------

void harnack_constants(Outcome& o) {
  auto z = lattice(1, 257);
  std::vector<int> radii{2, 4, 8, 16, 32, 64};
  auto path = cell_curve(z, "harnack", z.landmark("center"), radii);
  double worst = 0;
  for (std::size_t i = 0; i < radii.size(); ++i)
    worst = std::max(worst, rel(path[i], (3.0 * radii[i] - 1) / (radii[i] + 1)));
  o.detail << "Z worst rel err " << worst;
  o.require(worst <= 0.02, "path closed form within 2%");
  auto z2 = lattice(2, 65);
  auto sq = cell_curve(z2, "harnack", z2.landmark("center"), {8, 16});
  double drift = sq[1] / sq[0] - 1;
  o.detail << "; Z2 R=8/16: " << list(sq) << " drift " << drift;
  o.require(std::abs(drift) < 0.20, "Z2 drift < 20% from R=8 to R=16");
}

// --- 7 -----------------------------------------------------------------------

std::pair<double, double> diagonal_profile(const WeightedGraph& g, Vertex x, const std::function<int(long)>& radius) {
  double lo = INFINITY, hi = 0;
  Eigen::VectorXd prev;
  for_each_kernel_step(g, x, 401, nullptr, [&](long n, const Eigen::VectorXd& p) {
    if (n >= 17 && n - 1 <= 400) {
      double pt = prev[x] + p[x];
      double v = pt * volume(g, x, radius(n - 1));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    prev = p;
  });
  return {lo, hi};
}

void diagonal_upper_profile(Outcome& o) {
  auto z2 = lattice(2, 129);
  auto [lo, hi] = diagonal_profile(z2, z2.landmark("center"), [](long n) {
    return static_cast<int>(std::ceil(std::sqrt(double(n)) - 1e-12));
  });
  o.detail << "Z2 n in [16,400]: [" << lo << "," << hi << "] C/c=" << hi / lo;
  o.require(hi / lo < 10, "Z2 C/c < 10");
  auto gs = sierpinski_gasket(7);
  Vertex apex = gs.landmark("apex");
  ScalingOracle F(gs, ScalingSource::ExitTime);
  auto [glo, ghi] = diagonal_profile(gs, apex, [&](long n) { return F.inverse(apex, double(n)); });
  o.detail << "; gasket7 apex: [" << glo << "," << ghi << "] C/c=" << ghi / glo;
  o.require(ghi / glo < 20, "gasket C/c < 20");
}

// --- 8 -----------------------------------------------------------------------

void parabolic_harnack(Outcome& o) {
  auto z2 = lattice(2, 65);
  Vertex c = z2.landmark("center");
  ScalingOracle E(z2, ScalingSource::ExitTime);
  double calib = 0;
  for (int R : {4, 8, 16}) {
    auto geo = ph_geometry(z2, c, R, E.F(c, R));
    Eigen::MatrixXd one = Eigen::MatrixXd::Ones(geo.final_time + 1, static_cast<Eigen::Index>(geo.region.size()));
    calib = std::max(calib, std::abs(ph_ratio(z2, geo, one) - 0.5));
  }
  o.detail << "calibration |ratio-0.5|=" << calib;
  o.require(calib == 0.0, "constant caloric function gives exactly 0.5");

  VerifierConfig cfg;
  VerifyContext ctx{z2, E, E, cfg};
  double c8 = evaluate_cell(ctx, "ph", c, 8).value, c16 = evaluate_cell(ctx, "ph", c, 16).value;
  o.detail << "; Z2 PH R=8 " << c8 << " R=16 " << c16 << " factor " << std::max(c8, c16) / std::min(c8, c16);
  o.require(std::max(c8, c16) / std::min(c8, c16) <= 2, "R=8 and R=16 within a factor 2");

  // Exclusion: with u = exp(-a(y-x)) the unconstrained maximum pairs the two
  // ends of the inner ball, which the distance constraint forbids.
  auto z = lattice(1, 61);
  Vertex o1 = z.landmark("center");
  auto geo = ph_geometry(z, o1, 8, 12.0);
  const double a = 0.5;
  Eigen::MatrixXd u(geo.final_time + 1, static_cast<Eigen::Index>(geo.region.size()));
  for (Eigen::Index n = 0; n < u.rows(); ++n)
    for (std::size_t i = 0; i < geo.region.size(); ++i) u(n, static_cast<Eigen::Index>(i)) = std::exp(-a * (geo.region.ids[i] - o1));
  long gap = geo.plus.second - geo.minus.first;
  double got = ph_ratio(z, geo, u), admissible = std::exp(a * gap) / 2, unconstrained = std::exp(a * 14) / 2;
  bool predicate = smdist_admissible(2, 3, 5) && !smdist_admissible(3, 3, 5) && !smdist_admissible(0, 4, 4);
  o.detail << "; exclusion ratio " << got << " (admissible max " << admissible << ", unconstrained " << unconstrained << ")";
  o.require(predicate && rel(got, admissible) <= 1e-12 && got < unconstrained, "violating pairs excluded");
}

// --- 9 -----------------------------------------------------------------------

void dashboard_coherence(Outcome& o) {
  struct Case {
    std::string name;
    WeightedGraph g;
    std::vector<int> radii;
  };
  std::vector<Case> cases;
  cases.push_back({"Z2 side 65", lattice(2, 65), {4, 8, 16}});
  cases.push_back({"gasket7", sierpinski_gasket(7), {8, 16, 32}});
  cases.push_back({"vicsek4", vicsek_tree(4), {4, 8, 16}});
  for (const auto& cs : cases) {
    VerifierConfig cfg;
    cfg.radii = cs.radii;
    auto out = verify(cs.g, {"all"}, cfg);
    auto coh = coherence(out.reports);
    o.detail << (&cs == &cases.front() ? "" : "; ") << cs.name << ":";
    for (const auto& grp : coh.groups) {
      o.detail << " " << grp.name << "=" << (grp.present ? to_string(grp.verdict) : "absent");
      o.require(grp.present && grp.verdict == Verdict::HoldsStably, cs.name + " " + grp.name);
    }
  }
}

// --- 10 ----------------------------------------------------------------------

void monte_carlo_battery(Outcome& o) {
  const long N = 100000;
  std::vector<WeightedGraph> graphs{lattice(1, 41), lattice(2, 21), sierpinski_gasket(4), vicsek_tree(3),
                                    reweight(sierpinski_gasket(3), WeightScheme::parse("uniform:0.5:2:5"))};
  std::mt19937 rng(4242);
  int cases = 0, inside = 0;
  std::string first_json;
  for (int k = 0; k < 100; ++k) {
    const auto& g = graphs[k % graphs.size()];
    std::uniform_int_distribution<Vertex> pick(0, g.vertex_count() - 1);
    std::uniform_int_distribution<int> rad(2, 5);
    std::uniform_int_distribution<long> time(1, 10);
    Vertex x = pick(rng);
    const std::uint64_t seed = 9000 + k;
    bool ok = false;
    if (k % 3 == 0) {
      int R = rad(rng);
      if (complement(g, ball(g, x, R)).empty()) R = 2;
      auto est = mc_exit_time(g, x, R, N, seed);
      ok = std::abs(est.estimate - mean_exit_time(g, x, R).at_center) <= est.three_sigma();
      if (k == 0) first_json = canonical_json(to_json(est));
    } else if (k % 3 == 1) {
      int R = rad(rng);
      if (complement(g, ball(g, x, R)).empty()) R = 2;
      auto est = mc_exit_site(g, x, R, N, seed);
      auto K = poisson_kernel(g, ball(g, x, R));
      int xi = pos(K.domain, x);
      std::uniform_int_distribution<std::size_t> site(0, est.boundary.size() - 1);
      std::size_t s = site(rng);
      double exact = K.values(xi, pos(K.boundary, est.boundary[s]));
      double sigma = std::sqrt(exact * (1 - exact) / N);
      ok = std::abs(est.frequency[s] - exact) <= 3 * sigma + 1e-15;
    } else {
      Vertex y = pick(rng);
      long n = time(rng);
      auto d = distances_from(g, x, static_cast<int>(n) + 2);
      if (d[y] < 0) y = x;
      auto est = mc_kernel(g, x, y, n, N, seed);
      double exact = heat_kernel(g, x, n).values[y] + heat_kernel(g, x, n + 1).values[y];
      ok = std::abs(est.estimate - exact) <= est.three_sigma() + 1e-15;
    }
    ++cases;
    inside += ok;
  }
  const auto& g0 = graphs[0];
  bool reproducible = canonical_json(to_json(mc_exit_time(g0, 20, 2, N, 9000))) ==
                      canonical_json(to_json(mc_exit_time(g0, 20, 2, N, 9000)));
  o.detail << inside << "/" << cases << " within 3 sigma; reproducible=" << (reproducible ? "yes" : "no");
  o.require(inside >= 99, ">= 99% inside");
  o.require(reproducible && !first_json.empty(), "byte-identical rerun");
}

// --- 11 ----------------------------------------------------------------------

void exponent_scans(Outcome& o) {
  std::mt19937 rng(31337);
  std::uniform_real_distribution<double> expo(1.0, 3.2), coef(0.3, 3.0), qd(0.005, 1.0 / 16), cd(0.2, 4.0);
  std::uniform_int_distribution<int> radius(1, 64);
  std::uniform_int_distribution<long> time(1, 4000);
  int bad = 0, k_fallbacks = 0, l_fallbacks = 0, queries = 0;
  for (; queries < 1000; ++queries) {
    double b = expo(rng), a = coef(rng);
    RadiusFunction F = [=](int r) { return r == 0 ? 0.0 : a * std::pow(r, b) + 1.0; };
    long n = time(rng);
    int R = radius(rng);
    double q = qd(rng), C = cd(rng);
    auto holds_k = [&](long k) { return double(n) / k <= q * F(static_cast<int>(R / k)); };
    auto holds_l = [&](long l) { return double(n) / l >= C * F(static_cast<int>((R + l - 1) / l)); };

    int k = sub_gaussian_k(F, n, R, q);
    if (k > 1 && !holds_k(k)) ++bad;
    for (long kk = k + 1; kk <= 2L * R + 2; ++kk) bad += holds_k(kk);
    k_fallbacks += k == 1;

    int l = sub_gaussian_l(F, n, R, C);
    bool l_found = false;
    for (long ll = 1; ll <= n && !l_found; ++ll) l_found = holds_l(ll);
    if (l_found) {
      bad += !holds_l(l);
      for (long ll = 1; ll < l; ++ll) bad += holds_l(ll);
    } else {
      bad += l != n;
      ++l_fallbacks;
    }

    int ls = sub_gaussian_l_set(F, n, R, C);
    if (l_found) {
      bad += !holds_l(ls);
      for (long ll = ls + 1; ll <= n; ++ll) bad += holds_l(ll);
    } else {
      bad += ls != n;
    }
  }

  // m against k on tables over a homogeneous graph: m is the same scan with
  // the global minimum, so it never exceeds k and satisfies its own display.
  auto z = lattice(1, 201);
  ScalingTable t;
  std::vector<Vertex> centers;
  for (Vertex x = 60; x <= 140; x += 20) centers.push_back(x);
  for (Vertex x : centers)
    for (int R = 1; R <= 40; ++R) t.set(x, R, R * R * (1.0 + 0.01 * (x % 7)));
  int m_checks = 0;
  for (long n : {3L, 30L, 300L, 3000L})
    for (int R : {5, 10, 20, 40}) {
      int m = global_m(t, z, n, R, 1.0 / 16);
      double gmin = INFINITY;
      auto gmin_at = [&](int r) {
        if (r == 0) return 0.0;
        double v = INFINITY;
        for (Vertex y : centers) v = std::min(v, t.value(y, r));
        return v;
      };
      gmin = gmin_at(R / m);
      if (m > 1) bad += !(double(n) / m <= gmin / 16);
      bad += double(n) / (m + 1) <= gmin_at(R / (m + 1)) / 16;
      for (Vertex x : centers) bad += m > sub_gaussian_k(t, z, x, n, R, 1.0 / 16);
      ++m_checks;
    }

  // k + 1 >= c (F/n)^{1/(beta-1)} on F = R^2 rows with c of order q, in the
  // regime n >= R.
  RadiusFunction sq = [](int r) { return double(r) * r; };
  double worst = INFINITY;
  const double q = 1.0 / 16;
  for (int R = 1; R <= 150; ++R)
    for (long n = R; n <= 6000; n += 7) worst = std::min(worst, (sub_gaussian_k(sq, n, R, q) + 1) / (sq(R) / n));
  o.detail << queries << " random queries + " << m_checks << " m queries, " << bad << " bad; k=1 fallbacks "
           << k_fallbacks << ", l=n fallbacks " << l_fallbacks << "; min (k+1)/(F/n) = " << worst << " (q/2 = " << q / 2 << ")";
  o.require(bad == 0, "defining inequalities");
  o.require(k_fallbacks > 0 && l_fallbacks > 0, "fallback conventions exercised");
  o.require(worst >= q / 2, "lower bound on k");
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    std::function<void(Outcome&)> run;
  };
  std::vector<Criterion> all{{1, "resistance-volume gate", resistance_volume_gate},
                             {2, "exact identities", identity_battery},
                             {3, "closed-form goldens", closed_form_goldens},
                             {4, "scaling exponents", scaling_exponents},
                             {5, "Einstein relation", einstein_relation},
                             {6, "Harnack constants", harnack_constants},
                             {7, "diagonal upper profile", diagonal_upper_profile},
                             {8, "parabolic Harnack", parabolic_harnack},
                             {9, "dashboard coherence", dashboard_coherence},
                             {10, "Monte Carlo cross-validation", monte_carlo_battery},
                             {11, "exponent scans", exponent_scans}};
  int failed = 0;
  for (const auto& c : all) {
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2d %-30s %s  (%.1fs) %s\n", c.id, c.title, o.pass ? "PASS" : "FAIL", secs,
                o.detail.str().c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
  return failed ? 1 : 0;
}
