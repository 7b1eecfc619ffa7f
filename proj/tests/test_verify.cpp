#include <cmath>
#include <numbers>

#include "doctest.h"

#include "heatlab/error.hpp"
#include "heatlab/generators.hpp"
#include "heatlab/markov_kernel.hpp"
#include "heatlab/verify.hpp"
#include "oracles.hpp"

using namespace heatlab;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::UsageError;
}

struct PathFixture {
  WeightedGraph g = lattice(1, 201);
  Vertex o = g.landmark("center");
  VerifierConfig cfg;
  ScalingOracle E{g, ScalingSource::ExitTime};
  VerifyContext ctx{g, E, E, cfg};
};

const ConditionReport& find(const std::vector<ConditionReport>& rs, const std::string& name) {
  for (const auto& r : rs)
    if (r.name == name) return r;
  FAIL("missing report " << name);
  return rs.front();
}

}  // namespace

TEST_CASE("config validation") {
  VerifierConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  auto broken = [&](auto mutate) {
    VerifierConfig c;
    mutate(c);
    return code_of([&] { c.validate(); });
  };
  CHECK(broken([](auto& c) { c.radii = {8, 4}; }) == ErrorCode::ConfigOrderViolation);
  CHECK(broken([](auto& c) { c.pmv_c = {0.5, 0.25, 0.6, 0.7, 1.0}; }) == ErrorCode::ConfigOrderViolation);
  CHECK(broken([](auto& c) { c.psmv_c = {0.01, 0.1, 0.2, 0.3, 0.3}; }) == ErrorCode::ConfigOrderViolation);
  CHECK(broken([](auto& c) { c.q = 0.1; }) == ErrorCode::ConfigOrderViolation);
  CHECK(broken([](auto& c) { c.Cl = 0; }) == ErrorCode::ConfigOrderViolation);
  CHECK(broken([](auto& c) { c.kernel_times = {4, 4}; }) == ErrorCode::ConfigOrderViolation);
  CHECK(broken([](auto& c) { c.ple_epsilon = 1.0; }) == ErrorCode::ConfigOrderViolation);

  auto j = to_json(cfg);
  j["q"] = 0.03125;
  auto back = config_from_json(j);
  CHECK(back.q == 0.03125);
  CHECK(back.radii == cfg.radii);
  CHECK(back.psmv_c == cfg.psmv_c);
  CHECK(config_from_json(nlohmann::json{{"Cl", 3.0}}).Cl == 3.0);
}

TEST_CASE("stability verdict") {
  using C = std::vector<std::pair<long, double>>;
  CHECK(stability_verdict(C{{4, 3.0}, {8, 3.1}, {16, 3.05}}, BoundKind::Upper, 2, 4) == Verdict::HoldsStably);
  CHECK(stability_verdict(C{{4, 3.0}, {8, 7.0}}, BoundKind::Upper, 2, 4) == Verdict::Drifts);
  CHECK(stability_verdict(C{{4, 1.0}, {8, 1.9}, {16, 3.6}, {32, 6.8}}, BoundKind::Upper, 2, 4) == Verdict::Drifts);
  // The same creep downward is harmless for an upper bound.
  CHECK(stability_verdict(C{{4, 6.8}, {8, 3.6}, {16, 1.9}, {32, 1.0}}, BoundKind::Upper, 2, 4) ==
        Verdict::HoldsStably);
  CHECK(stability_verdict(C{{4, 6.8}, {8, 3.6}, {16, 1.9}, {32, 1.0}}, BoundKind::Lower, 2, 4) == Verdict::Drifts);
  CHECK(stability_verdict(C{{4, 1.0}, {8, 0.0}}, BoundKind::Lower, 2, 4) == Verdict::Fails);
  CHECK(stability_verdict(C{{4, 0.0}, {8, 0.0}}, BoundKind::Upper, 2, 4) == Verdict::HoldsStably);
  CHECK(stability_verdict(C{{4, -1.0}}, BoundKind::Upper, 2, 4) == Verdict::Fails);
  CHECK(stability_verdict(C{{4, INFINITY}}, BoundKind::Upper, 2, 4) == Verdict::Fails);
  CHECK(stability_verdict(C{{4, NAN}}, BoundKind::TwoSided, 2, 4) == Verdict::Fails);
  CHECK(stability_verdict(C{}, BoundKind::Upper, 2, 4) == Verdict::Fails);
}

TEST_CASE("path cells match closed forms") {
  PathFixture f;
  for (int R : {2, 4, 8, 16, 32}) {
    CHECK(evaluate_cell(f.ctx, "vd", f.o, R).value == doctest::Approx((4.0 * R - 1) / (2.0 * R - 1)));
    CHECK(evaluate_cell(f.ctx, "harnack", f.o, R).value ==
          doctest::Approx((3.0 * R - 1) / (R + 1)).epsilon(1e-10));
    CHECK(evaluate_cell(f.ctx, "tc", f.o, R).value == doctest::Approx(4.0).epsilon(1e-10));
    CHECK(evaluate_cell(f.ctx, "wtc", f.o, R).value == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(evaluate_cell(f.ctx, "er", f.o, R).value == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(evaluate_cell(f.ctx, "mv", f.o, R).value == doctest::Approx(1.0).epsilon(1e-10));
    double lam = 1.0 - std::cos(std::numbers::pi / (2 * R));
    CHECK(evaluate_cell(f.ctx, "lambda", f.o, R).value == doctest::Approx(lam * R * R).epsilon(1e-7));
  }
  CHECK(evaluate_cell(f.ctx, "lambda", f.o, 64).value ==
        doctest::Approx(std::numbers::pi * std::numbers::pi / 8).epsilon(1e-3));
  CHECK(code_of([&] { evaluate_cell(f.ctx, "nope", f.o, 4); }) == ErrorCode::UsageError);
  CHECK(code_of([&] { evaluate_cell(f.ctx, "vd", f.o, 0); }) == ErrorCode::RadiusOrderViolation);
  CHECK(code_of([&] { evaluate_cell(f.ctx, "ue", f.o, 4); }) == ErrorCode::UsageError);
  CHECK(required_clean_radius("harnack", 5) == 10);
  CHECK(required_clean_radius("pmv", 5) == 5);
}

TEST_CASE("green cells match the dense inverse") {
  PathFixture f;
  for (int R : {4, 10}) {
    auto A = oracle::ball(f.g, f.o, 2 * R);
    auto row = oracle::green_row(f.g, A, f.o);
    auto d = oracle::bfs(f.g, f.o);
    double mx = 0, mn = INFINITY;
    for (std::size_t i = 0; i < A.size(); ++i)
      if (2 * d[A[i]] >= R && d[A[i]] < R) {
        mx = std::max(mx, row[i]);
        mn = std::min(mn, row[i]);
      }
    double scale = volume(f.g, f.o, 2 * R) / (4.0 * R * R);
    CHECK(evaluate_cell(f.ctx, "gf_upper", f.o, R).value == doctest::Approx(mx * scale).epsilon(1e-9));
    CHECK(evaluate_cell(f.ctx, "gf_lower", f.o, R).value == doctest::Approx(mn * scale).epsilon(1e-9));
  }
}

TEST_CASE("diagonal kernel cell") {
  PathFixture f;
  for (long n : {1L, 16L, 49L, 100L}) {
    auto c = evaluate_cell(f.ctx, "due", f.o, 0, n);
    int fr = static_cast<int>(std::ceil(std::sqrt(double(n)) - 1e-12));
    CHECK(c.R == fr);
    double pt = heat_kernel(f.g, f.o, n).values[f.o] + heat_kernel(f.g, f.o, n + 1).values[f.o];
    CHECK(c.value == doctest::Approx(pt * volume(f.g, f.o, fr)).epsilon(1e-12));
  }
  // n = 0: p~_0(x,x) = 1/mu(x) + p_1(x,x).
  auto c0 = evaluate_cell(f.ctx, "due", f.o, 0, 0);
  CHECK(std::isfinite(c0.value));
  CHECK(c0.aux.at("ptilde") == doctest::Approx(0.5));
}

TEST_CASE("mean value and harnack calibration") {
  auto g = lattice(2, 41);
  Vertex c = g.landmark("center");
  VerifierConfig cfg;
  for (int R : {4, 8}) {
    double F = R * R;
    auto geo = pmv_geometry(g, c, R, F, cfg.pmv_c, cfg.pmv_delta);
    Eigen::MatrixXd one = Eigen::MatrixXd::Ones(geo.plus.second + 2, static_cast<Eigen::Index>(geo.region.size()));
    CHECK(pmv_ratio(g, geo, one) == doctest::Approx(1.0).epsilon(1e-14));
    auto sgeo = pmv_geometry(g, c, R, F, cfg.psmv_c, cfg.psmv_delta);
    Eigen::MatrixXd sone = Eigen::MatrixXd::Ones(sgeo.plus.second + 2, static_cast<Eigen::Index>(sgeo.region.size()));
    CHECK(psmv_ratio(g, sgeo, sone) == doctest::Approx(1.0).epsilon(1e-14));
    auto hgeo = ph_geometry(g, c, R, F);
    Eigen::MatrixXd hone = Eigen::MatrixXd::Ones(hgeo.final_time + 1, static_cast<Eigen::Index>(hgeo.region.size()));
    CHECK(ph_ratio(g, hgeo, hone) == doctest::Approx(0.5).epsilon(1e-14));
  }
  auto geo = pmv_geometry(g, c, 8, 64, cfg.pmv_c, cfg.pmv_delta);
  CHECK(geo.minus == std::pair<long, long>{8, 16});
  CHECK(geo.plus == std::pair<long, long>{32, 48});
  CHECK(geo.nu == doctest::Approx(9 * measure_of(g, geo.inner)));
  CHECK(code_of([&] { pmv_ratio(g, geo, Eigen::MatrixXd::Ones(3, 3)); }) == ErrorCode::ShapeMismatch);
  auto tiny = pmv_geometry(g, c, 1, 1.0, cfg.pmv_c, cfg.pmv_delta);
  CHECK(code_of([&] { pmv_ratio(g, tiny, Eigen::MatrixXd::Ones(3, 1)); }) == ErrorCode::CylinderTooSmall);
  CHECK(closed_times(0.5, 3.2) == std::pair<long, long>{1, 3});
}

TEST_CASE("pair constraint excludes fast pairs") {
  CHECK(smdist_admissible(2, 3, 5));
  CHECK_FALSE(smdist_admissible(3, 3, 5));
  CHECK_FALSE(smdist_admissible(0, 5, 5));
  CHECK_FALSE(smdist_admissible(0, 6, 5));

  auto z = lattice(1, 61);
  Vertex o = z.landmark("center");
  const int R = 8;
  auto geo = ph_geometry(z, o, R, 12.0);
  REQUIRE(geo.minus == std::pair<long, long>{3, 6});
  REQUIRE(geo.plus == std::pair<long, long>{9, 11});
  const double a = 0.5;
  Eigen::MatrixXd u(geo.final_time + 1, static_cast<Eigen::Index>(geo.region.size()));
  for (Eigen::Index n = 0; n < u.rows(); ++n)
    for (std::size_t i = 0; i < geo.region.size(); ++i)
      u(n, static_cast<Eigen::Index>(i)) = std::exp(-a * (geo.region.ids[i] - o));
  // Admissible pairs reach at most n+ - n- = 8 apart; the inner ball spans 14.
  double brute = 0.0, unconstrained = 0.0;
  for (long nm = geo.minus.first; nm <= geo.minus.second; ++nm)
    for (long np = geo.plus.first; np <= geo.plus.second; ++np)
      for (Vertex ym : geo.inner)
        for (Vertex yp : geo.inner) {
          double r = std::exp(-a * (ym - o)) / (2 * std::exp(-a * (yp - o)));
          unconstrained = std::max(unconstrained, r);
          if (smdist_admissible(std::abs(ym - yp), nm, np)) brute = std::max(brute, r);
        }
  CHECK(brute == doctest::Approx(std::exp(8 * a) / 2));
  CHECK(unconstrained == doctest::Approx(std::exp(14 * a) / 2));
  CHECK(ph_ratio(z, geo, u) == doctest::Approx(brute).epsilon(1e-12));
}

TEST_CASE("ph scan agrees with brute force on a fractal") {
  auto g = sierpinski_gasket(4);
  Vertex x = 40;
  for (double F : {10.0, 20.0, 40.0}) {
    auto geo = ph_geometry(g, x, 3, F);
    Eigen::MatrixXd u(geo.final_time + 1, static_cast<Eigen::Index>(geo.region.size()));
    for (Eigen::Index n = 0; n < u.rows(); ++n)
      for (Eigen::Index i = 0; i < u.cols(); ++i) u(n, i) = 1.0 + std::sin(0.7 * n + 1.3 * i) * 0.9;
    auto pos = [&](Vertex v) { return std::lower_bound(geo.region.begin(), geo.region.end(), v) - geo.region.begin(); };
    double brute = 0.0;
    for (Vertex ym : geo.inner) {
      auto d = oracle::bfs(g, ym);
      for (Vertex yp : geo.inner)
        for (long nm = geo.minus.first; nm <= geo.minus.second; ++nm)
          for (long np = geo.plus.first; np <= geo.plus.second; ++np)
            if (smdist_admissible(d[yp], nm, np))
              brute = std::max(brute, u(nm, pos(ym)) / (u(np, pos(yp)) + u(np + 1, pos(yp))));
    }
    CHECK(ph_ratio(g, geo, u) == doctest::Approx(brute).epsilon(1e-12));
  }
}

TEST_CASE("verify on the path") {
  auto z = lattice(1, 401);
  VerifierConfig cfg;
  cfg.radii = {8, 16, 32};
  cfg.parabolic_radii = {8, 16};
  cfg.threads = 1;
  auto out = verify(z, {"vd", "tc", "h", "er", "mv", "lambda"}, cfg);
  auto& h = find(out.reports, "harnack");
  CHECK(h.constant == doctest::Approx(95.0 / 33.0).epsilon(1e-9));
  CHECK(h.witness.R == 32);
  CHECK(h.verdict == Verdict::HoldsStably);
  CHECK(find(out.reports, "er").constant == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(find(out.reports, "tc").constant == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(find(out.reports, "vd").verdict == Verdict::HoldsStably);
  CHECK(find(out.reports, "lambda").kind == BoundKind::Lower);
  CHECK_FALSE(out.exponents.has_value());

  auto again = verify(z, {"vd", "tc", "h", "er", "mv", "lambda"}, cfg);
  for (std::size_t i = 0; i < out.reports.size(); ++i)
    CHECK(to_json(out.reports[i]).dump() == to_json(again.reports[i]).dump());

  for (const auto& r : out.reports) {
    auto back = report_from_json(to_json(r));
    CHECK(to_json(back).dump() == to_json(r).dump());
  }
  CHECK(code_of([&] { verify(z, {"bogus"}, cfg); }) == ErrorCode::UsageError);
}

TEST_CASE("witness cells reproduce their values") {
  auto g = sierpinski_gasket(5);
  VerifierConfig cfg;
  cfg.radii = {4, 8};
  cfg.parabolic_radii = {4, 8};
  cfg.center_count = 2;
  cfg.threads = 1;
  auto out = verify(g, {"vd", "h", "gf", "er", "pmv", "psmv"}, cfg);
  ScalingOracle E(g, ScalingSource::ExitTime);
  VerifyContext ctx{g, E, E, cfg};
  for (const auto& r : out.reports) {
    if (r.stability_curve.empty()) continue;
    auto c = evaluate_cell(ctx, r.witness.condition, r.witness.x, r.witness.R, r.witness.n);
    CHECK(std::abs(c.value - r.constant) <= cfg.witness_tolerance * std::max(1.0, std::abs(r.constant)));
  }
}

TEST_CASE("le needs beta prime above one") {
  PathFixture f;
  ScalingExponents e;
  e.beta = 2;
  e.beta_prime = 0.9;
  std::vector<Vertex> centers{f.o};
  CHECK(code_of([&] { verify_le(f.ctx, centers, e, 0.5); }) == ErrorCode::NotApplicableBetaPrime);
  std::map<std::string, double> p{{"beta_prime", 1.0}, {"c", 0.5}};
  CHECK(code_of([&] { evaluate_cell(f.ctx, "le", f.o, 8, 0, p); }) == ErrorCode::NotApplicableBetaPrime);
}

TEST_CASE("coherence groups") {
  auto rep = [](std::string name, Verdict v) {
    ConditionReport r;
    r.name = std::move(name);
    r.verdict = v;
    return r;
  };
  std::vector<ConditionReport> rs{rep("gf_upper", Verdict::HoldsStably), rep("gf_lower", Verdict::HoldsStably),
                                  rep("wtc", Verdict::HoldsStably), rep("harnack", Verdict::HoldsStably)};
  auto c = coherence(rs);
  CHECK(c.coherent);
  CHECK(c.groups[0].present);
  CHECK_FALSE(c.groups[2].present);
  CHECK(c.flags.empty());

  rs[3].verdict = Verdict::Drifts;
  c = coherence(rs);
  CHECK_FALSE(c.coherent);
  CHECK(c.groups[1].verdict == Verdict::Drifts);
  CHECK(c.flags.size() == 4);
  auto j = to_json(c);
  CHECK(j["coherent"] == false);
  CHECK(j["groups"][2]["verdict"] == "absent");
}
