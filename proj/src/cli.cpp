#include "heatlab/cli.hpp"

#include <chrono>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "heatlab/error.hpp"
#include "heatlab/generators.hpp"
#include "heatlab/graph_io.hpp"
#include "heatlab/markov_kernel.hpp"
#include "heatlab/monte_carlo.hpp"
#include "heatlab/parallel.hpp"
#include "heatlab/potential_theory.hpp"
#include "heatlab/report.hpp"
#include "heatlab/scaling_laws.hpp"
#include "heatlab/verify.hpp"

namespace heatlab {

namespace {

using Clock = std::chrono::steady_clock;

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

template <typename T>
std::vector<T> parse_list(const std::string& s) {
  std::vector<T> out;
  for (const auto& item : split_list(s)) {
    try {
      out.push_back(static_cast<T>(std::stoll(item)));
    } catch (const std::exception&) {
      throw Error(ErrorCode::UsageError, "expected an integer list, got '" + s + "'");
    }
  }
  return out;
}

SolverOptions solver_from(const std::string& name) {
  SolverOptions s;
  if (name == "direct") s.kind = SolverKind::Direct;
  else if (name == "cg") s.kind = SolverKind::ConjugateGradient;
  else throw Error(ErrorCode::UsageError, "--solver must be 'direct' or 'cg'");
  return s;
}

void emit(const nlohmann::json& j, const std::string& path, std::ostream& out) {
  std::string text = canonical_json(j) + "\n";
  if (path.empty()) out << text;
  else write_text(path, text);
}

struct Shared {
  std::string graph = "graph.edges";
  std::string out;
  std::string solver = "direct";
  int threads = 0;
};

WeightedGraph load(const Shared& s) { return load_graph(s.graph); }

int threads_of(const Shared& s) { return s.threads > 0 ? s.threads : default_thread_count(); }

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"heatlab: potential theory of random walks on weighted graphs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "heatlab 0.1.0");

  // generate
  auto* gen = app.add_subcommand("generate", "write a generated graph as an edge list with sidecar");
  std::string family = "lattice", weights = "unit";
  GraphFamilySpec spec;
  std::string gen_out = "graph.edges";
  int side = 0, level = 0;
  gen->add_option("--family", family, "lattice | gasket | vicsek")->capture_default_str();
  gen->add_option("--dim", spec.dim, "lattice dimension")->capture_default_str();
  gen->add_option("--side", side, "lattice side (odd)");
  gen->add_option("--level", level, "fractal level");
  gen->add_option("--margin", spec.margin, "interior-mask multiplier")->capture_default_str();
  gen->add_option("--r-max", spec.r_max, "largest radius verifiers will use (0: family default)");
  gen->add_option("--weights", weights, "unit | uniform:lo:hi:seed")->capture_default_str();
  gen->add_option("--out", gen_out, "edge-list path")->capture_default_str();

  // compute
  Shared cs;
  auto* compute = app.add_subcommand("compute", "exact potential-theoretic quantities");
  compute->require_subcommand(1);
  Vertex center = -1, source = -1;
  int r_small = 1, R = 0, ball_R = 0;
  long time_n = 0;
  auto add_common = [](CLI::App* a, Shared& s) {
    a->add_option("--graph", s.graph, "edge-list path")->capture_default_str();
    a->add_option("--out", s.out, "output path (stdout when omitted)");
    a->add_option("--solver", s.solver, "direct | cg")->capture_default_str();
    a->add_option("--threads", s.threads, "worker count (default HEATLAB_THREADS)");
  };
  auto* c_green = compute->add_subcommand("green", "Green kernel g^B(x,.) of B(center,R)");
  auto* c_res = compute->add_subcommand("resistance", "annulus resistance rho(center,r,R)");
  auto* c_exit = compute->add_subcommand("exittime", "mean exit time E(center,R)");
  auto* c_lambda = compute->add_subcommand("lambda", "smallest Dirichlet eigenvalue on B(center,R)");
  auto* c_kernel = compute->add_subcommand("kernel", "heat kernel p_n(source,.) as CSV");
  for (auto* a : {c_green, c_res, c_exit, c_lambda}) {
    add_common(a, cs);
    a->add_option("--center", center, "ball center")->required();
    a->add_option("--R", R, "ball radius")->required();
  }
  c_res->add_option("--r", r_small, "inner radius")->capture_default_str();
  add_common(c_kernel, cs);
  c_kernel->add_option("--source", source, "source vertex")->required();
  c_kernel->add_option("--n", time_n, "time")->required();
  c_kernel->add_option("--ball", ball_R, "kill outside B(source,R)");

  // fit
  Shared fs;
  auto* fit = app.add_subcommand("fit", "fit scaling exponents on a dyadic grid");
  std::string table_path, table_out, grid_s = "4,8,16", centers_s, fit_source = "exittime";
  add_common(fit, fs);
  fit->add_option("--table", table_path, "CSV table (center,R,F); built from the graph when omitted");
  fit->add_option("--grid", grid_s, "radii")->capture_default_str();
  fit->add_option("--centers", centers_s, "centers for a computed table");
  fit->add_option("--source", fit_source, "exittime | rhov")->capture_default_str();
  fit->add_option("--save-table", table_out, "write the computed table as CSV");

  // verify
  Shared vs;
  vs.out = "report.json";
  auto* ver = app.add_subcommand("verify", "check the named conditions over a radius grid");
  std::string conditions_s = "vd,tc,h,gf,er,lambda,mv,due,ndle,ple,le,pmv,psmv,ph", config_path, csv_path,
              manifest_path, radii_s, pradii_s, vcenters_s;
  int center_count = 0;
  bool strict = false;
  add_common(ver, vs);
  ver->add_option("--conditions", conditions_s, "comma list or 'all'")->capture_default_str();
  ver->add_option("--config", config_path, "VerifierConfig JSON");
  ver->add_option("--csv", csv_path, "per-sample CSV");
  ver->add_option("--manifest", manifest_path, "run manifest path (default <out>.manifest.json)");
  ver->add_option("--radii", radii_s, "elliptic radii");
  ver->add_option("--parabolic-radii", pradii_s, "cylinder radii");
  ver->add_option("--centers", vcenters_s, "explicit centers");
  ver->add_option("--center-count", center_count, "automatic center count");
  ver->add_flag("--strict", strict, "exit 1 when any verdict is 'fails'");

  // mc
  Shared ms;
  auto* mc = app.add_subcommand("mc", "Monte Carlo estimates");
  mc->require_subcommand(1);
  long trials = 100000;
  std::uint64_t seed = 1;
  Vertex mc_x = -1, mc_y = -1;
  int mc_R = 0;
  long mc_n = 0;
  auto* m_exit = mc->add_subcommand("exittime", "mean exit time of B(x,R)");
  auto* m_site = mc->add_subcommand("exitsite", "exit distribution on the boundary of B(x,R)");
  auto* m_kernel = mc->add_subcommand("kernel", "p~_n(x,y)");
  for (auto* a : {m_exit, m_site, m_kernel}) {
    add_common(a, ms);
    a->add_option("--trials", trials, "trial count")->capture_default_str();
    a->add_option("--seed", seed, "seed")->capture_default_str();
    a->add_option("--x", mc_x, "start vertex")->required();
  }
  m_exit->add_option("--R", mc_R, "radius")->required();
  m_site->add_option("--R", mc_R, "radius")->required();
  m_kernel->add_option("--y", mc_y, "target vertex")->required();
  m_kernel->add_option("--n", mc_n, "time")->required();

  // report
  auto* rep = app.add_subcommand("report", "render a verify document");
  std::string rep_in, rep_format = "md", rep_out;
  rep->add_option("--in", rep_in, "report.json")->required();
  rep->add_option("--format", rep_format, "md | csv | json")->capture_default_str();
  rep->add_option("--out", rep_out, "output path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) {
      spec.family = family_from_string(family);
      if (spec.family == Family::File) throw Error(ErrorCode::UsageError, "generate needs a synthetic family");
      spec.size = spec.family == Family::Lattice ? side : level;
      if (spec.size == 0)
        throw Error(ErrorCode::UsageError, spec.family == Family::Lattice ? "--side is required" : "--level is required");
      spec.weights = WeightScheme::parse(weights);
      auto g = generate(spec);
      save_graph(g, gen_out);
      out << canonical_json({{"vertices", g.vertex_count()}, {"edges", g.edge_count()}, {"out", gen_out},
                             {"sidecar", sidecar_path(gen_out).string()}})
          << "\n";
      return 0;
    }

    if (compute->parsed()) {
      auto g = load(cs);
      auto opts = solver_from(cs.solver);
      nlohmann::json rec;
      if (c_kernel->parsed()) {
        if (!g.contains(source)) throw Error(ErrorCode::InvalidVertex, "--source out of range");
        KernelVector k = ball_R > 0 ? dirichlet_kernel(g, ball(g, source, ball_R), source, time_n)
                                    : heat_kernel(g, source, time_n);
        std::ostringstream csv;
        csv << "vertex,value\n";
        char buf[40];
        for (Vertex v = 0; v < g.vertex_count(); ++v) {
          std::snprintf(buf, sizeof buf, "%.17g", k.values[v]);
          csv << v << ',' << buf << '\n';
        }
        if (cs.out.empty()) out << csv.str();
        else write_text(cs.out, csv.str());
        return 0;
      }
      if (!g.contains(center)) throw Error(ErrorCode::InvalidVertex, "--center out of range");
      nlohmann::json inputs{{"graph", cs.graph}, {"center", center}, {"R", R}};
      if (c_green->parsed()) {
        auto gr = green(g, ball(g, center, R), center, opts);
        nlohmann::json values = nlohmann::json::object();
        for (std::size_t i = 0; i < gr.domain.size(); ++i)
          values[std::to_string(gr.domain.ids[i])] = gr.values[static_cast<Eigen::Index>(i)];
        rec = {{"quantity", "green"}, {"inputs", inputs}, {"value", gr.values.maxCoeff()},
               {"values", values}, {"residual", gr.residual}, {"witnesses", {center}}};
      } else if (c_res->parsed()) {
        inputs["r"] = r_small;
        auto res = annulus_resistance(g, center, r_small, R, opts);
        rec = {{"quantity", "resistance"}, {"inputs", inputs}, {"value", res.resistance},
               {"annulus_volume", annulus_volume(g, center, r_small, R)}, {"residual", res.residual},
               {"witnesses", nlohmann::json::array()}};
      } else if (c_exit->parsed()) {
        auto e = mean_exit_time(g, center, R, opts);
        rec = {{"quantity", "exittime"}, {"inputs", inputs}, {"value", e.at_center}, {"maximum", e.maximum},
               {"residual", e.residual}, {"witnesses", {center}}};
      } else {
        EigenOptions eo;
        eo.solver = opts;
        auto ev = smallest_eigenvalue(g, ball(g, center, R), eo);
        rec = {{"quantity", "lambda"}, {"inputs", inputs}, {"value", ev.lambda}, {"iterations", ev.iterations},
               {"residual", ev.residual}, {"witnesses", nlohmann::json::array()}};
      }
      emit(rec, cs.out, out);
      return 0;
    }

    if (fit->parsed()) {
      auto grid = parse_list<int>(grid_s);
      auto g = load(fs);
      ScalingTable table;
      std::vector<Vertex> centers;
      if (!table_path.empty()) {
        table = read_table_csv(table_path);
        centers = table.centers();
      } else {
        VerifierConfig cfg;
        if (!centers_s.empty()) cfg.centers = parse_list<Vertex>(centers_s);
        centers = select_centers(g, cfg, grid.front());
        table = build_scaling_table(g, scaling_source_from_string(fit_source), centers, grid,
                                    solver_from(fs.solver), threads_of(fs));
        if (!table_out.empty()) {
          std::ostringstream csv;
          write_table_csv(table, csv);
          write_text(table_out, csv.str());
        }
      }
      auto vols = build_volume_table(g, centers, grid);
      auto e = fit_exponents(table, vols, grid, &g);
      emit(to_json(e), fs.out, out);
      return 0;
    }

    if (ver->parsed()) {
      auto t0 = Clock::now();
      VerifierConfig cfg;
      if (!config_path.empty()) {
        try {
          cfg = config_from_json(nlohmann::json::parse(read_text(config_path)), cfg);
        } catch (const nlohmann::json::parse_error& e) {
          throw Error(ErrorCode::ParseError, config_path + ": " + e.what());
        }
      }
      if (!radii_s.empty()) cfg.radii = parse_list<int>(radii_s);
      if (!pradii_s.empty()) cfg.parabolic_radii = parse_list<int>(pradii_s);
      if (!vcenters_s.empty()) cfg.centers = parse_list<Vertex>(vcenters_s);
      if (center_count > 0) cfg.center_count = center_count;
      if (ver->count("--solver")) cfg.solver.kind = solver_from(vs.solver).kind;
      if (vs.threads > 0) cfg.threads = vs.threads;
      cfg.validate();
      auto g = load(vs);
      auto outcome = verify(g, split_list(conditions_s), cfg);
      if (outcome.reports.empty()) throw Error(ErrorCode::EmptyInput, "no condition could be evaluated");
      auto doc = verify_document(vs.graph, cfg, outcome);
      RunManifest manifest;
      manifest.subcommand = "verify";
      manifest.graph_source = vs.graph;
      manifest.config_digest = config_digest(cfg);
      write_text(vs.out, canonical_json(doc) + "\n");
      manifest.outputs.push_back(vs.out);
      if (!csv_path.empty()) {
        write_text(csv_path, report_csv(outcome.reports));
        manifest.outputs.push_back(csv_path);
      }
      manifest.statistics["conditions"] = static_cast<double>(outcome.reports.size());
      manifest.statistics["tabulated_scaling_values"] = 0;
      for (const auto& [x, row] : outcome.table.rows())
        for (double v : row)
          if (!std::isnan(v)) manifest.statistics["tabulated_scaling_values"] += 1;
      manifest.statistics["threads"] = cfg.threads > 0 ? cfg.threads : default_thread_count();
      manifest.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
      write_text(manifest_path.empty() ? vs.out + ".manifest.json" : manifest_path,
                 canonical_json(to_json(manifest)) + "\n");
      bool failed = false;
      for (const auto& r : outcome.reports) {
        out << r.name << ": " << to_string(r.verdict) << " (constant " << r.constant << ")\n";
        failed = failed || r.verdict == Verdict::Fails;
      }
      return strict && failed ? 1 : 0;
    }

    if (mc->parsed()) {
      auto g = load(ms);
      int th = threads_of(ms);
      if (m_exit->parsed()) emit(to_json(mc_exit_time(g, mc_x, mc_R, trials, seed, th)), ms.out, out);
      else if (m_site->parsed()) emit(to_json(mc_exit_site(g, mc_x, mc_R, trials, seed, th)), ms.out, out);
      else emit(to_json(mc_kernel(g, mc_x, mc_y, mc_n, trials, seed, th)), ms.out, out);
      return 0;
    }

    if (rep->parsed()) {
      nlohmann::json doc;
      try {
        doc = nlohmann::json::parse(read_text(rep_in));
      } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::ParseError, rep_in + ": " + e.what());
      }
      std::string text;
      if (rep_format == "md") text = report_markdown(doc);
      else if (rep_format == "csv") text = report_csv(reports_from_document(doc));
      else if (rep_format == "json") text = canonical_json(doc) + "\n";
      else throw Error(ErrorCode::UsageError, "--format must be md, csv or json");
      if (rep_out.empty()) out << text;
      else write_text(rep_out, text);
      return 0;
    }
  } catch (const Error& e) {
    err << "heatlab: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "heatlab: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace heatlab
