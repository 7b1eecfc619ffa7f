#include "heatlab/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "heatlab/error.hpp"

namespace heatlab {

namespace {

std::string format_number(double v, const char* fmt) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

void dump(const nlohmann::json& j, std::string& out) {
  switch (j.type()) {
    case nlohmann::json::value_t::object: {
      out += '{';
      bool first = true;
      for (const auto& [k, v] : j.items()) {  // object_t is a std::map, so keys arrive sorted
        if (!first) out += ',';
        first = false;
        out += nlohmann::json(k).dump();
        out += ':';
        dump(v, out);
      }
      out += '}';
      break;
    }
    case nlohmann::json::value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ',';
        dump(j[i], out);
      }
      out += ']';
      break;
    }
    case nlohmann::json::value_t::number_float:
      out += format_number(j.get<double>(), "%.17g");
      break;
    default:
      out += j.dump();
  }
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  return out;
}

double parse_double(const std::string& s) {
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  if (s == "nan") return NAN;
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::ParseError, "bad number '" + s + "' in report CSV");
  }
}

std::string short_number(const nlohmann::json& v) {
  if (v.is_null()) return "inf";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  return format_number(v.get<double>(), "%.4g");
}

}  // namespace

std::string canonical_json(const nlohmann::json& j) {
  std::string out;
  dump(j, out);
  return out;
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_digest(const VerifierConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical_json(to_json(cfg)))));
  return buf;
}

nlohmann::json to_json(const RunManifest& m) {
  return {{"subcommand", m.subcommand}, {"graph_source", m.graph_source},
          {"config_digest", m.config_digest}, {"outputs", m.outputs},
          {"wall_seconds", m.wall_seconds}, {"statistics", m.statistics}};
}

nlohmann::json verify_document(const std::string& graph_source, const VerifierConfig& cfg,
                               const VerifyOutcome& outcome) {
  nlohmann::json conditions = nlohmann::json::array(), skipped = nlohmann::json::array();
  for (const auto& r : outcome.reports) conditions.push_back(to_json(r));
  for (const auto& [name, why] : outcome.skipped) skipped.push_back({{"condition", name}, {"reason", why}});
  nlohmann::json doc{{"graph", graph_source},
                     {"config", to_json(cfg)},
                     {"config_digest", config_digest(cfg)},
                     {"conditions", conditions},
                     {"skipped", skipped},
                     {"coherence", to_json(coherence(outcome.reports))}};
  doc["exponents"] = outcome.exponents ? to_json(*outcome.exponents) : nlohmann::json(nullptr);
  return doc;
}

std::string report_csv(const std::vector<ConditionReport>& reports) {
  if (reports.empty()) throw Error(ErrorCode::EmptyInput, "no condition reports to emit");
  std::ostringstream os;
  os << "condition,x,R,n,value,skipped,note,aux\n";
  auto num = [](double v) {
    if (std::isnan(v)) return std::string("nan");
    if (std::isinf(v)) return std::string(v > 0 ? "inf" : "-inf");
    return format_number(v, "%.17g");
  };
  for (const auto& r : reports)
    for (const auto& c : r.samples) {
      std::string aux;
      for (const auto& [k, v] : c.aux) aux += (aux.empty() ? "" : ";") + k + "=" + num(v);
      os << csv_quote(c.condition) << ',' << c.x << ',' << c.R << ',' << c.n << ',' << num(c.value) << ','
         << (c.skipped ? 1 : 0) << ',' << csv_quote(c.note) << ',' << csv_quote(aux) << '\n';
    }
  return os.str();
}

std::vector<CellResult> read_report_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "condition,x,R,n,value,skipped,note,aux")
    throw Error(ErrorCode::ParseError, "report CSV header mismatch");
  std::vector<CellResult> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = csv_split(line);
    if (f.size() != 8) throw Error(ErrorCode::ParseError, "report CSV row needs 8 fields");
    CellResult c;
    c.condition = f[0];
    c.x = static_cast<Vertex>(std::stol(f[1]));
    c.R = std::stoi(f[2]);
    c.n = std::stol(f[3]);
    c.value = parse_double(f[4]);
    c.skipped = f[5] == "1";
    c.note = f[6];
    std::istringstream aux(f[7]);
    std::string kv;
    while (std::getline(aux, kv, ';')) {
      auto eq = kv.find('=');
      if (eq == std::string::npos) throw Error(ErrorCode::ParseError, "bad aux entry '" + kv + "'");
      c.aux[kv.substr(0, eq)] = parse_double(kv.substr(eq + 1));
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<ConditionReport> reports_from_document(const nlohmann::json& doc) {
  if (!doc.contains("conditions") || doc.at("conditions").empty())
    throw Error(ErrorCode::EmptyInput, "document has no condition reports");
  std::vector<ConditionReport> out;
  for (const auto& c : doc.at("conditions")) out.push_back(report_from_json(c));
  return out;
}

std::string report_markdown(const nlohmann::json& doc) {
  if (!doc.contains("conditions") || doc.at("conditions").empty())
    throw Error(ErrorCode::EmptyInput, "document has no condition reports");
  std::ostringstream os;
  os << "# heatlab report\n\n";
  if (doc.contains("graph")) os << "Graph: `" << doc.at("graph").get<std::string>() << "`\n\n";
  os << "| condition | kind | constant | verdict | curve | skipped |\n"
     << "|---|---|---|---|---|---|\n";
  for (const auto& c : doc.at("conditions")) {
    std::string curve;
    for (const auto& p : c.at("stability_curve"))
      curve += (curve.empty() ? "" : ", ") + c.at("axis").get<std::string>() + "=" + short_number(p.at(0)) +
               ": " + short_number(p.at(1));
    os << "| " << c.at("name").get<std::string>() << " | " << c.at("kind").get<std::string>() << " | "
       << short_number(c.at("constant")) << " | " << c.at("verdict").get<std::string>() << " | " << curve
       << " | " << c.at("skipped").get<int>() << " |\n";
  }
  if (doc.contains("skipped") && !doc.at("skipped").empty()) {
    os << "\nNot evaluated:\n\n";
    for (const auto& s : doc.at("skipped"))
      os << "- " << s.at("condition").get<std::string>() << ": " << s.at("reason").get<std::string>() << "\n";
  }
  if (doc.contains("exponents") && !doc.at("exponents").is_null()) {
    const auto& e = doc.at("exponents");
    os << "\nExponents: beta " << short_number(e.at("beta")) << ", beta' " << short_number(e.at("beta_prime"))
       << ", alpha " << short_number(e.at("alpha")) << ", class " << e.at("verdict").get<std::string>() << "\n";
  }
  if (doc.contains("coherence")) {
    const auto& co = doc.at("coherence");
    os << "\n## Coherence\n\n| group | members | verdict |\n|---|---|---|\n";
    for (const auto& g : co.at("groups")) {
      std::string members;
      for (const auto& m : g.at("members")) members += (members.empty() ? "" : ", ") + m.get<std::string>();
      os << "| " << g.at("name").get<std::string>() << " | " << members << " | "
         << g.at("verdict").get<std::string>() << " |\n";
    }
    os << "\nGroups " << (co.at("coherent").get<bool>() ? "agree" : "disagree") << ".\n";
    for (const auto& f : co.at("flags")) os << "- " << f.get<std::string>() << "\n";
  }
  return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace heatlab
