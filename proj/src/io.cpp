#include "feederflow/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

namespace feederflow {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ParseError(where + ": " + what);
}

cx parse_complex(const json& j, const std::string& where) {
  if (j.is_number()) return cx{j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return cx{j[0].get<double>(), j[1].get<double>()};
  fail(where, "expected a number or [re, im] pair");
}

Mat parse_matrix(const json& j, int n, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) fail(where, "expected " + std::to_string(n) + " rows");
  Mat m(n, n);
  for (int r = 0; r < n; ++r) {
    if (!j[static_cast<size_t>(r)].is_array() || static_cast<int>(j[static_cast<size_t>(r)].size()) != n)
      fail(where, "row " + std::to_string(r) + ": expected " + std::to_string(n) + " entries");
    for (int c = 0; c < n; ++c)
      m(r, c) = parse_complex(j[static_cast<size_t>(r)][static_cast<size_t>(c)],
                              where + "(" + std::to_string(r) + "," + std::to_string(c) + ")");
  }
  return m;
}

json dump_complex(cx v) { return json::array({v.real(), v.imag()}); }

json dump_matrix(const Mat& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(dump_complex(m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

const std::map<std::string, XfmrConnection>& connection_names() {
  static const std::map<std::string, XfmrConnection> names{
      {"wyeg:wyeg", XfmrConnection::WyeGWyeG},
      {"wyeg:wye", XfmrConnection::WyeGWye},
      {"wyeg:delta", XfmrConnection::WyeGDelta},
      {"wye:wye", XfmrConnection::WyeWye},
      {"wye:delta", XfmrConnection::WyeDelta},
      {"delta:delta", XfmrConnection::DeltaDelta},
      {"open-delta:open-delta", XfmrConnection::OpenDeltaOpenDelta},
      {"open-wye:open-delta", XfmrConnection::OpenWyeOpenDelta},
  };
  return names;
}

std::string connection_name(XfmrConnection c) {
  for (const auto& [name, value] : connection_names())
    if (value == c) return name;
  return "?";
}

int wye_key(const std::string& k, const std::string& where) {
  if (k == "a") return 0;
  if (k == "b") return 1;
  if (k == "c") return 2;
  fail(where, "expected phase key a|b|c, got \"" + k + "\"");
}

int pair_key(const std::string& k, const std::string& where) {
  if (k == "ab" || k == "ba") return 0;
  if (k == "bc" || k == "cb") return 1;
  if (k == "ca" || k == "ac") return 2;
  fail(where, "expected phase-pair key ab|bc|ca, got \"" + k + "\"");
}

void parse_zip_terms(const json& j, bool delta, const std::string& where, std::array<cx, 3>& out) {
  if (!j.is_object()) fail(where, "expected an object of per-phase entries");
  for (const auto& [key, value] : j.items()) {
    const int k = delta ? pair_key(key, where) : wye_key(key, where);
    out[static_cast<size_t>(k)] = parse_complex(value, where + "." + key);
  }
}

std::optional<ZipLoad> parse_bus_load(const json& jb, const Bus& bus, const std::string& where) {
  const bool has_load = jb.contains("load");
  const bool has_cap = jb.contains("capacitor");
  if (!has_load && !has_cap) return std::nullopt;
  const bool delta = bus.kind == BusKind::Delta;

  std::array<cx, 3> s{}, i{}, y{};
  bool fixed_phasor = false;
  if (has_load) {
    const json& jl = jb.at("load");
    if (!jl.is_object()) fail(where, "load: expected an object");
    for (const auto& [key, value] : jl.items()) {
      if (key == "s") parse_zip_terms(value, delta, where + ".load.s", s);
      else if (key == "i") parse_zip_terms(value, delta, where + ".load.i", i);
      else if (key == "y") parse_zip_terms(value, delta, where + ".load.y", y);
      else if (key == "fixed_phasor_current") fixed_phasor = value.get<bool>();
      else fail(where, "load: unknown key \"" + key + "\"");
    }
  }
  if (has_cap) {
    // Capacitor ratings are vars supplied at 1 pu voltage; they enter the
    // constant-impedance pathway as purely reactive admittances.
    const json& jc = jb.at("capacitor");
    if (!jc.is_object() || !jc.contains("q")) fail(where, "capacitor: expected an object with \"q\"");
    for (const auto& [key, value] : jc.at("q").items()) {
      const int k = delta ? pair_key(key, where + ".capacitor") : wye_key(key, where + ".capacitor");
      const double q = value.get<double>();
      y[static_cast<size_t>(k)] += delta ? cx{0.0, q / 3.0} : cx{0.0, q};
    }
  }

  if (delta) return ZipLoad{DeltaZip{s, i, y, fixed_phasor}};
  return ZipLoad{WyeZip{s, i, y, fixed_phasor}};
}

LineSpec parse_line_spec(const json& j, PhaseSet default_phases, const std::string& where) {
  LineSpec line;
  line.phases = j.contains("phases") ? PhaseSet::parse(j.at("phases").get<std::string>()) : default_phases;
  const int n = line.phases.size();
  if (!j.contains("z")) fail(where, "missing \"z\"");
  line.z = parse_matrix(j.at("z"), n, where + ".z");
  line.y_shunt = j.contains("y_shunt") ? parse_matrix(j.at("y_shunt"), n, where + ".y_shunt")
                                       : Mat::Zero(n, n);
  return line;
}

const std::array<const char*, 3>& svr_arm_names(SvrConfig config) {
  static const std::array<const char*, 3> wye{"a", "b", "c"};
  static const std::array<const char*, 3> closed{"ab", "bc", "ca"};
  static const std::array<const char*, 3> open{"ab", "", "cb"};
  switch (config) {
    case SvrConfig::Wye: return wye;
    case SvrConfig::ClosedDelta: return closed;
    default: return open;
  }
}

int svr_arm(const std::string& key, SvrConfig config, const std::string& where) {
  const auto& names = svr_arm_names(config);
  for (int k = 0; k < 3; ++k)
    if (key == names[static_cast<size_t>(k)]) return k;
  fail(where, "unknown regulator arm \"" + key + "\" for this configuration");
}

Edge parse_edge(const json& je, size_t position) {
  const std::string where =
      "edges[" + std::to_string(position) + "]" + (je.contains("id") ? " (" + je.at("id").get<std::string>() + ")" : "");
  Edge e;
  for (const char* req : {"id", "kind", "from", "to"})
    if (!je.contains(req)) fail(where, std::string("missing \"") + req + "\"");
  e.id = je.at("id").get<std::string>();
  e.from = je.at("from").get<std::string>();
  e.to = je.at("to").get<std::string>();
  const std::string kind = je.at("kind").get<std::string>();

  if (kind == "line") {
    if (!je.contains("phases")) fail(where, "missing \"phases\"");
    e.phases = PhaseSet::parse(je.at("phases").get<std::string>());
    e.element = parse_line_spec(je, e.phases, where);
  } else if (kind == "transformer") {
    TransformerSpec spec;
    if (!je.contains("connection")) fail(where, "missing \"connection\"");
    const std::string cname = je.at("connection").get<std::string>();
    auto it = connection_names().find(cname);
    if (it == connection_names().end()) fail(where, "unknown connection \"" + cname + "\"");
    spec.connection = it->second;
    if (je.contains("y_t")) {
      spec.y_t = parse_complex(je.at("y_t"), where + ".y_t");
    } else if (je.contains("z_t")) {
      const cx z = parse_complex(je.at("z_t"), where + ".z_t");
      if (z == cx{}) fail(where, "z_t must be nonzero");
      spec.y_t = 1.0 / z;
    } else {
      fail(where, "missing \"y_t\" or \"z_t\"");
    }
    e.phases = spec.connection == XfmrConnection::OpenWyeOpenDelta
                   ? PhaseSet::of({Phase::A, Phase::B})
                   : PhaseSet::abc();
    if (je.contains("phases")) e.phases = PhaseSet::parse(je.at("phases").get<std::string>());
    e.element = spec;
  } else if (kind == "svr") {
    RegulatorSpec spec;
    if (!je.contains("phases")) fail(where, "missing \"phases\"");
    e.phases = PhaseSet::parse(je.at("phases").get<std::string>());
    spec.phases = e.phases;
    const std::string config = je.contains("config") ? je.at("config").get<std::string>() : "wye";
    if (config == "wye") spec.config = SvrConfig::Wye;
    else if (config == "closed-delta") spec.config = SvrConfig::ClosedDelta;
    else if (config == "open-delta") spec.config = SvrConfig::OpenDelta;
    else fail(where, "unknown regulator config \"" + config + "\"");
    const std::string type = je.contains("svr_type") ? je.at("svr_type").get<std::string>() : "B";
    if (type == "A") spec.type = SvrType::A;
    else if (type == "B") spec.type = SvrType::B;
    else fail(where, "unknown svr_type \"" + type + "\" (expected A or B)");
    if (je.contains("taps"))
      for (const auto& [key, value] : je.at("taps").items()) {
        if (!value.is_number_integer()) fail(where, "taps must be integers");
        spec.taps[static_cast<size_t>(svr_arm(key, spec.config, where + ".taps"))] = value.get<int>();
      }
    if (je.contains("z_r"))
      for (const auto& [key, value] : je.at("z_r").items())
        spec.z_r[static_cast<size_t>(svr_arm(key, spec.config, where + ".z_r"))] =
            parse_complex(value, where + ".z_r." + key);
    if (!je.contains("line")) fail(where, "missing regulator \"line\"");
    spec.line = parse_line_spec(je.at("line"), e.phases, where + ".line");
    spec.internal_id = je.contains("internal_id") ? je.at("internal_id").get<std::string>()
                                                  : e.id + "_sec";
    e.element = spec;
  } else {
    fail(where, "unknown edge kind \"" + kind + "\" (expected line|transformer|svr)");
  }
  return e;
}

Feeder parse_document(const json& doc) {
  if (!doc.is_object()) throw ParseError("document: expected a JSON object");
  if (!doc.contains("schema_version") || !doc.at("schema_version").is_number_integer() ||
      doc.at("schema_version").get<int>() != 1)
    throw ParseError("document: unsupported or missing schema_version (expected 1)");

  Feeder f;
  f.name = doc.value("name", std::string{});

  if (!doc.contains("slack") || !doc.at("slack").is_object() || !doc.at("slack").contains("bus"))
    throw ParseError("document: missing slack record");
  f.slack_id = doc.at("slack").at("bus").get<std::string>();
  f.v_slack = symmetrical_slack_voltage();
  if (doc.at("slack").contains("voltage")) {
    const json& jv = doc.at("slack").at("voltage");
    if (jv.contains("phasors")) {
      if (!jv.at("phasors").is_array() || jv.at("phasors").size() != 3)
        throw ParseError("slack.voltage.phasors: expected three [re, im] pairs");
      for (int k = 0; k < 3; ++k)
        f.v_slack(k) = parse_complex(jv.at("phasors")[static_cast<size_t>(k)], "slack.voltage.phasors");
    } else {
      const double mag = jv.value("magnitude_pu", 1.0);
      std::array<double, 3> deg{0.0, -120.0, 120.0};
      if (jv.contains("angles_deg")) {
        if (!jv.at("angles_deg").is_array() || jv.at("angles_deg").size() != 3)
          throw ParseError("slack.voltage.angles_deg: expected three angles");
        for (int k = 0; k < 3; ++k) deg[static_cast<size_t>(k)] = jv.at("angles_deg")[static_cast<size_t>(k)].get<double>();
      }
      for (int k = 0; k < 3; ++k)
        f.v_slack(k) = std::polar(mag, deg[static_cast<size_t>(k)] * std::numbers::pi / 180.0);
    }
  }

  if (!doc.contains("buses") || !doc.at("buses").is_array()) throw ParseError("document: missing buses array");
  for (size_t i = 0; i < doc.at("buses").size(); ++i) {
    const json& jb = doc.at("buses")[i];
    const std::string where = "buses[" + std::to_string(i) + "]";
    Bus b;
    if (!jb.contains("id")) fail(where, "missing \"id\"");
    b.id = jb.at("id").get<std::string>();
    const std::string conn = jb.value("connection", b.id == f.slack_id ? "slack" : "wye");
    if (conn == "wye") b.kind = BusKind::Wye;
    else if (conn == "delta") b.kind = BusKind::Delta;
    else if (conn == "slack") b.kind = BusKind::Slack;
    else fail(where, "unknown connection \"" + conn + "\"");
    if (!jb.contains("phases")) fail(where, "missing \"phases\"");
    b.phases = PhaseSet::parse(jb.at("phases").get<std::string>());
    b.load = parse_bus_load(jb, b, where);
    f.buses.push_back(std::move(b));
  }

  if (doc.contains("edges")) {
    if (!doc.at("edges").is_array()) throw ParseError("document: edges must be an array");
    for (size_t i = 0; i < doc.at("edges").size(); ++i) f.edges.push_back(parse_edge(doc.at("edges")[i], i));
  }

  try {
    f.validate();
  } catch (const ValidationError& err) {
    throw ParseError(std::string("validation: ") + err.what());
  }
  return f;
}

json dump_zip_terms(const std::array<cx, 3>& terms, bool delta) {
  json out = json::object();
  for (int k = 0; k < 3; ++k) {
    if (terms[static_cast<size_t>(k)] == cx{}) continue;
    const std::string key = delta ? pair_name(k) : std::string(1, "abc"[k]);
    out[key] = dump_complex(terms[static_cast<size_t>(k)]);
  }
  return out;
}

json dump_document(const Feeder& f) {
  json doc;
  doc["schema_version"] = 1;
  if (!f.name.empty()) doc["name"] = f.name;
  json slack;
  slack["bus"] = f.slack_id;
  json phasors = json::array();
  for (int k = 0; k < 3; ++k) phasors.push_back(dump_complex(f.v_slack(k)));
  slack["voltage"] = json{{"phasors", phasors}};
  doc["slack"] = slack;

  json buses = json::array();
  for (const Bus& b : f.buses) {
    json jb;
    jb["id"] = b.id;
    jb["connection"] = b.kind == BusKind::Slack ? "slack" : (b.kind == BusKind::Delta ? "delta" : "wye");
    jb["phases"] = b.phases.str();
    if (b.load) {
      const bool delta = std::holds_alternative<DeltaZip>(*b.load);
      json jl = json::object();
      std::visit(
          [&](const auto& zip) {
            json s = dump_zip_terms(zip.s, delta), i = dump_zip_terms(zip.i, delta),
                 y = dump_zip_terms(zip.y, delta);
            if (!s.empty()) jl["s"] = s;
            if (!i.empty()) jl["i"] = i;
            if (!y.empty()) jl["y"] = y;
            if (zip.fixed_phasor_current) jl["fixed_phasor_current"] = true;
          },
          *b.load);
      jb["load"] = jl;
    }
    buses.push_back(jb);
  }
  doc["buses"] = buses;

  json edges = json::array();
  for (const Edge& e : f.edges) {
    json je;
    je["id"] = e.id;
    je["from"] = e.from;
    je["to"] = e.to;
    je["phases"] = e.phases.str();
    if (const auto* line = std::get_if<LineSpec>(&e.element)) {
      je["kind"] = "line";
      je["z"] = dump_matrix(line->z);
      je["y_shunt"] = dump_matrix(line->y_shunt);
    } else if (const auto* xfmr = std::get_if<TransformerSpec>(&e.element)) {
      je["kind"] = "transformer";
      je["connection"] = connection_name(xfmr->connection);
      je["y_t"] = dump_complex(xfmr->y_t);
    } else {
      const auto& svr = std::get<RegulatorSpec>(e.element);
      je["kind"] = "svr";
      je["config"] = svr.config == SvrConfig::Wye
                         ? "wye"
                         : (svr.config == SvrConfig::ClosedDelta ? "closed-delta" : "open-delta");
      je["svr_type"] = svr.type == SvrType::A ? "A" : "B";
      json taps = json::object(), zr = json::object();
      const auto& names = svr_arm_names(svr.config);
      for (int k = 0; k < 3; ++k) {
        if (names[static_cast<size_t>(k)][0] == '\0') continue;
        if (svr.config == SvrConfig::Wye && !svr.phases.contains(static_cast<Phase>(k))) continue;
        taps[names[static_cast<size_t>(k)]] = svr.taps[static_cast<size_t>(k)];
        if (svr.z_r[static_cast<size_t>(k)] != cx{})
          zr[names[static_cast<size_t>(k)]] = dump_complex(svr.z_r[static_cast<size_t>(k)]);
      }
      je["taps"] = taps;
      if (!zr.empty()) je["z_r"] = zr;
      je["internal_id"] = svr.internal_id;
      json jl;
      jl["phases"] = svr.line.phases.str();
      jl["z"] = dump_matrix(svr.line.z);
      jl["y_shunt"] = dump_matrix(svr.line.y_shunt);
      je["line"] = jl;
    }
    edges.push_back(je);
  }
  doc["edges"] = edges;
  return doc;
}

/// Numeric-aware label ordering: digit runs compare as integers.
bool natural_less(const std::string& a, const std::string& b) {
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (std::isdigit(static_cast<unsigned char>(a[i])) && std::isdigit(static_cast<unsigned char>(b[j]))) {
      size_t i2 = i, j2 = j;
      while (i2 < a.size() && std::isdigit(static_cast<unsigned char>(a[i2]))) ++i2;
      while (j2 < b.size() && std::isdigit(static_cast<unsigned char>(b[j2]))) ++j2;
      const std::string da = a.substr(i, i2 - i), db = b.substr(j, j2 - j);
      const std::string ta = da.substr(da.find_first_not_of('0') == std::string::npos ? da.size() - 1 : da.find_first_not_of('0'));
      const std::string tb = db.substr(db.find_first_not_of('0') == std::string::npos ? db.size() - 1 : db.find_first_not_of('0'));
      if (ta.size() != tb.size()) return ta.size() < tb.size();
      if (ta != tb) return ta < tb;
      i = i2;
      j = j2;
    } else {
      if (a[i] != b[j]) return a[i] < b[j];
      ++i;
      ++j;
    }
  }
  return a.size() < b.size();
}

std::string format_row(const std::string& bus, Phase p, double vm, double va) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%s,%c,%.6f,%.6f", bus.c_str(), phase_char(p), vm, va);
  return buf;
}

}  // namespace

Feeder parse_feeder_string(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  try {
    return parse_document(doc);
  } catch (const ParseError&) {
    throw;
  } catch (const ValidationError& e) {
    throw ParseError(std::string("validation: ") + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("document: ") + e.what());
  }
}

Feeder parse_feeder(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open feeder file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_feeder_string(buffer.str());
}

std::string serialize_feeder(const Feeder& feeder) { return dump_document(feeder).dump(2) + "\n"; }

ResultDocument ResultDocument::build(const Feeder& feeder, const PhaseIndexMap& index,
                                     const SolverResult& result, const SolverConfig& config) {
  ResultDocument doc;
  doc.iterations = result.iterations;
  doc.residual_inf = result.residual_inf;
  doc.epsilon_rel = config.build.epsilon_rel;
  doc.tol = config.tol;

  std::vector<int> order(feeder.buses.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return natural_less(feeder.buses[static_cast<size_t>(a)].id, feeder.buses[static_cast<size_t>(b)].id);
  });

  const int slack = index.slack_position();
  for (int b : order) {
    const Bus& bus = feeder.buses[static_cast<size_t>(b)];
    for (Phase p : bus.phases) {
      cx v = b == slack ? feeder.v_slack(static_cast<int>(p))
                        : result.v(index.index_of(b, p));
      doc.rows.push_back({bus.id, p, std::abs(v), std::arg(v) * 180.0 / std::numbers::pi});
    }
  }

  const auto internal = recover_regulator_internal_voltages(feeder, index, result.v, config.build);
  std::vector<std::pair<std::string, std::string>> labels;  // (label, edge id)
  for (const Edge& e : feeder.edges)
    if (e.is_svr()) labels.emplace_back(std::get<RegulatorSpec>(e.element).internal_id, e.id);
  std::sort(labels.begin(), labels.end(),
            [](const auto& a, const auto& b) { return natural_less(a.first, b.first); });
  for (const auto& [label, edge_id] : labels) {
    const Edge& e = *std::find_if(feeder.edges.begin(), feeder.edges.end(),
                                  [&](const Edge& x) { return x.id == edge_id; });
    const auto& spec = std::get<RegulatorSpec>(e.element);
    const Vec& v = internal.at(edge_id);
    int r = 0;
    for (Phase p : spec.phases) {
      doc.rows.push_back({label, p, std::abs(v(r)), std::arg(v(r)) * 180.0 / std::numbers::pi});
      ++r;
    }
  }
  return doc;
}

std::string ResultDocument::csv() const {
  std::string out = "# feederflow load-flow results\n";
  char meta[160];
  std::snprintf(meta, sizeof(meta), "# iterations=%d residual_inf=%.3e epsilon_rel=%.3e tol=%.3e\n",
                iterations, residual_inf, epsilon_rel, tol);
  out += meta;
  out += "bus,phase,vm_pu,va_deg\n";
  for (const Row& r : rows) out += format_row(r.bus, r.phase, r.vm_pu, r.va_deg) + "\n";
  return out;
}

void ResultDocument::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open output file " + path.string());
  out << csv();
}

std::vector<ResultDocument::Row> read_result_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open results file " + path.string());
  std::vector<ResultDocument::Row> rows;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {  // "bus,phase,vm_pu,va_deg"
      header_seen = true;
      continue;
    }
    std::stringstream ss(line);
    std::string bus, phase, vm, va;
    if (!std::getline(ss, bus, ',') || !std::getline(ss, phase, ',') || !std::getline(ss, vm, ',') ||
        !std::getline(ss, va, ','))
      throw ParseError("malformed results row: " + line);
    if (phase.size() != 1 || (phase[0] != 'a' && phase[0] != 'b' && phase[0] != 'c'))
      throw ParseError("malformed phase in results row: " + line);
    rows.push_back({bus, static_cast<Phase>(phase[0] - 'a'), std::stod(vm), std::stod(va)});
  }
  return rows;
}

std::string ybus_triplets(const YBusPartition& partition, const PhaseIndexMap& index) {
  const Eigen::SparseMatrix<cx> y = partition.sparse_y(index);
  std::string out = "# feederflow ybus export: row col re im (1-based, row-major)\n# dimension " +
                    std::to_string(index.size()) + "\n";
  std::vector<std::tuple<int, int, cx>> entries;
  for (int k = 0; k < y.outerSize(); ++k)
    for (Eigen::SparseMatrix<cx>::InnerIterator it(y, k); it; ++it)
      entries.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
  });
  char buf[128];
  for (const auto& [r, c, v] : entries) {
    std::snprintf(buf, sizeof(buf), "%d %d %.17g %.17g\n", r + 1, c + 1, v.real(), v.imag());
    out += buf;
  }
  return out;
}

namespace {

struct CliOptions {
  std::string feeder_path;
  std::string out_path;
  double epsilon = 1e-6;
  std::string epsilon_mode = "resistive";
  double tol = 1e-9;
  int max_iter = 100;
  bool ideal_svr = false;
  double eps_from = 1e-2, eps_to = 1e-10;
  int steps = 9;
};

BuildOptions build_options(const CliOptions& o) {
  BuildOptions b;
  b.epsilon_rel = o.epsilon;
  b.mode = o.epsilon_mode == "reactive" ? EpsilonMode::Reactive : EpsilonMode::Resistive;
  b.ideal_svr = o.ideal_svr;
  return b;
}

void write_or_print(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw ParseError("cannot open output file " + out_path);
  f << text;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Three-phase feeder Y-Bus construction and Z-Bus load flow"};
  app.require_subcommand(1);
  CliOptions o;

  auto add_common = [&](CLI::App* cmd, bool with_solver_flags) {
    cmd->add_option("--feeder", o.feeder_path, "feeder description JSON")->required();
    cmd->add_option("--epsilon", o.epsilon, "shunt regularization relative to |y_t|");
    cmd->add_option("--epsilon-mode", o.epsilon_mode, "resistive|reactive")
        ->check(CLI::IsMember({"resistive", "reactive"}));
    if (with_solver_flags) {
      cmd->add_option("--tol", o.tol, "voltage-change convergence tolerance, pu");
      cmd->add_option("--max-iter", o.max_iter, "iteration limit");
      cmd->add_flag("--ideal-svr", o.ideal_svr, "force ideal regulator models (Z_R = 0)");
    }
  };

  CLI::App* build = app.add_subcommand("build", "assemble the bus admittance matrix and export triplets");
  add_common(build, false);
  build->add_option("--out", o.out_path, "triplet output path (default stdout)");

  CLI::App* solve_cmd = app.add_subcommand("solve", "run the Z-Bus load flow");
  add_common(solve_cmd, true);
  solve_cmd->add_option("--out", o.out_path, "results CSV path (default stdout)");

  CLI::App* check = app.add_subcommand("check", "run the structural diagnostics ledger");
  add_common(check, false);

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "solve across a range of epsilon values");
  add_common(sweep_cmd, true);
  sweep_cmd->add_option("--epsilon-from", o.eps_from, "largest epsilon (relative)");
  sweep_cmd->add_option("--epsilon-to", o.eps_to, "smallest epsilon (relative)");
  sweep_cmd->add_option("--steps", o.steps, "number of solves")->check(CLI::Range(2, 1000));
  sweep_cmd->add_option("--out", o.out_path, "sweep CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      out << app.help();
      return 0;
    }
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    const Feeder feeder = parse_feeder(o.feeder_path);
    const PhaseIndexMap index = PhaseIndexMap::build(feeder);

    if (build->parsed()) {
      const YBusPartition part = assemble(feeder, index, build_options(o));
      write_or_print(ybus_triplets(part, index), o.out_path, out);
      return 0;
    }

    if (solve_cmd->parsed()) {
      SolverConfig config;
      config.tol = o.tol;
      config.max_iter = o.max_iter;
      config.build = build_options(o);
      const SolverResult result = solve(feeder, config);
      if (!result.converged)
        throw DivergenceError("load flow did not converge within " + std::to_string(o.max_iter) +
                              " iterations (residual " + std::to_string(result.residual_inf) + ")");
      write_or_print(ResultDocument::build(feeder, index, result, config).csv(), o.out_path, out);
      return 0;
    }

    if (check->parsed()) {
      const BuildOptions options = build_options(o);
      const YBusPartition part = assemble(feeder, index, options);
      const LoadAdmittance load = assemble_load_admittance(feeder, index);
      const Diagnostics d = check_invertibility(feeder, index, part, load, options);
      for (const auto& row : d.ledger)
        out << (row.pass ? "[PASS] " : "[FAIL] ") << row.name
            << (row.detail.empty() ? "" : " -- " + row.detail) << "\n";
      char buf[256];
      std::snprintf(buf, sizeof(buf),
                    "symmetry defect %.3e | definiteness eig %.6e | sigma(Y) [%.3e, %.3e] | "
                    "sigma(Y+YL) [%.3e, %.3e] | rank %d/%d\n",
                    d.symmetry_defect, d.definiteness_eig, d.sigma_min_y, d.sigma_max_y,
                    d.sigma_min_yyl, d.sigma_max_yyl, d.rank_yyl, d.dimension);
      out << buf;
      out << (d.structural_pass ? "structural checks: PASS\n" : "structural checks: FAIL\n");
      return d.structural_pass ? 0 : 4;
    }

    // sweep
    if (o.eps_from <= o.eps_to) throw ValidationError("--epsilon-from must exceed --epsilon-to");
    std::vector<double> eps(static_cast<size_t>(o.steps));
    const double ratio = std::pow(o.eps_to / o.eps_from, 1.0 / (o.steps - 1));
    for (int k = 0; k < o.steps; ++k) eps[static_cast<size_t>(k)] = o.eps_from * std::pow(ratio, k);
    SolverConfig config;
    config.tol = o.tol;
    config.max_iter = o.max_iter;
    config.build = build_options(o);
    const auto rows = epsilon_sweep(feeder, eps, config);
    std::string csv = "epsilon_rel,max_vm_diff\n";
    char buf[64];
    for (const auto& [e, diff] : rows) {
      std::snprintf(buf, sizeof(buf), "%.6e,%.6e\n", e, diff);
      csv += buf;
    }
    write_or_print(csv, o.out_path, out);
    return 0;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return 3;
  } catch (const ValidationError& e) {
    err << "parse error: " << e.what() << "\n";
    return 3;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace feederflow
