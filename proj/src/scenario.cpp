#include "metanets/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace metanets {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

[[noreturn]] void bail(int line, const std::string& msg) {
  std::ostringstream os;
  os << "line " << line << ": " << msg;
  throw ScenarioError(os.str());
}

double parse_double(const std::string& tok, int line, const std::string& what) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end != tok.c_str() + tok.size() || tok.empty())
    bail(line, "bad number '" + tok + "' for " + what);
  return v;
}

std::int64_t parse_int(const std::string& tok, int line, const std::string& what) {
  char* end = nullptr;
  const long long v = std::strtoll(tok.c_str(), &end, 10);
  if (end != tok.c_str() + tok.size() || tok.empty())
    bail(line, "bad integer '" + tok + "' for " + what);
  return v;
}

Schedule parse_schedule(const std::string& value, int line, const std::string& what) {
  const auto toks = split_ws(value);
  if (toks.empty()) bail(line, "empty schedule for " + what);
  if (toks.size() == 1 && toks[0].find(':') == std::string::npos)
    return Schedule::constant(parse_double(toks[0], line, what));
  std::vector<std::pair<std::int64_t, double>> points;
  for (const auto& t : toks) {
    const auto colon = t.find(':');
    if (colon == std::string::npos) bail(line, "schedule entries are step:value for " + what);
    points.emplace_back(parse_int(t.substr(0, colon), line, what),
                        parse_double(t.substr(colon + 1), line, what));
  }
  for (std::size_t i = 1; i < points.size(); ++i)
    if (points[i].first <= points[i - 1].first)
      bail(line, "schedule steps must be strictly increasing for " + what);
  if (points.front().first != 0) bail(line, "schedules must start at step 0 for " + what);
  return Schedule::piecewise(std::move(points));
}

std::map<LinkId, double> parse_split(const std::string& value, int line, const std::string& what) {
  std::map<LinkId, double> out;
  for (const auto& t : split_ws(value)) {
    const auto colon = t.find(':');
    if (colon == std::string::npos) bail(line, "entries are dest:fraction for " + what);
    const std::string label = t.substr(0, colon);
    if (!out.emplace(label, parse_double(t.substr(colon + 1), line, what)).second)
      bail(line, "duplicate destination '" + label + "' in " + what);
  }
  return out;
}

std::vector<double> parse_list(const std::string& value, int line, const std::string& what) {
  std::vector<double> out;
  for (const auto& t : split_ws(value)) out.push_back(parse_double(t, line, what));
  return out;
}

DemandProfile parse_demand(const std::string& value, int line) {
  const auto toks = split_ws(value);
  DemandProfile d;
  if (toks.empty()) bail(line, "empty demand");
  if (toks[0] == "const") {
    if (toks.size() != 2) bail(line, "demand const takes one value");
    d.kind = DemandProfile::Kind::constant;
    d.value = parse_double(toks[1], line, "demand");
    return d;
  }
  if (toks[0] == "peak") {
    d.kind = DemandProfile::Kind::peak;
    if (toks.size() == 1) return d;  // floor 500, peak 2500, center 30000, slope_den 9
    if (toks.size() != 5) bail(line, "demand peak takes floor, peak, center_step, slope_den");
    d.floor_veh_h = parse_double(toks[1], line, "demand floor");
    d.peak_veh_h = parse_double(toks[2], line, "demand peak");
    d.center_step = parse_int(toks[3], line, "demand center");
    d.slope_den = parse_double(toks[4], line, "demand slope_den");
    return d;
  }
  bail(line, "demand is 'const <v>' or 'peak [floor peak center_step slope_den]'");
}

struct Entry {
  std::string value;
  int line = 0;
  bool used = false;
};

// Key/value view of one section with unknown-key detection.
class SectionReader {
 public:
  SectionReader(const Document::Section& sec) : sec_(sec) {
    for (const auto& [k, v] : sec.entries) {
      if (entries_.count(k)) bail(sec.line, "duplicate key '" + k + "' in [" + sec.kind + "]");
      entries_[k] = {v, sec.line, false};
    }
  }

  const Entry* find(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return nullptr;
    it->second.used = true;
    return &it->second;
  }

  std::string require(const std::string& key) {
    const Entry* e = find(key);
    if (!e) bail(sec_.line, "[" + sec_.kind + " " + sec_.name + "] missing key '" + key + "'");
    return e->value;
  }

  void finish() const {
    for (const auto& [k, e] : entries_)
      if (!e.used)
        bail(e.line, "unknown key '" + k + "' in [" + sec_.kind +
                         (sec_.name.empty() ? "" : " " + sec_.name) + "]");
  }

  // Route entries: "route <dest> -> <out>".
  std::vector<NodeSpec::Route> take_routes() {
    std::vector<NodeSpec::Route> routes;
    for (auto& [k, e] : entries_) {
      const auto toks = split_ws(k);
      if (toks.size() == 4 && toks[0] == "route" && toks[2] == "->") {
        NodeSpec::Route r;
        r.destination = toks[1];
        r.out_link = toks[3];
        r.share = parse_schedule(e.value, e.line, "route " + toks[1]);
        routes.push_back(std::move(r));
        e.used = true;
      }
    }
    return routes;
  }

 private:
  const Document::Section& sec_;
  std::map<std::string, Entry> entries_;
};

const std::set<std::string> kKinds = {"sim",     "output",  "params",      "freeway",
                                      "origin",  "saf",     "destination", "station",
                                      "node"};

}  // namespace

Document parse_document(const std::string& text) {
  Document doc;
  std::istringstream is(text);
  std::string raw;
  int line = 0;
  Document::Section* current = nullptr;
  while (std::getline(is, raw)) {
    ++line;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string s = trim(raw);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') bail(line, "unterminated section header");
      const auto toks = split_ws(s.substr(1, s.size() - 2));
      if (toks.empty() || toks.size() > 2) bail(line, "section header is [kind name]");
      Document::Section sec;
      sec.kind = toks[0];
      if (toks.size() == 2) sec.name = toks[1];
      sec.line = line;
      if (!kKinds.count(sec.kind)) bail(line, "unknown section kind '" + sec.kind + "'");
      if ((sec.kind == "sim" || sec.kind == "output") != sec.name.empty())
        bail(line, sec.name.empty() ? "section [" + sec.kind + "] needs a name"
                                    : "section [" + sec.kind + "] takes no name");
      doc.sections.push_back(std::move(sec));
      current = &doc.sections.back();
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) bail(line, "expected 'key = value'");
    if (!current) bail(line, "entry outside of any section");
    current->entries.emplace_back(trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
  }
  return doc;
}

ParseResult build_spec(const Document& doc) {
  ParseResult result;
  NetworkSpec& spec = result.spec;

  // Pass 1: the sim section (step length is needed for dwell_h) and the named
  // parameter sets.
  bool have_sim = false;
  for (const auto& sec : doc.sections) {
    if (sec.kind == "sim") {
      if (have_sim) bail(sec.line, "duplicate [sim] section");
      have_sim = true;
      SectionReader r(sec);
      spec.step_h = parse_double(r.require("step_h"), sec.line, "step_h");
      spec.horizon_steps = parse_int(r.require("horizon_steps"), sec.line, "horizon_steps");
      if (const Entry* e = r.find("output_stride"))
        spec.output_stride = parse_int(e->value, e->line, "output_stride");
      r.finish();
    } else if (sec.kind == "params") {
      if (spec.param_sets.count(sec.name)) bail(sec.line, "duplicate params set " + sec.name);
      SectionReader r(sec);
      FreewayParams p;
      p.v_free = parse_double(r.require("v_free_km_h"), sec.line, "v_free_km_h");
      p.rho_crit = parse_double(r.require("rho_crit_veh_km_lane"), sec.line, "rho_crit");
      p.rho_jam = parse_double(r.require("rho_jam_veh_km_lane"), sec.line, "rho_jam");
      p.exponent = parse_double(r.require("exponent_a"), sec.line, "exponent_a");
      p.tau = parse_double(r.require("tau_h"), sec.line, "tau_h");
      p.anticipation = parse_double(r.require("anticipation_v_km2_h"), sec.line, "anticipation");
      p.stability = parse_double(r.require("stability_k_veh_km"), sec.line, "stability");
      if (const Entry* e = r.find("v_min_km_h"))
        p.v_min = parse_double(e->value, e->line, "v_min_km_h");
      // Accepted for compatibility with full parameter tables; the merging and
      // lane-drop speed terms are not modeled.
      if (r.find("merging_delta_h_km"))
        result.warnings.push_back("params " + sec.name +
                                  ": merging_delta_h_km accepted but ignored");
      if (r.find("lane_drop_phi_h_km"))
        result.warnings.push_back("params " + sec.name +
                                  ": lane_drop_phi_h_km accepted but ignored");
      r.finish();
      spec.param_sets[sec.name] = p;
    }
  }
  if (!have_sim) throw ScenarioError("missing [sim] section");

  // Pass 2: everything else, in file order.
  for (const auto& sec : doc.sections) {
    if (sec.kind == "sim" || sec.kind == "params") continue;
    SectionReader r(sec);
    if (sec.kind == "output") {
      if (const Entry* e = r.find("series"))
        for (const auto& q : split_ws(e->value)) spec.default_series.push_back(q);
      r.finish();
      continue;
    }
    if (sec.kind == "destination") {
      r.finish();
      spec.destination_links.push_back(sec.name);
      continue;
    }
    if (sec.kind == "freeway") {
      FreewayLink f;
      f.id = sec.name;
      if (const Entry* e = r.find("sections"))
        f.n_sections = static_cast<int>(parse_int(e->value, e->line, "sections"));
      f.length_km = parse_double(r.require("length_km"), sec.line, "length_km");
      f.lanes = static_cast<int>(parse_int(r.require("lanes"), sec.line, "lanes"));
      f.params_ref = r.require("params");
      auto it = spec.param_sets.find(f.params_ref);
      if (it == spec.param_sets.end())
        bail(sec.line, "freeway " + f.id + " references unknown params set '" + f.params_ref + "'");
      f.params = it->second;
      for (const auto& d : split_ws(r.require("destinations"))) f.destinations.push_back(d);
      if (const Entry* e = r.find("init_density"))
        f.init_density = parse_list(e->value, e->line, "init_density");
      if (const Entry* e = r.find("init_speed"))
        f.init_speed = parse_list(e->value, e->line, "init_speed");
      if (const Entry* e = r.find("init_composition"))
        f.init_composition = parse_split(e->value, e->line, "init_composition");
      r.finish();
      spec.freeways.push_back(std::move(f));
      continue;
    }
    if (sec.kind == "origin" || sec.kind == "saf") {
      QueueLinkSpec q;
      q.id = sec.name;
      q.kind = sec.kind == "origin" ? QueueKind::origin : QueueKind::saf;
      q.max_flow = parse_double(r.require("max_flow_veh_h"), sec.line, "max_flow_veh_h");
      for (const auto& d : split_ws(r.require("destinations"))) q.destinations.push_back(d);
      if (const Entry* e = r.find("composition"))
        q.composition = parse_split(e->value, e->line, "composition");
      if (const Entry* e = r.find("metering"))
        q.metering = parse_schedule(e->value, e->line, "metering");
      if (const Entry* e = r.find("init_queue_veh"))
        q.init_queue = parse_double(e->value, e->line, "init_queue_veh");
      if (q.kind == QueueKind::origin) {
        q.demand = parse_demand(r.require("demand"), sec.line);
        if (const Entry* e = r.find("demand_scale"))
          q.demand_scale = parse_double(e->value, e->line, "demand_scale");
      }
      r.finish();
      spec.queues.push_back(std::move(q));
      continue;
    }
    if (sec.kind == "station") {
      StationSpec st;
      st.id = sec.name;
      st.upstream_ramp = r.require("upstream_ramp");
      st.downstream_ramp = r.require("downstream_ramp");
      const Entry* dwell_steps = r.find("dwell_steps");
      const Entry* dwell_h = r.find("dwell_h");
      if ((dwell_steps != nullptr) == (dwell_h != nullptr))
        bail(sec.line, "station " + st.id + " needs exactly one of dwell_steps or dwell_h");
      if (dwell_steps)
        st.dwell_steps = parse_int(dwell_steps->value, dwell_steps->line, "dwell_steps");
      else
        st.dwell_steps = std::llround(
            parse_double(dwell_h->value, dwell_h->line, "dwell_h") / spec.step_h);
      st.capacity_flow = parse_double(r.require("capacity_veh_h"), sec.line, "capacity_veh_h");
      if (const Entry* e = r.find("avg_vehicle_length_m"))
        st.avg_vehicle_length_m = parse_double(e->value, e->line, "avg_vehicle_length_m");
      const Entry* max_occ = r.find("max_occupancy_veh");
      const Entry* length = r.find("length_km");
      if (max_occ) {
        st.max_occupancy = parse_double(max_occ->value, max_occ->line, "max_occupancy_veh");
        st.explicit_max_occupancy = true;
      }
      if (length) {
        st.station_length_km = parse_double(length->value, length->line, "length_km");
        if (!max_occ)
          st.max_occupancy =
              std::round(st.station_length_km * 1000.0 / st.avg_vehicle_length_m);
      }
      if (!max_occ && !length)
        bail(sec.line, "station " + st.id + " needs max_occupancy_veh or length_km");
      if (const Entry* e = r.find("exit_metering"))
        st.exit_metering = parse_schedule(e->value, e->line, "exit_metering");
      if (const Entry* e = r.find("exit_split"))
        st.exit_split = parse_split(e->value, e->line, "exit_split");
      if (const Entry* e = r.find("init_occupancy_veh"))
        st.init_occupancy = parse_double(e->value, e->line, "init_occupancy_veh");
      if (const Entry* e = r.find("init_exit_queue_veh"))
        st.init_exit_queue = parse_double(e->value, e->line, "init_exit_queue_veh");
      if (const Entry* e = r.find("init_history"))
        st.init_history = parse_list(e->value, e->line, "init_history");
      r.finish();
      spec.stations.push_back(std::move(st));
      continue;
    }
    if (sec.kind == "node") {
      NodeSpec n;
      n.id = sec.name;
      for (const auto& t : split_ws(r.require("in"))) n.in_links.push_back(t);
      for (const auto& t : split_ws(r.require("out"))) n.out_links.push_back(t);
      n.routes = r.take_routes();
      r.finish();
      spec.nodes.push_back(std::move(n));
      continue;
    }
  }
  return result;
}

ParseResult parse_scenario(const std::string& text) { return build_spec(parse_document(text)); }

ParseResult load_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError("cannot open scenario file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return parse_scenario(os.str());
}

namespace {

std::string num17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string schedule_text(const Schedule& s) {
  if (s.is_constant()) return num17(s.at(0));
  std::string out;
  for (const auto& [k, v] : s.points()) {
    if (!out.empty()) out += ' ';
    out += std::to_string(k) + ":" + num17(v);
  }
  return out;
}

std::string split_text(const std::map<LinkId, double>& m) {
  std::string out;
  for (const auto& [label, frac] : m) {
    if (!out.empty()) out += ' ';
    out += label + ":" + num17(frac);
  }
  return out;
}

std::string list_text(const std::vector<double>& v) {
  std::string out;
  for (double x : v) {
    if (!out.empty()) out += ' ';
    out += num17(x);
  }
  return out;
}

std::string id_list(const std::vector<LinkId>& v) {
  std::string out;
  for (const auto& x : v) {
    if (!out.empty()) out += ' ';
    out += x;
  }
  return out;
}

}  // namespace

std::string serialize(const NetworkSpec& spec) {
  std::ostringstream os;
  os << "[sim]\n";
  os << "step_h = " << num17(spec.step_h) << "\n";
  os << "horizon_steps = " << spec.horizon_steps << "\n";
  os << "output_stride = " << spec.output_stride << "\n";
  if (!spec.default_series.empty()) {
    os << "\n[output]\n";
    os << "series =";
    for (const auto& q : spec.default_series) os << ' ' << q;
    os << "\n";
  }

  // Named parameter sets; links built programmatically without a set get one.
  std::map<std::string, FreewayParams> sets = spec.param_sets;
  std::vector<std::string> refs(spec.freeways.size());
  for (std::size_t i = 0; i < spec.freeways.size(); ++i) {
    const auto& f = spec.freeways[i];
    refs[i] = f.params_ref;
    if (refs[i].empty() || !sets.count(refs[i])) {
      refs[i] = refs[i].empty() ? "p_" + f.id : refs[i];
      sets[refs[i]] = f.params;
    }
  }
  for (const auto& [name, p] : sets) {
    os << "\n[params " << name << "]\n";
    os << "v_free_km_h = " << num17(p.v_free) << "\n";
    os << "rho_crit_veh_km_lane = " << num17(p.rho_crit) << "\n";
    os << "rho_jam_veh_km_lane = " << num17(p.rho_jam) << "\n";
    os << "exponent_a = " << num17(p.exponent) << "\n";
    os << "tau_h = " << num17(p.tau) << "\n";
    os << "anticipation_v_km2_h = " << num17(p.anticipation) << "\n";
    os << "stability_k_veh_km = " << num17(p.stability) << "\n";
    os << "v_min_km_h = " << num17(p.v_min) << "\n";
  }

  for (const auto& d : spec.destination_links) os << "\n[destination " << d << "]\n";

  for (const auto& q : spec.queues) {
    os << "\n[" << (q.kind == QueueKind::origin ? "origin" : "saf") << " " << q.id << "]\n";
    os << "max_flow_veh_h = " << num17(q.max_flow) << "\n";
    os << "destinations = " << id_list(q.destinations) << "\n";
    if (!q.composition.empty()) os << "composition = " << split_text(q.composition) << "\n";
    if (q.kind == QueueKind::origin) {
      if (q.demand.kind == DemandProfile::Kind::constant)
        os << "demand = const " << num17(q.demand.value) << "\n";
      else
        os << "demand = peak " << num17(q.demand.floor_veh_h) << " "
           << num17(q.demand.peak_veh_h) << " " << q.demand.center_step << " "
           << num17(q.demand.slope_den) << "\n";
      if (q.demand_scale != 1.0) os << "demand_scale = " << num17(q.demand_scale) << "\n";
    }
    if (!q.metering.empty()) os << "metering = " << schedule_text(q.metering) << "\n";
    if (q.init_queue != 0.0) os << "init_queue_veh = " << num17(q.init_queue) << "\n";
  }

  for (std::size_t i = 0; i < spec.freeways.size(); ++i) {
    const auto& f = spec.freeways[i];
    os << "\n[freeway " << f.id << "]\n";
    os << "sections = " << f.n_sections << "\n";
    os << "length_km = " << num17(f.length_km) << "\n";
    os << "lanes = " << f.lanes << "\n";
    os << "params = " << refs[i] << "\n";
    os << "destinations = " << id_list(f.destinations) << "\n";
    if (!f.init_density.empty()) os << "init_density = " << list_text(f.init_density) << "\n";
    if (!f.init_speed.empty()) os << "init_speed = " << list_text(f.init_speed) << "\n";
    if (!f.init_composition.empty())
      os << "init_composition = " << split_text(f.init_composition) << "\n";
  }

  for (const auto& st : spec.stations) {
    os << "\n[station " << st.id << "]\n";
    os << "upstream_ramp = " << st.upstream_ramp << "\n";
    os << "downstream_ramp = " << st.downstream_ramp << "\n";
    os << "dwell_steps = " << st.dwell_steps << "\n";
    os << "capacity_veh_h = " << num17(st.capacity_flow) << "\n";
    os << "max_occupancy_veh = " << num17(st.max_occupancy) << "\n";
    if (!st.exit_metering.empty())
      os << "exit_metering = " << schedule_text(st.exit_metering) << "\n";
    if (!st.exit_split.empty()) os << "exit_split = " << split_text(st.exit_split) << "\n";
    if (st.init_occupancy != 0.0)
      os << "init_occupancy_veh = " << num17(st.init_occupancy) << "\n";
    if (st.init_exit_queue != 0.0)
      os << "init_exit_queue_veh = " << num17(st.init_exit_queue) << "\n";
    if (!st.init_history.empty()) os << "init_history = " << list_text(st.init_history) << "\n";
  }

  for (const auto& n : spec.nodes) {
    os << "\n[node " << n.id << "]\n";
    os << "in = " << id_list(n.in_links) << "\n";
    os << "out = " << id_list(n.out_links) << "\n";
    for (const auto& r : n.routes)
      os << "route " << r.destination << " -> " << r.out_link << " = "
         << schedule_text(r.share) << "\n";
  }
  return os.str();
}

void apply_override(Document& doc, const std::string& dotted_key, const std::string& value) {
  const auto dot = dotted_key.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 >= dotted_key.size())
    throw ScenarioError("override must be <entity>.<key>=<value>, got '" + dotted_key + "'");
  const std::string head = dotted_key.substr(0, dot);
  const std::string key = dotted_key.substr(dot + 1);

  Document::Section* target = nullptr;
  for (auto& sec : doc.sections)
    if (sec.name == head) {
      target = &sec;
      break;
    }
  if (!target) {
    int matches = 0;
    for (auto& sec : doc.sections)
      if (sec.kind == head) {
        target = &sec;
        ++matches;
      }
    if (matches > 1)
      throw ScenarioError("override '" + head + "' matches several [" + head + "] sections");
    if (matches == 0)
      throw ScenarioError("override '" + head + "' matches no section");
  }
  for (auto& [k, v] : target->entries)
    if (k == key) {
      v = value;
      return;
    }
  target->entries.emplace_back(key, value);
}

namespace {

// Calibration of the bundled study scenario. The tent demand profile is a
// per-lane curve; demand_scale converts it to a total flow over the three
// lanes. Station dwell, capacity, size and the origin capacity are the free
// parameters of the study.
constexpr double kStudyDemandScale = 3.0;
constexpr double kStudyOriginCap = 4300.0;    // veh/h
constexpr double kStudyStationCap = 1500.0;   // veh/h
constexpr double kStudyMaxOccupancy = 450.0;  // veh
constexpr std::int64_t kStudyDwellSteps = 3750;  // 0.1 h at the default step

std::string study_text(const char* series) {
  std::ostringstream os;
  os << "# Freeway stretch with a service station: a tent-shaped peak demand enters at o,\n"
        "# 30% of it detours through the station (s1 -> st -> s2) and merges back.\n"
        "[sim]\n"
        "step_h = "
     << num17(1.6 / 60000.0)
     << "\n"
        "horizon_steps = 60000\n"
        "output_stride = 50\n"
        "\n"
        "[output]\n"
        "series = "
     << series
     << "\n"
        "\n"
        "[params main]\n"
        "v_free_km_h = 102\n"
        "rho_crit_veh_km_lane = 20\n"
        "rho_jam_veh_km_lane = 30\n"
        "exponent_a = 2.34\n"
        "tau_h = 0.005\n"
        "anticipation_v_km2_h = 60\n"
        "stability_k_veh_km = 40\n"
        "v_min_km_h = 7\n"
        "\n"
        "[destination m7]\n"
        "\n"
        "[origin o]\n"
        "max_flow_veh_h = "
     << num17(kStudyOriginCap)
     << "\n"
        "destinations = st m7\n"
        "composition = st:0.3 m7:0.7\n"
        "demand = peak\n"
        "demand_scale = "
     << num17(kStudyDemandScale) << "\n";

  auto freeway = [&](const char* id, const char* dests, bool split_init) {
    os << "\n[freeway " << id
       << "]\n"
          "sections = 1\n"
          "length_km = 0.3\n"
          "lanes = 3\n"
          "params = main\n"
          "destinations = "
       << dests << "\n";
    if (split_init) os << "init_composition = st:0.3 m7:0.7\n";
  };
  freeway("m1", "st m7", true);
  freeway("m2", "m7", false);
  freeway("m3", "m7", false);
  freeway("m4", "m7", false);
  freeway("m5", "m7", false);
  freeway("m6", "m7", false);
  freeway("s1", "st", false);
  freeway("s2", "m7", false);

  os << "\n[station st]\n"
        "upstream_ramp = s1\n"
        "downstream_ramp = s2\n"
        "dwell_steps = "
     << kStudyDwellSteps
     << "\n"
        "capacity_veh_h = "
     << num17(kStudyStationCap)
     << "\n"
        "length_km = 1\n"
        "max_occupancy_veh = "
     << num17(kStudyMaxOccupancy)
     << "\n"
        "\n"
        "[node n0]\n"
        "in = o\n"
        "out = m1\n"
        "\n"
        "[node n1]\n"
        "in = m1\n"
        "out = m2 s1\n"
        "route m7 -> m2 = 1\n"
        "route st -> s1 = 1\n"
        "\n"
        "[node n2]\n"
        "in = m2\n"
        "out = m3\n"
        "\n"
        "[node n3]\n"
        "in = m3\n"
        "out = m4\n"
        "\n"
        "[node n4]\n"
        "in = m4 s2\n"
        "out = m5\n"
        "\n"
        "[node n5]\n"
        "in = m5\n"
        "out = m6\n"
        "\n"
        "[node n6]\n"
        "in = m6\n"
        "out = m7\n";
  return os.str();
}

constexpr const char* kFig3Series =
    "q_st rho_s2 q_s1 l_st w_st qmax_st q_m1 rho_s1 q_m2 rho_m2";
constexpr const char* kFig4Series =
    "q_m4 q_m5 q_m6 q_lane_m4 q_lane_m5 q_lane_m6 rho_m4 rho_m5 rho_m6";

}  // namespace

std::vector<std::string> builtin_names() { return {"paper-fig3", "paper-fig4"}; }

bool is_builtin(const std::string& name) {
  for (const auto& n : builtin_names())
    if (n == name) return true;
  return false;
}

std::string builtin_text(const std::string& name) {
  if (name == "paper-fig3") return study_text(kFig3Series);
  if (name == "paper-fig4") return study_text(kFig4Series);
  throw ScenarioError("unknown builtin scenario '" + name + "'");
}

NetworkSpec build_study_scenario() {
  return parse_scenario(builtin_text("paper-fig4")).spec;
}

}  // namespace metanets
