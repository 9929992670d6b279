#include "hindsight/envs/traces.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hindsight/core/errors.hpp"
#include "hindsight/core/rng.hpp"

namespace hindsight::envs {

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void dump(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

int parse_int(const std::string& field, const std::string& context) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(field, &used);
  } catch (const std::exception&) {
    throw ParseError("not an integer in " + context + ": '" + field + "'");
  }
  if (used != field.size()) throw ParseError("trailing characters in " + context + ": '" + field + "'");
  return v;
}

}  // namespace

ExoTrace<int> read_int_trace(const std::filesystem::path& path) {
  std::istringstream in(slurp(path));
  std::vector<int> values;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    values.push_back(parse_int(line, path.string()));
  }
  return ExoTrace<int>(std::move(values));
}

void write_int_trace(const std::filesystem::path& path, const ExoTrace<int>& trace) {
  std::string text;
  for (int v : trace.inputs()) text += std::to_string(v) + "\n";
  dump(path, text);
}

std::string format_vm_trace(const ExoTrace<VmEvent>& trace) {
  std::string text = "id,arrival_event,lifetime,cores,memory\n";
  for (const auto& ev : trace.inputs()) {
    if (!ev.request) continue;
    const auto& r = *ev.request;
    text += std::to_string(r.id) + "," + std::to_string(r.arrival_event - 1) + "," + std::to_string(r.lifetime) + "," +
            std::to_string(r.cores) + "," + std::to_string(r.memory) + "\n";
  }
  return text;
}

ExoTrace<VmEvent> parse_vm_trace(const std::string& text, int horizon) {
  std::vector<VmEvent> events(static_cast<std::size_t>(horizon));
  std::istringstream in(text);
  std::string line;
  bool header = true;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    if (header) {
      if (line != "id,arrival_event,lifetime,cores,memory") throw ParseError("unexpected VM trace header: " + line);
      header = false;
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ls(line);
    std::string f;
    while (std::getline(ls, f, ',')) fields.push_back(trim(f));
    const std::string ctx = "VM trace line " + std::to_string(line_no);
    if (fields.size() != 5) throw ParseError(ctx + ": expected 5 fields");
    VmRequest r;
    r.id = parse_int(fields[0], ctx);
    r.arrival_event = parse_int(fields[1], ctx) + 1;
    r.lifetime = parse_int(fields[2], ctx);
    r.cores = parse_int(fields[3], ctx);
    r.memory = parse_int(fields[4], ctx);
    if (r.lifetime < 1 || r.cores < 1 || r.memory < 1) throw ParseError(ctx + ": lifetime, cores, memory must be >= 1");
    if (r.arrival_event < 1 || r.arrival_event > horizon) throw ParseError(ctx + ": arrival event outside horizon");
    auto& slot = events[static_cast<std::size_t>(r.arrival_event - 1)];
    if (slot.request) throw ParseError(ctx + ": two requests in one event");
    slot.request = r;
  }
  if (header) throw ParseError("VM trace is missing its header");
  return ExoTrace<VmEvent>(std::move(events));
}

ExoTrace<VmEvent> read_vm_trace(const std::filesystem::path& path, int horizon) {
  return parse_vm_trace(slurp(path), horizon);
}

void write_vm_trace(const std::filesystem::path& path, const ExoTrace<VmEvent>& trace) {
  dump(path, format_vm_trace(trace));
}

namespace {

using nlohmann::json;

std::vector<std::pair<int, double>> parse_dist(const json& j, const char* what) {
  std::vector<std::pair<int, double>> out;
  if (!j.is_array()) throw ConfigError(std::string(what) + " must be a list of [value, weight] pairs");
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2) throw ConfigError(std::string(what) + " entries must be [value, weight]");
    out.emplace_back(e[0].get<int>(), e[1].get<double>());
  }
  if (out.empty()) throw ConfigError(std::string(what) + " must be nonempty");
  for (const auto& [v, w] : out) {
    if (v < 1 || w < 0.0) throw ConfigError(std::string(what) + " needs values >= 1 and weights >= 0");
  }
  return out;
}

json dist_json(const std::vector<std::pair<int, double>>& d) {
  json j = json::array();
  for (const auto& [v, w] : d) j.push_back({v, w});
  return j;
}

int sample_int(const std::vector<std::pair<int, double>>& dist, CounterRng& rng) {
  std::vector<double> w;
  for (const auto& e : dist) w.push_back(e.second);
  return dist[rng.categorical(w)].first;
}

}  // namespace

VmGenConfig parse_vm_gen_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid generator config: ") + e.what());
  }
  static const char* const known[] = {"pm_count",     "cpu_capacity",   "mem_capacity", "arrival_rate",
                                      "lifetime_dist", "vm_type_table", "horizon"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(std::begin(known), std::end(known), key) == std::end(known)) {
      throw ConfigError("unknown generator config field: " + key);
    }
  }
  VmGenConfig c;
  try {
    c.pm_count = j.value("pm_count", c.pm_count);
    c.cpu_capacity = j.value("cpu_capacity", c.cpu_capacity);
    c.mem_capacity = j.value("mem_capacity", c.mem_capacity);
    c.arrival_rate = j.value("arrival_rate", c.arrival_rate);
    c.horizon = j.value("horizon", c.horizon);
    if (j.contains("lifetime_dist")) c.lifetime_dist = parse_dist(j["lifetime_dist"], "lifetime_dist");
    if (j.contains("vm_type_table")) {
      c.vm_type_table.clear();
      for (const auto& e : j["vm_type_table"]) {
        VmType t;
        t.cores = e.at("cores").get<int>();
        t.memory = e.at("memory").get<int>();
        t.weight = e.value("weight", 1.0);
        if (e.contains("lifetime_dist")) t.lifetime_dist = parse_dist(e["lifetime_dist"], "vm type lifetime_dist");
        c.vm_type_table.push_back(std::move(t));
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid generator config: ") + e.what());
  }
  if (c.pm_count < 1 || c.cpu_capacity < 1 || c.mem_capacity < 1) throw ConfigError("cluster sizes must be >= 1");
  if (c.horizon < 0) throw ConfigError("horizon must be >= 0");
  if (!(c.arrival_rate >= 0.0 && c.arrival_rate <= 1.0)) throw ConfigError("arrival_rate must lie in [0, 1]");
  if (c.vm_type_table.empty()) throw ConfigError("vm_type_table must be nonempty");
  for (const auto& t : c.vm_type_table) {
    if (t.cores < 1 || t.memory < 1 || t.weight < 0.0) throw ConfigError("vm types need cores, memory >= 1");
    if (t.cores > c.cpu_capacity || t.memory > c.mem_capacity) throw ConfigError("vm type larger than a PM");
  }
  return c;
}

VmGenConfig load_vm_gen_config(const std::filesystem::path& path) { return parse_vm_gen_config(slurp(path)); }

std::string vm_gen_config_json(const VmGenConfig& c) {
  json j;
  j["pm_count"] = c.pm_count;
  j["cpu_capacity"] = c.cpu_capacity;
  j["mem_capacity"] = c.mem_capacity;
  j["arrival_rate"] = c.arrival_rate;
  j["horizon"] = c.horizon;
  j["lifetime_dist"] = dist_json(c.lifetime_dist);
  j["vm_type_table"] = json::array();
  for (const auto& t : c.vm_type_table) {
    json e{{"cores", t.cores}, {"memory", t.memory}, {"weight", t.weight}};
    if (!t.lifetime_dist.empty()) e["lifetime_dist"] = dist_json(t.lifetime_dist);
    j["vm_type_table"].push_back(e);
  }
  return j.dump(2);
}

std::vector<ExoTrace<VmEvent>> synth_vm_traces(const VmGenConfig& config, int n, std::uint64_t seed) {
  std::vector<double> type_w;
  for (const auto& t : config.vm_type_table) type_w.push_back(t.weight);
  std::vector<ExoTrace<VmEvent>> out;
  out.reserve(static_cast<std::size_t>(std::max(n, 0)));
  for (int i = 0; i < n; ++i) {
    CounterRng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    std::vector<VmEvent> events(static_cast<std::size_t>(config.horizon));
    int next_id = 0;
    for (int t = 1; t <= config.horizon; ++t) {
      if (!rng.bernoulli(config.arrival_rate)) continue;
      const auto& type = config.vm_type_table[rng.categorical(type_w)];
      const auto& ldist = type.lifetime_dist.empty() ? config.lifetime_dist : type.lifetime_dist;
      VmRequest r{next_id++, t, sample_int(ldist, rng), type.cores, type.memory};
      events[static_cast<std::size_t>(t - 1)].request = r;
    }
    out.emplace_back(std::move(events));
  }
  return out;
}

namespace {

ExoTrace<int> iid_ints(const std::vector<double>& probs, int horizon, std::uint64_t seed, int offset) {
  if (probs.empty()) throw ConfigError("sampler needs a nonempty distribution");
  CounterRng rng(seed);
  std::vector<int> xs;
  xs.reserve(static_cast<std::size_t>(horizon));
  for (int t = 0; t < horizon; ++t) xs.push_back(static_cast<int>(rng.categorical(probs)) + offset);
  return ExoTrace<int>(std::move(xs));
}

}  // namespace

ExoTrace<int> binpack_trace_sampler(const std::vector<double>& probs, int horizon, std::uint64_t seed) {
  return iid_ints(probs, horizon, seed, 1);
}

ExoTrace<int> inventory_trace_sampler(const std::vector<double>& probs, int horizon, std::uint64_t seed) {
  return iid_ints(probs, horizon, seed, 0);
}

}  // namespace hindsight::envs
