#include "vsc/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <type_traits>

#include <json.hpp>

#include "vsc/config_json.hpp"
#include "vsc/errors.hpp"
#include "vsc/units.hpp"

namespace vsc {
namespace {

struct Value {
  std::vector<std::string> items;
  bool is_list = false;
  bool is_string = false;
  int line = 0;
};

using Section = std::map<std::string, Value>;
using Document = std::map<std::string, Section>;

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

[[noreturn]] void fail(const std::string& source, int line, const std::string& msg) {
  throw ConfigError(source + ":" + std::to_string(line) + ": " + msg);
}

Value parse_value(const std::string& raw, const std::string& source, int line) {
  Value v;
  v.line = line;
  if (raw.empty()) fail(source, line, "missing value");
  if (raw.front() == '"') {
    if (raw.size() < 2 || raw.back() != '"') fail(source, line, "unterminated string");
    v.is_string = true;
    v.items.push_back(raw.substr(1, raw.size() - 2));
    return v;
  }
  if (raw.front() == '[') {
    if (raw.back() != ']') fail(source, line, "unterminated list");
    v.is_list = true;
    std::stringstream ss(raw.substr(1, raw.size() - 2));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      if (item.front() == '"' || item.front() == '[') fail(source, line, "lists hold numbers only");
      v.items.push_back(item);
    }
    if (v.items.empty()) fail(source, line, "empty list");
    return v;
  }
  v.items.push_back(raw);
  return v;
}

Document parse_toml(const std::string& text, const std::string& source) {
  Document doc;
  std::istringstream in(text);
  std::string raw_line;
  std::string current;
  int line_no = 0;
  while (std::getline(in, raw_line)) {
    ++line_no;
    const std::string line = trim(strip_comment(raw_line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(source, line_no, "malformed section header");
      current = trim(line.substr(1, line.size() - 2));
      if (doc.contains(current)) fail(source, line_no, "duplicate section [" + current + "]");
      doc[current];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(source, line_no, "expected key = value");
    if (current.empty()) fail(source, line_no, "key outside of a section");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) fail(source, line_no, "empty key");
    Section& sec = doc[current];
    if (sec.contains(key)) fail(source, line_no, "duplicate key '" + key + "'");
    sec[key] = parse_value(trim(line.substr(eq + 1)), source, line_no);
  }
  return doc;
}

Document from_json(const nlohmann::json& j, const std::string& source) {
  Document doc;
  if (!j.is_object()) throw ConfigError(source + ": config must be an object");
  for (const auto& [name, sec] : j.items()) {
    if (!sec.is_object()) throw ConfigError(source + ": section " + name + " must be an object");
    Section& out = doc[name];
    for (const auto& [key, val] : sec.items()) {
      Value v;
      auto scalar = [&](const nlohmann::json& x) {
        if (x.is_string()) {
          v.is_string = true;
          return x.get<std::string>();
        }
        return x.dump();
      };
      if (val.is_array()) {
        v.is_list = true;
        for (const auto& x : val) v.items.push_back(scalar(x));
      } else {
        v.items.push_back(scalar(val));
      }
      out[key] = v;
    }
  }
  return doc;
}

class Reader {
 public:
  Reader(const Document& doc, std::string source) : doc_(doc), source_(std::move(source)) {}

  const Section* section(const std::string& name, bool required) {
    auto it = doc_.find(name);
    if (it == doc_.end()) {
      if (required) throw ConfigError(source_ + ": missing [" + name + "] section");
      return nullptr;
    }
    return &it->second;
  }

  void check_sections(const std::set<std::string>& known) {
    for (const auto& [sec, _] : doc_)
      if (!known.contains(sec)) throw ConfigError(source_ + ": unknown section [" + sec + "]");
  }

  void check_keys(const std::string& name, const Section& sec, const std::set<std::string>& known) {
    for (const auto& [key, v] : sec)
      if (!known.contains(key))
        throw ConfigError(where(name, v) + "unknown key '" + key + "'");
  }

  std::string where(const std::string& sec, const Value& v) const {
    return source_ + (v.line ? ":" + std::to_string(v.line) : std::string()) + ": [" + sec + "] ";
  }

  double to_double(const std::string& sec, const std::string& key, const Value& v,
                   const std::string& token) const {
    double out = 0.0;
    const char* b = token.data();
    const char* e = b + token.size();
    if (!token.empty() && *b == '+') ++b;
    auto [p, ec] = std::from_chars(b, e, out);
    if (ec != std::errc() || p != e)
      throw ConfigError(where(sec, v) + key + ": expected a number, got '" + token + "'");
    return out;
  }

  template <typename T>
  void number(const Section& s, const std::string& sec, const std::string& key, T& out) {
    auto it = s.find(key);
    if (it == s.end()) return;
    const Value& v = it->second;
    if (v.is_list || v.is_string) throw ConfigError(where(sec, v) + key + ": expected a number");
    out = convert<T>(sec, key, v, v.items.front());
  }

  template <typename T>
  bool list(const Section& s, const std::string& sec, const std::string& key, std::vector<T>& out) {
    auto it = s.find(key);
    if (it == s.end()) return false;
    const Value& v = it->second;
    if (v.is_string) throw ConfigError(where(sec, v) + key + ": expected a number or list");
    out.clear();
    for (const auto& token : v.items) out.push_back(convert<T>(sec, key, v, token));
    return true;
  }

  void boolean(const Section& s, const std::string& sec, const std::string& key, bool& out) {
    auto it = s.find(key);
    if (it == s.end()) return;
    const Value& v = it->second;
    const std::string& t = v.items.front();
    if (v.is_list || v.is_string || (t != "true" && t != "false"))
      throw ConfigError(where(sec, v) + key + ": expected true or false");
    out = t == "true";
  }

  void string(const Section& s, const std::string& sec, const std::string& key, std::string& out) {
    auto it = s.find(key);
    if (it == s.end()) return;
    if (!it->second.is_string) throw ConfigError(where(sec, it->second) + key + ": expected a string");
    out = it->second.items.front();
  }

 private:
  template <typename T>
  T convert(const std::string& sec, const std::string& key, const Value& v,
            const std::string& token) const {
    if constexpr (std::is_same_v<T, double>) {
      return to_double(sec, key, v, token);
    } else {
      T out{};
      auto [p, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
      if (ec != std::errc() || p != token.data() + token.size())
        throw ConfigError(where(sec, v) + key + ": expected an integer, got '" + token + "'");
      return out;
    }
  }

  const Document& doc_;
  std::string source_;
};

RunPlan populate(const Document& doc, const std::string& source) {
  Reader rd(doc, source);
  rd.check_sections({"ensemble", "reaction", "run"});
  RunPlan plan = default_run_plan();

  const Section& ens = *rd.section("ensemble", true);
  rd.check_keys("ensemble", ens,
                {"n_molecules", "mean_vib_freq", "disorder_sigma", "detuning", "cavity_freq",
                 "collective_coupling"});
  rd.number(ens, "ensemble", "mean_vib_freq", plan.ensemble.mean_vib_freq);
  rd.number(ens, "ensemble", "disorder_sigma", plan.ensemble.disorder_sigma);
  rd.list(ens, "ensemble", "n_molecules", plan.n_molecules);
  if (ens.contains("detuning") && ens.contains("cavity_freq"))
    throw ConfigError(source + ": [ensemble] give either detuning or cavity_freq, not both");
  rd.list(ens, "ensemble", "detuning", plan.detuning);
  std::vector<double> cavity;
  if (rd.list(ens, "ensemble", "cavity_freq", cavity)) {
    plan.detuning.clear();
    for (double wc : cavity) plan.detuning.push_back(wc - plan.ensemble.mean_vib_freq);
  }
  rd.list(ens, "ensemble", "collective_coupling", plan.collective_coupling);

  const Section& rx = *rd.section("reaction", true);
  rd.check_keys("reaction", rx,
                {"e_reactant", "e_product", "lambda_r", "lambda_p", "j_rp", "lambda_s",
                 "temperature", "kappa", "gamma", "eta", "omega_cut"});
  ReactionParams& r = plan.reaction;
  rd.number(rx, "reaction", "e_reactant", r.e_reactant);
  rd.number(rx, "reaction", "e_product", r.e_product);
  rd.number(rx, "reaction", "lambda_r", r.lambda_r);
  rd.number(rx, "reaction", "lambda_p", r.lambda_p);
  rd.number(rx, "reaction", "j_rp", r.j_rp);
  rd.number(rx, "reaction", "lambda_s", r.lambda_s);
  rd.number(rx, "reaction", "gamma", r.gamma);
  rd.number(rx, "reaction", "eta", r.eta);
  rd.number(rx, "reaction", "omega_cut", r.omega_cut);
  rd.list(rx, "reaction", "kappa", plan.kappa);
  rd.list(rx, "reaction", "temperature", plan.temperature);

  if (const Section* run = rd.section("run", false)) {
    rd.check_keys("run", *run,
                  {"realizations", "seed", "threads", "out_dir", "time_step_ns", "n_time_steps",
                   "bin_width_sigma", "kinetics", "bare_reference", "fast_decay_factor",
                   "dump_trajectories", "dump_states", "dump_rate_tables"});
    rd.number(*run, "run", "realizations", plan.realizations);
    rd.number(*run, "run", "seed", plan.seed);
    rd.number(*run, "run", "threads", plan.threads);
    rd.string(*run, "run", "out_dir", plan.out_dir);
    rd.number(*run, "run", "time_step_ns", plan.time_step_ns);
    rd.number(*run, "run", "n_time_steps", plan.n_time_steps);
    rd.number(*run, "run", "bin_width_sigma", plan.bin_width_sigma);
    rd.boolean(*run, "run", "kinetics", plan.kinetics);
    rd.boolean(*run, "run", "bare_reference", plan.bare_reference);
    rd.number(*run, "run", "fast_decay_factor", plan.fast_decay_factor);
    rd.boolean(*run, "run", "dump_trajectories", plan.dump_trajectories);
    rd.boolean(*run, "run", "dump_states", plan.dump_states);
    rd.boolean(*run, "run", "dump_rate_tables", plan.dump_rate_tables);
  }

  plan.ensemble.n_molecules = plan.n_molecules.front();
  plan.ensemble.detuning = plan.detuning.front();
  plan.ensemble.collective_coupling = plan.collective_coupling.front();
  plan.reaction.kappa = plan.kappa.front();
  plan.reaction.temperature = plan.temperature.front();
  plan.validate();
  return plan;
}

std::string number_text(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

template <typename T>
std::string list_text(const std::vector<T>& xs) {
  if (xs.size() == 1) {
    if constexpr (std::is_same_v<T, double>)
      return number_text(xs.front());
    else
      return std::to_string(xs.front());
  }
  std::string s = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ", ";
    if constexpr (std::is_same_v<T, double>)
      s += number_text(xs[i]);
    else
      s += std::to_string(xs[i]);
  }
  return s + "]";
}

}  // namespace

std::vector<SweepPoint> RunPlan::points() const {
  std::vector<SweepPoint> out;
  for (int n : n_molecules)
    for (double d : detuning)
      for (double g : collective_coupling)
        for (double k : kappa)
          for (double t : temperature) out.push_back({n, d, g, k, t});
  return out;
}

ModelParams RunPlan::model_at(const SweepPoint& p) const {
  ModelParams m{ensemble, reaction};
  m.ensemble.n_molecules = p.n_molecules;
  m.ensemble.detuning = p.detuning;
  m.ensemble.collective_coupling = p.collective_coupling;
  m.reaction.kappa = p.kappa;
  m.reaction.temperature = p.temperature;
  return m;
}

std::vector<double> RunPlan::time_grid_ps() const {
  std::vector<double> t(static_cast<std::size_t>(n_time_steps) + 1);
  for (int j = 0; j <= n_time_steps; ++j) t[j] = j * time_step_ns * units::kPsPerNs;
  return t;
}

void RunPlan::validate() const {
  auto bad = [](const std::string& sec, const std::string& msg) {
    throw ConfigError("[" + sec + "] " + msg);
  };
  if (n_molecules.empty() || detuning.empty() || collective_coupling.empty() || kappa.empty() ||
      temperature.empty())
    bad("ensemble", "sweep lists must be non-empty");
  for (const SweepPoint& p : points()) {
    const ModelParams m = model_at(p);
    try {
      m.ensemble.validate();
    } catch (const ParameterError& e) {
      bad("ensemble", e.what());
    }
    try {
      m.reaction.validate();
    } catch (const ParameterError& e) {
      bad("reaction", e.what());
    }
  }
  if (realizations < 1) bad("run", "realizations: must be at least 1");
  if (threads < 0) bad("run", "threads: must be non-negative");
  if (!(time_step_ns > 0.0)) bad("run", "time_step_ns: must be positive");
  if (n_time_steps < 2) bad("run", "n_time_steps: must be at least 2");
  if (!(bin_width_sigma > 0.0)) bad("run", "bin_width_sigma: must be positive");
  if (!(fast_decay_factor >= 0.0)) bad("run", "fast_decay_factor: must be non-negative");
  if (out_dir.empty()) bad("run", "out_dir: must be non-empty");
}

RunPlan default_run_plan() {
  RunPlan plan;
  const ModelParams d = default_params();
  plan.ensemble = d.ensemble;
  plan.reaction = d.reaction;
  plan.n_molecules = {d.ensemble.n_molecules};
  plan.detuning = {d.ensemble.detuning};
  plan.collective_coupling = {d.ensemble.collective_coupling};
  plan.kappa = {d.reaction.kappa};
  plan.temperature = {d.reaction.temperature};
  return plan;
}

RunPlan parse_run_plan(const std::string& text, const std::string& source) {
  return populate(parse_toml(text, source), source);
}

RunPlan plan_from_json(const nlohmann::json& config, const std::string& source) {
  return populate(from_json(config, source), source);
}

nlohmann::json plan_to_json(const RunPlan& plan) {
  using nlohmann::json;
  auto axis = [](const auto& xs) { return xs.size() == 1 ? json(xs.front()) : json(xs); };
  json j;
  j["ensemble"] = {{"n_molecules", axis(plan.n_molecules)},
                   {"mean_vib_freq", plan.ensemble.mean_vib_freq},
                   {"disorder_sigma", plan.ensemble.disorder_sigma},
                   {"detuning", axis(plan.detuning)},
                   {"collective_coupling", axis(plan.collective_coupling)}};
  const ReactionParams& r = plan.reaction;
  j["reaction"] = {{"e_reactant", r.e_reactant}, {"e_product", r.e_product},
                   {"lambda_r", r.lambda_r},     {"lambda_p", r.lambda_p},
                   {"j_rp", r.j_rp},             {"lambda_s", r.lambda_s},
                   {"temperature", axis(plan.temperature)},
                   {"kappa", axis(plan.kappa)},  {"gamma", r.gamma},
                   {"eta", r.eta},               {"omega_cut", r.omega_cut}};
  j["run"] = {{"realizations", plan.realizations},
              {"seed", plan.seed},
              {"threads", plan.threads},
              {"out_dir", plan.out_dir},
              {"time_step_ns", plan.time_step_ns},
              {"n_time_steps", plan.n_time_steps},
              {"bin_width_sigma", plan.bin_width_sigma},
              {"kinetics", plan.kinetics},
              {"bare_reference", plan.bare_reference},
              {"fast_decay_factor", plan.fast_decay_factor},
              {"dump_trajectories", plan.dump_trajectories},
              {"dump_states", plan.dump_states},
              {"dump_rate_tables", plan.dump_rate_tables}};
  return j;
}

RunPlan load_run_plan(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    nlohmann::json manifest;
    try {
      manifest = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(path.string() + ": " + e.what());
    }
    if (!manifest.contains("config"))
      throw ConfigError(path.string() + ": manifest has no \"config\" object");
    return plan_from_json(manifest["config"], path.string());
  }
  return parse_run_plan(text, path.string());
}

std::string to_config_text(const RunPlan& p) {
  std::ostringstream o;
  const ReactionParams& r = p.reaction;
  o << "[ensemble]\n"
    << "n_molecules = " << list_text(p.n_molecules) << "\n"
    << "mean_vib_freq = " << number_text(p.ensemble.mean_vib_freq) << "\n"
    << "disorder_sigma = " << number_text(p.ensemble.disorder_sigma) << "\n"
    << "detuning = " << list_text(p.detuning) << "\n"
    << "collective_coupling = " << list_text(p.collective_coupling) << "\n\n"
    << "[reaction]\n"
    << "e_reactant = " << number_text(r.e_reactant) << "\n"
    << "e_product = " << number_text(r.e_product) << "\n"
    << "lambda_r = " << number_text(r.lambda_r) << "\n"
    << "lambda_p = " << number_text(r.lambda_p) << "\n"
    << "j_rp = " << number_text(r.j_rp) << "\n"
    << "lambda_s = " << number_text(r.lambda_s) << "\n"
    << "temperature = " << list_text(p.temperature) << "\n"
    << "kappa = " << list_text(p.kappa) << "\n"
    << "gamma = " << number_text(r.gamma) << "\n"
    << "eta = " << number_text(r.eta) << "\n"
    << "omega_cut = " << number_text(r.omega_cut) << "\n\n"
    << "[run]\n"
    << "realizations = " << p.realizations << "\n"
    << "seed = " << p.seed << "\n"
    << "threads = " << p.threads << "\n"
    << "out_dir = \"" << p.out_dir << "\"\n"
    << "time_step_ns = " << number_text(p.time_step_ns) << "\n"
    << "n_time_steps = " << p.n_time_steps << "\n"
    << "bin_width_sigma = " << number_text(p.bin_width_sigma) << "\n"
    << "kinetics = " << (p.kinetics ? "true" : "false") << "\n"
    << "bare_reference = " << (p.bare_reference ? "true" : "false") << "\n"
    << "fast_decay_factor = " << number_text(p.fast_decay_factor) << "\n"
    << "dump_trajectories = " << (p.dump_trajectories ? "true" : "false") << "\n"
    << "dump_states = " << (p.dump_states ? "true" : "false") << "\n"
    << "dump_rate_tables = " << (p.dump_rate_tables ? "true" : "false") << "\n";
  return o.str();
}

}  // namespace vsc
