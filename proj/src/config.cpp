#include <cctype>
#include <fstream>
#include <sstream>

#include "kgop/experiments.hpp"
#include "kgop/space.hpp"

namespace kgop::exp {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

}  // namespace

bool Config::has(const std::string& section, const std::string& key) const {
  auto it = sections.find(section);
  return it != sections.end() && it->second.count(key) > 0;
}

std::string Config::get(const std::string& section, const std::string& key, const std::string& fallback) const {
  auto it = sections.find(section);
  if (it == sections.end()) return fallback;
  auto jt = it->second.find(key);
  return jt == it->second.end() ? fallback : jt->second;
}

double Config::get_double(const std::string& section, const std::string& key, double fallback) const {
  const std::string v = get(section, key, "");
  if (v.empty()) return fallback;
  try {
    return std::stod(v);
  } catch (...) {
    throw Error(section + "." + key + ": not a number: " + v);
  }
}

long Config::get_long(const std::string& section, const std::string& key, long fallback) const {
  const std::string v = get(section, key, "");
  if (v.empty()) return fallback;
  try {
    return std::stol(v);
  } catch (...) {
    throw Error(section + "." + key + ": not an integer: " + v);
  }
}

std::vector<long> Config::get_ladder(const std::string& section, const std::string& key,
                                     const std::string& fallback) const {
  const std::string v = get(section, key, fallback);
  std::vector<long> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      out.push_back(std::stol(item));
    } catch (...) {
      throw Error(section + "." + key + ": not an integer list: " + v);
    }
  }
  return out;
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
  sections[section][key] = value;
}

Config parse_config_text(const std::string& text) {
  Config cfg;
  std::stringstream ss(text);
  std::string line, section = "global";
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw Error("config line " + std::to_string(lineno) + ": unterminated section");
      section = trim(line.substr(1, line.size() - 2));
      cfg.sections[section];
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw Error("config line " + std::to_string(lineno) + ": expected key = value");
    cfg.sections[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  if (path.size() > 5 && path.substr(path.size() - 5) == ".json") {
    const nlohmann::json manifest = nlohmann::json::parse(text);
    Config cfg;
    for (const auto& [flat_key, value] : manifest.at("config").items()) {
      const std::size_t dot = flat_key.find('.');
      cfg.set(flat_key.substr(0, dot), flat_key.substr(dot + 1), value.get<std::string>());
    }
    return cfg;
  }
  return parse_config_text(text);
}

std::string render_config(const Config& cfg) {
  std::string out;
  for (const auto& [section, kv] : cfg.sections) {
    out += "[" + section + "]\n";
    for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  }
  return out;
}

Config default_config() {
  return parse_config_text(R"(# kgoplab defaults
[norm-growth]
ladder = 16,32,64,128,256,512,1024
scan_spacing = 0.01
scan_radius = 1100
mass = 1
power_spacing = 0.01
power_radius = 50

[lemma36]
count = 20
seed = 2024
mass = 1
spacing_1d = 0.05
radius_1d = 12
spacing_2d = 0.1666666666666666666
radius_2d = 5

[fejer]
cutoff = 64
mass = 1
operator = poisson
poisson_ratio = 0.125
ladder = 4,8,16,32,64

[subspace-angles]
mass = 1
resolutions = 20,40
cauchy_resolutions = 10,20,40
points_per_unit = 20

[resolvent-check]
spacing = 0.01
radius = 12
mass = 1
z_im = 1

[eigenresidual]
spacing = 0.02
radius = 80
mass = 1
a = 1
ladder = 8,16,32,64,128,256,512

[theorem38]
ladder = 8,16,32,64,128
spacing = 0.05
margin = 24
mass = 1

[interval-counterexample]
j_len = 1
b = 0.25
a = 3
mass = 0.1
spacing = 0.0625
ladder = 64,256,1024,4096

[compactness-probe]
spacing = 0.25
radius = 20
mass = 1
kernel_width = 1
leading = 50

[support-check]
spacing = 0.25
radius = 8
mass = 1

[gelfand]
cutoff = 16
mass = 1
pairs = 10
)");
}

Validation validate_config(const Config& cfg) {
  Validation v;
  auto fail = [&](const std::string& where, const std::string& msg) {
    v.ok = false;
    v.violations.push_back(where + ": " + msg);
  };
  auto check_positive = [&](const std::string& sec, const std::string& key) {
    if (!cfg.has(sec, key)) return;
    try {
      if (!(cfg.get_double(sec, key, 1.0) > 0.0)) fail(sec + "." + key, "must be positive");
    } catch (const Error& e) {
      fail(sec + "." + key, "not a number");
    }
  };
  for (const auto& [sec, kv] : cfg.sections) {
    if (kv.count("mass")) {
      try {
        if (!(cfg.get_double(sec, "mass", 1.0) > 0.0)) fail(sec + ".mass", "mass must be positive");
      } catch (const Error&) {
        fail(sec + ".mass", "not a number");
      }
    }
    for (const char* key : {"spacing", "radius", "scan_spacing", "scan_radius", "power_spacing",
                            "power_radius", "spacing_1d", "radius_1d", "spacing_2d", "radius_2d",
                            "kernel_width", "b", "a", "j_len"})
      check_positive(sec, key);
    // radius must be an integer multiple of spacing wherever both appear
    const struct {
      const char* r;
      const char* h;
    } pairs[] = {{"radius", "spacing"},
                 {"scan_radius", "scan_spacing"},
                 {"power_radius", "power_spacing"},
                 {"radius_1d", "spacing_1d"},
                 {"radius_2d", "spacing_2d"}};
    for (const auto& pr : pairs) {
      if (!kv.count(pr.r) || !kv.count(pr.h)) continue;
      try {
        const double r = cfg.get_double(sec, pr.r, 1.0);
        const double h = cfg.get_double(sec, pr.h, 1.0);
        if (h > 0.0) {
          const double ratio = r / h;
          if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio))
            fail(sec + "." + pr.r, "must be an integer multiple of the spacing");
        }
      } catch (const Error&) {
        // reported by check_positive already
      }
    }
    if (kv.count("cutoff")) {
      try {
        if (cfg.get_long(sec, "cutoff", 1) < 1) fail(sec + ".cutoff", "must be >= 1");
      } catch (const Error&) {
        fail(sec + ".cutoff", "not an integer");
      }
    }
    if (kv.count("ladder")) {
      try {
        auto ladder = cfg.get_ladder(sec, "ladder", "");
        if (ladder.empty()) fail(sec + ".ladder", "must be a nonempty integer list");
        for (long x : ladder)
          if (x < 0) fail(sec + ".ladder", "entries must be nonnegative");
      } catch (const Error&) {
        fail(sec + ".ladder", "not an integer list");
      }
    }
  }
  return v;
}

}  // namespace kgop::exp
