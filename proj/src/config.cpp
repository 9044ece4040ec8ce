#include "rotor/config.hpp"

#include <cmath>
#include <initializer_list>
#include <string>

#include <json.hpp>

#include "rotor/errors.hpp"
#include "rotor/io.hpp"

namespace rotor {

namespace {

using json = nlohmann::ordered_json;

constexpr double kTwoPi = 2.0 * M_PI;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError("config: " + path + " " + what);
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

void check_keys(const json& node, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (auto it = node.begin(); it != node.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        known = true;
        break;
      }
    if (!known) throw ConfigError("config: unknown key \"" + join(path, it.key()) + "\"");
  }
}

const json* find(const json& node, const char* key) {
  auto it = node.find(key);
  return it == node.end() ? nullptr : &*it;
}

double get_double(const json& node, const std::string& path, const char* key, double fallback) {
  const json* v = find(node, key);
  if (!v) return fallback;
  if (!v->is_number()) fail(join(path, key), "must be a number");
  return v->get<double>();
}

long long get_integer(const json& node, const std::string& path, const char* key,
                      long long fallback) {
  const json* v = find(node, key);
  if (!v) return fallback;
  if (!v->is_number_integer()) fail(join(path, key), "must be an integer");
  return v->get<long long>();
}

bool get_bool(const json& node, const std::string& path, const char* key, bool fallback) {
  const json* v = find(node, key);
  if (!v) return fallback;
  if (!v->is_boolean()) fail(join(path, key), "must be true or false");
  return v->get<bool>();
}

std::string get_string(const json& node, const std::string& path, const char* key,
                       const std::string& fallback) {
  const json* v = find(node, key);
  if (!v) return fallback;
  if (!v->is_string()) fail(join(path, key), "must be a string");
  return v->get<std::string>();
}

DriveConfig parse_drive(const json& node, const std::string& path) {
  if (!node.is_object()) fail(path, "must be an object");
  check_keys(node, path, {"pump_hz", "detuning_hz"});
  DriveConfig d;
  d.pump_hz = get_double(node, path, "pump_hz", 0.0);
  d.detuning_hz = get_double(node, path, "detuning_hz", 0.0);
  if (d.pump_hz < 0.0) fail(join(path, "pump_hz"), "must be >= 0");
  return d;
}

SystemConfig parse_system(const json& node) {
  const std::string path = "system";
  if (!node.is_object()) fail(path, "must be an object");
  check_keys(node, path,
             {"atom_number", "spin_coupling_hz", "quadratic_shift_hz", "cavity_coupling_hz",
              "cavity_linewidth_hz"});
  SystemConfig s;
  s.atom_number = get_double(node, path, "atom_number", 0.0);
  s.spin_coupling_hz = get_double(node, path, "spin_coupling_hz", 0.0);
  s.quadratic_shift_hz = get_double(node, path, "quadratic_shift_hz", 0.0);
  s.cavity_coupling_hz = get_double(node, path, "cavity_coupling_hz", 0.0);
  s.cavity_linewidth_hz = get_double(node, path, "cavity_linewidth_hz", 0.0);
  if (s.atom_number < 1.0) fail(join(path, "atom_number"), "must be >= 1");
  if (s.spin_coupling_hz <= 0.0) fail(join(path, "spin_coupling_hz"), "must be > 0");
  if (s.quadratic_shift_hz < 0.0) fail(join(path, "quadratic_shift_hz"), "must be >= 0");
  return s;
}

GridConfig parse_grid(const json& node) {
  const std::string path = "grid";
  if (!node.is_object()) fail(path, "must be an object");
  check_keys(node, path, {"n_points"});
  GridConfig g;
  g.n_points = static_cast<int>(get_integer(node, path, "n_points", g.n_points));
  if (g.n_points < 8) fail(join(path, "n_points"), "must be >= 8");
  return g;
}

EvolutionConfig parse_evolution(const json& node) {
  const std::string path = "evolution";
  if (!node.is_object()) fail(path, "must be an object");
  check_keys(node, path, {"dt_us", "dt_fraction", "sample_stride", "ground_state_tol"});
  EvolutionConfig e;
  e.dt_us = get_double(node, path, "dt_us", e.dt_us);
  e.dt_fraction = get_double(node, path, "dt_fraction", e.dt_fraction);
  e.sample_stride = get_integer(node, path, "sample_stride", e.sample_stride);
  e.ground_state_tol = get_double(node, path, "ground_state_tol", e.ground_state_tol);
  if (e.dt_us < 0.0) fail(join(path, "dt_us"), "must be >= 0");
  if (!(e.dt_fraction > 0.0) || e.dt_fraction > 0.5)
    fail(join(path, "dt_fraction"), "must be in (0, 0.5]");
  if (e.sample_stride < 1) fail(join(path, "sample_stride"), "must be >= 1");
  if (!(e.ground_state_tol > 0.0)) fail(join(path, "ground_state_tol"), "must be > 0");
  return e;
}

ProtocolConfig parse_protocol(const json& node) {
  const std::string path = "protocol";
  if (!node.is_object()) fail(path, "must be an object");
  check_keys(node, path, {"n_cycles", "switch_time_us", "tight", "wide"});
  ProtocolConfig p;
  p.n_cycles = static_cast<int>(get_integer(node, path, "n_cycles", p.n_cycles));
  p.switch_time_us = get_double(node, path, "switch_time_us", p.switch_time_us);
  if (p.n_cycles < 1) fail(join(path, "n_cycles"), "must be >= 1");
  if (p.switch_time_us < 0.0) fail(join(path, "switch_time_us"), "must be >= 0");
  if (const json* t = find(node, "tight")) p.tight = parse_drive(*t, join(path, "tight"));
  if (const json* w = find(node, "wide")) p.wide = parse_drive(*w, join(path, "wide"));
  return p;
}

SegmentConfig parse_segment(const json& node, const std::string& path) {
  if (!node.is_object()) fail(path, "must be an object");
  check_keys(node, path, {"duration_us", "shape", "from", "to"});
  SegmentConfig s;
  s.duration_us = get_double(node, path, "duration_us", -1.0);
  if (s.duration_us < 0.0) fail(join(path, "duration_us"), "must be a number >= 0");
  s.shape = get_string(node, path, "shape", s.shape);
  if (s.shape != "constant" && s.shape != "linear" && s.shape != "smoothstep")
    fail(join(path, "shape"), "must be constant, linear or smoothstep");
  const json* from = find(node, "from");
  if (!from) fail(join(path, "from"), "is required");
  s.from = parse_drive(*from, join(path, "from"));
  if (const json* to = find(node, "to"))
    s.to = parse_drive(*to, join(path, "to"));
  else
    s.to = s.from;
  return s;
}

NoiseSection parse_noise(const json& node) {
  const std::string path = "noise";
  if (!node.is_object()) fail(path, "must be an object");
  check_keys(node, path,
             {"photon_noise", "atom_sigma_rel", "trajectories", "atom_scaling",
              "atom_distribution", "refresh_photon_noise_per_step"});
  NoiseSection n;
  n.photon_noise = get_bool(node, path, "photon_noise", n.photon_noise);
  n.atom_sigma_rel = get_double(node, path, "atom_sigma_rel", n.atom_sigma_rel);
  n.trajectories = static_cast<int>(get_integer(node, path, "trajectories", n.trajectories));
  n.atom_scaling = get_string(node, path, "atom_scaling", n.atom_scaling);
  n.atom_distribution = get_string(node, path, "atom_distribution", n.atom_distribution);
  n.refresh_photon_noise_per_step =
      get_bool(node, path, "refresh_photon_noise_per_step", n.refresh_photon_noise_per_step);
  if (n.atom_sigma_rel < 0.0 || n.atom_sigma_rel >= 0.5)
    fail(join(path, "atom_sigma_rel"), "must be in [0, 0.5)");
  if (n.trajectories < 1) fail(join(path, "trajectories"), "must be >= 1");
  if (n.atom_scaling != "fixed_density" && n.atom_scaling != "fixed_volume")
    fail(join(path, "atom_scaling"), "must be fixed_density or fixed_volume");
  if (n.atom_distribution != "gaussian" && n.atom_distribution != "poisson")
    fail(join(path, "atom_distribution"), "must be gaussian or poisson");
  return n;
}

ObserverSection parse_observers(const json& node) {
  const std::string path = "observers";
  if (!node.is_object()) fail(path, "must be an object");
  check_keys(node, path, {"moments", "g2", "wigner_times_us", "wigner_l_max", "wigner_n_l"});
  ObserverSection o;
  o.moments = get_bool(node, path, "moments", o.moments);
  o.g2 = get_bool(node, path, "g2", o.g2);
  if (const json* times = find(node, "wigner_times_us")) {
    if (!times->is_array()) fail(join(path, "wigner_times_us"), "must be an array of numbers");
    for (const json& t : *times) {
      if (!t.is_number()) fail(join(path, "wigner_times_us"), "must be an array of numbers");
      const double v = t.get<double>();
      if (v < 0.0) fail(join(path, "wigner_times_us"), "must be non-negative");
      o.wigner_times_us.push_back(v);
    }
  }
  o.wigner_l_max = get_double(node, path, "wigner_l_max", o.wigner_l_max);
  o.wigner_n_l = static_cast<int>(get_integer(node, path, "wigner_n_l", o.wigner_n_l));
  if (!(o.wigner_l_max > 0.0)) fail(join(path, "wigner_l_max"), "must be > 0");
  if (o.wigner_n_l < 2) fail(join(path, "wigner_n_l"), "must be >= 2");
  return o;
}

CalibrationSection parse_calibration(const json& node) {
  const std::string path = "calibration";
  if (!node.is_object()) fail(path, "must be an object");
  check_keys(node, path, {"tight_hz", "wide_hz", "max_pump_hz", "rescale_system"});
  CalibrationSection c;
  c.tight_hz = get_double(node, path, "tight_hz", c.tight_hz);
  c.wide_hz = get_double(node, path, "wide_hz", c.wide_hz);
  c.max_pump_hz = get_double(node, path, "max_pump_hz", c.max_pump_hz);
  c.rescale_system = get_bool(node, path, "rescale_system", c.rescale_system);
  if (!(c.tight_hz > 0.0)) fail(join(path, "tight_hz"), "must be > 0");
  if (!(c.wide_hz > 0.0)) fail(join(path, "wide_hz"), "must be > 0");
  if (!(c.max_pump_hz > 0.0)) fail(join(path, "max_pump_hz"), "must be > 0");
  return c;
}

json drive_json(const DriveConfig& d) {
  return json{{"pump_hz", d.pump_hz}, {"detuning_hz", d.detuning_hz}};
}

}  // namespace

DrivePoint DriveConfig::to_drive() const {
  return DrivePoint{kTwoPi * pump_hz, kTwoPi * detuning_hz};
}

SystemParams SystemConfig::to_params() const {
  SystemParams p;
  p.N = atom_number;
  p.c2 = kTwoPi * spin_coupling_hz;
  p.q = kTwoPi * quadratic_shift_hz;
  p.U0 = kTwoPi * cavity_coupling_hz;
  p.kappa = kTwoPi * cavity_linewidth_hz;
  return p;
}

Segment SegmentConfig::to_segment() const {
  Segment s;
  s.duration = 1e-6 * duration_us;
  s.shape = shape == "constant" ? SegmentShape::constant
            : shape == "linear" ? SegmentShape::linear
                                : SegmentShape::smoothstep;
  s.start = from.to_drive();
  s.end = to.to_drive();
  return s;
}

NoiseConfig NoiseSection::to_noise(std::uint64_t seed) const {
  NoiseConfig n;
  n.photon_noise_enabled = photon_noise;
  n.atom_number_sigma_rel = atom_sigma_rel;
  n.seed = seed;
  n.n_trajectories = trajectories;
  n.atom_scaling =
      atom_scaling == "fixed_volume" ? AtomScaling::fixed_volume : AtomScaling::fixed_density;
  n.atom_distribution =
      atom_distribution == "poisson" ? AtomDistribution::poisson : AtomDistribution::gaussian;
  n.refresh_photon_noise_per_step = refresh_photon_noise_per_step;
  return n;
}

RunConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config: top level must be an object");
  check_keys(root, "",
             {"system", "grid", "evolution", "protocol", "schedule", "noise", "observers",
              "calibration", "input_state", "output_dir", "seed", "strict"});

  RunConfig config;
  const json* system = find(root, "system");
  if (!system) throw ConfigError("config: a system section is required");
  config.system = parse_system(*system);
  if (const json* g = find(root, "grid")) config.grid = parse_grid(*g);
  if (const json* e = find(root, "evolution")) config.evolution = parse_evolution(*e);
  if (const json* p = find(root, "protocol")) config.protocol = parse_protocol(*p);
  if (const json* s = find(root, "schedule")) {
    if (!s->is_array() || s->empty())
      throw ConfigError("config: schedule must be a non-empty array");
    for (size_t i = 0; i < s->size(); ++i)
      config.schedule.push_back(
          parse_segment((*s)[i], "schedule[" + std::to_string(i) + "]"));
  }
  if (config.protocol && !config.schedule.empty())
    throw ConfigError("config: protocol and schedule are mutually exclusive");
  if (const json* n = find(root, "noise")) config.noise = parse_noise(*n);
  if (const json* o = find(root, "observers")) config.observers = parse_observers(*o);
  if (const json* c = find(root, "calibration")) config.calibration = parse_calibration(*c);
  config.input_state = get_string(root, "", "input_state", config.input_state);
  config.output_dir = get_string(root, "", "output_dir", config.output_dir);
  if (config.output_dir.empty()) throw ConfigError("config: output_dir must not be empty");
  if (const json* seed = find(root, "seed")) {
    if (!seed->is_number_integer() ||
        (!seed->is_number_unsigned() && seed->get<long long>() < 0))
      throw ConfigError("config: seed must be a non-negative integer");
    config.seed = seed->get<std::uint64_t>();
  }
  config.strict = get_bool(root, "", "strict", config.strict);
  return config;
}

RunConfig load_config_file(const std::string& path) {
  return parse_config(read_text_file(path));
}

std::string serialize_config(const RunConfig& config) {
  json root;
  root["system"] = {{"atom_number", config.system.atom_number},
                    {"spin_coupling_hz", config.system.spin_coupling_hz},
                    {"quadratic_shift_hz", config.system.quadratic_shift_hz},
                    {"cavity_coupling_hz", config.system.cavity_coupling_hz},
                    {"cavity_linewidth_hz", config.system.cavity_linewidth_hz}};
  root["grid"] = {{"n_points", config.grid.n_points}};
  root["evolution"] = {{"dt_us", config.evolution.dt_us},
                       {"dt_fraction", config.evolution.dt_fraction},
                       {"sample_stride", config.evolution.sample_stride},
                       {"ground_state_tol", config.evolution.ground_state_tol}};
  if (config.protocol) {
    root["protocol"] = {{"n_cycles", config.protocol->n_cycles},
                        {"switch_time_us", config.protocol->switch_time_us},
                        {"tight", drive_json(config.protocol->tight)},
                        {"wide", drive_json(config.protocol->wide)}};
  }
  if (!config.schedule.empty()) {
    json segments = json::array();
    for (const SegmentConfig& s : config.schedule)
      segments.push_back(json{{"duration_us", s.duration_us},
                              {"shape", s.shape},
                              {"from", drive_json(s.from)},
                              {"to", drive_json(s.to)}});
    root["schedule"] = std::move(segments);
  }
  root["noise"] = {{"photon_noise", config.noise.photon_noise},
                   {"atom_sigma_rel", config.noise.atom_sigma_rel},
                   {"trajectories", config.noise.trajectories},
                   {"atom_scaling", config.noise.atom_scaling},
                   {"atom_distribution", config.noise.atom_distribution},
                   {"refresh_photon_noise_per_step", config.noise.refresh_photon_noise_per_step}};
  root["observers"] = {{"moments", config.observers.moments},
                       {"g2", config.observers.g2},
                       {"wigner_times_us", config.observers.wigner_times_us},
                       {"wigner_l_max", config.observers.wigner_l_max},
                       {"wigner_n_l", config.observers.wigner_n_l}};
  if (config.calibration) {
    root["calibration"] = {{"tight_hz", config.calibration->tight_hz},
                           {"wide_hz", config.calibration->wide_hz},
                           {"max_pump_hz", config.calibration->max_pump_hz},
                           {"rescale_system", config.calibration->rescale_system}};
  }
  root["input_state"] = config.input_state;
  root["output_dir"] = config.output_dir;
  root["seed"] = config.seed;
  root["strict"] = config.strict;
  return root.dump(2) + "\n";
}

}  // namespace rotor
