#include "rotor/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "rotor/errors.hpp"

namespace rotor {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hash_hex(std::uint64_t hash) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream out;
  out << in.rdbuf();
  if (in.bad()) throw ConfigError("cannot read " + path);
  return out.str();
}

std::string moments_csv(const std::vector<TrajectorySample>& samples,
                        const std::vector<double>* g2_values) {
  std::string out =
      "time,tau,mean_theta,var_theta,mean_l,var_l,covar_theta_l,squeeze_angle,"
      "min_variance_ratio,mean_potential,var_potential,pump,detuning,noise_factor,"
      "n_photons,g2\n";
  for (size_t i = 0; i < samples.size(); ++i) {
    const TrajectorySample& s = samples[i];
    const double g2 = g2_values && i < g2_values->size()
                          ? (*g2_values)[i]
                          : std::numeric_limits<double>::quiet_NaN();
    const double row[] = {s.time,          s.tau,           s.mean_theta,
                          s.var_theta,     s.mean_l,        s.var_l,
                          s.covar_theta_l, s.squeeze_angle, s.min_variance_ratio,
                          s.mean_potential, s.var_potential, s.eta,
                          s.delta,         s.noise_factor,  s.n_photons,
                          g2};
    for (size_t k = 0; k < std::size(row); ++k) {
      if (k) out += ',';
      out += format_double(row[k]);
    }
    out += '\n';
  }
  return out;
}

std::string wigner_csv(const WignerMap& map) {
  std::string out;
  const size_t n_l = map.l_values.size();
  for (size_t it = 0; it < map.theta_values.size(); ++it) {
    for (size_t il = 0; il < n_l; ++il) {
      if (il) out += ',';
      out += format_double(map.value(it, il));
    }
    out += '\n';
  }
  return out;
}

std::string axis_csv(const std::string& name, const std::vector<double>& values) {
  std::string out = name + "\n";
  for (double v : values) {
    out += format_double(v);
    out += '\n';
  }
  return out;
}

std::string state_csv(const RotorState& state) {
  std::string out = "theta,re,im\n";
  for (size_t j = 0; j < state.amplitudes.size(); ++j) {
    out += format_double(state.grid.theta_values[j]);
    out += ',';
    out += format_double(state.amplitudes[j].real());
    out += ',';
    out += format_double(state.amplitudes[j].imag());
    out += '\n';
  }
  return out;
}

namespace {

double parse_field(const std::string& token, const std::string& context) {
  const char* begin = token.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || (end && *end != '\0'))
    throw ConfigError("state file: bad number \"" + token + "\" " + context);
  return v;
}

}  // namespace

RotorState parse_state_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("theta,re,im", 0) != 0)
    throw ConfigError("state file: expected header theta,re,im");

  std::vector<double> thetas;
  std::vector<std::complex<double>> amps;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string tok;
    double v[3];
    const std::string context = "at line " + std::to_string(row);
    for (int k = 0; k < 3; ++k) {
      if (!std::getline(fields, tok, ','))
        throw ConfigError("state file: expected 3 columns " + context);
      v[k] = parse_field(tok, context);
    }
    if (std::getline(fields, tok, ','))
      throw ConfigError("state file: expected 3 columns " + context);
    thetas.push_back(v[0]);
    amps.emplace_back(v[1], v[2]);
  }

  const int n = static_cast<int>(thetas.size());
  if (n < 8) throw ConfigError("state file: need at least 8 grid points");
  double period = (thetas[1] - thetas[0]) * n;
  if (!(period > 0.0)) throw ConfigError("state file: theta column is not increasing");
  if (std::abs(period - M_PI) < 1e-9) period = M_PI;

  RotorState state;
  state.grid = AngularGrid::make(n, period);
  for (int j = 0; j < n; ++j) {
    if (std::abs(thetas[j] - state.grid.theta_values[j]) > 1e-9 * period)
      throw ConfigError("state file: theta column is not a uniform grid starting at -period/2");
  }
  state.amplitudes = std::move(amps);
  return state;
}

RotorState read_state_file(const std::string& path) {
  return parse_state_csv(read_text_file(path));
}

OutputWriter::OutputWriter(std::string directory) : directory_(std::move(directory)) {
  if (directory_.empty()) throw ConfigError("output directory must not be empty");
  std::error_code ec;
  std::filesystem::create_directories(directory_, ec);
  if (ec) throw ConfigError("cannot create output directory " + directory_ + ": " + ec.message());
}

void OutputWriter::write(const std::string& name, const std::string& content) {
  const std::string path = directory_ + "/" + name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (out.fail()) throw ConfigError("cannot write " + path);
  entries_.push_back({name, content.size(), fnv1a64(content)});
}

}  // namespace rotor
