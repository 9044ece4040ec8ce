#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rotor/analysis.hpp"
#include "rotor/state.hpp"
#include "rotor/trajectory.hpp"

namespace rotor {

// FNV-1a, 64 bit. Stable content fingerprint for manifests.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hash_hex(std::uint64_t hash);

// All CSV numbers go through this: 17 significant digits, enough to restore
// the double bit for bit on read-back.
std::string format_double(double value);

std::string read_text_file(const std::string& path);

// Sample table, one row per retained step. g2 is optional; rows beyond the
// supplied g2 values (or all of them, when null) get NaN in that column.
std::string moments_csv(const std::vector<TrajectorySample>& samples,
                        const std::vector<double>* g2_values);

// Value matrix only, theta rows by l columns; axes go in sidecar files.
std::string wigner_csv(const WignerMap& map);
std::string axis_csv(const std::string& name, const std::vector<double>& values);

std::string state_csv(const RotorState& state);

// Inverse of state_csv. The grid is rebuilt from the theta column; a period
// within 1e-9 of pi is snapped to pi exactly.
RotorState parse_state_csv(const std::string& text);
RotorState read_state_file(const std::string& path);

struct OutputEntry {
  std::string name;
  std::uint64_t bytes = 0;
  std::uint64_t hash = 0;
};

// Collects everything written into one directory (created on demand) so the
// manifest can list names, sizes and hashes at the end.
class OutputWriter {
 public:
  explicit OutputWriter(std::string directory);

  void write(const std::string& name, const std::string& content);
  const std::vector<OutputEntry>& entries() const { return entries_; }
  const std::string& directory() const { return directory_; }

 private:
  std::string directory_;
  std::vector<OutputEntry> entries_;
};

}  // namespace rotor
