#pragma once

#include <map>
#include <string>
#include <vector>

#include "nlskt/kernels.hpp"
#include "nlskt/model.hpp"
#include "nlskt/newton.hpp"

namespace nlskt {

// Flat "section.key" -> text configuration with a fixed key set per subcommand.
// Files are INI ([section] then key = value).
class RunConfig {
 public:
  static RunConfig defaults(const std::string& subcommand);
  static const std::vector<std::string>& subcommands();

  const std::string& subcommand() const { return subcommand_; }

  // Unknown keys throw ConfigError naming the key.
  void set(const std::string& key, const std::string& value);
  // key=value
  void set_assignment(const std::string& assignment);
  void load_file(const std::string& path);
  void load_string(const std::string& text);
  std::string to_ini() const;

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::string get_string(const std::string& key) const;
  double get_double(const std::string& key) const;
  int get_int(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<double> get_list(const std::string& key) const;
  const std::map<std::string, std::string>& values() const { return values_; }

  bool operator==(const RunConfig& o) const { return subcommand_ == o.subcommand_ && values_ == o.values_; }

 private:
  std::string subcommand_;
  std::map<std::string, std::string> values_;
};

SolverConfig solver_config(const RunConfig& cfg);

// dirac | smooth | indicator:<width> | hunting:<radius> | annulus | annulus-quadrant
KernelSpec parse_kernel(const std::string& text);

// zero | lotka-volterra | segel-levin | mny, coefficients as a comma list (empty = defaults)
ReactionSpec parse_reaction(const std::string& type, const std::string& coefficients);

// Terms joined by '+': const:c | box:h:x0:x1[:y0:y1] | cos:amplitude[:phase]
Profile parse_profile(const std::string& text);

}  // namespace nlskt
