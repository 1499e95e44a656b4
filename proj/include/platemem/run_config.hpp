// SPDX-License-Identifier: Apache-2.0
//
// Plain `key = value` run configuration shared by the command-line tool.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "platemem/model.hpp"
#include "platemem/semigroup.hpp"
#include "platemem/spectral.hpp"

namespace platemem {

struct RunConfig {
  PhysicalParams params{};
  AnnulusGeometry geometry{};
  Resolution resolution{64, 64};
  int mode_min = 0;
  int mode_max = 4;
  double dt = 0.0;     // 0: default_time_step
  double t_end = 0.0;  // 0: default_t_end of the predicted regime
  std::vector<std::string> profiles{"plate_bump", "rough"};
  std::string output_dir = ".";
  std::uint64_t seed = 0;

  /// Profiles with `rough` seeded from `seed`.
  std::vector<InitialProfile> initial_profiles() const;
};

/// Parse failure at a 1-based line and column.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, int column, const std::string& message);
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

/// Blank lines and `#` comments are ignored.  Keys: rho0 rho1 rho2 beta0
/// beta1 beta2 mu gamma rho m kappa r_interface r_outer x0_x x0_y n_plate
/// n_mem mode_min mode_max dt t_end profiles output_dir seed.  `profiles` is
/// comma separated.  Unknown or repeated keys and malformed values throw
/// ConfigError.
RunConfig parse_config(std::string_view text);

/// parse_config on a file's contents; unreadable files throw std::runtime_error.
RunConfig load_config(const std::string& path);

/// Physical validation (validate_params) plus grid, mode and time checks.
/// Throws ValidationError listing every violation.
void validate_config(const RunConfig& config);

}  // namespace platemem
