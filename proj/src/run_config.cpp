// SPDX-License-Identifier: Apache-2.0

#include "platemem/run_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace platemem {

namespace {

std::string tagged(int line, int column, const std::string& message) {
  return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message;
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

struct Token {
  std::string_view text;
  int column = 1;  // 1-based column of the first character
};

Token trim(std::string_view s, int column) {
  std::size_t a = 0, b = s.size();
  while (a < b && is_space(s[a])) ++a;
  while (b > a && is_space(s[b - 1])) --b;
  return {s.substr(a, b - a), column + static_cast<int>(a)};
}

double to_real(const Token& v, int line) {
  double x = 0.0;
  const char* end = v.text.data() + v.text.size();
  auto [ptr, ec] = std::from_chars(v.text.data(), end, x);
  if (v.text.empty() || ec != std::errc() || ptr != end || !std::isfinite(x))
    throw ConfigError(line, v.column, "expected a real number, got '" + std::string(v.text) + "'");
  return x;
}

double to_positive(const Token& v, int line) {
  const double x = to_real(v, line);
  if (!(x > 0.0)) throw ConfigError(line, v.column, "expected a positive number, got '" + std::string(v.text) + "'");
  return x;
}

long long to_integer(const Token& v, int line) {
  long long x = 0;
  const char* end = v.text.data() + v.text.size();
  auto [ptr, ec] = std::from_chars(v.text.data(), end, x);
  if (v.text.empty() || ec != std::errc() || ptr != end)
    throw ConfigError(line, v.column, "expected an integer, got '" + std::string(v.text) + "'");
  return x;
}

int to_int(const Token& v, int line) {
  const long long x = to_integer(v, line);
  if (x < -1000000000LL || x > 1000000000LL) throw ConfigError(line, v.column, "integer out of range");
  return static_cast<int>(x);
}

using Setter = std::function<void(RunConfig&, const Token&, int)>;

Setter real(double PhysicalParams::*field) {
  return [field](RunConfig& c, const Token& v, int line) { c.params.*field = to_real(v, line); };
}

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"rho0", real(&PhysicalParams::rho0)},
      {"rho1", real(&PhysicalParams::rho1)},
      {"rho2", real(&PhysicalParams::rho2)},
      {"beta0", real(&PhysicalParams::beta0)},
      {"beta1", real(&PhysicalParams::beta1)},
      {"beta2", real(&PhysicalParams::beta2)},
      {"mu", real(&PhysicalParams::mu)},
      {"gamma", real(&PhysicalParams::gamma)},
      {"rho", real(&PhysicalParams::rho_damp)},
      {"m", real(&PhysicalParams::m_damp)},
      {"kappa", real(&PhysicalParams::kappa)},
      {"r_interface", [](RunConfig& c, const Token& v, int l) { c.geometry.r_interface = to_real(v, l); }},
      {"r_outer", [](RunConfig& c, const Token& v, int l) { c.geometry.r_outer = to_real(v, l); }},
      {"x0_x", [](RunConfig& c, const Token& v, int l) { c.geometry.x0[0] = to_real(v, l); }},
      {"x0_y", [](RunConfig& c, const Token& v, int l) { c.geometry.x0[1] = to_real(v, l); }},
      {"n_plate", [](RunConfig& c, const Token& v, int l) { c.resolution.n_plate = to_int(v, l); }},
      {"n_mem", [](RunConfig& c, const Token& v, int l) { c.resolution.n_mem = to_int(v, l); }},
      {"mode_min", [](RunConfig& c, const Token& v, int l) { c.mode_min = to_int(v, l); }},
      {"mode_max", [](RunConfig& c, const Token& v, int l) { c.mode_max = to_int(v, l); }},
      {"dt", [](RunConfig& c, const Token& v, int l) { c.dt = to_positive(v, l); }},
      {"t_end", [](RunConfig& c, const Token& v, int l) { c.t_end = to_positive(v, l); }},
      {"seed",
       [](RunConfig& c, const Token& v, int l) {
         const long long x = to_integer(v, l);
         if (x < 0) throw ConfigError(l, v.column, "seed must be nonnegative");
         c.seed = static_cast<std::uint64_t>(x);
       }},
      {"output_dir",
       [](RunConfig& c, const Token& v, int l) {
         if (v.text.empty()) throw ConfigError(l, v.column, "output_dir is empty");
         c.output_dir = std::string(v.text);
       }},
      {"profiles",
       [](RunConfig& c, const Token& v, int l) {
         c.profiles.clear();
         std::size_t start = 0;
         while (true) {
           const std::size_t comma = v.text.find(',', start);
           const auto piece = v.text.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                                    : comma - start);
           const Token name = trim(piece, v.column + static_cast<int>(start));
           if (name.text.empty()) throw ConfigError(l, name.column, "empty profile name");
           try {
             parse_profile(std::string(name.text));
           } catch (const std::invalid_argument& e) {
             throw ConfigError(l, name.column, e.what());
           }
           c.profiles.emplace_back(name.text);
           if (comma == std::string_view::npos) break;
           start = comma + 1;
         }
       }},
  };
  return table;
}

}  // namespace

ConfigError::ConfigError(int line, int column, const std::string& message)
    : std::runtime_error(tagged(line, column, message)), line_(line), column_(column) {}

std::vector<InitialProfile> RunConfig::initial_profiles() const {
  std::vector<InitialProfile> out;
  for (const auto& name : profiles) out.push_back(parse_profile(name, seed));
  return out;
}

RunConfig parse_config(std::string_view text) {
  RunConfig config;
  std::set<std::string, std::less<>> seen;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    ++line_no;
    if (const std::size_t hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

    const Token whole = trim(line, 1);
    if (!whole.text.empty()) {
      const std::size_t eq = line.find('=');
      if (eq == std::string_view::npos) throw ConfigError(line_no, whole.column, "expected 'key = value'");
      const Token key = trim(line.substr(0, eq), 1);
      const Token value = trim(line.substr(eq + 1), static_cast<int>(eq) + 2);
      if (key.text.empty()) throw ConfigError(line_no, whole.column, "missing key before '='");
      const auto it = setters().find(key.text);
      if (it == setters().end())
        throw ConfigError(line_no, key.column, "unknown key '" + std::string(key.text) + "'");
      if (!seen.insert(std::string(key.text)).second)
        throw ConfigError(line_no, key.column, "repeated key '" + std::string(key.text) + "'");
      if (value.text.empty()) throw ConfigError(line_no, value.column, "missing value for '" + std::string(key.text) + "'");
      it->second(config, value, line_no);
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read config '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return parse_config(os.str());
}

void validate_config(const RunConfig& c) {
  std::vector<std::string> bad;
  try {
    validate_params(c.params, c.geometry);
  } catch (const ValidationError& e) {
    bad = e.violations();
  }
  if (c.resolution.n_plate < kMinPencilNodes) bad.push_back("n_plate must be at least " + std::to_string(kMinPencilNodes));
  if (c.resolution.n_mem < kMinPencilNodes) bad.push_back("n_mem must be at least " + std::to_string(kMinPencilNodes));
  if (c.mode_min < 0) bad.emplace_back("mode_min must be nonnegative");
  if (c.mode_max < c.mode_min) bad.emplace_back("mode_max must not be smaller than mode_min");
  if (c.dt < 0.0) bad.emplace_back("dt must be positive (or omitted)");
  if (c.t_end < 0.0) bad.emplace_back("t_end must be positive (or omitted)");
  if (c.profiles.empty()) bad.emplace_back("profiles must name at least one profile");
  if (!bad.empty()) throw ValidationError(std::move(bad));
}

}  // namespace platemem
