#include "ringbec/config.hpp"

#include "ringbec/errors.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

namespace ringbec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Range {
  double lo = -kInf;
  double hi = kInf;
  bool lo_open = false;
  bool hi_open = false;

  bool contains(double v) const {
    if (lo_open ? !(v > lo) : !(v >= lo)) return false;
    if (hi_open ? !(v < hi) : !(v <= hi)) return false;
    return true;
  }
  std::string describe() const {
    std::ostringstream s;
    s << (lo_open ? "(" : "[") << lo << ", " << hi << (hi_open ? ")" : "]");
    return s.str();
  }
};

const Range kPositive{0.0, kInf, true, true};
const Range kNonNegative{0.0, kInf, false, true};
const Range kAny{-kInf, kInf, true, true};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) throw std::runtime_error("expected a number");
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(v)) {
    throw std::runtime_error("'" + t + "' is not a finite number");
  }
  return v;
}

long parse_integer(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) throw std::runtime_error("expected an integer");
  char* end = nullptr;
  errno = 0;
  const long v = std::strtol(t.c_str(), &end, 10);
  if (end != t.c_str() + t.size() || errno == ERANGE || v > std::numeric_limits<int>::max() ||
      v < std::numeric_limits<int>::min()) {
    throw std::runtime_error("'" + t + "' is not an integer");
  }
  return v;
}

bool parse_bool(const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "yes" || t == "on" || t == "1") return true;
  if (t == "false" || t == "no" || t == "off" || t == "0") return false;
  throw std::runtime_error("'" + t + "' is not a boolean");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  if (out.empty() || (out.size() == 1 && out[0].empty())) throw std::runtime_error("empty list");
  return out;
}

struct Key {
  std::string section;
  std::string name;
  bool required = false;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::optional<std::string>(const RunConfig&)> get;
};

template <class Access>
Key real_key(const char* section, const char* name, Access access, Range range,
             bool required = false) {
  Key k{section, name, required, {}, {}};
  k.set = [access, range](RunConfig& c, const std::string& v) {
    const double x = parse_real(v);
    if (!range.contains(x)) {
      std::ostringstream s;
      s << "value " << x << " out of range " << range.describe();
      throw std::runtime_error(s.str());
    }
    access(c) = x;
  };
  k.get = [access](const RunConfig& c) -> std::optional<std::string> {
    return format_double(access(const_cast<RunConfig&>(c)));
  };
  return k;
}

template <class Access>
Key int_key(const char* section, const char* name, Access access, long lo, long hi) {
  Key k{section, name, false, {}, {}};
  k.set = [access, lo, hi](RunConfig& c, const std::string& v) {
    const long x = parse_integer(v);
    if (x < lo || x > hi) {
      std::ostringstream s;
      s << "value " << x << " out of range [" << lo << ", " << hi << "]";
      throw std::runtime_error(s.str());
    }
    access(c) = static_cast<int>(x);
  };
  k.get = [access](const RunConfig& c) -> std::optional<std::string> {
    return std::to_string(access(const_cast<RunConfig&>(c)));
  };
  return k;
}

template <class Access>
Key optional_int_key(const char* section, const char* name, Access access, long lo) {
  Key k{section, name, false, {}, {}};
  k.set = [access, lo](RunConfig& c, const std::string& v) {
    const long x = parse_integer(v);
    if (x < lo) throw std::runtime_error("value " + std::to_string(x) + " must be >= " + std::to_string(lo));
    access(c) = static_cast<int>(x);
  };
  k.get = [access](const RunConfig& c) -> std::optional<std::string> {
    const auto& v = access(const_cast<RunConfig&>(c));
    if (!v) return std::nullopt;
    return std::to_string(*v);
  };
  return k;
}

template <class Access>
Key bool_key(const char* section, const char* name, Access access) {
  Key k{section, name, false, {}, {}};
  k.set = [access](RunConfig& c, const std::string& v) { access(c) = parse_bool(v); };
  k.get = [access](const RunConfig& c) -> std::optional<std::string> {
    return access(const_cast<RunConfig&>(c)) ? "true" : "false";
  };
  return k;
}

template <class E, class Access>
Key enum_key(const char* section, const char* name, Access access,
             std::vector<std::pair<std::string, E>> values) {
  Key k{section, name, false, {}, {}};
  k.set = [access, values](RunConfig& c, const std::string& v) {
    const std::string t = trim(v);
    std::string allowed;
    for (const auto& [label, e] : values) {
      if (label == t) {
        access(c) = e;
        return;
      }
      allowed += (allowed.empty() ? "" : ", ") + label;
    }
    throw std::runtime_error("'" + t + "' is not one of " + allowed);
  };
  k.get = [access, values](const RunConfig& c) -> std::optional<std::string> {
    const E cur = access(const_cast<RunConfig&>(c));
    for (const auto& [label, e] : values) {
      if (e == cur) return label;
    }
    return std::nullopt;
  };
  return k;
}

template <class Access>
Key real_list_key(const char* section, const char* name, Access access, Range range) {
  Key k{section, name, false, {}, {}};
  k.set = [access, range](RunConfig& c, const std::string& v) {
    std::vector<double> out;
    for (const auto& item : split_list(v)) {
      const double x = parse_real(item);
      if (!range.contains(x)) {
        std::ostringstream s;
        s << "list value " << x << " out of range " << range.describe();
        throw std::runtime_error(s.str());
      }
      out.push_back(x);
    }
    access(c) = out;
  };
  k.get = [access](const RunConfig& c) -> std::optional<std::string> {
    std::string s;
    for (double x : access(const_cast<RunConfig&>(c))) s += (s.empty() ? "" : ", ") + format_double(x);
    return s;
  };
  return k;
}

template <class Access>
Key int_list_key(const char* section, const char* name, Access access, long lo, long hi) {
  Key k{section, name, false, {}, {}};
  k.set = [access, lo, hi](RunConfig& c, const std::string& v) {
    std::vector<int> out;
    for (const auto& item : split_list(v)) {
      const long x = parse_integer(item);
      if (x < lo || x > hi) {
        throw std::runtime_error("list value " + std::to_string(x) + " out of range [" +
                                 std::to_string(lo) + ", " + std::to_string(hi) + "]");
      }
      out.push_back(static_cast<int>(x));
    }
    access(c) = out;
  };
  k.get = [access](const RunConfig& c) -> std::optional<std::string> {
    std::string s;
    for (int x : access(const_cast<RunConfig&>(c))) s += (s.empty() ? "" : ", ") + std::to_string(x);
    return s;
  };
  return k;
}

#define FIELD(path) [](RunConfig& c) -> auto& { return c.path; }

const std::vector<Key>& keys() {
  static const std::vector<Key> table = [] {
    std::vector<Key> t;
    t.push_back(real_key("mesh", "r_min", FIELD(mesh.r_min), kPositive, true));
    t.push_back(real_key("mesh", "r_max", FIELD(mesh.r_max), kPositive, true));
    t.push_back(real_key("mesh", "h", FIELD(mesh.h), kPositive, true));
    t.push_back(optional_int_key("mesh", "n_circles", FIELD(mesh.n_circles), 2));
    t.push_back(optional_int_key("mesh", "n_points", FIELD(mesh.n_points), 3));
    t.push_back(bool_key("mesh", "match_paper_counts", FIELD(mesh.match_paper_counts)));

    t.push_back(real_key("physics", "m", FIELD(physics.m), kPositive, true));
    t.push_back(real_key("physics", "V0", FIELD(physics.V0), kNonNegative, true));
    t.push_back(real_key("physics", "gamma", FIELD(physics.gamma), kNonNegative, true));
    t.push_back(real_key("physics", "V_p", FIELD(physics.V_p), Range{0.0, 1.0}));
    t.push_back(int_key("physics", "n_theta", FIELD(physics.n_theta), 1, 100000));
    t.push_back(real_key("physics", "omega", FIELD(physics.omega), kAny));
    t.push_back(enum_key<BoundaryCondition>(
        "physics", "bc", FIELD(physics.bc),
        {{"dirichlet", BoundaryCondition::Dirichlet}, {"neumann", BoundaryCondition::Neumann}}));

    t.push_back(real_key("flow", "kappa0", FIELD(flow.kappa0), kPositive));
    t.push_back(real_key("flow", "epsilon", FIELD(flow.epsilon), kPositive));
    t.push_back(int_key("flow", "max_iters", FIELD(flow.max_iters), 1, std::numeric_limits<int>::max()));
    t.push_back(real_key("flow", "kappa_floor", FIELD(flow.kappa_floor), kPositive));

    t.push_back(real_key("split", "tau", FIELD(split.tau), kPositive));
    t.push_back(real_key("split", "t_max", FIELD(split.t_max), kPositive));
    t.push_back(int_key("split", "snapshot_stride", FIELD(split.snapshot_stride), 0,
                        std::numeric_limits<int>::max()));
    t.push_back(bool_key("split", "fuse_b_steps", FIELD(split.fuse_b_steps)));
    t.push_back(enum_key<KineticSolver>("split", "solver", FIELD(split.solver),
                                        {{"direct", KineticSolver::Direct},
                                         {"iterative", KineticSolver::Iterative}}));
    t.push_back(enum_key<InitialState>("split", "initial", FIELD(split.initial),
                                       {{"ground_state", InitialState::GroundState},
                                        {"unstable", InitialState::Unstable}}));

    t.push_back(real_key("detect", "tol1", FIELD(detect.tol1), kPositive));
    t.push_back(real_key("detect", "tol2", FIELD(detect.tol2), kPositive));
    t.push_back(int_key("detect", "lambda_max", FIELD(detect.lambda_max), 1, 1000));
    t.push_back(real_key("detect", "delta", FIELD(detect.delta), kPositive));
    t.push_back(real_key("detect", "vort_threshold", FIELD(detect.vort_threshold), kPositive));

    t.push_back(bool_key("modes", "enabled", FIELD(modes.enabled)));
    t.push_back(int_key("modes", "P", FIELD(modes.P), 0, 10000));
    t.push_back(int_key("modes", "L", FIELD(modes.L), 0, 10000));
    t.push_back(int_key("modes", "n", FIELD(modes.n), 2, 1000000));

    {
      Key k{"output", "dir", false, {}, {}};
      k.set = [](RunConfig& c, const std::string& v) {
        const std::string d = trim(v);
        if (d.empty()) throw std::runtime_error("output directory must not be empty");
        c.output.dir = d;
      };
      k.get = [](const RunConfig& c) -> std::optional<std::string> { return c.output.dir; };
      t.push_back(k);
    }
    t.push_back(bool_key("output", "vtk", FIELD(output.vtk)));
    t.push_back(bool_key("output", "all_snapshots", FIELD(output.all_snapshots)));

    t.push_back(real_list_key("harness", "space_h", FIELD(harness.space_h), kPositive));
    t.push_back(int_list_key("harness", "space_beta", FIELD(harness.space_beta), 1, 1000));
    t.push_back(real_key("harness", "time_t_max", FIELD(harness.time_t_max), kPositive));
    t.push_back(int_list_key("harness", "time_k", FIELD(harness.time_k), 1, 30));
    t.push_back(real_key("harness", "time_kick", FIELD(harness.time_kick), kAny));
    return t;
  }();
  return table;
}

#undef FIELD

const std::vector<std::string>& section_order() {
  static const std::vector<std::string> order{"mesh",  "physics", "flow",   "split",
                                              "detect", "modes",  "output", "harness"};
  return order;
}

}  // namespace

std::string format_double(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

void RunConfig::validate() const {
  mesh.validate();
  PotentialParams pot = physics.potential();
  pot.validate();
  flow.validate();
  split_config().validate();
  detect.validate();
  if (modes.enabled) radial_params().validate();
  if (modes.P + 1 > modes.n - 1) throw ConfigError("modes: need P + 1 <= n - 1");
  if (output.dir.empty()) throw ConfigError("output: dir must not be empty");
}

SplitStepConfig RunConfig::split_config() const {
  SplitStepConfig c;
  c.tau = split.tau;
  c.t_max = split.t_max;
  c.m = physics.m;
  c.gamma = physics.gamma;
  c.snapshot_stride = split.snapshot_stride;
  c.fuse_b_steps = split.fuse_b_steps;
  c.solver = split.solver;
  return c;
}

RadialParams RunConfig::radial_params() const {
  return {mesh.r_min, mesh.r_max, physics.m, physics.V0};
}

RunConfig parse_config(const std::string& text) {
  std::map<std::pair<std::string, std::string>, const Key*> index;
  std::set<std::string> sections(section_order().begin(), section_order().end());
  for (const auto& k : keys()) index[{k.section, k.name}] = &k;

  RunConfig config;
  std::map<std::pair<std::string, std::string>, int> seen;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  auto fail = [&](const std::string& msg) -> void {
    throw ConfigError("line " + std::to_string(line_no) + ": " + msg);
  };
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail("malformed section header '" + line + "'");
      section = trim(line.substr(1, line.size() - 2));
      if (!sections.count(section)) fail("unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected 'key = value', got '" + line + "'");
    const std::string name = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) fail("key '" + name + "' outside of a section");
    const auto it = index.find({section, name});
    if (it == index.end()) fail("unknown key " + section + "." + name);
    if (seen.count({section, name})) {
      fail("duplicate key " + section + "." + name + " (first set on line " +
           std::to_string(seen[{section, name}]) + ")");
    }
    seen[{section, name}] = line_no;
    try {
      it->second->set(config, value);
    } catch (const std::runtime_error& e) {
      fail(section + "." + name + ": " + e.what());
    }
  }
  for (const auto& k : keys()) {
    if (k.required && !seen.count({k.section, k.name})) {
      throw ConfigError("missing required key " + k.section + "." + k.name);
    }
  }
  try {
    config.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string serialize_config(const RunConfig& config) {
  std::ostringstream out;
  bool first = true;
  for (const auto& section : section_order()) {
    if (!first) out << "\n";
    first = false;
    out << "[" << section << "]\n";
    for (const auto& k : keys()) {
      if (k.section != section) continue;
      const auto v = k.get(config);
      if (v) out << k.name << " = " << *v << "\n";
    }
  }
  return out.str();
}

std::vector<std::string> preset_names() { return {"paper62", "unstable-dirichlet", "unstable-neumann"}; }

RunConfig preset_config(const std::string& name) {
  RunConfig c;
  c.mesh.r_min = 0.6;
  c.mesh.r_max = 1.4;
  c.mesh.h = 0.03;
  c.mesh.n_circles = 41;
  c.mesh.n_points = 486;
  c.mesh.match_paper_counts = true;
  c.physics = PhysicsParams{};
  c.split.tau = 3.0 / 5000.0;
  c.split.t_max = 3.0;
  c.split.snapshot_stride = 500;
  if (name == "paper62") {
    c.physics.V_p = 0.05;
    c.physics.n_theta = 6;
    c.physics.omega = 10.0 * std::numbers::pi / 3.0;
    c.modes.L = 80;
    c.output.dir = "out/paper62";
  } else if (name == "unstable-dirichlet") {
    c.split.initial = InitialState::Unstable;
    c.output.dir = "out/unstable-dirichlet";
  } else if (name == "unstable-neumann") {
    c.physics.bc = BoundaryCondition::Neumann;
    c.physics.V0 = 0.0;
    c.split.initial = InitialState::Unstable;
    c.modes.enabled = false;
    c.output.dir = "out/unstable-neumann";
  } else {
    std::string names;
    for (const auto& n : preset_names()) names += (names.empty() ? "" : ", ") + n;
    throw ConfigError("unknown preset '" + name + "' (expected one of " + names + ")");
  }
  c.validate();
  return c;
}

}  // namespace ringbec
