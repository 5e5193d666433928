#include "penudge/cli/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "penudge/detail/random.hpp"

namespace penudge::cli {
namespace {

using ordered_json = nlohmann::ordered_json;

std::string where(const std::string& source, const YAML::Mark& m) {
  std::ostringstream os;
  os << source;
  if (!m.is_null()) os << ":" << m.line + 1 << ":" << m.column + 1;
  return os.str();
}

class Section {
 public:
  Section(YAML::Node node, std::string path, const std::string& source)
      : node_(std::move(node)), path_(std::move(path)), source_(source) {
    if (node_ && !node_.IsNull() && !node_.IsMap()) fail(node_, "expected a mapping");
  }

  [[nodiscard]] bool has(const std::string& key) {
    known_.insert(key);
    return node_ && node_.IsMap() && at(key);
  }

  [[nodiscard]] YAML::Node at(const std::string& key) const {
    const YAML::Node& n = node_;
    return n[key];
  }

  Section sub(const std::string& key) {
    known_.insert(key);
    return {node_ && node_.IsMap() ? at(key) : YAML::Node(), qualify(key), source_};
  }

  template <class T>
  void get(const std::string& key, T& out) {
    if (!has(key)) return;
    const YAML::Node n = at(key);
    try {
      out = n.as<T>();
    } catch (const YAML::Exception&) {
      fail(n, key, std::string("expected ") + type_name<T>());
    }
  }

  void get_positive(const std::string& key, double& out) {
    get(key, out);
    if (has(key) && !(out > 0.0 && std::isfinite(out))) fail(at(key), key, "must be positive");
  }

  template <class E>
  void get_enum(const std::string& key, E& out, const std::map<std::string, E>& names) {
    if (!has(key)) return;
    out = parse_enum(at(key), key, names);
  }

  template <class E>
  E parse_enum(const YAML::Node& n, const std::string& key, const std::map<std::string, E>& names) {
    std::string s;
    try {
      s = n.as<std::string>();
    } catch (const YAML::Exception&) {
      fail(n, key, "expected a string");
    }
    const auto it = names.find(s);
    if (it == names.end()) {
      std::string choices;
      for (const auto& [name, value] : names) choices += (choices.empty() ? "" : "|") + name;
      fail(n, key, "unknown value '" + s + "' (expected " + choices + ")");
    }
    return it->second;
  }

  template <class T>
  void get_list(const std::string& key, std::vector<T>& out,
                const std::function<T(const YAML::Node&)>& item) {
    if (!has(key)) return;
    const YAML::Node n = at(key);
    if (!n.IsSequence()) fail(n, key, "expected a list");
    out.clear();
    for (const auto& x : n) out.push_back(item(x));
  }

  /// Rejects keys that were never asked for, and repeated keys.
  void finish() const {
    if (!node_ || !node_.IsMap()) return;
    std::set<std::string> seen;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!known_.count(key)) fail(kv.first, key, "unknown key");
      if (!seen.insert(key).second) fail(kv.first, key, "duplicate key");
    }
  }

  [[noreturn]] void fail(const YAML::Node& n, const std::string& key,
                         const std::string& msg) const {
    throw ConfigError(where(source_, n.Mark()) + ": " + qualify(key) + ": " + msg);
  }
  [[noreturn]] void fail(const YAML::Node& n, const std::string& msg) const {
    throw ConfigError(where(source_, n.Mark()) + ": " + path_ + ": " + msg);
  }

  [[nodiscard]] std::string qualify(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

 private:
  template <class T>
  static const char* type_name() {
    if constexpr (std::is_same_v<T, bool>) return "a boolean";
    else if constexpr (std::is_integral_v<T>) return "an integer";
    else if constexpr (std::is_floating_point_v<T>) return "a number";
    else return "a string";
  }

  YAML::Node node_;
  std::string path_;
  const std::string& source_;
  std::set<std::string> known_;
};

const std::map<std::string, ForcingPattern> kPatterns{{"none", ForcingPattern::None},
                                                      {"shear", ForcingPattern::Shear},
                                                      {"cellular", ForcingPattern::Cellular},
                                                      {"broadband", ForcingPattern::Broadband}};
const std::map<std::string, ObservationKind> kKinds{{"identity", ObservationKind::Identity},
                                                    {"cutoff", ObservationKind::SpectralCutoff},
                                                    {"local_average", ObservationKind::LocalAverage}};
const std::map<std::string, ForcingMode> kModes{{"exact", ForcingMode::Exact},
                                                {"observed", ForcingMode::Observed}};
const std::map<std::string, InitialGuess> kGuesses{{"zero", InitialGuess::Zero},
                                                   {"reference", InitialGuess::Reference},
                                                   {"scaled", InitialGuess::Scaled}};
const std::map<std::string, T0Policy> kPolicies{
    {"immediate", T0Policy::Immediate}, {"small_gradient_window", T0Policy::SmallGradientWindow}};
const std::map<std::string, GateMode> kGateModes{{"calibrated", GateMode::Calibrated},
                                                 {"configured", GateMode::Configured}};

ExperimentConfig parse_root(const YAML::Node& root, const std::string& source) {
  ExperimentConfig c;
  Section top(root, "", source);
  if (!top.has("version")) throw ConfigError(source + ": version: missing (expected 1)");
  top.get("version", c.version);
  if (c.version != kConfigVersion)
    top.fail(root["version"], "version", "unsupported version " + std::to_string(c.version));
  top.get("seed", c.seed);
  top.get("output_dir", c.output_dir);
  top.get_positive("sample_interval", c.sim.sample_interval);
  top.get("plot", c.plot);

  {
    auto s = top.sub("grid");
    auto& g = c.sim.grid;
    s.get("nx", g.nx);
    s.get("ny", g.ny);
    s.get("nz", g.nz);
    s.get_positive("l", g.l);
    s.get_positive("lx", g.lx);
    s.get_positive("ly", g.ly);
    s.get_positive("dealias_fraction", g.dealias_fraction);
    s.finish();
  }
  {
    auto s = top.sub("sim");
    s.get_positive("nu", c.sim.nu);
    s.get_positive("dt", c.sim.dt);
    s.get("t_end", c.sim.t_end);
    s.get("t_spin", c.t_spin);
    s.get_positive("cfl_max", c.sim.cfl_max);
    s.get("seed_amplitude", c.sim.seed_amplitude);
    auto f = s.sub("forcing");
    auto& fs = c.sim.forcing;
    f.get_enum("pattern", fs.pattern, kPatterns);
    f.get("amplitude", fs.amplitude);
    f.get("wavenumber", fs.wavenumber);
    f.get("mean", fs.mean);
    f.get("modulation", fs.modulation);
    f.get("omega", fs.omega);
    f.get("holder_exponent", fs.holder_exponent);
    if (!(fs.holder_exponent > 0.0 && fs.holder_exponent <= 1.0))
      throw ConfigError(source + ": sim.forcing.holder_exponent: must lie in (0, 1]");
    if (fs.pattern != ForcingPattern::None && fs.wavenumber < 1)
      throw ConfigError(source + ": sim.forcing.wavenumber: must be >= 1");
    f.finish();
    s.finish();
  }
  {
    auto s = top.sub("observation");
    ObservationKind kind = c.observation.kind;
    double K = c.observation.cutoff, h = 0.25 * c.sim.grid.lx;
    s.get_enum("kind", kind, kKinds);
    s.get_positive("K", K);
    s.get_positive("h", h);
    switch (kind) {
      case ObservationKind::Identity: c.observation = ObservationOp::identity(); break;
      case ObservationKind::SpectralCutoff: c.observation = ObservationOp::spectral_cutoff(K); break;
      case ObservationKind::LocalAverage: c.observation = ObservationOp::local_average(h); break;
    }
    s.finish();
  }
  {
    auto s = top.sub("nudge");
    s.get("mu", c.nudge.mu);
    s.get_enum("forcing_mode", c.nudge.forcing_mode, kModes);
    s.get_enum("initial_guess", c.nudge.initial_guess, kGuesses);
    s.get("guess_scale", c.nudge.guess_scale);
    s.get_enum("t0_policy", c.nudge.t0_policy, kPolicies);
    s.get_positive("t0_window", c.nudge.t0_window);
    s.finish();
  }
  {
    auto s = top.sub("gates");
    s.get_enum("mode", c.gates.mode, kGateModes);
    s.get("samples", c.gates.samples);
    auto& k = c.gates.constants;
    s.get_positive("c0", k.c0);
    s.get_positive("c1", k.c1);
    s.get_positive("c_gate1", k.c_gate1);
    s.get_positive("c_gate1_delta", k.c_gate1_delta);
    s.get_positive("c_gate2", k.c_gate2);
    s.finish();
  }
  {
    auto s = top.sub("probes");
    s.get("random_fields", c.probes.random_fields);
    s.get("bumps", c.probes.bumps);
    s.get("single_modes", c.probes.single_modes);
    s.get("band", c.probes.band);
    s.get("samples", c.coercivity_samples);
    s.finish();
  }
  {
    auto s = top.sub("sweep");
    std::function<double(const YAML::Node&)> num = [&](const YAML::Node& n) {
      try {
        return n.as<double>();
      } catch (const YAML::Exception&) {
        s.fail(n, "expected a number");
      }
    };
    s.get_list("mu", c.sweep.mu, num);
    s.get_list("delta", c.sweep.delta, num);
    std::function<ForcingMode(const YAML::Node&)> mode = [&](const YAML::Node& n) {
      return s.parse_enum(n, "forcing_mode", kModes);
    };
    s.get_list("forcing_mode", c.sweep.forcing_mode, mode);
    s.get("threads", c.sweep.threads);
    s.finish();
  }
  top.finish();
  c.reseed(c.seed);
  c.validate();
  return c;
}

}  // namespace

const char* to_string(InitialGuess g) {
  switch (g) {
    case InitialGuess::Zero: return "zero";
    case InitialGuess::Reference: return "reference";
    case InitialGuess::Scaled: return "scaled";
  }
  return "?";
}

const char* to_string(GateMode m) {
  return m == GateMode::Calibrated ? "calibrated" : "configured";
}

void ExperimentConfig::reseed(std::uint64_t s) {
  seed = s;
  sim.forcing.seed = detail::split_seed(s, 0);
  probes.seed = detail::split_seed(s, 1);
}

void ExperimentConfig::validate() const {
  sim.validate();
  if (!(t_spin >= 0.0)) throw ConfigError("sim.t_spin: must be non-negative");
  if (!(nudge.mu >= 0.0)) throw ConfigError("nudge.mu: must be non-negative");
  if (gates.samples < 1) throw ConfigError("gates.samples: must be >= 1");
  if (coercivity_samples < 1) throw ConfigError("probes.samples: must be >= 1");
  if (probes.total() < 1) throw ConfigError("probes: the probe suite is empty");
  if (sweep.threads < 0) throw ConfigError("sweep.threads: must be >= 0");
  for (double m : sweep.mu)
    if (!(m >= 0.0)) throw ConfigError("sweep.mu: entries must be non-negative");
  for (double d : sweep.delta)
    if (!(d > 0.0)) throw ConfigError("sweep.delta: entries must be positive");
  observation.validate(sim.grid);
  if (!observation.spectral_diagonal() && nudge.mu > 0.0 && sim.dt > 0.5 / nudge.mu)
    throw ConfigError("nudge.mu: explicit local-average feedback needs dt <= 0.5 / mu");
}

std::string ExperimentConfig::canonical_json() const {
  const auto& g = sim.grid;
  const auto& f = sim.forcing;
  ordered_json j;
  j["version"] = version;
  j["seed"] = seed;
  j["sample_interval"] = sim.sample_interval;
  j["grid"] = {{"nx", g.nx}, {"ny", g.ny}, {"nz", g.nz}, {"l", g.l}, {"lx", g.lx},
               {"ly", g.ly}, {"dealias_fraction", g.dealias_fraction}};
  j["sim"] = {{"nu", sim.nu},
              {"dt", sim.dt},
              {"t_end", sim.t_end},
              {"t_spin", t_spin},
              {"cfl_max", sim.cfl_max},
              {"seed_amplitude", sim.seed_amplitude},
              {"forcing",
               {{"pattern", to_string(f.pattern)},
                {"amplitude", f.amplitude},
                {"wavenumber", f.wavenumber},
                {"mean", f.mean},
                {"modulation", f.modulation},
                {"omega", f.omega},
                {"holder_exponent", f.holder_exponent},
                {"seed", f.seed}}}};
  j["observation"] = {{"kind", to_string(observation.kind)},
                      {"K", observation.cutoff},
                      {"h", observation.cell},
                      {"delta", observation.delta()}};
  j["nudge"] = {{"mu", nudge.mu},
                {"forcing_mode", to_string(nudge.forcing_mode)},
                {"initial_guess", to_string(nudge.initial_guess)},
                {"guess_scale", nudge.guess_scale},
                {"t0_policy", to_string(nudge.t0_policy)},
                {"t0_window", nudge.t0_window}};
  const auto& k = gates.constants;
  j["gates"] = {{"mode", to_string(gates.mode)},
                {"samples", gates.samples},
                {"c0", k.c0},
                {"c1", k.c1},
                {"c_gate1", k.c_gate1},
                {"c_gate1_delta", k.c_gate1_delta},
                {"c_gate2", k.c_gate2}};
  j["probes"] = {{"random_fields", probes.random_fields},
                 {"bumps", probes.bumps},
                 {"single_modes", probes.single_modes},
                 {"band", probes.band},
                 {"seed", probes.seed},
                 {"samples", coercivity_samples}};
  ordered_json modes = ordered_json::array();
  for (auto m : sweep.forcing_mode) modes.push_back(to_string(m));
  j["sweep"] = {{"mu", sweep.mu}, {"delta", sweep.delta}, {"forcing_mode", modes}};
  j["plot"] = plot;
  return j.dump();
}

std::string ExperimentConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical_json()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(where(source, e.mark) + ": " + e.msg);
  }
  if (!root.IsMap()) throw ConfigError(source + ": top level must be a mapping");
  return parse_root(root, source);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

ObservationOp observation_at(const ExperimentConfig& c, double delta) {
  switch (c.observation.kind) {
    case ObservationKind::Identity: return ObservationOp::identity();
    case ObservationKind::SpectralCutoff: return ObservationOp::spectral_cutoff(1.0 / delta);
    case ObservationKind::LocalAverage: return ObservationOp::local_average(delta);
  }
  return c.observation;
}

NudgeParams nudge_params(const ExperimentConfig& c, const ObservationOp& J, double mu,
                         ForcingMode mode, const ProjectedVelocity& reference_start) {
  NudgeParams n;
  n.mu = mu;
  n.J = J;
  n.forcing_mode = mode;
  switch (c.nudge.initial_guess) {
    case InitialGuess::Zero: break;
    case InitialGuess::Reference: n.initial_guess = reference_start.velocity(); break;
    case InitialGuess::Scaled:
      n.initial_guess = c.nudge.guess_scale * reference_start.velocity();
      break;
  }
  return n;
}

}  // namespace penudge::cli
