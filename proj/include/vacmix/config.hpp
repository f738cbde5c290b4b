#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "vacmix/amplitudes.hpp"
#include "vacmix/errors.hpp"
#include "vacmix/medium.hpp"
#include "vacmix/modulation.hpp"
#include "vacmix/units.hpp"

namespace vacmix {

inline constexpr int kSchemaVersion = 1;

/// Wavenumber sweep, given either directly in k or as a vacuum-wavelength
/// range of the emission branch.
struct SweepConfig {
  bool by_lambda = true;
  double lo = 0.0; ///< k_min (rad/um) or lambda_min (um)
  double hi = 0.0;
  std::size_t points = 4000;
  bool operator==(const SweepConfig &) const = default;
};

struct OutputConfig {
  std::string csv = "spectrum.csv";
  std::string peaks = "peaks.json";
  double peak_floor_rel = 1e-8;
  bool operator==(const OutputConfig &) const = default;
};

struct FlagConfig {
  bool include_subleading = false;
  MixingMode mixing_mode = MixingMode::analytic;
  unsigned threads = 0; ///< 0 picks the hardware concurrency
  bool operator==(const FlagConfig &) const = default;
};

struct RunConfig {
  MediumSpec medium = fused_silica();
  ModulationSpec modulation;
  SweepConfig sweep;
  std::vector<Process> processes;
  std::size_t emission_branch = 1;
  OutputConfig outputs;
  FlagConfig flags;

  bool operator==(const RunConfig &) const = default;

  unsigned thread_count() const {
    return flags.threads ? flags.threads : std::max(1u, std::thread::hardware_concurrency());
  }

  SpectrumOptions spectrum_options() const {
    SpectrumOptions o;
    o.processes = processes;
    o.emission_branch = emission_branch;
    o.amp.mode = flags.mixing_mode;
    o.amp.include_subleading = flags.include_subleading;
    o.threads = thread_count();
    return o;
  }

  /// Sweep limits in k.
  std::pair<double, double> k_range() const {
    if (!sweep.by_lambda)
      return {sweep.lo, sweep.hi};
    // Longer wavelength means lower frequency and lower k.
    const double k_lo =
        k_for_branch_omega(medium, emission_branch, units::omega_from_lambda(sweep.hi));
    const double k_hi =
        k_for_branch_omega(medium, emission_branch, units::omega_from_lambda(sweep.lo));
    return {k_lo, k_hi};
  }
};

namespace config_detail {

using json = nlohmann::json;

inline std::size_t edit_distance(const std::string &a, const std::string &b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j)
    prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] != b[j - 1])});
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

inline void check_keys(const json &obj, const std::string &path,
                       const std::vector<std::string> &allowed) {
  if (!obj.is_object())
    throw ConfigError(path, "must be an object");
  for (const auto &[key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) != allowed.end())
      continue;
    std::string best;
    std::size_t best_d = 4;
    for (const auto &a : allowed) {
      const auto d = edit_distance(key, a);
      if (d < best_d)
        best_d = d, best = a;
    }
    const std::string where = path.empty() ? key : path + "." + key;
    throw ConfigError(where, best.empty() ? "is not a known key"
                                          : "is not a known key (did you mean '" + best + "'?)");
  }
}

inline std::string join(const std::string &path, const std::string &key) {
  return path.empty() ? key : path + "." + key;
}

inline double number(const json &obj, const std::string &path, const std::string &key) {
  const auto &v = obj.at(key);
  if (!v.is_number())
    throw ConfigError(join(path, key), "must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x))
    throw ConfigError(join(path, key), "must be finite");
  return x;
}

inline double positive(const json &obj, const std::string &path, const std::string &key) {
  const double x = number(obj, path, key);
  if (!(x > 0.0))
    throw ConfigError(join(path, key), "must be > 0");
  return x;
}

inline std::size_t index(const json &v, const std::string &path) {
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw ConfigError(path, "must be a nonnegative integer");
  return v.get<std::size_t>();
}

inline MediumSpec parse_medium(const json &j) {
  const std::string p = "medium";
  check_keys(j, p, {"name", "resonances"});
  const std::string name = j.value("name", std::string("custom"));
  if (!j.contains("resonances")) {
    if (name == "fused-silica")
      return fused_silica();
    throw ConfigError(join(p, "resonances"), "is required unless name is 'fused-silica'");
  }
  const auto &arr = j.at("resonances");
  if (!arr.is_array() || arr.empty())
    throw ConfigError(join(p, "resonances"), "must be a non-empty array");
  std::vector<Resonance> rs;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string rp = join(p, "resonances[" + std::to_string(i) + "]");
    const auto &r = arr[i];
    check_keys(r, rp, {"lambda_um", "omega", "B", "g"});
    const bool has_l = r.contains("lambda_um"), has_o = r.contains("omega");
    const bool has_B = r.contains("B"), has_g = r.contains("g");
    if (has_l == has_o)
      throw ConfigError(rp, "needs exactly one of lambda_um or omega");
    if (has_B == has_g)
      throw ConfigError(rp, "needs exactly one of B or g");
    const double omega = has_l ? units::omega_from_lambda(positive(r, rp, "lambda_um"))
                               : positive(r, rp, "omega");
    double g;
    if (has_B) {
      const double B = number(r, rp, "B");
      if (B < 0.0)
        throw ConfigError(join(rp, "B"), "must be >= 0");
      g = std::sqrt(B) * omega;
    } else {
      g = number(r, rp, "g");
      if (g < 0.0)
        throw ConfigError(join(rp, "g"), "must be >= 0");
    }
    rs.push_back({omega, g});
  }
  std::sort(rs.begin(), rs.end(),
            [](const Resonance &a, const Resonance &b) { return a.omega_res < b.omega_res; });
  try {
    return MediumSpec(name, rs);
  } catch (const std::invalid_argument &e) {
    throw ConfigError(join(p, "resonances"), e.what());
  }
}

inline ModulationSpec parse_modulation(const json &j, const MediumSpec &medium) {
  const std::string p = "modulation";
  check_keys(j, p, {"target_m", "eps", "delta_n_at_lambda", "nu1", "nu2", "tau_fs", "tau_um"});
  ModulationSpec s;
  s.target_m = j.contains("target_m") ? index(j.at("target_m"), join(p, "target_m")) : 1;
  if (s.target_m >= medium.size())
    throw ConfigError(join(p, "target_m"), "refers to missing resonance " + std::to_string(s.target_m) +
                                               " (medium has " +
                                               std::to_string(medium.size()) + ")");
  const double Om = medium[s.target_m].omega_res;
  s.nu1 = j.contains("nu1") ? positive(j, p, "nu1") : Om / 5.0;
  s.nu2 = j.contains("nu2") ? positive(j, p, "nu2") : Om / 6.0;
  if (j.contains("tau_fs") && j.contains("tau_um"))
    throw ConfigError(p, "takes tau_fs or tau_um, not both");
  s.tau = j.contains("tau_um") ? positive(j, p, "tau_um")
                               : units::fs_to_um(j.contains("tau_fs") ? positive(j, p, "tau_fs")
                                                                      : 42.0);

  if (j.contains("eps") && j.contains("delta_n_at_lambda"))
    throw ConfigError(p, "takes eps or delta_n_at_lambda, not both");
  if (j.contains("eps")) {
    s.eps = number(j, p, "eps");
  } else {
    double dn = 1e-3, lam = 0.65;
    if (j.contains("delta_n_at_lambda")) {
      const auto &d = j.at("delta_n_at_lambda");
      const std::string dp = join(p, "delta_n_at_lambda");
      check_keys(d, dp, {"delta_n", "lambda_um"});
      if (d.contains("delta_n"))
        dn = number(d, dp, "delta_n");
      if (d.contains("lambda_um"))
        lam = positive(d, dp, "lambda_um");
    }
    try {
      s.eps = eps_for_delta_n(medium, s.target_m, lam, dn);
    } catch (const NumericError &e) {
      throw ConfigError(join(p, "delta_n_at_lambda"), e.what());
    }
  }
  return s;
}

inline SweepConfig parse_sweep(const json &j) {
  const std::string p = "sweep";
  check_keys(j, p, {"k_min", "k_max", "lambda_min_um", "lambda_max_um", "points"});
  SweepConfig s;
  s.lo = units::lambda_from_omega(20.0);
  s.hi = units::lambda_from_omega(3.0);
  const bool has_k = j.contains("k_min") || j.contains("k_max");
  const bool has_l = j.contains("lambda_min_um") || j.contains("lambda_max_um");
  if (has_k && has_l)
    throw ConfigError(p, "takes a k range or a lambda range, not both");
  if (has_k) {
    if (!j.contains("k_min") || !j.contains("k_max"))
      throw ConfigError(p, "needs both k_min and k_max");
    s.by_lambda = false;
    s.lo = number(j, p, "k_min");
    s.hi = number(j, p, "k_max");
    if (s.lo < 0.0)
      throw ConfigError(join(p, "k_min"), "must be >= 0");
  } else if (has_l) {
    if (!j.contains("lambda_min_um") || !j.contains("lambda_max_um"))
      throw ConfigError(p, "needs both lambda_min_um and lambda_max_um");
    s.lo = positive(j, p, "lambda_min_um");
    s.hi = positive(j, p, "lambda_max_um");
  }
  if (!(s.hi > s.lo))
    throw ConfigError(p, "range must have max > min");
  if (j.contains("points")) {
    s.points = index(j.at("points"), join(p, "points"));
    if (s.points < 3)
      throw ConfigError(join(p, "points"), "must be >= 3");
  }
  return s;
}

} // namespace config_detail

/// Parses and validates a config document. Missing blocks take the default
/// run: fused silica, resonance 1 modulated at Omega_1/5 and Omega_1/6,
/// tau = 42 fs, eps giving delta_n = 1e-3 at 0.65 um.
inline RunConfig parse_config(const nlohmann::json &root) {
  using namespace config_detail;
  const json empty = json::object();
  const json &j = root.is_null() ? empty : root;
  check_keys(j, "", {"schema", "medium", "modulation", "sweep", "processes", "outputs", "flags"});
  if (j.contains("schema") && !(j.at("schema").is_number_integer() &&
                                j.at("schema").get<int>() == kSchemaVersion))
    throw ConfigError("schema", "is unsupported (expected " +
                                    std::to_string(kSchemaVersion) + ")");

  RunConfig c;
  if (j.contains("medium"))
    c.medium = parse_medium(j.at("medium"));
  c.modulation = parse_modulation(j.value("modulation", empty), c.medium);
  c.sweep = parse_sweep(j.value("sweep", empty));

  const json &pj = j.value("processes", empty);
  check_keys(pj, "processes", {"intra", "inter", "emission_branch"});
  const std::size_t nb = c.medium.branch_count();
  auto branch = [&](const json &v, const std::string &path) {
    const auto b = index(v, path);
    if (b >= nb)
      throw ConfigError(path, "refers to missing branch " + std::to_string(b) + " (medium has " +
                                  std::to_string(nb) + " branches)");
    return b;
  };
  if (pj.contains("emission_branch"))
    c.emission_branch = branch(pj.at("emission_branch"), "processes.emission_branch");
  else if (c.emission_branch >= nb)
    c.emission_branch = nb - 1;
  const json intra = pj.value("intra", json::array({1}));
  const json inter = pj.value("inter", json::array({json::array({1, 0})}));
  if (!intra.is_array())
    throw ConfigError("processes.intra", "must be an array of branch indices");
  if (!inter.is_array())
    throw ConfigError("processes.inter", "must be an array of [alpha, alpha'] pairs");
  for (std::size_t i = 0; i < intra.size(); ++i)
    c.processes.push_back(
        Process::intra(branch(intra[i], "processes.intra[" + std::to_string(i) + "]")));
  for (std::size_t i = 0; i < inter.size(); ++i) {
    const std::string ip = "processes.inter[" + std::to_string(i) + "]";
    if (!inter[i].is_array() || inter[i].size() != 2)
      throw ConfigError(ip, "must be a pair [alpha, alpha']");
    const auto a = branch(inter[i][0], ip + "[0]");
    const auto b = branch(inter[i][1], ip + "[1]");
    if (a == b)
      throw ConfigError(ip, "needs two distinct branches");
    c.processes.push_back(Process::inter(a, b));
  }
  if (c.processes.empty())
    throw ConfigError("processes", "must list at least one process");

  const json &oj = j.value("outputs", empty);
  check_keys(oj, "outputs", {"csv", "peaks", "peak_floor_rel"});
  if (oj.contains("csv")) {
    if (!oj.at("csv").is_string())
      throw ConfigError("outputs.csv", "must be a string");
    c.outputs.csv = oj.at("csv").get<std::string>();
  }
  if (oj.contains("peaks")) {
    if (!oj.at("peaks").is_string())
      throw ConfigError("outputs.peaks", "must be a string");
    c.outputs.peaks = oj.at("peaks").get<std::string>();
  }
  if (oj.contains("peak_floor_rel")) {
    c.outputs.peak_floor_rel = number(oj, "outputs", "peak_floor_rel");
    if (c.outputs.peak_floor_rel < 0.0 || c.outputs.peak_floor_rel >= 1.0)
      throw ConfigError("outputs.peak_floor_rel", "must lie in [0, 1)");
  }

  const json &fj = j.value("flags", empty);
  check_keys(fj, "flags", {"include_subleading", "mixing_mode", "threads"});
  if (fj.contains("include_subleading")) {
    if (!fj.at("include_subleading").is_boolean())
      throw ConfigError("flags.include_subleading", "must be true or false");
    c.flags.include_subleading = fj.at("include_subleading").get<bool>();
  }
  if (fj.contains("mixing_mode")) {
    const auto &m = fj.at("mixing_mode");
    if (m == "analytic")
      c.flags.mixing_mode = MixingMode::analytic;
    else if (m == "quadrature")
      c.flags.mixing_mode = MixingMode::quadrature;
    else
      throw ConfigError("flags.mixing_mode", "must be 'analytic' or 'quadrature'");
  }
  if (fj.contains("threads"))
    c.flags.threads = static_cast<unsigned>(index(fj.at("threads"), "flags.threads"));
  return c;
}

/// Reads a config from a file, or from stdin when `path` is "-". An empty
/// document yields the default run.
inline RunConfig load_config(const std::string &path) {
  std::string text;
  if (path == "-") {
    text.assign(std::istreambuf_iterator<char>(std::cin), {});
  } else {
    std::ifstream in(path);
    if (!in)
      throw ConfigError("", "cannot open config file '" + path + "'");
    text.assign(std::istreambuf_iterator<char>(in), {});
  }
  if (text.find_first_not_of(" \t\r\n") == std::string::npos)
    return parse_config(nlohmann::json());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error &e) {
    throw ConfigError("", std::string("malformed config: ") + e.what());
  }
  return parse_config(j);
}

/// Fully resolved config; parse_config(dump_config(c)) == c.
inline nlohmann::json dump_config(const RunConfig &c) {
  using json = nlohmann::json;
  json res = json::array();
  for (const auto &r : c.medium.resonances())
    res.push_back({{"omega", r.omega_res}, {"g", r.g}});
  json sweep = {{"points", c.sweep.points}};
  if (c.sweep.by_lambda) {
    sweep["lambda_min_um"] = c.sweep.lo;
    sweep["lambda_max_um"] = c.sweep.hi;
  } else {
    sweep["k_min"] = c.sweep.lo;
    sweep["k_max"] = c.sweep.hi;
  }
  json intra = json::array(), inter = json::array();
  for (const auto &p : c.processes) {
    if (p.kind == Process::Kind::intra)
      intra.push_back(p.alpha);
    else
      inter.push_back({p.alpha, p.alpha_p});
  }
  return {
      {"schema", kSchemaVersion},
      {"medium", {{"name", c.medium.name()}, {"resonances", res}}},
      {"modulation",
       {{"target_m", c.modulation.target_m},
        {"eps", c.modulation.eps},
        {"nu1", c.modulation.nu1},
        {"nu2", c.modulation.nu2},
        {"tau_um", c.modulation.tau}}},
      {"sweep", sweep},
      {"processes", {{"intra", intra}, {"inter", inter}, {"emission_branch", c.emission_branch}}},
      {"outputs",
       {{"csv", c.outputs.csv},
        {"peaks", c.outputs.peaks},
        {"peak_floor_rel", c.outputs.peak_floor_rel}}},
      {"flags",
       {{"include_subleading", c.flags.include_subleading},
        {"mixing_mode", to_string(c.flags.mixing_mode)},
        {"threads", c.flags.threads}}},
  };
}

} // namespace vacmix
