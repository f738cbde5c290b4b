#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vacmix/amplitudes.hpp"
#include "vacmix/config.hpp"
#include "vacmix/errors.hpp"

namespace vacmix {

namespace io_detail {

inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline double round6(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return std::stod(buf);
}

inline std::string join_labels(const std::vector<std::string> &labels) {
  std::string s;
  for (std::size_t j = 0; j < labels.size(); ++j)
    s += (j ? "|" : "") + labels[j];
  return s;
}

// RFC 4180 quoting for fields that carry commas or quotes.
inline std::string csv_field(const std::string &v) {
  if (v.find_first_of(",\"\n") == std::string::npos)
    return v;
  std::string q = "\"";
  for (char ch : v)
    q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return q + "\"";
}

inline void write_file(const std::filesystem::path &path, const std::string &text) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

} // namespace io_detail

/// Spectrum as CSV. Each k gives three rows per process: order 1, order 2
/// and their coherent sum ("all"). `labels` names the resonance conditions
/// the process's pair frequency sits on at that k.
inline void write_spectrum_csv(std::ostream &os, const Spectrum &s, const ModulationSpec &spec) {
  using io_detail::fmt17;
  os << "k_um_inv,lambda_vac_um,process,order,prob,total_prob,labels\n";
  for (const auto &row : s.rows) {
    for (std::size_t p = 0; p < s.processes.size(); ++p) {
      const auto &pv = row.per_process[p];
      const std::string head = fmt17(row.k) + "," + fmt17(row.lambda_vac) + "," +
                               io_detail::csv_field(s.processes[p].name()) + ",";
      const std::string tail = "," + fmt17(row.total_prob) + "," +
                               io_detail::csv_field(io_detail::join_labels(
                                   label_sum_frequency(spec, pv.sum_frequency))) +
                               "\n";
      os << head << "1," << fmt17(std::norm(pv.first)) << tail;
      os << head << "2," << fmt17(std::norm(pv.second)) << tail;
      os << head << "all," << fmt17(pv.probability()) << tail;
    }
  }
}

inline nlohmann::json peak_report(const std::vector<Peak> &peaks) {
  using io_detail::round6;
  nlohmann::json arr = nlohmann::json::array();
  for (const auto &p : peaks) {
    arr.push_back({{"process", p.process},
                   {"position_k", round6(p.k)},
                   {"position_lambda", round6(p.lambda)},
                   {"condition", condition_text(p)},
                   {"prob_max", round6(p.prob_max)},
                   {"fwhm", std::isfinite(p.fwhm) ? nlohmann::json(round6(p.fwhm))
                                                  : nlohmann::json(nullptr)}});
  }
  return arr;
}

/// Everything a spectrum run produces.
struct SpectrumRun {
  GridPlan grid;
  Spectrum spectrum;
  std::vector<Peak> peaks;
};

/// Computes the spectrum for a config; no files are touched.
inline SpectrumRun compute_spectrum(const RunConfig &c) {
  c.modulation.validate(c.medium);
  const auto opt = c.spectrum_options();
  const auto [k_lo, k_hi] = c.k_range();
  SpectrumRun r;
  r.grid = resolve_k_grid(c.medium, c.modulation, opt, k_lo, k_hi, c.sweep.points);
  r.spectrum = spectrum(c.medium, c.modulation, r.grid.k_grid, opt);
  r.peaks = find_peaks(r.spectrum, c.modulation, c.outputs.peak_floor_rel);
  return r;
}

/// Runs the spectrum and writes the CSV and the peak report under `out_dir`.
inline SpectrumRun run_spectrum(const RunConfig &c, const std::filesystem::path &out_dir) {
  auto r = compute_spectrum(c);
  std::ostringstream csv;
  write_spectrum_csv(csv, r.spectrum, c.modulation);
  io_detail::write_file(out_dir / c.outputs.csv, csv.str());
  io_detail::write_file(out_dir / c.outputs.peaks, peak_report(r.peaks).dump(2) + "\n");
  return r;
}

struct RateReport {
  double k = 0.0;
  double lambda_mix = 0.0; ///< um
  double prob = 0.0;       ///< total |G|^2 at lambda_mix
  double per_pulse = 0.0;  ///< pairs per pulse per unit angle
  double per_second = 0.0;
};

/// Pair rate at the intrabranch nu1+nu2 mixing peak of the run.
inline RateReport estimate_rate(const RunConfig &c, double A_spot, double repetition_rate) {
  if (!(A_spot >= 0.0) || !(repetition_rate >= 0.0))
    throw std::invalid_argument("A_spot and repetition rate must be >= 0");
  RunConfig probe = c;
  probe.outputs.peak_floor_rel = 0.0;
  const auto run = compute_spectrum(probe);
  const Peak *best = nullptr;
  for (const auto &p : run.peaks) {
    if (probe.processes[p.process_index].kind != Process::Kind::intra)
      continue;
    if (std::find(p.labels.begin(), p.labels.end(), "nu1+nu2") == p.labels.end())
      continue;
    if (!best || p.prob_max > best->prob_max)
      best = &p;
  }
  RateReport r;
  if (!best)
    return r;
  const auto s = spectrum(probe.medium, probe.modulation, {best->k}, probe.spectrum_options());
  r.k = best->k;
  r.lambda_mix = s.rows[0].lambda_vac;
  r.prob = s.rows[0].total_prob;
  r.per_pulse = emission_rate_per_angle(r.prob, A_spot, r.lambda_mix, probe.modulation.tau);
  r.per_second = r.per_pulse * repetition_rate;
  return r;
}

} // namespace vacmix
