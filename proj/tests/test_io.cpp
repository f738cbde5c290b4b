#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"

using namespace vacmix;
namespace fs = std::filesystem;

namespace {

RunConfig small_run() {
  auto c = fixtures::default_run();
  c.sweep.points = 600;
  c.flags.threads = 2;
  return c;
}

std::string read(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

} // namespace

TEST(Csv, HeaderAndRowLayout) {
  const auto c = small_run();
  const auto s = spectrum(c.medium, c.modulation, {10.0, 11.0}, c.spectrum_options());
  std::ostringstream os;
  write_spectrum_csv(os, s, c.modulation);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "k_um_inv,lambda_vac_um,process,order,prob,total_prob,labels");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    // Seven fields once quoted commas are skipped.
    int fields = 1;
    bool quoted = false;
    for (char ch : line) {
      if (ch == '"')
        quoted = !quoted;
      else if (ch == ',' && !quoted)
        ++fields;
    }
    EXPECT_EQ(fields, 7) << line;
  }
  EXPECT_EQ(rows, 2 * 2 * 3);
}

TEST(Csv, SeventeenDigitsRoundTrip) {
  const auto c = small_run();
  const auto s = spectrum(c.medium, c.modulation, {10.123456789012345}, c.spectrum_options());
  std::ostringstream os;
  write_spectrum_csv(os, s, c.modulation);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  EXPECT_EQ(std::stod(line.substr(0, line.find(','))), s.rows[0].k);
}

TEST(Run, WritesFilesDeterministically) {
  const auto dir = fs::temp_directory_path() / "vacmix_io_test";
  fs::remove_all(dir);
  auto c = small_run();
  c.flags.threads = 1;
  run_spectrum(c, dir / "a");
  c.flags.threads = 6;
  run_spectrum(c, dir / "b");
  const auto a = read(dir / "a" / c.outputs.csv);
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, read(dir / "b" / c.outputs.csv));
  EXPECT_EQ(read(dir / "a" / c.outputs.peaks), read(dir / "b" / c.outputs.peaks));
  fs::remove_all(dir);
}

TEST(Run, DefaultReportListsSevenLabeledPeaks) {
  const auto r = compute_spectrum(fixtures::default_run());
  const auto rep = peak_report(r.peaks);
  ASSERT_EQ(rep.size(), 7u);
  for (const auto &p : rep) {
    for (const char *key : {"position_k", "position_lambda", "condition", "prob_max", "fwhm"})
      EXPECT_TRUE(p.contains(key)) << key;
    EXPECT_NE(p["condition"], "unlabeled");
  }
}

TEST(Run, ZeroModulationHasNoPeaks) {
  auto c = small_run();
  c.modulation.eps = 0.0;
  const auto r = compute_spectrum(c);
  EXPECT_TRUE(r.peaks.empty());
  for (const auto &row : r.spectrum.rows)
    EXPECT_EQ(row.total_prob, 0.0);
}

TEST(Run, MixingModesAgreeOnPositions) {
  auto c = fixtures::default_run();
  const auto a = compute_spectrum(c);
  c.flags.mixing_mode = MixingMode::quadrature;
  const auto q = compute_spectrum(c);
  ASSERT_EQ(a.peaks.size(), q.peaks.size());
  for (std::size_t j = 0; j < a.peaks.size(); ++j) {
    EXPECT_EQ(a.peaks[j].labels, q.peaks[j].labels);
    EXPECT_NEAR(a.peaks[j].sum_frequency, q.peaks[j].sum_frequency, 0.1 / c.modulation.tau);
    const auto &lab = a.peaks[j].labels[0];
    if (lab == "nu1" || lab == "nu2") // first-order peaks do not involve the mixing integral
      EXPECT_NEAR(q.peaks[j].prob_max, a.peaks[j].prob_max, 0.1 * a.peaks[j].prob_max);
  }
}

TEST(Rate, ScalesWithSpotAndRepetition) {
  const auto c = fixtures::default_run();
  const auto r1 = estimate_rate(c, 250.0, 1e6);
  const auto r2 = estimate_rate(c, 500.0, 1e6);
  const auto r0 = estimate_rate(c, 250.0, 0.0);
  EXPECT_GT(r1.per_second, 0.0);
  EXPECT_NEAR(r2.per_second, 2.0 * r1.per_second, 1e-12 * r1.per_second);
  EXPECT_EQ(r0.per_second, 0.0);
  EXPECT_NEAR(r1.per_second, r1.per_pulse * 1e6, 1e-9 * r1.per_second);
  EXPECT_NEAR(r1.lambda_mix, 0.634, 0.01);
}
