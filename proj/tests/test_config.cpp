#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "fixtures.hpp"

using namespace vacmix;
using json = nlohmann::json;

namespace {

std::string error_of(const json &j) {
  try {
    parse_config(j);
  } catch (const ConfigError &e) {
    return e.what();
  }
  return "";
}

} // namespace

TEST(Config, EmptyDocumentGivesDefaultRun) {
  const auto c = parse_config(json());
  const auto m = fused_silica();
  EXPECT_EQ(c.medium, m);
  EXPECT_EQ(c.modulation.target_m, 1u);
  EXPECT_DOUBLE_EQ(c.modulation.nu1, m[1].omega_res / 5.0);
  EXPECT_DOUBLE_EQ(c.modulation.nu2, m[1].omega_res / 6.0);
  EXPECT_DOUBLE_EQ(c.modulation.tau, 42.0 * 0.299792458);
  EXPECT_DOUBLE_EQ(c.modulation.eps, eps_for_delta_n(m, 1, 0.65, 1e-3));
  EXPECT_TRUE(c.sweep.by_lambda);
  EXPECT_DOUBLE_EQ(c.sweep.lo, 2.0 * M_PI / 20.0);
  EXPECT_DOUBLE_EQ(c.sweep.hi, 2.0 * M_PI / 3.0);
  EXPECT_EQ(c.sweep.points, 4000u);
  EXPECT_EQ(c.processes, (std::vector<Process>{Process::intra(1), Process::inter(1, 0)}));
  EXPECT_EQ(c.emission_branch, 1u);
  EXPECT_EQ(c.flags.mixing_mode, MixingMode::analytic);
  EXPECT_FALSE(c.flags.include_subleading);
  EXPECT_EQ(c, parse_config(json::object()));
}

TEST(Config, DefaultEpsIsNearOnePerMille) {
  // |eps| for delta n = 1e-3 at 0.65 um sits in the weak-modulation regime.
  const double e = parse_config(json()).modulation.eps;
  EXPECT_LT(e, 0.0);
  EXPECT_GT(std::abs(e), 1e-3);
  EXPECT_LT(std::abs(e), 0.1);
}

TEST(Config, NegativeTauRejected) {
  EXPECT_EQ(error_of({{"modulation", {{"tau_fs", -1.0}}}}), "modulation.tau_fs must be > 0");
}

TEST(Config, UnknownKeySuggestsNearest) {
  const auto e = error_of({{"modulaton", json::object()}});
  EXPECT_NE(e.find("modulaton"), std::string::npos);
  EXPECT_NE(e.find("did you mean 'modulation'"), std::string::npos);
  const auto f = error_of({{"flags", {{"thread", 2}}}});
  EXPECT_NE(f.find("flags.thread"), std::string::npos);
  EXPECT_NE(f.find("'threads'"), std::string::npos);
}

TEST(Config, ErrorCarriesPath) {
  try {
    parse_config({{"processes", {{"intra", {7}}}}});
    FAIL();
  } catch (const ConfigError &e) {
    EXPECT_EQ(e.path(), "processes.intra[0]");
  }
}

TEST(Config, RejectsInconsistentBlocks) {
  EXPECT_NE(error_of({{"sweep", {{"k_min", 1.0}, {"k_max", 2.0}, {"lambda_min_um", 0.5}}}}), "");
  EXPECT_NE(error_of({{"sweep", {{"k_min", 3.0}, {"k_max", 2.0}}}}), "");
  EXPECT_NE(error_of({{"processes", {{"inter", {{1, 1}}}}}}), "");
  EXPECT_NE(error_of({{"processes", {{"intra", json::array()}, {"inter", json::array()}}}}), "");
  EXPECT_NE(error_of({{"modulation", {{"eps", 0.01}, {"delta_n_at_lambda", json::object()}}}}), "");
  EXPECT_NE(error_of({{"modulation", {{"target_m", 3}}}}), "");
  EXPECT_NE(error_of({{"schema", 2}}), "");
  EXPECT_NE(error_of({{"flags", {{"mixing_mode", "fast"}}}}), "");
  EXPECT_NE(error_of({{"medium", {{"resonances", {{{"omega", 1.0}}}}}}}), "");
  EXPECT_NE(error_of({{"medium", {{"name", "glass"}}}}), "");
}

TEST(Config, MediumFromSellmeierPairs) {
  const auto c = parse_config(
      {{"medium", {{"name", "fs"}, {"resonances", {{{"lambda_um", 9.896161}, {"B", 0.8974794}},
                                                   {{"lambda_um", 0.0684043}, {"B", 0.6961663}},
                                                   {{"lambda_um", 0.1162414}, {"B", 0.4079426}}}}}}});
  ASSERT_EQ(c.medium.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_DOUBLE_EQ(c.medium[i].omega_res, fused_silica()[i].omega_res);
    EXPECT_DOUBLE_EQ(c.medium[i].g, fused_silica()[i].g);
  }
}

TEST(Config, RoundTripIsExact) {
  const std::vector<json> docs{
      json(),
      {{"modulation", {{"eps", 0.003}, {"nu1", 9.0}, {"tau_fs", 30.0}}},
       {"sweep", {{"k_min", 2.0}, {"k_max", 20.0}, {"points", 123}}},
       {"processes", {{"intra", {1, 2}}, {"inter", {{1, 0}, {2, 1}}}, {"emission_branch", 2}}},
       {"outputs", {{"csv", "a.csv"}, {"peak_floor_rel", 0.0}}},
       {"flags", {{"mixing_mode", "quadrature"}, {"include_subleading", true}, {"threads", 3}}}},
      {{"medium", {{"resonances", {{{"omega", 1.0}, {"g", 0.5}}, {{"omega", 7.0}, {"g", 2.0}}}}}},
       {"modulation", {{"target_m", 0}, {"delta_n_at_lambda", {{"delta_n", 2e-4}, {"lambda_um", 3.0}}}}}},
  };
  for (const auto &d : docs) {
    const auto c = parse_config(d);
    const auto text = dump_config(c).dump();
    EXPECT_EQ(parse_config(json::parse(text)), c) << text;
  }
}

TEST(Config, LoadsFilesAndEmptyFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "vacmix_config_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "empty.json") << "\n  \n";
    std::ofstream(dir / "bad.json") << "{ nope";
    std::ofstream(dir / "one.json") << R"({"schema": 1, "modulation": {"tau_fs": 20}})";
  }
  EXPECT_EQ(load_config((dir / "empty.json").string()), parse_config(json()));
  EXPECT_THROW(load_config((dir / "bad.json").string()), ConfigError);
  EXPECT_THROW(load_config((dir / "missing.json").string()), ConfigError);
  EXPECT_DOUBLE_EQ(load_config((dir / "one.json").string()).modulation.tau, 20.0 * 0.299792458);
  std::filesystem::remove_all(dir);
}

TEST(Config, ShippedConfigsLoad) {
  const std::filesystem::path dir = std::filesystem::path(VACMIX_SOURCE_DIR) / "configs";
  int n = 0;
  for (const auto &e : std::filesystem::directory_iterator(dir)) {
    if (e.path().extension() != ".json")
      continue;
    EXPECT_NO_THROW(load_config(e.path().string())) << e.path();
    ++n;
  }
  EXPECT_GT(n, 0);
}

TEST(Config, WavelengthSweepMapsToWavenumbers) {
  const auto c = parse_config(json());
  const auto [lo, hi] = c.k_range();
  const auto bl = solve_branches(c.medium, lo), bh = solve_branches(c.medium, hi);
  EXPECT_NEAR(units::lambda_from_omega(bl[1].omega), c.sweep.hi, 1e-10);
  EXPECT_NEAR(units::lambda_from_omega(bh[1].omega), c.sweep.lo, 1e-10);
}
