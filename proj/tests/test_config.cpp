#include <gtest/gtest.h>

#include <filesystem>

#include "stablefield/classifier.hpp"
#include "stablefield/cli/config.hpp"

using namespace stablefield;
using cli::ConfigError;

namespace {

const std::string kMinimal = R"(alpha: 1.5
seed: 3
family:
  type: sub_gaussian
  d: 2
)";

std::string expect_config_error(const std::string& text) {
  try {
    cli::parse_config_string(text, "test.cfg");
  } catch (const ConfigError& e) {
    return e.what();
  }
  ADD_FAILURE() << "no ConfigError for:\n" << text;
  return {};
}

}  // namespace

TEST(Config, ShippedConfigsParse) {
  std::size_t n = 0;
  for (const auto& entry : std::filesystem::directory_iterator(STABLEFIELD_CONFIG_DIR)) {
    if (entry.path().extension() != ".cfg") continue;
    ++n;
    const auto name = entry.path().stem().string();
    if (name == "markov_transient") {
      EXPECT_THROW(cli::load_config(entry.path().string()), ModelError) << name;
      continue;
    }
    if (name == "full_support_violation") {
      EXPECT_THROW(cli::load_config(entry.path().string()), ModelError) << name;
      continue;
    }
    const auto cfg = cli::load_config(entry.path().string());
    ASSERT_TRUE(cfg.triplet.has_value()) << name;
    EXPECT_GT(cfg.alpha, 0.0);
    EXPECT_LT(cfg.alpha, 2.0);
  }
  EXPECT_GE(n, 10u);
}

TEST(Config, Defaults) {
  const auto cfg = cli::parse_config_string(kMinimal);
  EXPECT_EQ(cfg.alpha, 1.5);
  EXPECT_EQ(cfg.seed, 3u);
  EXPECT_EQ(cfg.family_type, "sub_gaussian");
  EXPECT_EQ(cfg.triplet->dim(), 2u);
  EXPECT_EQ(cfg.simulation.truncation, 10000u);
  EXPECT_EQ(cfg.simulation.realizations, 1u);
  EXPECT_EQ(cfg.simulation.window.size(), 201u * 201u);
  EXPECT_EQ(cfg.diagnostics.realizations, 50u);
  EXPECT_EQ(cfg.diagnostics.h, "cos");
  EXPECT_EQ(cfg.diagnostics.thresholds.ergodic_below, 0.35);
  EXPECT_EQ(cfg.diagnostics.thresholds.non_ergodic_above, 0.7);
  EXPECT_FALSE(cfg.expect_minimal.has_value());
}

TEST(Config, ErrorsCarrySourceLineAndField) {
  const auto msg = expect_config_error("alpha: 2.5\nseed: 1\nfamily: {type: sub_gaussian}\n");
  EXPECT_NE(msg.find("test.cfg:1"), std::string::npos) << msg;
  EXPECT_NE(msg.find("alpha"), std::string::npos) << msg;

  const auto bad_type = expect_config_error("alpha: 1\nseed: 1\nfamily:\n  type: fractal\n");
  EXPECT_NE(bad_type.find("test.cfg:4"), std::string::npos) << bad_type;
  EXPECT_NE(bad_type.find("family.type"), std::string::npos) << bad_type;

  const auto missing = expect_config_error("alpha: 1\nfamily: {type: sub_gaussian}\n");
  EXPECT_NE(missing.find("seed"), std::string::npos) << missing;

  const auto wrong = expect_config_error("alpha: one\nseed: 1\nfamily: {type: sub_gaussian}\n");
  EXPECT_NE(wrong.find("alpha"), std::string::npos) << wrong;
}

TEST(Config, Rejections) {
  expect_config_error("alpha: 0\nseed: 1\nfamily: {type: sub_gaussian}\n");
  expect_config_error("- 1\n- 2\n");
  expect_config_error("alpha: [1\n");
  // Zero-volume window: upper below lower.
  const auto win = expect_config_error(kMinimal + "simulation:\n  window: {lower: [0, 0], upper: [3, -1]}\n");
  EXPECT_NE(win.find("simulation.window"), std::string::npos) << win;
  const auto dim = expect_config_error(kMinimal + "simulation:\n  window: {lower: [0], upper: [3]}\n");
  EXPECT_NE(dim.find("coordinates"), std::string::npos) << dim;
  expect_config_error(kMinimal + "diagnostics:\n  realizations: 10\n");
  expect_config_error(kMinimal + "diagnostics:\n  n_grid: [100, 50]\n");
  expect_config_error(kMinimal + "diagnostics:\n  h: tan\n");
  expect_config_error("alpha: 1\nseed: 1\nfamily: {type: sub_gaussian, base_law: laplace}\n");
  EXPECT_THROW(cli::load_config("/nonexistent/config.cfg"), ConfigError);
}

TEST(Config, MarkovBlocksAndAnchors) {
  const auto cfg = cli::parse_config_string(R"(alpha: 1.0
seed: 1
family:
  type: markov_shift
  blocks:
    - type: finite
      states: [a, b]
      P: [[0.5, 0.5], [0.5, 0.5]]
    - {type: random_walk, p: 0.5}
  anchors: {1: b, 2: 4}
)");
  const auto& fam = std::get<MarkovShift>(cfg.triplet->family());
  EXPECT_EQ(fam.chain.classes().size(), 2u);
  EXPECT_EQ(classify(*cfg.triplet).kind, VerdictKind::MixedErgodicity);
}

TEST(Config, TransientChainIsModelError) {
  EXPECT_THROW(cli::parse_config_string(R"(alpha: 1.0
seed: 1
family:
  type: markov_shift
  blocks:
    - type: finite
      states: [u, v]
      P: [[0.5, 0.5], [0, 1]]
)"),
               ModelError);
}

TEST(Config, HFunctions) {
  EXPECT_EQ(cli::h_function("cos")(0.0), 1.0);
  EXPECT_EQ(cli::h_function("sign")(-2.0), -1.0);
  EXPECT_EQ(cli::h_function("positive")(-2.0), 0.0);
  EXPECT_THROW(cli::h_function("tan"), ConfigError);
}
