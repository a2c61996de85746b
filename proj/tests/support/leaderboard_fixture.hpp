#pragma once

#include "safeseg/confusion.hpp"
#include "safeseg/hierarchy.hpp"

namespace testutil {

// Two engineered submissions over the bundled 30-class hierarchy whose
// rankings disagree: A wins on plain mIoU while B wins on safe mIoU.
// The per-class counts are constructed so both means land exactly on the
// targets below (fractions with denominator 22 * 10000).
struct LeaderboardFixture {
  safeseg::ConfusionMatrix a;
  safeseg::ConfusionMatrix b;
  double a_miou = 0.6854;
  double a_smiou = 0.6352;
  double b_miou = 0.6832;
  double b_smiou = 0.6473;
};

// Requires the bundled IDD-AW hierarchy (30 leaves, "default" important set).
LeaderboardFixture build_leaderboard_fixture(const safeseg::LabelHierarchy& h);

}  // namespace testutil
