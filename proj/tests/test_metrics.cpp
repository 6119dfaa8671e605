#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "trajmap/errors.hpp"
#include "trajmap/metrics.hpp"
#include "trajmap/rng.hpp"

using namespace trajmap;
using metrics::ConfusionMatrix;
using metrics::ReferenceEntry;

namespace {

ConfusionMatrix cm_of(std::uint64_t ii, std::uint64_t is, std::uint64_t si,
                      std::uint64_t ss) {
  ConfusionMatrix cm;
  cm.counts = {{{ii, is}, {si, ss}}};
  return cm;
}

// The published benchmark table for the speed-colored variant.
const ConfusionMatrix kColored = cm_of(56, 11, 1, 169);

std::vector<ReferenceEntry> colored_reference() {
  return {
      {"intersection.precision", 0.98}, {"intersection.recall", 0.84},
      {"intersection.f1", 0.90},        {"intersection.support", 67},
      {"straight.precision", 0.94},     {"straight.recall", 0.99},
      {"straight.f1", 0.97},            {"straight.support", 170},
      {"accuracy", 0.95},               {"macro_avg.precision", 0.96},
      {"macro_avg.recall", 0.91},       {"macro_avg.f1", 0.93},
      {"weighted_avg.precision", 0.95}, {"weighted_avg.recall", 0.95},
      {"weighted_avg.f1", 0.93},
  };
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("confusion tallies pairs as (actual, predicted)") {
  std::vector<std::pair<Label, Label>> pairs;
  const auto add = [&](Label a, Label p, int n) {
    for (int i = 0; i < n; ++i) pairs.emplace_back(a, p);
  };
  add(Label::intersection, Label::intersection, 3);
  add(Label::intersection, Label::straight, 2);
  add(Label::straight, Label::intersection, 1);
  add(Label::straight, Label::straight, 4);

  const auto cm = metrics::confusion(pairs);
  CHECK(cm.counts[0][0] == 3);
  CHECK(cm.counts[0][1] == 2);
  CHECK(cm.counts[1][0] == 1);
  CHECK(cm.counts[1][1] == 4);
  CHECK(cm.total() == 10);
}

TEST_CASE("published colored-run table reproduces from its confusion matrix") {
  const auto r = metrics::report(kColored);

  // exact fraction arithmetic
  CHECK(r.per_class[0].precision == doctest::Approx(56.0 / 57).epsilon(1e-12));
  CHECK(r.per_class[0].recall == doctest::Approx(56.0 / 67).epsilon(1e-12));
  CHECK(r.per_class[0].support == 67);
  CHECK(r.per_class[1].precision == doctest::Approx(169.0 / 180).epsilon(1e-12));
  CHECK(r.per_class[1].recall == doctest::Approx(169.0 / 170).epsilon(1e-12));
  CHECK(r.per_class[1].support == 170);
  CHECK(r.accuracy == doctest::Approx(225.0 / 237).epsilon(1e-12));
  CHECK(r.total == 237);
  CHECK(r.flags.empty());

  // two-decimal views match the published figures
  CHECK(metrics::round2(r.per_class[0].precision) == 0.98);
  CHECK(metrics::round2(r.per_class[0].recall) == 0.84);
  CHECK(metrics::round2(r.per_class[0].f1) == 0.90);
  CHECK(metrics::round2(r.per_class[1].precision) == 0.94);
  CHECK(metrics::round2(r.per_class[1].recall) == 0.99);
  CHECK(metrics::round2(r.per_class[1].f1) == 0.97);
  CHECK(metrics::round2(r.accuracy) == 0.95);
  CHECK(metrics::round2(r.macro_avg.precision) == 0.96);
  CHECK(metrics::round2(r.macro_avg.recall) == 0.91);
  CHECK(metrics::round2(r.macro_avg.f1) == 0.93);
  CHECK(metrics::round2(r.weighted_avg.precision) == 0.95);
  CHECK(metrics::round2(r.weighted_avg.recall) == 0.95);

  // the one cell the support-weighted formula cannot reproduce: it gives
  // (67*(112/124) + 170*(338/350)) / 237 = 0.9480488, which displays as
  // 0.95 against the published 0.93
  CHECK(r.weighted_avg.f1 == doctest::Approx(0.9480488).epsilon(1e-5));
  CHECK(metrics::round2(r.weighted_avg.f1) == 0.95);

  const auto flags = metrics::compare_to_reference(r, colored_reference());
  REQUIRE(flags.size() == 1);
  CHECK(flags[0].find("weighted_avg.f1") != std::string::npos);
  CHECK(flags[0].find("0.95") != std::string::npos);
  CHECK(flags[0].find("0.93") != std::string::npos);

  auto agreeing = colored_reference();
  agreeing.pop_back();  // drop the weighted f1 row
  CHECK(metrics::compare_to_reference(r, agreeing).empty());
}

TEST_CASE("compare_to_reference rejects unknown fields") {
  const auto r = metrics::report(kColored);
  CHECK_THROWS_AS(metrics::compare_to_reference(r, {{"bogus", 1.0}}),
                  ConfigError);
  CHECK_THROWS_AS(metrics::compare_to_reference(r, {{"accuracy.f1", 1.0}}),
                  ConfigError);
  CHECK_THROWS_AS(
      metrics::compare_to_reference(r, {{"intersection.mcc", 1.0}}),
      ConfigError);
}

TEST_CASE("perfect predictions score one everywhere") {
  const auto r = metrics::report(cm_of(1, 0, 0, 1));
  for (int c = 0; c < 2; ++c) {
    CHECK(r.per_class[c].precision == 1.0);
    CHECK(r.per_class[c].recall == 1.0);
    CHECK(r.per_class[c].f1 == 1.0);
  }
  CHECK(r.accuracy == 1.0);
  CHECK(r.macro_avg.f1 == 1.0);
  CHECK(r.weighted_avg.f1 == 1.0);
  CHECK(r.flags.empty());
}

TEST_CASE("all-one-way predictions degrade to zero with flags") {
  // every sample predicted straight
  const auto r = metrics::report(cm_of(0, 5, 0, 5));
  CHECK(r.per_class[0].precision == 0.0);  // 0/0, flagged
  CHECK(r.per_class[0].recall == 0.0);     // 0/5
  CHECK(r.per_class[0].f1 == 0.0);         // flagged
  CHECK(r.per_class[1].precision == 0.5);
  CHECK(r.per_class[1].recall == 1.0);
  CHECK(r.per_class[1].f1 == doctest::Approx(2.0 / 3).epsilon(1e-12));
  CHECK(r.accuracy == 0.5);
  CHECK(r.flags.size() == 2);

  // a class with no actual or predicted members flags all three ratios
  const auto r2 = metrics::report(cm_of(0, 0, 0, 5));
  CHECK(r2.flags.size() == 3);
  CHECK(r2.accuracy == 1.0);
}

TEST_CASE("empty confusion matrix is a data error") {
  CHECK_THROWS_AS(metrics::report(cm_of(0, 0, 0, 0)), DataError);
}

TEST_CASE("round2 rounds half away from zero") {
  CHECK(metrics::round2(0.125) == 0.13);
  CHECK(metrics::round2(-0.125) == -0.13);
  CHECK(metrics::round2(0.9449) == 0.94);
  CHECK(metrics::round2(0.0) == 0.0);
  CHECK(metrics::round2(1.0) == 1.0);
}

TEST_CASE("property: weighted recall equals accuracy") {
  rng::Engine eng(314);
  for (int trial = 0; trial < 200; ++trial) {
    const auto cm = cm_of(eng.bounded(50), eng.bounded(50), eng.bounded(50),
                          eng.bounded(50));
    if (cm.total() == 0) continue;
    const auto r = metrics::report(cm);
    CHECK(r.weighted_avg.recall == doctest::Approx(r.accuracy).epsilon(1e-12));
    // harmonic mean lies between precision and recall when defined
    for (int c = 0; c < 2; ++c) {
      const auto& m = r.per_class[c];
      if (m.precision > 0.0 && m.recall > 0.0) {
        CHECK(m.f1 >= std::min(m.precision, m.recall) - 1e-12);
        CHECK(m.f1 <= std::max(m.precision, m.recall) + 1e-12);
      }
    }
  }
}

TEST_CASE("property: relabeling both classes swaps the per-class rows") {
  rng::Engine eng(2718);
  for (int trial = 0; trial < 100; ++trial) {
    const std::uint64_t a = 1 + eng.bounded(40), b = eng.bounded(40);
    const std::uint64_t c = eng.bounded(40), d = 1 + eng.bounded(40);
    const auto r1 = metrics::report(cm_of(a, b, c, d));
    const auto r2 = metrics::report(cm_of(d, c, b, a));
    CHECK(r1.per_class[0].precision == r2.per_class[1].precision);
    CHECK(r1.per_class[0].recall == r2.per_class[1].recall);
    CHECK(r1.per_class[0].f1 == r2.per_class[1].f1);
    CHECK(r1.per_class[0].support == r2.per_class[1].support);
    CHECK(r1.accuracy == r2.accuracy);
    CHECK(r1.macro_avg.f1 == r2.macro_avg.f1);
  }
}

TEST_CASE("format_report carries the table and the notes") {
  const auto text = metrics::format_report(metrics::report(kColored));
  for (const char* needle :
       {"precision", "recall", "f1-score", "support", "intersection",
        "straight", "accuracy", "macro avg", "weighted avg", "0.98", "0.84",
        "0.97", "237"})
    CHECK(text.find(needle) != std::string::npos);
  CHECK(text.find("note:") == std::string::npos);

  const auto degenerate = metrics::format_report(metrics::report(cm_of(0, 5, 0, 5)));
  CHECK(degenerate.find("note:") != std::string::npos);
}

}  // TEST_SUITE
