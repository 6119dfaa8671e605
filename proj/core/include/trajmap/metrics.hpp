#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "trajmap/types.hpp"

namespace trajmap::metrics {

// counts[actual][predicted], class order [intersection, straight].
struct ConfusionMatrix {
  std::array<std::array<std::uint64_t, 2>, 2> counts{};

  std::uint64_t total() const {
    return counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1];
  }
};

ConfusionMatrix confusion(
    const std::vector<std::pair<Label, Label>>& pairs);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t support = 0;
};

// All values carried at full precision; rounding is a display concern.
// A 0/0 ratio reports 0 and adds a degeneracy flag.
struct EvalReport {
  ClassMetrics per_class[2];  // [intersection, straight]
  double accuracy = 0.0;
  ClassMetrics macro_avg;     // unweighted mean; support = total
  ClassMetrics weighted_avg;  // support-weighted mean; support = total
  std::uint64_t total = 0;
  std::vector<std::string> flags;
};

EvalReport report(const ConfusionMatrix& cm);

// Published figures to check a computed report against (field names like
// "intersection.precision", "accuracy", "weighted_avg.f1"). Any field whose
// 2-decimal rendering differs from the reference value yields a flag; an
// unknown field name is a config error.
struct ReferenceEntry {
  std::string field;
  double value = 0.0;
};

std::vector<std::string> compare_to_reference(
    const EvalReport& r, const std::vector<ReferenceEntry>& reference);

// Two-decimal display rounding (half away from zero).
double round2(double v);

// Plain-text table in the usual classification-report shape.
std::string format_report(const EvalReport& r);

}  // namespace trajmap::metrics
