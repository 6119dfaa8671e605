#include "trajmap/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "trajmap/errors.hpp"

namespace trajmap::metrics {

ConfusionMatrix confusion(
    const std::vector<std::pair<Label, Label>>& pairs) {
  ConfusionMatrix cm;
  for (const auto& [actual, predicted] : pairs)
    ++cm.counts[static_cast<int>(actual)][static_cast<int>(predicted)];
  return cm;
}

namespace {

double ratio(std::uint64_t num, std::uint64_t den, const char* what, int cls,
             std::vector<std::string>& flags) {
  if (den == 0) {
    flags.push_back(std::string(what) + " undefined (0/0) for class " +
                    to_string(static_cast<Label>(cls)) + "; reported as 0");
    return 0.0;
  }
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

EvalReport report(const ConfusionMatrix& cm) {
  EvalReport r;
  r.total = cm.total();
  if (r.total == 0) throw DataError("empty confusion matrix");

  for (int c = 0; c < 2; ++c) {
    const int o = 1 - c;
    const std::uint64_t tp = cm.counts[c][c];
    const std::uint64_t fp = cm.counts[o][c];
    const std::uint64_t fn = cm.counts[c][o];
    auto& m = r.per_class[c];
    m.support = tp + fn;
    m.precision = ratio(tp, tp + fp, "precision", c, r.flags);
    m.recall = ratio(tp, tp + fn, "recall", c, r.flags);
    const double pr = m.precision + m.recall;
    if (pr > 0.0)
      m.f1 = 2.0 * m.precision * m.recall / pr;
    else {
      m.f1 = 0.0;
      r.flags.push_back(std::string("f1 undefined (0/0) for class ") +
                        to_string(static_cast<Label>(c)) + "; reported as 0");
    }
  }

  r.accuracy = static_cast<double>(cm.counts[0][0] + cm.counts[1][1]) /
               static_cast<double>(r.total);

  const auto& a = r.per_class[0];
  const auto& b = r.per_class[1];
  r.macro_avg.precision = (a.precision + b.precision) / 2.0;
  r.macro_avg.recall = (a.recall + b.recall) / 2.0;
  r.macro_avg.f1 = (a.f1 + b.f1) / 2.0;
  r.macro_avg.support = r.total;

  const double wa = static_cast<double>(a.support) / r.total;
  const double wb = static_cast<double>(b.support) / r.total;
  r.weighted_avg.precision = wa * a.precision + wb * b.precision;
  r.weighted_avg.recall = wa * a.recall + wb * b.recall;
  r.weighted_avg.f1 = wa * a.f1 + wb * b.f1;
  r.weighted_avg.support = r.total;
  return r;
}

double round2(double v) { return std::round(v * 100.0) / 100.0; }

namespace {

double field_value(const EvalReport& r, const std::string& field) {
  const auto dot = field.find('.');
  if (dot == std::string::npos) {
    if (field == "accuracy") return r.accuracy;
    throw ConfigError("unknown report field: " + field);
  }
  const std::string head = field.substr(0, dot);
  const std::string tail = field.substr(dot + 1);
  const ClassMetrics* m = nullptr;
  if (head == "intersection") m = &r.per_class[0];
  else if (head == "straight") m = &r.per_class[1];
  else if (head == "macro_avg") m = &r.macro_avg;
  else if (head == "weighted_avg") m = &r.weighted_avg;
  else throw ConfigError("unknown report field: " + field);
  if (tail == "precision") return m->precision;
  if (tail == "recall") return m->recall;
  if (tail == "f1") return m->f1;
  if (tail == "support") return static_cast<double>(m->support);
  throw ConfigError("unknown report field: " + field);
}

std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::vector<std::string> compare_to_reference(
    const EvalReport& r, const std::vector<ReferenceEntry>& reference) {
  std::vector<std::string> flags;
  for (const auto& e : reference) {
    const double got = field_value(r, e.field);
    if (fmt2(round2(got)) != fmt2(round2(e.value)))
      flags.push_back(e.field + " computes " + fmt2(round2(got)) +
                      " but the reference reports " + fmt2(round2(e.value)));
  }
  return flags;
}

std::string format_report(const EvalReport& r) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%-14s %9s %9s %9s %9s\n", "",
                "precision", "recall", "f1-score", "support");
  os << line;
  const auto row = [&](const char* name, const ClassMetrics& m) {
    std::snprintf(line, sizeof line, "%-14s %9.2f %9.2f %9.2f %9llu\n", name,
                  m.precision, m.recall, m.f1,
                  static_cast<unsigned long long>(m.support));
    os << line;
  };
  row("intersection", r.per_class[0]);
  row("straight", r.per_class[1]);
  os << '\n';
  std::snprintf(line, sizeof line, "%-14s %9s %9s %9.2f %9llu\n", "accuracy",
                "", "", r.accuracy, static_cast<unsigned long long>(r.total));
  os << line;
  row("macro avg", r.macro_avg);
  row("weighted avg", r.weighted_avg);
  for (const auto& f : r.flags) os << "note: " << f << '\n';
  return os.str();
}

}  // namespace trajmap::metrics
