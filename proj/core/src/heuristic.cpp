#include "trajmap/heuristic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "trajmap/errors.hpp"
#include "trajmap/geo.hpp"

namespace trajmap::heuristic {

namespace {

// Direction chords span several snap cells so jitter on individual vertices
// cannot fake a branch; see classify() below.
constexpr double kBaselineSnaps = 5.0;
constexpr double kChordFrac = 0.75;

struct Pt {
  double x, y;
};

double cross(Pt a, Pt b) { return a.x * b.y - a.y * b.x; }

// Proper or touching intersection of segments [a0,a1] and [b0,b1].
bool segment_cross(Pt a0, Pt a1, Pt b0, Pt b1, Pt& hit, double& ta,
                   double& tb) {
  const Pt r{a1.x - a0.x, a1.y - a0.y};
  const Pt s{b1.x - b0.x, b1.y - b0.y};
  const double denom = cross(r, s);
  const double scale = std::max({std::abs(r.x), std::abs(r.y), std::abs(s.x),
                                 std::abs(s.y), 1e-12});
  if (std::abs(denom) < 1e-12 * scale * scale) return false;  // parallel
  const Pt qp{b0.x - a0.x, b0.y - a0.y};
  ta = cross(qp, s) / denom;
  tb = cross(qp, r) / denom;
  constexpr double eps = 1e-9;
  if (ta < -eps || ta > 1 + eps || tb < -eps || tb > 1 + eps) return false;
  hit = Pt{a0.x + ta * r.x, a0.y + ta * r.y};
  return true;
}

}  // namespace

Prediction classify(const tiler::TileClip& clip, double snap_m,
                    double min_branch_deg) {
  if (clip.segments.empty()) throw DataError("unclassifiable: empty clip");
  if (!(snap_m > 0.0)) throw ConfigError("snap must be > 0");
  if (!(min_branch_deg > 0.0 && min_branch_deg < 180.0))
    throw ConfigError("min_branch must be in (0, 180) degrees");

  std::vector<std::vector<Pt>> chains;
  chains.reserve(clip.segments.size());
  for (const auto& ch : clip.segments) {
    std::vector<Pt> c;
    c.reserve(ch.size());
    for (const auto& v : ch) c.push_back(Pt{v.x, v.y});
    chains.push_back(std::move(c));
  }

  // Crossing points between segments of different chains, or between
  // non-adjacent segments of the same chain, split the segments they hit.
  std::vector<std::map<std::size_t, std::vector<std::pair<double, Pt>>>>
      splits(chains.size());
  for (std::size_t ci = 0; ci < chains.size(); ++ci) {
    for (std::size_t cj = ci; cj < chains.size(); ++cj) {
      const auto& A = chains[ci];
      const auto& B = chains[cj];
      for (std::size_t i = 0; i + 1 < A.size(); ++i) {
        const std::size_t j0 = (ci == cj) ? i + 2 : 0;
        for (std::size_t j = j0; j + 1 < B.size(); ++j) {
          Pt hit;
          double ta, tb;
          if (!segment_cross(A[i], A[i + 1], B[j], B[j + 1], hit, ta, tb))
            continue;
          splits[ci][i].emplace_back(ta, hit);
          splits[cj][j].emplace_back(tb, hit);
        }
      }
    }
  }

  // Snap to the grid and collect incident directions per node. A direction
  // is measured along the chain over a baseline of several snap cells:
  // adjacent-vertex chords are dominated by GPS jitter, and chains that end
  // right next to a node (journey endpoints) would otherwise contribute
  // near-zero-length chords pointing anywhere. Chords shorter than
  // kChordFrac * baseline are dropped for the same reason.
  const double baseline = kBaselineSnaps * snap_m;
  const double min_chord = kChordFrac * baseline;
  const auto key_of = [&](Pt p) {
    return std::pair<std::int64_t, std::int64_t>(
        std::llround(p.x / snap_m), std::llround(p.y / snap_m));
  };
  std::map<std::pair<std::int64_t, std::int64_t>, std::vector<double>>
      node_angles;
  for (std::size_t ci = 0; ci < chains.size(); ++ci) {
    std::vector<Pt> pts;
    const auto& ch = chains[ci];
    for (std::size_t i = 0; i < ch.size(); ++i) {
      pts.push_back(ch[i]);
      auto it = splits[ci].find(i);
      if (it == splits[ci].end()) continue;
      auto ins = it->second;
      std::sort(ins.begin(), ins.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      for (const auto& [t, p] : ins) pts.push_back(p);
    }
    // Maximal runs of consecutive points that share a snap cell.
    struct Run {
      std::pair<std::int64_t, std::int64_t> key;
      std::size_t first, last;
    };
    std::vector<Run> runs;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      auto k = key_of(pts[i]);
      if (runs.empty() || runs.back().key != k)
        runs.push_back(Run{k, i, i});
      else
        runs.back().last = i;
    }
    const auto chord_dir = [&](std::size_t anchor, int step, double& out) {
      const Pt a = pts[anchor];
      Pt e = a;
      double dist = 0.0;
      for (std::int64_t i = static_cast<std::int64_t>(anchor) + step;
           i >= 0 && i < static_cast<std::int64_t>(pts.size()); i += step) {
        const std::size_t u = static_cast<std::size_t>(i);
        dist = std::hypot(pts[u].x - a.x, pts[u].y - a.y);
        e = pts[u];
        if (dist >= baseline) break;
      }
      if (dist < min_chord) return false;
      double ang = std::atan2(e.y - a.y, e.x - a.x) / geo::kDegToRad;
      if (ang < 0) ang += 360.0;
      out = ang;
      return true;
    };
    for (std::size_t r = 0; r < runs.size(); ++r) {
      double ang;
      if (r > 0 && chord_dir(runs[r].first, -1, ang))
        node_angles[runs[r].key].push_back(ang);
      if (r + 1 < runs.size() && chord_dir(runs[r].last, +1, ang))
        node_angles[runs[r].key].push_back(ang);
    }
  }

  bool is_intersection = false;
  for (auto& [node, angles] : node_angles) {
    if (angles.size() < 3) continue;
    std::sort(angles.begin(), angles.end());
    int branches = 0;
    for (std::size_t i = 0; i < angles.size(); ++i) {
      const double gap = i + 1 < angles.size()
                             ? angles[i + 1] - angles[i]
                             : angles.front() + 360.0 - angles.back();
      if (gap >= min_branch_deg) ++branches;
    }
    if (std::max(branches, 1) >= 3) {
      is_intersection = true;
      break;
    }
  }
  return Prediction{is_intersection ? Label::intersection : Label::straight,
                    is_intersection ? 1.0 : 0.0};
}

}  // namespace trajmap::heuristic
