#pragma once

// Reference implementations used only by tests. Each one is written the
// slow, obvious way and shares no code path with the library routine it
// checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace oracle {

inline double cosine(const std::vector<double>& u, const std::vector<double>& v) {
  double dot = 0, uu = 0, vv = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  return dot / (std::sqrt(uu) * std::sqrt(vv));
}

// Distance used for ordering: 1 - dot / sqrt(uu * vv), summed left to right.
inline double distance(const std::vector<float>& q, const std::vector<float>& x) {
  double dot = 0, qq = 0, xx = 0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    dot += double(q[i]) * double(x[i]);
    qq += double(q[i]) * double(q[i]);
    xx += double(x[i]) * double(x[i]);
  }
  double s = dot / std::sqrt(qq * xx);
  s = std::min(1.0, std::max(-1.0, s));
  return 1.0 - s;
}

struct ScanHit {
  std::uint64_t id;
  double distance;
};

// Every distance, then a stable sort by distance: equal distances keep
// ascending id order because ids are listed in ascending order.
inline std::vector<ScanHit> linear_scan(const std::vector<float>& q,
                                        const std::vector<std::vector<float>>& rows,
                                        const std::vector<std::uint64_t>& ids, std::size_t k) {
  std::vector<ScanHit> all;
  for (std::size_t i = 0; i < rows.size(); ++i) all.push_back({ids[i], distance(q, rows[i])});
  std::stable_sort(all.begin(), all.end(),
                   [](const ScanHit& a, const ScanHit& b) { return a.distance < b.distance; });
  all.resize(std::min(k, all.size()));
  return all;
}

inline std::map<std::string, double> group_min(const std::vector<std::string>& groups,
                                               const std::vector<double>& distances) {
  std::map<std::string, double> out;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    auto it = out.find(groups[i]);
    if (it == out.end() || distances[i] < it->second) out[groups[i]] = distances[i];
  }
  return out;
}

// Exhaustive enumeration of word alignments: at each step either align the
// next words (cost 0 if equal else 1), skip a candidate word, or skip a
// reference word. Branches whose cost already reaches the best complete
// alignment are cut; the minimum is still over every alignment.
inline void enumerate(const std::vector<std::string>& a, const std::vector<std::string>& b, std::size_t i,
                      std::size_t j, std::size_t cost, std::size_t& best) {
  const std::size_t ra = a.size() - i, rb = b.size() - j;
  const std::size_t floor = ra > rb ? ra - rb : rb - ra;
  if (cost + floor >= best) return;
  if (ra == 0 && rb == 0) {
    best = cost;
    return;
  }
  if (ra > 0 && rb > 0) enumerate(a, b, i + 1, j + 1, cost + (a[i] == b[j] ? 0 : 1), best);
  if (ra > 0) enumerate(a, b, i + 1, j, cost + 1, best);
  if (rb > 0) enumerate(a, b, i, j + 1, cost + 1, best);
}

inline std::size_t alignment_errors(const std::vector<std::string>& cand,
                                    const std::vector<std::string>& ref) {
  std::size_t best = std::numeric_limits<std::size_t>::max();
  enumerate(cand, ref, 0, 0, 0, best);
  return best;
}

// Independent FNV-1a 64 with the published offset basis and prime.
inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace oracle
