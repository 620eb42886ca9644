#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "fundus/io/binary.hpp"

namespace fundus::classifier {

/// The six validation classes, in membership-vector order.
enum class OdClass { Whole = 0, PartLeft, PartRight, PartTop, PartBottom, NonOd };
inline constexpr int kClassCount = 6;
inline constexpr int kOdClassCount = 5;
inline constexpr const char* kClassNames[kClassCount] = {"od_whole", "od_part1", "od_part2",
                                                         "od_part3", "od_part4", "non_od"};

struct LabeledTopicPoint {
  std::vector<double> topic_vector;
  std::vector<double> memberships;
};

inline std::vector<double> crisp_membership(int cls, int n_classes = kClassCount) {
  std::vector<double> u(static_cast<std::size_t>(n_classes), 0.0);
  u.at(static_cast<std::size_t>(cls)) = 1.0;
  return u;
}

/// Fuzzy k-NN (Keller et al.): neighbour memberships weighted by
/// 1 / ||x - x_j||^(2 / (m - 1)). Neighbours at distance zero take over the
/// result, which is the limit of that weighting.
inline std::vector<double> fuzzy_knn(std::span<const double> query, std::span<const LabeledTopicPoint> train,
                                     int k, double m = 2.0) {
  if (train.empty()) throw invalid_input("fuzzy_knn: empty training set");
  if (k < 1 || static_cast<std::size_t>(k) > train.size())
    throw invalid_input("fuzzy_knn: K must lie in [1, " + std::to_string(train.size()) + "]");
  if (!(m > 1.0)) throw invalid_input("fuzzy_knn: fuzzifier m must exceed 1");

  std::vector<std::pair<double, std::size_t>> dist;
  dist.reserve(train.size());
  for (std::size_t j = 0; j < train.size(); ++j) {
    const auto& t = train[j].topic_vector;
    if (t.size() != query.size()) throw invalid_input("fuzzy_knn: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) s += (query[i] - t[i]) * (query[i] - t[i]);
    dist.emplace_back(std::sqrt(s), j);
  }
  std::partial_sort(dist.begin(), dist.begin() + k, dist.end());

  const std::size_t n_classes = train[dist[0].second].memberships.size();
  std::vector<double> u(n_classes, 0.0);
  const bool exact = dist[0].first == 0.0;
  const double power = 2.0 / (m - 1.0);
  double total = 0.0;
  for (int j = 0; j < k; ++j) {
    const auto& [d, idx] = dist[j];
    if (exact && d != 0.0) break;
    const double weight = exact ? 1.0 : 1.0 / std::pow(d, power);
    const auto& mem = train[idx].memberships;
    if (mem.size() != n_classes) throw invalid_input("fuzzy_knn: inconsistent class count");
    for (std::size_t i = 0; i < n_classes; ++i) u[i] += weight * mem[i];
    total += weight;
  }
  for (double& v : u) v /= total;
  return u;
}

/// Argmax; ties go to the lowest class index.
inline int classify(std::span<const double> memberships) {
  if (memberships.empty()) throw invalid_input("classify: empty membership vector");
  return static_cast<int>(std::max_element(memberships.begin(), memberships.end()) - memberships.begin());
}

inline int classify(std::span<const double> query, std::span<const LabeledTopicPoint> train, int k, double m = 2.0) {
  return classify(fuzzy_knn(query, train, k, m));
}

inline constexpr char kNeighboursMagic[] = "FLNB";
inline constexpr std::uint32_t kNeighboursVersion = 1;

/// "FLNB", u32 version, u32 count, u32 topics, u32 classes, then per point
/// f64 topic vector and f64 memberships; little-endian.
inline void write_neighbours(std::ostream& os, std::span<const LabeledTopicPoint> points) {
  io::BinaryWriter w(os);
  w.magic(kNeighboursMagic);
  w.u32(kNeighboursVersion);
  w.u32(static_cast<std::uint32_t>(points.size()));
  const std::size_t z = points.empty() ? 0 : points.front().topic_vector.size();
  const std::size_t c = points.empty() ? 0 : points.front().memberships.size();
  w.u32(static_cast<std::uint32_t>(z));
  w.u32(static_cast<std::uint32_t>(c));
  for (const auto& p : points) {
    if (p.topic_vector.size() != z || p.memberships.size() != c)
      throw invalid_input("write_neighbours: ragged neighbour set");
    w.f64s(p.topic_vector);
    w.f64s(p.memberships);
  }
}

inline std::vector<LabeledTopicPoint> read_neighbours(std::istream& is, const std::string& source = "neighbours") {
  io::BinaryReader r(is, source);
  r.expect_magic(kNeighboursMagic);
  const auto version = r.u32();
  if (version != kNeighboursVersion) throw format_error(source + ": unsupported version " + std::to_string(version));
  const auto n = r.bounded_u32("count", 1u << 24);
  const auto z = r.bounded_u32("topics", 1u << 12);
  const auto c = r.bounded_u32("classes", 1u << 8);
  std::vector<LabeledTopicPoint> out(n);
  for (auto& p : out) {
    p.topic_vector = r.f64s(z);
    p.memberships = r.f64s(c);
  }
  return out;
}

inline void save_neighbours(const std::string& path, std::span<const LabeledTopicPoint> points) {
  auto os = io::open_for_write(path);
  write_neighbours(os, points);
  if (!os) throw io_error("failed writing " + path);
}

inline std::vector<LabeledTopicPoint> load_neighbours(const std::string& path) {
  auto is = io::open_for_read(path);
  return read_neighbours(is, path);
}

}  // namespace fundus::classifier
