#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>

#include "tcs/error.hpp"

namespace tcs {

/// Fixed-dimension embedding with the tag of the model that produced it.
struct EmbeddingVector {
  Eigen::VectorXf values;
  std::string model_tag;

  EmbeddingVector() = default;
  EmbeddingVector(Eigen::VectorXf v, std::string tag = {})
      : values(std::move(v)), model_tag(std::move(tag)) {}

  Eigen::Index dim() const { return values.size(); }
  bool all_finite() const { return values.allFinite(); }
};

/// Cosine similarity in double precision, clamped to [-1, 1].
///
/// Works on any pair of Eigen vector expressions with real scalars; float
/// inputs are promoted before accumulation. Identical inputs yield exactly 1.
template <typename DerivedA, typename DerivedB>
double cosine_similarity(const Eigen::MatrixBase<DerivedA>& u, const Eigen::MatrixBase<DerivedB>& v) {
  if (u.size() != v.size())
    throw Error(Errc::DimensionMismatch,
                std::to_string(u.size()) + " vs " + std::to_string(v.size()));
  const auto ud = u.template cast<double>();
  const auto vd = v.template cast<double>();
  const double uu = ud.squaredNorm();
  const double vv = vd.squaredNorm();
  if (!(uu > 0.0) || !(vv > 0.0)) throw Error(Errc::ZeroVector, "cosine of a zero vector");
  const double sim = ud.dot(vd) / std::sqrt(uu * vv);
  return std::clamp(sim, -1.0, 1.0);
}

/// 1 - cosine similarity, in [0, 2].
template <typename DerivedA, typename DerivedB>
double cosine_distance(const Eigen::MatrixBase<DerivedA>& u, const Eigen::MatrixBase<DerivedB>& v) {
  return 1.0 - cosine_similarity(u, v);
}

inline double cosine_similarity(const EmbeddingVector& u, const EmbeddingVector& v) {
  return cosine_similarity(u.values, v.values);
}

inline double cosine_distance(const EmbeddingVector& u, const EmbeddingVector& v) {
  return cosine_distance(u.values, v.values);
}

inline constexpr double kReadingWordsPerMinute = 238.0;

/// Reading time saved by reading the summary instead of the source, in
/// minutes. Throws NegativeSaving when the summary is longer.
double time_saved_minutes(std::size_t source_words, std::size_t summary_words);

struct ErrorCount {
  std::size_t errors = 0;
};

/// Word-level Levenshtein distance (unit costs) between candidate and
/// reference, using the corpus word rule. Throws InvalidArgument on an empty
/// reference.
ErrorCount residual_errors(std::string_view candidate, std::string_view reference);

}  // namespace tcs
