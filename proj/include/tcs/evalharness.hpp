#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tcs/corpus.hpp"
#include "tcs/pipelines.hpp"
#include "tcs/report.hpp"
#include "tcs/typos.hpp"

namespace tcs {

/// A synthetic customer question and the inquiry that answers it.
struct Query {
  std::string id;
  std::string question;
  std::string relevant;
};

/// Line-delimited {"question": ..., "relevant": ..., "id": optional}. A
/// missing id defaults to the relevant inquiry id; repeats get "#2", "#3".
std::vector<Query> parse_queries(std::string_view jsonl);
std::vector<Query> load_queries(const std::filesystem::path& path);

struct RelevanceResult {
  std::size_t k = 0;
  double proportion = 0.0;
};

/// Distances from each answer (column) to the nearest chunk of each
/// historic inquiry (row). Failed columns hold NaN.
struct DistanceMatrix {
  std::vector<std::string> query_ids;
  std::vector<std::string> inquiry_ids;
  Eigen::MatrixXd cells;
  std::map<std::string, std::string> relevant;
};

struct QaColumnFlags {
  std::string query_id;
  double relevant_distance = 0.0;
  double nearest_irrelevant = 0.0;
  double margin = 0.0;
  bool relevant_is_min = false;
};

struct QaResult {
  DistanceMatrix matrix;
  std::vector<QaColumnFlags> flags;
  EvalReport distances;  // matrix as a table, inquiries x queries
  EvalReport summary;    // one row per query with the flags
};

inline const std::vector<std::size_t> kDefaultSummaryTargets{100, 200, 500};
inline const std::vector<std::size_t> kDefaultRelevanceKs{1, 2, 3};

/// Injects typos into every gold reply, corrects it and counts the words,
/// characters and residual errors before and after. Throws MissingGold.
EvalReport eval_correction(const Corpus& corpus, const TypoSpec& spec, Provider& provider);

/// Summarizes every inquiry thread at every target length. Provider
/// failures become ERR cells.
EvalReport eval_summarization(const Corpus& corpus, std::span<const std::size_t> targets,
                              Provider& provider);

std::vector<RelevanceResult> eval_retrieval(const VectorStore& store, std::span<const Query> queries,
                                            std::span<const std::size_t> ks, Provider& embedder);
EvalReport retrieval_report(std::span<const RelevanceResult> results);

QaResult eval_qa(const VectorStore& store, std::span<const Query> queries, Provider& provider,
                 std::size_t k);

/// Flags for one column of a distance matrix.
QaColumnFlags column_flags(const DistanceMatrix& m, std::size_t column);

/// Mean of the finite real cells in a column.
double column_mean(const EvalReport& report, std::string_view column);

}  // namespace tcs
