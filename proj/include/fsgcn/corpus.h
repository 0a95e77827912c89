/*!
 *  Copyright (c) 2026 by Contributors
 * \file fsgcn/corpus.h
 * \brief Document ingestion, frequency-thresholded vocabulary and
 *        train/validation/unlabeled/test split assignment.
 */
#ifndef FSGCN_CORPUS_H_
#define FSGCN_CORPUS_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace fsgcn {

/// Raised for malformed input files; the message names the offending line.
class CorpusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class FixedSplit : uint8_t { kTrainPool, kTest };

struct RawDocument {
  std::string id;
  std::vector<std::string> tokens;
  std::optional<std::string> label;
  FixedSplit fixed_split = FixedSplit::kTrainPool;
};

enum class CorpusFormat { kJsonl, kTsv };

/// Documents in file order plus the dense label set (class index = position
/// in `classes`, ordered by first appearance).
struct TokenizedCorpus {
  std::vector<RawDocument> docs;
  std::vector<std::string> classes;

  size_t size() const { return docs.size(); }
  /// Class index of a labeled document, or -1.
  int label_index(size_t doc) const;
  void add(RawDocument doc);
  void reindex_classes();

 private:
  std::unordered_map<std::string, int> class_index_;
};

/// ASCII-only lowercase + whitespace split.
std::vector<std::string> tokenize(const std::string& text);

TokenizedCorpus load_corpus(const std::string& path, CorpusFormat format);

/// TSV train file plus an optional companion test file of identical format.
TokenizedCorpus load_corpus_pair(const std::string& train_path,
                                 const std::string& test_path, CorpusFormat format);

CorpusFormat parse_corpus_format(const std::string& name);

struct Vocabulary {
  std::vector<std::string> words;
  std::unordered_map<std::string, int32_t> index;
  std::vector<int64_t> corpus_frequency;
  std::vector<int64_t> document_frequency;
  int64_t min_frequency = 5;

  size_t size() const { return words.size(); }
  /// -1 when the word was pruned or never seen.
  int32_t find(const std::string& word) const {
    auto it = index.find(word);
    return it == index.end() ? -1 : it->second;
  }
};

/// Counts over every document (train pool and test alike). Retained words are
/// indexed in order of first occurrence.
Vocabulary build_vocabulary(const TokenizedCorpus& corpus, int64_t min_frequency = 5);

enum class SplitTag : uint8_t { kTrain, kValidation, kUnlabeled, kTest };
enum class SplitMode { kLowResource, kHighResource };

const char* split_tag_name(SplitTag tag);

struct SplitOptions {
  double train_fraction = 0.01;
  uint64_t seed = 0;
  SplitMode mode = SplitMode::kLowResource;
  /// Absolute (n_train, n_validation); replaces the fraction when set.
  std::optional<std::pair<int64_t, int64_t>> budget_override;
  bool stratified = false;
};

struct SplitAssignment {
  std::vector<SplitTag> tags;
  double train_fraction = 0.0;
  uint64_t seed = 0;

  std::vector<int64_t> indices_of(SplitTag tag) const;
  int64_t count(SplitTag tag) const;
};

/// Low-resource mode draws floor(f*N) train documents and as many validation
/// documents from the labeled train pool; the rest of the pool is unlabeled.
/// High-resource mode hands everything not drawn for training to validation.
SplitAssignment assign_splits(const TokenizedCorpus& corpus, const SplitOptions& options);

}  // namespace fsgcn

#endif  // FSGCN_CORPUS_H_
