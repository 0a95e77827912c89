/*!
 *  Copyright (c) 2026 by Contributors
 * \file corpus.cc
 * \brief Corpus loaders, vocabulary construction and split assignment.
 */
#include "fsgcn/corpus.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <unordered_set>

#include <json.hpp>

#include "fsgcn/rng.h"

namespace fsgcn {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

std::string line_error(const std::string& path, size_t line, const std::string& what) {
  return path + ":" + std::to_string(line) + ": " + what;
}

void read_jsonl(const std::string& path, std::ifstream& in, TokenizedCorpus* out,
                std::unordered_set<std::string>* seen) {
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (std::all_of(line.begin(), line.end(), is_space)) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw CorpusError(line_error(path, lineno, std::string("malformed JSON: ") + e.what()));
    }
    if (!obj.is_object()) throw CorpusError(line_error(path, lineno, "expected a JSON object"));
    auto id = obj.find("id");
    auto text = obj.find("text");
    if (id == obj.end() || !id->is_string())
      throw CorpusError(line_error(path, lineno, "missing string field 'id'"));
    if (text == obj.end() || !text->is_string())
      throw CorpusError(line_error(path, lineno, "missing string field 'text'"));

    RawDocument doc;
    doc.id = id->get<std::string>();
    doc.tokens = tokenize(text->get<std::string>());
    if (auto label = obj.find("label"); label != obj.end() && !label->is_null()) {
      if (!label->is_string())
        throw CorpusError(line_error(path, lineno, "'label' must be a string or null"));
      doc.label = label->get<std::string>();
    }
    if (auto split = obj.find("split"); split != obj.end() && !split->is_null()) {
      const std::string s = split->is_string() ? split->get<std::string>() : "";
      if (s == "train-pool") {
        doc.fixed_split = FixedSplit::kTrainPool;
      } else if (s == "test") {
        doc.fixed_split = FixedSplit::kTest;
      } else {
        throw CorpusError(line_error(path, lineno, "'split' must be \"train-pool\" or \"test\""));
      }
    }
    if (doc.tokens.empty()) throw CorpusError(line_error(path, lineno, "empty document"));
    if (doc.fixed_split == FixedSplit::kTest && !doc.label)
      throw CorpusError(line_error(path, lineno, "test document without label"));
    if (!seen->insert(doc.id).second)
      throw CorpusError(line_error(path, lineno, "duplicate document id '" + doc.id + "'"));
    out->add(std::move(doc));
  }
}

void read_tsv(const std::string& path, std::ifstream& in, FixedSplit split,
              TokenizedCorpus* out, std::unordered_set<std::string>* seen) {
  const std::string stem = std::filesystem::path(path).filename().string();
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (std::all_of(line.begin(), line.end(), is_space)) continue;
    const size_t tab = line.find('\t');
    if (tab == std::string::npos || tab == 0)
      throw CorpusError(line_error(path, lineno, "expected label<TAB>text"));
    RawDocument doc;
    doc.id = stem + ":" + std::to_string(lineno);
    doc.label = line.substr(0, tab);
    doc.tokens = tokenize(line.substr(tab + 1));
    doc.fixed_split = split;
    if (doc.tokens.empty()) throw CorpusError(line_error(path, lineno, "empty document"));
    if (!seen->insert(doc.id).second)
      throw CorpusError(line_error(path, lineno, "duplicate document id '" + doc.id + "'"));
    out->add(std::move(doc));
  }
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CorpusError("cannot open corpus file: " + path);
  return in;
}

// Largest-remainder allocation of `total` across groups proportional to `sizes`.
std::vector<int64_t> proportional_counts(const std::vector<int64_t>& sizes, int64_t total) {
  const int64_t n = std::accumulate(sizes.begin(), sizes.end(), int64_t{0});
  std::vector<int64_t> counts(sizes.size(), 0);
  if (n == 0) return counts;
  std::vector<std::pair<double, size_t>> remainders;
  int64_t assigned = 0;
  for (size_t c = 0; c < sizes.size(); ++c) {
    const double exact = static_cast<double>(total) * static_cast<double>(sizes[c]) / n;
    counts[c] = static_cast<int64_t>(std::floor(exact));
    assigned += counts[c];
    remainders.emplace_back(exact - counts[c], c);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (size_t k = 0; assigned < total && k < remainders.size(); ++k) {
    ++counts[remainders[k].second];
    ++assigned;
  }
  return counts;
}

}  // namespace

int TokenizedCorpus::label_index(size_t doc) const {
  const auto& label = docs[doc].label;
  if (!label) return -1;
  auto it = class_index_.find(*label);
  return it == class_index_.end() ? -1 : it->second;
}

void TokenizedCorpus::add(RawDocument doc) {
  if (doc.label && !class_index_.count(*doc.label)) {
    class_index_.emplace(*doc.label, static_cast<int>(classes.size()));
    classes.push_back(*doc.label);
  }
  docs.push_back(std::move(doc));
}

void TokenizedCorpus::reindex_classes() {
  class_index_.clear();
  classes.clear();
  for (const auto& d : docs) {
    if (d.label && !class_index_.count(*d.label)) {
      class_index_.emplace(*d.label, static_cast<int>(classes.size()));
      classes.push_back(*d.label);
    }
  }
}

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : text) {
    if (is_space(c)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c);
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

CorpusFormat parse_corpus_format(const std::string& name) {
  if (name == "jsonl") return CorpusFormat::kJsonl;
  if (name == "tsv") return CorpusFormat::kTsv;
  throw std::invalid_argument("unknown corpus format '" + name + "' (expected jsonl or tsv)");
}

TokenizedCorpus load_corpus(const std::string& path, CorpusFormat format) {
  return load_corpus_pair(path, "", format);
}

TokenizedCorpus load_corpus_pair(const std::string& train_path, const std::string& test_path,
                                 CorpusFormat format) {
  TokenizedCorpus corpus;
  std::unordered_set<std::string> seen;
  {
    auto in = open_or_throw(train_path);
    if (format == CorpusFormat::kJsonl) {
      read_jsonl(train_path, in, &corpus, &seen);
    } else {
      read_tsv(train_path, in, FixedSplit::kTrainPool, &corpus, &seen);
    }
  }
  if (!test_path.empty()) {
    auto in = open_or_throw(test_path);
    if (format == CorpusFormat::kJsonl) {
      TokenizedCorpus test_part;
      read_jsonl(test_path, in, &test_part, &seen);
      for (auto& d : test_part.docs) {
        if (!d.label) throw CorpusError(test_path + ": test document '" + d.id + "' has no label");
        d.fixed_split = FixedSplit::kTest;
        corpus.add(std::move(d));
      }
    } else {
      read_tsv(test_path, in, FixedSplit::kTest, &corpus, &seen);
    }
  }
  if (corpus.docs.empty()) throw CorpusError("corpus is empty: " + train_path);
  return corpus;
}

Vocabulary build_vocabulary(const TokenizedCorpus& corpus, int64_t min_frequency) {
  if (corpus.docs.empty()) throw std::invalid_argument("build_vocabulary: empty corpus");
  if (min_frequency < 1) throw std::invalid_argument("build_vocabulary: min_frequency must be >= 1");

  std::unordered_map<std::string, int64_t> first_seen;
  std::vector<std::string> order;
  std::vector<int64_t> cf, df;
  std::vector<size_t> last_doc;
  for (size_t d = 0; d < corpus.docs.size(); ++d) {
    for (const auto& tok : corpus.docs[d].tokens) {
      auto [it, inserted] = first_seen.emplace(tok, static_cast<int64_t>(order.size()));
      if (inserted) {
        order.push_back(tok);
        cf.push_back(0);
        df.push_back(0);
        last_doc.push_back(SIZE_MAX);
      }
      const auto k = static_cast<size_t>(it->second);
      ++cf[k];
      if (last_doc[k] != d) {
        ++df[k];
        last_doc[k] = d;
      }
    }
  }

  Vocabulary vocab;
  vocab.min_frequency = min_frequency;
  for (size_t k = 0; k < order.size(); ++k) {
    if (cf[k] < min_frequency) continue;
    vocab.index.emplace(order[k], static_cast<int32_t>(vocab.words.size()));
    vocab.words.push_back(order[k]);
    vocab.corpus_frequency.push_back(cf[k]);
    vocab.document_frequency.push_back(df[k]);
  }
  if (vocab.words.empty())
    throw std::invalid_argument("build_vocabulary: no word reaches min_frequency=" +
                                std::to_string(min_frequency));
  return vocab;
}

const char* split_tag_name(SplitTag tag) {
  switch (tag) {
    case SplitTag::kTrain: return "train";
    case SplitTag::kValidation: return "validation";
    case SplitTag::kUnlabeled: return "unlabeled";
    case SplitTag::kTest: return "test";
  }
  return "?";
}

std::vector<int64_t> SplitAssignment::indices_of(SplitTag tag) const {
  std::vector<int64_t> out;
  for (size_t i = 0; i < tags.size(); ++i)
    if (tags[i] == tag) out.push_back(static_cast<int64_t>(i));
  return out;
}

int64_t SplitAssignment::count(SplitTag tag) const {
  return std::count(tags.begin(), tags.end(), tag);
}

SplitAssignment assign_splits(const TokenizedCorpus& corpus, const SplitOptions& options) {
  SplitAssignment out;
  out.train_fraction = options.train_fraction;
  out.seed = options.seed;
  out.tags.assign(corpus.size(), SplitTag::kUnlabeled);

  std::vector<int64_t> candidates;  // labeled train-pool documents
  int64_t pool_size = 0;
  for (size_t i = 0; i < corpus.size(); ++i) {
    const auto& d = corpus.docs[i];
    if (d.fixed_split == FixedSplit::kTest) {
      out.tags[i] = SplitTag::kTest;
      continue;
    }
    ++pool_size;
    if (d.label) candidates.push_back(static_cast<int64_t>(i));
  }

  int64_t n_train = 0;
  int64_t n_val = 0;
  if (options.budget_override) {
    std::tie(n_train, n_val) = *options.budget_override;
    if (n_train < 1 || n_val < 0) throw std::invalid_argument("assign_splits: invalid budget override");
  } else {
    const double f = options.train_fraction;
    if (!(f > 0.0) || f > 1.0)
      throw std::invalid_argument("assign_splits: train_fraction must lie in (0, 1]");
    // The epsilon absorbs representation error such as 0.29 * 100 = 28.999...
    n_train = static_cast<int64_t>(std::floor(f * static_cast<double>(pool_size) + 1e-9));
    if (n_train < 1) throw std::invalid_argument("assign_splits: fraction yields an empty train split");
    n_val = options.mode == SplitMode::kLowResource
                ? n_train
                : static_cast<int64_t>(candidates.size()) - n_train;
  }
  const auto available = static_cast<int64_t>(candidates.size());
  if (n_train + n_val > available) {
    throw std::invalid_argument("assign_splits: requested " + std::to_string(n_train) + " train + " +
                                std::to_string(n_val) + " validation documents but only " +
                                std::to_string(available) + " labeled pool documents exist");
  }

  Rng rng(options.seed);
  auto tag_all = [&](const std::vector<int64_t>& order, int64_t train, int64_t val) {
    for (int64_t k = 0; k < train; ++k) out.tags[order[k]] = SplitTag::kTrain;
    for (int64_t k = train; k < train + val; ++k) out.tags[order[k]] = SplitTag::kValidation;
  };

  if (!options.stratified) {
    shuffle(candidates, rng);
    tag_all(candidates, n_train, n_val);
    return out;
  }

  std::map<int, std::vector<int64_t>> by_class;
  for (int64_t i : candidates) by_class[corpus.label_index(static_cast<size_t>(i))].push_back(i);
  std::vector<int64_t> sizes;
  for (auto& [cls, members] : by_class) sizes.push_back(static_cast<int64_t>(members.size()));
  const auto train_counts = proportional_counts(sizes, n_train);
  const auto val_counts = proportional_counts(sizes, n_val);
  size_t c = 0;
  for (auto& [cls, members] : by_class) {
    shuffle(members, rng);
    const int64_t t = std::min(train_counts[c], static_cast<int64_t>(members.size()));
    const int64_t v = std::min(val_counts[c], static_cast<int64_t>(members.size()) - t);
    tag_all(members, t, v);
    ++c;
  }
  return out;
}

}  // namespace fsgcn
