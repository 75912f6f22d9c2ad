#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace pnel::kg {

struct Entity {
  std::string id;
  std::string label;
  std::string description;
  std::vector<float> embedding;  // graph embedding; empty when the entity has none
};

// Entities from a jsonl file, one object per line:
//   {"id": ..., "label": ..., "description": ..., "embedding": [...]}
// id and label are required; description defaults to empty and embedding to
// absent. All present embeddings must share one dimension.
class EntityStore {
 public:
  static EntityStore load_jsonl(const std::string& path);

  std::size_t size() const { return entities_.size(); }
  const Entity& at(std::size_t i) const { return entities_[i]; }
  const Entity* find(std::string_view id) const;
  std::size_t index_of(std::string_view id) const;  // throws InputError when absent
  std::size_t embedding_dim() const { return embedding_dim_; }

 private:
  std::vector<Entity> entities_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::size_t embedding_dim_ = 0;
};

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
};

struct SearchHit {
  std::uint32_t doc = 0;  // position in the entity store the index was built from
  double score = 0.0;
};

// Okapi BM25 over entity labels. Labels are analyzed by lowercasing and
// splitting on whitespace and punctuation; idf is ln((N-df+0.5)/(df+0.5)+1),
// which never goes negative. Results keep only documents that match at least
// one query term, sorted by score descending with ties broken by entity id
// ascending. Scores accumulate per document in query-token order, so repeated
// query tokens contribute once per occurrence and results are reproducible
// bit for bit.
class LabelIndex {
 public:
  static LabelIndex build(const EntityStore& store, Bm25Params params = {});

  std::vector<SearchHit> search(std::string_view query, std::size_t top_k) const;

  void save(const std::string& path) const;
  static LabelIndex load(const std::string& path);

  static std::vector<std::string> analyze(std::string_view text);

  std::size_t doc_count() const { return doc_ids_.size(); }
  const std::string& doc_id(std::uint32_t doc) const { return doc_ids_[doc]; }
  double avgdl() const { return avgdl_; }
  const Bm25Params& params() const { return params_; }

 private:
  struct Posting {
    std::uint32_t doc = 0;
    std::uint32_t tf = 0;
  };

  std::vector<std::string> doc_ids_;
  std::vector<std::uint32_t> doc_lens_;
  std::unordered_map<std::string, std::vector<Posting>> postings_;
  double avgdl_ = 0.0;
  Bm25Params params_;
};

}  // namespace pnel::kg
