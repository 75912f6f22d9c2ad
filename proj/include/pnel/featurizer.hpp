#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pnel/embeddings.hpp"
#include "pnel/fuzzy.hpp"
#include "pnel/kg.hpp"
#include "pnel/textproc.hpp"

namespace pnel::featurizer {

// Candidate vector layout, in order: search rank, ngram length, pivot token
// position, tag one-hot, entity embedding, sentence mean vector, pivot token
// vector, description mean vector, and the three fuzzy match ratios. With the
// default widths the vector is 1142 wide.
struct FeatureLayout {
  std::size_t pos_dim = 36;
  std::size_t ent_dim = 200;
  std::size_t wv_dim = 300;

  std::size_t rank_off() const { return 0; }
  std::size_t len_off() const { return 1; }
  std::size_t pivot_off() const { return 2; }
  std::size_t pos_off() const { return 3; }
  std::size_t ent_off() const { return pos_off() + pos_dim; }
  std::size_t sent_off() const { return ent_off() + ent_dim; }
  std::size_t word_off() const { return sent_off() + wv_dim; }
  std::size_t desc_off() const { return word_off() + wv_dim; }
  std::size_t match_off() const { return desc_off() + wv_dim; }
  std::size_t dim() const { return match_off() + 3; }
};

// Feature groups that can be zeroed for ablation. The pivot position column
// is never maskable: it anchors the candidate to the question.
enum class Feature {
  TextRank,
  NgramLength,
  Pos,
  TransE,
  Sentence,
  Word,
  Description,
  TextMatch,
};

inline constexpr std::array<std::pair<std::string_view, Feature>, 8> kFeatureNames{{
    {"text_rank", Feature::TextRank},
    {"ngram_length", Feature::NgramLength},
    {"pos_tags", Feature::Pos},
    {"transe", Feature::TransE},
    {"sentence_embed", Feature::Sentence},
    {"word_embed", Feature::Word},
    {"description_embed", Feature::Description},
    {"text_match", Feature::TextMatch},
}};

std::optional<Feature> feature_from_name(std::string_view name);
std::string_view feature_name(Feature f);

// Column span (offset, length) a feature occupies in the layout.
std::pair<std::size_t, std::size_t> feature_span(const FeatureLayout& layout, Feature f);

struct Candidate {
  std::string entity_id;
  double bm25_score = 0.0;
  std::size_t rank = 0;       // 1-based position in the tile's search results
  std::size_t pivot = 0;      // token the generating tile was anchored on
  int tile_kind = 0;
  std::size_t ngram_len = 0;
};

struct EpisodeInputs {
  std::vector<textproc::Token> tokens;
  std::vector<Candidate> candidates;
  std::vector<float> features;  // candidates.size() * layout.dim(), row-major
  bool truncated = false;       // candidate list hit the cap and lost its tail
};

// Builds the candidate list for a question by running every ngram tile of
// every token through the label index, keeping the top L hits per tile. The
// candidate order is (token position, tile kind, search rank); duplicate
// entities reached through different tiles stay as separate candidates.
// Sequences longer than max_candidates are tail-truncated and flagged.
class Featurizer {
 public:
  Featurizer(const kg::EntityStore& store, const kg::LabelIndex& index,
             const embeddings::VectorTable& words, const textproc::Tagger& tagger,
             FeatureLayout layout = {}, std::size_t top_l = 50, std::size_t max_candidates = 3000);

  // Feature groups to zero out; replaces any previous selection.
  void set_masks(const std::vector<Feature>& features);

  EpisodeInputs build(std::string_view question,
                      const std::vector<std::string>* gold_tags = nullptr) const;

  // Same, but over caller-supplied token surfaces instead of the tokenizer.
  EpisodeInputs build_tokens(const std::vector<std::string>& surfaces,
                             const std::vector<std::string>* gold_tags = nullptr) const;

  const FeatureLayout& layout() const { return layout_; }
  std::size_t top_l() const { return top_l_; }
  std::size_t max_candidates() const { return max_candidates_; }

 private:
  EpisodeInputs build_impl(std::vector<textproc::Token> tokens,
                           const std::vector<std::string>* gold_tags) const;
  void fill_row(float* row, const Candidate& cand, const kg::Entity& ent,
                const std::vector<textproc::Token>& tokens, const float* sentence_mean) const;

  const kg::EntityStore* store_;
  const kg::LabelIndex* index_;
  const embeddings::VectorTable* words_;
  const textproc::Tagger* tagger_;
  FeatureLayout layout_;
  std::size_t top_l_;
  std::size_t max_candidates_;
  std::vector<std::pair<std::size_t, std::size_t>> masks_;
};

}  // namespace pnel::featurizer
