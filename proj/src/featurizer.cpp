#include "pnel/featurizer.hpp"

#include <cstring>

#include "pnel/common.hpp"

namespace pnel::featurizer {

std::optional<Feature> feature_from_name(std::string_view name) {
  for (const auto& [n, f] : kFeatureNames)
    if (n == name) return f;
  return std::nullopt;
}

std::string_view feature_name(Feature f) {
  for (const auto& [n, fv] : kFeatureNames)
    if (fv == f) return n;
  return "?";
}

std::pair<std::size_t, std::size_t> feature_span(const FeatureLayout& layout, Feature f) {
  switch (f) {
    case Feature::TextRank: return {layout.rank_off(), 1};
    case Feature::NgramLength: return {layout.len_off(), 1};
    case Feature::Pos: return {layout.pos_off(), layout.pos_dim};
    case Feature::TransE: return {layout.ent_off(), layout.ent_dim};
    case Feature::Sentence: return {layout.sent_off(), layout.wv_dim};
    case Feature::Word: return {layout.word_off(), layout.wv_dim};
    case Feature::Description: return {layout.desc_off(), layout.wv_dim};
    case Feature::TextMatch: return {layout.match_off(), 3};
  }
  throw InputError("unknown feature group");
}

Featurizer::Featurizer(const kg::EntityStore& store, const kg::LabelIndex& index,
                       const embeddings::VectorTable& words, const textproc::Tagger& tagger,
                       FeatureLayout layout, std::size_t top_l, std::size_t max_candidates)
    : store_(&store),
      index_(&index),
      words_(&words),
      tagger_(&tagger),
      layout_(layout),
      top_l_(top_l),
      max_candidates_(max_candidates) {
  if (words.dim() != layout_.wv_dim)
    throw ConfigError("word vectors are " + std::to_string(words.dim()) + "-dimensional but the layout expects " +
                      std::to_string(layout_.wv_dim));
  if (store.embedding_dim() != 0 && store.embedding_dim() != layout_.ent_dim)
    throw ConfigError("entity embeddings are " + std::to_string(store.embedding_dim()) +
                      "-dimensional but the layout expects " + std::to_string(layout_.ent_dim));
  if (tagger.tags().size() != layout_.pos_dim)
    throw ConfigError("tag set has " + std::to_string(tagger.tags().size()) + " tags but the layout expects " +
                      std::to_string(layout_.pos_dim));
}

void Featurizer::set_masks(const std::vector<Feature>& features) {
  masks_.clear();
  for (Feature f : features) masks_.push_back(feature_span(layout_, f));
}

EpisodeInputs Featurizer::build(std::string_view question,
                                const std::vector<std::string>* gold_tags) const {
  return build_impl(textproc::tokenize(question), gold_tags);
}

EpisodeInputs Featurizer::build_tokens(const std::vector<std::string>& surfaces,
                                       const std::vector<std::string>* gold_tags) const {
  std::vector<textproc::Token> tokens;
  tokens.reserve(surfaces.size());
  for (std::size_t i = 0; i < surfaces.size(); ++i)
    tokens.push_back({surfaces[i], i, textproc::kUnknownTag});
  return build_impl(std::move(tokens), gold_tags);
}

EpisodeInputs Featurizer::build_impl(std::vector<textproc::Token> tokens,
                                     const std::vector<std::string>* gold_tags) const {
  EpisodeInputs out;
  out.tokens = std::move(tokens);
  tagger_->tag(out.tokens);
  if (gold_tags != nullptr) tagger_->apply_gold(out.tokens, *gold_tags);

  std::vector<std::string> surfaces;
  surfaces.reserve(out.tokens.size());
  for (const auto& t : out.tokens) surfaces.push_back(t.surface);
  std::vector<float> sentence_mean(layout_.wv_dim, 0.0f);
  words_->mean_into(surfaces, sentence_mean.data());

  for (std::size_t k = 0; k < out.tokens.size() && !out.truncated; ++k) {
    for (const auto& tile : textproc::ngram_tiles(out.tokens, k)) {
      auto hits = index_->search(tile.text, top_l_);
      for (std::size_t r = 0; r < hits.size(); ++r) {
        if (out.candidates.size() == max_candidates_) {
          out.truncated = true;
          break;
        }
        Candidate cand;
        cand.entity_id = index_->doc_id(hits[r].doc);
        cand.bm25_score = hits[r].score;
        cand.rank = r + 1;
        cand.pivot = k;
        cand.tile_kind = tile.kind;
        cand.ngram_len = tile.ngram_len;

        const kg::Entity* ent = store_->find(cand.entity_id);
        if (ent == nullptr)
          throw InputError("index names entity '" + cand.entity_id + "' that the store does not have");

        out.features.resize(out.features.size() + layout_.dim(), 0.0f);
        float* row = out.features.data() + out.candidates.size() * layout_.dim();
        fill_row(row, cand, *ent, out.tokens, sentence_mean.data());
        out.candidates.push_back(std::move(cand));
      }
      if (out.truncated) break;
    }
  }
  return out;
}

void Featurizer::fill_row(float* row, const Candidate& cand, const kg::Entity& ent,
                          const std::vector<textproc::Token>& tokens,
                          const float* sentence_mean) const {
  row[layout_.rank_off()] = static_cast<float>(cand.rank);
  row[layout_.len_off()] = static_cast<float>(cand.ngram_len);
  row[layout_.pivot_off()] = static_cast<float>(cand.pivot);

  int tag = tokens[cand.pivot].pos_tag;
  if (tag != textproc::kUnknownTag) row[layout_.pos_off() + static_cast<std::size_t>(tag)] = 1.0f;

  if (!ent.embedding.empty())
    std::memcpy(row + layout_.ent_off(), ent.embedding.data(), layout_.ent_dim * sizeof(float));

  std::memcpy(row + layout_.sent_off(), sentence_mean, layout_.wv_dim * sizeof(float));

  if (const float* wv = words_->find(tokens[cand.pivot].surface))
    std::memcpy(row + layout_.word_off(), wv, layout_.wv_dim * sizeof(float));

  std::vector<std::string> desc_words;
  for (const auto& t : textproc::tokenize(ent.description)) desc_words.push_back(t.surface);
  words_->mean_into(desc_words, row + layout_.desc_off());

  // Matched against the anchor token alone, not the whole tile text; scaled
  // to [0,1] so the three columns sit in the same range as the embeddings.
  auto match = fuzzy::match_triple(tokens[cand.pivot].surface, ent.label);
  row[layout_.match_off() + 0] = static_cast<float>(match.simple) / 100.0f;
  row[layout_.match_off() + 1] = static_cast<float>(match.partial) / 100.0f;
  row[layout_.match_off() + 2] = static_cast<float>(match.token_sort) / 100.0f;

  for (const auto& [off, len] : masks_)
    for (std::size_t i = 0; i < len; ++i) row[off + i] = 0.0f;
}

}  // namespace pnel::featurizer
