#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace pnel::textproc {

inline constexpr int kUnknownTag = -1;

// Fixed part-of-speech inventory. The position of a tag in the file order is
// its id and also its slot in the tagger one-hot block, so the order is part
// of the model contract and must not change once a model has been trained.
class TagSet {
 public:
  static TagSet builtin();
  static TagSet load(const std::string& path);

  // kUnknownTag when the name is not in the inventory.
  int id_of(std::string_view name) const;
  const std::string& name_of(int id) const;
  std::size_t size() const { return names_.size(); }

 private:
  static TagSet parse(std::string_view text, const std::string& origin);

  std::vector<std::string> names_;
  std::unordered_map<std::string, int> ids_;
};

struct Token {
  std::string surface;
  std::size_t index = 0;  // position in the token sequence
  int pos_tag = kUnknownTag;
};

// Whitespace split, then leading and trailing ASCII punctuation is peeled off
// one character per token. Interior punctuation (hyphens, apostrophes) stays
// attached. Bytes >= 0x80 are treated as word characters, so UTF-8 text passes
// through unsplit.
std::vector<Token> tokenize(std::string_view text);

// Deterministic rule tagger: closed-class lexicon lookup on the lowercased
// surface, then digit / capitalization shape rules, then ordered suffix rules,
// with NN as the fallback. Tokens with no word character get kUnknownTag.
class Tagger {
 public:
  explicit Tagger(TagSet tags);  // built-in lexicon and suffix rules
  Tagger(TagSet tags, const std::string& lexicon_path, const std::string& suffix_path);

  const TagSet& tags() const { return tags_; }

  void tag(std::vector<Token>& tokens) const;
  int resolve(std::string_view surface) const;

  // Overrides predicted tags with dataset-supplied names. Names outside the
  // tag set become kUnknownTag with a warning on stderr; excess names are
  // ignored, missing ones leave the predicted tag in place.
  void apply_gold(std::vector<Token>& tokens, const std::vector<std::string>& names) const;

 private:
  void load_rules(std::string_view lexicon_text, std::string_view suffix_text,
                  const std::string& origin);

  TagSet tags_;
  std::unordered_map<std::string, int> lexicon_;
  std::vector<std::pair<std::string, int>> suffix_rules_;  // in file order
  int cd_tag_ = kUnknownTag;
  int nnp_tag_ = kUnknownTag;
  int nn_tag_ = kUnknownTag;
};

struct NgramTile {
  std::string text;       // space-joined surfaces, original casing
  std::size_t pivot = 0;  // index of the token the tile is anchored on
  int kind = 0;           // 0 unigram, 1 left bigram, 2 right bigram, 3 trigram
  std::size_t ngram_len = 0;
};

// The four tiles anchored on token k, in the order unigram, left bigram,
// right bigram, trigram. Tiles that would cross the sequence boundary are
// dropped, so interior tokens produce four tiles and edge tokens fewer.
std::vector<NgramTile> ngram_tiles(const std::vector<Token>& tokens, std::size_t k);

}  // namespace pnel::textproc
