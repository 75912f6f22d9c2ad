#include "pnel/textproc.hpp"

#include <cctype>
#include <iostream>
#include <sstream>

#include "pnel/common.hpp"
#include "pnel/textproc_data.hpp"

namespace pnel::textproc {

namespace {

bool is_space_byte(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_punct_byte(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }
bool is_digit_byte(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

// Bytes >= 0x80 count as word characters so multi-byte UTF-8 sequences are
// never mistaken for punctuation.
bool is_word_byte(char c) {
  auto u = static_cast<unsigned char>(c);
  return u >= 0x80 || std::isalnum(u) != 0;
}

std::string lowered(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Shared line format for the tagger data: blank lines and '#' comments are
// skipped, every other line is whitespace-separated fields.
template <typename Fn>
void for_each_data_line(std::string_view text, const std::string& origin, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    ++line_no;
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;

    std::vector<std::string> fields;
    std::istringstream ss{std::string(line)};
    std::string field;
    while (ss >> field) fields.push_back(field);
    if (fields.empty() || fields.front().front() == '#') continue;
    fn(fields, origin + ":" + std::to_string(line_no));
  }
}

}  // namespace

TagSet TagSet::parse(std::string_view text, const std::string& origin) {
  TagSet out;
  for_each_data_line(text, origin, [&](const std::vector<std::string>& fields, const std::string& where) {
    if (fields.size() != 1) throw ParseError(where + ": expected one tag per line");
    const std::string& name = fields.front();
    if (!out.ids_.emplace(name, static_cast<int>(out.names_.size())).second)
      throw ParseError(where + ": duplicate tag '" + name + "'");
    out.names_.push_back(name);
  });
  if (out.names_.empty()) throw ParseError(origin + ": empty tag inventory");
  return out;
}

TagSet TagSet::builtin() { return parse(detail::kPosTagsText, "<builtin pos tags>"); }

TagSet TagSet::load(const std::string& path) { return parse(io::read_file(path), path); }

int TagSet::id_of(std::string_view name) const {
  auto it = ids_.find(std::string(name));
  return it == ids_.end() ? kUnknownTag : it->second;
}

const std::string& TagSet::name_of(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= names_.size())
    throw InputError("tag id out of range: " + std::to_string(id));
  return names_[static_cast<std::size_t>(id)];
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  auto emit = [&](std::string_view s) { out.push_back(Token{std::string(s), out.size(), kUnknownTag}); };

  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space_byte(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space_byte(text[j])) ++j;
    if (i == j) break;

    std::size_t b = i, e = j;
    while (b < e && is_punct_byte(text[b])) {
      emit(text.substr(b, 1));
      ++b;
    }
    std::size_t trail = e;
    while (trail > b && is_punct_byte(text[trail - 1])) --trail;
    if (trail > b) emit(text.substr(b, trail - b));
    for (std::size_t p = trail; p < e; ++p) emit(text.substr(p, 1));
    i = j;
  }
  return out;
}

Tagger::Tagger(TagSet tags) : tags_(std::move(tags)) {
  load_rules(detail::kLexiconText, detail::kSuffixesText, "<builtin tagger rules>");
}

Tagger::Tagger(TagSet tags, const std::string& lexicon_path, const std::string& suffix_path)
    : tags_(std::move(tags)) {
  load_rules(io::read_file(lexicon_path), io::read_file(suffix_path), lexicon_path);
}

void Tagger::load_rules(std::string_view lexicon_text, std::string_view suffix_text,
                        const std::string& origin) {
  auto parse_pair = [&](const std::vector<std::string>& fields, const std::string& where) {
    if (fields.size() != 2) throw ParseError(where + ": expected 'word TAG'");
    int id = tags_.id_of(fields[1]);
    if (id == kUnknownTag) throw ParseError(where + ": unknown tag '" + fields[1] + "'");
    return std::pair<std::string, int>{lowered(fields[0]), id};
  };
  for_each_data_line(lexicon_text, origin, [&](const auto& fields, const std::string& where) {
    auto [word, id] = parse_pair(fields, where);
    if (!lexicon_.emplace(word, id).second) throw ParseError(where + ": duplicate lexicon entry '" + word + "'");
  });
  for_each_data_line(suffix_text, origin, [&](const auto& fields, const std::string& where) {
    suffix_rules_.push_back(parse_pair(fields, where));
  });
  cd_tag_ = tags_.id_of("CD");
  nnp_tag_ = tags_.id_of("NNP");
  nn_tag_ = tags_.id_of("NN");
  if (cd_tag_ == kUnknownTag || nnp_tag_ == kUnknownTag || nn_tag_ == kUnknownTag)
    throw ConfigError("tag set is missing CD, NNP or NN, which the shape rules need");
}

int Tagger::resolve(std::string_view surface) const {
  bool has_word_byte = false;
  bool has_digit = false;
  for (char c : surface) {
    has_word_byte = has_word_byte || is_word_byte(c);
    has_digit = has_digit || is_digit_byte(c);
  }
  if (!has_word_byte) return kUnknownTag;

  std::string lower = lowered(surface);
  if (auto it = lexicon_.find(lower); it != lexicon_.end()) return it->second;
  if (has_digit) return cd_tag_;
  if (std::isupper(static_cast<unsigned char>(surface.front()))) return nnp_tag_;
  for (const auto& [suffix, id] : suffix_rules_) {
    if (lower.size() >= suffix.size() + 2 && lower.ends_with(suffix)) return id;
  }
  return nn_tag_;
}

void Tagger::tag(std::vector<Token>& tokens) const {
  for (Token& t : tokens) t.pos_tag = resolve(t.surface);
}

void Tagger::apply_gold(std::vector<Token>& tokens, const std::vector<std::string>& names) const {
  for (std::size_t i = 0; i < tokens.size() && i < names.size(); ++i) {
    int id = tags_.id_of(names[i]);
    if (id == kUnknownTag && !names[i].empty()) {
      std::cerr << "warning: unknown pos tag '" << names[i] << "' for token '" << tokens[i].surface
                << "', treating as untagged\n";
    }
    tokens[i].pos_tag = id;
  }
}

std::vector<NgramTile> ngram_tiles(const std::vector<Token>& tokens, std::size_t k) {
  if (k >= tokens.size()) throw InputError("ngram pivot " + std::to_string(k) + " out of range");

  std::vector<NgramTile> out;
  auto emit = [&](int kind, std::size_t first, std::size_t len) {
    NgramTile tile;
    tile.kind = kind;
    tile.pivot = k;
    tile.ngram_len = len;
    for (std::size_t i = first; i < first + len; ++i) {
      if (!tile.text.empty()) tile.text += ' ';
      tile.text += tokens[i].surface;
    }
    out.push_back(std::move(tile));
  };

  emit(0, k, 1);
  if (k >= 1) emit(1, k - 1, 2);
  if (k + 1 < tokens.size()) emit(2, k, 2);
  if (k >= 1 && k + 1 < tokens.size()) emit(3, k - 1, 3);
  return out;
}

}  // namespace pnel::textproc
