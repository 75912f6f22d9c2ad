#include "pnel/kg.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include <json.hpp>
#include <zlib.h>

#include "pnel/common.hpp"

namespace pnel::kg {

namespace {

constexpr char kIndexMagic[4] = {'P', 'N', 'I', 'X'};
constexpr std::uint32_t kIndexVersion = 1;

std::uint32_t crc_of(const std::string& bytes, std::size_t len) {
  auto crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(len));
  return static_cast<std::uint32_t>(crc);
}

}  // namespace

EntityStore EntityStore::load_jsonl(const std::string& path) {
  std::string text = io::read_file(path);
  EntityStore out;

  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line(text.data() + pos, (eol == std::string::npos ? text.size() : eol) - pos);
    pos = eol == std::string::npos ? text.size() : eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

    auto where = [&] { return path + ":" + std::to_string(line_no); };
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(where() + ": " + e.what());
    }
    if (!obj.is_object()) throw SchemaError(where() + ": expected a json object");

    Entity ent;
    if (!obj.contains("id") || !obj["id"].is_string())
      throw SchemaError(where() + ": 'id' must be a string");
    if (!obj.contains("label") || !obj["label"].is_string())
      throw SchemaError(where() + ": 'label' must be a string");
    ent.id = obj["id"].get<std::string>();
    ent.label = obj["label"].get<std::string>();
    if (obj.contains("description")) {
      if (!obj["description"].is_string()) throw SchemaError(where() + ": 'description' must be a string");
      ent.description = obj["description"].get<std::string>();
    }
    if (obj.contains("embedding")) {
      const auto& arr = obj["embedding"];
      if (!arr.is_array()) throw SchemaError(where() + ": 'embedding' must be an array");
      ent.embedding.reserve(arr.size());
      for (const auto& v : arr) {
        if (!v.is_number()) throw SchemaError(where() + ": 'embedding' must contain only numbers");
        ent.embedding.push_back(v.get<float>());
      }
      if (out.embedding_dim_ == 0) {
        out.embedding_dim_ = ent.embedding.size();
      } else if (ent.embedding.size() != out.embedding_dim_) {
        throw SchemaError(where() + ": embedding dim " + std::to_string(ent.embedding.size()) +
                          " does not match earlier dim " + std::to_string(out.embedding_dim_));
      }
    }

    if (!out.by_id_.emplace(ent.id, out.entities_.size()).second)
      throw DuplicateKeyError(where() + ": duplicate entity id '" + ent.id + "'");
    out.entities_.push_back(std::move(ent));
  }
  return out;
}

const Entity* EntityStore::find(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  return it == by_id_.end() ? nullptr : &entities_[it->second];
}

std::size_t EntityStore::index_of(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  if (it == by_id_.end()) throw InputError("unknown entity id '" + std::string(id) + "'");
  return it->second;
}

std::vector<std::string> LabelIndex::analyze(std::string_view text) {
  std::vector<std::string> terms;
  std::string cur;
  for (char c : text) {
    auto u = static_cast<unsigned char>(c);
    if (std::isspace(u) || std::ispunct(u)) {
      if (!cur.empty()) terms.push_back(std::move(cur)), cur.clear();
    } else {
      cur += static_cast<char>(std::tolower(u));
    }
  }
  if (!cur.empty()) terms.push_back(std::move(cur));
  return terms;
}

LabelIndex LabelIndex::build(const EntityStore& store, Bm25Params params) {
  LabelIndex out;
  out.params_ = params;
  out.doc_ids_.reserve(store.size());
  out.doc_lens_.reserve(store.size());

  std::uint64_t total_len = 0;
  for (std::size_t i = 0; i < store.size(); ++i) {
    const Entity& ent = store.at(i);
    auto terms = analyze(ent.label);
    out.doc_ids_.push_back(ent.id);
    out.doc_lens_.push_back(static_cast<std::uint32_t>(terms.size()));
    total_len += terms.size();

    std::sort(terms.begin(), terms.end());
    for (std::size_t t = 0; t < terms.size();) {
      std::size_t run = t;
      while (run < terms.size() && terms[run] == terms[t]) ++run;
      out.postings_[terms[t]].push_back(
          {static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(run - t)});
      t = run;
    }
  }
  out.avgdl_ = store.size() == 0 ? 0.0 : static_cast<double>(total_len) / static_cast<double>(store.size());
  return out;
}

std::vector<SearchHit> LabelIndex::search(std::string_view query, std::size_t top_k) const {
  auto terms = analyze(query);
  const double n = static_cast<double>(doc_ids_.size());
  const double k1 = params_.k1;
  const double b = params_.b;

  // Per-document sums accumulate in query-token order, which pins the exact
  // floating-point result independently of container iteration order.
  std::unordered_map<std::uint32_t, double> scores;
  for (const std::string& term : terms) {
    auto it = postings_.find(term);
    if (it == postings_.end()) continue;
    const double df = static_cast<double>(it->second.size());
    const double idf = std::log((n - df + 0.5) / (df + 0.5) + 1.0);
    for (const Posting& p : it->second) {
      const double tf = static_cast<double>(p.tf);
      const double norm = k1 * (1.0 - b + b * static_cast<double>(doc_lens_[p.doc]) / avgdl_);
      scores[p.doc] += idf * tf * (k1 + 1.0) / (tf + norm);
    }
  }

  std::vector<SearchHit> hits;
  hits.reserve(scores.size());
  for (const auto& [doc, score] : scores) hits.push_back({doc, score});
  std::sort(hits.begin(), hits.end(), [&](const SearchHit& a, const SearchHit& b2) {
    if (a.score != b2.score) return a.score > b2.score;
    return doc_ids_[a.doc] < doc_ids_[b2.doc];
  });
  if (hits.size() > top_k) hits.resize(top_k);
  return hits;
}

void LabelIndex::save(const std::string& path) const {
  std::string buf;
  buf.append(kIndexMagic, sizeof(kIndexMagic));
  io::put_u32(buf, kIndexVersion);
  io::put_u32(buf, static_cast<std::uint32_t>(doc_ids_.size()));
  io::put_f64(buf, avgdl_);
  io::put_f64(buf, params_.k1);
  io::put_f64(buf, params_.b);
  for (std::size_t i = 0; i < doc_ids_.size(); ++i) {
    io::put_string(buf, doc_ids_[i]);
    io::put_u32(buf, doc_lens_[i]);
  }

  std::vector<const std::string*> terms;
  terms.reserve(postings_.size());
  for (const auto& [term, _] : postings_) terms.push_back(&term);
  std::sort(terms.begin(), terms.end(), [](const auto* a, const auto* b) { return *a < *b; });

  io::put_u32(buf, static_cast<std::uint32_t>(terms.size()));
  for (const std::string* term : terms) {
    const auto& plist = postings_.at(*term);
    io::put_string(buf, *term);
    io::put_u32(buf, static_cast<std::uint32_t>(plist.size()));
    for (const Posting& p : plist) {
      io::put_u32(buf, p.doc);
      io::put_u32(buf, p.tf);
    }
  }

  io::put_u32(buf, crc_of(buf, buf.size()));
  io::write_file(path, buf);
}

LabelIndex LabelIndex::load(const std::string& path) {
  std::string buf = io::read_file(path);
  if (buf.size() < sizeof(kIndexMagic) + 4 || buf.compare(0, sizeof(kIndexMagic), kIndexMagic, sizeof(kIndexMagic)) != 0)
    throw FormatError(path + ": not an index file");

  io::Reader r(buf);
  r.bytes(sizeof(kIndexMagic));
  std::uint32_t version = r.u32();
  if (version != kIndexVersion)
    throw FormatError(path + ": unsupported index version " + std::to_string(version));

  LabelIndex out;
  std::uint32_t n_docs = r.u32();
  out.avgdl_ = r.f64();
  out.params_.k1 = r.f64();
  out.params_.b = r.f64();
  out.doc_ids_.reserve(n_docs);
  out.doc_lens_.reserve(n_docs);
  for (std::uint32_t i = 0; i < n_docs; ++i) {
    out.doc_ids_.push_back(r.str());
    out.doc_lens_.push_back(r.u32());
  }
  std::uint32_t n_terms = r.u32();
  for (std::uint32_t t = 0; t < n_terms; ++t) {
    std::string term = r.str();
    std::uint32_t n_postings = r.u32();
    auto& plist = out.postings_[term];
    plist.reserve(n_postings);
    for (std::uint32_t p = 0; p < n_postings; ++p) {
      std::uint32_t doc = r.u32();
      std::uint32_t tf = r.u32();
      if (doc >= n_docs) throw FormatError(path + ": posting refers to missing document");
      plist.push_back({doc, tf});
    }
  }

  if (r.remaining() != 4) throw FormatError(path + ": trailing bytes after postings");
  std::uint32_t stored = r.u32();
  if (stored != crc_of(buf, buf.size() - 4)) throw ChecksumError(path + ": index checksum mismatch");
  return out;
}

}  // namespace pnel::kg
