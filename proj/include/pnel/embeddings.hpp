#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace pnel::embeddings {

// Word-vector table in the usual text format: an optional "count dim" header
// line, then one word per line followed by dim numbers. Vectors are stored as
// f32; means are accumulated in f64 in file row order.
class VectorTable {
 public:
  VectorTable() = default;

  static VectorTable load(const std::string& path);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return words_.size(); }

  // Exact lookup first, then the lowercased surface. nullptr when the word is
  // out of vocabulary either way.
  const float* find(std::string_view word) const;
  bool contains(std::string_view word) const { return find(word) != nullptr; }

  // Mean over the in-vocabulary words, divided by the number found; writes
  // dim() zeros when none of them are known.
  void mean_into(const std::vector<std::string>& words, float* out) const;

 private:
  std::size_t dim_ = 0;
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<float> data_;  // row-major, size() * dim()
};

}  // namespace pnel::embeddings
