#include "pnel/embeddings.hpp"

#include <cctype>
#include <cstdlib>

#include "pnel/common.hpp"

namespace pnel::embeddings {

namespace {

std::string lowered(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// True when the line is exactly two integer fields, i.e. a "count dim" header.
bool is_header_line(std::string_view line, std::size_t& dim_out) {
  const char* p = line.data();
  const char* end = p + line.size();
  char* after = nullptr;
  unsigned long long vals[2];
  for (int i = 0; i < 2; ++i) {
    while (p < end && std::isspace(static_cast<unsigned char>(*p))) ++p;
    if (p >= end || !std::isdigit(static_cast<unsigned char>(*p))) return false;
    vals[i] = std::strtoull(p, &after, 10);
    if (after == p || after > end) return false;
    p = after;
  }
  while (p < end && std::isspace(static_cast<unsigned char>(*p))) ++p;
  if (p != end) return false;
  dim_out = static_cast<std::size_t>(vals[1]);
  return true;
}

}  // namespace

VectorTable VectorTable::load(const std::string& path) {
  std::string text = io::read_file(path);
  VectorTable out;

  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool checked_header = false;
  std::size_t declared_dim = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line(text.data() + pos, (eol == std::string::npos ? text.size() : eol) - pos);
    pos = eol == std::string::npos ? text.size() : eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;

    if (!checked_header) {
      checked_header = true;
      if (is_header_line(line, declared_dim)) continue;
    }

    auto where = [&] { return path + ":" + std::to_string(line_no); };
    std::size_t sp = 0;
    while (sp < line.size() && !std::isspace(static_cast<unsigned char>(line[sp]))) ++sp;
    if (sp == 0 || sp == line.size()) throw ParseError(where() + ": expected 'word v1 ... vD'");
    std::string word(line.substr(0, sp));

    std::vector<float> row;
    const char* p = line.data() + sp;
    const char* end = line.data() + line.size();
    while (p < end) {
      char* after = nullptr;
      double v = std::strtod(p, &after);
      if (after == p) break;
      if (after > end) throw ParseError(where() + ": malformed number");
      row.push_back(static_cast<float>(v));
      p = after;
    }
    while (p < end && std::isspace(static_cast<unsigned char>(*p))) ++p;
    if (p != end) throw ParseError(where() + ": trailing junk after vector values");

    if (out.dim_ == 0) {
      out.dim_ = row.size();
      if (out.dim_ == 0) throw ParseError(where() + ": vector has no values");
      if (declared_dim != 0 && declared_dim != out.dim_)
        throw ParseError(where() + ": header says dim " + std::to_string(declared_dim) + " but row has " +
                         std::to_string(out.dim_));
    } else if (row.size() != out.dim_) {
      throw ParseError(where() + ": expected " + std::to_string(out.dim_) + " values, got " +
                       std::to_string(row.size()));
    }

    if (!out.index_.emplace(word, out.words_.size()).second)
      throw ParseError(where() + ": duplicate word '" + word + "'");
    out.words_.push_back(std::move(word));
    out.data_.insert(out.data_.end(), row.begin(), row.end());
  }

  if (out.words_.empty()) throw ParseError(path + ": no vectors found");
  return out;
}

const float* VectorTable::find(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) it = index_.find(lowered(word));
  return it == index_.end() ? nullptr : data_.data() + it->second * dim_;
}

void VectorTable::mean_into(const std::vector<std::string>& words, float* out) const {
  std::vector<double> acc(dim_, 0.0);
  std::size_t found = 0;
  for (const std::string& w : words) {
    if (const float* v = find(w)) {
      ++found;
      for (std::size_t i = 0; i < dim_; ++i) acc[i] += static_cast<double>(v[i]);
    }
  }
  for (std::size_t i = 0; i < dim_; ++i)
    out[i] = found == 0 ? 0.0f : static_cast<float>(acc[i] / static_cast<double>(found));
}

}  // namespace pnel::embeddings
