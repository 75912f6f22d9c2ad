#include "pnel/fuzzy.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <vector>

namespace pnel::fuzzy {

namespace {

std::string lowered(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

size_t lcs_length(std::string_view a, std::string_view b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<size_t> prev(b.size() + 1, 0);
  std::vector<size_t> cur(b.size() + 1, 0);
  for (size_t i = 1; i <= a.size(); ++i) {
    for (size_t j = 1; j <= b.size(); ++j) {
      if (a[i - 1] == b[j - 1]) {
        cur[j] = prev[j - 1] + 1;
      } else {
        cur[j] = std::max(prev[j], cur[j - 1]);
      }
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

// ratio over already-lowercased strings
int ratio_raw(std::string_view a, std::string_view b) {
  const size_t total = a.size() + b.size();
  if (total == 0) return 100;
  const double m = static_cast<double>(lcs_length(a, b));
  return static_cast<int>(std::llround(200.0 * m / static_cast<double>(total)));
}

std::string sorted_tokens(std::string_view s) {
  std::vector<std::string> toks;
  std::string cur;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) toks.push_back(std::move(cur)), cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) toks.push_back(std::move(cur));
  std::sort(toks.begin(), toks.end());
  std::string out;
  for (size_t i = 0; i < toks.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out += toks[i];
  }
  return out;
}

}  // namespace

int simple_ratio(std::string_view a, std::string_view b) {
  return ratio_raw(lowered(a), lowered(b));
}

int partial_ratio(std::string_view a, std::string_view b) {
  std::string la = lowered(a);
  std::string lb = lowered(b);
  std::string_view shorter = la.size() <= lb.size() ? la : lb;
  std::string_view longer = la.size() <= lb.size() ? lb : la;
  if (shorter.empty()) return 100;
  int best = 0;
  for (size_t i = 0; i + shorter.size() <= longer.size(); ++i) {
    best = std::max(best, ratio_raw(shorter, longer.substr(i, shorter.size())));
    if (best == 100) break;
  }
  return best;
}

int token_sort_ratio(std::string_view a, std::string_view b) {
  return ratio_raw(sorted_tokens(lowered(a)), sorted_tokens(lowered(b)));
}

MatchTriple match_triple(std::string_view a, std::string_view b) {
  return MatchTriple{simple_ratio(a, b), partial_ratio(a, b), token_sort_ratio(a, b)};
}

}  // namespace pnel::fuzzy
