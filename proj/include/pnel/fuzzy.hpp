#pragma once

#include <string>
#include <string_view>

// The three label-match metrics fed into the candidate feature vector. Each is
// an integer in [0, 100]; 100 means a perfect match under that metric.
//
// The base ratio is the indel similarity: edit distance with insert/delete
// cost 1 and substitution cost 2, which equals len(a)+len(b)-2*LCS(a,b).
// Inputs are lowercased first; rounding is half away from zero.
namespace pnel::fuzzy {

struct MatchTriple {
  int simple = 0;
  int partial = 0;
  int token_sort = 0;
};

int simple_ratio(std::string_view a, std::string_view b);

// Best simple_ratio of the shorter string against every contiguous window of
// the same length in the longer string.
int partial_ratio(std::string_view a, std::string_view b);

// simple_ratio after lowercasing, splitting on whitespace, sorting the tokens
// and re-joining with single spaces.
int token_sort_ratio(std::string_view a, std::string_view b);

MatchTriple match_triple(std::string_view a, std::string_view b);

}  // namespace pnel::fuzzy
