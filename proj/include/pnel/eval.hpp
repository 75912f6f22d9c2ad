#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "pnel/common.hpp"
#include "pnel/featurizer.hpp"
#include "pnel/pointer_net.hpp"

namespace pnel::eval {

struct Example {
  std::string question;
  std::vector<std::string> gold_ids;
  std::vector<std::string> tokens;    // optional pre-tokenization
  std::vector<std::string> pos_tags;  // optional gold tags
  bool has_tokens = false;
  bool has_pos_tags = false;
};

// Questions with their gold entities, one json object per line:
//   {"question": ..., "entities": [...], "tokens": [...], "pos": [...]}
// entities defaults to empty; tokens overrides the tokenizer and pos
// overrides the rule tagger when present.
class Dataset {
 public:
  static Dataset load_jsonl(const std::string& path);

  std::size_t size() const { return examples_.size(); }
  const Example& at(std::size_t i) const { return examples_[i]; }

 private:
  std::vector<Example> examples_;
};

struct PairMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Set precision/recall/F1 of one prediction against one gold set, both
// deduplicated. Empty prediction scores precision 1 against empty gold and 0
// otherwise; empty gold scores recall 1; F1 is 0 when precision+recall is.
PairMetrics pair_metrics(const std::vector<std::string>& gold,
                         const std::vector<std::string>& predicted);

// Micro-averaged set metrics over (gold, predicted) id pairs. Both sides are
// deduplicated; a denominator of zero reads as a perfect score.
class MetricAccum {
 public:
  void add(const std::vector<std::string>& gold, const std::vector<std::string>& predicted);

  double precision() const;
  double recall() const;
  double f1() const;

 private:
  std::size_t tp_ = 0, fp_ = 0, fn_ = 0;
};

// End-to-end linking: candidates, features, greedy decode, then the pointed
// candidates' entity ids with duplicates dropped in emission order.
std::vector<std::string> link(const pointer::PointerModel& model, const featurizer::Featurizer& fz,
                              std::string_view question,
                              const std::vector<std::string>* gold_tags = nullptr);

struct QuestionRow {
  std::size_t index = 0;  // position in the dataset
  std::string question;
  std::vector<std::string> predicted;
  std::vector<std::string> gold;
  PairMetrics metrics;
};

struct Report {
  std::vector<QuestionRow> per_question;
  PairMetrics macro;  // means of the per-question metrics
  PairMetrics micro;  // from global true/false positive and negative counts
  double candidate_recall = 0.0;  // gold entities reachable through the candidate lists
  std::size_t n_gold = 0;
  std::size_t n_gold_in_candidates = 0;
};

Report evaluate(const pointer::PointerModel& model, const featurizer::Featurizer& fz,
                const Dataset& data);

// The candidate list for one example, honoring its supplied tokens and tags.
featurizer::EpisodeInputs featurize_example(const featurizer::Featurizer& fz, const Example& ex);

// A featurized example ready for the model: candidate rows plus gold rows,
// where each gold id maps to its first occurrence in candidate order.
struct PreparedEpisode {
  featurizer::EpisodeInputs inputs;
  std::vector<std::size_t> gold_rows;
  std::vector<std::string> gold_ids;  // deduplicated, dataset order
  std::size_t example_idx = 0;
};

// Featurizes every example whose gold entities all appear among its
// candidates; the others are counted into *skipped. Only those episodes can
// be teacher-forced.
std::vector<PreparedEpisode> prepare_episodes(const featurizer::Featurizer& fz, const Dataset& data,
                                              std::size_t* skipped);

struct TrainOptions {
  std::size_t max_epochs = 50;
  double early_stop_f1 = 0.0;  // stop once train F1 reaches this; 0 disables
  bool shuffle = true;
  std::ostream* log = nullptr;
};

struct TrainSummary {
  std::size_t epochs = 0;
  std::vector<double> epoch_loss;  // mean episode loss, one entry per epoch
  double train_f1 = 0.0;           // macro F1 over the training episodes
};

// Single-episode Adam steps over shuffled epochs. Everything that varies is
// drawn from `rng`, so one seed fixes the whole loss history.
TrainSummary train(pointer::PointerModel& model, const std::vector<PreparedEpisode>& episodes,
                   const TrainOptions& opts, Rng& rng);

}  // namespace pnel::eval
