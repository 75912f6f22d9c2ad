#include "pnel/eval.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <unordered_set>

#include <json.hpp>

namespace pnel::eval {

namespace {

std::vector<std::string> dedup_keep_order(const std::vector<std::string>& ids) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const std::string& id : ids)
    if (seen.insert(id).second) out.push_back(id);
  return out;
}

}  // namespace

Dataset Dataset::load_jsonl(const std::string& path) {
  std::string text = io::read_file(path);
  Dataset out;

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

    Example ex;
    if (!obj.contains("question") || !obj["question"].is_string())
      throw SchemaError(where() + ": 'question' must be a string");
    ex.question = obj["question"].get<std::string>();

    auto read_strings = [&](const char* key, std::vector<std::string>& into) {
      if (!obj.contains(key)) return false;
      if (!obj[key].is_array()) throw SchemaError(where() + ": '" + key + "' must be an array");
      for (const auto& v : obj[key]) {
        if (!v.is_string()) throw SchemaError(where() + ": '" + key + "' must contain only strings");
        into.push_back(v.get<std::string>());
      }
      return true;
    };
    read_strings("entities", ex.gold_ids);
    ex.has_tokens = read_strings("tokens", ex.tokens);
    ex.has_pos_tags = read_strings("pos", ex.pos_tags);
    out.examples_.push_back(std::move(ex));
  }
  return out;
}

PairMetrics pair_metrics(const std::vector<std::string>& gold,
                         const std::vector<std::string>& predicted) {
  std::unordered_set<std::string> gold_set(gold.begin(), gold.end());
  std::unordered_set<std::string> pred_set(predicted.begin(), predicted.end());
  std::size_t inter = 0;
  for (const std::string& p : pred_set) inter += gold_set.count(p);

  PairMetrics m;
  if (pred_set.empty())
    m.precision = gold_set.empty() ? 1.0 : 0.0;
  else
    m.precision = static_cast<double>(inter) / static_cast<double>(pred_set.size());
  m.recall = gold_set.empty() ? 1.0 : static_cast<double>(inter) / static_cast<double>(gold_set.size());
  m.f1 = m.precision + m.recall == 0.0 ? 0.0 : 2.0 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

void MetricAccum::add(const std::vector<std::string>& gold, const std::vector<std::string>& predicted) {
  std::unordered_set<std::string> gold_set(gold.begin(), gold.end());
  std::unordered_set<std::string> pred_set(predicted.begin(), predicted.end());
  for (const std::string& p : pred_set) {
    if (gold_set.count(p))
      ++tp_;
    else
      ++fp_;
  }
  for (const std::string& g : gold_set)
    if (!pred_set.count(g)) ++fn_;
}

double MetricAccum::precision() const {
  return tp_ + fp_ == 0 ? 1.0 : static_cast<double>(tp_) / static_cast<double>(tp_ + fp_);
}

double MetricAccum::recall() const {
  return tp_ + fn_ == 0 ? 1.0 : static_cast<double>(tp_) / static_cast<double>(tp_ + fn_);
}

double MetricAccum::f1() const {
  double p = precision(), r = recall();
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

std::vector<std::string> link(const pointer::PointerModel& model, const featurizer::Featurizer& fz,
                              std::string_view question, const std::vector<std::string>* gold_tags) {
  auto episode = fz.build(question, gold_tags);
  auto pointed = model.decode(episode.features.data(), episode.candidates.size());
  std::vector<std::string> ids;
  ids.reserve(pointed.size());
  for (std::size_t c : pointed) ids.push_back(episode.candidates[c].entity_id);
  return dedup_keep_order(ids);
}

featurizer::EpisodeInputs featurize_example(const featurizer::Featurizer& fz, const Example& ex) {
  const std::vector<std::string>* tags = ex.has_pos_tags ? &ex.pos_tags : nullptr;
  return ex.has_tokens ? fz.build_tokens(ex.tokens, tags) : fz.build(ex.question, tags);
}

Report evaluate(const pointer::PointerModel& model, const featurizer::Featurizer& fz,
                const Dataset& data) {
  Report out;
  MetricAccum micro;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Example& ex = data.at(i);
    auto episode = featurize_example(fz, ex);

    std::unordered_set<std::string> cand_ids;
    for (const auto& c : episode.candidates) cand_ids.insert(c.entity_id);
    QuestionRow row;
    row.index = i;
    row.question = ex.question;
    row.gold = dedup_keep_order(ex.gold_ids);
    for (const std::string& g : row.gold) {
      ++out.n_gold;
      if (cand_ids.count(g)) ++out.n_gold_in_candidates;
    }

    auto pointed = model.decode(episode.features.data(), episode.candidates.size());
    std::vector<std::string> pred;
    for (std::size_t c : pointed) pred.push_back(episode.candidates[c].entity_id);
    row.predicted = dedup_keep_order(pred);
    row.metrics = pair_metrics(row.gold, row.predicted);
    micro.add(row.gold, row.predicted);

    out.macro.precision += row.metrics.precision;
    out.macro.recall += row.metrics.recall;
    out.macro.f1 += row.metrics.f1;
    out.per_question.push_back(std::move(row));
  }
  if (!out.per_question.empty()) {
    const double n = static_cast<double>(out.per_question.size());
    out.macro.precision /= n;
    out.macro.recall /= n;
    out.macro.f1 /= n;
  }
  out.micro = {micro.precision(), micro.recall(), micro.f1()};
  out.candidate_recall =
      out.n_gold == 0 ? 1.0 : static_cast<double>(out.n_gold_in_candidates) / static_cast<double>(out.n_gold);
  return out;
}

std::vector<PreparedEpisode> prepare_episodes(const featurizer::Featurizer& fz, const Dataset& data,
                                              std::size_t* skipped) {
  std::vector<PreparedEpisode> out;
  std::size_t dropped = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Example& ex = data.at(i);
    PreparedEpisode ep;
    ep.example_idx = i;
    ep.inputs = featurize_example(fz, ex);
    ep.gold_ids = dedup_keep_order(ex.gold_ids);

    bool usable = true;
    for (const std::string& g : ep.gold_ids) {
      std::size_t row = ep.inputs.candidates.size();
      for (std::size_t c = 0; c < ep.inputs.candidates.size(); ++c) {
        if (ep.inputs.candidates[c].entity_id == g) {
          row = c;
          break;
        }
      }
      if (row == ep.inputs.candidates.size()) {
        usable = false;
        break;
      }
      ep.gold_rows.push_back(row);
    }
    if (usable)
      out.push_back(std::move(ep));
    else
      ++dropped;
  }
  if (skipped != nullptr) *skipped = dropped;
  return out;
}

TrainSummary train(pointer::PointerModel& model, const std::vector<PreparedEpisode>& episodes,
                   const TrainOptions& opts, Rng& rng) {
  if (episodes.empty()) throw InputError("no usable training episodes");

  auto train_f1_now = [&] {
    double sum = 0.0;
    for (const PreparedEpisode& ep : episodes) {
      auto pointed = model.decode(ep.inputs.features.data(), ep.inputs.candidates.size());
      std::vector<std::string> pred;
      for (std::size_t c : pointed) pred.push_back(ep.inputs.candidates[c].entity_id);
      sum += pair_metrics(ep.gold_ids, pred).f1;
    }
    return sum / static_cast<double>(episodes.size());
  };

  TrainSummary summary;
  std::vector<std::size_t> order(episodes.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t epoch = 0; epoch < opts.max_epochs; ++epoch) {
    if (opts.shuffle) rng.shuffle(order);
    double total = 0.0;
    for (std::size_t idx : order) {
      const PreparedEpisode& ep = episodes[idx];
      total += model.train_step(ep.inputs.features.data(), ep.inputs.candidates.size(), ep.gold_rows);
    }
    summary.epochs = epoch + 1;
    summary.epoch_loss.push_back(total / static_cast<double>(episodes.size()));
    summary.train_f1 = train_f1_now();
    if (opts.log != nullptr) {
      *opts.log << "epoch " << summary.epochs << "  loss " << summary.epoch_loss.back() << "  train_f1 "
                << summary.train_f1 << "\n";
    }
    if (opts.early_stop_f1 > 0.0 && summary.train_f1 >= opts.early_stop_f1) break;
  }
  return summary;
}

}  // namespace pnel::eval
