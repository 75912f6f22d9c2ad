#include <algorithm>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pnel/common.hpp"
#include "pnel/embeddings.hpp"
#include "pnel/eval.hpp"
#include "pnel/featurizer.hpp"
#include "pnel/kg.hpp"
#include "pnel/pointer_net.hpp"
#include "pnel/textproc.hpp"

namespace {

using nlohmann::json;

constexpr int kExitError = 1;
constexpr int kExitIo = 2;
constexpr int kExitNoEpisodes = 3;
constexpr int kExitGradCheck = 4;
constexpr int kExitUsage = 64;

// Option precedence: explicit flag, then config file, then the default (the
// seed's default already folds in PNEL_SEED).
template <typename T>
void merge_cfg(const json& cfg, const char* key, const CLI::Option* opt, T& value) {
  if (opt != nullptr && opt->count() > 0) return;
  if (cfg.contains(key)) value = cfg[key].get<T>();
}

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  try {
    return json::parse(pnel::io::read_file(path));
  } catch (const json::parse_error& e) {
    throw pnel::ConfigError(path + ": " + e.what());
  }
}

struct Resources {
  pnel::kg::EntityStore store;
  pnel::kg::LabelIndex index;
  pnel::embeddings::VectorTable words;
  pnel::textproc::Tagger tagger;
  pnel::featurizer::FeatureLayout layout;
};

// Loads the shared inputs of every model-facing subcommand and derives the
// feature layout from their dimensions.
Resources load_resources(const std::string& entities, const std::string& index,
                         const std::string& vectors, const std::string& tags) {
  auto tag_set = tags.empty() ? pnel::textproc::TagSet::builtin() : pnel::textproc::TagSet::load(tags);
  Resources r{pnel::kg::EntityStore::load_jsonl(entities), pnel::kg::LabelIndex::load(index),
              pnel::embeddings::VectorTable::load(vectors), pnel::textproc::Tagger(std::move(tag_set)),
              {}};
  r.layout.pos_dim = r.tagger.tags().size();
  r.layout.ent_dim = r.store.embedding_dim() != 0 ? r.store.embedding_dim() : r.layout.ent_dim;
  r.layout.wv_dim = r.words.dim();
  return r;
}

std::vector<pnel::featurizer::Feature> parse_masks(const std::vector<std::string>& names) {
  std::vector<pnel::featurizer::Feature> out;
  for (const std::string& name : names) {
    if (name == "none") continue;
    auto f = pnel::featurizer::feature_from_name(name);
    if (!f) throw pnel::ConfigError("unknown feature group '" + name + "'");
    out.push_back(*f);
  }
  return out;
}

void check_model_fits(const pnel::pointer::PointerModel& model,
                      const pnel::featurizer::FeatureLayout& layout) {
  if (model.config().input_dim != layout.dim())
    throw pnel::ConfigError("model expects " + std::to_string(model.config().input_dim) +
                            "-wide features but the loaded resources produce " +
                            std::to_string(layout.dim()));
}

struct TrainRun {
  pnel::pointer::PointerModel model;
  pnel::eval::TrainSummary summary;
  std::size_t used = 0;
  std::size_t skipped = 0;
};

// Shared by `train` and `ablate`: featurize, drop unusable episodes, train a
// freshly seeded model.
std::optional<TrainRun> run_training(const Resources& res, const pnel::eval::Dataset& data,
                                     const pnel::pointer::PointerConfig& cfg,
                                     const pnel::eval::TrainOptions& opts,
                                     const std::vector<pnel::featurizer::Feature>& masks,
                                     std::size_t top_l, std::uint64_t seed) {
  pnel::featurizer::Featurizer fz(res.store, res.index, res.words, res.tagger, res.layout, top_l);
  fz.set_masks(masks);

  std::size_t skipped = 0;
  auto episodes = pnel::eval::prepare_episodes(fz, data, &skipped);
  if (episodes.empty()) return std::nullopt;

  pnel::Rng rng(seed);
  TrainRun run{pnel::pointer::PointerModel(cfg, rng), {}, episodes.size(), skipped};
  run.summary = pnel::eval::train(run.model, episodes, opts, rng);
  return run;
}

json metrics_json(const pnel::eval::PairMetrics& m) {
  return json{{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
}

json report_json(const pnel::eval::Report& r) {
  json rows = json::array();
  for (const auto& q : r.per_question)
    rows.push_back(json{{"index", q.index},
                        {"question", q.question},
                        {"predicted", q.predicted},
                        {"gold", q.gold},
                        {"precision", q.metrics.precision},
                        {"recall", q.metrics.recall},
                        {"f1", q.metrics.f1}});
  return json{{"macro", metrics_json(r.macro)},
              {"micro", metrics_json(r.micro)},
              {"candidate_recall", r.candidate_recall},
              {"questions", r.per_question.size()},
              {"gold_entities", r.n_gold},
              {"gold_in_candidates", r.n_gold_in_candidates},
              {"per_question", rows}};
}

void report_table(std::ostream& os, const pnel::eval::Report& r) {
  os << std::left;
  char line[160];
  std::snprintf(line, sizeof line, "%-5s  %-9s  %-9s  %-9s", "", "precision", "recall", "f1");
  os << line << "\n";
  std::snprintf(line, sizeof line, "%-5s  %9.4f  %9.4f  %9.4f", "macro", r.macro.precision,
                r.macro.recall, r.macro.f1);
  os << line << "\n";
  std::snprintf(line, sizeof line, "%-5s  %9.4f  %9.4f  %9.4f", "micro", r.micro.precision,
                r.micro.recall, r.micro.f1);
  os << line << "\n";
  os << "candidate_recall " << r.candidate_recall << " (" << r.n_gold_in_candidates << "/" << r.n_gold
     << " gold entities reachable)\n";
}

// Tile surface text of a candidate, for provenance output.
std::string tile_text_of(const pnel::featurizer::EpisodeInputs& ep,
                         const pnel::featurizer::Candidate& c) {
  std::size_t first = c.pivot, last = c.pivot;
  if (c.tile_kind == 1 || c.tile_kind == 3) first = c.pivot - 1;
  if (c.tile_kind == 2 || c.tile_kind == 3) last = c.pivot + 1;
  std::string out;
  for (std::size_t i = first; i <= last; ++i) {
    if (!out.empty()) out += ' ';
    out += ep.tokens[i].surface;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"entity linking over a label-indexed knowledge graph"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "json file with defaults for the flags below")
      ->configurable(false);

  // ---- build-index ----
  auto* build_cmd = app.add_subcommand("build-index", "build and save the label search index");
  std::string bi_entities, bi_out;
  double bi_k1 = 1.2, bi_b = 0.75;
  build_cmd->add_option("--entities", bi_entities, "entities jsonl")->required();
  build_cmd->add_option("--out", bi_out, "output index path")->required();
  auto* bi_k1_opt = build_cmd->add_option("--k1", bi_k1, "bm25 k1");
  auto* bi_b_opt = build_cmd->add_option("--b", bi_b, "bm25 b");

  // ---- shared resource flags, one set per subcommand that needs them ----
  struct ResFlags {
    std::string entities, index, vectors, tags;
    void attach(CLI::App* cmd) {
      cmd->add_option("--entities", entities, "entities jsonl")->required();
      cmd->add_option("--index", index, "label index file")->required();
      cmd->add_option("--vectors", vectors, "word vectors, text format")->required();
      cmd->add_option("--tags", tags, "pos tag inventory (default: built in)");
    }
  };

  // ---- train ----
  auto* train_cmd = app.add_subcommand("train", "train a pointer model");
  ResFlags train_res;
  train_res.attach(train_cmd);
  std::string tr_data, tr_out, tr_history;
  std::size_t tr_hidden = 512, tr_attn = 128, tr_max_outputs = 100, tr_epochs = 50, tr_top_l = 50;
  double tr_lr = 0.001, tr_init = 0.08, tr_early = 0.0;
  std::uint64_t tr_seed = pnel::seed_from_env_or(42);
  std::vector<std::string> tr_masks;
  train_cmd->add_option("--train", tr_data, "training questions jsonl")->required();
  train_cmd->add_option("--out", tr_out, "output checkpoint path")->required();
  train_cmd->add_option("--history", tr_history,
                        "loss history json path (default: <out>.history.json)");
  auto* tr_hidden_opt = train_cmd->add_option("--hidden", tr_hidden, "encoder hidden width per direction");
  auto* tr_attn_opt = train_cmd->add_option("--attn", tr_attn, "attention width");
  auto* tr_maxout_opt = train_cmd->add_option("--max-outputs", tr_max_outputs, "decode step cap");
  auto* tr_epochs_opt = train_cmd->add_option("--epochs", tr_epochs, "max training epochs");
  auto* tr_topl_opt = train_cmd->add_option("--top-l", tr_top_l, "search hits kept per ngram");
  auto* tr_lr_opt = train_cmd->add_option("--lr", tr_lr, "adam learning rate");
  auto* tr_init_opt = train_cmd->add_option("--init-scale", tr_init, "uniform init range");
  auto* tr_early_opt = train_cmd->add_option("--early-stop-f1", tr_early, "stop once train f1 reaches this");
  auto* tr_seed_opt = train_cmd->add_option("--seed", tr_seed, "rng seed (default: PNEL_SEED or 42)");
  auto* tr_masks_opt =
      train_cmd->add_option("--mask", tr_masks, "feature groups to zero out")->delimiter(',');

  // ---- link ----
  auto* link_cmd = app.add_subcommand("link", "link one question or a file of questions");
  ResFlags link_res;
  link_res.attach(link_cmd);
  std::string lk_model, lk_question, lk_input;
  std::size_t lk_top_l = 50;
  bool lk_verbose = false;
  link_cmd->add_option("--model", lk_model, "checkpoint path")->required();
  link_cmd->add_option("--question", lk_question, "single question text");
  link_cmd->add_option("--input", lk_input, "questions jsonl; one result line per question");
  auto* lk_topl_opt = link_cmd->add_option("-k,--top-l", lk_top_l, "search hits kept per ngram");
  link_cmd->add_flag("-v,--verbose", lk_verbose, "print per-entity provenance to stderr");

  // ---- eval ----
  auto* eval_cmd = app.add_subcommand("eval", "score a model against gold entities");
  ResFlags eval_res;
  eval_res.attach(eval_cmd);
  std::string ev_model, ev_data;
  std::size_t ev_top_l = 50;
  std::vector<std::string> ev_masks;
  eval_cmd->add_option("--model", ev_model, "checkpoint path")->required();
  eval_cmd->add_option("--data", ev_data, "questions jsonl with gold entities")->required();
  auto* ev_topl_opt = eval_cmd->add_option("-k,--top-l", ev_top_l, "search hits kept per ngram");
  auto* ev_masks_opt =
      eval_cmd->add_option("--mask", ev_masks, "feature groups to zero out")->delimiter(',');

  // ---- ablate ----
  auto* abl_cmd = app.add_subcommand("ablate", "retrain with one feature group removed at a time");
  ResFlags abl_res;
  abl_res.attach(abl_cmd);
  std::string ab_train, ab_test;
  std::size_t ab_hidden = 64, ab_attn = 32, ab_max_outputs = 100, ab_epochs = 50, ab_top_l = 50;
  double ab_lr = 0.001, ab_init = 0.08, ab_early = 0.0;
  std::uint64_t ab_seed = pnel::seed_from_env_or(42);
  std::vector<std::string> ab_features;
  abl_cmd->add_option("--train", ab_train, "training questions jsonl")->required();
  abl_cmd->add_option("--test", ab_test, "held-out questions jsonl")->required();
  auto* ab_hidden_opt = abl_cmd->add_option("--hidden", ab_hidden, "encoder hidden width per direction");
  auto* ab_attn_opt = abl_cmd->add_option("--attn", ab_attn, "attention width");
  auto* ab_maxout_opt = abl_cmd->add_option("--max-outputs", ab_max_outputs, "decode step cap");
  auto* ab_epochs_opt = abl_cmd->add_option("--epochs", ab_epochs, "max training epochs per run");
  auto* ab_topl_opt = abl_cmd->add_option("--top-l", ab_top_l, "search hits kept per ngram");
  auto* ab_lr_opt = abl_cmd->add_option("--lr", ab_lr, "adam learning rate");
  auto* ab_init_opt = abl_cmd->add_option("--init-scale", ab_init, "uniform init range");
  auto* ab_early_opt = abl_cmd->add_option("--early-stop-f1", ab_early, "stop once train f1 reaches this");
  auto* ab_seed_opt = abl_cmd->add_option("--seed", ab_seed, "rng seed shared by every run");
  auto* ab_feats_opt = abl_cmd
                           ->add_option("--features", ab_features,
                                        "feature groups to ablate (default: all of them)")
                           ->delimiter(',');

  // ---- gradcheck ----
  auto* gc_cmd = app.add_subcommand("gradcheck", "compare analytic gradients with finite differences");
  std::size_t gc_input = 12, gc_hidden = 8, gc_attn = 4, gc_cands = 6, gc_gold = 2;
  double gc_delta = 1e-4, gc_tol = 1e-3;
  std::uint64_t gc_seed = pnel::seed_from_env_or(42);
  auto* gc_input_opt = gc_cmd->add_option("--input-dim", gc_input, "feature width");
  auto* gc_hidden_opt = gc_cmd->add_option("--hidden", gc_hidden, "encoder hidden width per direction");
  auto* gc_attn_opt = gc_cmd->add_option("--attn", gc_attn, "attention width");
  auto* gc_cands_opt = gc_cmd->add_option("--cands", gc_cands, "candidates in the probe episode");
  auto* gc_gold_opt = gc_cmd->add_option("--gold", gc_gold, "gold pointers in the probe episode");
  auto* gc_delta_opt = gc_cmd->add_option("--delta", gc_delta, "finite-difference step");
  auto* gc_tol_opt = gc_cmd->add_option("--tolerance", gc_tol, "max relative error allowed");
  auto* gc_seed_opt = gc_cmd->add_option("--seed", gc_seed, "rng seed");

  // ---- profile ----
  auto* prof_cmd = app.add_subcommand("profile", "time end-to-end linking across search depths");
  ResFlags prof_res;
  prof_res.attach(prof_cmd);
  std::string pf_model, pf_data;
  std::vector<std::size_t> pf_top_ls{10, 20, 30, 40, 50};
  std::size_t pf_repeat = 1;
  prof_cmd->add_option("--model", pf_model, "checkpoint path")->required();
  prof_cmd->add_option("--data", pf_data, "questions jsonl")->required();
  auto* pf_topls_opt =
      prof_cmd->add_option("--top-l-list", pf_top_ls, "search depths to time")->delimiter(',');
  auto* pf_repeat_opt = prof_cmd->add_option("--repeat", pf_repeat, "passes over the questions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    json cfg = load_config(config_path);

    if (build_cmd->parsed()) {
      merge_cfg(cfg, "k1", bi_k1_opt, bi_k1);
      merge_cfg(cfg, "b", bi_b_opt, bi_b);
      auto store = pnel::kg::EntityStore::load_jsonl(bi_entities);
      auto index = pnel::kg::LabelIndex::build(store, {bi_k1, bi_b});
      index.save(bi_out);
      std::cout << json{{"documents", index.doc_count()}, {"avgdl", index.avgdl()}, {"path", bi_out}}
                << "\n";
      return 0;
    }

    if (train_cmd->parsed()) {
      merge_cfg(cfg, "hidden_dim", tr_hidden_opt, tr_hidden);
      merge_cfg(cfg, "attn_dim", tr_attn_opt, tr_attn);
      merge_cfg(cfg, "max_outputs", tr_maxout_opt, tr_max_outputs);
      merge_cfg(cfg, "epochs", tr_epochs_opt, tr_epochs);
      merge_cfg(cfg, "top_l", tr_topl_opt, tr_top_l);
      merge_cfg(cfg, "learning_rate", tr_lr_opt, tr_lr);
      merge_cfg(cfg, "init_scale", tr_init_opt, tr_init);
      merge_cfg(cfg, "early_stop_f1", tr_early_opt, tr_early);
      merge_cfg(cfg, "seed", tr_seed_opt, tr_seed);
      merge_cfg(cfg, "masks", tr_masks_opt, tr_masks);

      auto res = load_resources(train_res.entities, train_res.index, train_res.vectors, train_res.tags);
      auto data = pnel::eval::Dataset::load_jsonl(tr_data);

      pnel::pointer::PointerConfig mc;
      mc.input_dim = res.layout.dim();
      mc.hidden_dim = tr_hidden;
      mc.attn_dim = tr_attn;
      mc.max_outputs = tr_max_outputs;
      mc.learning_rate = tr_lr;
      mc.init_scale = tr_init;

      pnel::eval::TrainOptions opts;
      opts.max_epochs = tr_epochs;
      opts.early_stop_f1 = tr_early;
      opts.log = &std::cerr;

      auto run = run_training(res, data, mc, opts, parse_masks(tr_masks), tr_top_l, tr_seed);
      if (!run) {
        std::cerr << "error: no training episode has all its gold entities among the candidates\n";
        return kExitNoEpisodes;
      }
      run->model.save(tr_out);
      std::cerr << "episodes: " << run->used << " usable, " << run->skipped
                << " skipped (gold not in candidates)\n";

      if (tr_history.empty()) tr_history = tr_out + ".history.json";
      pnel::io::write_file(tr_history, json{{"epoch_loss", run->summary.epoch_loss},
                                            {"epochs", run->summary.epochs},
                                            {"train_f1", run->summary.train_f1},
                                            {"seed", tr_seed}}
                                           .dump(2) +
                                           "\n");
      std::cout << json{{"epochs", run->summary.epochs},
                        {"final_loss",
                         run->summary.epoch_loss.empty() ? 0.0 : run->summary.epoch_loss.back()},
                        {"train_f1", run->summary.train_f1},
                        {"episodes", run->used},
                        {"skipped", run->skipped},
                        {"path", tr_out},
                        {"history", tr_history}}
                << "\n";
      return 0;
    }

    if (link_cmd->parsed()) {
      merge_cfg(cfg, "top_l", lk_topl_opt, lk_top_l);
      if (lk_question.empty() == lk_input.empty())
        throw pnel::ConfigError("pass exactly one of --question and --input");

      auto res = load_resources(link_res.entities, link_res.index, link_res.vectors, link_res.tags);
      auto model = pnel::pointer::PointerModel::load(lk_model);
      check_model_fits(model, res.layout);
      pnel::featurizer::Featurizer fz(res.store, res.index, res.words, res.tagger, res.layout, lk_top_l);

      auto decode_one = [&](const pnel::featurizer::EpisodeInputs& ep) {
        auto pointed = model.decode(ep.features.data(), ep.candidates.size());
        std::vector<std::string> ids;
        for (std::size_t c : pointed) {
          const auto& cand = ep.candidates[c];
          if (std::find(ids.begin(), ids.end(), cand.entity_id) == ids.end())
            ids.push_back(cand.entity_id);
          if (lk_verbose)
            std::cerr << cand.entity_id << "  token=" << ep.tokens[cand.pivot].surface
                      << "  tile=\"" << tile_text_of(ep, cand) << "\"  rank=" << cand.rank << "\n";
        }
        return ids;
      };

      if (!lk_question.empty()) {
        auto ep = fz.build(lk_question);
        for (const std::string& id : decode_one(ep)) std::cout << id << "\n";
      } else {
        auto data = pnel::eval::Dataset::load_jsonl(lk_input);
        for (std::size_t i = 0; i < data.size(); ++i) {
          const auto& ex = data.at(i);
          auto ep = pnel::eval::featurize_example(fz, ex);
          std::cout << json{{"question", ex.question}, {"entities", decode_one(ep)}} << "\n";
        }
      }
      return 0;
    }

    if (eval_cmd->parsed()) {
      merge_cfg(cfg, "top_l", ev_topl_opt, ev_top_l);
      merge_cfg(cfg, "masks", ev_masks_opt, ev_masks);

      auto res = load_resources(eval_res.entities, eval_res.index, eval_res.vectors, eval_res.tags);
      auto model = pnel::pointer::PointerModel::load(ev_model);
      check_model_fits(model, res.layout);
      pnel::featurizer::Featurizer fz(res.store, res.index, res.words, res.tagger, res.layout, ev_top_l);
      fz.set_masks(parse_masks(ev_masks));

      auto data = pnel::eval::Dataset::load_jsonl(ev_data);
      auto r = pnel::eval::evaluate(model, fz, data);
      report_table(std::cerr, r);
      std::cout << report_json(r) << "\n";
      return 0;
    }

    if (abl_cmd->parsed()) {
      merge_cfg(cfg, "hidden_dim", ab_hidden_opt, ab_hidden);
      merge_cfg(cfg, "attn_dim", ab_attn_opt, ab_attn);
      merge_cfg(cfg, "max_outputs", ab_maxout_opt, ab_max_outputs);
      merge_cfg(cfg, "epochs", ab_epochs_opt, ab_epochs);
      merge_cfg(cfg, "top_l", ab_topl_opt, ab_top_l);
      merge_cfg(cfg, "learning_rate", ab_lr_opt, ab_lr);
      merge_cfg(cfg, "init_scale", ab_init_opt, ab_init);
      merge_cfg(cfg, "early_stop_f1", ab_early_opt, ab_early);
      merge_cfg(cfg, "seed", ab_seed_opt, ab_seed);
      merge_cfg(cfg, "features", ab_feats_opt, ab_features);

      auto res = load_resources(abl_res.entities, abl_res.index, abl_res.vectors, abl_res.tags);
      auto train_data = pnel::eval::Dataset::load_jsonl(ab_train);
      auto test_data = pnel::eval::Dataset::load_jsonl(ab_test);

      pnel::pointer::PointerConfig mc;
      mc.input_dim = res.layout.dim();
      mc.hidden_dim = ab_hidden;
      mc.attn_dim = ab_attn;
      mc.max_outputs = ab_max_outputs;
      mc.learning_rate = ab_lr;
      mc.init_scale = ab_init;

      pnel::eval::TrainOptions opts;
      opts.max_epochs = ab_epochs;
      opts.early_stop_f1 = ab_early;

      std::vector<std::string> runs{"none"};
      if (ab_features.empty()) {
        for (const auto& [name, f] : pnel::featurizer::kFeatureNames) runs.emplace_back(name);
      } else {
        for (const std::string& name : ab_features) runs.push_back(name);
      }

      json rows = json::array();
      for (const std::string& name : runs) {
        std::vector<std::string> mask_names;
        if (name != "none") mask_names.push_back(name);
        auto masks = parse_masks(mask_names);

        // Every run re-seeds identically, so the removed feature group is the
        // only difference between rows.
        auto run = run_training(res, train_data, mc, opts, masks, ab_top_l, ab_seed);
        if (!run) {
          std::cerr << "error: no usable training episodes (removed: " << name << ")\n";
          return kExitNoEpisodes;
        }

        pnel::featurizer::Featurizer fz(res.store, res.index, res.words, res.tagger, res.layout,
                                        ab_top_l);
        fz.set_masks(masks);
        auto r = pnel::eval::evaluate(run->model, fz, test_data);
        char line[160];
        std::snprintf(line, sizeof line, "removed %-18s  test_f1 %.4f  train_f1 %.4f  epochs %zu",
                      name.c_str(), r.macro.f1, run->summary.train_f1, run->summary.epochs);
        std::cerr << line << "\n";
        rows.push_back(json{{"removed", name},
                            {"test_f1", r.macro.f1},
                            {"test_precision", r.macro.precision},
                            {"test_recall", r.macro.recall},
                            {"test_micro_f1", r.micro.f1},
                            {"train_f1", run->summary.train_f1},
                            {"epochs", run->summary.epochs}});
      }
      std::cout << rows << "\n";
      return 0;
    }

    if (gc_cmd->parsed()) {
      merge_cfg(cfg, "input_dim", gc_input_opt, gc_input);
      merge_cfg(cfg, "hidden_dim", gc_hidden_opt, gc_hidden);
      merge_cfg(cfg, "attn_dim", gc_attn_opt, gc_attn);
      merge_cfg(cfg, "cands", gc_cands_opt, gc_cands);
      merge_cfg(cfg, "gold", gc_gold_opt, gc_gold);
      merge_cfg(cfg, "delta", gc_delta_opt, gc_delta);
      merge_cfg(cfg, "tolerance", gc_tol_opt, gc_tol);
      merge_cfg(cfg, "seed", gc_seed_opt, gc_seed);

      pnel::Rng rng(gc_seed);
      pnel::pointer::PointerConfig mc;
      mc.input_dim = gc_input;
      mc.hidden_dim = gc_hidden;
      mc.attn_dim = gc_attn;
      pnel::pointer::PointerModel model(mc, rng);

      std::vector<float> inputs(gc_cands * gc_input);
      for (float& v : inputs) v = static_cast<float>(rng.uniform(-1.0, 1.0));
      std::vector<std::size_t> all(gc_cands);
      for (std::size_t i = 0; i < gc_cands; ++i) all[i] = i;
      rng.shuffle(all);
      std::vector<std::size_t> gold(all.begin(), all.begin() + std::min(gc_gold, gc_cands));

      auto r = pnel::pointer::grad_check(model, inputs.data(), gc_cands, gold, gc_delta);
      std::cout << json{{"max_rel_err", r.max_rel_err},
                        {"worst_param", r.worst_param},
                        {"worst_index", r.worst_index},
                        {"checked", r.checked},
                        {"tolerance", gc_tol}}
                << "\n";
      if (r.max_rel_err >= gc_tol) {
        std::cerr << "gradcheck failed: " << r.max_rel_err << " >= " << gc_tol << " at "
                  << r.worst_param << "[" << r.worst_index << "]\n";
        return kExitGradCheck;
      }
      return 0;
    }

    if (prof_cmd->parsed()) {
      merge_cfg(cfg, "top_l_list", pf_topls_opt, pf_top_ls);
      merge_cfg(cfg, "repeat", pf_repeat_opt, pf_repeat);

      auto res = load_resources(prof_res.entities, prof_res.index, prof_res.vectors, prof_res.tags);
      auto model = pnel::pointer::PointerModel::load(pf_model);
      check_model_fits(model, res.layout);
      auto data = pnel::eval::Dataset::load_jsonl(pf_data);
      if (data.size() == 0) throw pnel::InputError(pf_data + ": no questions to profile");

      json rows = json::array();
      for (std::size_t top_l : pf_top_ls) {
        pnel::featurizer::Featurizer fz(res.store, res.index, res.words, res.tagger, res.layout, top_l);
        double f1_sum = 0.0;
        auto t0 = std::chrono::steady_clock::now();
        for (std::size_t pass = 0; pass < pf_repeat; ++pass) {
          for (std::size_t i = 0; i < data.size(); ++i) {
            const auto& ex = data.at(i);
            auto ep = pnel::eval::featurize_example(fz, ex);
            auto pointed = model.decode(ep.features.data(), ep.candidates.size());
            if (pass + 1 < pf_repeat) continue;
            std::vector<std::string> pred;
            for (std::size_t c : pointed) pred.push_back(ep.candidates[c].entity_id);
            f1_sum += pnel::eval::pair_metrics(ex.gold_ids, pred).f1;
          }
        }
        auto dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        double mean = dt / static_cast<double>(data.size() * pf_repeat);
        double f1 = f1_sum / static_cast<double>(data.size());
        std::cerr << "top_l " << top_l << ": mean " << mean << " s, f1 " << f1 << " over "
                  << data.size() * pf_repeat << " questions\n";
        rows.push_back(json{{"top_l", top_l},
                            {"mean_seconds", mean},
                            {"f1", f1},
                            {"questions", data.size() * pf_repeat}});
      }
      std::cout << rows << "\n";
      return 0;
    }
  } catch (const pnel::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
