// Runs the nine acceptance checks end to end and prints one verdict line per
// criterion. A criterion fails on substance or on blowing its wall-clock
// budget; the exit code is nonzero when anything failed. Criteria 6 and 7
// share one trained baseline, so they must run in order.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "oracles.hpp"
#include "pnel/common.hpp"
#include "pnel/embeddings.hpp"
#include "pnel/eval.hpp"
#include "pnel/featurizer.hpp"
#include "pnel/fuzzy.hpp"
#include "pnel/kg.hpp"
#include "pnel/pointer_net.hpp"
#include "pnel/textproc.hpp"
#include "test_util.hpp"

namespace {

using namespace pnel;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, ...) {
  char buf[1024];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

Outcome pass(std::string d) { return {true, std::move(d)}; }
Outcome fail(std::string d) { return {false, std::move(d)}; }

// ---------------------------------------------------------------------------
// Generated label corpus shared by criteria 1 and 8: 35 single-word labels
// plus every ordered word pair, so each word appears in 69 labels and every
// ngram tile of an all-pool question can fill its full search depth.

const std::vector<std::string>& pool() {
  static const std::vector<std::string> words = {
      "alder",  "basil",  "cedar",  "dahlia",   "ember",  "fennel", "garnet",
      "hazel",  "iris",   "juniper", "kestrel", "laurel", "maple",  "nettle",
      "ochre",  "poplar", "quartz",  "rowan",   "sorrel", "tamarind", "umber",
      "violet", "walnut", "xenon",   "yarrow",  "zinnia", "amber",  "birch",
      "clover", "damson", "elder",   "fig",     "ginger", "holly",  "ivy"};
  return words;
}

struct ProfileWorld {
  TempDir td;
  kg::EntityStore store;
  kg::LabelIndex index;
  embeddings::VectorTable words;
  textproc::Tagger tagger{textproc::TagSet::builtin()};

  ProfileWorld() {
    const auto& w = pool();
    std::string ents;
    std::size_t n = 0;
    auto add = [&](const std::string& label) {
      ents += fmt("{\"id\": \"E%04zu\", \"label\": \"%s\"}\n", n++, label.c_str());
    };
    for (const auto& a : w) add(a);
    for (const auto& a : w)
      for (const auto& b : w)
        if (&a != &b) add(a + " " + b);
    std::string vecs = fmt("%zu 300\n", w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
      vecs += w[i];
      for (std::size_t d = 0; d < 300; ++d)
        vecs += fmt(" %.3f", 0.01 * static_cast<double>((i * 131 + d * 7) % 100) - 0.5);
      vecs += '\n';
    }
    store = kg::EntityStore::load_jsonl(td.file("entities.jsonl", ents));
    index = kg::LabelIndex::build(store);
    words = embeddings::VectorTable::load(td.file("vectors.txt", vecs));
  }
};

// --------------------------------------------------------------------------
// 1. Feature geometry: default layout is 1142 wide with the documented spans,
// and an eight-token question over the generated corpus yields exactly
// 28 tiles x 50 hits = 1400 candidates.

Outcome c1_feature_geometry() {
  featurizer::FeatureLayout layout;
  if (layout.dim() != 1142) return fail(fmt("layout dim %zu, want 1142", layout.dim()));
  if (layout.pos_off() != 3 || layout.ent_off() != 39 || layout.sent_off() != 239 ||
      layout.word_off() != 539 || layout.desc_off() != 839 || layout.match_off() != 1139)
    return fail("span offsets do not match the documented layout");

  std::vector<int> cover(layout.dim(), 0);
  for (const auto& [name, feat] : featurizer::kFeatureNames) {
    auto [off, len] = featurizer::feature_span(layout, feat);
    for (std::size_t k = 0; k < len; ++k) cover.at(off + k)++;
  }
  for (std::size_t i = 0; i < cover.size(); ++i) {
    const int want = i == layout.pivot_off() ? 0 : 1;
    if (cover[i] != want) return fail(fmt("column %zu covered %d times, want %d", i, cover[i], want));
  }

  ProfileWorld w;
  featurizer::Featurizer fz(w.store, w.index, w.words, w.tagger, layout, /*top_l=*/50);
  auto ep = fz.build("alder basil cedar dahlia ember fennel garnet hazel");
  if (ep.candidates.size() != 1400)
    return fail(fmt("%zu candidates, want 1400", ep.candidates.size()));
  if (ep.features.size() != 1400 * layout.dim())
    return fail(fmt("feature buffer %zu floats, want %zu", ep.features.size(), 1400 * layout.dim()));
  if (ep.truncated) return fail("candidate list reported truncated");

  // 28 tile groups of exactly 50, ranks counting 1..50 inside each.
  std::map<std::pair<std::size_t, int>, std::size_t> per_tile;
  for (const auto& c : ep.candidates) {
    auto& cnt = per_tile[{c.pivot, c.tile_kind}];
    if (c.rank != ++cnt) return fail(fmt("rank %zu out of order in tile (%zu,%d)", c.rank, c.pivot, c.tile_kind));
  }
  if (per_tile.size() != 28) return fail(fmt("%zu tile groups, want 28", per_tile.size()));
  for (const auto& [key, cnt] : per_tile)
    if (cnt != 50) return fail(fmt("tile (%zu,%d) produced %zu candidates, want 50", key.first, key.second, cnt));
  return pass("1400 candidates of width 1142, 28 full tiles");
}

// ---------------------------------------------------------------------------
// 2. Match ratios against the edit-distance oracle on random strings.

Outcome c2_match_ratios() {
  Rng rng(202);
  const char alpha[] = "abcde ";
  auto make = [&] {
    std::string s;
    const std::size_t len = rng.index(21);
    for (std::size_t i = 0; i < len; ++i) s += alpha[rng.index(6)];
    return s;
  };

  for (int round = 0; round < 1000; ++round) {
    const std::string a = make(), b = make();
    const int simple = fuzzy::simple_ratio(a, b);
    const int partial = fuzzy::partial_ratio(a, b);
    const int tsort = fuzzy::token_sort_ratio(a, b);
    if (simple != oracle::simple_ratio(a, b) || partial != oracle::partial_ratio(a, b) ||
        tsort != oracle::token_sort_ratio(a, b))
      return fail(fmt("mismatch on pair %d: \"%s\" vs \"%s\"", round, a.c_str(), b.c_str()));
  }

  const char* perfect[][2] = {{"acme", "acme"}, {"deep blue", "deep blue"}, {"a b c", "a b c"}};
  for (const auto& p : perfect) {
    auto t = fuzzy::match_triple(p[0], p[1]);
    if (t.simple != 100 || t.partial != 100 || t.token_sort != 100)
      return fail(fmt("perfect pair \"%s\" scored %d/%d/%d", p[0], t.simple, t.partial, t.token_sort));
  }
  return pass("1000 random pairs agree with the oracle; perfect matches score 100");
}

// ---------------------------------------------------------------------------
// 3. Label ranking against a brute-force scorer on a 1000-document corpus.
// This scorer caches document frequencies per query, unlike the quadratic
// oracle the unit tests use, but still works straight from the formula.

struct BruteHit {
  std::string id;
  double score = 0.0;
};

std::vector<BruteHit> brute_bm25(const std::vector<std::vector<std::string>>& docs,
                                 const std::vector<std::string>& ids,
                                 const std::vector<std::string>& terms, double k1, double b,
                                 std::size_t top_k) {
  double total_len = 0.0;
  for (const auto& d : docs) total_len += static_cast<double>(d.size());
  const double avgdl = docs.empty() ? 0.0 : total_len / static_cast<double>(docs.size());

  std::map<std::string, double> df;
  for (const auto& t : terms) {
    if (df.count(t)) continue;
    std::size_t n = 0;
    for (const auto& d : docs) n += std::count(d.begin(), d.end(), t) > 0 ? 1 : 0;
    df[t] = static_cast<double>(n);
  }

  std::vector<BruteHit> hits;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    double score = 0.0;
    bool matched = false;
    for (const auto& t : terms) {
      const double tf = static_cast<double>(std::count(docs[i].begin(), docs[i].end(), t));
      if (tf == 0.0) continue;
      matched = true;
      const double idf =
          std::log((static_cast<double>(docs.size()) - df[t] + 0.5) / (df[t] + 0.5) + 1.0);
      const double norm = k1 * (1.0 - b + b * static_cast<double>(docs[i].size()) / avgdl);
      score += idf * tf * (k1 + 1.0) / (tf + norm);
    }
    if (matched) hits.push_back({ids[i], score});
  }
  std::sort(hits.begin(), hits.end(), [](const BruteHit& x, const BruteHit& y) {
    if (x.score != y.score) return x.score > y.score;
    return x.id < y.id;
  });
  if (hits.size() > top_k) hits.resize(top_k);
  return hits;
}

Outcome c3_ranking_oracle() {
  Rng rng(303);
  const char* syl[] = {"ba", "be", "bi", "bo", "bu", "da", "de", "di", "do", "du",
                       "ka", "ke", "ki", "ko", "ku", "ma", "me", "mi", "mo", "mu"};
  std::vector<std::string> vocab;
  for (int i = 0; i < 80; ++i) vocab.push_back(std::string(syl[i % 20]) + syl[i / 20]);

  std::vector<std::vector<std::string>> docs;
  std::vector<std::string> ids;
  std::string ents;
  for (int i = 0; i < 1000; ++i) {
    std::vector<std::string> d;
    const std::size_t len = 1 + rng.index(6);
    for (std::size_t k = 0; k < len; ++k) d.push_back(vocab[rng.index(vocab.size())]);
    std::string label = d[0];
    for (std::size_t k = 1; k < d.size(); ++k) label += " " + d[k];
    ids.push_back(fmt("D%04d", i));
    ents += fmt("{\"id\": \"%s\", \"label\": \"%s\"}\n", ids.back().c_str(), label.c_str());
    docs.push_back(std::move(d));
  }
  TempDir td;
  auto store = kg::EntityStore::load_jsonl(td.file("entities.jsonl", ents));
  auto index = kg::LabelIndex::build(store);

  double max_diff = 0.0;
  for (int q = 0; q < 100; ++q) {
    std::vector<std::string> terms;
    const std::size_t n_terms = 1 + rng.index(4);
    for (std::size_t k = 0; k < n_terms; ++k) terms.push_back(vocab[rng.index(vocab.size())]);
    std::string query = terms[0];
    for (std::size_t k = 1; k < terms.size(); ++k) query += " " + terms[k];
    const std::size_t top_k = 1 + rng.index(1200);

    auto got = index.search(query, top_k);
    auto want = brute_bm25(docs, ids, terms, index.params().k1, index.params().b, top_k);
    if (got.size() != want.size())
      return fail(fmt("query %d: %zu hits, oracle %zu", q, got.size(), want.size()));
    for (std::size_t i = 0; i < got.size(); ++i) {
      if (index.doc_id(got[i].doc) != want[i].id)
        return fail(fmt("query %d rank %zu: %s, oracle %s", q, i,
                        index.doc_id(got[i].doc).c_str(), want[i].id.c_str()));
      max_diff = std::max(max_diff, std::abs(got[i].score - want[i].score));
    }
  }
  if (max_diff > 1e-9) return fail(fmt("max score difference %.3g exceeds 1e-9", max_diff));
  return pass(fmt("100 queries over 1000 docs; max score difference %.2g", max_diff));
}

// ---------------------------------------------------------------------------
// 4. Gradient check on a small model, plus proof the checker catches a
// corrupted gradient.

Outcome c4_grad_check() {
  Rng rng(404);
  pointer::PointerConfig cfg;
  cfg.input_dim = 12;
  cfg.hidden_dim = 8;
  cfg.attn_dim = 4;
  cfg.max_input = 64;
  pointer::PointerModel model(cfg, rng);

  std::vector<float> x(6 * cfg.input_dim);
  for (auto& v : x) v = static_cast<float>(rng.uniform(-1.0, 1.0));
  const std::vector<std::size_t> gold = {4, 1};

  auto res = pointer::grad_check(model, x.data(), 6, gold);
  if (!(res.max_rel_err < 1e-3))
    return fail(fmt("max rel err %.3g at %s[%zu], want < 1e-3", res.max_rel_err,
                    res.worst_param.c_str(), res.worst_index));

  // Corrupt one analytic gradient by a constant and recheck that weight by
  // hand; the error must be flagrant.
  pointer::PointerModel::Grads g;
  model.gradients(x.data(), 6, gold, g);
  const double ana = g[pointer::PointerModel::kAttnW2][0] + 0.2;

  auto& t = model.param(pointer::PointerModel::kAttnW2);
  const float orig = t.w[0];
  const double step = std::max(1e-4, std::abs(static_cast<double>(orig)) * 1e-4);
  t.w[0] = static_cast<float>(static_cast<double>(orig) + step);
  const double hi = model.loss(x.data(), 6, gold);
  const float w_hi = t.w[0];
  t.w[0] = static_cast<float>(static_cast<double>(orig) - step);
  const double lo = model.loss(x.data(), 6, gold);
  const float w_lo = t.w[0];
  t.w[0] = orig;
  const double num = (hi - lo) / (static_cast<double>(w_hi) - static_cast<double>(w_lo));
  const double err = std::abs(num - ana) / std::max(1e-8, std::abs(num) + std::abs(ana));
  if (!(err > 1e-1)) return fail(fmt("corrupted gradient only reached rel err %.3g", err));

  return pass(fmt("max rel err %.2g (%zu params); corrupted gradient flagged at %.2g",
                  res.max_rel_err, res.checked, err));
}

// ---------------------------------------------------------------------------
// 5. Synthetic pointer task: sequences of 20 random vectors where exactly
// three carry a marker in component 0; the model must point at the marked
// positions.

double f1_sets(const std::vector<std::size_t>& pred, const std::vector<std::size_t>& gold) {
  std::set<std::size_t> p(pred.begin(), pred.end()), g(gold.begin(), gold.end());
  if (p.empty() && g.empty()) return 1.0;
  if (p.empty() || g.empty()) return 0.0;
  std::size_t inter = 0;
  for (auto v : p) inter += g.count(v);
  const double prec = static_cast<double>(inter) / static_cast<double>(p.size());
  const double rec = static_cast<double>(inter) / static_cast<double>(g.size());
  return prec + rec == 0.0 ? 0.0 : 2.0 * prec * rec / (prec + rec);
}

Outcome c5_synthetic_pointer() {
  const std::size_t dim = 1142, seq = 20, marks = 3;
  Rng data_rng(505);

  struct Sample {
    std::vector<float> x;
    std::vector<std::size_t> gold;
  };
  auto make = [&] {
    Sample s;
    s.x.resize(seq * dim);
    for (auto& v : s.x) v = static_cast<float>(0.25 * data_rng.uniform01());
    std::vector<std::size_t> order(seq);
    for (std::size_t i = 0; i < seq; ++i) order[i] = i;
    data_rng.shuffle(order);
    s.gold.assign(order.begin(), order.begin() + marks);
    std::sort(s.gold.begin(), s.gold.end());
    for (auto p : s.gold) s.x[p * dim] = 5.0f;
    return s;
  };
  std::vector<Sample> train, test;
  for (int i = 0; i < 200; ++i) train.push_back(make());
  for (int i = 0; i < 50; ++i) test.push_back(make());

  pointer::PointerConfig cfg;
  cfg.input_dim = dim;
  cfg.hidden_dim = 32;
  cfg.attn_dim = 16;
  cfg.learning_rate = 0.003;
  cfg.init_scale = 0.3;
  Rng init(506);
  pointer::PointerModel model(cfg, init);
  Rng order_rng(507);

  std::vector<std::size_t> perm(train.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;

  std::size_t epochs = 0;
  double train_f1 = 0.0;
  for (; epochs < 200;) {
    if (epochs > 0 && epochs % 12 == 0)
      model.set_learning_rate(std::max(model.config().learning_rate * 0.5, 2e-4));
    order_rng.shuffle(perm);
    for (auto i : perm) model.train_step(train[i].x.data(), seq, train[i].gold);
    ++epochs;
    double sum = 0.0;
    for (const auto& s : train) sum += f1_sets(model.decode(s.x.data(), seq), s.gold);
    train_f1 = sum / static_cast<double>(train.size());
    if (train_f1 >= 1.0) break;
  }

  double held = 0.0;
  for (const auto& s : test) held += f1_sets(model.decode(s.x.data(), seq), s.gold);
  held /= static_cast<double>(test.size());

  if (held < 0.99)
    return fail(fmt("held-out F1 %.4f after %zu epochs (train %.4f), want >= 0.99", held, epochs,
                    train_f1));
  return pass(fmt("held-out F1 %.4f after %zu epochs (train %.4f)", held, epochs, train_f1));
}

// ---------------------------------------------------------------------------
// 6 & 7. The committed toy knowledge graph: end-to-end linking quality, then
// leave-one-feature-out retraining. The baseline model is shared.

constexpr uint64_t kToyInitSeed = 611;
constexpr uint64_t kToyTrainSeed = 612;

pointer::PointerConfig toy_cfg() {
  pointer::PointerConfig cfg;
  cfg.hidden_dim = 32;
  cfg.attn_dim = 16;
  cfg.learning_rate = 0.003;
  cfg.init_scale = 0.3;
  return cfg;
}

eval::TrainOptions toy_opts() {
  eval::TrainOptions opts;
  opts.max_epochs = 50;
  opts.early_stop_f1 = 0.95;
  return opts;
}

struct ToyWorld {
  kg::EntityStore store;
  kg::LabelIndex index;
  embeddings::VectorTable words;
  textproc::Tagger tagger{textproc::TagSet::builtin()};
  std::optional<eval::Dataset> train_data, test_data;
  double base_test_f1 = 0.0;
  bool ready = false;
};
ToyWorld g_toy;

Outcome c6_toy_linking() {
  const std::string dir = PNEL_FIXTURE_DIR;
  g_toy.store = kg::EntityStore::load_jsonl(dir + "/entities.jsonl");
  g_toy.index = kg::LabelIndex::build(g_toy.store);
  g_toy.words = embeddings::VectorTable::load(dir + "/vectors.txt");
  g_toy.train_data = eval::Dataset::load_jsonl(dir + "/train.jsonl");
  g_toy.test_data = eval::Dataset::load_jsonl(dir + "/test.jsonl");

  featurizer::Featurizer fz(g_toy.store, g_toy.index, g_toy.words, g_toy.tagger, {}, /*top_l=*/50);
  std::size_t skipped = 0;
  auto episodes = eval::prepare_episodes(fz, *g_toy.train_data, &skipped);
  if (skipped != 0) return fail(fmt("%zu training questions lost their gold entities", skipped));

  Rng init(kToyInitSeed);
  pointer::PointerModel model(toy_cfg(), init);
  Rng train_rng(kToyTrainSeed);
  auto summary = eval::train(model, episodes, toy_opts(), train_rng);

  auto train_report = eval::evaluate(model, fz, *g_toy.train_data);
  auto test_report = eval::evaluate(model, fz, *g_toy.test_data);

  if (train_report.candidate_recall != 1.0 || test_report.candidate_recall != 1.0)
    return fail(fmt("candidate recall %.3f train / %.3f test, want 1.0",
                    train_report.candidate_recall, test_report.candidate_recall));
  if (train_report.macro.f1 < 0.9)
    return fail(fmt("train macro F1 %.3f after %zu epochs, want >= 0.9", train_report.macro.f1,
                    summary.epochs));
  if (test_report.macro.f1 < 0.6)
    return fail(fmt("held-out macro F1 %.3f, want >= 0.6", test_report.macro.f1));

  g_toy.base_test_f1 = test_report.macro.f1;
  g_toy.ready = true;
  return pass(fmt("recall 1.0, train F1 %.3f in %zu epochs, held-out F1 %.3f",
                  train_report.macro.f1, summary.epochs, test_report.macro.f1));
}

Outcome c7_ablation() {
  if (!g_toy.ready) return fail("needs the baseline trained in criterion 6");

  double transe_drop = 0.0, runner_up = -1e9;
  std::string runner_name;
  for (const auto& [name, feat] : featurizer::kFeatureNames) {
    featurizer::Featurizer fz(g_toy.store, g_toy.index, g_toy.words, g_toy.tagger, {}, 50);
    fz.set_masks({feat});
    std::size_t skipped = 0;
    auto episodes = eval::prepare_episodes(fz, *g_toy.train_data, &skipped);
    Rng init(kToyInitSeed);
    pointer::PointerModel model(toy_cfg(), init);
    Rng train_rng(kToyTrainSeed);
    eval::train(model, episodes, toy_opts(), train_rng);
    const auto report = eval::evaluate(model, fz, *g_toy.test_data);
    const double drop = g_toy.base_test_f1 - report.macro.f1;
    if (feat == featurizer::Feature::TransE) {
      transe_drop = drop;
    } else if (drop > runner_up) {
      runner_up = drop;
      runner_name = std::string(name);
    }
  }
  if (!(transe_drop > runner_up))
    return fail(fmt("transe drop %.3f not above %s drop %.3f", transe_drop, runner_name.c_str(),
                    runner_up));
  return pass(fmt("transe drop %.3f; next largest %s at %.3f", transe_drop, runner_name.c_str(),
                  runner_up));
}

// ---------------------------------------------------------------------------
// 8. Mean link time grows (within noise) with the per-tile search depth.

Outcome c8_depth_profile() {
  ProfileWorld w;
  pointer::PointerConfig cfg;
  cfg.hidden_dim = 16;
  cfg.attn_dim = 8;
  Rng init(808);
  pointer::PointerModel model(cfg, init);

  Rng qr(809);
  std::vector<std::string> questions;
  for (int i = 0; i < 20; ++i) {
    std::string q = pool()[qr.index(pool().size())];
    for (int k = 1; k < 8; ++k) q += " " + pool()[qr.index(pool().size())];
    questions.push_back(q);
  }

  const std::size_t depths[] = {10, 20, 30, 40, 50};
  std::vector<double> means;
  for (auto depth : depths) {
    featurizer::Featurizer fz(w.store, w.index, w.words, w.tagger, {}, depth);
    eval::link(model, fz, questions[0]);  // warm up
    auto t0 = Clock::now();
    for (const auto& q : questions) eval::link(model, fz, q);
    means.push_back(seconds_since(t0) / static_cast<double>(questions.size()));
  }

  std::string curve;
  for (auto m : means) curve += fmt(" %.0f", m * 1e3);
  for (std::size_t i = 1; i < means.size(); ++i)
    if (means[i] < means[i - 1] * 0.9)
      return fail(fmt("mean link ms per depth:%s; dropped more than 10%% at depth %zu",
                      curve.c_str(), depths[i]));
  return pass(fmt("mean link ms per depth 10..50:%s", curve.c_str()));
}

// ---------------------------------------------------------------------------
// 9. Determinism: equal seeds give bit-equal loss histories, checkpoints
// round-trip to identical behavior, and index rebuilds are byte-identical.

Outcome c9_determinism() {
  TempDir td;
  const std::string ents =
      "{\"id\": \"Q1\", \"label\": \"Acme\", \"description\": \"makes widgets\", "
      "\"embedding\": [1, 0, 0, 0]}\n"
      "{\"id\": \"Q2\", \"label\": \"Acme Corp\", \"embedding\": [0, 1, 0, 0]}\n"
      "{\"id\": \"Q3\", \"label\": \"Founded\", \"embedding\": [0, 0, 1, 0]}\n";
  const std::string vecs =
      "5 5\nwho 1 0 0 0 0\nfounded 0 1 0 0 0\nacme 0 0 1 0 0\nwidgets 0 0 0 1 0\n"
      "makes 0 0 0 0 1\n";
  const std::string data =
      "{\"question\": \"Who founded Acme?\", \"entities\": [\"Q1\"]}\n"
      "{\"question\": \"Acme makes widgets\", \"entities\": [\"Q1\"]}\n";

  auto store = kg::EntityStore::load_jsonl(td.file("entities.jsonl", ents));
  auto index = kg::LabelIndex::build(store);
  auto words = embeddings::VectorTable::load(td.file("vectors.txt", vecs));
  textproc::Tagger tagger{textproc::TagSet::builtin()};
  auto dataset = eval::Dataset::load_jsonl(td.file("train.jsonl", data));

  featurizer::FeatureLayout layout;
  layout.ent_dim = 4;
  layout.wv_dim = 5;
  featurizer::Featurizer fz(store, index, words, tagger, layout, 2);
  std::size_t skipped = 0;
  auto episodes = eval::prepare_episodes(fz, dataset, &skipped);
  if (skipped != 0 || episodes.empty()) return fail("toy episodes did not prepare");

  pointer::PointerConfig cfg;
  cfg.input_dim = layout.dim();
  cfg.hidden_dim = 8;
  cfg.attn_dim = 4;
  cfg.learning_rate = 0.01;
  eval::TrainOptions opts;
  opts.max_epochs = 6;
  opts.early_stop_f1 = 0.0;

  auto run = [&](uint64_t seed) {
    Rng init(seed);
    pointer::PointerModel model(cfg, init);
    Rng train_rng(seed + 1);
    auto summary = eval::train(model, episodes, opts, train_rng);
    return std::make_pair(std::move(model), std::move(summary));
  };
  auto [model_a, sum_a] = run(909);
  auto [model_b, sum_b] = run(909);
  if (sum_a.epoch_loss.size() != sum_b.epoch_loss.size() ||
      std::memcmp(sum_a.epoch_loss.data(), sum_b.epoch_loss.data(),
                  sum_a.epoch_loss.size() * sizeof(double)) != 0)
    return fail("equal seeds diverged in their loss histories");

  model_a.save(td.at("model.ck"));
  auto loaded = pointer::PointerModel::load(td.at("model.ck"));
  for (const auto& ep : episodes) {
    const auto n = ep.inputs.candidates.size();
    if (loaded.decode(ep.inputs.features.data(), n) != model_a.decode(ep.inputs.features.data(), n))
      return fail("loaded checkpoint decodes differently");
    if (loaded.loss(ep.inputs.features.data(), n, ep.gold_rows) !=
        model_a.loss(ep.inputs.features.data(), n, ep.gold_rows))
      return fail("loaded checkpoint scores differently");
  }

  index.save(td.at("a.idx"));
  kg::LabelIndex::build(store).save(td.at("b.idx"));
  kg::LabelIndex::load(td.at("a.idx")).save(td.at("c.idx"));
  const auto bytes = io::read_file(td.at("a.idx"));
  if (bytes != io::read_file(td.at("b.idx"))) return fail("index rebuild changed the file bytes");
  if (bytes != io::read_file(td.at("c.idx"))) return fail("index save-of-load changed the file bytes");

  return pass(fmt("%zu-epoch histories bit-equal; checkpoint and index round-trips exact",
                  sum_a.epoch_loss.size()));
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> fn;
  };
  const Criterion criteria[] = {
      {1, "candidate geometry", 1.0, c1_feature_geometry},
      {2, "match ratios vs oracle", 5.0, c2_match_ratios},
      {3, "ranking vs brute force", 10.0, c3_ranking_oracle},
      {4, "gradient check", 30.0, c4_grad_check},
      {5, "synthetic pointer task", 300.0, c5_synthetic_pointer},
      {6, "toy linking end to end", 600.0, c6_toy_linking},
      {7, "feature ablation", 3600.0, c7_ablation},
      {8, "link time vs search depth", 300.0, c8_depth_profile},
      {9, "determinism and round-trips", 60.0, c9_determinism},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o = fail(std::string("exception: ") + e.what());
    }
    const double dt = seconds_since(t0);
    const bool in_budget = dt <= c.budget_s;
    const bool passed = o.pass && in_budget;
    std::printf("[%s] criterion %d: %s - %s%s (%.2fs, budget %.0fs)\n", passed ? "PASS" : "FAIL",
                c.id, c.name, o.detail.c_str(), o.pass && !in_budget ? "; over budget" : "", dt,
                c.budget_s);
    std::fflush(stdout);
    if (!passed) ++failures;
  }
  std::printf("acceptance: %d of 9 criteria passed\n", 9 - failures);
  return failures == 0 ? 0 : 1;
}
