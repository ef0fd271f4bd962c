// medtok: command-line front end for every pipeline stage.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "medtok/corpus.hpp"
#include "medtok/deid.hpp"
#include "medtok/error.hpp"
#include "medtok/parallel.hpp"
#include "medtok/record.hpp"
#include "medtok/synth.hpp"
#include "medtok/timeline.hpp"
#include "medtok/tok_eval.hpp"
#include "medtok/tokenizer.hpp"
#include "medtok/trc.hpp"
#include "medtok/vocab_adapt.hpp"
#include "medtok/vocabulary.hpp"
#include "medtok/wordpiece_trainer.hpp"

namespace fs = std::filesystem;
using namespace medtok;

namespace {

constexpr const char* kVersion = "medtok 1.0.0 (vocab medtok-vocab/1, records jsonl/1, embeddings text/1)";

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  return out;
}

/// Resolved options of the command that ran, as one JSON line on stderr.
void echo_config(const CLI::App& cmd, std::size_t threads) {
  ordered_json j;
  std::string name;
  for (const CLI::App* a = &cmd; a && a->get_parent(); a = a->get_parent()) {
    name = name.empty() ? a->get_name() : a->get_name() + " " + name;
  }
  j["command"] = name;
  j["threads"] = threads;
  for (const CLI::Option* opt : cmd.get_options()) {
    if (opt->get_name() == "--help" || opt->get_name() == "-h") continue;
    const std::string key = opt->get_lnames().empty() ? opt->get_name() : opt->get_lnames().front();
    if (opt->get_type_size_max() == 0 || opt->get_expected_max() == 0) {
      j[key] = opt->count() > 0;
      continue;
    }
    const auto& results = opt->results();
    if (results.empty()) {
      if (!opt->get_default_str().empty()) j[key] = opt->get_default_str();
      continue;
    }
    j[key] = results.size() == 1 ? ordered_json(results.front()) : ordered_json(results);
  }
  std::cerr << dump_line(j) << '\n';
}

std::vector<Record> load_records(const std::string& path, bool dedup = false) {
  return corpus::ingest(fs::path(path), dedup).records;
}

// ---------------------------------------------------------------------------

struct Options {
  std::size_t threads = 0;

  // shared
  std::string in, out, vocab, log, terms, spans, events;
  std::optional<std::uint64_t> seed;
  bool dedup = false;
  std::size_t n = 0;

  // tok
  std::size_t vocab_size = 0;
  std::uint64_t min_freq = 1;
  std::string mode = "greedy";
  std::vector<std::string> texts;

  // adapt
  std::string method, base, eval_in, trace, base_emb, old_vocab, new_vocab;
  double delta = 0.1;
  std::size_t step = 1000, domain_size = 10000, max_steps = 64;

  // eval
  std::vector<std::string> vocabs;
  std::vector<std::uint64_t> seeds;

  // deid
  std::string manifest, institutions;

  // trc
  double test_frac = 0.0;
  std::string train, test, strategy = "majority", pred;
  bool repair = false, gold = false, keep_invalid = false;

  // synth
  bool no_pii = false;
  std::size_t dim = 0;
};

// ---------------------------------------------------------------------------
// corpus

int cmd_corpus_stats(const Options& o) {
  const auto result = corpus::ingest(fs::path(o.in), o.dedup);
  auto j = corpus::to_json(corpus::stats(result.records));
  if (o.dedup) j["skipped_duplicates"] = result.skipped_duplicates;
  std::cout << dump_line(j) << '\n';
  return 0;
}

int cmd_corpus_sample(const Options& o) {
  const auto records = load_records(o.in, o.dedup);
  const auto drawn = corpus::sample(records, o.n, *o.seed);
  corpus::write_records(fs::path(o.out), drawn);
  return 0;
}

// ---------------------------------------------------------------------------
// tok

int cmd_tok_train(const Options& o) {
  const auto records = load_records(o.in);
  const auto vocab = tok::train_wordpiece(records, o.vocab_size, o.min_freq);
  write_vocabulary(vocab, o.out);
  std::cerr << "vocabulary size " << vocab.size() << '\n';
  return 0;
}

ordered_json segmentation_json(const tok::TokenSequence& seq, const std::string& word) {
  ordered_json j;
  j["word"] = word;
  j["tokens"] = seq.tokens;
  ordered_json offsets = ordered_json::array();
  for (const auto& [s, e] : seq.offsets) offsets.push_back({s, e});
  j["offsets"] = std::move(offsets);
  return j;
}

int cmd_tok_segment(const Options& o) {
  if (o.texts.empty() && o.in.empty()) throw ValidationError("tok segment needs --text or --in");
  const auto vocab = read_vocabulary(o.vocab);
  const auto mode = tok::parse_mode(o.mode);
  std::ofstream file;
  if (!o.out.empty()) file = open_out(o.out);
  std::ostream& out = o.out.empty() ? std::cout : file;
  for (const auto& text : o.texts) {
    for (const auto& word : tok::pretokenize(text)) {
      out << dump_line(segmentation_json(tok::segment(word, vocab, mode), word)) << '\n';
    }
  }
  if (!o.in.empty()) {
    const auto records = load_records(o.in);
    std::vector<std::string> lines(records.size());
    parallel_for(records.size(), o.threads, [&](std::size_t i) {
      ordered_json j;
      j["id"] = records[i].id;
      j["tokens"] = tok::tokenize(records[i].text, vocab, mode);
      lines[i] = dump_line(j);
    });
    for (const auto& l : lines) out << l << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------------------
// adapt

int cmd_adapt(const Options& o) {
  if (o.method.empty() || o.base.empty() || o.in.empty() || o.out.empty()) {
    throw ValidationError("adapt needs --method, --base, --in and --out");
  }
  adapt::AdaptConfig cfg;
  cfg.method = adapt::parse_method(o.method);
  cfg.delta = o.delta;
  cfg.step = o.step;
  cfg.domain_vocab_size = o.domain_size;
  cfg.max_steps = o.max_steps;
  cfg.min_frequency = o.min_freq;
  const auto base = read_vocabulary(o.base);
  const auto records = load_records(o.in);
  adapt::AdaptResult result = [&] {
    if (cfg.method == adapt::Method::simple) return adapt::adapt_simple(base, records, cfg);
    const auto eval_records = o.eval_in.empty() ? records : load_records(o.eval_in);
    return adapt::adapt_adalm(base, records, eval_records, cfg, o.threads);
  }();
  write_vocabulary(result.vocab, o.out);
  if (!o.trace.empty()) open_out(o.trace) << adapt::to_json(result.trace).dump(2) << '\n';
  std::cerr << "added " << result.trace.added_tokens.size() << " tokens, vocabulary size " << result.vocab.size()
            << '\n';
  return 0;
}

int cmd_adapt_init_emb(const Options& o) {
  const auto table = adapt::read_embeddings(o.base_emb);
  const auto old_vocab = read_vocabulary(o.old_vocab);
  const auto new_vocab = read_vocabulary(o.new_vocab);
  const auto out = adapt::init_embeddings(table, old_vocab, new_vocab, o.threads);
  adapt::write_embeddings(out, new_vocab, o.out);
  return 0;
}

// ---------------------------------------------------------------------------
// eval

int cmd_eval(const Options& o) {
  const auto mode = tok::parse_mode(o.mode);
  const auto records = load_records(o.in);
  if (o.seeds.empty() && o.n != 0) throw ValidationError("--n needs --seeds");
  std::vector<std::pair<std::string, eval::TokenizerReport>> reports;
  for (const auto& path : o.vocabs) {
    const auto vocab = read_vocabulary(path);
    auto report = o.seeds.empty()
                      ? eval::evaluate(vocab, records, mode, o.threads)
                      : eval::evaluate_multiseed(vocab, records, o.n == 0 ? records.size() : o.n, o.seeds, mode,
                                                 o.threads);
    reports.emplace_back(fs::path(path).filename().string(), std::move(report));
  }
  std::string text;
  ordered_json j;
  ordered_json arr = ordered_json::array();
  for (const auto& [name, r] : reports) {
    text += "# " + name + "\n" + eval::format_table(r) + "\n";
    ordered_json e;
    e["name"] = name;
    e["report"] = eval::to_json(r);
    arr.push_back(std::move(e));
  }
  j["reports"] = std::move(arr);
  if (reports.size() >= 2) {
    const auto ranking = eval::compare(reports);
    text += eval::format_ranking(ranking) + "\n";
    ordered_json rank = ordered_json::array();
    for (const auto& r : ranking) {
      ordered_json e;
      e["name"] = r.name;
      e["mean_ctc"] = r.mean_ctc;
      e["mean_cr"] = r.mean_cr;
      e["delta_ctc"] = r.delta_ctc;
      e["delta_cr"] = r.delta_cr;
      rank.push_back(std::move(e));
    }
    j["ranking"] = std::move(rank);
  }
  const std::string body = text + dump_line(j) + "\n";
  if (o.out.empty()) {
    std::cout << body;
  } else {
    open_out(o.out) << body;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// deid

std::map<std::string, PiiManifest> read_manifests(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open manifest file '" + path + "'");
  std::map<std::string, PiiManifest> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (unicode::is_blank(line)) continue;
    try {
      const auto j = ordered_json::parse(line);
      if (!j.is_object() || !j.contains("id") || !j["id"].is_string() || !j.contains("pii")) {
        throw ValidationError("manifest line needs string 'id' and object 'pii'");
      }
      if (!out.emplace(j["id"].get<std::string>(), manifest_from_json(j["pii"])).second) {
        throw ValidationError("duplicate manifest id '" + j["id"].get<std::string>() + "'");
      }
    } catch (const ordered_json::exception& e) {
      throw ValidationError(path, n, e.what());
    } catch (const ValidationError& e) {
      throw ValidationError(path, n, e.what());
    }
  }
  return out;
}

int cmd_deid(const Options& o) {
  auto records = load_records(o.in);
  const auto sidecar = o.manifest.empty() ? std::map<std::string, PiiManifest>{} : read_manifests(o.manifest);
  const deid::InstitutionList institutions =
      o.institutions.empty() ? deid::InstitutionList{} : deid::read_institutions(o.institutions);

  struct Out {
    Record record;
    deid::ReplacementLog log;
    std::size_t residuals = 0;
  };
  std::vector<Out> results(records.size());
  parallel_for(records.size(), o.threads, [&](std::size_t i) {
    const Record& r = records[i];
    PiiManifest manifest;
    if (r.pii) manifest = *r.pii;
    if (const auto it = sidecar.find(r.id); it != sidecar.end()) manifest = it->second;
    const deid::MatcherSet matchers(manifest, institutions);
    auto res = deid::deidentify(r, matchers, *o.seed);
    res.record.pii.reset();
    results[i].residuals = deid::verify(res.record, manifest, institutions).size();
    results[i].record = std::move(res.record);
    results[i].log = std::move(res.log);
  });

  auto out = open_out(o.out);
  auto log = open_out(o.log);
  std::size_t replaced = 0, residuals = 0;
  for (const auto& r : results) {
    out << dump_line(to_json(r.record)) << '\n';
    for (const auto& e : r.log.entries) log << dump_line(deid::to_json(e)) << '\n';
    replaced += r.log.entries.size();
    residuals += r.residuals;
  }
  std::cerr << "replaced " << replaced << " spans in " << results.size() << " records, residuals " << residuals
            << '\n';
  if (residuals != 0) throw ValidationError(std::to_string(residuals) + " residual PII hits after replacement");
  return 0;
}

// ---------------------------------------------------------------------------
// trc

std::vector<std::vector<trc::Span>> read_span_file(const std::string& path, const std::vector<Record>& records) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < records.size(); ++i) index.emplace(records[i].id, i);
  std::vector<std::vector<trc::Span>> out(records.size());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open span file '" + path + "'");
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (unicode::is_blank(line)) continue;
    try {
      const auto j = ordered_json::parse(line);
      const auto id = j.at("id").get<std::string>();
      const auto it = index.find(id);
      if (it == index.end()) throw ValidationError("unknown record id '" + id + "'");
      for (const auto& s : j.at("spans")) {
        out[it->second].emplace_back(s.at(0).get<std::size_t>(), s.at(1).get<std::size_t>());
      }
    } catch (const ordered_json::exception& e) {
      throw ValidationError(path, n, e.what());
    } catch (const ValidationError& e) {
      throw ValidationError(path, n, e.what());
    }
  }
  return out;
}

int cmd_trc_mark(const Options& o) {
  if (o.terms.empty() == o.spans.empty()) throw ValidationError("trc mark needs exactly one of --terms or --spans");
  const auto records = load_records(o.in);
  std::vector<std::vector<trc::Event>> events(records.size());
  if (!o.terms.empty()) {
    const auto terms = trc::read_terms(o.terms);
    const trc::TermMarker marker(terms);
    parallel_for(records.size(), o.threads, [&](std::size_t i) { events[i] = marker.mark(records[i]); });
  } else {
    const auto spans = read_span_file(o.spans, records);
    for (std::size_t i = 0; i < records.size(); ++i) events[i] = trc::import_events(records[i], spans[i]);
  }
  auto out = open_out(o.out);
  for (const auto& list : events) {
    for (const auto& e : list) out << dump_line(trc::to_json(e)) << '\n';
  }
  return 0;
}

std::map<std::string, std::vector<trc::Event>> read_events(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open event file '" + path + "'");
  std::map<std::string, std::vector<trc::Event>> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (unicode::is_blank(line)) continue;
    try {
      const auto j = ordered_json::parse(line);
      if (!j.contains("record_id")) throw ValidationError("event without record_id");
      auto e = trc::event_from_json(j, "");
      out[e.record_id].push_back(std::move(e));
    } catch (const ordered_json::exception& e) {
      throw ValidationError(path, n, e.what());
    } catch (const ValidationError& e) {
      throw ValidationError(path, n, e.what());
    }
  }
  return out;
}

std::vector<trc::EventPair> pairs_for(const std::vector<Record>& records,
                                      std::map<std::string, std::vector<trc::Event>>& events, std::size_t threads) {
  std::vector<std::vector<trc::EventPair>> per(records.size());
  parallel_for(records.size(), threads, [&](std::size_t i) {
    const auto it = events.find(records[i].id);
    if (it == events.end()) return;
    auto evs = it->second;
    std::sort(evs.begin(), evs.end(),
              [](const trc::Event& a, const trc::Event& b) { return std::pair(a.start, a.end) < std::pair(b.start, b.end); });
    const auto sentences = trc::split_sentences(records[i].text);
    per[i] = trc::generate_pairs(records[i].text, evs, sentences);
  });
  std::vector<trc::EventPair> out;
  for (auto& p : per) out.insert(out.end(), std::make_move_iterator(p.begin()), std::make_move_iterator(p.end()));
  return out;
}

int cmd_trc_pairs(const Options& o) {
  const auto records = load_records(o.in);
  auto events = read_events(o.events);
  const auto pairs = pairs_for(records, events, o.threads);
  auto out = open_out(o.out);
  trc::write_pairs(out, pairs);
  return 0;
}

int cmd_trc_clip(const Options& o) {
  auto pairs = trc::read_pairs(o.in);
  const auto before = pairs.size();
  std::erase_if(pairs, [](const trc::EventPair& p) { return p.gold && *p.gold == trc::RelationLabel::invalid; });
  std::cerr << "dropped " << before - pairs.size() << " INVALID pairs\n";
  const auto clipped = trc::clip_dataset(pairs, *o.seed);
  std::cerr << "label counts " << dump_line(trc::to_json(trc::count_labels(clipped))) << '\n';
  auto out = open_out(o.out);
  trc::write_pairs(out, clipped);
  return 0;
}

int cmd_trc_split(const Options& o) {
  const auto pairs = trc::read_pairs(o.in);
  const auto split = trc::split_train_test(pairs, o.test_frac, *o.seed);
  for (const auto& w : split.warnings) std::cerr << "warning: " << w << '\n';
  auto train = open_out(o.train);
  trc::write_pairs(train, split.train);
  auto test = open_out(o.test);
  trc::write_pairs(test, split.test);
  std::cerr << "train " << split.train.size() << ", test " << split.test.size() << '\n';
  return 0;
}

int cmd_trc_predict(const Options& o) {
  const auto pairs = trc::read_pairs(o.in);
  const auto predicted = trc::predict_baseline(pairs, trc::parse_strategy(o.strategy));
  auto out = open_out(o.out);
  trc::write_pairs(out, predicted);
  return 0;
}

int cmd_trc_eval(const Options& o) {
  const auto pairs = trc::read_pairs(o.pred);
  const auto report = trc::evaluate(pairs);
  const std::string body = dump_line(trc::to_json(report)) + "\n";
  if (o.out.empty()) {
    std::cout << body;
  } else {
    open_out(o.out) << body;
  }
  return 0;
}

int cmd_trc_timeline(const Options& o) {
  const auto pairs = trc::read_pairs(o.in);
  std::vector<std::string> order;
  std::map<std::string, std::vector<trc::EventPair>> by_record;
  for (const auto& p : pairs) {
    auto [it, fresh] = by_record.try_emplace(p.e1.record_id);
    if (fresh) order.push_back(p.e1.record_id);
    it->second.push_back(p);
  }
  std::vector<std::string> lines(order.size());
  parallel_for(order.size(), o.threads, [&](std::size_t i) {
    const auto& group = by_record.at(order[i]);
    auto g = trc::build_timeline(group, o.gold);
    if (o.repair) g = trc::repair_timeline(std::move(g), group);
    ordered_json j;
    j["record_id"] = order[i];
    auto body = trc::to_json(g);
    for (auto& [k, v] : body.items()) j[k] = std::move(v);
    lines[i] = dump_line(j);
  });
  auto out = open_out(o.out);
  for (const auto& l : lines) out << l << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// synth

int cmd_synth_general(const Options& o) {
  corpus::write_records(fs::path(o.out), synth::general_corpus(o.n, *o.seed, o.threads));
  return 0;
}

int cmd_synth_clinical(const Options& o) {
  synth::ClinicalOptions opt;
  opt.with_pii = !o.no_pii;
  const auto records = synth::clinical_corpus(o.n, *o.seed, opt, o.threads);
  auto out = open_out(o.out);
  std::size_t mentions = 0;
  for (const auto& r : records) {
    out << dump_line(to_json(r.record)) << '\n';
    mentions += r.pii_mentions;
  }
  std::cerr << "injected " << mentions << " PII mentions\n";
  return 0;
}

int cmd_synth_lists(const Options& o) {
  if (!o.terms.empty()) {
    auto out = open_out(o.terms);
    for (const auto& t : synth::event_terms()) out << t << '\n';
  }
  if (!o.institutions.empty()) {
    auto out = open_out(o.institutions);
    for (const auto& t : synth::institutions()) out << t << '\n';
  }
  return 0;
}

int cmd_synth_pairs(const Options& o) {
  const auto records = load_records(o.in);
  const auto terms = trc::read_terms(o.terms);
  const trc::TermMarker marker(terms);
  std::map<std::string, std::vector<trc::Event>> events;
  for (const auto& r : records) {
    auto evs = marker.mark(r);
    if (!evs.empty()) events.emplace(r.id, std::move(evs));
  }
  auto pairs = pairs_for(records, events, o.threads);
  synth::assign_gold(pairs, synth::kMedTrcWeights, *o.seed);
  auto out = open_out(o.out);
  trc::write_pairs(out, pairs);
  return 0;
}

int cmd_synth_emb(const Options& o) {
  const auto vocab = read_vocabulary(o.vocab);
  adapt::write_embeddings(synth::random_embeddings(vocab, o.dim, *o.seed), vocab, o.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"medtok: clinical tokenizer adaptation, de-identification and temporal relation toolkit"};
  app.failure_message(CLI::FailureMessage::help);
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  Options o;
  app.add_option("--threads", o.threads, "Worker threads (0 = all cores)")->default_val(0);

  auto seed_opt = [&](CLI::App* c) {
    c->add_option("--seed", o.seed, "Random seed")->required();
  };

  // corpus
  auto* corpus_cmd = app.add_subcommand("corpus", "Record corpus utilities");
  corpus_cmd->require_subcommand(1);
  auto* c_stats = corpus_cmd->add_subcommand("stats", "Record, word and character counts");
  c_stats->add_option("file", o.in, "Record file")->required();
  c_stats->add_flag("--dedup", o.dedup, "Skip records with duplicate normalized text");
  auto* c_sample = corpus_cmd->add_subcommand("sample", "Seeded sample without replacement");
  c_sample->add_option("file", o.in, "Record file")->required();
  c_sample->add_option("--n", o.n, "Sample size")->required();
  c_sample->add_option("--out", o.out, "Output record file")->required();
  c_sample->add_flag("--dedup", o.dedup, "Deduplicate before sampling");
  seed_opt(c_sample);

  // tok
  auto* tok_cmd = app.add_subcommand("tok", "WordPiece training and segmentation");
  tok_cmd->require_subcommand(1);
  auto* t_train = tok_cmd->add_subcommand("train", "Train a WordPiece vocabulary");
  t_train->add_option("--in", o.in, "Record file")->required();
  t_train->add_option("--vocab-size", o.vocab_size, "Target vocabulary size")->required();
  t_train->add_option("--min-freq", o.min_freq, "Minimum pair frequency")->default_val(1);
  t_train->add_option("--out", o.out, "Output vocabulary")->required();
  auto* t_segment = tok_cmd->add_subcommand("segment", "Segment text with a vocabulary");
  t_segment->add_option("--vocab", o.vocab, "Vocabulary file")->required();
  t_segment->add_option("--mode", o.mode, "greedy|flota")->default_val("greedy");
  t_segment->add_option("--text", o.texts, "Text to segment");
  t_segment->add_option("--in", o.in, "Record file to segment");
  t_segment->add_option("--out", o.out, "Output file (default stdout)");

  // adapt
  auto* adapt_cmd = app.add_subcommand("adapt", "Domain vocabulary adaptation");
  adapt_cmd->require_subcommand(0, 1);
  adapt_cmd->add_option("--method", o.method, "simple|adalm");
  adapt_cmd->add_option("--base", o.base, "Base vocabulary");
  adapt_cmd->add_option("--in", o.in, "Domain record file");
  adapt_cmd->add_option("--eval", o.eval_in, "Evaluation records for the AdaLM stop rule (default: --in)");
  adapt_cmd->add_option("--delta", o.delta, "AdaLM relative-gain threshold")->default_val(0.1);
  adapt_cmd->add_option("--step", o.step, "New tokens per AdaLM increment")->default_val(1000);
  adapt_cmd->add_option("--domain-size", o.domain_size, "Domain vocabulary size for the simple method")
      ->default_val(10000);
  adapt_cmd->add_option("--max-steps", o.max_steps, "AdaLM increment cap")->default_val(64);
  adapt_cmd->add_option("--min-freq", o.min_freq, "Minimum pair frequency")->default_val(1);
  adapt_cmd->add_option("--out", o.out, "Output vocabulary");
  adapt_cmd->add_option("--trace", o.trace, "Adaptation trace (JSON)");
  auto* a_emb = adapt_cmd->add_subcommand("init-emb", "Initialize embeddings for added tokens");
  a_emb->add_option("--base-emb", o.base_emb, "Base embedding file")->required();
  a_emb->add_option("--old", o.old_vocab, "Old vocabulary")->required();
  a_emb->add_option("--new", o.new_vocab, "New vocabulary")->required();
  a_emb->add_option("--out", o.out, "Output embedding file")->required();

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Corpus token count and compression rate");
  eval_cmd->add_option("--vocab", o.vocabs, "Vocabulary file (repeat to compare)")->required();
  eval_cmd->add_option("--in", o.in, "Record file")->required();
  eval_cmd->add_option("--mode", o.mode, "greedy|flota")->default_val("greedy");
  eval_cmd->add_option("--n", o.n, "Records per seeded sample");
  eval_cmd->add_option("--seeds", o.seeds, "Comma-separated sample seeds")->delimiter(',');
  eval_cmd->add_option("--out", o.out, "Report file (default stdout)");

  // deid
  auto* deid_cmd = app.add_subcommand("deid", "Manifest-driven de-identification");
  deid_cmd->add_option("--in", o.in, "Record file")->required();
  deid_cmd->add_option("--manifest", o.manifest, "Sidecar manifests keyed by record id");
  deid_cmd->add_option("--institutions", o.institutions, "Institution list, one per line");
  deid_cmd->add_option("--out", o.out, "De-identified record file")->required();
  deid_cmd->add_option("--log", o.log, "Replacement log (JSON lines)")->required();
  seed_opt(deid_cmd);

  // trc
  auto* trc_cmd = app.add_subcommand("trc", "Temporal relation datasets and timelines");
  trc_cmd->require_subcommand(1);
  auto* r_mark = trc_cmd->add_subcommand("mark", "Mark events from a term list or imported spans");
  r_mark->add_option("--in", o.in, "Record file")->required();
  r_mark->add_option("--terms", o.terms, "Term list");
  r_mark->add_option("--spans", o.spans, "Span file: {id, spans:[[start,end],...]} per line");
  r_mark->add_option("--out", o.out, "Event file")->required();
  auto* r_pairs = trc_cmd->add_subcommand("pairs", "Event pairs within two-sentence windows");
  r_pairs->add_option("--in", o.in, "Record file")->required();
  r_pairs->add_option("--events", o.events, "Event file")->required();
  r_pairs->add_option("--out", o.out, "Pair file")->required();
  auto* r_clip = trc_cmd->add_subcommand("clip", "Downsample BEFORE to the next largest class");
  r_clip->add_option("--in", o.in, "Labeled pair file")->required();
  r_clip->add_option("--out", o.out, "Clipped pair file")->required();
  seed_opt(r_clip);
  auto* r_split = trc_cmd->add_subcommand("split", "Record-disjoint stratified split");
  r_split->add_option("--in", o.in, "Labeled pair file")->required();
  r_split->add_option("--test-frac", o.test_frac, "Test fraction")->required();
  r_split->add_option("--train", o.train, "Train output")->required();
  r_split->add_option("--test", o.test, "Test output")->required();
  seed_opt(r_split);
  auto* r_predict = trc_cmd->add_subcommand("predict", "Baseline predictions");
  r_predict->add_option("--in", o.in, "Pair file")->required();
  r_predict->add_option("--strategy", o.strategy, "majority|textual_order")->default_val("majority");
  r_predict->add_option("--out", o.out, "Pair file with predictions")->required();
  auto* r_eval = trc_cmd->add_subcommand("eval", "Weighted and relaxed F1");
  r_eval->add_option("--pred", o.pred, "Pairs with gold and predicted labels")->required();
  r_eval->add_option("--out", o.out, "Report file (default stdout)");
  auto* r_timeline = trc_cmd->add_subcommand("timeline", "Per-record temporal graphs");
  r_timeline->add_option("--pairs", o.in, "Labeled pair file")->required();
  r_timeline->add_flag("--repair", o.repair, "Break cycles by dropping low-confidence edges");
  r_timeline->add_flag("--gold", o.gold, "Use gold labels instead of predictions");
  r_timeline->add_option("--out", o.out, "Graph file (one JSON object per record)")->required();

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "Synthetic corpora and fixtures");
  synth_cmd->require_subcommand(1);
  auto* s_general = synth_cmd->add_subcommand("general", "General-domain records");
  s_general->add_option("--n", o.n, "Record count")->required();
  s_general->add_option("--out", o.out, "Record file")->required();
  seed_opt(s_general);
  auto* s_clinical = synth_cmd->add_subcommand("clinical", "Clinical records with domain terms and PII");
  s_clinical->add_option("--n", o.n, "Record count")->required();
  s_clinical->add_option("--out", o.out, "Record file")->required();
  s_clinical->add_flag("--no-pii", o.no_pii, "Omit identifiers and manifests");
  seed_opt(s_clinical);
  auto* s_lists = synth_cmd->add_subcommand("lists", "Write the event term list and institution list");
  s_lists->add_option("--terms", o.terms, "Term list output");
  s_lists->add_option("--institutions", o.institutions, "Institution list output");
  auto* s_pairs = synth_cmd->add_subcommand("pairs", "Event pairs with sampled gold labels");
  s_pairs->add_option("--in", o.in, "Record file")->required();
  s_pairs->add_option("--terms", o.terms, "Term list")->required();
  s_pairs->add_option("--out", o.out, "Pair file")->required();
  seed_opt(s_pairs);
  auto* s_emb = synth_cmd->add_subcommand("emb", "Random embeddings for a vocabulary");
  s_emb->add_option("--vocab", o.vocab, "Vocabulary file")->required();
  s_emb->add_option("--dim", o.dim, "Embedding dimension")->required();
  s_emb->add_option("--out", o.out, "Embedding file")->required();
  seed_opt(s_emb);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  const std::vector<std::pair<CLI::App*, int (*)(const Options&)>> table = {
      {c_stats, cmd_corpus_stats},   {c_sample, cmd_corpus_sample},   {t_train, cmd_tok_train},
      {t_segment, cmd_tok_segment},  {a_emb, cmd_adapt_init_emb},     {adapt_cmd, cmd_adapt},
      {eval_cmd, cmd_eval},          {deid_cmd, cmd_deid},            {r_mark, cmd_trc_mark},
      {r_pairs, cmd_trc_pairs},      {r_clip, cmd_trc_clip},          {r_split, cmd_trc_split},
      {r_predict, cmd_trc_predict},  {r_eval, cmd_trc_eval},          {r_timeline, cmd_trc_timeline},
      {s_general, cmd_synth_general}, {s_clinical, cmd_synth_clinical}, {s_lists, cmd_synth_lists},
      {s_pairs, cmd_synth_pairs},    {s_emb, cmd_synth_emb}};
  try {
    for (const auto& [cmd, fn] : table) {
      if (cmd->parsed()) {
        echo_config(*cmd, resolve_threads(o.threads));
        return fn(o);
      }
    }
    std::cerr << app.help();
    return 1;
  } catch (const ValidationError& e) {
    std::cerr << "medtok: error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "medtok: internal error: " << e.what() << '\n';
    return 2;
  }
}
