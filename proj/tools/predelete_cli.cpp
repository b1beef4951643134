#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <pthread.h>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "predelete/agreement.hpp"
#include "predelete/analysis.hpp"
#include "predelete/cascade.hpp"
#include "predelete/error.hpp"
#include "predelete/external_scores.hpp"
#include "predelete/service.hpp"
#include "predelete/training.hpp"

namespace fs = std::filesystem;
using namespace predelete;
using ojson = nlohmann::ordered_json;

namespace {

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Usage: return 2;
    case ErrorKind::Data: return 3;
    case ErrorKind::Model: return 4;
    case ErrorKind::Internal: return 5;
  }
  return 5;
}

std::string_view kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Usage: return "usage";
    case ErrorKind::Data: return "data";
    case ErrorKind::Model: return "model";
    case ErrorKind::Internal: return "internal";
  }
  return "internal";
}

int fail(ErrorKind kind, std::string_view message) {
  ojson j{{"error", {{"kind", kind_name(kind)}, {"message", message}}}};
  std::cerr << j.dump(-1, ' ', false, ojson::error_handler_t::replace) << std::endl;
  return exit_code(kind);
}

CorpusFormat resolve_format(const std::string& flag, const fs::path& path) {
  if (flag == "jsonl") return CorpusFormat::Jsonl;
  if (flag == "tsv") return CorpusFormat::Tsv;
  if (!flag.empty()) throw UsageError("unknown format '" + flag + "' (expected jsonl or tsv)");
  if (auto f = format_from_path(path)) return *f;
  throw UsageError("cannot infer the format of " + path.string() + "; pass --format");
}

Setting require_setting(const std::string& s) {
  if (auto v = parse_setting(s)) return *v;
  throw UsageError("unknown setting '" + s + "' (expected deletion, disinfo or reason)");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

void write_file(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << content;
  if (!out) throw DataError("cannot write " + path.string());
}

// Bundle timestamps come from SOURCE_DATE_EPOCH when set so builds can be
// reproduced byte for byte.
std::int64_t build_timestamp() {
  if (const char* v = std::getenv("SOURCE_DATE_EPOCH"); v && *v) {
    char* end = nullptr;
    const long long t = std::strtoll(v, &end, 10);
    if (*end != '\0') throw UsageError("SOURCE_DATE_EPOCH is not an integer");
    return t;
  }
  return static_cast<std::int64_t>(std::time(nullptr));
}

struct CorpusArgs {
  std::string path;
  std::string format;
  Corpus load() const { return load_corpus(path, resolve_format(format, path)); }
};

// ---- split ----

struct SplitArgs {
  CorpusArgs input;
  std::string fractions = "0.7,0.1,0.2";
  std::uint64_t seed = 42;
  std::string stratify = "deletion";
  std::string out_dir = ".";
  std::string prefix;
  bool weak_labels = false;
  bool dedup = false;
};

int run_split(const SplitArgs& a) {
  auto corpus = a.input.load();
  if (a.dedup) corpus = drop_duplicate_texts(corpus);
  if (a.weak_labels) corpus = apply_weak_labels(corpus);
  SplitSpec spec;
  const auto parts = split_list(a.fractions);
  if (parts.size() != 3) throw UsageError("--fractions needs three comma-separated values");
  for (std::size_t i = 0; i < 3; ++i) spec.fractions[i] = parse_fraction(parts[i]);
  spec.seed = a.seed;
  if (a.stratify == "deletion") spec.stratify_on = StratifyOn::DeletionLabel;
  else if (a.stratify == "category") spec.stratify_on = StratifyOn::CategoryLabel;
  else throw UsageError("unknown --stratify '" + a.stratify + "' (expected deletion or category)");

  const auto result = stratified_split(corpus, spec);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";

  const auto format = resolve_format(a.input.format, a.input.path);
  const std::string ext = format == CorpusFormat::Jsonl ? ".jsonl" : ".tsv";
  const std::string prefix = a.prefix.empty() ? fs::path(a.input.path).stem().string() : a.prefix;
  fs::create_directories(a.out_dir);
  const std::pair<const char*, const Corpus*> outputs[] = {
      {"train", &result.train}, {"dev", &result.dev}, {"test", &result.test}};
  std::cout << "seed=" << a.seed << " stratify=" << a.stratify << " fractions=" << a.fractions << "\n";
  for (const auto& [name, part] : outputs) {
    const auto path = fs::path(a.out_dir) / (prefix + "." + name + ext);
    save_corpus(*part, path, format);
    std::cout << name << "\t" << part->size() << "\t" << path.string() << "\n";
  }
  return 0;
}

// ---- train ----

struct TrainArgs {
  CorpusArgs train;
  CorpusArgs dev;
  std::string setting;
  std::string model = "svm";
  std::string out;
  std::string rerun_log;
  std::uint32_t reruns = 1;
  std::uint64_t seed = 1;
  double lambda = 1e-4;
  std::uint32_t epochs = 10;
  bool balanced = false;
  std::uint32_t trees = 100;
  std::uint32_t max_depth = 0;
  std::uint32_t split_features = 0;
  unsigned threads = 1;
  std::uint32_t min_df = 2;
  std::uint32_t vocab_size = 50000;
  bool lowercase = false;
  bool normalize_arabic = false;
};

int run_train(const TrainArgs& a) {
  TrainOptions opt;
  opt.setting = require_setting(a.setting);
  const auto kind = parse_model_kind(a.model);
  if (!kind) throw UsageError("unknown model '" + a.model + "' (expected majority, svm or rf)");
  opt.kind = *kind;
  opt.normalization.lowercase = a.lowercase;
  opt.normalization.normalize_arabic = a.normalize_arabic;
  opt.vocabulary.min_df = a.min_df;
  opt.vocabulary.max_features = a.vocab_size == 0 ? std::nullopt : std::optional<std::uint32_t>(a.vocab_size);
  opt.svm = {a.lambda, a.epochs, a.seed, a.balanced};
  opt.forest.n_trees = a.trees;
  opt.forest.max_depth = a.max_depth;
  opt.forest.max_features = a.split_features;
  opt.forest.seed = a.seed;
  opt.forest.threads = a.threads;
  opt.reruns = a.reruns;
  opt.timestamp = build_timestamp();

  const auto train = a.train.load();
  std::optional<Corpus> dev;
  if (!a.dev.path.empty()) dev = a.dev.load();
  const auto outcome = train_bundle(train, dev ? &*dev : nullptr, opt);
  const auto fingerprint = save_bundle(outcome.bundle, a.out);

  const auto log = format_rerun_log(outcome.reruns, outcome.selected);
  const auto log_path = a.rerun_log.empty() ? fs::path(a.out + ".reruns.tsv") : fs::path(a.rerun_log);
  write_file(log_path, log);

  std::cout << "model=" << a.model << " setting=" << a.setting << " seed=" << outcome.bundle.metadata.seed
            << " vocabulary=" << outcome.bundle.vocabulary.size() << " fingerprint=" << fingerprint << "\n";
  std::cout << log;
  return 0;
}

// ---- evaluate ----

struct EvaluateArgs {
  std::string bundle;
  CorpusArgs test;
  std::string setting;
  std::string scores;
  std::string out;
  std::string error_from;
  std::string error_to;
  bool json = false;
};

int run_evaluate(const EvaluateArgs& a) {
  const auto test = a.test.load();
  std::optional<ModelBundle> bundle;
  if (!a.bundle.empty()) bundle = load_bundle(a.bundle);
  if (!bundle && a.scores.empty()) throw UsageError("evaluate needs --bundle or --scores");

  Setting setting;
  if (!a.setting.empty()) setting = require_setting(a.setting);
  else if (bundle && bundle->setting) setting = *bundle->setting;
  else throw UsageError("--setting is required when the bundle does not record one");

  std::vector<std::string> ids;
  std::vector<std::size_t> gold;
  std::vector<Prediction> predictions;
  EvalReport report;
  const auto labels = labels_for(setting);
  ojson meta;
  if (!a.scores.empty()) {
    for (const auto& r : test)
      if (auto g = gold_label(r, setting)) {
        ids.push_back(r.id);
        gold.push_back(*g);
      }
    if (gold.empty()) throw DataError("no test records take part in the setting");
    predictions = external_scores(a.scores, labels, ids);
    report = evaluate(gold, predictions, labels);
    meta["source"] = "external_scores";
  } else {
    auto ev = evaluate_bundle(*bundle, test, setting);
    ids = std::move(ev.data.ids);
    gold = std::move(ev.data.gold);
    predictions = std::move(ev.predictions);
    report = std::move(ev.report);
    meta["source"] = "bundle";
    meta["model"] = model_kind(bundle->model);
    meta["bundle_fingerprint"] = bundle->fingerprint;
    meta["seed"] = bundle->metadata.seed;
  }

  std::optional<ErrorSlice> slice;
  if (!a.error_to.empty()) {
    std::vector<std::size_t> pred;
    for (const auto& p : predictions) pred.push_back(p.label);
    slice = error_slice(gold, pred, ids, labels, split_list(a.error_from), a.error_to);
  } else if (!a.error_from.empty()) {
    throw UsageError("--error-from needs --error-to");
  }

  ojson j;
  j["setting"] = to_string(setting);
  j["n"] = gold.size();
  j.update(meta);
  j.update(to_json(report));
  if (slice) j["error_slice"] = {{"from", split_list(a.error_from)}, {"to", a.error_to}, {"count", slice->count},
                                 {"ids", slice->ids}};
  if (!a.out.empty()) write_file(a.out, j.dump(2) + "\n");

  if (a.json) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "setting=" << to_string(setting) << " n=" << gold.size();
    if (meta.contains("seed")) std::cout << " model=" << meta["model"].get<std::string>() << " seed=" << meta["seed"];
    std::cout << "\n\n" << format_report(report);
    if (slice) {
      std::cout << "\nerror slice " << a.error_from << " -> " << a.error_to << ": n=" << slice->count << "\n";
      for (const auto& id : slice->ids) std::cout << "  " << id << "\n";
    }
  }
  return 0;
}

// ---- predict ----

struct PredictArgs {
  std::string bundle;
  CorpusArgs input;
  std::string out;
};

int run_predict(const PredictArgs& a) {
  const auto bundle = load_bundle(a.bundle);
  const auto corpus = a.input.load();
  std::ofstream file;
  if (!a.out.empty()) {
    file.open(a.out, std::ios::binary);
    if (!file) throw DataError("cannot write " + a.out);
  }
  std::ostream& out = a.out.empty() ? std::cout : file;
  for (const auto& r : corpus) {
    const auto p = bundle.predict_text(r.text);
    ojson scores;
    for (std::size_t c = 0; c < p.scores.size(); ++c) scores[bundle.labels.name(c)] = p.scores[c];
    ojson line{{"id", r.id}, {"label", bundle.labels.name(p.label)}, {"scores", scores}};
    out << line.dump() << "\n";
  }
  return 0;
}

// ---- agree / analyze ----

int run_agree(const std::string& input, bool json) {
  const auto report = agreement_report(load_annotation_tsv(input));
  if (json) std::cout << to_json(report).dump(2) << "\n";
  else std::cout << format_agreement(report);
  return 0;
}

struct AnalyzeArgs {
  CorpusArgs input;
  std::string report = "all";
  std::string category = "hate_speech";
  bool json = false;
};

int run_analyze(const AnalyzeArgs& a) {
  const auto corpus = a.input.load();
  const bool all = a.report == "all";
  if (!all && a.report != "attributes" && a.report != "status" && a.report != "targets")
    throw UsageError("unknown --report '" + a.report + "' (expected attributes, status, targets or all)");
  ojson j;
  std::string text;
  if (all || a.report == "attributes") {
    // Empty slices are left out when reporting everything.
    std::vector<NamedSlice> slices;
    for (auto& s : standard_slices(corpus))
      if (!all || !s.corpus.empty()) slices.push_back(std::move(s));
    const auto r = attribute_distribution(slices);
    j["attributes"] = to_json(r);
    text += format_attribute_report(r) + "\n";
  }
  if (all || a.report == "status") {
    const auto r = user_status_breakdown(corpus);
    j["status"] = to_json(r);
    text += format_status_report(r) + "\n";
  }
  if (all || a.report == "targets") {
    const auto category = parse_category_label(a.category);
    if (!category || !is_disinformative(*category))
      throw UsageError("--category must be one of hate_speech, offensive, rumor, spam");
    const auto freq = target_frequencies(corpus, *category);
    auto arr = ojson::array();
    text += "targets (" + a.category + ")\n";
    for (const auto& [t, n] : freq) {
      arr.push_back({{"target", t}, {"count", n}});
      text += "  " + std::to_string(n) + "\t" + t + "\n";
    }
    j["targets"] = {{"category", a.category}, {"counts", arr}};
  }
  if (a.json) std::cout << j.dump(2) << "\n";
  else std::cout << text;
  return 0;
}

// ---- serve / check / make-fixture ----

struct ServeArgs {
  std::string bind;
  std::string manifest;
  std::size_t max_body = 16384;
  std::string log;
  std::vector<std::string> cors;
};

int run_serve(const ServeArgs& a) {
  ServiceConfig config;
  if (!a.bind.empty()) parse_bind(a.bind, config);
  config.manifest = a.manifest;
  config.max_body_bytes = a.max_body;
  config.request_log = a.log;
  config.cors_origins = a.cors;
  apply_env_defaults(config, !a.bind.empty(), !a.manifest.empty());
  if (config.manifest.empty()) throw UsageError("serve needs --manifest or PREDELETE_MANIFEST");

  // Signals are taken by a dedicated thread rather than an async handler.
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  sigaddset(&set, SIGHUP);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  CheckService service(config);
  service.reload();
  const int port = service.bind();
  std::cerr << "listening on " << config.host << ":" << port << " model_fingerprint="
            << service.cascade()->fingerprint() << std::endl;

  std::thread signals([&] {
    for (;;) {
      int sig = 0;
      sigwait(&set, &sig);
      if (sig == SIGHUP) {
        try {
          service.reload();
          std::cerr << "reloaded model_fingerprint=" << service.cascade()->fingerprint() << std::endl;
        } catch (const std::exception& e) {
          std::cerr << "reload failed, keeping the current cascade: " << e.what() << std::endl;
        }
        continue;
      }
      service.stop();
      return;
    }
  });
  service.serve();
  if (signals.joinable()) {
    // serve() can also return on a bind failure; wake the signal thread.
    pthread_kill(signals.native_handle(), SIGTERM);
    signals.join();
  }
  return 0;
}

int run_check(const std::string& manifest, const std::string& text) {
  const auto cascade = load_cascade(manifest);
  auto j = to_json(check(text, cascade));
  j["model_fingerprint"] = cascade.fingerprint();
  std::cout << j.dump() << "\n";
  return 0;
}

int run_make_fixture(const std::string& out_dir) {
  const auto manifest = write_fixture_cascade(out_dir);
  std::cout << manifest.string() << "\n";
  return 0;
}

void add_corpus_options(CLI::App* cmd, CorpusArgs& args, const std::string& flag, const std::string& help,
                        bool required) {
  auto* opt = cmd->add_option(flag, args.path, help);
  if (required) opt->required();
  cmd->add_option(flag + "-format", args.format, "jsonl or tsv (default: from the file extension)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deletion and disinformation risk toolkit for short posts"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  SplitArgs split;
  auto* c_split = app.add_subcommand("split", "Stratified train/dev/test split of a corpus");
  add_corpus_options(c_split, split.input, "--input", "Corpus file", true);
  c_split->add_option("--fractions", split.fractions, "Train,dev,test fractions (decimals or a/b)");
  c_split->add_option("--seed", split.seed, "Shuffle seed");
  c_split->add_option("--stratify", split.stratify, "deletion or category");
  c_split->add_option("--out-dir", split.out_dir, "Output directory");
  c_split->add_option("--prefix", split.prefix, "Output file prefix (default: input stem)");
  c_split->add_flag("--weak-labels", split.weak_labels, "Weakly label non-deleted unlabeled records first");
  c_split->add_flag("--dedup", split.dedup, "Drop records repeating an earlier text");

  TrainArgs train;
  auto* c_train = app.add_subcommand("train", "Train a model bundle");
  add_corpus_options(c_train, train.train, "--train", "Training corpus", true);
  add_corpus_options(c_train, train.dev, "--dev", "Dev corpus for rerun selection", false);
  c_train->add_option("--setting", train.setting, "deletion, disinfo or reason")->required();
  c_train->add_option("--model", train.model, "majority, svm or rf");
  c_train->add_option("--out", train.out, "Bundle path")->required();
  c_train->add_option("--reruns", train.reruns, "Train N seeds and keep the best dev weighted F1");
  c_train->add_option("--rerun-log", train.rerun_log, "Rerun log path (default: <out>.reruns.tsv)");
  c_train->add_option("--seed", train.seed, "Model seed");
  c_train->add_option("--lambda", train.lambda, "SVM regularization");
  c_train->add_option("--epochs", train.epochs, "SVM epochs");
  c_train->add_flag("--balanced", train.balanced, "SVM inverse-frequency class weights");
  c_train->add_option("--trees", train.trees, "Forest size");
  c_train->add_option("--max-depth", train.max_depth, "Tree depth limit (0 = none)");
  c_train->add_option("--split-features", train.split_features, "Features tried per split (0 = ceil(sqrt(V)))");
  c_train->add_option("--threads", train.threads, "Forest training threads");
  c_train->add_option("--min-df", train.min_df, "Minimum document frequency");
  c_train->add_option("--vocab-size", train.vocab_size, "Vocabulary cap (0 = none)");
  c_train->add_flag("--lowercase", train.lowercase, "Lowercase during normalization");
  c_train->add_flag("--normalize-arabic", train.normalize_arabic, "Fold alef, teh marbuta and alef maksura");

  EvaluateArgs evaluate_args;
  auto* c_eval = app.add_subcommand("evaluate", "Evaluate a bundle or external scores on a corpus");
  c_eval->add_option("--bundle", evaluate_args.bundle, "Model bundle");
  add_corpus_options(c_eval, evaluate_args.test, "--test", "Evaluation corpus", true);
  c_eval->add_option("--setting", evaluate_args.setting, "Setting (default: the bundle's)");
  c_eval->add_option("--scores", evaluate_args.scores, "External scores TSV instead of a bundle");
  c_eval->add_option("--out", evaluate_args.out, "Write the JSON report here");
  c_eval->add_option("--error-from", evaluate_args.error_from, "Comma-separated gold labels for the error slice");
  c_eval->add_option("--error-to", evaluate_args.error_to, "Predicted label for the error slice");
  c_eval->add_flag("--json", evaluate_args.json, "Print JSON instead of a table");

  PredictArgs predict_args;
  auto* c_pred = app.add_subcommand("predict", "Predict every record of a corpus (JSON lines)");
  c_pred->add_option("--bundle", predict_args.bundle, "Model bundle")->required();
  add_corpus_options(c_pred, predict_args.input, "--input", "Corpus file", true);
  c_pred->add_option("--out", predict_args.out, "Output path (default: stdout)");

  std::string agree_input;
  bool agree_json = false;
  auto* c_agree = app.add_subcommand("agree", "Fleiss kappa and observed agreement of an annotation TSV");
  c_agree->add_option("--input", agree_input, "Annotation TSV, header row of annotator names")->required();
  c_agree->add_flag("--json", agree_json, "Print JSON");

  AnalyzeArgs analyze;
  auto* c_analyze = app.add_subcommand("analyze", "Attribute, user status and target reports");
  add_corpus_options(c_analyze, analyze.input, "--input", "Corpus file", true);
  c_analyze->add_option("--report", analyze.report, "attributes, status, targets or all");
  c_analyze->add_option("--category", analyze.category, "Category for the targets report");
  c_analyze->add_flag("--json", analyze.json, "Print JSON");

  ServeArgs serve;
  auto* c_serve = app.add_subcommand("serve", "Serve the cascade over HTTP");
  c_serve->add_option("--bind", serve.bind, "host:port (env PREDELETE_BIND)");
  c_serve->add_option("--manifest", serve.manifest, "Cascade manifest (env PREDELETE_MANIFEST)");
  c_serve->add_option("--max-body", serve.max_body, "Request body limit in bytes");
  c_serve->add_option("--log", serve.log, "Request log (hashed text and verdict per line)");
  c_serve->add_option("--cors-origin", serve.cors, "Allowed origin, repeatable; * for any");

  std::string check_manifest, check_text;
  auto* c_check = app.add_subcommand("check", "Run the cascade on one text");
  c_check->add_option("--manifest", check_manifest, "Cascade manifest")->required();
  c_check->add_option("--text", check_text, "Text to check")->required();

  std::string fixture_dir;
  auto* c_fixture = app.add_subcommand("make-fixture", "Write the hand-weighted fixture cascade");
  c_fixture->add_option("--out-dir", fixture_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(ErrorKind::Usage, e.what());
  }

  try {
    if (c_split->parsed()) return run_split(split);
    if (c_train->parsed()) return run_train(train);
    if (c_eval->parsed()) return run_evaluate(evaluate_args);
    if (c_pred->parsed()) return run_predict(predict_args);
    if (c_agree->parsed()) return run_agree(agree_input, agree_json);
    if (c_analyze->parsed()) return run_analyze(analyze);
    if (c_serve->parsed()) return run_serve(serve);
    if (c_check->parsed()) return run_check(check_manifest, check_text);
    if (c_fixture->parsed()) return run_make_fixture(fixture_dir);
  } catch (const Error& e) {
    return fail(e.kind(), e.what());
  } catch (const fs::filesystem_error& e) {
    return fail(ErrorKind::Data, e.what());
  } catch (const std::exception& e) {
    return fail(ErrorKind::Internal, e.what());
  }
  return fail(ErrorKind::Usage, "no subcommand");
}
