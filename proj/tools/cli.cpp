#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "rde/auc.hpp"
#include "rde/bounds.hpp"
#include "rde/corpus.hpp"
#include "rde/diagnostics.hpp"
#include "rde/ensemble.hpp"
#include "rde/error.hpp"
#include "rde/experiment.hpp"
#include "rde/naive_bayes.hpp"
#include "rde/rde_model.hpp"
#include "rde/stats.hpp"
#include "rde/synthetic.hpp"
#include "rde/text_io.hpp"

namespace rde::cli {

namespace {

std::size_t default_threads() {
  if (const char* env = std::getenv("RDE_THREADS")) {
    try {
      auto n = io::parse_int(env);
      if (n >= 1) return static_cast<std::size_t>(n);
    } catch (const Error&) {
    }
  }
  return 1;
}

// Appends `--key value` for every line of the --config file so that config
// values, parsed last with take-last semantics, override command-line flags.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].starts_with("--config=")) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file " + path);
  for (auto& [key, value] : io::parse_key_values(in, path)) {
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    args.push_back(flag);
    args.push_back(value);
  }
  return args;
}

// Options that never affect artifact content stay out of the echo so reruns
// into other paths or with other thread counts are byte-identical.
bool echo_excluded(const std::string& name) {
  return name == "help" || name == "config" || name == "threads" || name == "out" || name == "scores-out" ||
         name == "counts-out";
}

std::string config_echo(const CLI::App& sub) {
  std::map<std::string, std::string> values;
  for (const CLI::Option* opt : sub.get_options()) {
    if (opt->get_lnames().empty()) continue;
    const auto& name = opt->get_lnames().front();
    if (echo_excluded(name)) continue;
    std::string value;
    if (opt->count() > 0) {
      for (const auto& r : opt->results()) {
        if (!value.empty()) value += ',';
        value += r;
      }
    } else {
      value = opt->get_default_str();
    }
    if (value.empty()) continue;
    std::replace_if(value.begin(), value.end(), [](char c) { return c == ' ' || c == '\t'; }, '_');
    std::string key = name;
    std::replace(key.begin(), key.end(), '-', '_');
    values[key] = value;
  }
  return io::echo(values);
}

void write_file(const std::string& path, const std::function<void(std::ostream&)>& writer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  writer(out);
  out.flush();
  if (!out) throw Error("failed writing " + path);
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return in;
}

Vocabulary load_vocab(const std::string& path) {
  auto in = open_input(path);
  return read_vocabulary(in, path);
}

Dataset load_labeled(const std::string& path, const Vocabulary& vocab) {
  auto data = load_dataset(path, vocab);
  if (!data.fully_labeled()) throw InvalidArgument(path + ": every example must be labeled");
  return data;
}

Dataset load_unlabeled(const std::string& path, const Vocabulary& vocab) {
  auto data = load_dataset(path, vocab);
  std::fill(data.labels.begin(), data.labels.end(), Label::unlabeled);
  return data;
}

Dataset concat(const Dataset& a, const Dataset& b) {
  Dataset out = a;
  out.examples.insert(out.examples.end(), b.examples.begin(), b.examples.end());
  out.labels.insert(out.labels.end(), b.labels.begin(), b.labels.end());
  out.provenance = a.provenance + "+" + b.provenance;
  return out;
}

std::vector<FeatureId> resolve_refs(const std::string& tokens, const Vocabulary& vocab) {
  std::vector<FeatureId> out;
  if (tokens.empty()) return out;
  for (auto token : io::split(tokens, ',')) {
    auto id = vocab.lookup(token);
    if (!id) throw InvalidArgument("reference token '" + std::string(token) + "' is not in the vocabulary");
    out.push_back(*id);
  }
  return out;
}

std::vector<FeatureId> refs_above(const CountTable& table, std::int64_t min_count) {
  return candidate_references(table, min_count);
}

struct Options {
  std::string config;
  std::size_t threads = default_threads();

  std::string in, out, vocab, spec, labeled, unlabeled, test, gold, model, data, corpus, scores_out, counts_out;
  std::string kind = "unigram";
  std::string refs;
  std::string methods = "SuRDE,SeRDE,PerfRDE,NB";
  std::int64_t min_count = 1;
  std::int64_t ref_min_count = -1;
  std::size_t n = 0;
  std::size_t n_examples = 50000;
  std::uint64_t seed = 1;
  std::int64_t seed_override = -1;
  SelectionConfig selection;
  std::size_t n_labeled = 500;
  std::size_t n_test = 1000;
  std::size_t n_unlabeled = 0;
  std::size_t resamples = 5;
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config, "key=value file; its entries override flags");
  sub->add_option("--threads", o.threads, "worker threads (default $RDE_THREADS or 1)")->check(CLI::PositiveNumber);
}

void add_selection(CLI::App* sub, Options& o) {
  sub->add_option("--k", o.selection.k, "number of reference features")->capture_default_str();
  sub->add_option("--t", o.selection.t, "pruning threshold")->capture_default_str();
  sub->add_option("--ridge", o.selection.ridge, "combiner ridge strength")->capture_default_str();
  sub->add_option("--candidate-min-count", o.selection.candidate_min_count,
                  "candidates need labeled count above this")
      ->capture_default_str();
}

template <typename Scorer>
double auc_of(const Dataset& data, Scorer&& score, std::ostream* scores_out) {
  std::vector<double> scores;
  std::vector<Label> labels;
  if (scores_out) *scores_out << "index,label,score\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double s = score(data.examples[i]);
    if (scores_out) *scores_out << i << ',' << to_string(data.labels[i]) << ',' << io::format_double(s) << '\n';
    if (data.labels[i] == Label::unlabeled) continue;
    scores.push_back(s);
    labels.push_back(data.labels[i]);
  }
  return roc_auc(scores, labels).auc;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Reference distance estimator toolkit", "rde"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);

  auto* synth = app.add_subcommand("synth", "sample a labeled corpus from a synthetic spec");
  synth->add_option("--spec", o.spec, "key=value spec file")->required();
  synth->add_option("--n", o.n, "number of examples")->required();
  synth->add_option("--out", o.out, "output corpus")->required();
  synth->add_option("--seed", o.seed_override, "override the spec seed");

  auto* vocab = app.add_subcommand("vocab", "build a vocabulary from a corpus");
  vocab->add_option("--in", o.in, "input corpus")->required();
  vocab->add_option("--out", o.out, "output vocabulary (default <in>.vocab)");
  vocab->add_option("--kind", o.kind, "unigram|bigram|both")->capture_default_str();
  vocab->add_option("--min-count", o.min_count, "minimum document frequency")->capture_default_str();

  auto* count = app.add_subcommand("count", "count marginals and reference co-occurrences");
  count->add_option("--in", o.in, "input corpus")->required();
  count->add_option("--vocab", o.vocab, "vocabulary")->required();
  count->add_option("--out", o.out, "output count table")->required();
  count->add_option("--refs", o.refs, "comma-separated reference tokens");
  count->add_option("--ref-min-count", o.ref_min_count, "also use every feature counted more than this");

  auto* surde = app.add_subcommand("train-surde", "RDE with the label as reference, from labeled data");
  auto* perfrde = app.add_subcommand("train-perfrde", "semi-perfect RDE from a fully labeled corpus");
  auto* nb = app.add_subcommand("train-nb", "Bernoulli naive Bayes baseline");
  for (auto* sub : {surde, perfrde, nb}) {
    sub->add_option("--labeled", o.labeled, "labeled corpus")->required();
    sub->add_option("--vocab", o.vocab, "vocabulary")->required();
    sub->add_option("--out", o.out, "output model")->required();
  }

  auto* serde = app.add_subcommand("train-serde", "ensemble of semi-supervised RDEs");
  serde->add_option("--labeled", o.labeled, "labeled corpus")->required();
  serde->add_option("--unlabeled", o.unlabeled, "unlabeled corpus (labels ignored)")->required();
  serde->add_option("--vocab", o.vocab, "vocabulary")->required();
  serde->add_option("--out", o.out, "output ensemble model")->required();
  serde->add_option("--counts-out", o.counts_out, "also write the unlabeled count table");
  add_selection(serde, o);

  auto* eval = app.add_subcommand("eval", "score a corpus with a model and report AUC");
  eval->add_option("--model", o.model, "rde-model, ensemble or naive-bayes file")->required();
  eval->add_option("--data", o.data, "corpus to score")->required();
  eval->add_option("--vocab", o.vocab, "vocabulary")->required();
  eval->add_option("--scores-out", o.scores_out, "optional per-example score CSV");

  auto* bounds = app.add_subcommand("bounds", "distance and bounds per reference feature");
  auto* diag = app.add_subcommand("diag", "per-reference AUC, distance and bound diagnostics");
  for (auto* sub : {bounds, diag}) {
    sub->add_option("--labeled", o.labeled, "labeled corpus (I and D estimates)")->required();
    sub->add_option("--unlabeled", o.unlabeled, "unlabeled corpus (P estimates)")->required();
    sub->add_option("--vocab", o.vocab, "vocabulary")->required();
    sub->add_option("--out", o.out, "output CSV")->required();
    sub->add_option("--refs", o.refs, "comma-separated reference tokens");
    sub->add_option("--ref-min-count", o.ref_min_count, "candidates: labeled count above this (default 20)");
    sub->add_option("--gold", o.gold, "fully labeled corpus for the semi-perfect RDE (default: labeled, plus test for diag)");
  }
  bounds->add_option("--eval", o.test, "examples for the distance (default: gold corpus)");
  diag->add_option("--test", o.test, "held-out labeled corpus")->required();

  auto* experiment = app.add_subcommand("experiment", "resampled comparison of SuRDE, SeRDE, PerfRDE and NB");
  experiment->add_option("--spec", o.spec, "synthetic spec file");
  experiment->add_option("--corpus", o.corpus, "corpus file (instead of --spec)");
  experiment->add_option("--vocab", o.vocab, "vocabulary for --corpus (default: built from it)");
  experiment->add_option("--n", o.n_examples, "synthetic corpus size")->capture_default_str();
  experiment->add_option("--labeled", o.n_labeled, "labeled examples per resample")->capture_default_str();
  experiment->add_option("--test", o.n_test, "test examples per resample")->capture_default_str();
  experiment->add_option("--unlabeled", o.n_unlabeled, "unlabeled examples (0 = rest)")->capture_default_str();
  experiment->add_option("--methods", o.methods, "comma-separated subset of SuRDE,SeRDE,PerfRDE,NB")
      ->capture_default_str();
  experiment->add_option("--resamples", o.resamples, "number of resamples")->capture_default_str();
  experiment->add_option("--seed", o.seed, "base seed")->capture_default_str();
  experiment->add_option("--out", o.out, "machine-readable CSV report");
  add_selection(experiment, o);

  for (auto* sub : app.get_subcommands({})) add_common(sub, o);

  try {
    auto args = expand_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }

  try {
    if (synth->parsed()) {
      auto in = open_input(o.spec);
      auto settings = io::parse_key_values(in, o.spec);
      if (o.seed_override >= 0) settings["seed"] = std::to_string(o.seed_override);
      auto spec = parse_spec(settings);
      auto data = synth_generate(spec, o.n);
      write_file(o.out, [&](std::ostream& f) { write_corpus(f, data, config_echo(*synth)); });
      out << "synth: wrote " << data.size() << " examples (" << data.count(Label::pos) << " pos, "
          << spec.n_features() << " features) to " << o.out << '\n';
    } else if (vocab->parsed()) {
      const auto kind = parse_feature_kind(o.kind);
      auto docs = read_corpus(std::filesystem::path(o.in));
      std::vector<std::vector<std::string>> tokens;
      tokens.reserve(docs.size());
      for (const auto& d : docs) tokens.push_back(tokenize(d.text, kind));
      auto v = build_vocabulary(tokens, kind, o.min_count);
      if (o.out.empty()) o.out = o.in + ".vocab";
      write_file(o.out, [&](std::ostream& f) { write_vocabulary(f, v, config_echo(*vocab)); });
      out << "vocab: " << v.size() << " entries from " << docs.size() << " documents to " << o.out << '\n';
    } else if (count->parsed()) {
      auto v = load_vocab(o.vocab);
      auto data = load_dataset(std::filesystem::path(o.in), v);
      auto refs = resolve_refs(o.refs, v);
      if (o.ref_min_count >= 0) {
        auto extra = refs_above(count_corpus(data, {}, o.threads), o.ref_min_count);
        refs.insert(refs.end(), extra.begin(), extra.end());
      }
      auto table = count_corpus(data, refs, o.threads);
      write_file(o.out, [&](std::ostream& f) { write_counts(f, table, config_echo(*count)); });
      out << "count: " << table.n_examples() << " examples, " << table.references().size() << " reference rows to "
          << o.out << '\n';
    } else if (surde->parsed() || perfrde->parsed()) {
      auto v = load_vocab(o.vocab);
      auto data = load_labeled(o.labeled, v);
      auto model = build_semiperfect(data, Polarity::pos);
      auto* sub = surde->parsed() ? surde : perfrde;
      write_file(o.out, [&](std::ostream& f) { write_model(f, model, config_echo(*sub)); });
      out << sub->get_name() << ": " << data.size() << " labeled examples, P(y)=" << model.ref_prob() << " to "
          << o.out << '\n';
    } else if (nb->parsed()) {
      auto v = load_vocab(o.vocab);
      auto model = naive_bayes(load_labeled(o.labeled, v));
      write_file(o.out, [&](std::ostream& f) { write_naive_bayes(f, model, config_echo(*nb)); });
      out << "train-nb: " << model.present_weights.size() << " features to " << o.out << '\n';
    } else if (serde->parsed()) {
      auto v = load_vocab(o.vocab);
      auto labeled = load_labeled(o.labeled, v);
      auto unlabeled = load_unlabeled(o.unlabeled, v);
      const auto labeled_counts = count_corpus(labeled, {}, o.threads);
      const auto candidates = candidate_references(labeled_counts, o.selection.candidate_min_count);
      if (candidates.empty()) throw InvalidArgument("no feature exceeds candidate-min-count in the labeled corpus");
      const auto unlabeled_counts = count_corpus(unlabeled, candidates, o.threads);
      auto trained = train_ensemble(labeled, labeled_counts, unlabeled_counts, candidates, o.selection, o.threads);
      if (trained.selection.truncated) {
        err << "warning: only " << candidates.size() << " candidates for k=" << o.selection.k << '\n';
      }
      if (!trained.combiner_converged) err << "warning: combiner did not reach gradient tolerance\n";
      const auto echo = config_echo(*serde);
      if (!o.counts_out.empty()) {
        write_file(o.counts_out, [&](std::ostream& f) { write_counts(f, unlabeled_counts, echo); });
      }
      write_file(o.out, [&](std::ostream& f) { write_ensemble(f, trained.model, echo); });
      out << "train-serde: " << trained.model.members.size() << " members from " << candidates.size()
          << " candidates to " << o.out << '\n';
    } else if (eval->parsed()) {
      auto v = load_vocab(o.vocab);
      auto data = load_dataset(std::filesystem::path(o.data), v);
      const auto kind = io::peek_kind(o.model);
      auto model_in = open_input(o.model);
      std::function<double(const SparseExample&)> scorer;
      if (kind == "rde-model") {
        auto m = std::make_shared<RdeModel>(read_model(model_in, o.model));
        scorer = [m](const SparseExample& x) { return m->score(x); };
      } else if (kind == "ensemble") {
        auto m = std::make_shared<EnsembleModel>(read_ensemble(model_in, o.model));
        scorer = [m](const SparseExample& x) { return m->predict(x); };
      } else if (kind == "naive-bayes") {
        auto m = std::make_shared<NaiveBayesModel>(read_naive_bayes(model_in, o.model));
        scorer = [m](const SparseExample& x) { return m->score(x); };
      } else {
        throw InvalidArgument(o.model + ": not a model file (kind '" + kind + "')");
      }
      double auc = 0.0;
      if (!o.scores_out.empty()) {
        write_file(o.scores_out, [&](std::ostream& f) {
          io::write_header(f, "scores", config_echo(*eval));
          auc = auc_of(data, scorer, &f);
        });
      } else {
        auc = auc_of(data, scorer, nullptr);
      }
      out << "eval: auc=" << io::format_double(auc) << " over " << data.size() << " examples\n";
    } else if (bounds->parsed() || diag->parsed()) {
      auto* sub = bounds->parsed() ? bounds : diag;
      auto v = load_vocab(o.vocab);
      auto labeled = load_labeled(o.labeled, v);
      auto unlabeled = load_unlabeled(o.unlabeled, v);
      std::optional<Dataset> test;
      if (!o.test.empty()) test = load_labeled(o.test, v);
      Dataset gold = !o.gold.empty()          ? load_labeled(o.gold, v)
                     : sub == diag && test ? concat(labeled, *test)
                                           : labeled;

      auto refs = resolve_refs(o.refs, v);
      if (refs.empty() || o.ref_min_count >= 0) {
        auto extra = refs_above(count_corpus(labeled, {}, o.threads), o.ref_min_count >= 0 ? o.ref_min_count : 20);
        refs.insert(refs.end(), extra.begin(), extra.end());
      }
      std::sort(refs.begin(), refs.end());
      refs.erase(std::unique(refs.begin(), refs.end()), refs.end());
      if (refs.empty()) throw InvalidArgument("no reference features selected");

      const auto labeled_counts = count_corpus(labeled, refs, o.threads);
      const auto unlabeled_counts = count_corpus(unlabeled, refs, o.threads);
      const auto perfect = build_semiperfect(gold, Polarity::pos);
      const auto echo = config_echo(*sub);
      if (sub == bounds) {
        const Dataset& eval_set = test ? *test : gold;
        std::vector<BoundReport> rows;
        for (auto r : refs) {
          rows.push_back(make_bound_report(unlabeled_counts, labeled_counts, r, perfect, eval_set.examples));
        }
        write_file(o.out, [&](std::ostream& f) {
          io::write_header(f, "bounds", echo);
          write_bound_reports(f, rows, &v);
        });
        out << "bounds: " << rows.size() << " references to " << o.out << '\n';
      } else {
        auto rows = diagnostics(refs, {unlabeled_counts, labeled_counts, *test, perfect}, o.threads);
        write_file(o.out, [&](std::ostream& f) { write_diagnostics(f, rows, &v, echo); });
        out << "diag: " << rows.size() << " references to " << o.out << '\n';
      }
    } else if (experiment->parsed()) {
      if (o.spec.empty() == o.corpus.empty()) throw InvalidArgument("experiment needs exactly one of --spec, --corpus");
      Dataset corpus;
      if (!o.spec.empty()) {
        auto in = open_input(o.spec);
        corpus = synth_generate(parse_spec(io::parse_key_values(in, o.spec)), o.n_examples);
      } else {
        Vocabulary v;
        if (!o.vocab.empty()) {
          v = load_vocab(o.vocab);
        } else {
          auto docs = read_corpus(std::filesystem::path(o.corpus));
          std::vector<std::vector<std::string>> tokens;
          for (const auto& d : docs) tokens.push_back(tokenize(d.text, FeatureKind::unigram));
          v = build_vocabulary(tokens, FeatureKind::unigram, 1);
        }
        corpus = load_dataset(std::filesystem::path(o.corpus), v);
      }
      ExperimentConfig cfg;
      cfg.n_labeled = o.n_labeled;
      cfg.n_test = o.n_test;
      cfg.n_unlabeled = o.n_unlabeled;
      cfg.methods.clear();
      for (auto m : io::split(o.methods, ',')) {
        if (!m.empty()) cfg.methods.push_back(parse_method(m));
      }
      cfg.resamples = o.resamples;
      cfg.seed = o.seed;
      cfg.selection = o.selection;
      cfg.threads = o.threads;
      auto report = run_experiment(corpus, cfg);
      write_report_table(out, report);
      if (!o.out.empty()) {
        write_file(o.out, [&](std::ostream& f) { write_report_csv(f, report, config_echo(*experiment)); });
      }
      out << "experiment: " << report.methods.size() << " methods x " << report.resamples << " resamples"
          << (o.out.empty() ? "" : " to " + o.out) << '\n';
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace rde::cli
