#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "rde/auc.hpp"
#include "rde/bounds.hpp"
#include "rde/diagnostics.hpp"
#include "rde/error.hpp"
#include "rde/experiment.hpp"
#include "rde/naive_bayes.hpp"
#include "rde/synthetic.hpp"
#include "rde/text_io.hpp"
#include "support.hpp"

namespace rde {
namespace {

const Label P = Label::pos;
const Label N = Label::neg;

TEST(RocAuc, PerfectOrdering) {
  std::vector<double> s{0.1, 0.4, 0.5, 0.9};
  std::vector<Label> y{N, N, P, P};
  EXPECT_EQ(roc_auc(s, y).auc, 1.0);
}

TEST(RocAuc, AllTied) {
  std::vector<double> s(6, 2.0);
  std::vector<Label> y{N, P, N, P, P, N};
  EXPECT_EQ(roc_auc(s, y).auc, 0.5);
}

TEST(RocAuc, HandExample) {
  std::vector<double> s{0.9, 0.8, 0.3, 0.2};
  std::vector<Label> y{P, N, P, N};
  auto r = roc_auc(s, y);
  EXPECT_EQ(r.auc, 0.75);
  EXPECT_EQ(r.n_pos, 2u);
  EXPECT_EQ(r.n_neg, 2u);
}

TEST(RocAuc, CurveEndpoints) {
  std::vector<double> s{0.9, 0.8, 0.8, 0.2};
  std::vector<Label> y{P, N, P, N};
  auto r = roc_auc(s, y, true);
  ASSERT_EQ(r.curve.size(), 4u);
  EXPECT_EQ(r.curve.front().fpr, 0.0);
  EXPECT_EQ(r.curve.front().tpr, 0.0);
  EXPECT_EQ(r.curve.back().fpr, 1.0);
  EXPECT_EQ(r.curve.back().tpr, 1.0);
  double area = 0.0;
  for (std::size_t i = 1; i < r.curve.size(); ++i) {
    area += (r.curve[i].fpr - r.curve[i - 1].fpr) * (r.curve[i].tpr + r.curve[i - 1].tpr) / 2;
  }
  EXPECT_DOUBLE_EQ(area, r.auc);
}

TEST(RocAuc, RejectsBadInput) {
  std::vector<double> s{1, 2};
  EXPECT_THROW(roc_auc(s, std::vector<Label>{P, P}), InvalidArgument);
  EXPECT_THROW(roc_auc(s, std::vector<Label>{P, Label::unlabeled}), InvalidArgument);
  EXPECT_THROW(roc_auc(s, std::vector<Label>{P}), InvalidArgument);
  std::vector<double> nan{1, std::nan("")};
  EXPECT_THROW(roc_auc(nan, std::vector<Label>{P, N}), InvalidArgument);
}

TEST(RocAucProperty, MatchesPairwiseOracle) {
  Rng rng(51);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2 + rng.below(800);
    std::vector<double> s(n);
    std::vector<Label> y(n);
    const auto levels = 1 + rng.below(50);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(rng.below(levels)) + (trial % 2 ? rng.uniform() : 0.0);
      y[i] = rng.bernoulli(0.3) ? P : N;
    }
    y[0] = P;
    y[1] = N;
    EXPECT_EQ(roc_auc(s, y).auc, test::pairwise_auc(s, y));
  }
}

TEST(RocAucProperty, InvariantUnderMonotoneTransform) {
  Rng rng(52);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + rng.below(300);
    std::vector<double> s(n), t(n);
    std::vector<Label> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = std::round(rng.normal() * 4) / 4;
      t[i] = std::exp(3 * s[i]) - 7;
      y[i] = rng.bernoulli(0.5) ? P : N;
    }
    y[0] = P;
    y[1] = N;
    EXPECT_EQ(roc_auc(s, y).auc, roc_auc(t, y).auc);
  }
}

TEST(Spearman, RanksWithTies) {
  std::vector<double> a{1, 2, 3, 4}, b{10, 20, 30, 40}, c{4, 3, 2, 1};
  EXPECT_DOUBLE_EQ(spearman(a, b), 1.0);
  EXPECT_DOUBLE_EQ(spearman(a, c), -1.0);
  std::vector<double> d{1, 1, 2, 2}, e{5, 5, 5, 5};
  EXPECT_DOUBLE_EQ(spearman(a, d), 4.0 / std::sqrt(20.0));
  EXPECT_EQ(spearman(a, e), 0.0);
  EXPECT_THROW(spearman(std::vector<double>{1}, std::vector<double>{1}), InvalidArgument);
}

TEST(Synthetic, ZeroRatesGiveEmptyExamples) {
  auto spec = SyntheticSpec::independent(0.5, std::vector<double>(5, 0.0), std::vector<double>(5, 0.0), 1);
  auto d = synth_generate(spec, 200);
  for (const auto& x : d.examples) EXPECT_TRUE(x.empty());
  EXPECT_TRUE(d.fully_labeled());
}

TEST(Synthetic, PerfectIndicator) {
  auto spec = SyntheticSpec::independent(0.3, {1.0, 0.5}, {0.0, 0.5}, 2);
  PopulationStats pop(spec);
  EXPECT_DOUBLE_EQ(*pop.imbalance(0), 1.0);
  EXPECT_NEAR(*pop.imbalance(1), 0.0, 1e-15);
  auto d = synth_generate(spec, 500);
  for (std::size_t i = 0; i < d.size(); ++i) EXPECT_EQ(d.examples[i].contains(0), d.labels[i] == P);
}

TEST(Synthetic, EmpiricalMarginalsWithinBinomialTolerance) {
  auto spec = random_independent_spec(20, 53);
  const std::size_t n = 100000;
  auto t = count_corpus(synth_generate(spec, n), {});
  for (FeatureId j = 0; j < 20; ++j) {
    const double p = spec.p_pos * spec.pos[0].q[j] + (1 - spec.p_pos) * spec.neg[0].q[j];
    const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(n));
    EXPECT_NEAR(t.p(j), p, 3 * sigma + 1e-12) << "feature " << j;
  }
}

TEST(Synthetic, SameSeedSameData) {
  ZipfMixtureParams params;
  params.n_features = 50;
  auto a = synth_generate(zipf_mixture_spec(params, 9), 300);
  auto b = synth_generate(zipf_mixture_spec(params, 9), 300);
  EXPECT_EQ(a.examples, b.examples);
  EXPECT_EQ(a.labels, b.labels);
  auto c = synth_generate(zipf_mixture_spec(params, 10), 300);
  EXPECT_NE(a.examples, c.examples);
}

TEST(Synthetic, ValidationErrors) {
  auto spec = SyntheticSpec::independent(0.5, {0.2}, {0.3}, 1);
  spec.p_pos = 1.0;
  EXPECT_THROW(spec.validate(), InvalidArgument);
  spec.p_pos = 0.5;
  spec.pos[0].weight = 0.0;
  EXPECT_THROW(spec.validate(), InvalidArgument);
  EXPECT_THROW(SyntheticSpec::independent(0.5, {0.2}, {1.3}, 1), InvalidArgument);
  EXPECT_THROW(SyntheticSpec::independent(0.5, {0.2, 0.1}, {0.3}, 1), InvalidArgument);
}

TEST(Synthetic, ParseSpec) {
  std::istringstream in("p_pos=0.25\nseed=4\npos.0.weight=1\npos.0.q=0.1,0.9\nneg.0.weight=2\nneg.0.q=0.5,0.5\n"
                        "neg.1.weight=1\nneg.1.q=0.0,1.0\n");
  auto spec = parse_spec(io::parse_key_values(in, "spec"));
  EXPECT_EQ(spec.p_pos, 0.25);
  EXPECT_EQ(spec.seed, 4u);
  ASSERT_EQ(spec.neg.size(), 2u);
  EXPECT_EQ(spec.neg[1].q, (std::vector<double>{0.0, 1.0}));
  EXPECT_FALSE(spec.conditionally_independent());

  std::istringstream preset("preset=zipf_mixture\nn_features=30\n");
  auto z = parse_spec(io::parse_key_values(preset, "spec"));
  EXPECT_EQ(z.n_features(), 30u);
  EXPECT_EQ(z.p_pos, ZipfMixtureParams{}.p_pos);

  std::istringstream bad("preset=other\n");
  EXPECT_THROW(parse_spec(io::parse_key_values(bad, "spec")), InvalidArgument);
}

TEST(PopulationStats, IndependentSpecHasNoDependence) {
  auto spec = random_independent_spec(8, 54);
  PopulationStats pop(spec);
  for (FeatureId j = 0; j < 8; ++j) {
    for (FeatureId r = 0; r < 8; ++r) {
      if (j == r) continue;
      EXPECT_NEAR(pop.dependence(j, r, P), 0.0, 1e-12);
      EXPECT_NEAR(pop.dependence(j, r, N), 0.0, 1e-12);
      const double total = spec.p_pos * spec.pos[0].q[j] * spec.pos[0].q[r] +
                           (1 - spec.p_pos) * spec.neg[0].q[j] * spec.neg[0].q[r];
      EXPECT_NEAR(pop.p_joint(j, r), total, 1e-15);
    }
  }
}

TEST(PopulationStats, ImbalanceOnHandPickedSpecs) {
  // (p_pos, q_pos, q_neg, expected I)
  struct Case {
    double p_pos, q_pos, q_neg, expected;
  };
  const Case cases[] = {
      {0.5, 0.4, 0.2, (0.2 - 0.1) / 0.3},
      {0.2, 0.5, 0.5, 0.0},
      {0.75, 0.0, 0.6, -3.0},
  };
  for (const auto& c : cases) {
    auto spec = SyntheticSpec::independent(c.p_pos, {c.q_pos}, {c.q_neg}, 1);
    EXPECT_NEAR(*PopulationStats(spec).imbalance(0), c.expected, 1e-15);
  }
}

TEST(PopulationStats, MixingBreaksConditionalIndependence) {
  auto spec = mix_specs(SyntheticSpec::independent(0.5, {0.9, 0.9}, {0.1, 0.1}, 1),
                        SyntheticSpec::independent(0.5, {0.1, 0.1}, {0.9, 0.9}, 2), 0.5);
  PopulationStats pop(spec);
  const test::MixtureOracle oracle(spec);
  EXPECT_GT(pop.dependence(0, 1, P), 0.5);
  EXPECT_NEAR(pop.p_joint(0, 1), oracle.p2(0, 1), 1e-15);
  double total = 0.0;
  for (const auto& x : test::enumerate_support(2)) total += pop.example_probability(x);
  EXPECT_NEAR(total, 1.0, 1e-15);
}

TEST(NaiveBayes, TwoDocumentToy) {
  auto d = test::make_dataset(2, {{0}, {1}}, {P, N});
  auto nb = naive_bayes(d);
  EXPECT_NEAR(nb.score(SparseExample::from_ids({0})), std::log(4.0), 1e-12);
  EXPECT_NEAR(nb.score(SparseExample{}), 0.0, 1e-12);
  EXPECT_NEAR(nb.score(SparseExample::from_ids({0, 1})), 0.0, 1e-12);
  EXPECT_NEAR(nb.score(SparseExample::from_ids({1})), -std::log(4.0), 1e-12);
}

TEST(NaiveBayes, PositiveOnlyFeatureRaisesScore) {
  auto d = test::make_dataset(2, {{0, 1}, {1}, {1}, {}}, {P, P, N, N});
  auto nb = naive_bayes(d);
  EXPECT_GT(nb.present_weights[0], 0.0);
  EXPECT_GT(nb.score(SparseExample::from_ids({0})), nb.score(SparseExample{}));
}

TEST(NaiveBayes, MirroredDataNegatesScores) {
  Rng rng(55);
  auto d = test::random_labeled(rng, 60, 6, 0.3);
  // swap classes and mirror features j <-> 5 - j
  auto mirror = [](const SparseExample& x) {
    std::vector<FeatureId> ids;
    for (auto j : x.ids()) ids.push_back(5 - j);
    return SparseExample::from_ids(std::move(ids));
  };
  Dataset m = d;
  for (std::size_t i = 0; i < d.size(); ++i) {
    m.labels[i] = d.labels[i] == P ? N : P;
    m.examples[i] = mirror(d.examples[i]);
  }
  auto a = naive_bayes(d);
  auto b = naive_bayes(m);
  for (const auto& x : d.examples) EXPECT_NEAR(b.score(mirror(x)), -a.score(x), 1e-12);
}

TEST(NaiveBayes, FileRoundTrip) {
  Rng rng(56);
  auto nb = naive_bayes(test::random_labeled(rng, 40, 5, 0.4));
  std::stringstream ss;
  write_naive_bayes(ss, nb, "labeled=a.tsv");
  EXPECT_EQ(read_naive_bayes(ss), nb);
}

TEST(NaiveBayes, RejectsUnlabeled) {
  auto d = test::make_dataset(1, {{0}, {}}, {P, Label::unlabeled});
  EXPECT_THROW(naive_bayes(d), InvalidArgument);
}

Dataset benchmark_corpus(std::size_t n, std::uint64_t seed) {
  ZipfMixtureParams params;
  params.n_features = 300;
  return synth_generate(zipf_mixture_spec(params, seed), n);
}

TEST(Split, DisjointAndSized) {
  auto corpus = benchmark_corpus(3000, 1);
  ExperimentConfig cfg;
  cfg.n_unlabeled = 700;
  auto s = make_split(corpus, cfg, 2);
  EXPECT_EQ(s.labeled.size(), 500u);
  EXPECT_EQ(s.test.size(), 1000u);
  EXPECT_EQ(s.unlabeled.size(), 700u);
  std::vector<std::size_t> all = s.labeled;
  all.insert(all.end(), s.test.begin(), s.test.end());
  all.insert(all.end(), s.unlabeled.begin(), s.unlabeled.end());
  std::sort(all.begin(), all.end());
  EXPECT_EQ(std::adjacent_find(all.begin(), all.end()), all.end());
  EXPECT_NE(make_split(corpus, cfg, 3).labeled, s.labeled);
  cfg.n_test = 3000;
  EXPECT_THROW(make_split(corpus, cfg, 0), InvalidArgument);
}

TEST(Experiment, SingleResampleHasZeroSpread) {
  ExperimentConfig cfg;
  cfg.resamples = 1;
  cfg.methods = {Method::surde, Method::nb};
  auto report = run_experiment(benchmark_corpus(3000, 2), cfg);
  ASSERT_EQ(report.methods.size(), 2u);
  EXPECT_EQ(report.find(Method::nb)->stddev, 0.0);
  EXPECT_EQ(report.find(Method::perfrde), nullptr);
}

TEST(Experiment, EmptyMethodList) {
  ExperimentConfig cfg;
  cfg.methods.clear();
  auto report = run_experiment(benchmark_corpus(2000, 3), cfg);
  EXPECT_TRUE(report.methods.empty());
  std::ostringstream out;
  write_report_csv(out, report);
  EXPECT_NE(out.str().find("method,resample,auc"), std::string::npos);
}

TEST(Experiment, PerfectBeatsSupervised) {
  ExperimentConfig cfg;
  cfg.methods = {Method::surde, Method::perfrde};
  auto report = run_experiment(benchmark_corpus(6000, 4), cfg);
  const auto& su = report.find(Method::surde)->aucs;
  const auto& perf = report.find(Method::perfrde)->aucs;
  int wins = 0;
  for (std::size_t i = 0; i < su.size(); ++i) wins += perf[i] >= su[i];
  EXPECT_GE(wins, 4);
}

TEST(Experiment, EnsembleBetweenSupervisedAndPerfectWhenIndependent) {
  ExperimentConfig cfg;
  cfg.methods = {Method::surde, Method::serde, Method::perfrde};
  cfg.n_labeled = 200;
  cfg.selection.k = 30;
  const auto spec = random_independent_spec(200, 57, 0.15);
  auto report = run_experiment(synth_generate(spec, 12000), cfg);
  const auto& su = report.find(Method::surde)->aucs;
  const auto& se = report.find(Method::serde)->aucs;
  const auto& perf = report.find(Method::perfrde)->aucs;
  int between = 0;
  for (std::size_t i = 0; i < su.size(); ++i) between += su[i] <= se[i] && se[i] <= perf[i];
  EXPECT_GE(between, 4) << "SuRDE " << report.find(Method::surde)->mean << " SeRDE "
                        << report.find(Method::serde)->mean << " PerfRDE " << report.find(Method::perfrde)->mean;
}

TEST(Experiment, ReportFormats) {
  ExperimentConfig cfg;
  cfg.resamples = 2;
  cfg.methods = {Method::nb};
  auto report = run_experiment(benchmark_corpus(2000, 5), cfg);
  std::ostringstream csv, table;
  write_report_csv(csv, report, "seed=1");
  write_report_table(table, report);
  EXPECT_TRUE(csv.str().starts_with("#rde experiment v1\n#config seed=1\nmethod,resample,auc\nNB,0,"));
  EXPECT_NE(csv.str().find("NB,mean,"), std::string::npos);
  EXPECT_NE(table.str().find("NB"), std::string::npos);
  EXPECT_EQ(parse_method("SeRDE"), Method::serde);
  EXPECT_THROW(parse_method("svm"), InvalidArgument);
}

TEST(Diagnostics, IndependentCorpusMatchesSemiperfect) {
  const auto spec = random_independent_spec(40, 58, 0.3);
  auto all = synth_generate(spec, 2000000);
  std::vector<std::size_t> eval_idx;
  for (std::size_t i = 0; i < 3000; ++i) eval_idx.push_back(i);
  auto eval = all.subset(eval_idx);
  std::vector<FeatureId> cands(40);
  std::iota(cands.begin(), cands.end(), 0);
  auto counts = count_corpus(all, cands);
  auto perfect = build_semiperfect(all, Polarity::pos);
  auto rows = diagnostics(cands, {counts, counts, eval, perfect});
  const auto perfect_auc = roc_auc(perfect.score_all(eval.examples), eval.labels).auc;
  const double alpha = imbalance(counts).prior.alpha;
  double scale = 0.0;
  for (const auto& x : eval.examples) scale += std::abs((1 + alpha) * perfect.score(x) / alpha);
  scale /= static_cast<double>(eval.size());
  int checked = 0;
  for (const auto& row : rows) {
    // sampling noise grows as the normalizer P(r) I(r) shrinks
    if (!row.i_r || std::abs(*row.i_r) * counts.p(row.reference) < 0.01) continue;
    ++checked;
    ASSERT_TRUE(row.dist);
    EXPECT_LT(*row.dist, 0.1 * scale) << "reference " << row.reference;
    EXPECT_NEAR(row.auc, perfect_auc, 0.02) << "reference " << row.reference;
  }
  EXPECT_GT(checked, 3);
}

TEST(Diagnostics, ZeroImbalanceLeavesBlanks) {
  auto d = test::make_dataset(2, {{0, 1}, {0}, {1}, {}}, {P, P, N, N});
  const std::vector<FeatureId> cands{0, 1};
  auto counts = count_corpus(d, cands);
  auto perfect = build_semiperfect(d, Polarity::pos);
  auto rows = diagnostics(cands, {counts, counts, d, perfect});
  ASSERT_EQ(rows.size(), 2u);
  const auto& zero = rows[0].reference == 1 ? rows[0] : rows[1];
  EXPECT_FALSE(zero.dist);
  EXPECT_FALSE(zero.m);
  std::ostringstream out;
  write_diagnostics(out, rows, nullptr, "x=1");
  EXPECT_NE(out.str().find("ref_token,i_r,auc,dist,t3_first_term,m,sign_ok\n"), std::string::npos);
  EXPECT_NE(out.str().find("f1,0,"), std::string::npos);
}

TEST(Diagnostics, AucTracksDistanceOnMixedCorpus) {
  auto all = benchmark_corpus(20000, 6);
  std::vector<std::size_t> eval_idx, rest;
  for (std::size_t i = 0; i < all.size(); ++i) (i < 1000 ? eval_idx : rest).push_back(i);
  auto eval = all.subset(eval_idx);
  auto unlabeled = all.subset(rest);
  std::fill(unlabeled.labels.begin(), unlabeled.labels.end(), Label::unlabeled);
  std::vector<FeatureId> cands(100);
  std::iota(cands.begin(), cands.end(), 0);
  auto rows = diagnostics(cands, {count_corpus(unlabeled, cands), count_corpus(all, cands), eval,
                                  build_semiperfect(all, Polarity::pos)});
  std::vector<double> aucs, log_dist;
  for (const auto& row : rows) {
    if (!row.dist) continue;
    aucs.push_back(row.auc);
    log_dist.push_back(std::log(*row.dist));
  }
  EXPECT_LT(spearman(aucs, log_dist), 0.0);
}

}  // namespace
}  // namespace rde
