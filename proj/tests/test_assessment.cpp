#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "skelgait/ados.hpp"
#include "skelgait/clip_features.hpp"
#include "skelgait/cross_validation.hpp"
#include "skelgait/errors.hpp"
#include "skelgait/gait_stats.hpp"
#include "skelgait/preprocess.hpp"
#include "skelgait/regression_eval.hpp"
#include "skelgait/rng.hpp"
#include "skelgait/splits.hpp"
#include "skelgait/svr.hpp"
#include "skelgait/synth.hpp"
#include "support.hpp"

using namespace skelgait;

namespace {

// Expected class per score for scores 6, 7, 8, 9, 10, 15, 16, worked out by hand from the
// published rules. N = NS, A = ASD, T = AUT, U = Unclassifiable.
const std::map<std::pair<int, int>, std::string> kTruth = {
    {{1, 3}, "NNNNNUT"}, {{1, 4}, "NNNNNUT"}, {{1, 5}, "NNNNNUT"}, {{1, 6}, "NNNNNAT"},
    {{1, 7}, "UUUUUAU"}, {{2, 3}, "NNAATTT"}, {{2, 4}, "NNAATTT"}, {{2, 5}, "NUATTTT"},
    {{2, 6}, "NUATTTT"}, {{2, 7}, "UUUUUUU"},
};
constexpr int kScores[] = {6, 7, 8, 9, 10, 15, 16};

AdosClass from_letter(char c) {
  switch (c) {
    case 'N': return AdosClass::NS;
    case 'A': return AdosClass::ASD;
    case 'T': return AdosClass::AUT;
    default: return AdosClass::Unclassifiable;
  }
}

Dataset subjects_dataset(std::size_t n, std::size_t frames = 3) {
  Dataset ds;
  for (std::size_t i = 0; i < n; ++i) {
    auto s = testing::random_sequence(frames, i);
    char id[16];
    std::snprintf(id, sizeof id, "subj%02zu", i);
    s.subject_id = id;
    ds.sequences.push_back(s);
  }
  return ds;
}

std::vector<Eigen::VectorXd> scalars(const std::vector<double>& xs) {
  std::vector<Eigen::VectorXd> out;
  for (double x : xs) out.push_back(Eigen::VectorXd::Constant(1, x));
  return out;
}

Network trained_small_network() {
  NetworkConfig cfg;
  cfg.channels = {4};
  cfg.seed = 3;
  auto net = make_network(cfg);
  net.trained = true;
  return net;
}

}  // namespace

TEST_CASE("ados_classify truth table") {
  for (const auto& [key, row] : kTruth) {
    const auto [module, age] = key;
    for (std::size_t k = 0; k < 7; ++k) {
      const AdosRecord r{kScores[k], module, age};
      INFO("module " << module << " age " << age << " score " << kScores[k]);
      CHECK(ados_classify(r) == from_letter(row[k]));
    }
  }
  // Branch edges outside the sampled scores.
  CHECK(ados_classify({11, 1, 6}) == AdosClass::ASD);
  CHECK(ados_classify({11, 1, 5}) == AdosClass::Unclassifiable);
  CHECK(ados_classify({0, 1, 3}) == AdosClass::NS);
  CHECK(ados_classify({5, 2, 3}) == AdosClass::Unclassifiable);
  CHECK(ados_classify({0, 2, 6}) == AdosClass::NS);
  CHECK(ados_classify({7, 1, 2}) == AdosClass::Unclassifiable);
  CHECK_THROWS_AS(ados_classify({7, 3, 4}), ValidationError);
  CHECK_THROWS_AS(ados_classify({7, 0, 4}), ValidationError);
}

TEST_CASE("ados_classify published examples") {
  CHECK(ados_classify({16, 1, 5}) == AdosClass::AUT);
  CHECK(ados_classify({7, 2, 3}) == AdosClass::NS);
  CHECK(ados_classify({8, 2, 5}) == AdosClass::ASD);
}

TEST_CASE("class names") {
  for (auto c : {AdosClass::NS, AdosClass::ASD, AdosClass::AUT, AdosClass::Unclassifiable}) {
    CHECK(parse_ados_class(to_string(c)) == c);
  }
  CHECK_FALSE(parse_ados_class("autism").has_value());
}

TEST_CASE("tolerance helpers") {
  CHECK(classify_prediction(7.6, 2, 5) == AdosClass::ASD);
  CHECK(classify_prediction(-3.0, 1, 4) == AdosClass::NS);
  // Window [6.4, 8.4] holds scores 7 and 8.
  const auto both = tolerant_classes(7.4, 2, 5, 1.0);
  CHECK(both == std::vector<AdosClass>{AdosClass::Unclassifiable, AdosClass::ASD});
  // No integer in [7.1, 7.3]: falls back to round(7.2) = 7.
  CHECK(tolerant_classes(7.2, 2, 5, 0.1) == std::vector<AdosClass>{AdosClass::Unclassifiable});
  CHECK(tolerant_classes(-3.0, 1, 4, 0.5) == std::vector<AdosClass>{AdosClass::NS});
  CHECK(tolerant_match(7.4, {8, 2, 5}, 1.0));
  CHECK_FALSE(tolerant_match(7.4, {8, 2, 5}, 0.5));
  CHECK(tolerant_match(7.6, {8, 2, 5}, 0.0));
  CHECK_THROWS_AS(tolerant_classes(7.0, 2, 5, -1.0), ConfigError);
}

TEST_CASE("make_splits") {
  SUBCASE("20 subjects in block mode give consecutive pairs") {
    const auto plan = make_splits(subjects_dataset(20), SplitMode::block);
    REQUIRE(plan.size() == 10);
    for (std::size_t f = 0; f < 10; ++f) {
      char a[16], b[16];
      std::snprintf(a, sizeof a, "subj%02zu", 2 * f);
      std::snprintf(b, sizeof b, "subj%02zu", 2 * f + 1);
      CHECK(plan.folds[f] == std::vector<std::string>{a, b});
    }
  }
  SUBCASE("partition and determinism") {
    Rng rng(31);
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = 10 + rng.below(30);
      const auto ds = subjects_dataset(n, 1);
      const auto mode = trial % 2 ? SplitMode::random : SplitMode::block;
      const auto plan = make_splits(ds, mode, 10, static_cast<std::uint64_t>(trial));
      std::multiset<std::string> seen;
      for (const auto& fold : plan.folds) {
        CHECK(fold.size() >= n / 10);
        CHECK(fold.size() <= n / 10 + 1);
        seen.insert(fold.begin(), fold.end());
      }
      const auto all = ds.subjects();
      CHECK(seen == std::multiset<std::string>(all.begin(), all.end()));
      CHECK(make_splits(ds, mode, 10, static_cast<std::uint64_t>(trial)).folds == plan.folds);
    }
    const auto ds = subjects_dataset(30, 1);
    CHECK(make_splits(ds, SplitMode::random, 10, 1).folds != make_splits(ds, SplitMode::random, 10, 2).folds);
  }
  SUBCASE("augmented records follow their subject") {
    const auto ds = augment_dataset(subjects_dataset(23, 4), 9);
    REQUIRE(ds.size() == 23 * 8);
    const auto plan = make_splits(ds, SplitMode::random, 10, 4);
    for (std::size_t f = 0; f < plan.size(); ++f) {
      const auto data = materialize_fold(ds, plan, f);
      CHECK(data.test.size() % 8 == 0);
      CHECK(data.test.size() == 8 * plan.folds[f].size());
      CHECK(data.train.size() + data.test.size() == ds.size());
      const auto test_ids = data.test.subjects();
      for (const auto& id : data.train.subjects()) {
        CHECK_FALSE(std::binary_search(test_ids.begin(), test_ids.end(), id));
      }
    }
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(make_splits(subjects_dataset(9), SplitMode::block), ValidationError);
    CHECK_THROWS_AS(make_splits(subjects_dataset(9), SplitMode::block, 1), ValidationError);
    const auto plan = make_splits(subjects_dataset(10), SplitMode::block);
    CHECK_THROWS_AS(materialize_fold(subjects_dataset(10), plan, 10), ValidationError);
  }
  CHECK(parse_split_mode("block") == SplitMode::block);
  CHECK(parse_split_mode(to_string(SplitMode::random)) == SplitMode::random);
  CHECK_FALSE(parse_split_mode("kfold").has_value());
}

TEST_CASE("svr_fit") {
  std::vector<double> xs;
  for (int i = 0; i < 50; ++i) xs.push_back(-2.0 + 7.0 * i / 49.0);
  const auto features = scalars(xs);
  std::vector<double> line;
  for (double x : xs) line.push_back(2.0 * x + 1.0);

  SUBCASE("noiseless line") {
    SvrConfig cfg;
    cfg.epsilon = 0.1;
    const auto fit = svr_fit(features, line, cfg);
    CHECK(std::abs(fit.model.weights[0] - 2.0) <= 0.1);
    CHECK(std::abs(fit.model.bias - 1.0) <= 0.15);
    CHECK(std::abs(svr_predict(fit.model, Eigen::VectorXd::Constant(1, 3.0)) - 7.0) <= 0.2);
    // The optimum is the flattest line that stays inside the tube over x in [-2, 5]:
    // (2 - w) * 7 = 2 * epsilon, with no hinge loss left.
    const double w_star = 2.0 - 0.2 / 7.0;
    CHECK(svr_objective(fit.model, features, line) <= 1.01 * 0.5 * w_star * w_star);
  }
  SUBCASE("constant target with small C") {
    SvrConfig cfg;
    cfg.C = 0.01;
    const std::vector<double> y(xs.size(), 4.0);
    const auto fit = svr_fit(features, y, cfg);
    CHECK(std::abs(fit.model.weights[0]) <= 0.05);
    for (double x : xs) {
      CHECK(std::abs(svr_predict(fit.model, Eigen::VectorXd::Constant(1, x)) - 4.0) <= cfg.epsilon + 1e-9);
    }
  }
  SUBCASE("determinism, best-iterate history, never worse than zero") {
    Rng rng(12);
    std::vector<Eigen::VectorXd> f;
    std::vector<double> y;
    for (int i = 0; i < 40; ++i) {
      Eigen::VectorXd v(3);
      for (auto& e : v) e = rng.uniform(-1.0, 1.0);
      f.push_back(v);
      y.push_back(3.0 * v[0] - v[2] + rng.normal(0.0, 0.3));
    }
    SvrConfig cfg;
    cfg.seed = 5;
    cfg.epochs = 100;
    const auto a = svr_fit(f, y, cfg);
    const auto b = svr_fit(f, y, cfg);
    CHECK(a.model.weights == b.model.weights);
    CHECK(a.model.bias == b.model.bias);
    REQUIRE(a.objective_history.size() == 100);
    for (std::size_t e = 1; e < a.objective_history.size(); ++e) {
      CHECK(a.objective_history[e] <= a.objective_history[e - 1]);
    }
    SvrModel zero = a.model;
    zero.weights.setZero();
    zero.bias = 0.0;
    CHECK(svr_objective(a.model, f, y) <= svr_objective(zero, f, y));
    CHECK(svr_objective(a.model, f, y) == a.objective_history.back());
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(svr_fit(features, std::vector<double>(3, 1.0)), ShapeError);
    CHECK_THROWS_AS(svr_fit(scalars({1.0}), {1.0}), ValidationError);
    auto mixed = features;
    mixed[4] = Eigen::VectorXd::Zero(2);
    CHECK_THROWS_AS(svr_fit(mixed, line), ShapeError);
    SvrConfig bad;
    bad.C = 0.0;
    CHECK_THROWS_AS(svr_fit(features, line, bad), ConfigError);
    bad = {};
    bad.epsilon = -0.1;
    CHECK_THROWS_AS(svr_fit(features, line, bad), ConfigError);
  }
}

TEST_CASE("svr_predict") {
  SvrModel m;
  m.weights = Eigen::VectorXd::Zero(3);
  m.bias = 12.0;
  CHECK(svr_predict(m, Eigen::VectorXd::Constant(3, 5.0)) == 12.0);
  m.weights << 0.5, -2.0, 1.25;
  Rng rng(1);
  for (int i = 0; i < 50; ++i) {
    Eigen::VectorXd a(3), b(3);
    for (auto& e : a) e = rng.uniform(-3.0, 3.0);
    for (auto& e : b) e = rng.uniform(-3.0, 3.0);
    CHECK(svr_predict(m, a + b) + svr_predict(m, Eigen::VectorXd::Zero(3)) ==
          doctest::Approx(svr_predict(m, a) + svr_predict(m, b)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(svr_predict(m, Eigen::VectorXd::Zero(2)), ShapeError);
}

TEST_CASE("evaluate_regression and spearman") {
  const std::vector<double> actual = {7, 10, 15, 20};
  const auto hand = evaluate_regression({8, 9, 16, 19}, actual, 2000, 1);
  CHECK(*hand.spearman == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(hand.mean_abs_error == 1.0);

  const auto same = evaluate_regression(actual, actual, 100, 1);
  CHECK(same.mean_abs_error == 0.0);
  CHECK(*same.spearman == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(*spearman({20, 15, 10, 7}, actual) == doctest::Approx(-1.0).epsilon(1e-12));

  CHECK(average_ranks({3.0, 1.0, 2.0, 2.0}) == std::vector<double>{4.0, 1.0, 2.5, 2.5});
  CHECK_FALSE(spearman({1.0, 2.0}, {2.0, 1.0}).has_value());
  CHECK_FALSE(spearman({1.0, 1.0, 1.0}, {1.0, 2.0, 3.0}).has_value());
  const auto short_report = evaluate_regression({1.0, 2.0}, {2.0, 4.0});
  CHECK(short_report.mean_abs_error == 1.5);
  CHECK_FALSE(short_report.p_value.has_value());
  CHECK_THROWS_AS(spearman({1.0}, {1.0, 2.0}), ShapeError);
  CHECK_THROWS_AS(evaluate_regression({}, {}), ValidationError);

  SUBCASE("strictly monotone transforms keep the coefficient") {
    Rng rng(6);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> p, a;
      for (int i = 0; i < 12; ++i) {
        p.push_back(rng.uniform(-3.0, 3.0));
        a.push_back(static_cast<double>(rng.below(20)));
      }
      std::vector<double> tp;
      for (double v : p) tp.push_back(std::exp(v) + 3.0 * v);
      const auto r0 = spearman(p, a), r1 = spearman(tp, a);
      REQUIRE(r0.has_value());
      CHECK(*r1 == doctest::Approx(*r0).epsilon(1e-12));
    }
  }
  SUBCASE("permutation p-value") {
    std::vector<double> x, y;
    for (int i = 0; i < 10; ++i) {
      x.push_back(i);
      y.push_back(i * i);
    }
    const auto r = evaluate_regression(x, y, 999, 3);
    // Only the identity and its reversal reach |rho| = 1: about 2 / 10! of permutations.
    CHECK(*r.p_value == doctest::Approx(0.001).epsilon(1e-9));
    CHECK(evaluate_regression(x, y, 999, 3).p_value == r.p_value);
    const auto noise = evaluate_regression({1, 2, 3, 4, 5, 6}, {3, 1, 6, 2, 5, 4}, 2000, 8);
    CHECK(*noise.p_value > 0.2);
  }
}

TEST_CASE("synthesize") {
  SynthConfig cfg;
  cfg.n_td = 7;
  cfg.n_asd = 5;
  cfg.frames = 12;
  cfg.seed = 2;
  const auto ds = synthesize(cfg);
  REQUIRE(ds.size() == 12);
  CHECK(ds.sequences == synthesize(cfg).sequences);
  auto other = cfg;
  other.seed = 3;
  CHECK(ds.sequences != synthesize(other).sequences);
  std::size_t td = 0, asd = 0;
  for (const auto& s : ds.sequences) {
    CHECK(s.frames() == 12);
    CHECK(s.joints() == kBodyJoints);
    CHECK(s.provenance.is_original());
    REQUIRE(s.ados.has_value());
    if (s.label == Label::TD) {
      ++td;
      CHECK(s.subject_id.rfind("td_", 0) == 0);
      CHECK(s.ados->score <= 6);
    } else {
      ++asd;
      CHECK(s.subject_id.rfind("asd_", 0) == 0);
      CHECK(s.ados->score >= 7);
      CHECK(s.ados->score <= 20);
    }
    for (double v : s.data.values()) CHECK(std::isfinite(v));
  }
  CHECK(td == 7);
  CHECK(asd == 5);
  CHECK(synthesize(SynthConfig{0, 0}).size() == 0);

  SUBCASE("config errors") {
    for (auto bad : {SynthConfig{.asymmetry_ratio = 0.0}, SynthConfig{.speed_ratio = -1.0},
                     SynthConfig{.noise_sigma = -0.1}, SynthConfig{.frames = 0}}) {
      CHECK_THROWS_AS(synthesize(bad), ConfigError);
    }
  }
  SUBCASE("neutral settings leave the groups indistinguishable") {
    SynthConfig neutral;
    neutral.slant_deg = 0.0;
    neutral.asymmetry_ratio = 1.0;
    neutral.speed_ratio = 1.0;
    neutral.seed = 5;
    const auto p = population_summary(preprocess_dataset(synthesize(neutral), PreprocessConfig{}));
    for (const auto& row : p.rows) {
      INFO(row.metric);
      CHECK(std::abs(row.first_median - row.second_median) <= std::max(row.first_iqr, row.second_iqr));
    }
  }
  SUBCASE("injected effects show up in the statistics") {
    SynthConfig c;
    c.n_td = 30;
    c.n_asd = 30;
    c.seed = 6;
    const auto p = population_summary(preprocess_dataset(synthesize(c), PreprocessConfig{}));
    CHECK(p.rows[0].second_median > p.rows[0].first_median);
    CHECK(p.rows[3].second_median >= 2.0 * p.rows[3].first_median);
  }
}

TEST_CASE("extract_clip_features") {
  const auto net = trained_small_network();
  const ClipConfig cfg{5, 4};
  const auto d = static_cast<Eigen::Index>(net.embedding_dim());

  SUBCASE("two full clips") {
    const auto f = extract_clip_features(testing::random_sequence(10, 3), net, cfg);
    CHECK(f.clips.size() == 2);
    CHECK(f.video.size() == 4 * d);
    CHECK(f.video.segment(0, d) == f.clips[0]);
    CHECK(f.video.segment(d, d) == f.clips[1]);
    CHECK(f.video.tail(2 * d).isZero());
  }
  SUBCASE("a short last clip is padded by repetition, extra clips are dropped") {
    const auto f = extract_clip_features(testing::random_sequence(12, 4), net, cfg);
    CHECK(f.clips.size() == 3);
    const auto long_f = extract_clip_features(testing::random_sequence(40, 4), net, cfg);
    CHECK(long_f.clips.size() == 4);
    CHECK(long_f.video.size() == 4 * d);
  }
  SUBCASE("constant sequence gives identical clips") {
    auto s = testing::random_sequence(1, 9);
    SkeletonSequence constant;
    constant.data = Tensor3(3, 15, kBodyJoints);
    for (std::size_t c = 0; c < 3; ++c) {
      for (std::size_t t = 0; t < 15; ++t) {
        for (std::size_t j = 0; j < kBodyJoints; ++j) constant.data(c, t, j) = s.data(c, 0, j);
      }
    }
    const auto f = extract_clip_features(constant, net, cfg);
    REQUIRE(f.clips.size() == 3);
    CHECK(f.clips[0] == f.clips[1]);
    CHECK(f.clips[1] == f.clips[2]);
  }
  SUBCASE("swapping clips permutes the embeddings") {
    const auto s = testing::random_sequence(10, 5);
    auto swapped = s;
    for (std::size_t c = 0; c < 3; ++c) {
      for (std::size_t t = 0; t < 10; ++t) {
        for (std::size_t j = 0; j < kBodyJoints; ++j) swapped.data(c, t, j) = s.data(c, (t + 5) % 10, j);
      }
    }
    const auto a = extract_clip_features(s, net, cfg);
    const auto b = extract_clip_features(swapped, net, cfg);
    CHECK(a.video != b.video);
    CHECK(a.clips[0] == b.clips[1]);
    CHECK(a.clips[1] == b.clips[0]);
  }
  SUBCASE("errors") {
    auto untrained = net;
    untrained.trained = false;
    CHECK_THROWS_AS(extract_clip_features(testing::random_sequence(10, 3), untrained, cfg), ValidationError);
    CHECK_THROWS_AS(extract_clip_features(testing::random_sequence(10, 3), net, ClipConfig{0, 4}), ConfigError);
    CHECK_THROWS_AS(extract_clip_features(testing::random_sequence(10, 3), net, ClipConfig{5, 0}), ConfigError);
  }
}

TEST_CASE("cross_validate") {
  SynthConfig synth;
  synth.n_td = 6;
  synth.n_asd = 6;
  synth.frames = 16;
  synth.seed = 11;
  const auto ds = synthesize(synth);

  EvaluationConfig cfg;
  cfg.network.channels = {4, 4};
  cfg.network.epochs = 5;
  cfg.clips = {8, 2};
  cfg.svr.epochs = 50;
  cfg.folds = 3;
  cfg.permutations = 200;
  const auto reports = cross_validate(ds, cfg);
  REQUIRE(reports.size() == 3);
  for (std::size_t f = 0; f < 3; ++f) {
    CHECK(reports[f].fold == f);
    CHECK(reports[f].test_records == 4);
    CHECK(reports[f].train_records == 8);
    CHECK(reports[f].classification_accuracy >= 0.0);
    CHECK(reports[f].classification_accuracy <= 1.0);
    REQUIRE(reports[f].mean_abs_error.has_value());
    CHECK(*reports[f].mean_abs_error >= 0.0);
    REQUIRE(reports[f].ados_accuracy.has_value());
  }
  const auto again = cross_validate(ds, cfg);
  for (std::size_t f = 0; f < 3; ++f) {
    CHECK(again[f].classification_accuracy == reports[f].classification_accuracy);
    CHECK(again[f].mean_abs_error == reports[f].mean_abs_error);
    CHECK(again[f].p_value == reports[f].p_value);
  }

  auto unscored = ds;
  for (auto& s : unscored.sequences) s.ados.reset();
  for (const auto& r : cross_validate(unscored, cfg)) {
    CHECK_FALSE(r.mean_abs_error.has_value());
    CHECK_FALSE(r.spearman.has_value());
  }
  auto bad = cfg;
  bad.folds = 13;
  CHECK_THROWS_AS(cross_validate(ds, bad), ValidationError);
}
