#include "skelgait/cross_validation.hpp"

#include <algorithm>

#include "skelgait/ados.hpp"
#include "skelgait/regression_eval.hpp"
#include "skelgait/rng.hpp"

namespace skelgait {

SvrFit fit_score_regressor(const Network& net, const Dataset& ds, const ClipConfig& clips,
                           const SvrConfig& svr) {
  std::vector<Eigen::VectorXd> features;
  std::vector<double> targets;
  for (const auto& seq : ds.sequences) {
    if (!seq.ados) continue;
    features.push_back(extract_clip_features(seq, net, clips).video);
    targets.push_back(static_cast<double>(seq.ados->score));
  }
  if (features.size() < 2) {
    throw ValidationError("score regression needs at least 2 records with ADOS scores");
  }
  return svr_fit(features, targets, svr);
}

double predict_score(const Network& net, const SvrModel& svr, const ClipConfig& clips,
                     const SkeletonSequence& seq) {
  return svr_predict(svr, extract_clip_features(seq, net, clips).video);
}

std::vector<FoldReport> cross_validate(const Dataset& ds, const EvaluationConfig& cfg) {
  validate(cfg.network);
  validate(cfg.clips);
  validate(cfg.svr);
  const SplitPlan plan = make_splits(ds, cfg.mode, cfg.folds, cfg.seed);
  const bool regress = std::all_of(ds.sequences.begin(), ds.sequences.end(),
                                   [](const SkeletonSequence& s) { return s.ados.has_value(); });
  std::vector<FoldReport> reports;
  for (std::size_t f = 0; f < plan.size(); ++f) {
    const FoldData data = materialize_fold(ds, plan, f);
    NetworkConfig net_cfg = cfg.network;
    net_cfg.seed = derive_seed(cfg.network.seed, f);
    const TrainingResult trained = train_classifier(data.train, net_cfg);

    FoldReport r;
    r.fold = f;
    r.train_records = data.train.size();
    r.test_records = data.test.size();
    r.classification_accuracy = classification_accuracy(trained.network, data.test);
    if (regress) {
      const SvrFit fit = fit_score_regressor(trained.network, data.train, cfg.clips, cfg.svr);
      std::vector<double> predicted;
      std::vector<double> actual;
      std::size_t hits = 0;
      for (const auto& seq : data.test.sequences) {
        const double p = predict_score(trained.network, fit.model, cfg.clips, seq);
        predicted.push_back(p);
        actual.push_back(static_cast<double>(seq.ados->score));
        if (tolerant_match(p, *seq.ados, cfg.tolerance)) ++hits;
      }
      const RegressionReport rr = evaluate_regression(predicted, actual, cfg.permutations,
                                                      derive_seed(cfg.seed, 1000 + f));
      r.mean_abs_error = rr.mean_abs_error;
      r.spearman = rr.spearman;
      r.p_value = rr.p_value;
      r.ados_accuracy = static_cast<double>(hits) / static_cast<double>(predicted.size());
    }
    reports.push_back(r);
  }
  return reports;
}

}  // namespace skelgait
