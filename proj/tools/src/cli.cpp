#include "cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>
#include <variant>

#include <CLI11.hpp>
#include <json.hpp>

#include "run_config.hpp"
#include "skelgait/ados.hpp"
#include "skelgait/angle_features.hpp"
#include "skelgait/checkpoint.hpp"
#include "skelgait/cross_validation.hpp"
#include "skelgait/dataset_io.hpp"
#include "skelgait/errors.hpp"
#include "skelgait/gait_stats.hpp"
#include "skelgait/rng.hpp"
#include "skelgait/skepxel.hpp"

namespace skelgait::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

// ---- tables -----------------------------------------------------------------

using Cell = std::variant<std::monostate, std::string, double, long long>;

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;
};

enum class TableFormat { csv, json };

Cell cell(std::size_t v) { return static_cast<long long>(v); }
Cell cell(int v) { return static_cast<long long>(v); }
Cell cell(double v) { return v; }
Cell cell(std::string v) { return v; }
Cell cell(std::string_view v) { return std::string(v); }
template <typename T>
Cell cell(const std::optional<T>& v) {
  return v ? cell(*v) : Cell{};
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string render(const Table& t, TableFormat format) {
  std::ostringstream os;
  if (format == TableFormat::csv) {
    for (std::size_t i = 0; i < t.header.size(); ++i) os << (i ? "," : "") << t.header[i];
    os << '\n';
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) os << ',';
        std::visit(
            [&](const auto& v) {
              using V = std::decay_t<decltype(v)>;
              if constexpr (std::is_same_v<V, std::monostate>) os << "NA";
              else if constexpr (std::is_same_v<V, std::string>) os << csv_field(v);
              else if constexpr (std::is_same_v<V, double>) os << format_double(v);
              else os << v;
            },
            row[i]);
      }
      os << '\n';
    }
    return os.str();
  }
  ordered_json arr = ordered_json::array();
  for (const auto& row : t.rows) {
    ordered_json obj = ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::visit(
          [&](const auto& v) {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, std::monostate>) obj[t.header[i]] = nullptr;
            else if constexpr (std::is_same_v<V, double>) {
              if (std::isfinite(v)) obj[t.header[i]] = v;
              else obj[t.header[i]] = nullptr;
            } else obj[t.header[i]] = v;
          },
          row[i]);
    }
    arr.push_back(std::move(obj));
  }
  return arr.dump(1) + "\n";
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

void write_table(const fs::path& path, const Table& t, TableFormat format) {
  write_text(path, render(t, format));
}

TableFormat parse_table_format(const std::string& s) {
  if (s == "csv") return TableFormat::csv;
  if (s == "json") return TableFormat::json;
  throw ConfigError("--format must be csv or json, got '" + s + "'");
}

// ---- shared plumbing --------------------------------------------------------

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
};

RunConfig build_config(const Common& common) {
  RunConfig cfg;
  if (!common.config_path.empty()) load_config_file(cfg, common.config_path);
  for (const auto& o : common.overrides) apply_override(cfg, o);
  if (common.seed) cfg.seed = *common.seed;
  cfg.validate();
  return cfg;
}

DataFormat data_format(const std::string& flag, const fs::path& path) {
  if (flag.empty() || flag == "auto") return format_from_extension(path);
  const auto f = parse_data_format(flag);
  if (!f) throw ConfigError("data format must be json, csv or auto, got '" + flag + "'");
  return *f;
}

void require_distinct(const fs::path& input, const fs::path& output) {
  std::error_code ec;
  if (fs::exists(output) && fs::equivalent(input, output, ec)) {
    throw IoError("output " + output.string() + " would overwrite the input file");
  }
}

void require_body(const Dataset& ds, const char* stage) {
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (ds.sequences[i].joints() != kBodyJoints) {
      throw ValidationError(std::string(stage) + " needs 25-joint records; record " +
                            std::to_string(i) + " ('" + ds.sequences[i].subject_id + "') has " +
                            std::to_string(ds.sequences[i].joints()) +
                            " joints (run `skelgait preprocess` first)");
    }
  }
}

fs::path sibling(const fs::path& path, const std::string& suffix) {
  fs::path p = path;
  p.replace_extension();
  return fs::path(p.string() + suffix);
}

std::string safe_name(const std::string& s) {
  std::string out;
  for (char c : s) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    out += ok ? c : '_';
  }
  return out;
}

std::vector<std::size_t> selected_records(const Dataset& ds, const std::optional<std::size_t>& record) {
  std::vector<std::size_t> out;
  if (record) {
    if (*record >= ds.size()) {
      throw ValidationError("record " + std::to_string(*record) + " out of range (dataset has " +
                            std::to_string(ds.size()) + " records)");
    }
    out.push_back(*record);
  } else {
    for (std::size_t i = 0; i < ds.size(); ++i) out.push_back(i);
  }
  return out;
}

// ---- subcommands ------------------------------------------------------------

struct IoFlags {
  std::string input;
  std::string output;
  std::string input_format = "auto";
  std::string output_format = "auto";
  std::string table_format = "csv";
};

void cmd_synth(const RunConfig& cfg, const IoFlags& io, std::ostream& out) {
  const Dataset ds = synthesize(cfg.synth_config());
  save_dataset(ds, io.output, data_format(io.output_format, io.output));
  out << "synth: wrote " << ds.size() << " records to " << io.output << "\n";
}

void cmd_preprocess(const RunConfig& cfg, const IoFlags& io, std::ostream& out) {
  require_distinct(io.input, io.output);
  const Dataset in = load_dataset(io.input, data_format(io.input_format, io.input));
  Dataset ds = preprocess_dataset(in, cfg.preprocess);
  if (cfg.augment) ds = augment_dataset(ds, derive_seed(cfg.seed, 4), cfg.preprocess);
  save_dataset(ds, io.output, data_format(io.output_format, io.output));
  out << "preprocess: wrote " << ds.size() << " records to " << io.output << "\n";
}

void cmd_features(const RunConfig& cfg, const IoFlags& io, const std::string& kind,
                  const std::optional<std::size_t>& record, std::ostream& out) {
  require_distinct(io.input, io.output);
  const Dataset ds = load_dataset(io.input, data_format(io.input_format, io.input));
  Table t;
  if (kind == "matrix") {
    t.header = {"record", "subject_id", "row", "col", "value"};
  } else if (kind == "embedded") {
    t.header = {"record", "subject_id", "channel", "frame", "joint", "value"};
  } else {
    throw ConfigError("--kind must be matrix or embedded, got '" + kind + "'");
  }
  for (std::size_t r : selected_records(ds, record)) {
    const auto& seq = ds.sequences[r];
    const AngleMatrix am = sequence_angle_matrix(seq, cfg.preprocess.epsilon);
    if (kind == "matrix") {
      for (Eigen::Index i = 0; i < am.values.rows(); ++i) {
        for (Eigen::Index j = 0; j < am.values.cols(); ++j) {
          t.rows.push_back({cell(r), cell(seq.subject_id), cell(static_cast<std::size_t>(i)),
                            cell(static_cast<std::size_t>(j)), cell(am.values(i, j))});
        }
      }
    } else {
      const SkeletonSequence e = embed_angles(seq, am);
      for (std::size_t c = 0; c < e.channels(); ++c) {
        for (std::size_t f = 0; f < e.frames(); ++f) {
          for (std::size_t j = 0; j < e.joints(); ++j) {
            t.rows.push_back({cell(r), cell(seq.subject_id), cell(c), cell(f), cell(j),
                              cell(e.data(c, f, j))});
          }
        }
      }
    }
  }
  write_table(io.output, t, parse_table_format(io.table_format));
  out << "features: wrote " << t.rows.size() << " rows to " << io.output << "\n";
}

void cmd_skepxel(const RunConfig& cfg, const IoFlags& io, const std::optional<std::size_t>& record,
                 bool ppm, std::ostream& out) {
  const Dataset ds = load_dataset(io.input, data_format(io.input_format, io.input));
  require_body(ds, "skepxel");
  const fs::path dir = io.output;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
  SkepxelConfig sc = cfg.skepxel.image;
  sc.seed = derive_seed(cfg.seed, 3);
  Table index;
  index.header = {"record", "subject_id", "file", "height", "width"};
  for (std::size_t r : selected_records(ds, record)) {
    const auto& seq = ds.sequences[r];
    const SkepxelImage img = build_image(seq, sc);
    char prefix[16];
    std::snprintf(prefix, sizeof prefix, "%04zu_", r);
    const std::string stem = prefix + safe_name(seq.subject_id);
    write_image_npy(img, dir / (stem + ".npy"));
    if (ppm) write_image_ppm(img, dir / (stem + ".ppm"));
    index.rows.push_back({cell(r), cell(seq.subject_id), cell(stem + ".npy"), cell(img.height()),
                          cell(img.width())});
  }
  write_table(dir / "images.csv", index, TableFormat::csv);
  out << "skepxel: wrote " << index.rows.size() << " images to " << dir << "\n";
}

void cmd_stats(const RunConfig& cfg, const IoFlags& io, const std::string& comparison_path,
               const std::string& per_record_path, std::ostream& out) {
  require_distinct(io.input, io.output);
  const Dataset ds = load_dataset(io.input, data_format(io.input_format, io.input));
  require_body(ds, "stats");
  const TableFormat fmt = parse_table_format(io.table_format);
  const std::string ext = fmt == TableFormat::csv ? ".csv" : ".json";
  const PopulationComparison cmp = population_summary(ds, cfg.angles);

  Table summary;
  summary.header = {"group", "metric", "samples", "min", "q1", "median", "q3", "max"};
  for (const GroupSummary* g : {&cmp.first, &cmp.second}) {
    for (std::size_t k = 0; k < kSummaryMetrics.size(); ++k) {
      const auto& s = g->metrics[k];
      summary.rows.push_back({cell(g->name), cell(kSummaryMetrics[k]), cell(g->samples),
                              cell(s.min), cell(s.q1), cell(s.median), cell(s.q3), cell(s.max)});
    }
  }
  write_table(io.output, summary, fmt);

  Table comparison;
  comparison.header = {"metric", "td_median", "asd_median", "higher_median", "td_iqr", "asd_iqr"};
  for (const auto& row : cmp.rows) {
    comparison.rows.push_back({cell(row.metric), cell(row.first_median), cell(row.second_median),
                               cell(row.higher_median), cell(row.first_iqr),
                               cell(row.second_iqr)});
  }
  const fs::path cmp_path =
      comparison_path.empty() ? sibling(io.output, ".comparison" + ext) : fs::path(comparison_path);
  write_table(cmp_path, comparison, fmt);

  if (!per_record_path.empty()) {
    Table rec;
    rec.header = {"record", "subject_id", "label", "joint", "joint_name", "mean_angle",
                  "mean_motion", "mean_spine_distance"};
    for (std::size_t r = 0; r < ds.size(); ++r) {
      const auto& seq = ds.sequences[r];
      const GaitStatsReport rep = gait_report(seq, ds.topology, cfg.angles);
      for (std::size_t j = 0; j < seq.joints(); ++j) {
        rec.rows.push_back({cell(r), cell(seq.subject_id),
                            seq.label ? cell(to_string(*seq.label)) : Cell{}, cell(j),
                            cell(ds.topology.joint_names[j]), cell(rep.per_joint_mean_angle[j]),
                            cell(rep.mean_motion[j]), cell(rep.mean_spine_distance[j])});
      }
    }
    write_table(per_record_path, rec, fmt);
  }
  out << "stats: wrote " << io.output << " and " << cmp_path.string() << "\n";
}

void cmd_train(const RunConfig& cfg, const IoFlags& io, const std::string& loss_path,
               std::ostream& out) {
  require_distinct(io.input, io.output);
  const Dataset ds = load_dataset(io.input, data_format(io.input_format, io.input));
  require_body(ds, "train");
  const TrainingResult trained = train_classifier(ds, cfg.network_config());
  Checkpoint ckpt{trained.network, std::nullopt, std::nullopt};
  std::size_t scored = 0;
  for (const auto& s : ds.sequences) scored += s.ados ? 1 : 0;
  if (scored >= 2) {
    SvrConfig svr = cfg.svr;
    svr.seed = derive_seed(cfg.seed, 2);
    ckpt.clips = cfg.clips;
    ckpt.svr = fit_score_regressor(trained.network, ds, cfg.clips, svr).model;
  }
  save_checkpoint(ckpt, io.output);

  Table loss;
  loss.header = {"epoch", "loss"};
  for (std::size_t e = 0; e < trained.loss_history.size(); ++e) {
    loss.rows.push_back({cell(e), cell(trained.loss_history[e])});
  }
  const fs::path lp = loss_path.empty() ? sibling(io.output, ".loss.csv") : fs::path(loss_path);
  write_table(lp, loss, TableFormat::csv);
  out << "train: wrote " << io.output << " and " << lp.string() << " (final loss "
      << format_double(trained.loss_history.empty() ? 0.0 : trained.loss_history.back())
      << ")\n";
}

void cmd_evaluate(const RunConfig& cfg, const IoFlags& io, std::ostream& out) {
  require_distinct(io.input, io.output);
  const Dataset ds = load_dataset(io.input, data_format(io.input_format, io.input));
  require_body(ds, "evaluate");
  const auto reports = cross_validate(ds, cfg.evaluation_config());
  Table t;
  t.header = {"fold", "train_records", "test_records", "accuracy", "mae", "spearman", "p_value",
              "ados_accuracy"};
  for (const auto& r : reports) {
    t.rows.push_back({cell(r.fold), cell(r.train_records), cell(r.test_records),
                      cell(r.classification_accuracy), cell(r.mean_abs_error), cell(r.spearman),
                      cell(r.p_value), cell(r.ados_accuracy)});
  }
  write_table(io.output, t, parse_table_format(io.table_format));
  out << "evaluate: wrote " << reports.size() << " folds to " << io.output << "\n";
}

void cmd_predict(const RunConfig& cfg, const IoFlags& io, const std::string& checkpoint_path,
                 std::ostream& out) {
  require_distinct(io.input, io.output);
  const Dataset ds = load_dataset(io.input, data_format(io.input_format, io.input));
  require_body(ds, "predict");
  const Checkpoint ckpt = load_checkpoint(checkpoint_path);
  Table t;
  t.header = {"record", "subject_id", "predicted_label", "p_asd", "true_label",
              "predicted_score", "ados_class", "ados_classes_within_tolerance", "true_score"};
  for (std::size_t r = 0; r < ds.size(); ++r) {
    const auto& seq = ds.sequences[r];
    const ForwardResult f = forward_network(ckpt.network, network_input(seq, ckpt.network.config));
    const double m = f.logits.maxCoeff();
    const double e0 = std::exp(f.logits[0] - m);
    const double e1 = std::exp(f.logits[1] - m);
    const Label label = f.logits[1] > f.logits[0] ? Label::ASD : Label::TD;
    std::vector<Cell> row = {cell(r), cell(seq.subject_id), cell(to_string(label)),
                             cell(e1 / (e0 + e1)),
                             seq.label ? cell(to_string(*seq.label)) : Cell{}};
    if (ckpt.svr && ckpt.clips) {
      const double score = predict_score(ckpt.network, *ckpt.svr, *ckpt.clips, seq);
      row.push_back(cell(score));
      if (seq.ados) {
        row.push_back(cell(to_string(classify_prediction(score, seq.ados->module_id,
                                                         seq.ados->age_years))));
        std::string joined;
        for (AdosClass c : tolerant_classes(score, seq.ados->module_id, seq.ados->age_years,
                                            cfg.tolerance)) {
          joined += (joined.empty() ? "" : "|") + std::string(to_string(c));
        }
        row.push_back(cell(joined));
        row.push_back(cell(seq.ados->score));
      } else {
        row.insert(row.end(), {Cell{}, Cell{}, Cell{}});
      }
    } else {
      row.insert(row.end(), {Cell{}, Cell{}, Cell{}, seq.ados ? cell(seq.ados->score) : Cell{}});
    }
    t.rows.push_back(std::move(row));
  }
  write_table(io.output, t, parse_table_format(io.table_format));
  out << "predict: wrote " << t.rows.size() << " predictions to " << io.output << "\n";
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return kConfigError;
  if (dynamic_cast<const IoError*>(&e)) return kIoError;
  if (dynamic_cast<const Error*>(&e)) return kDataError;
  return kFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Skeleton gait analysis toolkit", "skelgait"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  Common common;
  app.add_option("--config", common.config_path, "key = value configuration file");
  app.add_option("--set", common.overrides, "override one config key (key=value); repeatable");
  app.add_option("--seed", common.seed, "shorthand for --set seed=N");

  IoFlags io;
  auto add_input = [&](CLI::App* sub) {
    sub->add_option("-i,--input", io.input, "input dataset")->required();
    sub->add_option("--input-format", io.input_format, "json, csv or auto (by extension)");
  };
  auto add_table_format = [&](CLI::App* sub) {
    sub->add_option("--format", io.table_format, "csv or json");
  };

  auto* synth = app.add_subcommand("synth", "write a synthetic TD/ASD gait dataset");
  synth->add_option("-o,--output", io.output, "output dataset")->required();
  synth->add_option("--output-format", io.output_format, "json, csv or auto (by extension)");

  auto* prep = app.add_subcommand("preprocess", "complete, align, regularize (and augment) records");
  add_input(prep);
  prep->add_option("-o,--output", io.output, "output dataset")->required();
  prep->add_option("--output-format", io.output_format, "json, csv or auto (by extension)");

  std::string kind = "matrix";
  std::optional<std::size_t> record;
  auto* feat = app.add_subcommand("features", "dump angle matrices or angle-embedded streams");
  add_input(feat);
  feat->add_option("-o,--output", io.output, "output table")->required();
  feat->add_option("--kind", kind, "matrix or embedded");
  feat->add_option("--record", record, "only this record index");
  add_table_format(feat);

  bool ppm = false;
  auto* skep = app.add_subcommand("skepxel", "export Skepxel images");
  add_input(skep);
  skep->add_option("-o,--output", io.output, "output directory")->required();
  skep->add_option("--record", record, "only this record index");
  skep->add_flag("--ppm", ppm, "also write 8-bit PPM previews");

  std::string comparison_path;
  std::string per_record_path;
  auto* stats = app.add_subcommand("stats", "gait statistics report, TD vs ASD");
  add_input(stats);
  stats->add_option("-o,--output", io.output, "five-number summary table")->required();
  stats->add_option("--comparison", comparison_path,
                    "comparison table (default: <output>.comparison.<ext>)");
  stats->add_option("--per-record", per_record_path, "optional per-record, per-joint table");
  add_table_format(stats);

  std::string loss_path;
  auto* train = app.add_subcommand("train", "train the classifier (and ADOS regressor)");
  add_input(train);
  train->add_option("-o,--output", io.output, "checkpoint file")->required();
  train->add_option("--loss", loss_path, "loss history CSV (default: <output>.loss.csv)");

  std::optional<std::string> mode;
  std::optional<std::size_t> folds;
  auto* eval = app.add_subcommand("evaluate", "subject-level k-fold evaluation");
  add_input(eval);
  eval->add_option("-o,--output", io.output, "per-fold table")->required();
  eval->add_option("--mode", mode, "block or random (split.mode)");
  eval->add_option("--folds", folds, "number of folds (split.folds)");
  add_table_format(eval);

  std::string checkpoint_path;
  auto* pred = app.add_subcommand("predict", "labels, ADOS scores and classes from a checkpoint");
  add_input(pred);
  pred->add_option("-c,--checkpoint", checkpoint_path, "checkpoint from `train`")->required();
  pred->add_option("-o,--output", io.output, "prediction table")->required();
  add_table_format(pred);

  // Name an unknown subcommand explicitly instead of CLI11's generic complaint.
  for (std::size_t i = 1; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a == "--config" || a == "--set" || a == "--seed") {
      ++i;
      continue;
    }
    if (a.empty() || a[0] == '-') continue;
    if (app.get_subcommand_no_throw(a) == nullptr) {
      err << "skelgait: error: unknown subcommand '" << a << "'\n"
          << "Run with --help for more information.\n";
      return kUsageError;
    }
    break;
  }

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }

  const std::string stage = app.get_subcommands().front()->get_name();
  try {
    if (mode) common.overrides.push_back("split.mode=" + *mode);
    if (folds) common.overrides.push_back("split.folds=" + std::to_string(*folds));
    const RunConfig cfg = build_config(common);
    if (stage == "synth") cmd_synth(cfg, io, out);
    else if (stage == "preprocess") cmd_preprocess(cfg, io, out);
    else if (stage == "features") cmd_features(cfg, io, kind, record, out);
    else if (stage == "skepxel") cmd_skepxel(cfg, io, record, ppm, out);
    else if (stage == "stats") cmd_stats(cfg, io, comparison_path, per_record_path, out);
    else if (stage == "train") cmd_train(cfg, io, loss_path, out);
    else if (stage == "evaluate") cmd_evaluate(cfg, io, out);
    else if (stage == "predict") cmd_predict(cfg, io, checkpoint_path, out);
  } catch (const std::exception& e) {
    err << "skelgait " << stage << ": error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return kSuccess;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace skelgait::cli
