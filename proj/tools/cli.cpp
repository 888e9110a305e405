#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "owl3d/bank_augment.hpp"
#include "owl3d/benchgen.hpp"
#include "owl3d/error.hpp"
#include "owl3d/match_eval.hpp"
#include "owl3d/ood_metrics.hpp"
#include "owl3d/parallel.hpp"
#include "owl3d/sceneio.hpp"

namespace owl3d::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

// Raised for argument problems CLI11 cannot see (bad enum names, bad config).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::set<std::string> to_set(const std::vector<std::string>& v) { return {v.begin(), v.end()}; }

std::size_t resolve_threads(std::optional<std::size_t> flag) {
  if (flag) return std::max<std::size_t>(1, *flag);
  if (const char* env = std::getenv("OWL3D_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
    throw UsageError(std::string("OWL3D_THREADS must be a positive integer, got \"") + env + "\"");
  }
  return 1;
}

void emit(const ojson& report, const std::string& out_path, std::ostream& out) {
  const std::string text = report.dump(2) + "\n";
  if (out_path.empty()) {
    out << text;
  } else {
    sceneio::write_file(out_path, text);
  }
}

std::pair<double, double> parse_range(const std::vector<double>& r) {
  if (r.size() != 2 || r[0] > r[1]) throw UsageError("--range expects lo,hi with lo <= hi");
  return {r[0], r[1]};
}

// ---- config file merge --------------------------------------------------

bool argv_has(const std::vector<std::string>& args, const std::string& flag) {
  return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
    return a == flag || a.rfind(flag + "=", 0) == 0;
  });
}

// Appends "--key value" for every config key not already given on the
// command line. Keys are long option names; arrays become comma lists.
std::vector<std::string> merge_config(std::vector<std::string> args) {
  std::optional<std::string> path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (!path) return args;
  nlohmann::json cfg;
  try {
    cfg = nlohmann::json::parse(sceneio::read_file(*path));
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError("config " + *path + ": invalid JSON: " + e.what());
  }
  if (!cfg.is_object()) throw UsageError("config " + *path + ": expected a JSON object");
  auto scalar = [&](const std::string& key, const nlohmann::json& v) -> std::string {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number() || v.is_boolean()) return v.dump();
    throw UsageError("config " + *path + ": unsupported value for \"" + key + "\"");
  };
  for (const auto& [key, value] : cfg.items()) {
    const std::string flag = "--" + key;
    if (key == "config" || argv_has(args, flag)) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back(flag);
      continue;
    }
    std::string text;
    if (value.is_array()) {
      for (std::size_t i = 0; i < value.size(); ++i) text += (i ? "," : "") + scalar(key, value[i]);
    } else {
      text = scalar(key, value);
    }
    args.push_back(flag);
    args.push_back(text);
  }
  return args;
}

// ---- subcommands --------------------------------------------------------

struct IngestOpts {
  std::string root, out, report;
};

int run_ingest(const IngestOpts& o, std::ostream& out) {
  const fs::path root(o.root);
  const fs::path label_dir = root / "label_2";
  if (!fs::is_directory(label_dir)) throw IoError("missing label_2/ under " + root.string());
  std::vector<std::string> ids;
  for (const auto& e : fs::directory_iterator(label_dir))
    if (e.path().extension() == ".txt") ids.push_back(e.path().stem().string());
  std::sort(ids.begin(), ids.end());

  sceneio::CloudReadStats totals;
  std::size_t objects = 0;
  for (const std::string& id : ids) {
    const auto calib = sceneio::parse_kitti_calib(sceneio::read_file(root / "calib" / (id + ".txt")));
    sceneio::SceneRecord scene;
    scene.scene_id = id;
    sceneio::CloudReadStats stats;
    scene.cloud = sceneio::read_pointcloud(root / "velodyne" / (id + ".bin"), &stats);
    totals.dropped_nonfinite += stats.dropped_nonfinite;
    totals.clamped_intensity += stats.clamped_intensity;
    try {
      scene.annotations = sceneio::parse_kitti_labels(
          sceneio::read_file(label_dir / (id + ".txt")), calib);
    } catch (const FormatError& e) {
      throw FormatError((label_dir / (id + ".txt")).string() + ": " + e.what());
    }
    sceneio::count_points(scene);
    objects += scene.annotations.size();
    sceneio::write_scene(o.out, scene);
  }
  ojson report;
  report["config"] = {{"command", "ingest-kitti"}, {"root", o.root}, {"out", o.out}};
  report["scenes"] = ids.size();
  report["objects"] = objects;
  report["dropped_nonfinite_points"] = totals.dropped_nonfinite;
  report["clamped_intensity_points"] = totals.clamped_intensity;
  emit(report, o.report, out);
  return kExitOk;
}

struct BankOpts {
  std::string scenes, out, report;
  std::vector<std::string> classes{"Misc"};
  std::size_t min_points = augment::kDefaultMinPoints;
};

int run_build_bank(const BankOpts& o, std::ostream& out) {
  const auto scenes = sceneio::read_scene_dir(o.scenes);
  const auto bank = augment::build_bank(scenes, to_set(o.classes), o.min_points);
  augment::save_bank(o.out, bank);
  ojson report;
  report["config"] = {{"command", "build-bank"}, {"scenes", o.scenes}, {"out", o.out},
                      {"classes", o.classes}, {"min_points", o.min_points}};
  report["entries"] = bank.size();
  report["bank_fingerprint"] = bench::fingerprint_hex(augment::bank_fingerprint(bank));
  emit(report, o.report, out);
  return kExitOk;
}

struct MixOpts {
  std::string bank, scenes, out, report;
  std::vector<std::string> size_classes{"Misc"};
  std::uint64_t seed = 0;
};

int run_mix(const MixOpts& o, std::ostream& out) {
  const auto bank = augment::load_bank(o.bank);
  const auto pool = augment::size_pool_from_scenes(sceneio::read_scene_dir(o.scenes),
                                                   to_set(o.size_classes));
  if (pool.dims.empty()) throw Error("size pool is empty: no objects of the requested classes");
  const auto mixed = augment::multi_size_mix(bank, pool, o.seed);
  augment::save_bank(o.out, mixed);
  ojson report;
  report["config"] = {{"command", "mix"}, {"bank", o.bank}, {"scenes", o.scenes}, {"out", o.out},
                      {"size_classes", o.size_classes}, {"seed", o.seed}};
  report["entries"] = mixed.size();
  report["size_pool"] = pool.dims.size();
  report["bank_fingerprint"] = bench::fingerprint_hex(augment::bank_fingerprint(mixed));
  emit(report, o.report, out);
  return kExitOk;
}

struct SynthOpts {
  std::string scenes, bank, out, report, manifest;
  std::optional<std::uint64_t> seed;
  std::size_t samples_per_scene = bench::kDefaultSamplesPerScene;
  std::vector<double> range{bench::kDefaultRangeLo, bench::kDefaultRangeHi};
  std::string label = "Unseen";
  std::string name = "synthetic-ood";
  std::vector<std::string> donor_classes{"Car", "Pedestrian", "Cyclist"};
};

int run_synth(const SynthOpts& o, std::size_t threads, std::ostream& out) {
  const auto scenes = sceneio::read_scene_dir(o.scenes);
  const auto bank = augment::load_bank(o.bank);
  bench::BenchmarkManifest manifest;
  if (!o.manifest.empty()) {
    manifest = bench::regenerate_benchmark(o.manifest, scenes, bank, o.out, threads);
  } else {
    if (!o.seed) throw UsageError("synth requires --seed (or --manifest to regenerate)");
    bench::SynthParams p;
    p.name = o.name;
    p.seed = *o.seed;
    p.samples_per_scene = o.samples_per_scene;
    std::tie(p.range_lo, p.range_hi) = parse_range(o.range);
    p.unseen_label = o.label;
    p.donor_classes = to_set(o.donor_classes);
    manifest = bench::freeze_benchmark(scenes, bank, p, o.out, threads);
  }
  const auto& p = manifest.params;
  ojson report;
  report["config"] = {{"command", "synth"},
                      {"scenes", o.scenes},
                      {"bank", o.bank},
                      {"out", o.out},
                      {"manifest", o.manifest},
                      {"name", p.name},
                      {"seed", p.seed},
                      {"samples_per_scene", p.samples_per_scene},
                      {"range", {p.range_lo, p.range_hi}},
                      {"label", p.unseen_label},
                      {"donor_classes", std::vector<std::string>(p.donor_classes.begin(), p.donor_classes.end())}};
  report["retained_scenes"] = manifest.scenes.size();
  report["excluded_scenes"] = manifest.excluded.size();
  emit(report, o.report, out);
  return kExitOk;
}

struct EvalOpts {
  std::string gt, dets, out, csv;
  std::size_t k = 500;
  std::vector<std::size_t> k_values;
  std::vector<double> iou{0.10, 0.25, 0.40};
  std::string iou_kind = "3d";
  std::string recall_mode = "coverage";
  std::vector<std::string> id_classes{"Car", "Pedestrian", "Cyclist"};
  std::vector<std::string> metrics;
  double temperature = 1.0;
  std::size_t num_classes = 0;
  std::string select_class;
  std::vector<double> range{0.0, 50.0};
};

std::vector<ood::ScoreMetric> resolve_metrics(const std::vector<std::string>& names, double t) {
  std::vector<ood::ScoreMetric> out;
  try {
    if (names.empty() || (names.size() == 1 && names[0] == "all")) {
      for (auto kind : ood::kAllScoreKinds) out.push_back({kind, t});
    } else {
      for (const auto& n : names) out.push_back({ood::score_kind_from_string(n), t});
    }
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (!(t > 0.0)) throw UsageError("--T must be > 0");
  return out;
}

int run_eval(const EvalOpts& o, std::size_t threads, std::ostream& out) {
  eval::EvalConfig cfg;
  cfg.proposal_k = o.k;
  cfg.iou_thresholds = o.iou;
  try {
    cfg.iou_kind = eval::iou_kind_from_string(o.iou_kind);
    cfg.recall_mode = eval::recall_mode_from_string(o.recall_mode);
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const auto metrics = resolve_metrics(o.metrics, o.temperature);
  std::vector<std::size_t> k_values = o.k_values.empty() ? std::vector<std::size_t>{o.k} : o.k_values;
  if (std::find(k_values.begin(), k_values.end(), o.k) == k_values.end()) k_values.push_back(o.k);
  std::sort(k_values.begin(), k_values.end());
  if (k_values.front() == 0) throw UsageError("--k-values must be >= 1");
  if (k_values.back() > o.k) throw UsageError("--k-values may not exceed --k");

  std::vector<sceneio::SceneAnnotations> gts;
  for (const auto& id : sceneio::list_scenes(o.gt)) {
    gts.push_back(sceneio::read_annotations(fs::path(o.gt) / "annotations" / (id + ".json")));
  }
  if (!o.select_class.empty()) {
    const auto [lo, hi] = parse_range(o.range);
    std::vector<sceneio::SceneRecord> recs;
    for (const auto& g : gts) recs.push_back({g.scene_id, {}, g.objects});
    const auto keep = bench::select_scenes(recs, o.select_class, lo, hi);
    const std::set<std::string> keep_set(keep.begin(), keep.end());
    std::erase_if(gts, [&](const auto& g) { return !keep_set.contains(g.scene_id); });
  }

  std::map<std::string, sceneio::SceneDetections> by_scene;
  for (auto& d : sceneio::read_detections(o.dets, o.num_classes)) {
    const std::string id = d.scene_id;
    if (!by_scene.emplace(id, std::move(d)).second) {
      throw FormatError(o.dets + ": duplicate scene_id \"" + id + "\"");
    }
  }
  std::size_t unused_det_scenes = 0;
  {
    std::set<std::string> gt_ids;
    for (const auto& g : gts) gt_ids.insert(g.scene_id);
    for (const auto& [id, _] : by_scene) unused_det_scenes += gt_ids.contains(id) ? 0 : 1;
  }

  std::vector<eval::SceneEval> scenes(gts.size());
  std::vector<sceneio::ScoreSpace> spaces(gts.size(), sceneio::ScoreSpace::kLogit);
  for (std::size_t i = 0; i < gts.size(); ++i) {
    scenes[i].gts = gts[i].objects;
    if (auto it = by_scene.find(gts[i].scene_id); it != by_scene.end()) {
      scenes[i].dets = eval::truncate_top_k(it->second.detections, o.k);
      spaces[i] = it->second.score_space;
    }
  }
  const auto recall = eval::recall_curve(scenes, cfg, k_values, threads);

  std::vector<ood::MatchedScene> matched(scenes.size());
  parallel_for(scenes.size(), threads, [&](std::size_t i) {
    matched[i] = {&scenes[i].gts, &scenes[i].dets, spaces[i],
                  eval::match_scene(scenes[i].gts, scenes[i].dets, cfg)};
  });

  ojson report;
  std::vector<std::string> metric_names;
  for (const auto& m : metrics) metric_names.emplace_back(ood::to_string(m.kind));
  report["config"] = {{"command", "eval"},
                      {"gt", o.gt},
                      {"dets", o.dets},
                      {"k", o.k},
                      {"k_values", k_values},
                      {"iou", cfg.iou_thresholds},
                      {"iou_kind", std::string(eval::to_string(cfg.iou_kind))},
                      {"recall_mode", std::string(eval::to_string(cfg.recall_mode))},
                      {"id_classes", o.id_classes},
                      {"metrics", metric_names},
                      {"T", o.temperature},
                      {"num_classes", o.num_classes},
                      {"select_class", o.select_class},
                      {"range", o.range}};
  report["num_scenes"] = scenes.size();
  report["unused_detection_scenes"] = unused_det_scenes;

  auto rows = ojson::array();
  for (const auto& r : recall.rows) {
    rows.push_back({{"class", r.class_label},
                    {"k", r.k},
                    {"iou_threshold", r.iou_threshold},
                    {"tp", r.tp},
                    {"fn", r.fn},
                    {"recall", r.recall ? ojson(*r.recall) : ojson(nullptr)}});
  }
  report["recall"] = std::move(rows);

  try {
    const auto ood_report = ood::evaluate_ood(matched, to_set(o.id_classes), metrics);
    ojson block;
    for (const auto& name : metric_names) {
      const auto& v = ood_report.metrics.at(name);
      block[name] = {{"auroc", v.auroc}, {"aupr", v.aupr}, {"fpr95", v.fpr95}};
    }
    block["n_id"] = ood_report.n_id;
    block["n_ood"] = ood_report.n_ood;
    block["n_unmatched_ood"] = ood_report.n_unmatched_ood;
    report["ood"] = std::move(block);
  } catch (const Error& e) {
    // Recall stays meaningful on single-population benchmarks.
    report["ood"] = nullptr;
    report["ood_skipped"] = e.what();
  }
  emit(report, o.out, out);

  if (!o.csv.empty()) {
    std::ostringstream csv;
    csv.precision(17);
    csv << "class,k,iou_threshold,tp,fn,recall\n";
    for (const auto& r : recall.rows) {
      csv << r.class_label << ',' << r.k << ',' << r.iou_threshold << ',' << r.tp << ',' << r.fn << ',';
      if (r.recall) csv << *r.recall;
      csv << '\n';
    }
    sceneio::write_file(o.csv, csv.str());
  }
  return kExitOk;
}

struct ScoreOpts {
  std::string dets, out;
  std::string metric = "Energy";
  double temperature = 1.0;
  std::size_t num_classes = 0;
};

int run_score(const ScoreOpts& o, std::ostream& out) {
  const auto metric = resolve_metrics({o.metric}, o.temperature).front();
  ojson report;
  report["config"] = {{"command", "score"}, {"dets", o.dets}, {"metric", o.metric},
                      {"T", o.temperature}, {"num_classes", o.num_classes}};
  auto scenes = ojson::array();
  for (const auto& s : sceneio::read_detections(o.dets, o.num_classes)) {
    std::vector<double> scores;
    for (const auto& d : s.detections) scores.push_back(ood::id_score(d.scores, metric, s.score_space));
    scenes.push_back({{"scene_id", s.scene_id}, {"scores", scores}});
  }
  report["scenes"] = std::move(scenes);
  emit(report, o.out, out);
  return kExitOk;
}

struct LosscheckCli {
  std::uint64_t seed = 0;
  std::size_t instances = 20;
  double epsilon = 1e-4;
  double tolerance = 1e-5;
  std::string out;
};

int run_losscheck_cmd(const LosscheckCli& o, std::ostream& out) {
  auto report = run_losscheck({o.seed, o.instances, o.epsilon, o.tolerance});
  report["config"]["command"] = "losscheck";
  emit(report, o.out, out);
  return report["pass"].get<bool>() ? kExitOk : kExitCheckFailed;
}

}  // namespace

int dispatch(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"owl3d: open-world 3D detection evaluation and OOD benchmark toolkit", "owl3d"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::size_t> threads_flag;
  std::string config_path;
  app.add_option("--threads", threads_flag, "Worker threads (fallback: OWL3D_THREADS)")
      ->check(CLI::PositiveNumber);
  app.add_option("--config", config_path, "JSON file of option defaults (flags override)");

  IngestOpts ingest;
  auto* c_ingest = app.add_subcommand("ingest-kitti", "KITTI velodyne/label_2/calib -> canonical scenes");
  c_ingest->add_option("--root", ingest.root, "KITTI split directory")->required()->check(CLI::ExistingDirectory);
  c_ingest->add_option("--out", ingest.out, "Output scene directory")->required();
  c_ingest->add_option("--report", ingest.report, "Write the summary here instead of stdout");

  BankOpts bank;
  auto* c_bank = app.add_subcommand("build-bank", "Extract an object bank from annotated scenes");
  c_bank->add_option("--scenes", bank.scenes)->required()->check(CLI::ExistingDirectory);
  c_bank->add_option("--out", bank.out)->required();
  c_bank->add_option("--classes", bank.classes)->delimiter(',')->capture_default_str();
  c_bank->add_option("--min-points", bank.min_points)->capture_default_str();
  c_bank->add_option("--report", bank.report);

  MixOpts mix;
  auto* c_mix = app.add_subcommand("mix", "Multi-size mix of an object bank");
  c_mix->add_option("--bank", mix.bank)->required()->check(CLI::ExistingDirectory);
  c_mix->add_option("--scenes", mix.scenes, "Scenes providing the size pool")->required()->check(CLI::ExistingDirectory);
  c_mix->add_option("--size-classes", mix.size_classes)->delimiter(',')->capture_default_str();
  c_mix->add_option("--seed", mix.seed)->required();
  c_mix->add_option("--out", mix.out)->required();
  c_mix->add_option("--report", mix.report);

  SynthOpts synth;
  auto* c_synth = app.add_subcommand("synth", "Freeze a synthetic OOD benchmark");
  c_synth->add_option("--scenes", synth.scenes)->required()->check(CLI::ExistingDirectory);
  c_synth->add_option("--bank", synth.bank)->required()->check(CLI::ExistingDirectory);
  c_synth->add_option("--out", synth.out)->required();
  c_synth->add_option("--seed", synth.seed);
  c_synth->add_option("--manifest", synth.manifest, "Regenerate from a stored manifest")->check(CLI::ExistingFile);
  c_synth->add_option("--samples-per-scene", synth.samples_per_scene)->capture_default_str();
  c_synth->add_option("--range", synth.range)->delimiter(',')->expected(2)->capture_default_str();
  c_synth->add_option("--label", synth.label)->capture_default_str();
  c_synth->add_option("--name", synth.name)->capture_default_str();
  c_synth->add_option("--donor-classes", synth.donor_classes)->delimiter(',')->capture_default_str();
  c_synth->add_option("--report", synth.report);

  EvalOpts ev;
  auto* c_eval = app.add_subcommand("eval", "Recall and OOD classification report");
  c_eval->add_option("--gt", ev.gt, "Scene directory with annotations/")->required()->check(CLI::ExistingDirectory);
  c_eval->add_option("--dets", ev.dets, "Detections (JSON Lines)")->required()->check(CLI::ExistingFile);
  c_eval->add_option("--k", ev.k, "Proposal budget")->capture_default_str()->check(CLI::PositiveNumber);
  c_eval->add_option("--k-values", ev.k_values, "Recall curve budgets (<= k)")->delimiter(',');
  c_eval->add_option("--iou", ev.iou)->delimiter(',')->capture_default_str();
  c_eval->add_option("--iou-kind", ev.iou_kind)->capture_default_str();
  c_eval->add_option("--recall-mode", ev.recall_mode, "coverage | one-to-one")->capture_default_str();
  c_eval->add_option("--id-classes", ev.id_classes)->delimiter(',')->capture_default_str();
  c_eval->add_option("--metrics", ev.metrics, "Score metrics or 'all'")->delimiter(',');
  c_eval->add_option("--T", ev.temperature, "Energy temperature")->capture_default_str();
  c_eval->add_option("--num-classes", ev.num_classes, "Score vector length (0 = infer)")->capture_default_str();
  c_eval->add_option("--select-class", ev.select_class, "Keep scenes holding this class within --range");
  c_eval->add_option("--range", ev.range)->delimiter(',')->expected(2)->capture_default_str();
  c_eval->add_option("--out", ev.out);
  c_eval->add_option("--csv", ev.csv, "Also write the recall table as CSV");

  ScoreOpts sc;
  auto* c_score = app.add_subcommand("score", "Apply an OOD score metric to detection logits");
  c_score->add_option("--dets", sc.dets)->required()->check(CLI::ExistingFile);
  c_score->add_option("--metric", sc.metric)->capture_default_str();
  c_score->add_option("--T", sc.temperature)->capture_default_str();
  c_score->add_option("--num-classes", sc.num_classes)->capture_default_str();
  c_score->add_option("--out", sc.out);

  LosscheckCli lc;
  auto* c_loss = app.add_subcommand("losscheck", "Finite-difference check of every loss gradient");
  c_loss->add_option("--seed", lc.seed)->capture_default_str();
  c_loss->add_option("--instances", lc.instances)->capture_default_str()->check(CLI::PositiveNumber);
  c_loss->add_option("--epsilon", lc.epsilon)->capture_default_str();
  c_loss->add_option("--tolerance", lc.tolerance)->capture_default_str();
  c_loss->add_option("--out", lc.out);

  if (raw_args.empty()) {
    err << app.help();
    return kExitUsage;
  }

  try {
    std::vector<std::string> args = merge_config(raw_args);
    std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "Run with --help for usage.\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    const std::size_t threads = resolve_threads(threads_flag);
    if (*c_ingest) return run_ingest(ingest, out);
    if (*c_bank) return run_build_bank(bank, out);
    if (*c_mix) return run_mix(mix, out);
    if (*c_synth) return run_synth(synth, threads, out);
    if (*c_eval) return run_eval(ev, threads, out);
    if (*c_score) return run_score(sc, out);
    if (*c_loss) return run_losscheck_cmd(lc, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  err << app.help();
  return kExitUsage;
}

int dispatch(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dispatch(args, std::cout, std::cerr);
}

}  // namespace owl3d::cli
