// Command-line front end: train, detect, evaluate, bench, sweep, synth.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fundus/fundus.hpp"
#include "fundus/pipeline/crop_dir.hpp"
#include "fundus/pipeline/image_io.hpp"

namespace fs = std::filesystem;
using namespace fundus;
using namespace fundus::pipeline;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNotFound = 2;
constexpr int kExitIo = 3;

constexpr const char* kCacheEnv = "FUNDUS_CACHE_DIR";

struct Globals {
  std::string config_path;
  std::vector<std::string> overrides;
  bool quiet = false;
};

PipelineConfig build_config(const Globals& g) {
  PipelineConfig cfg = g.config_path.empty() ? PipelineConfig{} : load_config(g.config_path);
  for (const auto& kv : g.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw invalid_input("--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

fs::path model_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv(kCacheEnv); env && *env) return env;
  return "fundus_model";
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw io_error("cannot create " + dir.string() + ": " + ec.message());
}

void dump_trace(const fs::path& dir, const std::string& stem, const DetectTrace& t) {
  make_dir(dir);
  auto path = [&](const std::string& what) { return (dir / (stem + "_" + what + ".png")).string(); };
  for (std::size_t i = 0; i < t.saliency.per_scale.size(); ++i)
    write_image(path("saliency_s" + std::to_string(t.saliency.scales_used[i])), normalized_for_display(t.saliency.per_scale[i]));
  write_image(path("saliency"), normalized_for_display(t.saliency.values));
  write_image(path("interest"), mask_to_raster(t.interest.mask));
  if (t.vessels.binary.width() > 0) write_image(path("vessels"), mask_to_raster(t.vessels.binary));
  if (t.skeleton.width() > 0) write_image(path("skeleton"), mask_to_raster(t.skeleton));
  if (!t.main_course.points.empty()) vasculature::save_points_csv((dir / (stem + "_main_course.csv")).string(), t.main_course);
}

struct DetectArgs {
  std::vector<std::string> images;
  std::string model;
  std::string out;
  std::string vessels;
  std::string templ;
  std::string dump_dir;
  bool timings = false;
  bool od_only = false;
};

struct Detector {
  PipelineConfig cfg;
  classifier::TrainedValidator validator;
  std::optional<Raster> templ;
};

Detector make_detector(const Globals& g, const std::string& model, const std::string& templ_flag) {
  Detector d{build_config(g), load_artifacts(model_dir(model)), std::nullopt};
  const std::string templ = templ_flag.empty() ? d.cfg.template_path : templ_flag;
  if (!templ.empty()) d.templ = read_image(templ);
  return d;
}

LandmarkReport run_one(const Detector& d, const fs::path& image, const DetectArgs& a) {
  const Raster rgb = read_rgb(image.string());
  std::optional<Raster> vessels;
  if (!a.vessels.empty()) vessels = read_image(a.vessels);
  DetectOptions opt;
  opt.vessel_map = vessels ? &*vessels : nullptr;
  opt.macula_template = d.templ ? &*d.templ : nullptr;
  opt.optic_disc_only = a.od_only;
  DetectTrace trace;
  auto report = detect(rgb, image.filename().string(), d.cfg, d.validator, opt, a.dump_dir.empty() ? nullptr : &trace);
  if (!a.dump_dir.empty()) dump_trace(a.dump_dir, image.stem().string(), trace);
  return report;
}

int cmd_detect(const Globals& g, const DetectArgs& a) {
  if (!a.vessels.empty() && a.images.size() != 1) throw invalid_input("--vessels applies to a single image");
  const Detector d = make_detector(g, a.model, a.templ);
  std::vector<LandmarkReport> reports;
  bool all_found = true;
  for (const auto& img : a.images) {
    reports.push_back(run_one(d, img, a));
    const auto& r = reports.back();
    all_found = all_found && r.od.found;
    if (a.out.empty()) {
      std::cout << report_to_json(r, a.timings).dump(2) << '\n';
    } else {
      make_dir(a.out);
      save_report((fs::path(a.out) / (fs::path(img).stem().string() + ".json")).string(), r, a.timings);
    }
    if (!r.od.found && !g.quiet)
      std::cerr << img << ": optic disc not found (best score " << r.od.score << ")\n";
  }
  if (!a.out.empty()) {
    std::ofstream os(fs::path(a.out) / "summary.csv");
    if (!os) throw io_error("cannot write summary in " + a.out);
    write_summary_csv(os, reports);
  }
  return all_found ? kExitOk : kExitNotFound;
}

int cmd_train(const Globals& g, const std::string& crops, const std::string& model) {
  const PipelineConfig cfg = build_config(g);
  const auto set = load_crop_directory(crops);
  TrainingStats st;
  const auto v = train_validator(set, cfg, &st);
  const fs::path dir = model_dir(model);
  save_artifacts(dir, v);
  if (!g.quiet) {
    std::cout << "trained on " << st.crops << " crops (";
    for (int k = 0; k < classifier::kClassCount; ++k)
      std::cout << (k ? ", " : "") << classifier::kClassNames[k] << ' ' << st.per_class[k];
    std::cout << "), " << st.blocks << " HOG blocks, " << v.model.log_likelihood_trace.size() << " EM iterations\n"
              << "artifacts written to " << dir.string() << '\n';
  }
  return kExitOk;
}

int cmd_evaluate(const Globals& g, const std::string& images, const std::string& annotations, const std::string& model,
                 const std::string& dataset, const std::string& out) {
  const auto truth = load_annotations(annotations);
  const auto files = list_images(images);
  std::vector<LandmarkReport> reports;
  if (!files.empty()) {
    const Detector d = make_detector(g, model, "");
    DetectArgs a;
    for (const auto& f : files) {
      try {
        reports.push_back(run_one(d, f, a));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::Io && e.code() != ErrorCode::Format) throw;
        std::cerr << "warning: skipped " << f.string() << ": " << e.what() << '\n';
        continue;
      }
      if (!out.empty()) {
        make_dir(out);
        save_report((fs::path(out) / (f.stem().string() + ".json")).string(), reports.back());
      }
    }
  }
  const auto ev = evaluate_reports(reports, truth);
  for (const auto& w : ev.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << kAccuracyHeader << '\n';
  write_accuracy_row(std::cout, dataset.empty() ? fs::path(images).filename().string() : dataset, ev);
  if (!out.empty()) {
    make_dir(out);
    std::ofstream per(fs::path(out) / "per_image.csv");
    write_per_image(per, ev);
    std::ofstream sum(fs::path(out) / "summary.csv");
    write_summary_csv(sum, reports);
  }
  return kExitOk;
}

int cmd_bench(const Globals& g, const std::string& image, const std::string& model, int repeats) {
  const Detector d = make_detector(g, model, "");
  const Raster rgb = read_rgb(image);
  const auto rows = bench(rgb, d.cfg, d.validator, repeats);
  std::cout << "stage,median_ms,samples\n";
  for (const auto& r : rows) std::cout << r.stage << ',' << detail::fixed(r.median_ms, 2) << ',' << r.samples << '\n';
  return kExitOk;
}

int cmd_sweep(const Globals& g, const std::string& crops, const std::string& test_crops,
              const std::vector<std::pair<std::string, std::string>>& ranges, const std::string& out) {
  const PipelineConfig cfg = build_config(g);
  std::vector<SweepRange> parsed;
  for (const auto& [param, text] : ranges)
    if (!text.empty()) parsed.push_back({param, parse_sweep_values(text)});
  if (parsed.empty()) throw invalid_input("sweep: give at least one of --Z, --K, --V");

  auto all = load_crop_directory(crops);
  std::vector<TrainingCrop> train, test;
  if (test_crops.empty()) {
    // Every fifth crop of each class is held out.
    std::vector<int> seen(classifier::kClassCount, 0);
    for (auto& c : all) (seen[c.label]++ % 5 == 4 ? test : train).push_back(std::move(c));
  } else {
    train = std::move(all);
    test = load_crop_directory(test_crops);
  }
  const auto rows = sweep(train, test, cfg, parsed);
  if (out.empty()) {
    write_sweep_csv(std::cout, rows);
  } else {
    std::ofstream os(out);
    if (!os) throw io_error("cannot write " + out);
    write_sweep_csv(os, rows);
  }
  return kExitOk;
}

struct SynthArgs {
  std::uint64_t seed = 1;
  int count = 20;
  int first = 0;
  std::string out;
  std::string crops;
  int crop_images = CropSetOptions{}.images;
  int per_class = CropSetOptions{}.per_class;
  int negatives = CropSetOptions{}.negatives;
  std::uint64_t crop_seed = CropSetOptions{}.seed;
  bool degenerated = false;
  bool vessels = false;
};

int cmd_synth(const Globals& g, const SynthArgs& a) {
  if (a.out.empty() && a.crops.empty()) throw invalid_input("synth: give --out, --crops or both");
  if (!a.out.empty()) {
    if (a.count < 1) throw invalid_input("synth: count must be >= 1");
    make_dir(a.out);
    std::vector<GroundTruth> truth;
    for (int i = a.first; i < a.first + a.count; ++i) {
      SyntheticScene s = make_scene(a.seed, i);
      s.degenerated_macula = a.degenerated;
      char name[64];
      std::snprintf(name, sizeof name, "synthetic_%04d.png", i);
      write_image((fs::path(a.out) / name).string(), render_scene(s));
      truth.push_back({name, s.od_center, s.od_diameter / 2.0, s.fovea});
      if (a.vessels) {
        Raster map(s.width, s.height, 1);
        SyntheticScene only = s;
        only.lesions.clear();
        // The vessel mask is the difference between the scene with and
        // without its strokes.
        SyntheticScene bare = only;
        bare.vessels.clear();
        const Raster with = render_scene(only), without = render_scene(bare);
        for (int y = 0; y < s.height; ++y)
          for (int x = 0; x < s.width; ++x) map.at(x, y) = without.at(x, y, 1) - with.at(x, y, 1) > 0.03 ? 1.0 : 0.0;
        make_dir(fs::path(a.out) / "vessels");
        write_image((fs::path(a.out) / "vessels" / name).string(), map);
      }
    }
    save_annotations((fs::path(a.out) / "annotations.csv").string(), truth);
    if (!g.quiet) std::cout << "wrote " << a.count << " images to " << a.out << '\n';
  }
  if (!a.crops.empty()) {
    CropSetOptions opt;
    opt.images = a.crop_images;
    opt.per_class = a.per_class;
    opt.negatives = a.negatives;
    opt.seed = a.crop_seed;
    const auto crops = make_training_crops(opt, build_config(g));
    save_crop_directory(a.crops, crops);
    if (!g.quiet) std::cout << "wrote " << crops.size() << " training crops to " << a.crops << '\n';
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optic disc and fovea detection in colour fundus photographs"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "key=value configuration file")->check(CLI::ExistingFile);
  app.add_option("--set", g.overrides, "override one configuration key (key=value); repeatable");
  app.add_flag("-q,--quiet", g.quiet, "suppress progress messages");

  auto* train = app.add_subcommand("train", "learn the vocabulary, topic model and neighbour set from labelled crops");
  std::string train_crops, train_model;
  train->add_option("--crops", train_crops, "directory with one sub-directory per class")->required();
  train->add_option("--model", train_model, std::string("output directory (default: $") + kCacheEnv + " or ./fundus_model)");

  auto* det = app.add_subcommand("detect", "locate optic disc, fovea and macula in one or more images");
  DetectArgs da;
  det->add_option("images", da.images, "fundus images")->required()->check(CLI::ExistingFile);
  det->add_option("--model", da.model, "trained model directory");
  det->add_option("--out", da.out, "write one JSON report per image plus summary.csv here instead of stdout");
  det->add_option("--vessels", da.vessels, "external binary vessel map (nonzero = vessel)")->check(CLI::ExistingFile);
  det->add_option("--template", da.templ, "healthy macula template image")->check(CLI::ExistingFile);
  det->add_option("--dump-dir", da.dump_dir, "write intermediate maps as PNG");
  det->add_flag("--timings", da.timings, "include per-stage timings in the reports");
  det->add_flag("--od-only", da.od_only, "stop after the optic disc");

  auto* eval = app.add_subcommand("evaluate", "score detections against annotations");
  std::string ev_images, ev_ann, ev_model, ev_name, ev_out;
  eval->add_option("--images", ev_images, "directory of fundus images")->required();
  eval->add_option("--annotations", ev_ann, "CSV image,od_x,od_y,od_r,fovea_x,fovea_y")->required();
  eval->add_option("--model", ev_model, "trained model directory");
  eval->add_option("--dataset", ev_name, "dataset name for the accuracy row");
  eval->add_option("--out", ev_out, "write reports, per_image.csv and summary.csv here");

  auto* ben = app.add_subcommand("bench", "median per-stage timings");
  std::string bench_image, bench_model;
  int repeats = 5;
  ben->add_option("image", bench_image, "fundus image")->required()->check(CLI::ExistingFile);
  ben->add_option("--model", bench_model, "trained model directory");
  ben->add_option("--repeats", repeats, "number of runs")->check(CLI::PositiveNumber);

  auto* swp = app.add_subcommand("sweep", "validation accuracy against topics (Z), neighbours (K) and words (V)");
  std::string sw_crops, sw_test, sw_out, sw_z, sw_k, sw_v;
  swp->add_option("--crops", sw_crops, "training crop directory")->required();
  swp->add_option("--test-crops", sw_test, "held-out crop directory (default: every fifth crop)");
  swp->add_option("--Z", sw_z, "topic counts, e.g. 5,15,30 or 5:40:5");
  swp->add_option("--K", sw_k, "neighbour counts");
  swp->add_option("--V", sw_v, "vocabulary sizes");
  swp->add_option("--out", sw_out, "CSV output file (default: stdout)");

  auto* syn = app.add_subcommand("synth", "render synthetic fundus images and training crops");
  SynthArgs sa;
  syn->add_option("--seed", sa.seed, "scene seed");
  syn->add_option("--count", sa.count, "number of images");
  syn->add_option("--first", sa.first, "index of the first scene (0 is the fixed reference layout)");
  syn->add_option("--out", sa.out, "image directory; annotations.csv is written alongside");
  syn->add_flag("--degenerated", sa.degenerated, "add a bright lesion on the fovea");
  syn->add_flag("--vessels", sa.vessels, "also write the ground-truth vessel masks to <out>/vessels");
  syn->add_option("--crops", sa.crops, "write a labelled crop directory here");
  syn->add_option("--crop-images", sa.crop_images, "scenes used for crops");
  syn->add_option("--per-class", sa.per_class, "crops per disc class");
  syn->add_option("--negatives", sa.negatives, "non-disc crops");
  syn->add_option("--crop-seed", sa.crop_seed, "seed of the crop scenes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*train) return cmd_train(g, train_crops, train_model);
    if (*det) return cmd_detect(g, da);
    if (*eval) return cmd_evaluate(g, ev_images, ev_ann, ev_model, ev_name, ev_out);
    if (*ben) return cmd_bench(g, bench_image, bench_model, repeats);
    if (*swp) return cmd_sweep(g, sw_crops, sw_test, {{"Z", sw_z}, {"K", sw_k}, {"V", sw_v}}, sw_out);
    if (*syn) return cmd_synth(g, sa);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::Io || e.code() == ErrorCode::Format ? kExitIo : kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitUsage;
}
