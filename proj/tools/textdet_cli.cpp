#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "textdet/config.hpp"
#include "textdet/corpus.hpp"
#include "textdet/eval.hpp"
#include "textdet/pipeline.hpp"
#include "textdet/raster_io.hpp"
#include "textdet/serialize.hpp"

namespace fs = std::filesystem;
using namespace textdet;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kIoFailure = 2, kNumericFailure = 3 };

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNumeric:
      return kNumericFailure;
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kSpecTooDense:
      return kUsage;
    default:
      return kIoFailure;
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kMissingFile, "missing file: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

struct ConfigOptions {
  std::string file;
  std::vector<std::string> assignments;

  void attach(CLI::App* app) {
    app->add_option("--config", file, "key=value config file");
    app->add_option("--set", assignments, "override one config key (key=value)");
  }

  RunConfig resolve() const {
    RunConfig config = file.empty() ? RunConfig{} : load_config(file);
    for (const std::string& a : assignments) {
      const auto eq = a.find('=');
      if (eq == std::string::npos) throw Error(ErrorCode::kInvalidArgument, "--set expects key=value, got " + a);
      set_config_value(config, a.substr(0, eq), a.substr(eq + 1));
    }
    config.validate();
    return config;
  }
};

// ---- detect ---------------------------------------------------------------

struct DetectOptions {
  std::vector<std::string> images;
  std::string saliency_dir;
  std::string block_model;
  std::string centroid_model;
  std::string centroid_dir;
  std::string out_dir;
  std::string debug_dir;
  bool words = false;
  bool overlay = false;
  bool dump_profile = false;
  int jobs = 1;
  ConfigOptions config;
};

struct DetectOutput {
  std::string name;
  std::string json;
  std::optional<GrayImage> overlay;
  ProbabilityMap saliency;
  PipelineResult result;
  GrayImage image;
};

DetectOutput detect_one(const DetectOptions& opt, const RunConfig& config, const fs::path& image_path,
                        const PixelNet* block_net, const PixelNet* centroid_net) {
  DetectOutput out;
  out.name = image_path.stem().string();
  out.image = load_image(image_path);
  if (!opt.saliency_dir.empty()) {
    out.saliency = load_probability_map(fs::path(opt.saliency_dir) / (out.name + ".pgm"));
    if (out.saliency.width() != out.image.width() || out.saliency.height() != out.image.height()) {
      throw Error(ErrorCode::kDimensionMismatch, "saliency map size differs from " + image_path.string());
    }
  } else {
    out.saliency = compute_saliency(*block_net, out.image, config.scales);
  }
  std::optional<CentroidMapper> mapper;
  if (centroid_net) {
    mapper = net_mapper(*centroid_net);
  } else if (!opt.centroid_dir.empty()) {
    ProbabilityMap map = load_probability_map(fs::path(opt.centroid_dir) / (out.name + ".pgm"));
    if (map.width() != out.image.width() || map.height() != out.image.height()) {
      throw Error(ErrorCode::kDimensionMismatch, "centroid map size differs from " + image_path.string());
    }
    mapper = image_map_mapper(std::move(map));
  }
  out.result = run_pipeline(out.image, out.saliency, mapper ? &*mapper : nullptr, config);
  out.json = detections_to_json(image_path.filename().string(), out.result.detections, config.filter.words);
  if (opt.overlay) {
    std::vector<OrientedRect> boxes;
    for (const Detection& d : out.result.detections) {
      if (config.filter.words && !d.words.empty()) {
        boxes.insert(boxes.end(), d.words.begin(), d.words.end());
      } else {
        boxes.push_back(d.box);
      }
    }
    out.overlay = render_overlay(out.image, boxes);
  }
  return out;
}

void write_debug(const fs::path& dir, const DetectOutput& out, const RunConfig& config, bool dump_profile) {
  fs::create_directories(dir);
  save_probability_map(dir / "saliency.pgm", out.saliency);
  GrayImage blocks(out.image.width(), out.image.height());
  for (const BlockTrace& t : out.result.traces) {
    for (const Pixel& p : t.block.region.pixels) blocks.at(p.x, p.y) = 255;
  }
  save_image(dir / "blocks.pgm", blocks);
  std::vector<OrientedRect> boxes;
  for (const LineCandidate& c : out.result.candidates) boxes.push_back(c.box);
  save_image(dir / "candidates.pgm", render_overlay(out.image, boxes));
  write_text(dir / "trace.json", trace_to_json(out.result.traces));
  if (!dump_profile) return;
  for (const BlockTrace& t : out.result.traces) {
    if (t.components.empty()) continue;
    const ProjectionProfile profile = build_profile(t.components, t.block, config.candidates.angle_step);
    std::ostringstream csv;
    csv << "angle,offset,count\n";
    for (std::size_t a = 0; a < profile.angles.size(); ++a) {
      for (int h = 0; h < profile.offsets_per_angle; ++h) {
        const int count = profile.count(a, h);
        if (count > 0) csv << profile.angles[a] << ',' << profile.min_offset + h << ',' << count << '\n';
      }
    }
    write_text(dir / ("profile_block" + std::to_string(t.block.id) + ".csv"), csv.str());
  }
}

int cmd_detect(const DetectOptions& opt) {
  RunConfig config = opt.config.resolve();
  if (opt.words) config.filter.words = true;
  if (opt.saliency_dir.empty() && opt.block_model.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "detect needs --block-model or --saliency-dir");
  }
  std::optional<PixelNet> block_net;
  std::optional<PixelNet> centroid_net;
  if (opt.saliency_dir.empty()) block_net = load_model(opt.block_model);
  if (!opt.centroid_model.empty()) centroid_net = load_model(opt.centroid_model);
  if (!centroid_net && opt.centroid_dir.empty()) {
    std::cerr << "note: no centroid model; emitting unfiltered line candidates\n";
  }
  fs::create_directories(opt.out_dir);

  const std::size_t n = opt.images.size();
  std::vector<std::optional<DetectOutput>> outputs(n);
  std::vector<std::exception_ptr> failures(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        outputs[i] = detect_one(opt, config, opt.images[i], block_net ? &*block_net : nullptr,
                                centroid_net ? &*centroid_net : nullptr);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(opt.jobs, static_cast<int>(n)));
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  for (std::size_t i = 0; i < n; ++i) {
    if (failures[i]) std::rethrow_exception(failures[i]);
    const DetectOutput& out = *outputs[i];
    write_text(fs::path(opt.out_dir) / (out.name + ".json"), out.json);
    if (out.overlay) save_image(fs::path(opt.out_dir) / (out.name + ".overlay.pgm"), *out.overlay);
    if (!opt.debug_dir.empty()) write_debug(fs::path(opt.debug_dir) / out.name, out, config, opt.dump_profile);
    std::cout << out.name << ": " << out.result.detections.size() << " detections\n";
  }
  return kOk;
}

// ---- train ----------------------------------------------------------------

struct TrainCliOptions {
  std::string kind = "block";
  std::string corpus;
  std::string output;
  std::string loss_csv;
  int iterations = 2000;
  int log_interval = 100;
  std::optional<double> learning_rate;
  std::optional<double> momentum;
  std::optional<double> weight_decay;
  std::optional<std::uint64_t> seed;
};

int cmd_train(const TrainCliOptions& opt) {
  PixelNetConfig config = opt.kind == "block" ? PixelNetConfig::text_block() : PixelNetConfig::character_centroid();
  if (opt.learning_rate) config.learning_rate = *opt.learning_rate;
  if (opt.momentum) config.momentum = *opt.momentum;
  if (opt.weight_decay) config.weight_decay = *opt.weight_decay;
  if (opt.seed) config.seed = *opt.seed;
  config.validate();

  const std::vector<TrainingExample> corpus = load_training_pairs(opt.corpus);
  std::ostringstream csv;
  csv << "iteration,loss\n";
  TrainOptions train_options;
  train_options.iterations = opt.iterations;
  train_options.log_interval = opt.log_interval;
  train_options.on_log = [&](int it, double loss) {
    csv << it << ',' << loss << '\n';
    std::cout << it << ',' << loss << std::endl;
  };
  std::cout << "iteration,loss\n";
  const PixelNet net = train(PixelNet(config), corpus, train_options);
  save_model(opt.output, net);
  if (!opt.loss_csv.empty()) write_text(opt.loss_csv, csv.str());
  std::cerr << "wrote " << opt.output << " (" << net.parameter_count() << " parameters)\n";
  return kOk;
}

// ---- synth ----------------------------------------------------------------

struct SynthCliOptions {
  std::string spec_file;
  std::string out_dir;
  int count = 10;
  std::optional<std::uint64_t> seed;
  int negatives = 1;
};

int cmd_synth(const SynthCliOptions& opt) {
  if (opt.count < 1) throw Error(ErrorCode::kInvalidArgument, "count must be positive");
  SynthSpec spec = opt.spec_file.empty() ? SynthSpec{} : load_synth_spec(opt.spec_file);
  if (opt.seed) spec.seed = *opt.seed;
  spec.validate();
  PatchOptions patches;
  patches.negatives_per_scene = opt.negatives;
  const CorpusSummary summary = write_corpus(opt.out_dir, spec, opt.count, patches);
  std::cout << "wrote " << summary.scenes << " scenes and " << summary.patches << " centroid patches to "
            << opt.out_dir << "\n";
  return kOk;
}

// ---- eval -----------------------------------------------------------------

struct EvalCliOptions {
  std::string detections_dir;
  std::string gt_dir;
  std::string protocol = "rotated";
  std::string output;
  bool words = false;
  ConfigOptions config;
};

int cmd_eval(const EvalCliOptions& opt) {
  const RunConfig config = opt.config.resolve();
  if (!fs::is_directory(opt.gt_dir)) throw Error(ErrorCode::kMissingFile, "missing gt directory: " + opt.gt_dir);
  if (!fs::is_directory(opt.detections_dir)) {
    throw Error(ErrorCode::kMissingFile, "missing detections directory: " + opt.detections_dir);
  }
  std::vector<fs::path> gt_files;
  for (const auto& e : fs::directory_iterator(opt.gt_dir)) {
    if (e.is_regular_file() && e.path().extension() == ".txt") gt_files.push_back(e.path());
  }
  std::sort(gt_files.begin(), gt_files.end());
  for (const auto& e : fs::directory_iterator(opt.detections_dir)) {
    if (!e.is_regular_file() || e.path().extension() != ".json") continue;
    if (!fs::exists(fs::path(opt.gt_dir) / (e.path().stem().string() + ".txt"))) {
      throw Error(ErrorCode::kMissingFile, "unmatched detections file (no ground truth): " + e.path().string());
    }
  }

  std::vector<ImageMatches> images;
  std::vector<std::string> names;
  for (const fs::path& gt_path : gt_files) {
    const std::string name = gt_path.stem().string();
    const std::vector<GroundTruthEntry> truths = load_ground_truth(gt_path);
    std::vector<ScoredBox> dets;
    const fs::path det_path = fs::path(opt.detections_dir) / (name + ".json");
    if (fs::exists(det_path)) {
      for (const DetectionRecord& r : parse_detections_json(read_text(det_path), det_path.string()).detections) {
        if (opt.words && !r.words.empty()) {
          for (const OrientedRect& w : r.words) dets.push_back({w, r.line.score});
        } else {
          dets.push_back(r.line);
        }
      }
    }
    ImageMatches m = opt.protocol == "axis" ? match_axis_aligned(dets, truths, config.axis)
                                             : match_rotated(dets, truths, config.rotated);
    m.name = name;
    images.push_back(std::move(m));
    names.push_back(name);
  }
  const EvalReport r = report(images);
  std::printf("%-12s %9s %9s %9s\n", "protocol", "precision", "recall", "f-measure");
  std::printf("%-12s %9.4f %9.4f %9.4f\n", opt.protocol.c_str(), r.global.precision, r.global.recall, r.global.f_measure);
  std::printf("images %zu, detections %lld, ground truth %lld, matched %lld\n", images.size(), r.detections, r.truths,
              r.matches);
  if (!opt.output.empty()) write_text(opt.output, report_to_json(r, names));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-oriented text line detection"};
  app.require_subcommand(1);

  DetectOptions detect;
  CLI::App* detect_cmd = app.add_subcommand("detect", "detect text lines in images");
  detect_cmd->add_option("images", detect.images, "input PGM/PPM images")->required();
  detect_cmd->add_option("--saliency-dir", detect.saliency_dir, "precomputed saliency maps (<stem>.pgm)");
  detect_cmd->add_option("--block-model", detect.block_model, "text-block network (PXNET1)");
  detect_cmd->add_option("--centroid-model", detect.centroid_model, "character-centroid network (PXNET1)");
  detect_cmd->add_option("--centroid-dir", detect.centroid_dir, "precomputed image-frame centroid maps (<stem>.pgm)");
  detect_cmd->add_option("-o,--output", detect.out_dir, "output directory")->required();
  detect_cmd->add_option("--debug-dir", detect.debug_dir, "write intermediate maps, blocks and candidates here");
  detect_cmd->add_flag("--words", detect.words, "partition lines into words");
  detect_cmd->add_flag("--overlay", detect.overlay, "write <stem>.overlay.pgm with boxes drawn");
  detect_cmd->add_flag("--dump-profile", detect.dump_profile, "write projection profiles as CSV (needs --debug-dir)");
  detect_cmd->add_option("--jobs", detect.jobs, "worker threads")->check(CLI::PositiveNumber);
  detect.config.attach(detect_cmd);

  TrainCliOptions train_opt;
  CLI::App* train_cmd = app.add_subcommand("train", "train a pixel-labelling network");
  train_cmd->add_option("--kind", train_opt.kind, "block or centroid")->check(CLI::IsMember({"block", "centroid"}));
  train_cmd->add_option("--corpus", train_opt.corpus, "directory of NNNN.pgm / NNNN.gt.pgm pairs")->required();
  train_cmd->add_option("-o,--output", train_opt.output, "model file to write")->required();
  train_cmd->add_option("--iterations", train_opt.iterations, "SGD iterations")->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--log-interval", train_opt.log_interval, "iterations per loss report")->check(CLI::PositiveNumber);
  train_cmd->add_option("--loss-csv", train_opt.loss_csv, "also write the loss curve here");
  train_cmd->add_option("--lr", train_opt.learning_rate, "learning rate");
  train_cmd->add_option("--momentum", train_opt.momentum, "momentum");
  train_cmd->add_option("--weight-decay", train_opt.weight_decay, "weight decay");
  train_cmd->add_option("--seed", train_opt.seed, "initialisation and sampling seed");

  SynthCliOptions synth_opt;
  CLI::App* synth_cmd = app.add_subcommand("synth", "generate a synthetic corpus");
  synth_cmd->add_option("--spec", synth_opt.spec_file, "key=value synth spec file");
  synth_cmd->add_option("--count", synth_opt.count, "number of scenes");
  synth_cmd->add_option("-o,--output", synth_opt.out_dir, "corpus directory")->required();
  synth_cmd->add_option("--seed", synth_opt.seed, "override the spec seed");
  synth_cmd->add_option("--negatives", synth_opt.negatives, "background patches per scene")->check(CLI::NonNegativeNumber);

  EvalCliOptions eval_opt;
  CLI::App* eval_cmd = app.add_subcommand("eval", "score detections against ground truth");
  eval_cmd->add_option("--detections", eval_opt.detections_dir, "directory of <stem>.json")->required();
  eval_cmd->add_option("--gt", eval_opt.gt_dir, "directory of <stem>.txt")->required();
  eval_cmd->add_option("--protocol", eval_opt.protocol, "rotated or axis")->check(CLI::IsMember({"rotated", "axis"}));
  eval_cmd->add_option("-o,--output", eval_opt.output, "JSON report path");
  eval_cmd->add_flag("--words", eval_opt.words, "score word boxes instead of lines");
  eval_opt.config.attach(eval_cmd);

  ConfigOptions config_opt;
  std::string config_out;
  CLI::App* config_cmd = app.add_subcommand("config", "print the effective configuration");
  config_opt.attach(config_cmd);
  config_cmd->add_option("-o,--output", config_out, "write it to a file instead");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*detect_cmd) return cmd_detect(detect);
    if (*train_cmd) return cmd_train(train_opt);
    if (*synth_cmd) return cmd_synth(synth_opt);
    if (*eval_cmd) return cmd_eval(eval_opt);
    if (*config_cmd) {
      const std::string text = format_config(config_opt.resolve());
      if (config_out.empty()) {
        std::cout << text;
      } else {
        write_text(config_out, text);
      }
      return kOk;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIoFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIoFailure;
  }
  return kUsage;
}
