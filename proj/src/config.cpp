#include "textdet/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace textdet {

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw Error(ErrorCode::kInvalidArgument, "invalid value for " + key + ": '" + value + "'");
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) bad_value(key, value);
    return v;
  } catch (const std::logic_error&) {
    bad_value(key, value);
  }
}

long long parse_integer(const std::string& key, const std::string& value) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc{} || ptr != value.data() + value.size()) bad_value(key, value);
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  bad_value(key, value);
}

std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
  std::vector<int> out;
  if (trim(value).empty() || trim(value) == "native") return out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(static_cast<int>(parse_integer(key, trim(item))));
  return out;
}

std::string format_int_list(const std::vector<int>& v) {
  if (v.empty()) return "native";
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

template <typename Target>
struct Field {
  std::string key;
  std::function<std::string(const Target&)> get;
  std::function<void(Target&, const std::string&)> set;
};

template <typename Target, typename Access>
Field<Target> real_field(std::string key, Access access) {
  return {key, [access](const Target& c) { return format_double(access(const_cast<Target&>(c))); },
          [access, key](Target& c, const std::string& v) { access(c) = parse_double(key, v); }};
}

template <typename Target, typename Access>
Field<Target> int_field(std::string key, Access access) {
  return {key, [access](const Target& c) { return std::to_string(access(const_cast<Target&>(c))); },
          [access, key](Target& c, const std::string& v) {
            using T = std::remove_reference_t<decltype(access(c))>;
            access(c) = static_cast<T>(parse_integer(key, v));
          }};
}

const std::vector<Field<RunConfig>>& run_fields() {
  using C = RunConfig;
  static const std::vector<Field<C>> fields = {
      real_field<C>("saliency_threshold", [](C& c) -> double& { return c.candidates.block_threshold; }),
      int_field<C>("min_block_area", [](C& c) -> int& { return c.candidates.min_block_area; }),
      {"scales", [](const C& c) { return format_int_list(c.scales); },
       [](C& c, const std::string& v) { c.scales = parse_int_list("scales", v); }},
      int_field<C>("mser_delta", [](C& c) -> int& { return c.candidates.mser.delta; }),
      real_field<C>("t1_min_area_ratio", [](C& c) -> double& { return c.candidates.mser.t1_min_area_ratio; }),
      real_field<C>("t2_max_aspect", [](C& c) -> double& { return c.candidates.mser.t2_max_aspect; }),
      real_field<C>("max_area_ratio", [](C& c) -> double& { return c.candidates.mser.max_area_ratio; }),
      real_field<C>("min_inside_fraction", [](C& c) -> double& { return c.candidates.mser.min_inside_fraction; }),
      real_field<C>("max_variation", [](C& c) -> double& { return c.candidates.mser.max_variation; }),
      {"area_denominator",
       [](const C& c) { return std::string(c.candidates.mser.denominator == AreaDenominator::kBlockBox ? "block" : "image"); },
       [](C& c, const std::string& v) {
         if (v == "block") {
           c.candidates.mser.denominator = AreaDenominator::kBlockBox;
         } else if (v == "image") {
           c.candidates.mser.denominator = AreaDenominator::kImage;
         } else {
           bad_value("area_denominator", v);
         }
       }},
      real_field<C>("angle_step", [](C& c) -> double& { return c.candidates.angle_step; }),
      real_field<C>("pair_height_ratio", [](C& c) -> double& { return c.candidates.pair.max_height_ratio; }),
      real_field<C>("pair_angle_gap", [](C& c) -> double& { return c.candidates.pair.max_angle_gap; }),
      real_field<C>("anchor_band", [](C& c) -> double& { return c.candidates.anchor_band; }),
      int_field<C>("min_centroids", [](C& c) -> int& { return c.filter.min_centroids; }),
      real_field<C>("min_avg_score", [](C& c) -> double& { return c.filter.min_avg_score; }),
      real_field<C>("max_mu", [](C& c) -> double& { return c.filter.max_mu; }),
      real_field<C>("max_sigma", [](C& c) -> double& { return c.filter.max_sigma; }),
      real_field<C>("nms_overlap", [](C& c) -> double& { return c.filter.nms_overlap; }),
      real_field<C>("peak_floor", [](C& c) -> double& { return c.filter.peak_floor; }),
      real_field<C>("peak_radius_fraction", [](C& c) -> double& { return c.filter.peak_radius_fraction; }),
      int_field<C>("normalized_height", [](C& c) -> int& { return c.filter.normalized_height; }),
      int_field<C>("min_normalized_width", [](C& c) -> int& { return c.filter.min_normalized_width; }),
      real_field<C>("word_gap_factor", [](C& c) -> double& { return c.filter.word_gap_factor; }),
      real_field<C>("word_min_gap", [](C& c) -> double& { return c.filter.word_min_gap; }),
      {"words", [](const C& c) { return std::string(c.filter.words ? "true" : "false"); },
       [](C& c, const std::string& v) { c.filter.words = parse_bool("words", v); }},
      real_field<C>("eval_min_overlap", [](C& c) -> double& { return c.rotated.min_overlap; }),
      real_field<C>("eval_max_angle_diff", [](C& c) -> double& { return c.rotated.max_angle_diff; }),
      real_field<C>("eval_axis_min_iou", [](C& c) -> double& { return c.axis.min_iou; }),
  };
  return fields;
}

const std::vector<Field<SynthSpec>>& synth_fields() {
  using S = SynthSpec;
  static const std::vector<Field<S>> fields = {
      int_field<S>("width", [](S& s) -> int& { return s.width; }),
      int_field<S>("height", [](S& s) -> int& { return s.height; }),
      int_field<S>("min_lines", [](S& s) -> int& { return s.line_count.lo; }),
      int_field<S>("max_lines", [](S& s) -> int& { return s.line_count.hi; }),
      int_field<S>("min_chars", [](S& s) -> int& { return s.chars_per_line.lo; }),
      int_field<S>("max_chars", [](S& s) -> int& { return s.chars_per_line.hi; }),
      real_field<S>("min_char_height", [](S& s) -> double& { return s.char_height.lo; }),
      real_field<S>("max_char_height", [](S& s) -> double& { return s.char_height.hi; }),
      real_field<S>("min_angle", [](S& s) -> double& { return s.orientation.lo; }),
      real_field<S>("max_angle", [](S& s) -> double& { return s.orientation.hi; }),
      real_field<S>("noise_stddev", [](S& s) -> double& { return s.noise_stddev; }),
      real_field<S>("word_break_probability", [](S& s) -> double& { return s.word_break_probability; }),
      int_field<S>("seed", [](S& s) -> std::uint64_t& { return s.seed; }),
  };
  return fields;
}

template <typename Target>
std::string format_fields(const std::vector<Field<Target>>& fields, const Target& target) {
  std::string out;
  for (const auto& f : fields) out += f.key + "=" + f.get(target) + "\n";
  return out;
}

template <typename Target>
void assign(const std::vector<Field<Target>>& fields, Target& target, const std::string& key, const std::string& value) {
  for (const auto& f : fields) {
    if (f.key == key) {
      f.set(target, value);
      return;
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown config key: " + key);
}

template <typename Target>
Target parse_fields(const std::vector<Field<Target>>& fields, const std::string& text, const std::string& source) {
  Target target;
  std::istringstream lines(text);
  std::string line;
  int number = 0;
  while (std::getline(lines, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kInvalidArgument, source + ":" + std::to_string(number) + ": expected key=value");
    }
    assign(fields, target, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  target.validate();
  return target;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kMissingFile, "missing file: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

void RunConfig::validate() const {
  if (!(candidates.block_threshold > 0.0 && candidates.block_threshold < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "saliency_threshold must lie in (0, 1)");
  }
  if (candidates.min_block_area < 1) throw Error(ErrorCode::kInvalidArgument, "min_block_area must be >= 1");
  for (int s : scales) {
    if (s < 8) throw Error(ErrorCode::kInvalidArgument, "scales must be >= 8");
  }
  candidates.mser.validate();
  if (!(candidates.angle_step > 0.0 && candidates.angle_step <= std::numbers::pi / 2)) {
    throw Error(ErrorCode::kInvalidArgument, "angle_step must lie in (0, pi/2]");
  }
  if (!(candidates.pair.max_height_ratio > 1.0)) throw Error(ErrorCode::kInvalidArgument, "pair_height_ratio must be > 1");
  if (!(candidates.pair.max_angle_gap > 0.0)) throw Error(ErrorCode::kInvalidArgument, "pair_angle_gap must be positive");
  if (!(candidates.anchor_band >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "anchor_band must be >= 0");
  filter.validate();
  if (!(rotated.min_overlap > 0.0 && rotated.min_overlap < 1.0) || !(axis.min_iou > 0.0 && axis.min_iou < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "evaluation overlaps must lie in (0, 1)");
  }
  if (!(rotated.max_angle_diff > 0.0)) throw Error(ErrorCode::kInvalidArgument, "eval_max_angle_diff must be positive");
}

std::string format_config(const RunConfig& config) { return format_fields(run_fields(), config); }

RunConfig parse_config(const std::string& text, const std::string& source) {
  return parse_fields(run_fields(), text, source);
}

RunConfig load_config(const std::filesystem::path& path) { return parse_config(read_text(path), path.string()); }

void save_config(const std::filesystem::path& path, const RunConfig& config) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << format_config(config);
}

void set_config_value(RunConfig& config, const std::string& key, const std::string& value) {
  assign(run_fields(), config, key, value);
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& f : run_fields()) keys.push_back(f.key);
  return keys;
}

std::string format_synth_spec(const SynthSpec& spec) { return format_fields(synth_fields(), spec); }

SynthSpec parse_synth_spec(const std::string& text, const std::string& source) {
  return parse_fields(synth_fields(), text, source);
}

SynthSpec load_synth_spec(const std::filesystem::path& path) {
  return parse_synth_spec(read_text(path), path.string());
}

}  // namespace textdet
