#include "textdet/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace textdet {

void SynthSpec::validate() const {
  if (width < 16 || height < 16) throw Error(ErrorCode::kInvalidArgument, "image size must be at least 16 x 16");
  if (line_count.lo < 0 || line_count.hi < line_count.lo) throw Error(ErrorCode::kInvalidArgument, "bad line_count range");
  if (chars_per_line.lo < 2 || chars_per_line.hi < chars_per_line.lo) {
    throw Error(ErrorCode::kInvalidArgument, "chars_per_line range must be nonempty with lower bound >= 2");
  }
  if (char_height.lo < 6.0 || char_height.hi < char_height.lo) {
    throw Error(ErrorCode::kInvalidArgument, "char_height range must be nonempty with lower bound >= 6");
  }
  if (orientation.hi < orientation.lo || orientation.lo < -std::numbers::pi / 2 ||
      orientation.hi >= std::numbers::pi / 2) {
    throw Error(ErrorCode::kInvalidArgument, "orientation range must be nonempty within [-pi/2, pi/2)");
  }
  if (!(noise_stddev >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "noise_stddev must be >= 0");
  if (!(word_break_probability >= 0.0 && word_break_probability <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "word_break_probability must lie in [0, 1]");
  }
}

std::uint64_t scene_seed(std::uint64_t base, int index) {
  // splitmix64 finaliser over the pair.
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(index) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) {
  if (hi <= lo) return lo;
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

struct Glyph {
  double u = 0.0;  // center along the line
  double width = 0.0;
  bool ellipse = false;
};

struct LinePlan {
  double height = 0.0;
  double angle = 0.0;
  double length = 0.0;
  std::vector<Glyph> glyphs;
  std::vector<std::pair<int, int>> words;  // glyph index ranges, inclusive
  double ink = 0.0;
};

LinePlan plan_line(const SynthSpec& spec, Rng& rng) {
  LinePlan plan;
  plan.height = uniform(rng, spec.char_height.lo, spec.char_height.hi);
  plan.angle = uniform(rng, spec.orientation.lo, spec.orientation.hi);
  const int n = uniform_int(rng, spec.chars_per_line.lo, spec.chars_per_line.hi);
  double cursor = 0.0;
  int word_start = 0;
  for (int i = 0; i < n; ++i) {
    Glyph g;
    g.width = plan.height * uniform(rng, 0.5, 0.8);
    g.ellipse = uniform(rng, 0.0, 1.0) < 0.5;
    g.u = cursor + g.width / 2;
    cursor += g.width;
    plan.glyphs.push_back(g);
    if (i + 1 < n) {
      const bool word_break = uniform(rng, 0.0, 1.0) < spec.word_break_probability;
      if (word_break) {
        plan.words.push_back({word_start, i});
        word_start = i + 1;
      }
      cursor += plan.height * (word_break ? uniform(rng, 0.9, 1.2) : uniform(rng, 0.2, 0.35));
    }
  }
  plan.words.push_back({word_start, n - 1});
  plan.length = cursor;
  for (Glyph& g : plan.glyphs) g.u -= cursor / 2;
  return plan;
}

bool inside_image(const OrientedRect& box, int width, int height, double margin) {
  for (const Point& c : box.corners()) {
    if (c.x < margin - 0.5 || c.y < margin - 0.5 || c.x > width - 0.5 - margin || c.y > height - 0.5 - margin) {
      return false;
    }
  }
  return true;
}

OrientedRect inflate(const OrientedRect& box, double by) {
  return OrientedRect::make(box.center, box.length + 2 * by, box.thickness + 2 * by, box.angle);
}

// Coverage of the glyphs of one line at pixel (x, y) from 4x4 supersampling.
double coverage(const LinePlan& plan, const OrientedRect& box, int x, int y) {
  int hits = 0;
  for (int sy = 0; sy < 4; ++sy) {
    for (int sx = 0; sx < 4; ++sx) {
      const Point p{x - 0.375 + 0.25 * sx, y - 0.375 + 0.25 * sy};
      const Point uv = box.to_local(p);
      const double half_h = plan.height / 2;
      if (std::abs(uv.y) > half_h) continue;
      for (const Glyph& g : plan.glyphs) {
        const double du = uv.x - g.u;
        const double half_w = g.width / 2;
        if (std::abs(du) > half_w) continue;
        if (g.ellipse && (du * du) / (half_w * half_w) + (uv.y * uv.y) / (half_h * half_h) > 1.0) continue;
        ++hits;
        break;
      }
    }
  }
  return hits / 16.0;
}

}  // namespace

SynthScene generate_scene(const SynthSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  SynthScene scene;

  const double base = uniform(rng, 90.0, 170.0);
  const double gx = uniform(rng, -30.0, 30.0) / spec.width;
  const double gy = uniform(rng, -30.0, 30.0) / spec.height;

  const int lines = uniform_int(rng, spec.line_count.lo, spec.line_count.hi);
  std::vector<LinePlan> plans;
  for (int l = 0; l < lines; ++l) {
    LinePlan plan;
    OrientedRect box;
    bool placed = false;
    for (int attempt = 0; attempt < 100 && !placed; ++attempt) {
      plan = plan_line(spec, rng);
      const Point center{uniform(rng, 0.0, spec.width - 1.0), uniform(rng, 0.0, spec.height - 1.0)};
      box = OrientedRect::make(center, plan.length, plan.height, plan.angle);
      if (!inside_image(box, spec.width, spec.height, 2.0)) continue;
      const OrientedRect grown = inflate(box, 0.5 * plan.height);
      placed = std::none_of(scene.line_boxes.begin(), scene.line_boxes.end(), [&](const OrientedRect& other) {
        return rect_intersection_area(grown, inflate(other, 0.5 * other.thickness)) > 0.0;
      });
    }
    if (!placed) throw Error(ErrorCode::kSpecTooDense, "spec too dense: no room for line " + std::to_string(l + 1));
    const bool light = uniform(rng, 0.0, 1.0) < 0.3;
    plan.ink = light ? uniform(rng, 60.0, 100.0) : -uniform(rng, 60.0, 100.0);
    const int line_index = static_cast<int>(scene.line_boxes.size());
    scene.line_boxes.push_back(box);
    for (const Glyph& g : plan.glyphs) {
      scene.chars.push_back({box.from_local({g.u, 0.0}), plan.height});
      scene.char_line.push_back(line_index);
    }
    for (auto [first, last] : plan.words) {
      const double u0 = plan.glyphs[first].u - plan.glyphs[first].width / 2;
      const double u1 = plan.glyphs[last].u + plan.glyphs[last].width / 2;
      scene.words.push_back(OrientedRect::make(box.from_local({0.5 * (u0 + u1), 0.0}), u1 - u0, plan.height, box.angle));
      scene.word_line.push_back(line_index);
    }
    plans.push_back(std::move(plan));
  }

  std::normal_distribution<double> noise(0.0, spec.noise_stddev);
  GrayImage image(spec.width, spec.height);
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      double v = base + gx * (x - spec.width / 2.0) + gy * (y - spec.height / 2.0);
      for (std::size_t l = 0; l < plans.size(); ++l) {
        const AxisBox hull = axis_hull(scene.line_boxes[l]);
        if (x < hull.x0 - 1 || x > hull.x1 + 1 || y < hull.y0 - 1 || y > hull.y1 + 1) continue;
        v += plans[l].ink * coverage(plans[l], scene.line_boxes[l], x, y);
      }
      if (spec.noise_stddev > 0.0) v += noise(rng);
      image.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    }
  }
  scene.image = std::move(image);
  return scene;
}

std::vector<CorpusItem> generate_corpus(const SynthSpec& spec, int count) {
  if (count < 1) throw Error(ErrorCode::kInvalidArgument, "count must be positive");
  std::vector<CorpusItem> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    SynthSpec s = spec;
    s.seed = scene_seed(spec.seed, i);
    CorpusItem item;
    item.scene = generate_scene(s);
    item.block_gt = make_block_gt(s.width, s.height, item.scene.line_boxes);
    item.centroid_gt = make_centroid_gt(s.width, s.height, item.scene.chars);
    out.push_back(std::move(item));
  }
  return out;
}

std::vector<TrainingExample> centroid_patches(const SynthScene& scene, const PatchOptions& options) {
  Rng rng(options.seed);
  std::vector<TrainingExample> out;
  const int h = options.filter.normalized_height;
  for (std::size_t l = 0; l < scene.line_boxes.size(); ++l) {
    const OrientedRect& line = scene.line_boxes[l];
    const double t = line.thickness;
    const double pad_start = t * uniform(rng, options.length_padding.lo, options.length_padding.hi);
    const double pad_end = t * uniform(rng, options.length_padding.lo, options.length_padding.hi);
    const double pad_across = t * uniform(rng, options.thickness_padding.lo, options.thickness_padding.hi);
    const Point shift = line.from_local({0.5 * (pad_end - pad_start), 0.0}) - line.center;
    OrientedRect box;
    box.center = line.center + shift;
    box.length = line.length + pad_start + pad_end;
    box.thickness = t + 2 * pad_across;
    box.angle = line.angle;
    // Half-turn ambiguity: a box read right-to-left is still a valid sample.
    if (uniform(rng, 0.0, 1.0) < 0.5) box.angle = wrap_half_pi(box.angle + std::numbers::pi);

    GrayImage patch = normalize_candidate(scene.image, box, options.filter);
    const double scale = h / box.thickness;
    std::vector<CharacterMark> marks;
    for (std::size_t c = 0; c < scene.chars.size(); ++c) {
      if (scene.char_line[c] != static_cast<int>(l)) continue;
      marks.push_back({image_to_normalized(box, patch.width(), h, scene.chars[c].centroid), scene.chars[c].height * scale});
    }
    GroundTruthMap gt = make_centroid_gt(patch.width(), h, marks);
    out.push_back({std::move(patch), std::move(gt)});
  }

  const SynthScene& s = scene;
  for (int n = 0; n < options.negatives_per_scene; ++n) {
    for (int attempt = 0; attempt < 50; ++attempt) {
      const double t = uniform(rng, 10.0, 24.0);
      const double len = t * uniform(rng, 1.5, 6.0);
      const OrientedRect box = OrientedRect::make(
          {uniform(rng, 0.0, s.image.width() - 1.0), uniform(rng, 0.0, s.image.height() - 1.0)}, len, t,
          uniform(rng, -std::numbers::pi / 2, std::numbers::pi / 2));
      if (!inside_image(box, s.image.width(), s.image.height(), 0.0)) continue;
      const bool clear = std::none_of(s.line_boxes.begin(), s.line_boxes.end(), [&](const OrientedRect& line) {
        return rect_intersection_area(box, line) > 0.0;
      });
      if (!clear) continue;
      GrayImage patch = normalize_candidate(s.image, box, options.filter);
      GroundTruthMap gt(patch.width(), patch.height());
      out.push_back({std::move(patch), std::move(gt)});
      break;
    }
  }
  return out;
}

}  // namespace textdet
