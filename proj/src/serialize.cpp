#include "textdet/serialize.hpp"

#include "json.hpp"

namespace textdet {

namespace {

using nlohmann::json;

json corners_json(const OrientedRect& box) {
  json corners = json::array();
  for (const Point& c : box.corners()) corners.push_back({c.x, c.y});
  return corners;
}

json rect_json(const OrientedRect& box) {
  return {{"center", {box.center.x, box.center.y}},
          {"length", box.length},
          {"thickness", box.thickness},
          {"angle", box.angle}};
}

OrientedRect rect_from_corners(const json& corners, const std::string& source) {
  if (!corners.is_array() || corners.size() != 4) {
    throw Error(ErrorCode::kInvalidArgument, source + ": corners must hold 4 points");
  }
  std::array<Point, 4> pts;
  for (std::size_t i = 0; i < 4; ++i) pts[i] = {corners[i].at(0).get<double>(), corners[i].at(1).get<double>()};
  return OrientedRect::from_corners(pts);
}

}  // namespace

std::string detections_to_json(const std::string& image, std::span<const Detection> detections, bool with_words) {
  json dets = json::array();
  for (const Detection& d : detections) {
    json entry = {{"corners", corners_json(d.box)}, {"angle", d.box.angle}, {"score", d.score}};
    if (with_words) {
      json words = json::array();
      for (const OrientedRect& w : d.words) words.push_back({{"corners", corners_json(w)}, {"angle", w.angle}});
      entry["words"] = std::move(words);
    }
    dets.push_back(std::move(entry));
  }
  return json{{"schema", kJsonSchema}, {"image", image}, {"detections", std::move(dets)}}.dump(2);
}

DetectionFile parse_detections_json(const std::string& text, const std::string& source) {
  DetectionFile out;
  try {
    const json doc = json::parse(text);
    if (doc.value("schema", 0) != kJsonSchema) {
      throw Error(ErrorCode::kInvalidArgument, source + ": unsupported schema");
    }
    out.image = doc.value("image", "");
    for (const json& d : doc.at("detections")) {
      DetectionRecord r;
      r.line.box = rect_from_corners(d.at("corners"), source);
      r.line.score = d.value("score", 0.0);
      if (d.contains("words")) {
        for (const json& w : d["words"]) r.words.push_back(rect_from_corners(w.at("corners"), source));
      }
      out.detections.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, source + ": bad detections JSON: " + e.what());
  }
  return out;
}

std::string scene_to_json(const std::string& name, const SynthScene& scene) {
  json lines = json::array();
  for (const OrientedRect& b : scene.line_boxes) lines.push_back(rect_json(b));
  json chars = json::array();
  for (std::size_t i = 0; i < scene.chars.size(); ++i) {
    chars.push_back({{"centroid", {scene.chars[i].centroid.x, scene.chars[i].centroid.y}},
                     {"height", scene.chars[i].height},
                     {"line", scene.char_line[i]}});
  }
  json words = json::array();
  for (std::size_t i = 0; i < scene.words.size(); ++i) {
    json w = rect_json(scene.words[i]);
    w["line"] = scene.word_line[i];
    words.push_back(std::move(w));
  }
  return json{{"name", name},
              {"width", scene.image.width()},
              {"height", scene.image.height()},
              {"lines", std::move(lines)},
              {"chars", std::move(chars)},
              {"words", std::move(words)}}
      .dump();
}

std::string report_to_json(const EvalReport& report, std::span<const std::string> names) {
  auto metrics = [](const Metrics& m) {
    return json{{"precision", m.precision}, {"recall", m.recall}, {"f_measure", m.f_measure}};
  };
  json images = json::array();
  for (std::size_t i = 0; i < report.images.size(); ++i) {
    const ImageMatches& im = report.images[i];
    json pairs = json::array();
    for (const MatchPair& p : im.pairs) pairs.push_back({p.detection, p.truth});
    json entry = metrics(report.per_image[i]);
    entry["name"] = i < names.size() ? names[i] : im.name;
    entry["matches"] = std::move(pairs);
    entry["detections"] = im.detections;
    entry["truths"] = im.truths;
    images.push_back(std::move(entry));
  }
  json doc = metrics(report.global);
  doc["schema"] = kJsonSchema;
  doc["matched"] = report.matches;
  doc["detections"] = report.detections;
  doc["truths"] = report.truths;
  doc["images"] = std::move(images);
  return doc.dump(2);
}

std::string trace_to_json(std::span<const BlockTrace> traces) {
  json blocks = json::array();
  for (const BlockTrace& t : traces) {
    json comps = json::array();
    for (const Component& c : t.components) {
      comps.push_back({{"bbox", {c.region.bbox.x0, c.region.bbox.y0, c.region.bbox.x1, c.region.bbox.y1}},
                       {"area", c.area()},
                       {"centroid", {c.centroid.x, c.centroid.y}},
                       {"polarity", c.polarity == Polarity::kDarkOnLight ? "dark" : "light"},
                       {"level", c.level},
                       {"stability", c.stability}});
    }
    json cands = json::array();
    for (const LineCandidate& c : t.candidates) {
      cands.push_back({{"corners", corners_json(c.box)}, {"angle", c.box.angle}, {"members", c.group.members}});
    }
    const BoxI& b = t.block.bbox;
    blocks.push_back({{"id", t.block.id},
                      {"bbox", {b.x0, b.y0, b.x1, b.y1}},
                      {"area", t.block.region.area()},
                      {"orientation", t.orientation},
                      {"components", std::move(comps)},
                      {"candidates", std::move(cands)}});
  }
  return json{{"schema", kJsonSchema}, {"blocks", std::move(blocks)}}.dump(2);
}

}  // namespace textdet
