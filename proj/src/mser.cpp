#include "textdet/mser.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <tuple>

#include "textdet/union_find.hpp"

namespace textdet {

void MserParams::validate() const {
  if (delta < 1) throw Error(ErrorCode::kInvalidArgument, "MSER delta must be >= 1");
  if (!(t1_min_area_ratio > 0.0 && t1_min_area_ratio < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "T1 must lie in (0, 1)");
  }
  if (!(t2_max_aspect > 1.0)) throw Error(ErrorCode::kInvalidArgument, "T2 must be > 1");
  if (!(max_area_ratio > 0.0 && max_area_ratio <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "max_area_ratio must lie in (0, 1]");
  }
  if (!(max_variation > 0.0)) throw Error(ErrorCode::kInvalidArgument, "max_variation must be positive");
}

namespace {

struct Node {
  int birth = 0;
  int area = 0;
  int parent = -1;
  std::vector<int> children;
  int first_index = 0;  // smallest row-major index inside the crop
  BoxI bbox;
  double stability = 0.0;
};

struct RootStats {
  int area = 0;
  int first_index = 0;
  BoxI bbox;
};

class ComponentTree {
 public:
  ComponentTree(const std::vector<std::uint8_t>& values, int width, int height)
      : values_(values), width_(width), height_(height) {
    build();
  }

  const std::vector<Node>& nodes() const { return nodes_; }
  std::vector<Node>& nodes() { return nodes_; }

  int area_above(int n, int level) const {
    while (nodes_[n].parent >= 0 && nodes_[nodes_[n].parent].birth <= level) n = nodes_[n].parent;
    return nodes_[n].area;
  }

  int largest_below(int n, int level) const {
    if (nodes_[n].birth <= level) return nodes_[n].area;
    int best = 0;
    for (int c : nodes_[n].children) best = std::max(best, largest_below(c, level));
    return best;
  }

  void compute_stability(int delta) {
    for (Node& node : nodes_) {
      const int birth = node.birth;
      const int death = node.parent >= 0 ? nodes_[node.parent].birth : 256;
      const int last = std::min(death - 1, birth + delta);
      double best = std::numeric_limits<double>::infinity();
      const int self = static_cast<int>(&node - nodes_.data());
      for (int g = birth; g <= last; ++g) {
        const int up = area_above(self, g + delta);
        const int down = largest_below(self, g - delta);
        best = std::min(best, static_cast<double>(up - down) / node.area);
      }
      node.stability = best;
    }
  }

  bool is_local_minimum(int n) const {
    const Node& node = nodes_[n];
    if (node.parent >= 0 && node.stability > nodes_[node.parent].stability) return false;
    for (int c : node.children) {
      if (node.stability > nodes_[c].stability) return false;
    }
    return true;
  }

  /// Pixels of node `n` (crop coordinates), row-major.
  std::vector<Pixel> pixels(int n) const {
    const Node& node = nodes_[n];
    std::vector<std::uint8_t> seen(values_.size(), 0);
    std::vector<int> stack{node.first_index};
    seen[node.first_index] = 1;
    std::vector<int> found;
    while (!stack.empty()) {
      const int p = stack.back();
      stack.pop_back();
      found.push_back(p);
      const int x = p % width_;
      const int y = p / width_;
      const std::array<std::pair<int, int>, 4> nbr{{{x - 1, y}, {x + 1, y}, {x, y - 1}, {x, y + 1}}};
      for (auto [nx, ny] : nbr) {
        if (nx < 0 || ny < 0 || nx >= width_ || ny >= height_) continue;
        const int q = ny * width_ + nx;
        if (seen[q] || values_[q] > node.birth) continue;
        seen[q] = 1;
        stack.push_back(q);
      }
    }
    std::sort(found.begin(), found.end());
    std::vector<Pixel> out;
    out.reserve(found.size());
    for (int p : found) out.push_back({p % width_, p / width_});
    return out;
  }

  bool has_ancestor_in(int n, const std::vector<std::uint8_t>& flags) const {
    for (int a = nodes_[n].parent; a >= 0; a = nodes_[a].parent) {
      if (flags[a]) return true;
    }
    return false;
  }

 private:
  void build() {
    const int count = width_ * height_;
    std::array<std::vector<int>, 256> buckets;
    for (int i = 0; i < count; ++i) buckets[values_[i]].push_back(i);

    UnionFind sets(count);
    std::vector<std::uint8_t> active(count, 0);
    std::vector<RootStats> stats(count);
    std::vector<int> node_of(count, -1);
    std::vector<int> opened(count, -1);
    std::vector<int> created(count, -1);
    std::vector<std::vector<int>> pending(count);

    auto open = [&](int root, int level) {
      if (opened[root] == level) return;
      opened[root] = level;
      pending[root].clear();
      if (node_of[root] >= 0) pending[root].push_back(node_of[root]);
    };

    for (int level = 0; level < 256; ++level) {
      const std::vector<int>& bucket = buckets[level];
      if (bucket.empty()) continue;
      for (int p : bucket) {
        active[p] = 1;
        stats[p].area = 1;
        stats[p].first_index = p;
        stats[p].bbox = BoxI{};
        stats[p].bbox.expand({p % width_, p / width_});
        opened[p] = level;
        pending[p].clear();
      }
      for (int p : bucket) {
        const int x = p % width_;
        const int y = p / width_;
        const std::array<std::pair<int, int>, 4> nbr{{{x - 1, y}, {x + 1, y}, {x, y - 1}, {x, y + 1}}};
        for (auto [nx, ny] : nbr) {
          if (nx < 0 || ny < 0 || nx >= width_ || ny >= height_) continue;
          const int q = ny * width_ + nx;
          if (!active[q]) continue;
          const int ra = sets.find(p);
          const int rb = sets.find(q);
          if (ra == rb) continue;
          open(ra, level);
          open(rb, level);
          const int root = sets.unite(ra, rb);
          const int other = root == ra ? rb : ra;
          RootStats& s = stats[root];
          const RootStats& o = stats[other];
          s.area += o.area;
          s.first_index = std::min(s.first_index, o.first_index);
          s.bbox.expand({o.bbox.x0, o.bbox.y0});
          s.bbox.expand({o.bbox.x1, o.bbox.y1});
          pending[root].insert(pending[root].end(), pending[other].begin(), pending[other].end());
          pending[other].clear();
        }
      }
      for (int p : bucket) {
        const int root = sets.find(p);
        if (created[root] == level) continue;
        created[root] = level;
        Node node;
        node.birth = level;
        node.area = stats[root].area;
        node.first_index = stats[root].first_index;
        node.bbox = stats[root].bbox;
        node.children = std::move(pending[root]);
        pending[root].clear();
        const int id = static_cast<int>(nodes_.size());
        for (int c : node.children) nodes_[c].parent = id;
        nodes_.push_back(std::move(node));
        node_of[root] = id;
      }
    }
  }

  const std::vector<std::uint8_t>& values_;
  int width_;
  int height_;
  std::vector<Node> nodes_;
};

}  // namespace

bool passes_component_filters(const PixelRegion& region, const TextBlock& block, const MserParams& params,
                              long long image_area) {
  const double denom = params.denominator == AreaDenominator::kBlockBox ? static_cast<double>(block.bbox.area())
                                                                       : static_cast<double>(image_area);
  const double ratio = static_cast<double>(region.area()) / denom;
  if (ratio < params.t1_min_area_ratio || ratio > params.max_area_ratio) return false;
  const int w = region.bbox.width();
  const int h = region.bbox.height();
  const double aspect = static_cast<double>(std::max(w, h)) / std::min(w, h);
  if (aspect > params.t2_max_aspect) return false;
  std::size_t inside = 0;
  for (const Pixel& p : region.pixels) inside += block.contains(p) ? 1 : 0;
  return static_cast<double>(inside) >= params.min_inside_fraction * static_cast<double>(region.area());
}

std::vector<Component> extract_components(const GrayImage& image, const TextBlock& block, const MserParams& params) {
  params.validate();
  const BoxI& box = block.bbox;
  if (box.empty() || box.x0 < 0 || box.y0 < 0 || box.x1 >= image.width() || box.y1 >= image.height()) {
    throw Error(ErrorCode::kInvalidArgument, "block lies outside the image");
  }
  const int w = box.width();
  const int h = box.height();
  const long long image_area = static_cast<long long>(image.width()) * image.height();

  std::vector<Component> out;
  for (Polarity polarity : {Polarity::kDarkOnLight, Polarity::kLightOnDark}) {
    std::vector<std::uint8_t> values(static_cast<std::size_t>(w) * h);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const std::uint8_t v = image.at(box.x0 + x, box.y0 + y);
        values[static_cast<std::size_t>(y) * w + x] = polarity == Polarity::kDarkOnLight ? v : 255 - v;
      }
    }
    ComponentTree tree(values, w, h);
    tree.compute_stability(params.delta);
    const auto& nodes = tree.nodes();

    struct Survivor {
      int node;
      PixelRegion region;
    };
    std::vector<Survivor> survivors;
    for (int n = 0; n < static_cast<int>(nodes.size()); ++n) {
      if (!tree.is_local_minimum(n) || nodes[n].stability > params.max_variation) continue;
      // Cheap pre-checks on area and aspect before collecting pixels.
      const Node& node = nodes[n];
      const double denom = params.denominator == AreaDenominator::kBlockBox ? static_cast<double>(box.area())
                                                                           : static_cast<double>(image_area);
      const double ratio = node.area / denom;
      if (ratio < params.t1_min_area_ratio || ratio > params.max_area_ratio) continue;
      PixelRegion region;
      for (const Pixel& p : tree.pixels(n)) {
        const Pixel q{p.x + box.x0, p.y + box.y0};
        region.pixels.push_back(q);
        region.bbox.expand(q);
      }
      if (!passes_component_filters(region, block, params, image_area)) continue;
      survivors.push_back({n, std::move(region)});
    }

    std::sort(survivors.begin(), survivors.end(), [&](const Survivor& a, const Survivor& b) {
      const Node& na = nodes[a.node];
      const Node& nb = nodes[b.node];
      return std::tuple(na.stability, -na.area, na.first_index) < std::tuple(nb.stability, -nb.area, nb.first_index);
    });

    std::vector<std::uint8_t> kept(nodes.size(), 0);
    std::vector<std::uint8_t> kept_below(nodes.size(), 0);
    std::vector<Component> polarity_out;
    for (Survivor& s : survivors) {
      if (kept[s.node] || kept_below[s.node] || tree.has_ancestor_in(s.node, kept)) continue;
      kept[s.node] = 1;
      for (int a = nodes[s.node].parent; a >= 0 && !kept_below[a]; a = nodes[a].parent) kept_below[a] = 1;
      Component c;
      double sx = 0.0;
      double sy = 0.0;
      for (const Pixel& p : s.region.pixels) {
        sx += p.x;
        sy += p.y;
      }
      c.centroid = {sx / s.region.area(), sy / s.region.area()};
      c.polarity = polarity;
      c.level = nodes[s.node].birth;
      c.stability = nodes[s.node].stability;
      c.region = std::move(s.region);
      polarity_out.push_back(std::move(c));
    }
    std::sort(polarity_out.begin(), polarity_out.end(), [](const Component& a, const Component& b) {
      const Pixel pa = a.region.pixels.front();
      const Pixel pb = b.region.pixels.front();
      return std::tuple(pa.y, pa.x, a.area()) < std::tuple(pb.y, pb.x, b.area());
    });
    for (Component& c : polarity_out) out.push_back(std::move(c));
  }
  return out;
}

}  // namespace textdet
