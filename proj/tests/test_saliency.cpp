#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "textdet/saliency.hpp"

using namespace textdet;
namespace fs = std::filesystem;

namespace {

GrayImage random_image(int w, int h, std::mt19937_64& rng) {
  GrayImage img(w, h);
  for (std::size_t i = 0; i < img.size(); ++i) img[i] = static_cast<std::uint8_t>(rng() % 256);
  return img;
}

PixelNetConfig small_config(int stages, int k = 3) {
  PixelNetConfig c;
  c.stage_count = stages;
  c.channels_per_stage.assign(stages, 3);
  c.kernel_size = k;
  c.seed = 7;
  return c;
}

fs::path temp_path(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "textdet_test_saliency";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("config validation") {
  CHECK_NOTHROW(PixelNetConfig::text_block().validate());
  CHECK_NOTHROW(PixelNetConfig::character_centroid().validate());
  PixelNetConfig c = small_config(2);
  c.kernel_size = 4;
  CHECK_THROWS_AS(c.validate(), Error);
  c = small_config(2);
  c.channels_per_stage.pop_back();
  CHECK_THROWS_AS(c.validate(), Error);
  c = small_config(2);
  c.momentum = 1.0;
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("parameter count follows the layout") {
  for (int stages = 1; stages <= 4; ++stages) {
    for (int k : {1, 3, 5}) {
      PixelNetConfig c = small_config(stages, k);
      c.channels_per_stage.clear();
      for (int s = 0; s < stages; ++s) c.channels_per_stage.push_back(2 + s);
      std::size_t expected = 0;
      int in = 1;
      for (int ch : c.channels_per_stage) {
        expected += static_cast<std::size_t>(ch) * in * k * k + ch + ch + 1;
        in = ch;
      }
      expected += stages + 1;
      CHECK(PixelNet(c).parameter_count() == expected);
    }
  }
  CHECK_THROWS_AS(PixelNet(small_config(2), std::vector<double>(3)), Error);
}

TEST_CASE("initialisation is seeded and biases start at zero") {
  const PixelNet a(small_config(2));
  const PixelNet b(small_config(2));
  CHECK(std::equal(a.parameters().begin(), a.parameters().end(), b.parameters().begin()));
  PixelNetConfig other = small_config(2);
  other.seed = 8;
  const PixelNet c(other);
  CHECK_FALSE(std::equal(a.parameters().begin(), a.parameters().end(), c.parameters().begin()));
  for (const auto& stage : a.layout()) {
    for (int o = 0; o < stage.out_channels; ++o) CHECK(a.parameters()[stage.conv_bias + o] == 0.0);
    CHECK(a.parameters()[stage.side_bias] == 0.0);
  }
  CHECK(a.parameters()[a.fuse_bias()] == 0.0);
}

TEST_CASE("forward matches direct evaluation") {
  std::mt19937_64 rng(3);
  for (int stages = 1; stages <= 3; ++stages) {
    for (int k : {1, 3, 5}) {
      PixelNetConfig c = small_config(stages, k);
      PixelNet net(c);
      std::normal_distribution<double> noise(0.0, 0.5);
      for (double& p : net.parameters()) p = noise(rng);
      const GrayImage img = random_image(8 * (1 << (stages - 1)), 4 * (1 << (stages - 1)), rng);
      const ProbabilityMap got = forward(net, img);
      const std::vector<double> params(net.parameters().begin(), net.parameters().end());
      const std::vector<double> want = oracle::naive_forward(c, params, img);
      REQUIRE(got.size() == want.size());
      for (std::size_t i = 0; i < want.size(); ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("zero network outputs one half everywhere") {
  const PixelNet net = PixelNet::zeros(small_config(2));
  std::mt19937_64 rng(1);
  const ProbabilityMap p = forward(net, random_image(8, 8, rng));
  for (double v : p.values()) CHECK(v == 0.5);
}

TEST_CASE("unpadded input is rejected and padded forward crops") {
  const PixelNet net(small_config(3));
  std::mt19937_64 rng(2);
  const GrayImage img = random_image(13, 10, rng);
  CHECK_THROWS_WITH_AS(forward(net, img), doctest::Contains("unpadded input"), Error);
  try {
    forward(net, img);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kUnpaddedInput);
  }
  const ProbabilityMap p = forward_padded(net, img);
  CHECK(p.width() == 13);
  CHECK(p.height() == 10);
  for (double v : p.values()) {
    CHECK(v > 0.0);
    CHECK(v < 1.0);
  }
}

TEST_CASE("loss matches direct evaluation and gradient matches finite differences") {
  std::mt19937_64 rng(9);
  PixelNetConfig c = small_config(2);
  c.channels_per_stage = {2, 3};
  PixelNet net(c);
  const GrayImage img = random_image(8, 8, rng);
  GroundTruthMap truth(8, 8);
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) {
      if ((x + y) % 3 == 0) truth.set(x, y);
    }
  }
  const std::vector<double> params(net.parameters().begin(), net.parameters().end());
  const double direct = oracle::naive_loss(oracle::naive_forward(c, params, img), truth.map().values());
  CHECK(loss(net, img, truth) == doctest::Approx(direct).epsilon(1e-12));

  const LossGradient lg = loss_and_gradient(net, img, truth);
  CHECK(lg.loss == doctest::Approx(direct).epsilon(1e-12));
  REQUIRE(lg.gradient.size() == net.parameter_count());
  const double h = 1e-6;
  int checked = 0;
  for (std::size_t j = 0; j < net.parameter_count(); ++j) {
    PixelNet plus = net;
    PixelNet minus = net;
    plus.parameters()[j] += h;
    minus.parameters()[j] -= h;
    const double numeric = (loss(plus, img, truth) - loss(minus, img, truth)) / (2 * h);
    const double denom = std::max({std::abs(numeric), std::abs(lg.gradient[j]), 1e-6});
    // ReLU and max-pool kinks can sit inside the difference window.
    if (std::abs(numeric - lg.gradient[j]) / denom > 1e-3) {
      CHECK(std::abs(numeric - lg.gradient[j]) < 1e-5);
    }
    ++checked;
  }
  CHECK(checked == static_cast<int>(net.parameter_count()));
}

TEST_CASE("loss rejects mismatched truth and the probability clamp keeps it finite") {
  const PixelNet net = PixelNet::zeros(small_config(1));
  GrayImage img(4, 4, 0);
  CHECK_THROWS_AS(loss(net, img, GroundTruthMap(4, 2)), Error);
  PixelNet saturated = PixelNet::zeros(small_config(1));
  saturated.parameters()[saturated.fuse_bias()] = 1000.0;
  const double l = loss(saturated, img, GroundTruthMap(4, 4));
  CHECK(std::isfinite(l));
  CHECK(l == doctest::Approx(-std::log(kProbabilityClamp)).epsilon(1e-9));
}

TEST_CASE("training lowers the loss on a learnable pattern") {
  std::vector<TrainingExample> corpus;
  for (int i = 0; i < 4; ++i) {
    GrayImage img(8, 8, 200);
    GroundTruthMap gt(8, 8);
    for (int y = 0; y < 8; ++y) {
      for (int x = 0; x < 8; ++x) {
        if ((x + i) % 4 < 2) {
          img.at(x, y) = 30;
          gt.set(x, y);
        }
      }
    }
    corpus.push_back({img, gt});
  }
  PixelNetConfig c = small_config(1);
  c.learning_rate = 0.1;
  const PixelNet start(c);
  double before = 0.0;
  for (const auto& ex : corpus) before += loss(start, ex.image, ex.truth);
  std::vector<std::pair<int, double>> log;
  TrainOptions opts;
  opts.iterations = 200;
  opts.log_interval = 50;
  opts.on_log = [&](int it, double l) { log.emplace_back(it, l); };
  const PixelNet trained = train(start, corpus, opts);
  double after = 0.0;
  for (const auto& ex : corpus) after += loss(trained, ex.image, ex.truth);
  CHECK(after < 0.5 * before);
  REQUIRE(log.size() == 4);
  CHECK(log.front().first == 50);
  CHECK(log.back().first == 200);

  const PixelNet again = train(start, corpus, opts);
  CHECK(std::equal(again.parameters().begin(), again.parameters().end(), trained.parameters().begin()));
  CHECK_THROWS_AS(train(start, std::span<const TrainingExample>{}, opts), Error);
}

TEST_CASE("block truth marks pixel centres inside boxes") {
  const std::vector<OrientedRect> boxes{OrientedRect::make({5, 5}, 6, 2, 0)};
  const GroundTruthMap gt = make_block_gt(12, 12, boxes);
  for (int y = 0; y < 12; ++y) {
    for (int x = 0; x < 12; ++x) {
      const bool inside = x >= 2 && x <= 8 && y >= 4 && y <= 6;
      CHECK(gt.positive(x, y) == inside);
    }
  }
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 30), s(1, 12), a(-1.5, 1.5);
  for (int t = 0; t < 30; ++t) {
    const std::vector<OrientedRect> one{OrientedRect::make({u(rng), u(rng)}, s(rng), s(rng), a(rng))};
    const GroundTruthMap m = make_block_gt(32, 32, one);
    for (int y = 0; y < 32; ++y) {
      for (int x = 0; x < 32; ++x) {
        const Point l = one[0].to_local({double(x), double(y)});
        const bool in = std::abs(l.x) <= one[0].length / 2 + 1e-9 && std::abs(l.y) <= one[0].thickness / 2 + 1e-9;
        CHECK(m.positive(x, y) == in);
      }
    }
  }
}

TEST_CASE("centroid truth uses a strict radius of 0.15 height") {
  const std::vector<CharacterMark> chars{{{10, 10}, 20}};
  const GroundTruthMap gt = make_centroid_gt(21, 21, chars);
  CHECK(gt.positive(10, 10));
  CHECK(gt.positive(12, 12));
  CHECK_FALSE(gt.positive(13, 10));  // distance 3 equals the radius
  CHECK(gt.positive(12, 10));
  CHECK(gt.positive_count() == 25);
  CHECK_THROWS_AS(make_centroid_gt(5, 5, std::vector<CharacterMark>{{{1, 1}, 0}}), Error);
  CHECK_THROWS_AS(GroundTruthMap(ProbabilityMap(2, 2, 0.3)), Error);
}

TEST_CASE("multi-scale saliency averages per-scale maps") {
  const PixelNet net(small_config(2));
  std::mt19937_64 rng(6);
  const GrayImage img = random_image(20, 16, rng);
  const std::vector<int> native{16};
  const ProbabilityMap one = multi_scale_saliency(net, img, native);
  const ProbabilityMap direct = forward_padded(net, img);
  for (std::size_t i = 0; i < one.size(); ++i) CHECK(one[i] == doctest::Approx(direct[i]).epsilon(1e-12));
  const std::vector<int> heights{8, 32};
  const ProbabilityMap avg = multi_scale_saliency(net, img, heights);
  CHECK(avg.width() == 20);
  CHECK(avg.height() == 16);
  for (double v : avg.values()) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  CHECK_THROWS_AS(multi_scale_saliency(net, img, std::vector<int>{}), Error);
  CHECK_THROWS_AS(multi_scale_saliency(net, img, std::vector<int>{0}), Error);
}

TEST_CASE("model files round-trip and reject corruption") {
  std::mt19937_64 rng(8);
  PixelNet net(PixelNetConfig::character_centroid());
  std::normal_distribution<double> noise(0, 1);
  for (double& p : net.parameters()) p = noise(rng);
  const fs::path path = temp_path("model.pxn");
  save_model(path, net);
  const PixelNet loaded = load_model(path);
  CHECK(loaded.config() == net.config());
  CHECK(std::equal(loaded.parameters().begin(), loaded.parameters().end(), net.parameters().begin()));

  std::ifstream in(path, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  auto write = [](const fs::path& p, const std::string& b) {
    std::ofstream out(p, std::ios::binary);
    out << b;
  };
  auto code_of = [](const fs::path& p) {
    try {
      load_model(p);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kIo;
  };
  const fs::path bad = temp_path("bad.pxn");
  write(bad, "NOTNET" + bytes.substr(6));
  CHECK(code_of(bad) == ErrorCode::kBadModel);
  write(bad, bytes.substr(0, bytes.size() - 3));
  CHECK(code_of(bad) == ErrorCode::kBadModel);
  write(bad, bytes + "x");
  CHECK(code_of(bad) == ErrorCode::kBadModel);
  CHECK(code_of(temp_path("absent.pxn")) == ErrorCode::kMissingFile);
}
