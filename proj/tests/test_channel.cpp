#include <cmath>
#include <random>

#include "convexp/channel.hpp"
#include "doctest.h"

using namespace convexp;

namespace {

Channel identity2() {
  return Channel({{1.0, 0.0}, {0.0, 1.0}}, {0.0, 0.0});
}

Channel bsc(double p, std::vector<double> cost = {0.0, 0.0}) {
  return Channel({{1.0 - p, p}, {p, 1.0 - p}}, std::move(cost));
}

}  // namespace

TEST_CASE("channel json loading") {
  const char* good = R"({
    "input_alphabet": ["0", "1"],
    "output_alphabet": ["0", "1"],
    "W": [[1.0, 0.0], [0.0, 1.0]],
    "cost": [0.0, 0.0]
  })";
  Channel ch = load_channel(good);
  CHECK(ch.input_size() == 2);
  CHECK(ch.output_size() == 2);
  CHECK(ch.gamma_min() == 0.0);
  CHECK(ch.gamma_max() == 0.0);
  CHECK(ch.input_labels()[1] == "1");

  const char* bad_row = R"({
    "input_alphabet": ["0", "1"],
    "output_alphabet": ["0", "1"],
    "W": [[0.6, 0.5], [0.5, 0.5]],
    "cost": [0.0, 0.0]
  })";
  CHECK_THROWS_WITH_AS(load_channel(bad_row),
                       doctest::Contains("row 0"), ChannelError);
  try {
    load_channel(bad_row);
  } catch (const ChannelError& e) {
    CHECK(std::string(e.what()).find("0.1") != std::string::npos);
  }

  const char* bsc11 = R"({
    "input_alphabet": ["0", "1"],
    "output_alphabet": ["0", "1"],
    "W": [[0.89, 0.11], [0.11, 0.89]],
    "cost": [0.0, 1.0]
  })";
  Channel c2 = load_channel(bsc11);
  CHECK(c2.gamma_min() == 0.0);
  CHECK(c2.gamma_max() == 1.0);

  CHECK_THROWS_AS(load_channel("{not json"), ChannelError);
  CHECK_THROWS_AS(load_channel(R"({"W": [[1.0]]})"), ChannelError);
  const char* neg_cost = R"({
    "input_alphabet": ["0"], "output_alphabet": ["0"],
    "W": [[1.0]], "cost": [-1.0]
  })";
  CHECK_THROWS_AS(load_channel(neg_cost), ChannelError);
}

TEST_CASE("simplex drift policy") {
  // within 1e-12: accepted untouched; below 1e-9: renormalized; above: error
  CHECK_NOTHROW(Distribution({0.5, 0.5 + 5e-13}));
  Distribution d({0.5, 0.5 + 5e-10});
  CHECK(d[0] + d[1] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(Distribution({0.5, 0.51}), ChannelError);
  CHECK_THROWS_AS(Distribution({-0.1, 1.1}), ChannelError);
}

TEST_CASE("alphabet size cap") {
  std::vector<double> big(65, 1.0 / 65);
  CHECK_THROWS_AS((Distribution{big}), ChannelError);
}

TEST_CASE("mutual information basics") {
  Channel id = identity2();
  CHECK(mutual_information(Distribution::uniform(2), id) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));

  Channel constant({{0.3, 0.7}, {0.3, 0.7}}, {0.0, 0.0});
  CHECK(mutual_information(Distribution({0.4, 0.6}), constant) ==
        doctest::Approx(0.0).epsilon(1e-12));

  Channel b = bsc(0.11);
  double expected = std::log(2.0) - binary_entropy(0.11);
  CHECK(mutual_information(Distribution::uniform(2), b) ==
        doctest::Approx(expected).epsilon(1e-12));

  CHECK_THROWS_AS(mutual_information(Distribution::uniform(3), id),
                  ChannelError);
}

TEST_CASE("conditional divergence") {
  Channel b = bsc(0.11);
  SUBCASE("divergence from itself is zero") {
    JointDistribution q(2, 2, {0.5 * 0.89, 0.5 * 0.11, 0.5 * 0.11, 0.5 * 0.89});
    CHECK(conditional_divergence(q, b) == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("mass on a zero transition gives +inf") {
    Channel id = identity2();
    JointDistribution q(2, 2, {0.0, 0.5, 0.5, 0.0});
    CHECK(conditional_divergence(q, id) == kPosInf);
  }
  SUBCASE("per-letter binary kl") {
    JointDistribution q(2, 2, {0.5 * 0.8, 0.5 * 0.2, 0.5 * 0.2, 0.5 * 0.8});
    CHECK(conditional_divergence(q, b) ==
          doctest::Approx(kl_bernoulli(0.2, 0.11)).epsilon(1e-12));
  }
}

TEST_CASE("divergence and information nonnegativity on random instances") {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    int nx = 2 + static_cast<int>(rng() % 3);
    int ny = 2 + static_cast<int>(rng() % 3);
    std::vector<std::vector<double>> rows(nx, std::vector<double>(ny));
    for (auto& row : rows) {
      double s = 0.0;
      for (double& v : row) {
        v = u(rng);
        s += v;
      }
      for (double& v : row) v /= s;
    }
    Channel ch(rows, std::vector<double>(nx, 0.0));
    std::vector<double> j(static_cast<std::size_t>(nx) * ny);
    double s = 0.0;
    for (double& v : j) {
      v = u(rng);
      s += v;
    }
    for (double& v : j) v /= s;
    JointDistribution q(nx, ny, j);
    CHECK(conditional_divergence(q, ch) >= 0.0);
    CHECK(joint_mutual_information(q) >= 0.0);
    std::vector<double> pw(static_cast<std::size_t>(nx));
    s = 0.0;
    for (double& v : pw) {
      v = u(rng);
      s += v;
    }
    for (double& v : pw) v /= s;
    Distribution p(pw);
    CHECK(mutual_information(p, ch) >= 0.0);
    // q built from the channel itself has zero divergence
    std::vector<double> jw(static_cast<std::size_t>(nx) * ny);
    for (int x = 0; x < nx; ++x)
      for (int y = 0; y < ny; ++y)
        jw[static_cast<std::size_t>(x) * ny + y] = p[x] * ch.w(x, y);
    CHECK(conditional_divergence(JointDistribution(nx, ny, jw), ch) ==
          doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("joint marginals and cost") {
  JointDistribution q(2, 3, {0.1, 0.2, 0.3, 0.1, 0.2, 0.1});
  Distribution mx = q.marginal_x();
  CHECK(mx[0] == doctest::Approx(0.6));
  CHECK(mx[1] == doctest::Approx(0.4));
  Distribution my = q.marginal_y();
  CHECK(my[1] == doctest::Approx(0.4));
  std::vector<double> cost{1.0, 3.0};
  CHECK(q.expected_input_cost(cost) == doctest::Approx(0.6 + 1.2));
}

TEST_CASE("nats to bits") {
  CHECK(nats_to_bits(std::log(2.0)) == doctest::Approx(1.0).epsilon(1e-14));
}
