#include <cmath>
#include <random>

#include "convexp/capacity.hpp"
#include "doctest.h"

using namespace convexp;

namespace {

Channel bsc(double p, std::vector<double> cost = {0.0, 0.0}) {
  return Channel({{1.0 - p, p}, {p, 1.0 - p}}, std::move(cost));
}

Channel random_channel(std::mt19937_64& rng, int nx, int ny, double cost_max) {
  std::uniform_real_distribution<double> u(0.02, 1.0);
  std::vector<std::vector<double>> rows(nx, std::vector<double>(ny));
  for (auto& row : rows) {
    double s = 0.0;
    for (double& v : row) {
      v = u(rng);
      s += v;
    }
    for (double& v : row) v /= s;
  }
  std::vector<double> cost(static_cast<std::size_t>(nx));
  std::uniform_real_distribution<double> uc(0.0, cost_max);
  for (double& c : cost) c = uc(rng);
  return Channel(rows, cost);
}

}  // namespace

TEST_CASE("noiseless and useless channels") {
  Channel id({{1.0, 0.0}, {0.0, 1.0}}, {0.0, 0.0});
  CapacityResult r = capacity(id, 0.0);
  CHECK(r.value == doctest::Approx(std::log(2.0)).epsilon(1e-10));
  CHECK(r.duality_gap <= 1e-8);

  CapacityResult r2 = capacity(bsc(0.5), 1.0);
  CHECK(r2.value == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("bsc with cost, slack and active budgets") {
  Channel b = bsc(0.11, {0.0, 1.0});
  SUBCASE("uniform maximizer feasible at gamma = 0.5") {
    CapacityResult r = capacity(b, 0.5);
    double expected = std::log(2.0) - binary_entropy(0.11);
    CHECK(r.value == doctest::Approx(expected).epsilon(1e-9));
    CHECK(r.lagrange_mu == 0.0);
    double ec = 0.0;
    for (int x = 0; x < 2; ++x) ec += r.optimal_input[x] * b.cost(x);
    CHECK(ec <= 0.5 + 1e-9);
  }
  SUBCASE("gamma = 0 pins the single-point simplex") {
    CapacityResult r = capacity(b, 0.0);
    CHECK(r.value == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(r.optimal_input[0] == doctest::Approx(1.0));
  }
  SUBCASE("active budget matches a 1d mesh oracle") {
    CapacityResult r = capacity(b, 0.1);
    double best = 0.0;
    for (int i = 0; i <= 100000; ++i) {
      double a = 0.1 * i / 100000.0;  // E c = p(1) = a <= 0.1
      best = std::max(best,
                      mutual_information(Distribution({1.0 - a, a}), b));
    }
    CHECK(r.value == doctest::Approx(best).epsilon(1e-7));
    CHECK(r.duality_gap <= 1e-8);
  }
  SUBCASE("infeasible gamma") {
    Channel expensive = bsc(0.11, {0.5, 1.0});
    CHECK_THROWS_AS(capacity(expensive, 0.2), ChannelError);
  }
}

TEST_CASE("capacity curve monotone with constant tail") {
  Channel b = bsc(0.11, {0.0, 1.0});
  std::vector<double> gammas{0.0, 0.05, 0.1, 0.3, 0.5, 1.0, 2.0};
  auto curve = capacity_curve(b, gammas);
  for (std::size_t i = 1; i < curve.size(); ++i) {
    CHECK(curve[i].value >= curve[i - 1].value - 1e-10);
  }
  // constant for gamma >= gamma_max
  CHECK(curve[6].value == doctest::Approx(curve[5].value).epsilon(1e-9));
  CapacityResult unconstrained = capacity(b, 10.0);
  CHECK(curve[6].value == doctest::Approx(unconstrained.value).epsilon(1e-9));
}

TEST_CASE("random channels against a simplex mesh oracle") {
  std::mt19937_64 rng(777);
  for (int trial = 0; trial < 5; ++trial) {
    Channel ch = random_channel(rng, 3, 3, 2.0);
    double gamma = ch.gamma_min() +
                   0.6 * (ch.gamma_max() - ch.gamma_min()) + 1e-9;
    CapacityResult r = capacity(ch, gamma);
    CHECK(r.duality_gap <= 1e-8);
    double ec = 0.0;
    for (int x = 0; x < 3; ++x) ec += r.optimal_input[x] * ch.cost(x);
    CHECK(ec <= gamma + 1e-9);

    // brute-force mesh over the input simplex
    const int m = 140;
    double best = 0.0;
    for (int i = 0; i <= m; ++i) {
      for (int j = 0; j <= m - i; ++j) {
        double p0 = static_cast<double>(i) / m;
        double p1 = static_cast<double>(j) / m;
        double p2 = std::max(1.0 - p0 - p1, 0.0);
        double cost = p0 * ch.cost(0) + p1 * ch.cost(1) + p2 * ch.cost(2);
        if (cost > gamma) continue;
        best = std::max(best,
                        mutual_information(Distribution({p0, p1, p2}), ch));
      }
    }
    CHECK(r.value >= best - 1e-9);          // mesh can never beat the optimum
    CHECK(r.value <= best + 5e-3);          // and must be close at mesh scale
  }
}

TEST_CASE("capacity concave and monotone in gamma") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 5; ++trial) {
    Channel ch = random_channel(rng, 3, 4, 1.5);
    double lo = ch.gamma_min(), hi = ch.gamma_max();
    if (hi - lo < 1e-6) continue;
    double g1 = lo + 0.2 * (hi - lo), g2 = lo + 0.8 * (hi - lo);
    double c1 = capacity(ch, g1).value;
    double cm = capacity(ch, 0.5 * (g1 + g2)).value;
    double c2 = capacity(ch, g2).value;
    CHECK(c1 <= c2 + 1e-9);
    CHECK(cm >= 0.5 * (c1 + c2) - 1e-8);  // midpoint concavity
  }
}
