#include <cmath>
#include <random>

#include "convexp/capacity.hpp"
#include "convexp/exponent_oh.hpp"
#include "doctest.h"

using namespace convexp;

namespace {

Channel identity2() { return Channel({{1.0, 0.0}, {0.0, 1.0}}, {0.0, 0.0}); }

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

Distribution random_simplex(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> w(static_cast<std::size_t>(n));
  double s = 0.0;
  for (double& v : w) {
    v = u(rng);
    s += v;
  }
  for (double& v : w) v /= s;
  return Distribution(w);
}

// all points of the m-step simplex mesh over n coordinates
void simplex_mesh(int n, int m, std::vector<std::vector<double>>& out) {
  std::vector<int> counts(static_cast<std::size_t>(n), 0);
  counts[0] = m;
  while (true) {
    std::vector<double> p(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      p[static_cast<std::size_t>(i)] =
          static_cast<double>(counts[static_cast<std::size_t>(i)]) / m;
    }
    out.push_back(std::move(p));
    int i = n - 2;
    while (i >= 0 && counts[static_cast<std::size_t>(i)] == 0) --i;
    if (i < 0) break;
    --counts[static_cast<std::size_t>(i)];
    int tail = counts[static_cast<std::size_t>(n - 1)] + 1;
    counts[static_cast<std::size_t>(n - 1)] = 0;
    counts[static_cast<std::size_t>(i + 1)] = tail;
  }
}

}  // namespace

TEST_CASE("omega_pair basics") {
  Channel id = identity2();
  Distribution u2 = Distribution::uniform(2);
  SUBCASE("lambda = 0 collapses to 0") {
    CHECK(omega_pair(u2, u2, id, {0.0, 0.0}) ==
          doctest::Approx(0.0).epsilon(1e-14));
    std::mt19937_64 rng(5);
    Channel ch = random_channel(rng, 3, 3, 1.0);
    CHECK(omega_pair(random_simplex(rng, 3), random_simplex(rng, 3), ch,
                     {0.7, 0.0}) == doctest::Approx(0.0).epsilon(1e-13));
  }
  SUBCASE("identity channel closed form log sum q Q^-lambda") {
    for (double lam : {0.3, 1.0, 2.5}) {
      double direct = std::log(0.5 * std::pow(0.5, -lam) * 2.0);
      CHECK(omega_pair(u2, u2, id, {0.0, lam}) ==
            doctest::Approx(direct).epsilon(1e-12));
      CHECK(omega_pair(u2, u2, id, {0.0, lam}) ==
            doctest::Approx(lam * std::log(2.0)).epsilon(1e-12));
    }
  }
  SUBCASE("missing output support gives +inf") {
    Distribution degenerate({1.0, 0.0});
    CHECK(omega_pair(u2, degenerate, id, {0.0, 1.0}) == kPosInf);
  }
}

TEST_CASE("q_star inner minimizer") {
  Distribution u2 = Distribution::uniform(2);
  SUBCASE("identity and symmetric channels keep the uniform output") {
    Distribution q1 = q_star(u2, identity2(), {0.0, 0.7});
    CHECK(q1[0] == doctest::Approx(0.5).epsilon(1e-12));
    Distribution q2 = q_star(u2, bsc(0.11), {0.0, 1.0});
    CHECK(q2[0] == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("matches brute-force minimization over an output mesh") {
    std::mt19937_64 rng(99);
    Channel ch = random_channel(rng, 3, 3, 1.0);
    Distribution qx = random_simplex(rng, 3);
    TiltParams tp{0.4, 0.7};
    Distribution qs = q_star(qx, ch, tp);
    double at_star = omega_pair(qx, qs, ch, tp);
    std::vector<std::vector<double>> mesh;
    simplex_mesh(3, 60, mesh);
    for (const auto& pt : mesh) {
      CHECK(at_star <= omega_pair(qx, Distribution(pt), ch, tp) + 1e-12);
    }
  }
  SUBCASE("lemma identity with j_fun") {
    std::mt19937_64 rng(100);
    for (int t = 0; t < 25; ++t) {
      Channel ch = random_channel(rng, 2 + static_cast<int>(rng() % 3),
                                  2 + static_cast<int>(rng() % 3), 1.5);
      Distribution qx = random_simplex(rng, ch.input_size());
      double lam = 0.1 + 3.0 * (rng() % 1000) / 1000.0;
      double mu = 2.0 * (rng() % 1000) / 1000.0;
      TiltParams tp{mu, lam};
      double lhs = omega_pair(qx, q_star(qx, ch, tp), ch, tp);
      double rhs = (1.0 + lam) * j_fun(qx, ch, mu, lam / (1.0 + lam));
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-11));
    }
  }
}

TEST_CASE("j_fun values and monotonicity") {
  Distribution u2 = Distribution::uniform(2);
  SUBCASE("rho = 0 vanishes") {
    std::mt19937_64 rng(7);
    Channel ch = random_channel(rng, 3, 2, 1.0);
    CHECK(j_fun(random_simplex(rng, 3), ch, 0.9, 0.0) ==
          doctest::Approx(0.0).epsilon(1e-13));
  }
  SUBCASE("identity closed form rho log 2") {
    for (double rho : {0.1, 0.5, 0.9}) {
      CHECK(j_fun(u2, identity2(), 0.0, rho) ==
            doctest::Approx(rho * std::log(2.0)).epsilon(1e-12));
    }
  }
  SUBCASE("strictly positive costs make j decreasing in mu") {
    Channel ch({{0.8, 0.2}, {0.3, 0.7}}, {0.5, 1.0});
    double prev = j_fun(Distribution::uniform(2), ch, 0.0, 0.4);
    for (double mu : {0.5, 1.0, 2.0, 4.0}) {
      double cur = j_fun(Distribution::uniform(2), ch, mu, 0.4);
      CHECK(cur < prev);
      prev = cur;
    }
  }
  SUBCASE("rho out of range") {
    CHECK_THROWS_AS(j_fun(u2, identity2(), 0.0, 1.0), ChannelError);
    CHECK_THROWS_AS(j_fun(u2, identity2(), 0.0, -0.1), ChannelError);
  }
}

TEST_CASE("maximize_j") {
  SUBCASE("identity gives the uniform input and rho log |X|") {
    JMax jm = maximize_j(identity2(), 0.0, 0.6);
    CHECK(jm.value == doctest::Approx(0.6 * std::log(2.0)).epsilon(1e-11));
    CHECK(jm.q[0] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(jm.kkt_gap <= 1e-9);
  }
  SUBCASE("symmetric bsc gives uniform") {
    JMax jm = maximize_j(bsc(0.23), 0.0, 0.35);
    CHECK(jm.q[0] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(jm.kkt_gap <= 1e-9);
  }
  SUBCASE("random 3x4 channel against an input-simplex mesh") {
    std::mt19937_64 rng(2024);
    Channel ch = random_channel(rng, 3, 4, 1.0);
    JMax jm = maximize_j(ch, 0.3, 0.5);
    CHECK(jm.kkt_gap <= 1e-10);
    std::vector<std::vector<double>> mesh;
    simplex_mesh(3, 120, mesh);
    double best = kNegInf;
    for (const auto& pt : mesh) {
      best = std::max(best, j_fun(Distribution(pt), ch, 0.3, 0.5));
    }
    CHECK(jm.value >= best - 1e-10);
    CHECK(jm.value <= best + 1e-3);  // mesh resolution
  }
  SUBCASE("concavity of j in q via midpoints") {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 50; ++t) {
      Channel ch = random_channel(rng, 3, 3, 1.0);
      Distribution a = random_simplex(rng, 3);
      Distribution b = random_simplex(rng, 3);
      std::vector<double> midw(3);
      for (int i = 0; i < 3; ++i) {
        midw[static_cast<std::size_t>(i)] = 0.5 * (a[i] + b[i]);
      }
      double rho = 0.05 + 0.9 * (rng() % 1000) / 1000.0;
      double mu = (rng() % 1000) / 1000.0;
      double mid = j_fun(Distribution(midw), ch, mu, rho);
      CHECK(mid >=
            0.5 * (j_fun(a, ch, mu, rho) + j_fun(b, ch, mu, rho)) - 1e-12);
    }
  }
}

TEST_CASE("pointwise exponents") {
  SUBCASE("rho = 0 and lambda = 0 give zero") {
    CHECK(g_ar_point(1.0, 0.5, bsc(0.11, {0.0, 1.0}), 0.5, 0.0) ==
          doctest::Approx(0.0).epsilon(1e-13));
    CHECK(g_oh_point(1.0, 0.5, bsc(0.11, {0.0, 1.0}), {0.5, 0.0}) ==
          doctest::Approx(0.0).epsilon(1e-13));
  }
  SUBCASE("identity channel closed forms") {
    double R = 1.2;
    CHECK(g_ar_point(R, 0.0, identity2(), 0.0, 0.5) ==
          doctest::Approx(0.5 * R - 0.5 * std::log(2.0)).epsilon(1e-11));
    CHECK(g_oh_point(R, 0.0, identity2(), {0.0, 1.0}) ==
          doctest::Approx((R - std::log(2.0)) / 2.0).epsilon(1e-11));
  }
  SUBCASE("proposition-1 pointwise equality on random instances") {
    std::mt19937_64 rng(888);
    for (int t = 0; t < 30; ++t) {
      Channel ch = random_channel(rng, 2 + static_cast<int>(rng() % 3),
                                  2 + static_cast<int>(rng() % 3), 2.0);
      double lam = 4.0 * (rng() % 1000) / 1000.0;
      double mu = 3.0 * (rng() % 1000) / 1000.0;
      double R = 2.0 * (rng() % 1000) / 1000.0;
      double gamma = ch.gamma_min() +
                     (ch.gamma_max() - ch.gamma_min()) * (rng() % 1000) / 1000.0;
      double oh = g_oh_point(R, gamma, ch, {mu, lam});
      double ar = g_ar_point(R, gamma, ch, mu, lam / (1.0 + lam));
      CHECK(std::abs(oh - ar) <= 1e-10 * std::max(1.0, std::abs(oh)));
    }
  }
}

TEST_CASE("g_oh_sup") {
  SUBCASE("zero at and below capacity") {
    Channel b = bsc(0.11);
    double cap = std::log(2.0) - binary_entropy(0.11);
    ExponentReport rep = g_oh_sup(cap - 0.01, 0.0, b);
    CHECK(rep.value == doctest::Approx(0.0).epsilon(1e-12));
    ExponentReport zero = g_oh_sup(0.0, 0.0, b);
    CHECK(zero.value == 0.0);
  }
  SUBCASE("identity channel: R - log 2 with a boundary flag") {
    for (double R : {std::log(2.0) + 0.1, std::log(2.0) + 1.0}) {
      ExponentReport rep = g_oh_sup(R, 0.0, identity2());
      CHECK(rep.value == doctest::Approx(R - std::log(2.0)).epsilon(1e-6));
      CHECK(rep.boundary_hit);  // sup approached at rho -> 1
    }
  }
  SUBCASE("at most R, monotone in R, nonincreasing in gamma") {
    Channel b = bsc(0.11, {0.0, 1.0});
    double c = capacity(b, 0.4).value;
    double v1 = g_oh_sup(c + 0.3, 0.4, b).value;
    double v2 = g_oh_sup(c + 0.6, 0.4, b).value;
    CHECK(v1 <= c + 0.3 + 1e-9);
    CHECK(v2 >= v1 - 1e-9);
    double w1 = g_oh_sup(c + 0.3, 0.5, b).value;
    CHECK(w1 <= v1 + 1e-9);
  }
}

TEST_CASE("g_ar_sup agrees with g_oh_sup") {
  std::mt19937_64 rng(4242);
  Channel ch = random_channel(rng, 3, 3, 1.0);
  double gamma = ch.gamma_min() + 0.5 * (ch.gamma_max() - ch.gamma_min());
  double c = capacity(ch, gamma).value;
  double R = c + 0.4;
  double oh = g_oh_sup(R, gamma, ch).value;
  double ar = g_ar_sup(R, gamma, ch).value;
  CHECK(oh == doctest::Approx(ar).epsilon(1e-8));
}
