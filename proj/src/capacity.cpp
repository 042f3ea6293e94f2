#include "convexp/capacity.hpp"

#include <cmath>

namespace convexp {
namespace {

struct TiltedBA {
  std::vector<double> p;
  std::vector<double> qy;
  std::vector<double> dx;  // D(W(.|x) || qy)
  double mi = 0.0;
  double cost = 0.0;
  int iterations = 0;
};

// Fixed point of I(p) - mu E_p c over the simplex restricted to `support`.
TiltedBA run_tilted_ba(const Channel& ch, double mu,
                       const std::vector<int>& support,
                       const CapacityOptions& opts) {
  const int nx = ch.input_size(), ny = ch.output_size();
  TiltedBA st;
  st.p.assign(static_cast<std::size_t>(nx), 0.0);
  for (int x : support) st.p[static_cast<std::size_t>(x)] = 1.0 / support.size();
  st.qy.assign(static_cast<std::size_t>(ny), 0.0);
  st.dx.assign(static_cast<std::size_t>(nx), 0.0);

  for (int it = 0; it < opts.max_iterations; ++it) {
    std::fill(st.qy.begin(), st.qy.end(), 0.0);
    for (int x : support) {
      double px = st.p[static_cast<std::size_t>(x)];
      if (px == 0.0) continue;
      for (int y = 0; y < ny; ++y) st.qy[static_cast<std::size_t>(y)] += px * ch.w(x, y);
    }
    for (int x : support) {
      double d = 0.0;
      for (int y = 0; y < ny; ++y) {
        double w = ch.w(x, y);
        if (w == 0.0) continue;
        d += w * (ch.log_w(x, y) - std::log(st.qy[static_cast<std::size_t>(y)]));
      }
      st.dx[static_cast<std::size_t>(x)] = d;
    }
    st.iterations = it + 1;

    // Tilted duality gap: max_x [D_x - mu c(x)] vs the current primal.
    double primal = 0.0, best = kNegInf;
    for (int x : support) {
      double score = st.dx[static_cast<std::size_t>(x)] - mu * ch.cost(x);
      primal += st.p[static_cast<std::size_t>(x)] * score;
      best = std::max(best, score);
    }
    if (best - primal <= opts.gap_tol * 0.01) break;

    double norm = 0.0;
    std::vector<double> next(st.p.size(), 0.0);
    for (int x : support) {
      double v = st.p[static_cast<std::size_t>(x)] *
                 std::exp(st.dx[static_cast<std::size_t>(x)] - mu * ch.cost(x) - best);
      next[static_cast<std::size_t>(x)] = v;
      norm += v;
    }
    for (int x : support) st.p[static_cast<std::size_t>(x)] = next[static_cast<std::size_t>(x)] / norm;
  }

  st.mi = 0.0;
  st.cost = 0.0;
  for (int x : support) {
    double px = st.p[static_cast<std::size_t>(x)];
    st.mi += px * st.dx[static_cast<std::size_t>(x)];
    st.cost += px * ch.cost(x);
  }
  return st;
}

// Dual bound over the full alphabet, valid for any mu >= 0 and any output law.
double dual_bound(const Channel& ch, const TiltedBA& st, double mu, double gamma) {
  const int nx = ch.input_size(), ny = ch.output_size();
  double best = kNegInf;
  for (int x = 0; x < nx; ++x) {
    double d = 0.0;
    for (int y = 0; y < ny; ++y) {
      double w = ch.w(x, y);
      if (w == 0.0) continue;
      if (st.qy[static_cast<std::size_t>(y)] == 0.0) return kPosInf;
      d += w * (ch.log_w(x, y) - std::log(st.qy[static_cast<std::size_t>(y)]));
    }
    best = std::max(best, d - mu * (ch.cost(x) - gamma));
  }
  return best;
}

CapacityResult finish(const Channel& ch, const TiltedBA& st, double mu,
                      double gamma, int outer_iters) {
  CapacityResult res{st.mi, Distribution(st.p, "capacity input"), mu, 0.0,
                     st.iterations + outer_iters};
  res.duality_gap = std::max(0.0, dual_bound(ch, st, mu, gamma) - st.mi);
  return res;
}

}  // namespace

CapacityResult capacity(const Channel& ch, double gamma,
                        const CapacityOptions& opts) {
  if (gamma < ch.gamma_min() - 1e-12) {
    throw ChannelError("capacity: gamma " + std::to_string(gamma) +
                       " below minimum input cost " +
                       std::to_string(ch.gamma_min()) +
                       " (constraint set empty)");
  }
  const int nx = ch.input_size();

  std::vector<int> feasible;  // inputs usable at this budget
  for (int x = 0; x < nx; ++x) {
    if (ch.cost(x) <= gamma + 1e-12) feasible.push_back(x);
  }

  // Budget pinned at the cheapest cost: support is forced onto min-cost inputs.
  if (gamma <= ch.gamma_min() + 1e-12) {
    TiltedBA st = run_tilted_ba(ch, 0.0, feasible, opts);
    // A multiplier large enough to dominate every excluded input certifies
    // the restricted solution against the full dual.
    double mu = 0.0;
    for (int x = 0; x < nx; ++x) {
      if (ch.cost(x) <= gamma + 1e-12) continue;
      double d = 0.0;
      for (int y = 0; y < ch.output_size(); ++y) {
        double w = ch.w(x, y);
        if (w == 0.0) continue;
        d += w * (ch.log_w(x, y) -
                  std::log(std::max(st.qy[static_cast<std::size_t>(y)], 1e-300)));
      }
      mu = std::max(mu, (d - st.mi) / (ch.cost(x) - gamma));
    }
    return finish(ch, st, mu, gamma, 0);
  }

  std::vector<int> all(static_cast<std::size_t>(nx));
  for (int x = 0; x < nx; ++x) all[static_cast<std::size_t>(x)] = x;

  TiltedBA st = run_tilted_ba(ch, 0.0, all, opts);
  if (st.cost <= gamma + 1e-12) {
    return finish(ch, st, 0.0, gamma, 0);
  }

  // Constraint is active: bisect on mu. E_p c at the tilted fixed point is
  // nonincreasing in mu.
  double lo = 0.0, hi = 1.0;
  TiltedBA st_hi = run_tilted_ba(ch, hi, all, opts);
  int outer = st.iterations;
  while (st_hi.cost > gamma && hi < 1e12) {
    lo = hi;
    hi *= 2.0;
    st_hi = run_tilted_ba(ch, hi, all, opts);
    outer += st_hi.iterations;
  }
  TiltedBA best = st_hi;
  double best_mu = hi;
  for (int it = 0; it < opts.bisection_steps; ++it) {
    double mid = 0.5 * (lo + hi);
    TiltedBA st_mid = run_tilted_ba(ch, mid, all, opts);
    outer += st_mid.iterations;
    if (st_mid.cost <= gamma) {
      hi = mid;
      best = st_mid;
      best_mu = mid;
    } else {
      lo = mid;
    }
    if (hi - lo <= 1e-15 * std::max(1.0, hi)) break;
  }
  CapacityResult res = finish(ch, best, best_mu, gamma, outer);
  if (res.duality_gap > 1e-6) {
    throw ChannelError("capacity: failed to certify convergence (gap " +
                       std::to_string(res.duality_gap) + ")");
  }
  return res;
}

std::vector<CapacityResult> capacity_curve(const Channel& ch,
                                           std::span<const double> gammas,
                                           const CapacityOptions& opts,
                                           int threads) {
  std::vector<CapacityResult> out(
      gammas.size(), CapacityResult{0.0, Distribution::uniform(ch.input_size()),
                                    0.0, 0.0, 0});
  parallel_for(gammas.size(), threads,
               [&](std::size_t i) { out[i] = capacity(ch, gammas[i], opts); });
  return out;
}

}  // namespace convexp
