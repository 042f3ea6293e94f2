#include "convexp/exponent_oh.hpp"

#include <cmath>

namespace convexp {
namespace {

constexpr double kSupportEps = 1e-9;   // counts as "in support" for KKT checks
constexpr double kIterFloor = 1e-280;  // keeps multiplicative iterates alive

struct FixedPointResult {
  std::vector<double> q;
  double value = 0.0;
  double kkt_gap = 0.0;
  int iterations = 0;
};

// Certified multiplicative ascent on the simplex. score(q, rlog) fills rlog
// with log multiplier ratios (0 at stationarity, q-average of exp(rlog) is 1
// by construction) and returns the objective. The objective is concave, so
// max_x exp(rlog) - 1 bounds the remaining suboptimality. base_step
// compensates the O(rho) flattening of the ratios near rho = 0; the
// backtracking guard keeps overrelaxed steps monotone.
template <typename ScoreFn>
FixedPointResult ascend_simplex(int n, ScoreFn&& score, double base_step,
                                const SolverOptions& opts,
                                const std::vector<double>* warm) {
  FixedPointResult res;
  if (warm != nullptr && static_cast<int>(warm->size()) == n) {
    // Blend with uniform mass: a killed coordinate that the new parameters
    // want back would otherwise regrow from ~0 one multiplicative step at a
    // time.
    res.q = *warm;
    double s = 0.0;
    for (double& v : res.q) {
      v = 0.9 * std::max(v, 0.0) + 0.1 / n;
      s += v;
    }
    for (double& v : res.q) v /= s;
  } else {
    res.q.assign(static_cast<std::size_t>(n), 1.0 / n);
  }
  std::vector<double> rlog(static_cast<std::size_t>(n), 0.0);
  std::vector<double> lnext(static_cast<std::size_t>(n), 0.0);
  std::vector<double> next(static_cast<std::size_t>(n), 0.0);
  std::vector<char> alive(static_cast<std::size_t>(n), 1);
  base_step = std::max(base_step, 1.0);
  double step = base_step;
  double value = score(res.q, rlog);
  for (int it = 0; it < opts.max_iterations; ++it) {
    res.iterations = it + 1;
    double gap_plus = 0.0, gap_supp = 0.0;
    for (int x = 0; x < n; ++x) {
      double dev = std::expm1(rlog[static_cast<std::size_t>(x)]);
      gap_plus = std::max(gap_plus, dev);
      if (res.q[static_cast<std::size_t>(x)] >= kSupportEps) {
        gap_supp = std::max(gap_supp, std::abs(dev));
      }
      // a zeroed coordinate whose multiplier came back above 1 re-enters
      if (!alive[static_cast<std::size_t>(x)] && dev > opts.kkt_tol) {
        alive[static_cast<std::size_t>(x)] = 1;
        res.q[static_cast<std::size_t>(x)] = kSupportEps;
      }
    }
    res.kkt_gap = std::max(0.0, gap_plus) + gap_supp;
    if (res.kkt_gap <= opts.kkt_tol) break;

    // Degenerate boundary optima (multiplier exactly 1 at a vanishing
    // coordinate) decay only like 1/t under multiplicative updates; zeroing
    // the smallest dying coordinate restores the geometric tail. A wrongly
    // zeroed one is caught by the certificate and re-entered above.
    if ((it & 0x1ff) == 0x1ff) {
      int victim = -1;
      for (int x = 0; x < n; ++x) {
        if (alive[static_cast<std::size_t>(x)] &&
            res.q[static_cast<std::size_t>(x)] < 1e-2 &&
            rlog[static_cast<std::size_t>(x)] < 0.0 &&
            (victim < 0 || res.q[static_cast<std::size_t>(x)] <
                               res.q[static_cast<std::size_t>(victim)])) {
          victim = x;
        }
      }
      if (victim >= 0) {
        alive[static_cast<std::size_t>(victim)] = 0;
        res.q[static_cast<std::size_t>(victim)] = 0.0;
        double s = 0.0;
        for (double v : res.q) s += v;
        for (double& v : res.q) v /= s;
        value = score(res.q, rlog);
        continue;
      }
    }

    double m = kNegInf;
    for (int x = 0; x < n; ++x) {
      lnext[static_cast<std::size_t>(x)] =
          alive[static_cast<std::size_t>(x)]
              ? std::log(res.q[static_cast<std::size_t>(x)]) +
                    step * rlog[static_cast<std::size_t>(x)]
              : kNegInf;
      m = std::max(m, lnext[static_cast<std::size_t>(x)]);
    }
    double norm = 0.0;
    for (int x = 0; x < n; ++x) {
      next[static_cast<std::size_t>(x)] =
          alive[static_cast<std::size_t>(x)]
              ? std::max(std::exp(lnext[static_cast<std::size_t>(x)] - m),
                         kIterFloor)
              : 0.0;
      norm += next[static_cast<std::size_t>(x)];
    }
    for (double& v : next) v /= norm;
    double next_value = score(next, rlog);
    if (next_value < value - 1e-14) {
      step = std::max(step * 0.5, 1.0 / 64.0);
      value = score(res.q, rlog);  // restore rlog for the current point
      continue;
    }
    step = std::min(step * 1.25, 1e8);
    res.q.swap(next);
    value = next_value;
  }
  res.value = value;
  return res;
}

// log Q*(y) per Lemma-3 normalization; -inf on outputs unreachable from the
// support of q.
std::vector<double> q_star_log(std::span<const double> q_x, const Channel& ch,
                               double mu, double lam) {
  const int nx = ch.input_size(), ny = ch.output_size();
  std::vector<double> ulog(static_cast<std::size_t>(ny), kNegInf);
  for (int y = 0; y < ny; ++y) {
    LogSumExp acc;
    for (int x = 0; x < nx; ++x) {
      if (q_x[static_cast<std::size_t>(x)] <= 0.0 || ch.w(x, y) == 0.0) continue;
      acc.add(std::log(q_x[static_cast<std::size_t>(x)]) +
              (1.0 + lam) * ch.log_w(x, y) - mu * lam * ch.cost(x));
    }
    if (!acc.empty()) ulog[static_cast<std::size_t>(y)] = acc.value() / (1.0 + lam);
  }
  double norm = logsumexp(ulog);
  if (norm == kNegInf) {
    throw ChannelError("q_star: degenerate support (no reachable output)");
  }
  for (double& v : ulog) {
    if (v != kNegInf) v -= norm;
  }
  return ulog;
}

}  // namespace

double omega_pair(const Distribution& q_x, const Distribution& q_out,
                  const Channel& ch, const TiltParams& params) {
  require_tilt(params);
  if (q_x.size() != ch.input_size() || q_out.size() != ch.output_size()) {
    throw ChannelError("omega_pair: dimension mismatch");
  }
  const double lam = params.lambda, mu = params.mu;
  LogSumExp acc;
  for (int x = 0; x < ch.input_size(); ++x) {
    if (q_x[x] == 0.0) continue;
    double base = std::log(q_x[x]) - mu * lam * ch.cost(x);
    for (int y = 0; y < ch.output_size(); ++y) {
      if (ch.w(x, y) == 0.0) continue;
      if (q_out[y] == 0.0 && lam > 0.0) return kPosInf;
      acc.add(base + (1.0 + lam) * ch.log_w(x, y) -
              (lam > 0.0 ? lam * std::log(q_out[y]) : 0.0));
    }
  }
  return acc.value();
}

Distribution q_star(const Distribution& q_x, const Channel& ch,
                    const TiltParams& params) {
  require_tilt(params);
  if (!(params.lambda > 0.0)) {
    throw ChannelError("q_star: lambda must be > 0");
  }
  if (q_x.size() != ch.input_size()) {
    throw ChannelError("q_star: dimension mismatch");
  }
  std::vector<double> qlog =
      q_star_log(q_x.weights(), ch, params.mu, params.lambda);
  std::vector<double> q(qlog.size(), 0.0);
  for (std::size_t y = 0; y < qlog.size(); ++y) {
    if (qlog[y] != kNegInf) q[y] = std::exp(qlog[y]);
  }
  return Distribution(std::move(q), "q_star output");
}

double j_fun(const Distribution& q_x, const Channel& ch, double mu, double rho) {
  require_arimoto_tilt(mu, rho);
  if (q_x.size() != ch.input_size()) {
    throw ChannelError("j_fun: dimension mismatch");
  }
  const double inv = 1.0 / (1.0 - rho);
  LogSumExp outer;
  for (int y = 0; y < ch.output_size(); ++y) {
    LogSumExp inner;
    for (int x = 0; x < ch.input_size(); ++x) {
      if (q_x[x] == 0.0 || ch.w(x, y) == 0.0) continue;
      inner.add(std::log(q_x[x]) + inv * (ch.log_w(x, y) - mu * rho * ch.cost(x)));
    }
    if (!inner.empty()) outer.add((1.0 - rho) * inner.value());
  }
  return outer.value();
}

JMax maximize_j(const Channel& ch, double mu, double rho,
                const SolverOptions& opts, const std::vector<double>* warm) {
  require_arimoto_tilt(mu, rho);
  const int nx = ch.input_size(), ny = ch.output_size();
  if (rho == 0.0) {
    return {Distribution::uniform(nx), 0.0, 0.0, 0};
  }
  const double inv = 1.0 / (1.0 - rho);
  std::vector<double> a_log(static_cast<std::size_t>(nx) * ny, kNegInf);
  for (int x = 0; x < nx; ++x) {
    for (int y = 0; y < ny; ++y) {
      if (ch.w(x, y) > 0.0) {
        a_log[static_cast<std::size_t>(x) * ny + y] =
            inv * (ch.log_w(x, y) - mu * rho * ch.cost(x));
      }
    }
  }
  std::vector<double> lam_log(static_cast<std::size_t>(ny));
  auto score = [&](const std::vector<double>& q, std::vector<double>& r) {
    for (int y = 0; y < ny; ++y) {
      LogSumExp acc;
      for (int x = 0; x < nx; ++x) {
        double a = a_log[static_cast<std::size_t>(x) * ny + y];
        if (a == kNegInf || q[static_cast<std::size_t>(x)] <= 0.0) continue;
        acc.add(std::log(q[static_cast<std::size_t>(x)]) + a);
      }
      lam_log[static_cast<std::size_t>(y)] = acc.empty() ? kNegInf : acc.value();
    }
    LogSumExp jacc;
    for (int y = 0; y < ny; ++y) {
      if (lam_log[static_cast<std::size_t>(y)] != kNegInf) {
        jacc.add((1.0 - rho) * lam_log[static_cast<std::size_t>(y)]);
      }
    }
    double jlog = jacc.value();
    for (int x = 0; x < nx; ++x) {
      LogSumExp gacc;
      for (int y = 0; y < ny; ++y) {
        double a = a_log[static_cast<std::size_t>(x) * ny + y];
        if (a == kNegInf || lam_log[static_cast<std::size_t>(y)] == kNegInf) continue;
        gacc.add(a - rho * lam_log[static_cast<std::size_t>(y)]);
      }
      r[static_cast<std::size_t>(x)] = gacc.empty() ? kNegInf : gacc.value() - jlog;
    }
    return jlog;
  };
  double base_step = std::min(1.0 / std::max(rho, 1e-12), 1e6);
  FixedPointResult fp = ascend_simplex(nx, score, base_step, opts, warm);
  return {Distribution(std::move(fp.q), "j maximizer"), fp.value, fp.kkt_gap,
          fp.iterations};
}

OmegaEval omega_channel(const Channel& ch, const TiltParams& params,
                        const SolverOptions& opts,
                        const std::vector<double>* warm) {
  require_tilt(params);
  const int nx = ch.input_size(), ny = ch.output_size();
  if (params.lambda == 0.0) {
    return {0.0, Distribution::uniform(nx), Distribution::uniform(ny), params,
            0.0, 0};
  }
  const double lam = params.lambda, mu = params.mu;
  std::vector<double> glog(static_cast<std::size_t>(nx), kNegInf);
  auto score = [&](const std::vector<double>& q, std::vector<double>& r) {
    std::vector<double> qlog = q_star_log(q, ch, mu, lam);
    LogSumExp zacc;
    for (int x = 0; x < nx; ++x) {
      LogSumExp gacc;
      for (int y = 0; y < ny; ++y) {
        if (ch.w(x, y) == 0.0) continue;
        gacc.add((1.0 + lam) * ch.log_w(x, y) - mu * lam * ch.cost(x) -
                 lam * qlog[static_cast<std::size_t>(y)]);
      }
      glog[static_cast<std::size_t>(x)] = gacc.empty() ? kNegInf : gacc.value();
      if (q[static_cast<std::size_t>(x)] > 0.0 &&
          glog[static_cast<std::size_t>(x)] != kNegInf) {
        zacc.add(std::log(q[static_cast<std::size_t>(x)]) +
                 glog[static_cast<std::size_t>(x)]);
      }
    }
    double zlog = zacc.value();
    for (int x = 0; x < nx; ++x) {
      r[static_cast<std::size_t>(x)] =
          glog[static_cast<std::size_t>(x)] == kNegInf
              ? kNegInf
              : glog[static_cast<std::size_t>(x)] - zlog;
    }
    return zlog;
  };
  double base_step = std::min(1.0 + 1.0 / lam, 1e6);
  FixedPointResult fp = ascend_simplex(nx, score, base_step, opts, warm);
  Distribution qin(std::move(fp.q), "omega input");
  return {fp.value, qin, q_star(qin, ch, params), params, fp.kkt_gap,
          fp.iterations};
}

double g_ar_point(double rate, double gamma, const Channel& ch, double mu,
                  double rho, const SolverOptions& opts) {
  JMax jm = maximize_j(ch, mu, rho, opts);
  return rho * (rate - mu * gamma) - jm.value;
}

double g_oh_point(double rate, double gamma, const Channel& ch,
                  const TiltParams& params, const SolverOptions& opts) {
  OmegaEval om = omega_channel(ch, params, opts);
  // rho (R - mu gamma) - Omega/(1+lambda); algebraically the stated quotient
  // but stable when lambda is enormous.
  double rho = params.lambda / (1.0 + params.lambda);
  return rho * (rate - params.mu * gamma) - om.value / (1.0 + params.lambda);
}

namespace {

std::vector<double> mu_grid(const Channel& ch, const SweepOptions& opts) {
  if (ch.uniform_cost()) return {0.0};
  double mu_max = opts.mu_max_scale / ch.gamma_max();
  std::vector<double> grid{0.0};
  int extra = opts.mu_points - 1;
  double lo = mu_max * 1e-4;
  for (int i = 0; i < extra; ++i) {
    double t = extra == 1 ? 1.0 : static_cast<double>(i) / (extra - 1);
    grid.push_back(lo * std::pow(mu_max / lo, t));
  }
  return grid;
}

// point(mu, rho, warm, q_out) -> value; must be coordinate-wise concave in
// (mu, rho). Grid rows sweep rho with warm starts, then coordinate golden
// refinement and a shrinking joint zoom grid around the best point.
template <typename PointFn>
ExponentReport sweep_sup(const Channel& ch, const SweepOptions& opts,
                         PointFn&& point) {
  std::vector<double> mus = mu_grid(ch, opts);
  std::vector<double> rhos;
  rhos.reserve(static_cast<std::size_t>(opts.rho_points));
  for (int i = 0; i < opts.rho_points; ++i) {
    rhos.push_back(opts.rho_grid_max * i / (opts.rho_points - 1));
  }

  ExponentReport rep;
  rep.grid_trace.resize(mus.size() * rhos.size());
  std::vector<std::vector<double>> row_best_q(mus.size());
  std::vector<double> row_best_val(mus.size(), kNegInf);
  std::vector<double> row_best_rho(mus.size(), 0.0);
  parallel_for(mus.size(), opts.threads, [&](std::size_t i) {
    std::vector<double> strand_warm;  // previous rho point on this row
    for (std::size_t j = 0; j < rhos.size(); ++j) {
      std::vector<double> q_out;
      double v = point(mus[i], rhos[j],
                       strand_warm.empty() ? nullptr : &strand_warm, &q_out);
      rep.grid_trace[i * rhos.size() + j] = {mus[i], rhos[j],
                                             rhos[j] / (1.0 - rhos[j]), v};
      if (v > row_best_val[i]) {
        row_best_val[i] = v;
        row_best_rho[i] = rhos[j];
        row_best_q[i] = q_out;
      }
      strand_warm = std::move(q_out);
    }
  });

  std::size_t best_row = 0;
  for (std::size_t i = 1; i < mus.size(); ++i) {
    if (row_best_val[i] > row_best_val[best_row] + 1e-15) best_row = i;
  }
  double best_mu = mus[best_row];
  double best_rho = row_best_rho[best_row];
  double best_val = row_best_val[best_row];
  std::vector<double> best_q = row_best_q[best_row];

  const double mu_hi_cap = mus.back();
  const double rho_cap = opts.rho_cap;
  auto clampd = [](double v, double lo, double hi) {
    return std::min(std::max(v, lo), hi);
  };
  auto eval = [&](double m, double r) {
    std::vector<double> q_out;
    double v = point(m, r, best_q.empty() ? nullptr : &best_q, &q_out);
    if (v > best_val) {
      best_val = v;
      best_mu = m;
      best_rho = r;
      best_q = std::move(q_out);
    }
    return v;
  };

  double mu_span = mus.size() > 1 ? mu_hi_cap / (opts.mu_points - 1) : 0.0;
  double rho_span = rhos.size() > 1 ? rhos[1] - rhos[0] : 0.0;
  for (int round = 0; round < 4; ++round) {
    if (mus.size() > 1) {
      double lo = clampd(best_mu - 2.0 * mu_span, 0.0, mu_hi_cap);
      double hi = clampd(best_mu + 2.0 * mu_span, 0.0, mu_hi_cap);
      golden_max([&](double m) { return eval(m, best_rho); }, lo, hi,
                 opts.param_tol);
    }
    {
      double lo = clampd(best_rho - 2.0 * rho_span, 0.0, rho_cap);
      double hi = clampd(best_rho + 2.0 * rho_span, 0.0, rho_cap);
      if (best_rho >= opts.rho_grid_max - 1e-12) hi = rho_cap;
      golden_max([&](double r) { return eval(best_mu, r); }, lo, hi,
                 opts.param_tol);
    }
    mu_span *= 0.25;
    rho_span *= 0.25;
  }

  double mu_box = mus.size() > 1 ? mu_hi_cap / (opts.mu_points - 1) : 0.0;
  double rho_box = rhos.size() > 1 ? rhos[1] - rhos[0] : 0.0;
  for (int round = 0; round < 6; ++round) {
    double m_lo = clampd(best_mu - mu_box, 0.0, mu_hi_cap);
    double m_hi = clampd(best_mu + mu_box, 0.0, mu_hi_cap);
    double r_lo = clampd(best_rho - rho_box, 0.0, rho_cap);
    double r_hi = clampd(best_rho + rho_box, 0.0, rho_cap);
    for (int a = 0; a < 7; ++a) {
      for (int b = 0; b < 7; ++b) {
        double m = mus.size() > 1 ? m_lo + (m_hi - m_lo) * a / 6.0 : 0.0;
        double r = r_lo + (r_hi - r_lo) * b / 6.0;
        eval(m, r);
      }
      if (mus.size() == 1) break;
    }
    mu_box *= 0.25;
    rho_box *= 0.25;
  }

  rep.value = std::max(best_val, 0.0);  // rho = 0 always achieves 0
  rep.best_rho = best_rho;
  rep.best_params = {best_mu, best_rho / (1.0 - best_rho)};
  rep.boundary_hit = (best_rho >= rho_cap - 1e-9) ||
                     (mus.size() > 1 && best_mu >= 0.999 * mu_hi_cap);
  if (!best_q.empty()) rep.best_input = Distribution(best_q, "sweep input");
  return rep;
}

}  // namespace

ExponentReport g_oh_sup(double rate, double gamma, const Channel& ch,
                        const SweepOptions& opts) {
  if (gamma < ch.gamma_min() - 1e-12) {
    throw ChannelError("g_oh_sup: gamma below minimum input cost");
  }
  auto point = [&](double mu, double rho, const std::vector<double>* warm,
                   std::vector<double>* q_out) {
    if (rho == 0.0) {
      if (q_out) q_out->assign(static_cast<std::size_t>(ch.input_size()),
                               1.0 / ch.input_size());
      return 0.0;
    }
    TiltParams tp{mu, rho / (1.0 - rho)};
    OmegaEval om = omega_channel(ch, tp, opts.solver, warm);
    if (q_out) q_out->assign(om.q_input.weights().begin(),
                             om.q_input.weights().end());
    return rho * (rate - mu * gamma) - om.value / (1.0 + tp.lambda);
  };
  ExponentReport rep = sweep_sup(ch, opts, point);
  if (rep.best_params.lambda > 0.0) {
    std::vector<double> warm(rep.best_input.weights().begin(),
                             rep.best_input.weights().end());
    OmegaEval om = omega_channel(ch, rep.best_params, opts.solver, &warm);
    rep.kkt_gap = om.kkt_gap;
  }
  if (gamma > ch.gamma_min() + 1e-12 && rep.value > rate + 1e-9) {
    throw ChannelError("g_oh_sup: value exceeds rate, numerical breakdown");
  }
  return rep;
}

ExponentReport g_ar_sup(double rate, double gamma, const Channel& ch,
                        const SweepOptions& opts) {
  if (gamma < ch.gamma_min() - 1e-12) {
    throw ChannelError("g_ar_sup: gamma below minimum input cost");
  }
  auto point = [&](double mu, double rho, const std::vector<double>* warm,
                   std::vector<double>* q_out) {
    JMax jm = maximize_j(ch, mu, rho, opts.solver, warm);
    if (q_out) q_out->assign(jm.q.weights().begin(), jm.q.weights().end());
    return rho * (rate - mu * gamma) - jm.value;
  };
  ExponentReport rep = sweep_sup(ch, opts, point);
  if (rep.best_rho > 0.0) {
    std::vector<double> warm(rep.best_input.weights().begin(),
                             rep.best_input.weights().end());
    JMax jm = maximize_j(ch, rep.best_params.mu, rep.best_rho, opts.solver,
                         &warm);
    rep.kkt_gap = jm.kkt_gap;
  }
  if (gamma > ch.gamma_min() + 1e-12 && rep.value > rate + 1e-9) {
    throw ChannelError("g_ar_sup: value exceeds rate, numerical breakdown");
  }
  return rep;
}

}  // namespace convexp
