#include "convexp/exponent_dk.hpp"

#include <cmath>

namespace convexp {
namespace {

constexpr double kPin = 1e-200;       // below this a coordinate is numerically dead
constexpr double kFloor = 1e-300;     // hard floor for iterates
constexpr double kSupportEps = 1e-9;  // counts as support for the KKT residual

void require_dk_params(double mu, double lambda) {
  if (!(mu >= 0.0) || !std::isfinite(mu)) {
    throw ChannelError("dk: mu must be finite and >= 0");
  }
  if (!(lambda >= 0.0) || lambda > 1.0) {
    throw ChannelError("dk: lambda must lie in [0,1]");
  }
}

struct Workspace {
  int nx, ny;
  std::vector<double> q;      // joint, row-major, zero off the W-support
  std::vector<double> qx, qy;
  void marginals() {
    std::fill(qx.begin(), qx.end(), 0.0);
    std::fill(qy.begin(), qy.end(), 0.0);
    for (int x = 0; x < nx; ++x) {
      for (int y = 0; y < ny; ++y) {
        double v = q[static_cast<std::size_t>(x) * ny + y];
        qx[static_cast<std::size_t>(x)] += v;
        qy[static_cast<std::size_t>(y)] += v;
      }
    }
  }
};

// Objective core: lambda(R - I) + mu E_q c + D, with the constant -mu gamma
// added by callers. Written through the entropy decomposition to avoid
// cancellation: (1-l) negH(q) - (1-l) negH(qx) + l negH(qy)
//               + sum q (mu c - log W) + l R.
double core_value(const Workspace& ws, const Channel& ch, double rate,
                  double mu, double lambda) {
  double negh_q = 0.0, negh_qx = 0.0, negh_qy = 0.0, lin = 0.0;
  for (int x = 0; x < ws.nx; ++x) {
    negh_qx += xlogx(ws.qx[static_cast<std::size_t>(x)]);
    for (int y = 0; y < ws.ny; ++y) {
      double v = ws.q[static_cast<std::size_t>(x) * ws.ny + y];
      if (v == 0.0) continue;
      negh_q += xlogx(v);
      lin += v * (mu * ch.cost(x) - ch.log_w(x, y));
    }
  }
  for (int y = 0; y < ws.ny; ++y) negh_qy += xlogx(ws.qy[static_cast<std::size_t>(y)]);
  return (1.0 - lambda) * (negh_q - negh_qx) + lambda * negh_qy + lin +
         lambda * rate;
}

DkInner solve_lambda_zero(double gamma, const Channel& ch, double mu) {
  // min_q D + mu E c = mu Gamma_0 at (cheapest point mass) o W.
  int x0 = 0;
  for (int x = 1; x < ch.input_size(); ++x) {
    if (ch.cost(x) < ch.cost(x0)) x0 = x;
  }
  std::vector<double> q(static_cast<std::size_t>(ch.input_size()) *
                            ch.output_size(),
                        0.0);
  for (int y = 0; y < ch.output_size(); ++y) {
    q[static_cast<std::size_t>(x0) * ch.output_size() + y] = ch.w(x0, y);
  }
  return {JointDistribution(ch.input_size(), ch.output_size(), std::move(q)),
          -mu * (gamma - ch.gamma_min()), 0.0, 0};
}

DkInner solve_lambda_one(double rate, double gamma, const Channel& ch,
                         double mu) {
  // At lambda = 1 the objective is linear in q given q_Y:
  //   R - mu gamma + sum_y q_Y(y) [log q_Y(y) + m(y)],
  //   m(y) = min_x (mu c(x) - log W(y|x)),
  // minimized by the Gibbs law q_Y ~ e^{-m}.
  const int nx = ch.input_size(), ny = ch.output_size();
  std::vector<int> best_x(static_cast<std::size_t>(ny), -1);
  std::vector<double> mlog(static_cast<std::size_t>(ny), kPosInf);
  for (int y = 0; y < ny; ++y) {
    for (int x = 0; x < nx; ++x) {
      if (ch.w(x, y) == 0.0) continue;
      double m = mu * ch.cost(x) - ch.log_w(x, y);
      if (m < mlog[static_cast<std::size_t>(y)]) {
        mlog[static_cast<std::size_t>(y)] = m;
        best_x[static_cast<std::size_t>(y)] = x;
      }
    }
  }
  LogSumExp acc;
  for (int y = 0; y < ny; ++y) {
    if (best_x[static_cast<std::size_t>(y)] >= 0) {
      acc.add(-mlog[static_cast<std::size_t>(y)]);
    }
  }
  double lognorm = acc.value();
  std::vector<double> q(static_cast<std::size_t>(nx) * ny, 0.0);
  for (int y = 0; y < ny; ++y) {
    int x = best_x[static_cast<std::size_t>(y)];
    if (x < 0) continue;
    q[static_cast<std::size_t>(x) * ny + y] =
        std::exp(-mlog[static_cast<std::size_t>(y)] - lognorm);
  }
  return {JointDistribution(nx, ny, std::move(q)),
          rate - mu * gamma - lognorm, 0.0, 0};
}

}  // namespace

double dk_objective(const JointDistribution& q, double rate, double gamma,
                    const Channel& ch, double mu, double lambda) {
  require_dk_params(mu, lambda);
  if (q.input_size() != ch.input_size() || q.output_size() != ch.output_size()) {
    throw ChannelError("dk_objective: dimension mismatch");
  }
  double d = conditional_divergence(q, ch);
  if (d == kPosInf) return kPosInf;
  double mi = joint_mutual_information(q);
  double ec = q.expected_input_cost(ch.costs());
  return lambda * (rate - mi) - mu * gamma + mu * ec + d;
}

DkObjectiveEval dk_objective_eval(const JointDistribution& q, double rate,
                                  double gamma, const Channel& ch, double mu,
                                  double lambda) {
  DkObjectiveEval ev{q, 0.0, 0.0, 0.0};
  double d = conditional_divergence(q, ch);
  double mi = joint_mutual_information(q);
  ev.theta = std::max(rate - mi, 0.0) + d;
  ev.cost_slack = gamma - q.expected_input_cost(ch.costs());
  ev.value = dk_objective(q, rate, gamma, ch, mu, lambda);
  return ev;
}

DkInner minimize_dk(double rate, double gamma, const Channel& ch, double mu,
                    double lambda, const DkOptions& opts,
                    const std::vector<double>* warm) {
  require_dk_params(mu, lambda);
  if (lambda == 0.0) return solve_lambda_zero(gamma, ch, mu);
  if (lambda == 1.0) return solve_lambda_one(rate, gamma, ch, mu);

  const int nx = ch.input_size(), ny = ch.output_size();
  const std::size_t sz = static_cast<std::size_t>(nx) * ny;
  Workspace ws{nx, ny, {}, std::vector<double>(static_cast<std::size_t>(nx)),
               std::vector<double>(static_cast<std::size_t>(ny))};

  std::size_t support = 0;
  for (std::size_t i = 0; i < sz; ++i) {
    if (ch.w(static_cast<int>(i) / ny, static_cast<int>(i) % ny) > 0.0) ++support;
  }
  if (warm != nullptr && warm->size() == sz) {
    // blended with uniform so killed coordinates can return quickly
    ws.q = *warm;
    double s = 0.0;
    for (std::size_t i = 0; i < sz; ++i) {
      int x = static_cast<int>(i) / ny, y = static_cast<int>(i) % ny;
      ws.q[i] = ch.w(x, y) > 0.0
                    ? 0.9 * std::max(ws.q[i], 0.0) +
                          0.1 / static_cast<double>(support)
                    : 0.0;
      s += ws.q[i];
    }
    for (double& v : ws.q) v /= s;
  } else {
    ws.q.assign(sz, 0.0);
    for (std::size_t i = 0; i < sz; ++i) {
      int x = static_cast<int>(i) / ny, y = static_cast<int>(i) % ny;
      if (ch.w(x, y) > 0.0) ws.q[i] = 1.0 / static_cast<double>(support);
    }
  }
  ws.marginals();

  std::vector<double> grad(sz, 0.0);
  std::vector<double> logq_next(sz, 0.0);
  auto fill_grad = [&]() {
    for (int x = 0; x < nx; ++x) {
      for (int y = 0; y < ny; ++y) {
        std::size_t i = static_cast<std::size_t>(x) * ny + y;
        if (ch.w(x, y) == 0.0) continue;
        grad[i] = (1.0 - lambda) *
                      (std::log(ws.q[i]) - std::log(ws.qx[static_cast<std::size_t>(x)])) +
                  lambda * std::log(ws.qy[static_cast<std::size_t>(y)]) -
                  ch.log_w(x, y) + mu * ch.cost(x);
      }
    }
  };

  DkInner res{JointDistribution(nx, ny, ws.q), 0.0, kPosInf, 0};
  double value = core_value(ws, ch, rate, mu, lambda);
  double eta = 1.0;
  fill_grad();
  for (int it = 0; it < opts.max_iterations; ++it) {
    res.iterations = it + 1;
    // KKT residual: on-support deviation plus off-support improvement, with
    // numerically dead coordinates excluded (see nu below).
    double nu = 0.0;
    for (std::size_t i = 0; i < sz; ++i) {
      if (ws.q[i] > 0.0) nu += ws.q[i] * grad[i];
    }
    double resid = 0.0;
    for (int x = 0; x < nx; ++x) {
      for (int y = 0; y < ny; ++y) {
        std::size_t i = static_cast<std::size_t>(x) * ny + y;
        if (ch.w(x, y) == 0.0 || ws.q[i] < kPin) continue;
        if (ws.q[i] >= kSupportEps) {
          resid = std::max(resid, std::abs(grad[i] - nu));
        } else {
          resid = std::max(resid, nu - grad[i]);
        }
      }
    }
    res.stationarity_gap = resid;
    if (resid <= opts.kkt_tol) break;

    // entropic step: log q' = log q - eta grad, renormalized
    double m = kNegInf;
    for (std::size_t i = 0; i < sz; ++i) {
      if (ws.q[i] > 0.0) {
        logq_next[i] = std::log(ws.q[i]) - eta * grad[i];
        m = std::max(m, logq_next[i]);
      } else {
        logq_next[i] = kNegInf;
      }
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < sz; ++i) {
      if (logq_next[i] != kNegInf) norm += std::exp(logq_next[i] - m);
    }
    double lognorm = m + std::log(norm);
    Workspace trial = ws;
    for (std::size_t i = 0; i < sz; ++i) {
      trial.q[i] = logq_next[i] == kNegInf
                       ? 0.0
                       : std::max(std::exp(logq_next[i] - lognorm), kFloor);
    }
    trial.marginals();
    double trial_value = core_value(trial, ch, rate, mu, lambda);
    if (trial_value > value + 1e-14) {
      eta = std::max(eta * 0.5, 1.0 / 1024.0);
      continue;
    }
    ws = std::move(trial);
    value = trial_value;
    eta = std::min(1.0, eta * 1.4);
    fill_grad();
  }
  res.joint = JointDistribution(nx, ny, ws.q);
  res.value = value - mu * gamma;
  return res;
}

namespace {

std::vector<double> dk_mu_grid(const Channel& ch, const DkOptions& opts) {
  if (ch.uniform_cost()) return {0.0};
  double mu_max = opts.mu_max_scale / ch.gamma_max();
  std::vector<double> grid{0.0};
  double lo = mu_max * 1e-4;
  for (int i = 0; i < opts.mu_points - 1; ++i) {
    double t = opts.mu_points == 2
                   ? 1.0
                   : static_cast<double>(i) / (opts.mu_points - 2);
    grid.push_back(lo * std::pow(mu_max / lo, t));
  }
  return grid;
}

}  // namespace

DkReport g_dk(double rate, double gamma, const Channel& ch,
              const DkOptions& opts) {
  if (gamma < ch.gamma_min() - 1e-12) {
    throw ChannelError("g_dk: gamma below minimum input cost");
  }
  std::vector<double> mus = dk_mu_grid(ch, opts);
  std::vector<double> lambdas;
  for (int i = 0; i < opts.lambda_points; ++i) {
    lambdas.push_back(static_cast<double>(i) / (opts.lambda_points - 1));
  }

  struct Best {
    double value = kNegInf;
    double mu = 0.0, lambda = 0.0;
    std::vector<double> q;
    double gap = 0.0;
  };
  std::vector<Best> row_best(mus.size());
  parallel_for(mus.size(), opts.threads, [&](std::size_t i) {
    std::vector<double> strand;
    for (double lam : lambdas) {
      DkInner inner = minimize_dk(rate, gamma, ch, mus[i], lam, opts,
                                  strand.empty() ? nullptr : &strand);
      strand.assign(inner.joint.weights().begin(), inner.joint.weights().end());
      if (inner.value > row_best[i].value) {
        row_best[i] = {inner.value, mus[i], lam, strand,
                       inner.stationarity_gap};
      }
    }
  });
  // The (mu,lambda) = (0,0) member is exactly 0 (min_q D = 0 at q_X o W),
  // flooring the outer max analytically.
  DkInner zero = solve_lambda_zero(gamma, ch, 0.0);
  Best best{0.0, 0.0, 0.0,
            std::vector<double>(zero.joint.weights().begin(),
                                zero.joint.weights().end()),
            0.0};
  for (const Best& rb : row_best) {
    if (rb.value > best.value + 1e-15) best = rb;
  }

  auto eval = [&](double m, double l) {
    DkInner inner =
        minimize_dk(rate, gamma, ch, m, l, opts,
                    best.q.empty() ? nullptr : &best.q);
    if (inner.value > best.value) {
      best = {inner.value, m, l,
              std::vector<double>(inner.joint.weights().begin(),
                                  inner.joint.weights().end()),
              inner.stationarity_gap};
    }
    return inner.value;
  };

  const double mu_cap = mus.back();
  auto clampd = [](double v, double lo, double hi) {
    return std::min(std::max(v, lo), hi);
  };
  double mu_span = mus.size() > 1 ? mu_cap / (opts.mu_points - 1) : 0.0;
  double lam_span = lambdas[1] - lambdas[0];
  for (int round = 0; round < 3; ++round) {
    if (mus.size() > 1) {
      golden_max([&](double m) { return eval(m, best.lambda); },
                 clampd(best.mu - 2 * mu_span, 0.0, mu_cap),
                 clampd(best.mu + 2 * mu_span, 0.0, mu_cap), opts.param_tol);
    }
    golden_max([&](double l) { return eval(best.mu, l); },
               clampd(best.lambda - 2 * lam_span, 0.0, 1.0),
               clampd(best.lambda + 2 * lam_span, 0.0, 1.0), opts.param_tol);
    mu_span *= 0.25;
    lam_span *= 0.25;
  }
  double mu_box = mus.size() > 1 ? mu_cap / (opts.mu_points - 1) : 0.0;
  double lam_box = lambdas[1] - lambdas[0];
  for (int round = 0; round < 5; ++round) {
    double m_lo = clampd(best.mu - mu_box, 0.0, mu_cap);
    double m_hi = clampd(best.mu + mu_box, 0.0, mu_cap);
    double l_lo = clampd(best.lambda - lam_box, 0.0, 1.0);
    double l_hi = clampd(best.lambda + lam_box, 0.0, 1.0);
    for (int a = 0; a < 7; ++a) {
      for (int b = 0; b < 7; ++b) {
        double m = mus.size() > 1 ? m_lo + (m_hi - m_lo) * a / 6.0 : 0.0;
        double l = l_lo + (l_hi - l_lo) * b / 6.0;
        eval(m, l);
      }
      if (mus.size() == 1) break;
    }
    mu_box *= 0.25;
    lam_box *= 0.25;
  }

  DkReport rep;
  rep.value = std::max(best.value, 0.0);
  rep.best_mu = best.mu;
  rep.best_lambda = best.lambda;
  rep.best_joint = JointDistribution(ch.input_size(), ch.output_size(), best.q);
  rep.stationarity_gap = best.gap;
  rep.path = "parametric";

  // Theta-form cross-check at the optimizer: a feasible point upper-bounds
  // the direct constrained minimum, which Lemma-2 exactness says equals the
  // parametric max.
  JointDistribution qstar = rep.best_joint;
  double slack = gamma - qstar.expected_input_cost(ch.costs());
  rep.cost_slack = slack;
  if (slack < 0.0) {
    // mix toward the cheapest row to restore feasibility
    DkInner cheap = solve_lambda_zero(gamma, ch, 0.0);
    double ec_q = qstar.expected_input_cost(ch.costs());
    double ec_c = cheap.joint.expected_input_cost(ch.costs());
    double t = (ec_q - gamma) / std::max(ec_q - ec_c, 1e-300);
    t = std::min(std::max(t, 0.0), 1.0);
    std::vector<double> mix(qstar.weights().size());
    for (std::size_t i = 0; i < mix.size(); ++i) {
      mix[i] = (1.0 - t) * qstar.weights()[i] + t * cheap.joint.weights()[i];
    }
    qstar = JointDistribution(ch.input_size(), ch.output_size(), std::move(mix));
  }
  DkObjectiveEval ev =
      dk_objective_eval(qstar, rate, gamma, ch, rep.best_mu, rep.best_lambda);
  rep.direct_gap = ev.theta - rep.value;
  return rep;
}

std::pair<double, double> decomposition_check(const JointDistribution& q,
                                              const Channel& ch, double mu,
                                              double rho) {
  require_arimoto_tilt(mu, rho);
  if (!(rho > 0.0)) throw ChannelError("decomposition_check: rho must be > 0");
  if (q.input_size() != ch.input_size() || q.output_size() != ch.output_size()) {
    throw ChannelError("decomposition_check: dimension mismatch");
  }
  const int nx = ch.input_size(), ny = ch.output_size();
  for (int x = 0; x < nx; ++x) {
    for (int y = 0; y < ny; ++y) {
      if (ch.w(x, y) > 0.0 && q(x, y) <= 0.0) {
        throw ChannelError(
            "decomposition_check: joint must be strictly positive on the "
            "W-support");
      }
      if (ch.w(x, y) == 0.0 && q(x, y) > 0.0) {
        throw ChannelError("decomposition_check: joint escapes the W-support");
      }
    }
  }
  Distribution qx = q.marginal_x();
  Distribution qy = q.marginal_y();

  double mi = joint_mutual_information(q);
  double dv = conditional_divergence(q, ch);
  double ec = q.expected_input_cost(ch.costs());
  double lhs = rho * (-mi + mu * ec) + dv;

  // hat-constructions from the tilted kernel at this q_X
  const double inv = 1.0 / (1.0 - rho);
  std::vector<double> lam_log(static_cast<std::size_t>(ny), kNegInf);
  for (int y = 0; y < ny; ++y) {
    LogSumExp acc;
    for (int x = 0; x < nx; ++x) {
      if (qx[x] == 0.0 || ch.w(x, y) == 0.0) continue;
      acc.add(std::log(qx[x]) + inv * (ch.log_w(x, y) - mu * rho * ch.cost(x)));
    }
    if (!acc.empty()) lam_log[static_cast<std::size_t>(y)] = acc.value();
  }
  LogSumExp norm_acc;
  for (int y = 0; y < ny; ++y) {
    if (lam_log[static_cast<std::size_t>(y)] != kNegInf) {
      norm_acc.add((1.0 - rho) * lam_log[static_cast<std::size_t>(y)]);
    }
  }
  double lognorm = norm_acc.value();  // log sum Lambda^{1-rho}

  double d_backward = 0.0;  // D(q_{X|Y} || qhat_{X|Y} | q_Y)
  double d_out = 0.0;       // D(q_Y || qhat_Y)
  for (int y = 0; y < ny; ++y) {
    if (qy[y] == 0.0) continue;
    double qhat_y_log = (1.0 - rho) * lam_log[static_cast<std::size_t>(y)] - lognorm;
    d_out += qy[y] * (std::log(qy[y]) - qhat_y_log);
    for (int x = 0; x < nx; ++x) {
      double v = q(x, y);
      if (v == 0.0) continue;
      double qxy = v / qy[y];  // q_{X|Y}(x|y)
      double qhat_log = std::log(qx[x]) +
                        inv * (ch.log_w(x, y) - mu * rho * ch.cost(x)) -
                        lam_log[static_cast<std::size_t>(y)];
      d_backward += qy[y] * qxy * (std::log(qxy) - qhat_log);
    }
  }
  double j = j_fun(qx, ch, mu, rho);
  double rhs = (1.0 - rho) * d_backward + d_out - j;
  return {lhs, rhs};
}

JointDistribution backward_joint(const Distribution& q_x, const Channel& ch,
                                 double mu, double rho,
                                 std::vector<double>* row_sums) {
  require_arimoto_tilt(mu, rho);
  if (!(rho > 0.0)) throw ChannelError("backward_joint: rho must be > 0");
  if (q_x.size() != ch.input_size()) {
    throw ChannelError("backward_joint: dimension mismatch");
  }
  const int nx = ch.input_size(), ny = ch.output_size();
  const double inv = 1.0 / (1.0 - rho);
  std::vector<double> lam_log(static_cast<std::size_t>(ny), kNegInf);
  for (int y = 0; y < ny; ++y) {
    LogSumExp acc;
    for (int x = 0; x < nx; ++x) {
      if (q_x[x] == 0.0 || ch.w(x, y) == 0.0) continue;
      acc.add(std::log(q_x[x]) + inv * (ch.log_w(x, y) - mu * rho * ch.cost(x)));
    }
    if (!acc.empty()) lam_log[static_cast<std::size_t>(y)] = acc.value();
  }
  LogSumExp norm_acc;
  for (int y = 0; y < ny; ++y) {
    if (lam_log[static_cast<std::size_t>(y)] != kNegInf) {
      norm_acc.add((1.0 - rho) * lam_log[static_cast<std::size_t>(y)]);
    }
  }
  double lognorm = norm_acc.value();

  if (row_sums) row_sums->assign(static_cast<std::size_t>(nx), 0.0);
  std::vector<double> joint(static_cast<std::size_t>(nx) * ny, 0.0);
  double total = 0.0;
  for (int x = 0; x < nx; ++x) {
    double rs = 0.0;
    for (int y = 0; y < ny; ++y) {
      if (ch.w(x, y) == 0.0 ||
          lam_log[static_cast<std::size_t>(y)] == kNegInf) {
        continue;
      }
      double v_log = inv * (ch.log_w(x, y) - mu * rho * ch.cost(x)) -
                     rho * lam_log[static_cast<std::size_t>(y)] - lognorm;
      double v = std::exp(v_log);
      rs += v;
      if (q_x[x] > 0.0) {
        joint[static_cast<std::size_t>(x) * ny + y] = q_x[x] * v;
        total += q_x[x] * v;
      }
    }
    if (row_sums) (*row_sums)[static_cast<std::size_t>(x)] = rs;
  }
  // At a stationary q_x every supported row of V sums to 1 and total = 1; a
  // non-optimal q_x leaves that in row_sums and gets renormalized here.
  if (total <= 0.0) throw ChannelError("backward_joint: empty support");
  for (double& v : joint) v /= total;
  return JointDistribution(nx, ny, std::move(joint), "backward joint");
}

JointDistribution backward_optimizer(const Channel& ch, double mu, double rho,
                                     const SolverOptions& opts) {
  JMax jm = maximize_j(ch, mu, rho, opts);
  if (jm.kkt_gap > 1e-8) {
    throw ChannelError(
        "backward_optimizer: stationarity certificate not met (gap " +
        std::to_string(jm.kkt_gap) + "); backward rows would not normalize");
  }
  std::vector<double> row_sums;
  JointDistribution joint = backward_joint(jm.q, ch, mu, rho, &row_sums);
  for (int x = 0; x < ch.input_size(); ++x) {
    if (jm.q[x] >= 1e-7 &&
        std::abs(row_sums[static_cast<std::size_t>(x)] - 1.0) > 1e-6) {
      throw ChannelError("backward_optimizer: V row " + std::to_string(x) +
                         " sums to " +
                         std::to_string(row_sums[static_cast<std::size_t>(x)]));
    }
  }
  return joint;
}

}  // namespace convexp
