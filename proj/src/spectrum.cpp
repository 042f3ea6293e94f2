#include "convexp/spectrum.hpp"

#include <cmath>

namespace convexp {
namespace {

std::uint64_t ipow(std::uint64_t b, int e) {
  std::uint64_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

void check_state_budget(const InputProcess& p, const Channel& ch,
                        const SpectrumBudget& budget) {
  long double states = std::pow(
      static_cast<long double>(p.input_size) * ch.output_size(), p.horizon);
  if (states > static_cast<long double>(budget.max_states)) {
    throw ChannelError("spectrum: (|X||Y|)^n exceeds the enumeration budget");
  }
}

void check_inputs(const InputProcess& p, const std::vector<Distribution>& qs,
                  const Channel& ch) {
  if (p.input_size != ch.input_size()) {
    throw ChannelError("spectrum: process/channel input size mismatch");
  }
  if (static_cast<int>(qs.size()) != p.horizon) {
    throw ChannelError("spectrum: need one output law per step");
  }
  for (const Distribution& q : qs) {
    if (q.size() != ch.output_size()) {
      throw ChannelError("spectrum: output law dimension mismatch");
    }
  }
}

}  // namespace

InputProcess InputProcess::iid(const Distribution& p, int n) {
  InputProcess proc;
  proc.horizon = n;
  proc.input_size = p.size();
  for (int t = 1; t <= n; ++t) {
    std::uint64_t hist = ipow(static_cast<std::uint64_t>(p.size()), t - 1);
    std::vector<double> table;
    table.reserve(hist * static_cast<std::uint64_t>(p.size()));
    for (std::uint64_t h = 0; h < hist; ++h) {
      for (int x = 0; x < p.size(); ++x) table.push_back(p[x]);
    }
    proc.tables.push_back(std::move(table));
  }
  return proc;
}

InputProcess InputProcess::from_tables(int nx,
                                       std::vector<std::vector<double>> t) {
  InputProcess proc;
  proc.input_size = nx;
  proc.horizon = static_cast<int>(t.size());
  if (proc.horizon <= 0) throw ChannelError("input process: empty horizon");
  for (int step = 1; step <= proc.horizon; ++step) {
    std::uint64_t hist = ipow(static_cast<std::uint64_t>(nx), step - 1);
    const std::vector<double>& table = t[static_cast<std::size_t>(step - 1)];
    if (table.size() != hist * static_cast<std::uint64_t>(nx)) {
      throw ChannelError("input process: table " + std::to_string(step) +
                         " has wrong size");
    }
    for (std::uint64_t h = 0; h < hist; ++h) {
      // validates each conditional row
      Distribution row(std::vector<double>(table.begin() + static_cast<long>(h * nx),
                                           table.begin() + static_cast<long>((h + 1) * nx)),
                       "input process row");
    }
  }
  proc.tables = std::move(t);
  return proc;
}

double InputProcess::step_prob(int t, std::uint64_t history, int x) const {
  return tables[static_cast<std::size_t>(t - 1)]
               [history * static_cast<std::uint64_t>(input_size) +
                static_cast<std::uint64_t>(x)];
}

double InputProcess::word_prob(const Word& w) const {
  double p = 1.0;
  std::uint64_t h = 0;
  for (int t = 1; t <= horizon; ++t) {
    int x = w[static_cast<std::size_t>(t - 1)];
    p *= step_prob(t, h, x);
    h = h * static_cast<std::uint64_t>(input_size) + static_cast<std::uint64_t>(x);
  }
  return p;
}

TiltState tilt_recursion(const InputProcess& process,
                         const std::vector<Distribution>& q_steps,
                         const Channel& ch, const TiltParams& params,
                         const SpectrumBudget& budget) {
  require_tilt(params);
  check_inputs(process, q_steps, ch);
  check_state_budget(process, ch, budget);
  const int nx = process.input_size, ny = ch.output_size();
  const int n = process.horizon;
  const double lam = params.lambda, mu = params.mu;
  const std::uint64_t pair = static_cast<std::uint64_t>(nx) * ny;

  TiltState st;
  st.c.reserve(static_cast<std::size_t>(n));
  std::vector<double> tilted{1.0};  // over (X x Y)^{t-1}
  double c_prev = 1.0;
  for (int t = 1; t <= n; ++t) {
    const Distribution& qt = q_steps[static_cast<std::size_t>(t - 1)];
    // marginal of the next input under the tilted history law
    std::vector<double> m(static_cast<std::size_t>(nx), 0.0);
    std::uint64_t states = ipow(pair, t - 1);
    for (std::uint64_t s = 0; s < states; ++s) {
      if (tilted[s] == 0.0) continue;
      // extract the x-history from the pair digits
      std::uint64_t hx = 0, rest = s;
      std::uint64_t shift = states;
      for (int i = 1; i < t; ++i) {
        shift /= pair;
        std::uint64_t digit = rest / shift;
        rest %= shift;
        hx = hx * static_cast<std::uint64_t>(nx) + digit / static_cast<std::uint64_t>(ny);
      }
      for (int x = 0; x < nx; ++x) {
        m[static_cast<std::size_t>(x)] += tilted[s] * process.step_prob(t, hx, x);
      }
    }
    // Phi_t = sum_{x,y} m(x) W(y|x) W^lam(y|x) e^{-mu lam c(x)} Q_t^-lam(y)
    LogSumExp acc;
    bool infinite = false;
    for (int x = 0; x < nx && !infinite; ++x) {
      if (m[static_cast<std::size_t>(x)] == 0.0) continue;
      for (int y = 0; y < ny; ++y) {
        if (ch.w(x, y) == 0.0) continue;
        if (qt[y] == 0.0 && lam > 0.0) {
          infinite = true;
          break;
        }
        acc.add(std::log(m[static_cast<std::size_t>(x)]) +
                (1.0 + lam) * ch.log_w(x, y) - mu * lam * ch.cost(x) -
                (lam > 0.0 ? lam * std::log(qt[y]) : 0.0));
      }
    }
    if (infinite) {
      st.log_phi.push_back(kPosInf);
      st.omega_recursive = kPosInf;
      st.c.push_back(kPosInf);
      st.tilted = tilted;
      return st;
    }
    double log_phi = acc.value();
    st.log_phi.push_back(log_phi);
    c_prev *= std::exp(log_phi);
    st.c.push_back(c_prev);

    // state update, renormalized by Phi_t
    std::vector<double> next(states * pair, 0.0);
    double check = 0.0;
    for (std::uint64_t s = 0; s < states; ++s) {
      if (tilted[s] == 0.0) continue;
      std::uint64_t hx = 0, rest = s;
      std::uint64_t shift = states;
      for (int i = 1; i < t; ++i) {
        shift /= pair;
        std::uint64_t digit = rest / shift;
        rest %= shift;
        hx = hx * static_cast<std::uint64_t>(nx) + digit / static_cast<std::uint64_t>(ny);
      }
      for (int x = 0; x < nx; ++x) {
        double px = process.step_prob(t, hx, x);
        if (px == 0.0) continue;
        for (int y = 0; y < ny; ++y) {
          if (ch.w(x, y) == 0.0) continue;
          double logf = lam * ch.log_w(x, y) - mu * lam * ch.cost(x) -
                        (lam > 0.0 ? lam * std::log(qt[y]) : 0.0);
          double v = tilted[s] * px *
                     std::exp(ch.log_w(x, y) + logf - log_phi);
          std::uint64_t idx =
              s * pair + static_cast<std::uint64_t>(x) * ny + y;
          next[idx] = v;
          check += v;
        }
      }
    }
    if (std::abs(check - 1.0) > 1e-9) {
      throw ChannelError("spectrum: tilted law lost normalization at step " +
                         std::to_string(t));
    }
    tilted = std::move(next);
  }
  st.tilted = std::move(tilted);
  double total = 0.0;
  for (double lp : st.log_phi) total += lp;
  st.omega_recursive = total;
  return st;
}

double omega_direct(const InputProcess& process,
                    const std::vector<Distribution>& q_steps, const Channel& ch,
                    const TiltParams& params, const SpectrumBudget& budget) {
  require_tilt(params);
  check_inputs(process, q_steps, ch);
  check_state_budget(process, ch, budget);
  const int nx = process.input_size, ny = ch.output_size();
  const int n = process.horizon;
  const double lam = params.lambda, mu = params.mu;
  const std::uint64_t total = ipow(static_cast<std::uint64_t>(nx) * ny, n);

  LogSumExp acc;
  Word xs(static_cast<std::size_t>(n));
  std::vector<int> yw(static_cast<std::size_t>(n));
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    std::uint64_t rest = idx;
    for (int t = n - 1; t >= 0; --t) {
      std::uint64_t digit = rest % (static_cast<std::uint64_t>(nx) * ny);
      rest /= static_cast<std::uint64_t>(nx) * ny;
      xs[static_cast<std::size_t>(t)] = static_cast<int>(digit / static_cast<std::uint64_t>(ny));
      yw[static_cast<std::size_t>(t)] = static_cast<int>(digit % static_cast<std::uint64_t>(ny));
    }
    double px = process.word_prob(xs);
    if (px == 0.0) continue;
    double logterm = std::log(px);
    bool dead = false, infinite = false;
    for (int t = 0; t < n; ++t) {
      int x = xs[static_cast<std::size_t>(t)], y = yw[static_cast<std::size_t>(t)];
      if (ch.w(x, y) == 0.0) {
        dead = true;
        break;
      }
      double qy = q_steps[static_cast<std::size_t>(t)][y];
      if (qy == 0.0 && lam > 0.0) {
        infinite = true;
        break;
      }
      logterm += (1.0 + lam) * ch.log_w(x, y) - mu * lam * ch.cost(x) -
                 (lam > 0.0 ? lam * std::log(qy) : 0.0);
    }
    if (infinite) return kPosInf;
    if (dead) continue;
    acc.add(logterm);
  }
  return acc.value();
}

GreedyPotential greedy_potential_bound(const InputProcess& process,
                                       const Channel& ch,
                                       const TiltParams& params,
                                       const SpectrumBudget& budget,
                                       const SolverOptions& solver) {
  require_tilt(params);
  check_state_budget(process, ch, budget);
  GreedyPotential out;
  if (params.lambda == 0.0) {
    out.log_phi.assign(static_cast<std::size_t>(process.horizon), 0.0);
    out.cap = 0.0;
    return out;
  }
  out.cap = omega_channel(ch, params, solver).value;

  // Re-run the recursion step by step, substituting the per-step minimizer.
  const int nx = process.input_size, ny = ch.output_size();
  const int n = process.horizon;
  const double lam = params.lambda, mu = params.mu;
  const std::uint64_t pair = static_cast<std::uint64_t>(nx) * ny;
  std::vector<double> tilted{1.0};
  for (int t = 1; t <= n; ++t) {
    std::uint64_t states = ipow(pair, t - 1);
    std::vector<double> m(static_cast<std::size_t>(nx), 0.0);
    for (std::uint64_t s = 0; s < states; ++s) {
      if (tilted[s] == 0.0) continue;
      std::uint64_t hx = 0, rest = s;
      std::uint64_t shift = states;
      for (int i = 1; i < t; ++i) {
        shift /= pair;
        std::uint64_t digit = rest / shift;
        rest %= shift;
        hx = hx * static_cast<std::uint64_t>(nx) + digit / static_cast<std::uint64_t>(ny);
      }
      for (int x = 0; x < nx; ++x) {
        m[static_cast<std::size_t>(x)] += tilted[s] * process.step_prob(t, hx, x);
      }
    }
    Distribution m_dist(m, "greedy tilted input");
    Distribution qt = q_star(m_dist, ch, params);
    double log_phi = omega_pair(m_dist, qt, ch, params);
    out.log_phi.push_back(log_phi);

    std::vector<double> next(states * pair, 0.0);
    for (std::uint64_t s = 0; s < states; ++s) {
      if (tilted[s] == 0.0) continue;
      std::uint64_t hx = 0, rest = s;
      std::uint64_t shift = states;
      for (int i = 1; i < t; ++i) {
        shift /= pair;
        std::uint64_t digit = rest / shift;
        rest %= shift;
        hx = hx * static_cast<std::uint64_t>(nx) + digit / static_cast<std::uint64_t>(ny);
      }
      for (int x = 0; x < nx; ++x) {
        double px = process.step_prob(t, hx, x);
        if (px == 0.0) continue;
        for (int y = 0; y < ny; ++y) {
          if (ch.w(x, y) == 0.0 || qt[y] == 0.0) continue;
          double logf = lam * ch.log_w(x, y) - mu * lam * ch.cost(x) -
                        lam * std::log(qt[y]);
          next[s * pair + static_cast<std::uint64_t>(x) * ny + y] =
              tilted[s] * px * std::exp(ch.log_w(x, y) + logf - log_phi);
        }
      }
    }
    tilted = std::move(next);
  }
  return out;
}

OneShotBound one_shot_bound(const Codebook& cb, const std::vector<int>& regions,
                            const Channel& ch, std::span<const double> q_full,
                            double eta, const OracleBudget& budget) {
  if (!(eta > 0.0)) throw ChannelError("one_shot_bound: eta must be positive");
  const int n = cb.n;
  const std::uint64_t ytotal = ipow(static_cast<std::uint64_t>(ch.output_size()), n);
  if (static_cast<long double>(ytotal) * cb.size() >
      static_cast<long double>(budget.max_outputs)) {
    throw OracleError("one_shot_bound: enumeration budget exceeded");
  }
  if (q_full.size() != ytotal) {
    throw ChannelError("one_shot_bound: output law must cover Y^n");
  }
  double qsum = 0.0;
  for (double v : q_full) {
    if (v < 0.0) throw ChannelError("one_shot_bound: negative output mass");
    qsum += v;
  }
  if (std::abs(qsum - 1.0) > kRenormMax) {
    throw ChannelError("one_shot_bound: output law does not sum to 1");
  }

  OneShotBound res;
  res.pc_exact = correct_probability_with_decoder(cb, regions, ch);
  const double m = static_cast<double>(cb.size());
  res.rate = std::log(m) / n;
  double gamma = 0.0;
  for (const Word& w : cb.words) {
    double c = 0.0;
    for (int x : w) c += ch.cost(x);
    gamma = std::max(gamma, c / n);
  }
  res.gamma = gamma;

  double spectrum = 0.0;
  for (int k = 0; k < cb.size(); ++k) {
    const Word& w = cb.words[static_cast<std::size_t>(k)];
    double wc = 0.0;
    for (int x : w) wc += ch.cost(x);
    bool cost_ok = gamma >= wc / n - 1e-12;
    for (std::uint64_t y = 0; y < ytotal; ++y) {
      double lik = 1.0;
      std::uint64_t rest = y;
      for (int t = n - 1; t >= 0; --t) {
        int yd = static_cast<int>(rest % static_cast<std::uint64_t>(ch.output_size()));
        rest /= static_cast<std::uint64_t>(ch.output_size());
        lik *= ch.w(w[static_cast<std::size_t>(t)], yd);
      }
      if (lik == 0.0) continue;
      double ratio = q_full[y] > 0.0 ? std::log(lik / q_full[y]) / n : kPosInf;
      if (cost_ok && res.rate <= ratio + eta) {
        spectrum += lik / m;
      }
    }
  }
  res.bound = spectrum + std::exp(-static_cast<double>(n) * eta);
  if (res.pc_exact > res.bound + 1e-12) {
    throw ChannelError("one_shot_bound: spectrum bound violated");
  }
  return res;
}

CramerBound cramer_bound(std::span<const double> values,
                         std::span<const double> probs, double a,
                         double theta) {
  if (values.size() != probs.size() || values.empty()) {
    throw ChannelError("cramer_bound: bad pmf");
  }
  if (!(theta > 0.0)) throw ChannelError("cramer_bound: theta must be positive");
  CramerBound res;
  LogSumExp mgf;
  double psum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (probs[i] < 0.0) throw ChannelError("cramer_bound: negative mass");
    psum += probs[i];
    if (values[i] >= a) res.prob += probs[i];
    if (probs[i] > 0.0) mgf.add(std::log(probs[i]) + theta * values[i]);
  }
  if (std::abs(psum - 1.0) > kRenormMax) {
    throw ChannelError("cramer_bound: pmf does not sum to 1");
  }
  res.bound = std::exp(-(theta * a - mgf.value()));
  if (res.prob > res.bound + 1e-12) {
    throw ChannelError("cramer_bound: Chernoff bound violated");
  }
  return res;
}

double exponent_lower_bound(double rate, double gamma, const Channel& ch,
                            const TiltParams& params, int n,
                            const SolverOptions& solver) {
  require_tilt(params);
  if (!(params.lambda > 0.0)) {
    throw ChannelError("exponent_lower_bound: lambda must be positive");
  }
  if (n <= 0) throw ChannelError("exponent_lower_bound: n must be positive");
  double omega = omega_channel(ch, params, solver).value;
  double rho = params.lambda / (1.0 + params.lambda);
  return rho * (rate - params.mu * gamma) - omega / (1.0 + params.lambda) -
         std::log(2.0) / n;
}

}  // namespace convexp
