#pragma once

#include <vector>

#include "convexp/channel.hpp"
#include "convexp/code_oracle.hpp"
#include "convexp/exponent_oh.hpp"

namespace convexp {

// Causal input process over X^n: tables[t-1] holds p_{X_t | X^{t-1}} as a
// (|X|^{t-1} x |X|) row-major block, histories indexed base-|X| big-endian.
struct InputProcess {
  int horizon = 1;
  int input_size = 1;
  std::vector<std::vector<double>> tables;

  static InputProcess iid(const Distribution& p, int n);
  static InputProcess from_tables(int nx, std::vector<std::vector<double>> t);
  double step_prob(int t, std::uint64_t history, int x) const;
  double word_prob(const Word& w) const;
};

struct TiltState {
  std::vector<double> log_phi;   // per step
  std::vector<double> c;         // C_t = prod phi
  std::vector<double> tilted;    // final tilted joint over (X x Y)^n
  double omega_recursive = 0.0;  // sum log_phi
};

struct SpectrumBudget {
  std::uint64_t max_states = 1 << 21;  // (|X||Y|)^n cap
};

// Step-normalized tilted recursion; omega_recursive equals the n-letter
// tilted log-moment.
TiltState tilt_recursion(const InputProcess& process,
                         const std::vector<Distribution>& q_steps,
                         const Channel& ch, const TiltParams& params,
                         const SpectrumBudget& budget = {});

// The same log-moment evaluated as one expectation over (X^n, Y^n).
double omega_direct(const InputProcess& process,
                    const std::vector<Distribution>& q_steps, const Channel& ch,
                    const TiltParams& params, const SpectrumBudget& budget = {});

struct GreedyPotential {
  std::vector<double> log_phi;
  double cap = 0.0;  // Omega^{(mu,lambda)}(W)
};

// Chooses each Q_t as the inner minimizer for the current tilted input law
// and checks log Phi_t <= Omega(W) step by step.
GreedyPotential greedy_potential_bound(const InputProcess& process,
                                       const Channel& ch,
                                       const TiltParams& params,
                                       const SpectrumBudget& budget = {},
                                       const SolverOptions& solver = {});

struct OneShotBound {
  double pc_exact = 0.0;
  double bound = 0.0;
  double rate = 0.0;   // (1/n) log M used in the spectrum event
  double gamma = 0.0;  // max word average cost
};

// Exact P_c of (codebook, decoder) against the information-spectrum bound
// with an arbitrary output law on Y^n (indexed base-|Y|).
OneShotBound one_shot_bound(const Codebook& cb, const std::vector<int>& regions,
                            const Channel& ch, std::span<const double> q_full,
                            double eta, const OracleBudget& budget = {});

struct CramerBound {
  double prob = 0.0;
  double bound = 0.0;
};

// Pr{Z >= a} against exp(-(theta a - log E e^{theta Z})) for a finite pmf.
CramerBound cramer_bound(std::span<const double> values,
                         std::span<const double> probs, double a, double theta);

// [lambda(R - mu gamma) - Omega(W)]/(1+lambda) - log(2)/n.
double exponent_lower_bound(double rate, double gamma, const Channel& ch,
                            const TiltParams& params, int n,
                            const SolverOptions& solver = {});

}  // namespace convexp
