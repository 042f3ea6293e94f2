#pragma once

#include <vector>

#include "convexp/channel.hpp"

namespace convexp {

// One evaluation of the tilted log-moment Omega^{(mu,lambda)} at its saddle.
struct OmegaEval {
  double value = 0.0;
  Distribution q_input;
  Distribution q_output;
  TiltParams params;
  double kkt_gap = 0.0;
  int iterations = 0;
};

struct GridPoint {
  double mu = 0.0;
  double rho = 0.0;     // lambda/(1+lambda)
  double lambda = 0.0;
  double value = 0.0;
};

struct ExponentReport {
  double value = 0.0;
  TiltParams best_params;
  double best_rho = 0.0;
  Distribution best_input;
  double kkt_gap = 0.0;
  bool boundary_hit = false;
  std::vector<GridPoint> grid_trace;
};

struct JMax {
  Distribution q;
  double value = 0.0;
  double kkt_gap = 0.0;
  int iterations = 0;
};

struct SolverOptions {
  double kkt_tol = 1e-12;   // relative stationarity gap
  int max_iterations = 200000;
};

struct SweepOptions {
  int mu_points = 33;       // log-spaced over [0, mu_max]
  int rho_points = 65;      // uniform over [0, rho_grid_max]
  double rho_grid_max = 0.995;
  double rho_cap = 1.0 - 1e-10;
  double param_tol = 1e-10;
  double mu_max_scale = 50.0;  // mu_max = 50 / Gamma_max
  int threads = 1;
  SolverOptions solver;
};

// log sum_{x,y} q(x) W^{1+lambda}(y|x) e^{-mu lambda c(x)} Q^{-lambda}(y).
// Terms with W(y|x)=0 contribute nothing; Q(y)=0 against a positive numerator
// gives +inf.
double omega_pair(const Distribution& q_x, const Distribution& q_out,
                  const Channel& ch, const TiltParams& params);

// Closed-form inner minimizer of omega_pair over Q (lambda > 0).
Distribution q_star(const Distribution& q_x, const Channel& ch,
                    const TiltParams& params);

// log sum_y [ sum_x q(x) {W(y|x) e^{-mu rho c(x)}}^{1/(1-rho)} ]^{1-rho}.
double j_fun(const Distribution& q_x, const Channel& ch, double mu, double rho);

// argmax_q j_fun with the stationarity certificate of the support conditions.
// warm, when given, seeds the fixed point.
JMax maximize_j(const Channel& ch, double mu, double rho,
                const SolverOptions& opts = {},
                const std::vector<double>* warm = nullptr);

// max_q min_Q omega_pair, solved in the omega form (independent of j_fun).
OmegaEval omega_channel(const Channel& ch, const TiltParams& params,
                        const SolverOptions& opts = {},
                        const std::vector<double>* warm = nullptr);

// rho (R - mu gamma) - max_q j_fun.
double g_ar_point(double rate, double gamma, const Channel& ch, double mu,
                  double rho, const SolverOptions& opts = {});

// [lambda (R - mu gamma) - Omega^{(mu,lambda)}(W)] / (1 + lambda).
double g_oh_point(double rate, double gamma, const Channel& ch,
                  const TiltParams& params, const SolverOptions& opts = {});

// sup over (mu, lambda) via the rho parametrization; omega route.
ExponentReport g_oh_sup(double rate, double gamma, const Channel& ch,
                        const SweepOptions& opts = {});

// Same sweep through the j_fun route.
ExponentReport g_ar_sup(double rate, double gamma, const Channel& ch,
                        const SweepOptions& opts = {});

}  // namespace convexp
