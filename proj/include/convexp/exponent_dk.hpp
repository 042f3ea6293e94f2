#pragma once

#include <string>
#include <vector>

#include "convexp/channel.hpp"
#include "convexp/exponent_oh.hpp"

namespace convexp {

struct DkObjectiveEval {
  JointDistribution joint;
  double theta = 0.0;       // [R - I]^+ + D
  double cost_slack = 0.0;  // gamma - E_q[c]
  double value = 0.0;       // parametric objective
};

struct DkInner {
  JointDistribution joint;
  double value = 0.0;
  double stationarity_gap = 0.0;
  int iterations = 0;
};

struct DkReport {
  double value = 0.0;
  JointDistribution best_joint;
  double best_mu = 0.0;
  double best_lambda = 0.0;
  double stationarity_gap = 0.0;
  double direct_gap = 0.0;       // theta-form value at the optimizer vs value
  double cost_slack = 0.0;       // gamma - E[c] at the optimizer
  std::string path;              // solver that produced the value
};

struct DkOptions {
  double kkt_tol = 1e-10;
  int max_iterations = 50000;
  int mu_points = 17;
  int lambda_points = 21;
  double mu_max_scale = 50.0;
  double param_tol = 1e-8;
  int threads = 1;
};

// lambda [R - I] - mu gamma + mu E_q[c] + D; +inf off the W-support.
double dk_objective(const JointDistribution& q, double rate, double gamma,
                    const Channel& ch, double mu, double lambda);

DkObjectiveEval dk_objective_eval(const JointDistribution& q, double rate,
                                  double gamma, const Channel& ch, double mu,
                                  double lambda);

// Entropic mirror descent over the joint simplex restricted to the W-support.
// lambda in [0,1]; the endpoints have exact closed forms and skip the solver.
DkInner minimize_dk(double rate, double gamma, const Channel& ch, double mu,
                    double lambda, const DkOptions& opts = {},
                    const std::vector<double>* warm = nullptr);

// max over (mu, lambda) of minimize_dk plus the theta-form cross-check.
DkReport g_dk(double rate, double gamma, const Channel& ch,
              const DkOptions& opts = {});

// Both sides of the divergence decomposition identity at a strictly positive
// joint; returns {lhs, rhs}.
std::pair<double, double> decomposition_check(const JointDistribution& q,
                                              const Channel& ch, double mu,
                                              double rho);

// Joint q_X o V built from the tilted backward construction at q_X; row sums
// of V equal 1 exactly when q_X satisfies the j_fun stationarity conditions.
JointDistribution backward_joint(const Distribution& q_x, const Channel& ch,
                                 double mu, double rho,
                                 std::vector<double>* row_sums = nullptr);

// backward_joint at the certified maximize_j optimizer.
JointDistribution backward_optimizer(const Channel& ch, double mu, double rho,
                                     const SolverOptions& opts = {});

}  // namespace convexp
