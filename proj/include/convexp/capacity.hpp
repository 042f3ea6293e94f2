#pragma once

#include <vector>

#include "convexp/channel.hpp"

namespace convexp {

struct CapacityResult {
  double value = 0.0;  // nats
  Distribution optimal_input;
  double lagrange_mu = 0.0;
  double duality_gap = 0.0;
  int iterations = 0;
};

struct CapacityOptions {
  int max_iterations = 10000;  // per Blahut-Arimoto run
  double gap_tol = 1e-10;
  int bisection_steps = 200;
};

// max_{p: E_p c <= gamma} I(p, W) via cost-tilted Blahut-Arimoto with an outer
// bisection on the cost multiplier. duality_gap is the certified distance to
// the dual bound max_x [D(W(.|x)||q_Y*) - mu (c(x) - gamma)].
CapacityResult capacity(const Channel& ch, double gamma,
                        const CapacityOptions& opts = {});

std::vector<CapacityResult> capacity_curve(const Channel& ch,
                                           std::span<const double> gammas,
                                           const CapacityOptions& opts = {},
                                           int threads = 1);

}  // namespace convexp
