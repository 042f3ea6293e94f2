#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "convexp/util.hpp"

namespace convexp {

// Raised on any channel/distribution validation or parse failure.
class ChannelError : public std::runtime_error {
 public:
  explicit ChannelError(const std::string& msg) : std::runtime_error(msg) {}
};

// Point on a probability simplex. Entries >= 0, sum 1 within kSimplexTol;
// drift up to kRenormMax is renormalized, anything worse is an error.
class Distribution {
 public:
  Distribution() : w_{1.0} {}  // one-point simplex
  explicit Distribution(std::vector<double> weights,
                        const std::string& what = "distribution");
  static Distribution uniform(int n);
  static Distribution point_mass(int n, int i);

  int size() const { return static_cast<int>(w_.size()); }
  double operator[](int i) const { return w_[static_cast<std::size_t>(i)]; }
  std::span<const double> weights() const { return w_; }

 private:
  std::vector<double> w_;
};

// Joint distribution q(x,y) over X x Y, row-major.
class JointDistribution {
 public:
  JointDistribution() : nx_(1), ny_(1), w_{1.0} {}
  JointDistribution(int nx, int ny, std::vector<double> weights,
                    const std::string& what = "joint distribution");

  int input_size() const { return nx_; }
  int output_size() const { return ny_; }
  double operator()(int x, int y) const {
    return w_[static_cast<std::size_t>(x) * static_cast<std::size_t>(ny_) +
              static_cast<std::size_t>(y)];
  }
  std::span<const double> weights() const { return w_; }

  Distribution marginal_x() const;
  Distribution marginal_y() const;
  double expected_input_cost(std::span<const double> cost) const;

 private:
  int nx_, ny_;
  std::vector<double> w_;
};

// Tilting parameters shared by the exponent formulas. mu >= 0, lambda >= 0;
// operations working in the rho = lambda/(1+lambda) form reject lambda >= 1.
struct TiltParams {
  double mu = 0.0;
  double lambda = 0.0;
};

void require_tilt(const TiltParams& p);
void require_arimoto_tilt(double mu, double rho);

// Finite DMC with per-input cost. Rows of W sum to 1; costs finite, >= 0.
class Channel {
 public:
  Channel(std::vector<std::vector<double>> transition, std::vector<double> cost,
          std::vector<std::string> input_labels = {},
          std::vector<std::string> output_labels = {});

  int input_size() const { return nx_; }
  int output_size() const { return ny_; }
  double w(int x, int y) const {
    return w_[static_cast<std::size_t>(x) * static_cast<std::size_t>(ny_) +
              static_cast<std::size_t>(y)];
  }
  // log W(y|x), -inf where W(y|x) = 0.
  double log_w(int x, int y) const {
    return logw_[static_cast<std::size_t>(x) * static_cast<std::size_t>(ny_) +
                 static_cast<std::size_t>(y)];
  }
  std::span<const double> row(int x) const {
    return std::span<const double>(w_).subspan(
        static_cast<std::size_t>(x) * static_cast<std::size_t>(ny_),
        static_cast<std::size_t>(ny_));
  }
  double cost(int x) const { return cost_[static_cast<std::size_t>(x)]; }
  std::span<const double> costs() const { return cost_; }

  double gamma_min() const { return gamma_min_; }
  double gamma_max() const { return gamma_max_; }
  bool uniform_cost() const { return gamma_max_ - gamma_min_ <= 1e-15; }

  const std::vector<std::string>& input_labels() const { return in_labels_; }
  const std::vector<std::string>& output_labels() const { return out_labels_; }

 private:
  int nx_, ny_;
  std::vector<double> w_;
  std::vector<double> logw_;
  std::vector<double> cost_;
  double gamma_min_, gamma_max_;
  std::vector<std::string> in_labels_, out_labels_;
};

// Channel-spec JSON:
// {"input_alphabet": [...], "output_alphabet": [...], "W": [[...]],
//  "cost": [...]}
Channel load_channel(const std::string& json_text);
Channel load_channel_file(const std::filesystem::path& path);

// Information measures, all in nats, 0 log 0 = 0.
double entropy(const Distribution& p);
double binary_entropy(double p);
double kl_bernoulli(double p, double q);
double mutual_information(const Distribution& q_x, const Channel& ch);
// sum_{x,y} q(x,y) log(q_{Y|X}(y|x)/W(y|x)); +inf when q puts mass where W=0.
double conditional_divergence(const JointDistribution& q, const Channel& ch);
// I(q_X, q_{Y|X}) of a joint.
double joint_mutual_information(const JointDistribution& q);

}  // namespace convexp
