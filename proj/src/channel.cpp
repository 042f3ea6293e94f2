#include "convexp/channel.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace convexp {
namespace {

// Accept within kSimplexTol, renormalize within kRenormMax, reject beyond.
void check_and_renormalize(std::vector<double>& w, const std::string& what) {
  double sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!std::isfinite(w[i])) {
      throw ChannelError(what + ": non-finite entry at index " +
                         std::to_string(i));
    }
    if (w[i] < 0.0) {
      throw ChannelError(what + ": negative entry " + std::to_string(w[i]) +
                         " at index " + std::to_string(i));
    }
    sum += w[i];
  }
  double dev = std::abs(sum - 1.0);
  if (dev <= kSimplexTol) return;
  if (dev <= kRenormMax) {
    for (double& v : w) v /= sum;
    return;
  }
  std::ostringstream os;
  os << what << ": entries sum to " << sum << " (deviation " << dev << ")";
  throw ChannelError(os.str());
}

}  // namespace

Distribution::Distribution(std::vector<double> weights, const std::string& what)
    : w_(std::move(weights)) {
  if (w_.empty()) throw ChannelError(what + ": empty");
  if (static_cast<int>(w_.size()) > kMaxAlphabet) {
    throw ChannelError(what + ": alphabet larger than " +
                       std::to_string(kMaxAlphabet));
  }
  check_and_renormalize(w_, what);
}

Distribution Distribution::uniform(int n) {
  return Distribution(std::vector<double>(static_cast<std::size_t>(n),
                                          1.0 / static_cast<double>(n)));
}

Distribution Distribution::point_mass(int n, int i) {
  std::vector<double> w(static_cast<std::size_t>(n), 0.0);
  w[static_cast<std::size_t>(i)] = 1.0;
  return Distribution(std::move(w));
}

JointDistribution::JointDistribution(int nx, int ny, std::vector<double> weights,
                                     const std::string& what)
    : nx_(nx), ny_(ny), w_(std::move(weights)) {
  if (nx_ <= 0 || ny_ <= 0 || nx_ > kMaxAlphabet || ny_ > kMaxAlphabet) {
    throw ChannelError(what + ": bad dimensions");
  }
  if (w_.size() != static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_)) {
    throw ChannelError(what + ": size mismatch");
  }
  check_and_renormalize(w_, what);
}

Distribution JointDistribution::marginal_x() const {
  std::vector<double> m(static_cast<std::size_t>(nx_), 0.0);
  for (int x = 0; x < nx_; ++x)
    for (int y = 0; y < ny_; ++y) m[static_cast<std::size_t>(x)] += (*this)(x, y);
  return Distribution(std::move(m), "joint marginal over X");
}

Distribution JointDistribution::marginal_y() const {
  std::vector<double> m(static_cast<std::size_t>(ny_), 0.0);
  for (int x = 0; x < nx_; ++x)
    for (int y = 0; y < ny_; ++y) m[static_cast<std::size_t>(y)] += (*this)(x, y);
  return Distribution(std::move(m), "joint marginal over Y");
}

double JointDistribution::expected_input_cost(std::span<const double> cost) const {
  if (cost.size() != static_cast<std::size_t>(nx_)) {
    throw ChannelError("expected_input_cost: dimension mismatch");
  }
  double e = 0.0;
  for (int x = 0; x < nx_; ++x)
    for (int y = 0; y < ny_; ++y) e += (*this)(x, y) * cost[static_cast<std::size_t>(x)];
  return e;
}

void require_tilt(const TiltParams& p) {
  if (!(p.mu >= 0.0) || !std::isfinite(p.mu)) {
    throw ChannelError("tilt: mu must be finite and >= 0");
  }
  if (!(p.lambda >= 0.0) || !std::isfinite(p.lambda)) {
    throw ChannelError("tilt: lambda must be finite and >= 0");
  }
}

void require_arimoto_tilt(double mu, double rho) {
  if (!(mu >= 0.0) || !std::isfinite(mu)) {
    throw ChannelError("tilt: mu must be finite and >= 0");
  }
  if (!(rho >= 0.0) || rho >= 1.0) {
    throw ChannelError("tilt: rho must lie in [0,1)");
  }
}

Channel::Channel(std::vector<std::vector<double>> transition,
                 std::vector<double> cost, std::vector<std::string> input_labels,
                 std::vector<std::string> output_labels)
    : in_labels_(std::move(input_labels)), out_labels_(std::move(output_labels)) {
  nx_ = static_cast<int>(transition.size());
  if (nx_ <= 0 || nx_ > kMaxAlphabet) {
    throw ChannelError("channel: input alphabet size " + std::to_string(nx_) +
                       " out of range [1," + std::to_string(kMaxAlphabet) + "]");
  }
  ny_ = static_cast<int>(transition[0].size());
  if (ny_ <= 0 || ny_ > kMaxAlphabet) {
    throw ChannelError("channel: output alphabet size " + std::to_string(ny_) +
                       " out of range [1," + std::to_string(kMaxAlphabet) + "]");
  }
  w_.reserve(static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_));
  for (int x = 0; x < nx_; ++x) {
    auto& row = transition[static_cast<std::size_t>(x)];
    if (static_cast<int>(row.size()) != ny_) {
      throw ChannelError("channel: row " + std::to_string(x) + " has length " +
                         std::to_string(row.size()) + ", expected " +
                         std::to_string(ny_));
    }
    double sum = 0.0;
    for (int y = 0; y < ny_; ++y) {
      double v = row[static_cast<std::size_t>(y)];
      if (!std::isfinite(v) || v < 0.0) {
        throw ChannelError("channel: W(" + std::to_string(y) + "|" +
                           std::to_string(x) + ") = " + std::to_string(v) +
                           " is not a probability");
      }
      sum += v;
    }
    double dev = std::abs(sum - 1.0);
    if (dev > kRenormMax) {
      std::ostringstream os;
      os << "channel: row " << x << " sums to " << sum << " (deviation " << dev
         << ")";
      throw ChannelError(os.str());
    }
    if (dev > kSimplexTol) {
      for (double& v : row) v /= sum;
    }
    for (int y = 0; y < ny_; ++y) w_.push_back(row[static_cast<std::size_t>(y)]);
  }
  if (static_cast<int>(cost.size()) != nx_) {
    throw ChannelError("channel: cost vector length " +
                       std::to_string(cost.size()) + ", expected " +
                       std::to_string(nx_));
  }
  for (int x = 0; x < nx_; ++x) {
    double c = cost[static_cast<std::size_t>(x)];
    if (!std::isfinite(c) || c < 0.0) {
      throw ChannelError("channel: cost(" + std::to_string(x) + ") = " +
                         std::to_string(c) + " must be finite and >= 0");
    }
  }
  cost_ = std::move(cost);
  logw_.resize(w_.size());
  for (std::size_t i = 0; i < w_.size(); ++i) {
    logw_[i] = w_[i] > 0.0 ? std::log(w_[i]) : kNegInf;
  }
  gamma_min_ = *std::min_element(cost_.begin(), cost_.end());
  gamma_max_ = *std::max_element(cost_.begin(), cost_.end());
}

Channel load_channel(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ChannelError(std::string("channel spec: JSON parse error: ") +
                       e.what());
  }
  for (const char* key : {"input_alphabet", "output_alphabet", "W", "cost"}) {
    if (!doc.contains(key)) {
      throw ChannelError(std::string("channel spec: missing key \"") + key +
                         "\"");
    }
  }
  std::vector<std::string> in_labels, out_labels;
  try {
    in_labels = doc["input_alphabet"].get<std::vector<std::string>>();
    out_labels = doc["output_alphabet"].get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception&) {
    throw ChannelError("channel spec: alphabets must be arrays of strings");
  }
  std::vector<std::vector<double>> rows;
  std::vector<double> cost;
  try {
    rows = doc["W"].get<std::vector<std::vector<double>>>();
    cost = doc["cost"].get<std::vector<double>>();
  } catch (const nlohmann::json::exception&) {
    throw ChannelError(
        "channel spec: \"W\" must be a matrix and \"cost\" a vector of reals");
  }
  if (rows.size() != in_labels.size()) {
    throw ChannelError("channel spec: W has " + std::to_string(rows.size()) +
                       " rows but input_alphabet has " +
                       std::to_string(in_labels.size()) + " symbols");
  }
  for (std::size_t x = 0; x < rows.size(); ++x) {
    if (rows[x].size() != out_labels.size()) {
      throw ChannelError("channel spec: W row " + std::to_string(x) +
                         " has length " + std::to_string(rows[x].size()) +
                         " but output_alphabet has " +
                         std::to_string(out_labels.size()) + " symbols");
    }
  }
  if (cost.size() != in_labels.size()) {
    throw ChannelError("channel spec: cost has length " +
                       std::to_string(cost.size()) + " but input_alphabet has " +
                       std::to_string(in_labels.size()) + " symbols");
  }
  return Channel(std::move(rows), std::move(cost), std::move(in_labels),
                 std::move(out_labels));
}

Channel load_channel_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ChannelError("channel spec: cannot open file " + path.string());
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return load_channel(ss.str());
}

double entropy(const Distribution& p) {
  double h = 0.0;
  for (double v : p.weights()) h -= xlogx(v);
  return h;
}

double binary_entropy(double p) {
  if (p < 0.0 || p > 1.0) throw ChannelError("binary_entropy: p outside [0,1]");
  return -xlogx(p) - xlogx(1.0 - p);
}

double kl_bernoulli(double p, double q) {
  auto term = [](double a, double b) {
    if (a == 0.0) return 0.0;
    if (b == 0.0) return kPosInf;
    return a * std::log(a / b);
  };
  return term(p, q) + term(1.0 - p, 1.0 - q);
}

double mutual_information(const Distribution& q_x, const Channel& ch) {
  if (q_x.size() != ch.input_size()) {
    throw ChannelError("mutual_information: dimension mismatch");
  }
  const int nx = ch.input_size(), ny = ch.output_size();
  std::vector<double> qy(static_cast<std::size_t>(ny), 0.0);
  for (int x = 0; x < nx; ++x) {
    if (q_x[x] == 0.0) continue;
    for (int y = 0; y < ny; ++y) qy[static_cast<std::size_t>(y)] += q_x[x] * ch.w(x, y);
  }
  double mi = 0.0;
  for (int x = 0; x < nx; ++x) {
    if (q_x[x] == 0.0) continue;
    for (int y = 0; y < ny; ++y) {
      double w = ch.w(x, y);
      if (w == 0.0) continue;
      mi += q_x[x] * w * (ch.log_w(x, y) - std::log(qy[static_cast<std::size_t>(y)]));
    }
  }
  return std::max(mi, 0.0);
}

double conditional_divergence(const JointDistribution& q, const Channel& ch) {
  if (q.input_size() != ch.input_size() || q.output_size() != ch.output_size()) {
    throw ChannelError("conditional_divergence: dimension mismatch");
  }
  Distribution qx = q.marginal_x();
  double d = 0.0;
  for (int x = 0; x < q.input_size(); ++x) {
    if (qx[x] == 0.0) continue;  // conditional undefined, excluded
    for (int y = 0; y < q.output_size(); ++y) {
      double v = q(x, y);
      if (v == 0.0) continue;
      if (ch.w(x, y) == 0.0) return kPosInf;
      d += v * (std::log(v / qx[x]) - ch.log_w(x, y));
    }
  }
  return std::max(d, 0.0);
}

double joint_mutual_information(const JointDistribution& q) {
  Distribution qx = q.marginal_x();
  Distribution qy = q.marginal_y();
  double mi = 0.0;
  for (int x = 0; x < q.input_size(); ++x) {
    for (int y = 0; y < q.output_size(); ++y) {
      double v = q(x, y);
      if (v == 0.0) continue;
      mi += v * std::log(v / (qx[x] * qy[y]));
    }
  }
  return std::max(mi, 0.0);
}

}  // namespace convexp
