#include "convexp/code_oracle.hpp"

#include <cmath>

namespace convexp {
namespace {

std::uint64_t ipow(std::uint64_t b, int e) {
  std::uint64_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

double word_cost(const Word& w, const Channel& ch) {
  double c = 0.0;
  for (int x : w) c += ch.cost(x);
  return c / static_cast<double>(w.size());
}

// W^n(y^n | x^n) with y^n decoded from its base-|Y| index.
double word_likelihood(const Word& w, std::uint64_t yidx, const Channel& ch) {
  double p = 1.0;
  std::uint64_t rest = yidx;
  const int n = static_cast<int>(w.size());
  const std::uint64_t ny = static_cast<std::uint64_t>(ch.output_size());
  for (int t = n - 1; t >= 0; --t) {
    int y = static_cast<int>(rest % ny);
    rest /= ny;
    p *= ch.w(w[static_cast<std::size_t>(t)], y);
  }
  return p;
}

std::uint64_t binomial_capped(std::uint64_t n, std::uint64_t k,
                              std::uint64_t cap) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  long double r = 1.0L;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * static_cast<long double>(n - k + i) / static_cast<long double>(i);
    if (r > static_cast<long double>(cap) * 2.0L) {
      return cap + 1;  // over budget, exact count irrelevant
    }
  }
  return static_cast<std::uint64_t>(r + 0.5L);
}

void check_output_budget(int n, const Channel& ch, const OracleBudget& budget) {
  long double total = std::pow(static_cast<long double>(ch.output_size()), n);
  if (total > static_cast<long double>(budget.max_outputs)) {
    throw OracleError("oracle: |Y|^n = " + std::to_string(double(total)) +
                      " exceeds the enumeration budget " +
                      std::to_string(budget.max_outputs));
  }
}

}  // namespace

Codebook::Codebook(int n_, std::vector<Word> words_, const Channel& ch,
                   double gamma)
    : n(n_), words(std::move(words_)) {
  if (n <= 0) throw OracleError("codebook: blocklength must be positive");
  for (std::size_t k = 0; k < words.size(); ++k) {
    const Word& w = words[k];
    if (static_cast<int>(w.size()) != n) {
      throw OracleError("codebook: word " + std::to_string(k) +
                        " has wrong length");
    }
    for (int x : w) {
      if (x < 0 || x >= ch.input_size()) {
        throw OracleError("codebook: symbol out of range");
      }
    }
    if (word_cost(w, ch) > gamma + 1e-12) {
      throw OracleError("codebook: word " + std::to_string(k) +
                        " violates the cost budget");
    }
    for (std::size_t j = 0; j < k; ++j) {
      if (words[j] == w) {
        throw OracleError("codebook: duplicate word (encoder must be "
                          "one-to-one)");
      }
    }
  }
}

std::vector<Word> feasible_words(const Channel& ch, int n, double gamma) {
  std::vector<Word> out;
  Word w(static_cast<std::size_t>(n), 0);
  const int nx = ch.input_size();
  while (true) {
    if (word_cost(w, ch) <= gamma + 1e-12) out.push_back(w);
    int t = n - 1;
    while (t >= 0 && w[static_cast<std::size_t>(t)] == nx - 1) {
      w[static_cast<std::size_t>(t)] = 0;
      --t;
    }
    if (t < 0) break;
    ++w[static_cast<std::size_t>(t)];
  }
  return out;
}

std::uint64_t message_count(int n, double rate) {
  if (rate <= 0.0) return 1;
  double target = static_cast<double>(n) * rate;
  auto lo = static_cast<std::uint64_t>(std::floor(std::exp(target)));
  for (std::uint64_t m = lo > 2 ? lo - 2 : 1;; ++m) {
    if (std::log(static_cast<double>(m)) >= target - 1e-9) return m;
  }
}

double map_correct_probability(const Codebook& cb, const Channel& ch,
                               const OracleBudget& budget) {
  check_output_budget(cb.n, ch, budget);
  if (cb.words.empty()) throw OracleError("oracle: empty codebook");
  const std::uint64_t ytotal = ipow(static_cast<std::uint64_t>(ch.output_size()), cb.n);
  double sum = 0.0;
  for (std::uint64_t y = 0; y < ytotal; ++y) {
    double best = 0.0;
    for (const Word& w : cb.words) {
      best = std::max(best, word_likelihood(w, y, ch));
    }
    sum += best;
  }
  return sum / static_cast<double>(cb.words.size());
}

OracleResult brute_force_gn(int n, double rate, double gamma, const Channel& ch,
                            const OracleBudget& budget) {
  check_output_budget(n, ch, budget);
  std::vector<Word> pool = feasible_words(ch, n, gamma);
  const std::uint64_t m_count = message_count(n, rate);
  if (m_count > pool.size()) {
    throw OracleError(
        "oracle: infeasible rate, M = " + std::to_string(m_count) +
        " messages but only " + std::to_string(pool.size()) +
        " cost-feasible words (one-to-one encoder impossible)");
  }
  std::uint64_t combos =
      binomial_capped(pool.size(), m_count, budget.max_codebooks);
  if (combos > budget.max_codebooks) {
    throw OracleError("oracle: C(" + std::to_string(pool.size()) + "," +
                      std::to_string(m_count) + ") exceeds the codebook budget");
  }

  const int m = static_cast<int>(m_count);
  const std::uint64_t ytotal = ipow(static_cast<std::uint64_t>(ch.output_size()), n);
  // Per-word likelihood rows, filled once.
  std::vector<std::vector<double>> lik(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    lik[i].resize(ytotal);
    for (std::uint64_t y = 0; y < ytotal; ++y) {
      lik[i][y] = word_likelihood(pool[i], y, ch);
    }
  }

  std::vector<int> comb(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) comb[static_cast<std::size_t>(i)] = i;
  double best_pc = -1.0;
  std::vector<int> best_comb;
  std::uint64_t searched = 0;
  while (true) {
    double sum = 0.0;
    for (std::uint64_t y = 0; y < ytotal; ++y) {
      double best = 0.0;
      for (int k : comb) best = std::max(best, lik[static_cast<std::size_t>(k)][y]);
      sum += best;
    }
    double pc = sum / static_cast<double>(m);
    ++searched;
    if (pc > best_pc) {
      best_pc = pc;
      best_comb = comb;
    }
    // next lexicographic combination
    int i = m - 1;
    while (i >= 0 &&
           comb[static_cast<std::size_t>(i)] ==
               static_cast<int>(pool.size()) - m + i) {
      --i;
    }
    if (i < 0) break;
    ++comb[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < m; ++j) {
      comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
    }
  }

  std::vector<Word> best_words;
  best_words.reserve(best_comb.size());
  for (int k : best_comb) best_words.push_back(pool[static_cast<std::size_t>(k)]);
  OracleResult res;
  res.pc = best_pc;
  res.g_n = -std::log(best_pc) / static_cast<double>(n);
  res.best_codebook = Codebook(n, std::move(best_words), ch, gamma);
  res.codebooks_searched = searched;
  return res;
}

std::pair<double, double> subadditivity_check(int n, int m, double rate,
                                              double gamma, const Channel& ch,
                                              const OracleBudget& budget) {
  double g_nm = brute_force_gn(n + m, rate, gamma, ch, budget).g_n;
  double g_n = brute_force_gn(n, rate, gamma, ch, budget).g_n;
  double g_m = brute_force_gn(m, rate, gamma, ch, budget).g_n;
  double rhs = (n * g_n + m * g_m) / static_cast<double>(n + m);
  if (g_nm > rhs + 1e-9) {
    throw OracleError("oracle: subadditivity violated: G^{(n+m)} = " +
                      std::to_string(g_nm) + " > " + std::to_string(rhs));
  }
  return {g_nm, rhs};
}

std::vector<int> map_decoder(const Codebook& cb, const Channel& ch_like) {
  const std::uint64_t ytotal =
      ipow(static_cast<std::uint64_t>(ch_like.output_size()), cb.n);
  std::vector<int> regions(ytotal, 0);
  for (std::uint64_t y = 0; y < ytotal; ++y) {
    double best = -1.0;
    int arg = 0;
    for (int k = 0; k < cb.size(); ++k) {
      double p = word_likelihood(cb.words[static_cast<std::size_t>(k)], y, ch_like);
      if (p > best) {
        best = p;
        arg = k;
      }
    }
    regions[y] = arg;
  }
  return regions;
}

double correct_probability_with_decoder(const Codebook& cb,
                                        const std::vector<int>& regions,
                                        const Channel& ch_like) {
  const std::uint64_t ytotal =
      ipow(static_cast<std::uint64_t>(ch_like.output_size()), cb.n);
  if (regions.size() != ytotal) {
    throw OracleError("oracle: decoder regions must cover Y^n");
  }
  double sum = 0.0;
  for (std::uint64_t y = 0; y < ytotal; ++y) {
    int k = regions[y];
    if (k < 0 || k >= cb.size()) {
      throw OracleError("oracle: decoder region maps to a missing message");
    }
    sum += word_likelihood(cb.words[static_cast<std::size_t>(k)], y, ch_like);
  }
  return sum / static_cast<double>(cb.size());
}

std::vector<double> constant_composition_divergence(const Codebook& cb,
                                                    const Channel& test_channel,
                                                    const Channel& ch,
                                                    const OracleBudget& budget) {
  check_output_budget(cb.n, ch, budget);
  if (test_channel.input_size() != ch.input_size() ||
      test_channel.output_size() != ch.output_size()) {
    throw OracleError("oracle: test channel dimensions mismatch");
  }
  // identical type across words
  std::vector<int> type0(static_cast<std::size_t>(ch.input_size()), 0);
  for (int x : cb.words.at(0)) ++type0[static_cast<std::size_t>(x)];
  for (const Word& w : cb.words) {
    std::vector<int> ty(static_cast<std::size_t>(ch.input_size()), 0);
    for (int x : w) ++ty[static_cast<std::size_t>(x)];
    if (ty != type0) {
      throw OracleError("oracle: codewords do not share one type");
    }
  }
  const std::uint64_t ytotal = ipow(static_cast<std::uint64_t>(ch.output_size()), cb.n);
  std::vector<double> out;
  out.reserve(cb.words.size());
  for (const Word& w : cb.words) {
    double d = 0.0;
    bool infinite = false;
    for (std::uint64_t y = 0; y < ytotal && !infinite; ++y) {
      double q = word_likelihood(w, y, test_channel);
      if (q == 0.0) continue;
      double p = word_likelihood(w, y, ch);
      if (p == 0.0) {
        infinite = true;
        break;
      }
      d += q * std::log(q / p);
    }
    out.push_back(infinite ? kPosInf : d);
  }
  return out;
}

std::pair<double, double> log_sum_lower_bound(const Codebook& cb,
                                              const std::vector<int>& regions,
                                              const Channel& test_channel,
                                              const Channel& ch, double delta,
                                              const OracleBudget& budget) {
  check_output_budget(cb.n, ch, budget);
  if (delta < 0.0 || delta >= 0.5) {
    throw OracleError("oracle: delta must lie in [0, 1/2)");
  }
  double pc_test = correct_probability_with_decoder(cb, regions, test_channel);
  if (pc_test < 1.0 - delta - 1e-12) {
    throw OracleError(
        "oracle: precondition failed, correct probability under the test "
        "channel is " +
        std::to_string(pc_test) + " < 1 - delta");
  }
  // shared type as an input distribution
  std::vector<double> type(static_cast<std::size_t>(ch.input_size()), 0.0);
  for (int x : cb.words.at(0)) type[static_cast<std::size_t>(x)] += 1.0;
  for (double& v : type) v /= static_cast<double>(cb.n);
  std::vector<double> joint(static_cast<std::size_t>(ch.input_size()) *
                                ch.output_size(),
                            0.0);
  for (int x = 0; x < ch.input_size(); ++x) {
    for (int y = 0; y < ch.output_size(); ++y) {
      joint[static_cast<std::size_t>(x) * ch.output_size() + y] =
          type[static_cast<std::size_t>(x)] * test_channel.w(x, y);
    }
  }
  double d = conditional_divergence(
      JointDistribution(ch.input_size(), ch.output_size(), std::move(joint)),
      ch);
  double eta_n = binary_entropy(1.0 - delta) / ((1.0 - delta) * cb.n);
  double bound = std::exp(-cb.n * (d / (1.0 - delta) + eta_n));
  double pc_actual = correct_probability_with_decoder(cb, regions, ch);
  if (pc_actual < bound - 1e-12) {
    throw OracleError("oracle: divergence lower bound violated: " +
                      std::to_string(pc_actual) + " < " +
                      std::to_string(bound));
  }
  return {pc_actual, bound};
}

}  // namespace convexp
