#pragma once

#include <cstdint>
#include <vector>

#include "convexp/channel.hpp"

namespace convexp {

class OracleError : public std::runtime_error {
 public:
  explicit OracleError(const std::string& msg) : std::runtime_error(msg) {}
};

using Word = std::vector<int>;  // length n, symbols in [0, |X|)

// Injective list of cost-feasible words: (1/n) sum c(x_t) <= gamma + 1e-12.
struct Codebook {
  int n = 1;
  std::vector<Word> words;

  Codebook() = default;
  Codebook(int n_, std::vector<Word> words_, const Channel& ch, double gamma);
  int size() const { return static_cast<int>(words.size()); }
};

struct OracleResult {
  double g_n = 0.0;
  Codebook best_codebook;
  double pc = 0.0;
  std::uint64_t codebooks_searched = 0;
};

struct OracleBudget {
  std::uint64_t max_codebooks = 10000000;   // C(|S|, M) cap
  std::uint64_t max_outputs = 1000000;      // |Y|^n cap
};

// All words of S_gamma^{(n)}, lexicographic.
std::vector<Word> feasible_words(const Channel& ch, int n, double gamma);

// Smallest M with (1/n) log M >= R (float noise absorbed).
std::uint64_t message_count(int n, double rate);

// (1/M) sum_y max_k W^n(y|word_k): optimal-decoder correct probability.
double map_correct_probability(const Codebook& cb, const Channel& ch,
                               const OracleBudget& budget = {});

// Exact G^{(n)}(R, gamma | W) by enumerating all M-subsets of S_gamma^{(n)}.
OracleResult brute_force_gn(int n, double rate, double gamma, const Channel& ch,
                            const OracleBudget& budget = {});

// {G^{(n+m)}, [n G^{(n)} + m G^{(m)}]/(n+m)}; throws if subadditivity fails.
std::pair<double, double> subadditivity_check(int n, int m, double rate,
                                              double gamma, const Channel& ch,
                                              const OracleBudget& budget = {});

// Decoder regions: y-index (base-|Y| digits of y^n) -> message index.
std::vector<int> map_decoder(const Codebook& cb, const Channel& ch_like);
double correct_probability_with_decoder(const Codebook& cb,
                                        const std::vector<int>& regions,
                                        const Channel& ch_like);

// Per-word n-letter divergences sum_{y^n} q^n log(q^n/W^n); requires a
// constant-composition codebook (identical type). Each equals n D(q||W|type).
std::vector<double> constant_composition_divergence(const Codebook& cb,
                                                    const Channel& test_channel,
                                                    const Channel& ch,
                                                    const OracleBudget& budget = {});

// Correct-probability lower bound from the divergence between channels:
// requires P_c under test_channel >= 1-delta with delta in [0, 1/2).
// Returns {pc under W, exp(-n[(1-delta)^{-1} D + eta_n(delta)])}.
std::pair<double, double> log_sum_lower_bound(const Codebook& cb,
                                              const std::vector<int>& regions,
                                              const Channel& test_channel,
                                              const Channel& ch, double delta,
                                              const OracleBudget& budget = {});

}  // namespace convexp
