#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace drso::stats {

/// Location of the first sample relative to the second at the 0.05 level.
enum class Direction { Plus, Minus, Similar };

/// '+', '-' or '~'.
char direction_symbol(Direction d);

struct RankSumResult {
  double statistic = 0.0;  // rank sum of the first sample (mid-ranks on ties)
  double p_two_sided = 1.0;
  double p_less = 1.0;     // evidence that the first sample is stochastically smaller
  double p_greater = 1.0;  // evidence that it is larger
  bool exact = false;
  Direction direction = Direction::Similar;  // Minus: first sample smaller
};

inline constexpr std::size_t kExactRankSumLimit = 12;
inline constexpr double kSignificance = 0.05;

/// Exact permutation distribution when |a| + |b| <= 12, otherwise the normal
/// approximation with tie and continuity corrections.
RankSumResult wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b,
                                double significance = kSignificance);

struct FriedmanResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::vector<double> mean_ranks;
};

/// Rows are blocks (instances or runs), columns are treatments.
FriedmanResult friedman(const std::vector<std::vector<double>>& results);

/// Average ranks (1 = smallest) with ties sharing their mean rank.
std::vector<double> average_ranks(std::span<const double> values);

double normal_cdf(double z);
/// Upper tail of the regularized incomplete gamma function, Q(a, x).
double gamma_q(double a, double x);
double chi_square_upper_tail(double statistic, double dof);

/// 1-based rank of the selected candidate by true value; ties take the best rank.
std::size_t acc1(std::size_t selected_index, std::span<const double> true_values);

/// |selected ∩ true_top| / |true_top|.
double acc2(std::span<const std::size_t> selected, std::span<const std::size_t> true_top);

double mean(std::span<const double> v);
/// Sample standard deviation; 0 for fewer than two values.
double stddev(std::span<const double> v);
/// Linear-interpolation quantile, q in [0, 1].
double quantile(std::vector<double> v, double q);

struct SummaryCell {
  std::size_t runs = 0;
  double mean = 0.0;
  double std = 0.0;
  double rank = 0.0;
  bool is_reference = false;
  Direction mark = Direction::Similar;  // column vs reference; Plus means smaller
};

struct SummaryTable {
  std::vector<std::string> problems;
  std::vector<std::string> algorithms;
  std::string reference;
  std::vector<std::vector<SummaryCell>> cells;  // [problem][algorithm]
  std::vector<double> friedman_p;               // per problem, runs as blocks
  std::vector<double> mean_rank;                // per algorithm
  std::vector<std::array<int, 3>> mark_counts;  // per algorithm: +, -, ~

  std::string to_csv() const;
  std::string to_text() const;
  std::string to_markdown() const;
};

/// finals[p][a] holds the final best values of every run of algorithm a on
/// problem p. All cells must have the same run count.
SummaryTable summarize(const std::vector<std::string>& problems,
                       const std::vector<std::string>& algorithms,
                       const std::vector<std::vector<std::vector<double>>>& finals,
                       const std::string& reference);

}  // namespace drso::stats
