#include "drso/stats.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace drso::stats {

char direction_symbol(Direction d) {
  switch (d) {
    case Direction::Plus:
      return '+';
    case Direction::Minus:
      return '-';
    case Direction::Similar:
      return '~';
  }
  return '?';
}

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw std::invalid_argument("gamma_q: need a > 0 and x >= 0");
  if (x == 0.0) return 1.0;
  constexpr int kMaxIter = 1000;
  constexpr double kEps = 1e-15;
  const double log_prefix = -x + a * std::log(x) - std::lgamma(a);
  if (x < a + 1.0) {
    // Series for P(a, x).
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < kMaxIter; ++n) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * kEps) break;
    }
    return 1.0 - sum * std::exp(log_prefix);
  }
  // Lentz continued fraction for Q(a, x).
  constexpr double kTiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIter; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return std::exp(log_prefix) * h;
}

double chi_square_upper_tail(double statistic, double dof) {
  if (statistic <= 0.0) return 1.0;
  return gamma_q(0.5 * dof, 0.5 * statistic);
}

namespace {

// Visits every way of choosing k of the n pooled ranks.
template <typename Fn>
void for_each_combination_sum(std::span<const double> ranks, std::size_t k, Fn&& fn) {
  const std::size_t n = ranks.size();
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  while (true) {
    double s = 0.0;
    for (std::size_t i : idx) s += ranks[i];
    fn(s);
    std::size_t pos = k;
    while (pos > 0 && idx[pos - 1] == n - k + pos - 1) --pos;
    if (pos == 0) return;
    ++idx[pos - 1];
    for (std::size_t i = pos; i < k; ++i) idx[i] = idx[i - 1] + 1;
  }
}

}  // namespace

RankSumResult wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b,
                                double significance) {
  if (a.empty() || b.empty()) throw std::invalid_argument("wilcoxon_rank_sum: empty sample");
  const std::size_t na = a.size();
  const std::size_t nb = b.size();
  const std::size_t n = na + nb;
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const std::vector<double> ranks = average_ranks(pooled);

  RankSumResult res;
  res.statistic = std::accumulate(ranks.begin(), ranks.begin() + static_cast<std::ptrdiff_t>(na), 0.0);
  const double expected = static_cast<double>(na) * static_cast<double>(n + 1) / 2.0;

  if (n <= kExactRankSumLimit) {
    res.exact = true;
    constexpr double kTol = 1e-9;
    std::size_t total = 0;
    std::size_t le = 0;
    std::size_t ge = 0;
    for_each_combination_sum(ranks, na, [&](double s) {
      ++total;
      if (s <= res.statistic + kTol) ++le;
      if (s >= res.statistic - kTol) ++ge;
    });
    res.p_less = static_cast<double>(le) / static_cast<double>(total);
    res.p_greater = static_cast<double>(ge) / static_cast<double>(total);
    res.p_two_sided = std::min(1.0, 2.0 * std::min(res.p_less, res.p_greater));
  } else {
    // Tie-corrected variance.
    std::vector<double> sorted = pooled;
    std::sort(sorted.begin(), sorted.end());
    double tie_term = 0.0;
    for (std::size_t i = 0; i < n;) {
      std::size_t j = i;
      while (j < n && sorted[j] == sorted[i]) ++j;
      const double t = static_cast<double>(j - i);
      tie_term += t * t * t - t;
      i = j;
    }
    const double dn = static_cast<double>(n);
    const double var = static_cast<double>(na) * static_cast<double>(nb) / 12.0 *
                       ((dn + 1.0) - tie_term / (dn * (dn - 1.0)));
    if (var <= 0.0) {
      res.p_less = res.p_greater = res.p_two_sided = 1.0;
      return res;
    }
    const double sd = std::sqrt(var);
    const double diff = res.statistic - expected;
    res.p_less = normal_cdf((diff + 0.5) / sd);
    res.p_greater = 1.0 - normal_cdf((diff - 0.5) / sd);
    const double z = std::max(0.0, (std::abs(diff) - 0.5) / sd);
    res.p_two_sided = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  }

  if (res.p_two_sided < significance) {
    res.direction = res.statistic < expected ? Direction::Minus : Direction::Plus;
  }
  return res;
}

FriedmanResult friedman(const std::vector<std::vector<double>>& results) {
  if (results.empty()) throw std::invalid_argument("friedman: need at least one row");
  const std::size_t k = results.front().size();
  if (k < 2) throw std::invalid_argument("friedman: need at least two columns");
  for (const auto& row : results) {
    if (row.size() != k) throw std::invalid_argument("friedman: ragged result matrix");
  }
  const double n = static_cast<double>(results.size());
  const double dk = static_cast<double>(k);
  std::vector<double> rank_sums(k, 0.0);
  for (const auto& row : results) {
    const auto r = average_ranks(row);
    for (std::size_t j = 0; j < k; ++j) rank_sums[j] += r[j];
  }
  double sum_sq = 0.0;
  for (double r : rank_sums) sum_sq += r * r;
  FriedmanResult res;
  res.statistic = 12.0 / (n * dk * (dk + 1.0)) * sum_sq - 3.0 * n * (dk + 1.0);
  // Rounding can leave a tiny negative value for all-tied data.
  if (res.statistic < 0.0 && res.statistic > -1e-9) res.statistic = 0.0;
  res.p_value = chi_square_upper_tail(res.statistic, dk - 1.0);
  for (double r : rank_sums) res.mean_ranks.push_back(r / n);
  return res;
}

std::size_t acc1(std::size_t selected_index, std::span<const double> true_values) {
  if (selected_index >= true_values.size()) throw std::out_of_range("acc1: index out of range");
  const double v = true_values[selected_index];
  return 1 + static_cast<std::size_t>(std::count_if(true_values.begin(), true_values.end(),
                                                     [v](double x) { return x < v; }));
}

double acc2(std::span<const std::size_t> selected, std::span<const std::size_t> true_top) {
  if (true_top.empty()) throw std::invalid_argument("acc2: empty true top set");
  std::vector<std::size_t> s(selected.begin(), selected.end());
  std::vector<std::size_t> t(true_top.begin(), true_top.end());
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  std::vector<std::size_t> both;
  std::set_intersection(s.begin(), s.end(), t.begin(), t.end(), std::back_inserter(both));
  return static_cast<double>(both.size()) / static_cast<double>(t.size());
}

double mean(std::span<const double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stddev(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw std::invalid_argument("quantile: empty input");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] + (v[hi] - v[lo]) * frac;
}

SummaryTable summarize(const std::vector<std::string>& problems,
                       const std::vector<std::string>& algorithms,
                       const std::vector<std::vector<std::vector<double>>>& finals,
                       const std::string& reference) {
  const auto ref_it = std::find(algorithms.begin(), algorithms.end(), reference);
  if (ref_it == algorithms.end()) {
    throw std::invalid_argument("summarize: reference '" + reference + "' is not an algorithm");
  }
  const auto ref = static_cast<std::size_t>(ref_it - algorithms.begin());
  if (finals.size() != problems.size()) throw std::invalid_argument("summarize: ragged problem rows");

  SummaryTable t;
  t.problems = problems;
  t.algorithms = algorithms;
  t.reference = reference;
  t.mean_rank.assign(algorithms.size(), 0.0);
  t.mark_counts.assign(algorithms.size(), {0, 0, 0});
  std::size_t runs = 0;
  for (std::size_t p = 0; p < problems.size(); ++p) {
    if (finals[p].size() != algorithms.size()) throw std::invalid_argument("summarize: ragged algorithm columns");
    for (const auto& cell : finals[p]) {
      if (cell.empty()) throw std::invalid_argument("summarize: empty cell");
      if (runs == 0) runs = cell.size();
      if (cell.size() != runs) throw std::invalid_argument("summarize: cells have different run counts");
    }
    std::vector<SummaryCell> row(algorithms.size());
    std::vector<double> means;
    for (std::size_t a = 0; a < algorithms.size(); ++a) {
      const auto& v = finals[p][a];
      row[a].runs = v.size();
      row[a].mean = mean(v);
      row[a].std = stddev(v);
      row[a].is_reference = a == ref;
      means.push_back(row[a].mean);
      if (a != ref) {
        row[a].mark = wilcoxon_rank_sum(finals[p][ref], v).direction;
        const int slot = row[a].mark == Direction::Plus ? 0 : (row[a].mark == Direction::Minus ? 1 : 2);
        ++t.mark_counts[a][static_cast<std::size_t>(slot)];
      }
    }
    const auto ranks = average_ranks(means);
    for (std::size_t a = 0; a < algorithms.size(); ++a) {
      row[a].rank = ranks[a];
      t.mean_rank[a] += ranks[a] / static_cast<double>(problems.size());
    }
    t.cells.push_back(std::move(row));

    double p_value = std::numeric_limits<double>::quiet_NaN();
    if (algorithms.size() >= 2) {
      std::vector<std::vector<double>> blocks(runs, std::vector<double>(algorithms.size()));
      for (std::size_t r = 0; r < runs; ++r) {
        for (std::size_t a = 0; a < algorithms.size(); ++a) blocks[r][a] = finals[p][a][r];
      }
      p_value = friedman(blocks).p_value;
    }
    t.friedman_p.push_back(p_value);
  }
  return t;
}

namespace {

std::string cell_text(const SummaryCell& c) {
  std::string s = fmt::format("{:.2e}({:.2e})[{:g}]", c.mean, c.std, c.rank);
  if (!c.is_reference) s += fmt::format("({})", direction_symbol(c.mark));
  return s;
}

}  // namespace

std::string SummaryTable::to_csv() const {
  std::string out = "problem,friedman_p,algorithm,runs,mean,std,rank,mark\n";
  for (std::size_t p = 0; p < problems.size(); ++p) {
    for (std::size_t a = 0; a < algorithms.size(); ++a) {
      const auto& c = cells[p][a];
      out += fmt::format("{},{:.6e},{},{},{:.17g},{:.17g},{:g},{}\n", problems[p], friedman_p[p],
                         algorithms[a], c.runs, c.mean, c.std, c.rank,
                         c.is_reference ? std::string("ref") : std::string(1, direction_symbol(c.mark)));
    }
  }
  return out;
}

std::string SummaryTable::to_text() const {
  std::vector<std::vector<std::string>> grid;
  std::vector<std::string> header{"problem", "p-value"};
  header.insert(header.end(), algorithms.begin(), algorithms.end());
  grid.push_back(header);
  for (std::size_t p = 0; p < problems.size(); ++p) {
    std::vector<std::string> row{problems[p], fmt::format("{:.2e}", friedman_p[p])};
    for (const auto& c : cells[p]) row.push_back(cell_text(c));
    grid.push_back(row);
  }
  std::vector<std::string> ranks{"mean rank", ""};
  std::vector<std::string> marks{"+/-/~", ""};
  for (std::size_t a = 0; a < algorithms.size(); ++a) {
    ranks.push_back(fmt::format("{:.3f}", mean_rank[a]));
    marks.push_back(algorithms[a] == reference
                        ? std::string("ref")
                        : fmt::format("{}/{}/{}", mark_counts[a][0], mark_counts[a][1], mark_counts[a][2]));
  }
  grid.push_back(ranks);
  grid.push_back(marks);

  std::vector<std::size_t> width(grid.front().size(), 0);
  for (const auto& row : grid) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::string out = fmt::format(
      "# mean(std)[rank] per cell; rank by mean, ties share the average rank; marks vs '{}' by "
      "two-sided rank-sum at 0.05: + smaller, - larger, ~ no significant difference\n",
      reference);
  for (const auto& row : grid) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out += fmt::format("{:<{}}", row[c], width[c]);
      out += c + 1 < row.size() ? "  " : "\n";
    }
  }
  return out;
}

std::string SummaryTable::to_markdown() const {
  std::string out = "| problem | p-value |";
  for (const auto& a : algorithms) out += " " + a + " |";
  out += "\n|---|---|";
  for (std::size_t a = 0; a < algorithms.size(); ++a) out += "---|";
  out += "\n";
  for (std::size_t p = 0; p < problems.size(); ++p) {
    out += fmt::format("| {} | {:.2e} |", problems[p], friedman_p[p]);
    for (const auto& c : cells[p]) out += " " + cell_text(c) + " |";
    out += "\n";
  }
  out += "| mean rank | |";
  for (double r : mean_rank) out += fmt::format(" {:.3f} |", r);
  out += "\n";
  return out;
}

}  // namespace drso::stats
