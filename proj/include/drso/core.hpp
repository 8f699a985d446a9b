#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace drso {

class BudgetExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using DecisionVector = std::vector<double>;

/// Axis-aligned box [lower, upper] with lower[j] < upper[j].
class Bounds {
 public:
  Bounds(std::vector<double> lower, std::vector<double> upper);
  static Bounds uniform(std::size_t dim, double lower, double upper);

  std::size_t dim() const { return lower_.size(); }
  double lower(std::size_t j) const { return lower_[j]; }
  double upper(std::size_t j) const { return upper_[j]; }
  double width(std::size_t j) const { return upper_[j] - lower_[j]; }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }

  bool contains(std::span<const double> x) const;
  void clamp(std::span<double> x) const;

 private:
  std::vector<double> lower_;
  std::vector<double> upper_;
};

struct EvaluatedSolution {
  DecisionVector x;
  double f = 0.0;
};

/// Seedable 64-bit generator. Output k of a stream is a pure function of
/// (seed, k), so every platform produces the same draws.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t draws() const { return counter_; }

  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);
  double normal();

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }
  template <typename T>
  void shuffle(std::vector<T>& items) {
    shuffle(std::span<T>(items));
  }

  /// Independent child stream; the parent advances by one draw.
  RngStream fork();

  /// k distinct indices from [0, n), in draw order.
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Every real evaluation, sorted ascending by f with first-evaluated-wins ties.
class Archive {
 public:
  explicit Archive(std::size_t fe_max);

  std::size_t fes() const { return fes_; }
  std::size_t fe_max() const { return fe_max_; }
  std::size_t size() const { return entries_.size(); }
  bool exhausted() const { return fes_ >= fe_max_; }

  const std::vector<EvaluatedSolution>& entries() const { return entries_; }
  const EvaluatedSolution& best() const;

  /// Inserts after every entry with f <= sol.f and counts one evaluation.
  void insert(EvaluatedSolution sol);

  std::vector<EvaluatedSolution> top(std::size_t k) const;

 private:
  std::size_t fe_max_;
  std::size_t fes_ = 0;
  std::vector<EvaluatedSolution> entries_;
};

inline std::vector<EvaluatedSolution> archive_top(const Archive& archive, std::size_t k) {
  return archive.top(k);
}

std::vector<DecisionVector> vectors_of(std::span<const EvaluatedSolution> sols);

}  // namespace drso
