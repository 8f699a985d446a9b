#include "drso/core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace drso {

Bounds::Bounds(std::vector<double> lower, std::vector<double> upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != upper_.size()) {
    throw DimensionMismatch("bounds: lower and upper differ in length");
  }
  if (lower_.empty()) {
    throw std::invalid_argument("bounds: dimension must be positive");
  }
  for (std::size_t j = 0; j < lower_.size(); ++j) {
    if (!(lower_[j] < upper_[j])) {
      throw std::invalid_argument("bounds: lower must be strictly below upper in dimension " +
                                  std::to_string(j));
    }
  }
}

Bounds Bounds::uniform(std::size_t dim, double lower, double upper) {
  return Bounds(std::vector<double>(dim, lower), std::vector<double>(dim, upper));
}

bool Bounds::contains(std::span<const double> x) const {
  if (x.size() != dim()) return false;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (!(x[j] >= lower_[j] && x[j] <= upper_[j])) return false;
  }
  return true;
}

void Bounds::clamp(std::span<double> x) const {
  if (x.size() != dim()) throw DimensionMismatch("clamp: vector length differs from bounds");
  for (std::size_t j = 0; j < x.size(); ++j) x[j] = std::clamp(x[j], lower_[j], upper_[j]);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t RngStream::next_u64() {
  // Two rounds keep adjacent seeds decorrelated.
  std::uint64_t key = splitmix64(seed_);
  return splitmix64(key ^ (counter_++ * 0xd1b54a32d192ed03ULL));
}

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t RngStream::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("RngStream::below: n must be positive");
  // Rejection keeps the result unbiased.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t v;
  do {
    v = next_u64();
  } while (v >= limit);
  return v % n;
}

double RngStream::normal() {
  if (has_spare_normal_) {
    has_spare_normal_ = false;
    return spare_normal_;
  }
  double u1;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_normal_ = r * std::sin(theta);
  has_spare_normal_ = true;
  return r * std::cos(theta);
}

RngStream RngStream::fork() {
  return RngStream(next_u64());
}

std::vector<std::size_t> RngStream::sample_without_replacement(std::size_t n, std::size_t k) {
  if (k > n) throw std::invalid_argument("sample_without_replacement: k exceeds n");
  std::vector<std::size_t> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = i;
  // Partial Fisher-Yates.
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = i + static_cast<std::size_t>(below(n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

Archive::Archive(std::size_t fe_max) : fe_max_(fe_max) {
  if (fe_max == 0) throw std::invalid_argument("archive: fe_max must be positive");
}

const EvaluatedSolution& Archive::best() const {
  if (entries_.empty()) throw std::out_of_range("archive: empty");
  return entries_.front();
}

void Archive::insert(EvaluatedSolution sol) {
  if (exhausted()) {
    throw BudgetExhausted("archive: evaluation budget of " + std::to_string(fe_max_) +
                          " exhausted");
  }
  if (!std::isfinite(sol.f)) throw std::domain_error("archive: non-finite objective value");
  auto pos = std::upper_bound(entries_.begin(), entries_.end(), sol.f,
                              [](double f, const EvaluatedSolution& e) { return f < e.f; });
  entries_.insert(pos, std::move(sol));
  ++fes_;
}

std::vector<EvaluatedSolution> Archive::top(std::size_t k) const {
  if (k > entries_.size()) {
    throw std::out_of_range("archive_top: k=" + std::to_string(k) + " exceeds archive size " +
                            std::to_string(entries_.size()));
  }
  return {entries_.begin(), entries_.begin() + static_cast<std::ptrdiff_t>(k)};
}

std::vector<DecisionVector> vectors_of(std::span<const EvaluatedSolution> sols) {
  std::vector<DecisionVector> out;
  out.reserve(sols.size());
  for (const auto& s : sols) out.push_back(s.x);
  return out;
}

}  // namespace drso
