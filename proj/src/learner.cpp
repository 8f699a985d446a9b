#include "drso/learner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace drso {

FeatureMatrix FeatureMatrix::dense(std::span<const std::vector<double>> rows) {
  if (rows.empty()) throw std::invalid_argument("FeatureMatrix: no rows");
  FeatureMatrix m;
  m.rows_ = rows.size();
  m.cols_ = rows.front().size();
  if (m.cols_ == 0) throw std::invalid_argument("FeatureMatrix: rows have no columns");
  Block b;
  b.width = m.cols_;
  b.entries = m.rows_;
  b.values.reserve(m.rows_ * m.cols_);
  b.keys.resize(m.rows_);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.cols_) throw DimensionMismatch("FeatureMatrix: ragged rows");
    b.values.insert(b.values.end(), rows[r].begin(), rows[r].end());
    b.keys[r] = static_cast<std::uint32_t>(r);
  }
  m.blocks_.push_back(std::move(b));
  return m;
}

FeatureMatrix FeatureMatrix::pairs(std::span<const DecisionVector> table,
                                   std::span<const std::pair<std::uint32_t, std::uint32_t>> pairs) {
  if (table.empty() || pairs.empty()) throw std::invalid_argument("FeatureMatrix: empty pair data");
  const std::size_t n = table.front().size();
  std::vector<double> values;
  values.reserve(table.size() * n);
  for (const auto& x : table) {
    if (x.size() != n) throw DimensionMismatch("FeatureMatrix: ragged pair table");
    values.insert(values.end(), x.begin(), x.end());
  }
  FeatureMatrix m;
  m.rows_ = pairs.size();
  m.cols_ = 2 * n;
  for (int side = 0; side < 2; ++side) {
    Block b;
    b.col_begin = side == 0 ? 0 : n;
    b.width = n;
    b.entries = table.size();
    b.values = values;
    b.keys.reserve(pairs.size());
    for (const auto& [i, j] : pairs) {
      const std::uint32_t k = side == 0 ? i : j;
      if (k >= table.size()) throw std::out_of_range("FeatureMatrix: pair index out of range");
      b.keys.push_back(k);
    }
    m.blocks_.push_back(std::move(b));
  }
  return m;
}

double FeatureMatrix::at(std::size_t row, std::size_t col) const {
  for (const auto& b : blocks_) {
    if (col >= b.col_begin && col < b.col_begin + b.width) {
      return b.values[b.keys[row] * b.width + (col - b.col_begin)];
    }
  }
  throw std::out_of_range("FeatureMatrix: column out of range");
}

std::vector<double> FeatureMatrix::row(std::size_t r) const {
  std::vector<double> out(cols_);
  for (const auto& b : blocks_) {
    const double* src = &b.values[b.keys[r] * b.width];
    std::copy(src, src + b.width, out.begin() + static_cast<std::ptrdiff_t>(b.col_begin));
  }
  return out;
}

const char* objective_name(Objective o) {
  switch (o) {
    case Objective::BinaryLogistic:
      return "binary-logistic";
    case Objective::Softmax:
      return "softmax-3";
    case Objective::SquaredError:
      return "squared-error";
  }
  return "?";
}

Objective parse_objective(const std::string& name) {
  if (name == "binary-logistic") return Objective::BinaryLogistic;
  if (name == "softmax-3" || name == "softmax") return Objective::Softmax;
  if (name == "squared-error") return Objective::SquaredError;
  throw std::invalid_argument("unknown objective '" + name + "'");
}

void TrainConfig::validate() const {
  if (rounds < 0) throw std::invalid_argument("TrainConfig.rounds must be nonnegative");
  if (max_depth < 1) throw std::invalid_argument("TrainConfig.max_depth must be positive");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    throw std::invalid_argument("TrainConfig.learning_rate must lie in (0, 1]");
  }
  if (!(min_child_weight >= 0.0)) throw std::invalid_argument("TrainConfig.min_child_weight must be >= 0");
  if (!(lambda_l2 >= 0.0)) throw std::invalid_argument("TrainConfig.lambda_l2 must be >= 0");
}

double RegressionTree::predict(std::span<const double> x) const {
  std::size_t i = 0;
  while (nodes[i].feature >= 0) {
    const TreeNode& nd = nodes[i];
    // Branch-free child pick; the comparison is close to a coin flip.
    const int go_right = -static_cast<int>(!(x[static_cast<std::size_t>(nd.feature)] < nd.threshold));
    i = static_cast<std::size_t>(nd.left ^ ((nd.left ^ nd.right) & go_right));
  }
  return nodes[i].value;
}

std::size_t RegressionTree::leaves() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.feature < 0; }));
}

TreeEnsembleModel::TreeEnsembleModel(Objective objective, std::size_t feature_count,
                                     double base_score, std::vector<RegressionTree> trees)
    : objective_(objective),
      feature_count_(feature_count),
      base_score_(base_score),
      trees_(std::move(trees)) {
  flat_.reserve(trees_.size());
  for (const auto& t : trees_) {
    FlatTree f;
    const std::size_t n = t.nodes.size();
    f.feature.resize(n);
    f.threshold.resize(n);
    f.left.resize(n);
    f.right.resize(n);
    f.value.resize(n);
    std::vector<std::size_t> depth(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& nd = t.nodes[i];
      f.value[i] = nd.value;
      if (nd.feature < 0) {
        f.feature[i] = 0;
        f.threshold[i] = std::numeric_limits<double>::infinity();
        f.left[i] = f.right[i] = static_cast<std::uint32_t>(i);
        f.depth = std::max(f.depth, depth[i]);
      } else {
        f.feature[i] = static_cast<std::uint32_t>(nd.feature);
        f.threshold[i] = nd.threshold;
        f.left[i] = static_cast<std::uint32_t>(nd.left);
        f.right[i] = static_cast<std::uint32_t>(nd.right);
        depth[static_cast<std::size_t>(nd.left)] = depth[i] + 1;
        depth[static_cast<std::size_t>(nd.right)] = depth[i] + 1;
      }
    }
    flat_.push_back(std::move(f));
  }
}

std::size_t TreeEnsembleModel::rounds() const {
  return objective_ == Objective::Softmax ? trees_.size() / kSoftmaxClasses : trees_.size();
}

void TreeEnsembleModel::check_dim(std::span<const double> x) const {
  if (x.size() != feature_count_) {
    throw DimensionMismatch("model expects " + std::to_string(feature_count_) + " features, got " +
                            std::to_string(x.size()));
  }
}

double TreeEnsembleModel::margin(std::span<const double> x) const {
  double m = base_score_;
  for (const auto& t : trees_) m += t.predict(x);
  return m;
}

std::array<double, kSoftmaxClasses> TreeEnsembleModel::margins3(std::span<const double> x) const {
  std::array<double, kSoftmaxClasses> m{};
  for (std::size_t i = 0; i < trees_.size(); ++i) m[i % kSoftmaxClasses] += trees_[i].predict(x);
  return m;
}

namespace {

double sigmoid(double m) { return 1.0 / (1.0 + std::exp(-m)); }

std::array<double, kSoftmaxClasses> softmax(const std::array<double, kSoftmaxClasses>& m) {
  const double top = *std::max_element(m.begin(), m.end());
  std::array<double, kSoftmaxClasses> p{};
  double z = 0.0;
  for (std::size_t k = 0; k < kSoftmaxClasses; ++k) {
    p[k] = std::exp(m[k] - top);
    z += p[k];
  }
  for (auto& v : p) v /= z;
  return p;
}

}  // namespace

int TreeEnsembleModel::predict_label(std::span<const double> x) const {
  check_dim(x);
  switch (objective_) {
    case Objective::BinaryLogistic:
      // p >= 0.5 exactly when the margin is nonnegative.
      return margin(x) >= 0.0 ? 1 : -1;
    case Objective::Softmax: {
      const auto m = margins3(x);
      std::size_t best = 0;
      for (std::size_t k = 1; k < kSoftmaxClasses; ++k) {
        if (m[k] > m[best]) best = k;
      }
      return static_cast<int>(best) - 1;
    }
    case Objective::SquaredError:
      break;
  }
  throw std::logic_error("predict_label called on a regression model");
}

void TreeEnsembleModel::margins_batch(std::span<const double> rows, std::size_t row_count,
                                      std::vector<double>& out) const {
  const std::size_t classes = objective_ == Objective::Softmax ? kSoftmaxClasses : 1;
  const std::size_t d = feature_count_;
  out.assign(row_count * classes, classes == 1 ? base_score_ : 0.0);
  constexpr std::size_t kLanes = 16;
  std::array<std::uint32_t, kLanes> idx{};
  for (std::size_t t = 0; t < flat_.size(); ++t) {
    const FlatTree& f = flat_[t];
    const std::size_t k = t % classes;
    for (std::size_t r0 = 0; r0 < row_count; r0 += kLanes) {
      const std::size_t lanes = std::min(kLanes, row_count - r0);
      idx.fill(0);
      // Independent rows advance together so their loads overlap.
      for (std::size_t step = 0; step < f.depth; ++step) {
        for (std::size_t j = 0; j < lanes; ++j) {
          const std::uint32_t i = idx[j];
          const double v = rows[(r0 + j) * d + f.feature[i]];
          idx[j] = v < f.threshold[i] ? f.left[i] : f.right[i];
        }
      }
      for (std::size_t j = 0; j < lanes; ++j) out[(r0 + j) * classes + k] += f.value[idx[j]];
    }
  }
}

std::vector<int> TreeEnsembleModel::predict_labels(std::span<const double> rows,
                                                   std::size_t row_count) const {
  if (rows.size() != row_count * feature_count_) {
    throw DimensionMismatch("predict_labels: buffer size differs from row_count x features");
  }
  if (objective_ == Objective::SquaredError) {
    throw std::logic_error("predict_labels called on a regression model");
  }
  std::vector<double> m;
  margins_batch(rows, row_count, m);
  std::vector<int> labels(row_count);
  for (std::size_t r = 0; r < row_count; ++r) {
    if (objective_ == Objective::BinaryLogistic) {
      labels[r] = m[r] >= 0.0 ? 1 : -1;
    } else {
      std::size_t best = 0;
      for (std::size_t k = 1; k < kSoftmaxClasses; ++k) {
        if (m[r * kSoftmaxClasses + k] > m[r * kSoftmaxClasses + best]) best = k;
      }
      labels[r] = static_cast<int>(best) - 1;
    }
  }
  return labels;
}

double TreeEnsembleModel::predict_value(std::span<const double> x) const {
  check_dim(x);
  if (objective_ != Objective::SquaredError) {
    throw std::logic_error("predict_value called on a classification model");
  }
  return margin(x);
}

double TreeEnsembleModel::predict_probability(std::span<const double> x) const {
  check_dim(x);
  if (objective_ != Objective::BinaryLogistic) {
    throw std::logic_error("predict_probability requires the binary objective");
  }
  return sigmoid(margin(x));
}

std::array<double, kSoftmaxClasses> TreeEnsembleModel::predict_proba(std::span<const double> x) const {
  check_dim(x);
  if (objective_ != Objective::Softmax) {
    throw std::logic_error("predict_proba requires the softmax objective");
  }
  return softmax(margins3(x));
}

double TreeEnsembleModel::loss(const FeatureMatrix& features, std::span<const double> labels) const {
  if (features.rows() != labels.size()) throw DimensionMismatch("loss: label count differs from rows");
  double total = 0.0;
  for (std::size_t r = 0; r < features.rows(); ++r) {
    const auto x = features.row(r);
    switch (objective_) {
      case Objective::SquaredError: {
        const double d = margin(x) - labels[r];
        total += 0.5 * d * d;
        break;
      }
      case Objective::BinaryLogistic: {
        // log(1 + exp(-y m)) with y in {-1, +1}.
        const double ym = labels[r] * margin(x);
        total += ym > 0 ? std::log1p(std::exp(-ym)) : -ym + std::log1p(std::exp(ym));
        break;
      }
      case Objective::Softmax: {
        const auto p = softmax(margins3(x));
        const auto k = static_cast<std::size_t>(labels[r] + 1.0);
        total -= std::log(std::max(p[k], std::numeric_limits<double>::min()));
        break;
      }
    }
  }
  return total / static_cast<double>(features.rows());
}

std::string TreeEnsembleModel::dump() const {
  std::ostringstream os;
  os.precision(17);
  os << "objective=" << objective_name(objective_) << " features=" << feature_count_
     << " base_score=" << base_score_ << " trees=" << trees_.size() << '\n';
  for (std::size_t t = 0; t < trees_.size(); ++t) {
    os << "booster[" << t << "]";
    if (objective_ == Objective::Softmax) os << " class=" << static_cast<int>(t % kSoftmaxClasses) - 1;
    os << '\n';
    const auto& nodes = trees_[t].nodes;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const auto& nd = nodes[i];
      if (nd.feature < 0) {
        os << "  " << i << ":leaf=" << nd.value << '\n';
      } else {
        os << "  " << i << ":[f" << nd.feature << '<' << nd.threshold << "] yes=" << nd.left
           << ",no=" << nd.right << '\n';
      }
    }
  }
  return os.str();
}

namespace {

// Sorted distinct values of one column over its block's table, plus the bin
// index of every table entry.
struct ColumnBins {
  std::size_t block = 0;
  std::size_t offset = 0;  // column within the block
  std::vector<double> values;
  std::vector<std::uint32_t> bin_of_entry;
  std::vector<std::uint32_t> entries_by_value;
};

// Per-node gradient sums for every table entry of every block.
struct EntryStats {
  std::vector<double> g;
  std::vector<double> h;
  std::vector<std::uint32_t> n;

  void resize(std::size_t size) {
    g.assign(size, 0.0);
    h.assign(size, 0.0);
    n.assign(size, 0);
  }
};

class TreeBuilder {
 public:
  TreeBuilder(const FeatureMatrix& x, const TrainConfig& cfg) : x_(x), cfg_(cfg) {
    for (std::size_t bi = 0; bi < x.blocks().size(); ++bi) {
      const auto& b = x.blocks()[bi];
      entry_offset_.push_back(total_entries_);
      total_entries_ += b.entries;
      for (std::size_t c = 0; c < b.width; ++c) {
        ColumnBins cb;
        cb.block = bi;
        cb.offset = c;
        cb.values.reserve(b.entries);
        for (std::size_t e = 0; e < b.entries; ++e) cb.values.push_back(b.values[e * b.width + c]);
        std::sort(cb.values.begin(), cb.values.end());
        cb.values.erase(std::unique(cb.values.begin(), cb.values.end()), cb.values.end());
        cb.bin_of_entry.resize(b.entries);
        for (std::size_t e = 0; e < b.entries; ++e) {
          const double v = b.values[e * b.width + c];
          cb.bin_of_entry[e] = static_cast<std::uint32_t>(
              std::lower_bound(cb.values.begin(), cb.values.end(), v) - cb.values.begin());
        }
        cb.entries_by_value.resize(b.entries);
        std::iota(cb.entries_by_value.begin(), cb.entries_by_value.end(), std::uint32_t{0});
        std::stable_sort(cb.entries_by_value.begin(), cb.entries_by_value.end(),
                         [&](std::uint32_t l, std::uint32_t r) { return cb.bin_of_entry[l] < cb.bin_of_entry[r]; });
        columns_.push_back(std::move(cb));
      }
    }
    order_.resize(x.rows());
    scratch_.resize(x.rows());
    // Two child buffers per level, plus the root.
    levels_.resize(2 * static_cast<std::size_t>(cfg.max_depth) + 3);
    for (auto& l : levels_) l.resize(total_entries_);
  }

  /// Fits one tree to (grad, hess); writes each row's leaf value into delta.
  RegressionTree build(std::span<const double> grad, std::span<const double> hess,
                       std::span<double> delta) {
    grad_ = grad;
    hess_ = hess;
    delta_ = delta;
    std::iota(order_.begin(), order_.end(), std::uint32_t{0});
    RegressionTree tree;
    tree_ = &tree;
    EntryStats& root = levels_[0];
    accumulate(0, order_.size(), root);
    double g = 0.0;
    double h = 0.0;
    for (std::size_t i = 0; i < order_.size(); ++i) {
      g += grad_[order_[i]];
      h += hess_[order_[i]];
    }
    grow(0, order_.size(), 0, root, g, h);
    tree_ = nullptr;
    return tree;
  }

 private:
  struct Split {
    double gain = 0.0;
    int column = -1;
    double threshold = 0.0;
  };

  void accumulate(std::size_t begin, std::size_t end, EntryStats& out) {
    std::fill(out.g.begin(), out.g.end(), 0.0);
    std::fill(out.h.begin(), out.h.end(), 0.0);
    std::fill(out.n.begin(), out.n.end(), 0u);
    for (std::size_t bi = 0; bi < x_.blocks().size(); ++bi) {
      const auto& block = x_.blocks()[bi];
      double* og = out.g.data() + entry_offset_[bi];
      double* oh = out.h.data() + entry_offset_[bi];
      std::uint32_t* on = out.n.data() + entry_offset_[bi];
      for (std::size_t i = begin; i < end; ++i) {
        const std::uint32_t r = order_[i];
        const std::uint32_t k = block.keys[r];
        og[k] += grad_[r];
        oh[k] += hess_[r];
        ++on[k];
      }
    }
  }

  int grow(std::size_t begin, std::size_t end, int depth, const EntryStats& stats, double g,
           double h) {
    const int id = static_cast<int>(tree_->nodes.size());
    tree_->nodes.emplace_back();

    Split split;
    if (depth < cfg_.max_depth && end - begin >= 2) split = find_split(stats, g, h);
    if (split.column < 0) {
      const double w = -g / (h + cfg_.lambda_l2) * cfg_.learning_rate;
      tree_->nodes[static_cast<std::size_t>(id)].value = w;
      for (std::size_t i = begin; i < end; ++i) delta_[order_[i]] = w;
      return id;
    }

    const auto& col = columns_[static_cast<std::size_t>(split.column)];
    const auto& block = x_.blocks()[col.block];
    const double thr = split.threshold;
    // Stable partition through a scratch buffer.
    std::size_t n_left = 0;
    std::size_t n_right = 0;
    for (std::size_t i = begin; i < end; ++i) {
      const std::uint32_t r = order_[i];
      if (block.values[block.keys[r] * block.width + col.offset] < thr) {
        order_[begin + n_left++] = r;
      } else {
        scratch_[n_right++] = r;
      }
    }
    const std::size_t mid = begin + n_left;
    std::copy_n(scratch_.begin(), n_right, order_.begin() + static_cast<std::ptrdiff_t>(mid));

    EntryStats& left_stats = levels_[2 * static_cast<std::size_t>(depth) + 1];
    EntryStats& right_stats = levels_[2 * static_cast<std::size_t>(depth) + 2];
    // Sum the smaller child directly and derive its sibling by subtraction.
    const bool left_small = n_left <= n_right;
    EntryStats& small = left_small ? left_stats : right_stats;
    EntryStats& large = left_small ? right_stats : left_stats;
    if (left_small) {
      accumulate(begin, mid, small);
    } else {
      accumulate(mid, end, small);
    }
    for (std::size_t e = 0; e < total_entries_; ++e) {
      large.n[e] = stats.n[e] - small.n[e];
      if (large.n[e] == 0) {
        large.g[e] = 0.0;
        large.h[e] = 0.0;
      } else if (small.n[e] == 0) {
        large.g[e] = stats.g[e];
        large.h[e] = stats.h[e];
      } else {
        large.g[e] = stats.g[e] - small.g[e];
        large.h[e] = stats.h[e] - small.h[e];
      }
    }
    double gl = 0.0;
    double hl = 0.0;
    for (std::size_t i = begin; i < mid; ++i) {
      gl += grad_[order_[i]];
      hl += hess_[order_[i]];
    }
    double gr = 0.0;
    double hr = 0.0;
    for (std::size_t i = mid; i < end; ++i) {
      gr += grad_[order_[i]];
      hr += hess_[order_[i]];
    }

    const int left = grow(begin, mid, depth + 1, left_stats, gl, hl);
    const int right = grow(mid, end, depth + 1, right_stats, gr, hr);
    auto& node = tree_->nodes[static_cast<std::size_t>(id)];
    node.feature = static_cast<int>(block.col_begin + col.offset);
    node.threshold = thr;
    node.left = left;
    node.right = right;
    return id;
  }

  Split find_split(const EntryStats& stats, double g, double h) {
    const double lambda = cfg_.lambda_l2;
    const double mcw = cfg_.min_child_weight;
    const double parent = g * g / (h + lambda);
    Split best;
    // Requires a strictly positive improvement beyond rounding noise.
    best.gain = 1e-10 * (1.0 + std::abs(parent));

    std::size_t col_index = 0;
    for (std::size_t bi = 0; bi < x_.blocks().size(); ++bi) {
      const auto& block = x_.blocks()[bi];
      const std::size_t off = entry_offset_[bi];
      touched_.clear();
      for (std::size_t e = 0; e < block.entries; ++e) {
        if (stats.n[off + e] != 0) touched_.push_back(static_cast<std::uint32_t>(e));
      }
      // Few occupied entries: sort them per column instead of walking every entry.
      const bool sparse = touched_.size() * 8 < block.entries;
      for (std::size_t c = 0; c < block.width; ++c, ++col_index) {
        const auto& col = columns_[col_index];
        std::span<const std::uint32_t> walk;
        if (sparse) {
          sorted_.assign(touched_.begin(), touched_.end());
          std::sort(sorted_.begin(), sorted_.end(), [&](std::uint32_t l, std::uint32_t r) {
            return col.bin_of_entry[l] < col.bin_of_entry[r];
          });
          walk = sorted_;
        } else {
          walk = col.entries_by_value;
        }
        double gl = 0.0;
        double hl = 0.0;
        std::uint32_t prev_bin = std::numeric_limits<std::uint32_t>::max();
        for (std::uint32_t e : walk) {
          const std::size_t k = off + e;
          if (stats.n[k] == 0) continue;
          const std::uint32_t bin = col.bin_of_entry[e];
          if (bin != prev_bin && prev_bin != std::numeric_limits<std::uint32_t>::max() && hl >= mcw &&
              h - hl >= mcw) {
            const double gr = g - gl;
            const double hr = h - hl;
            const double gain = gl * gl / (hl + lambda) + gr * gr / (hr + lambda) - parent;
            if (gain > best.gain) {
              const double lo = col.values[prev_bin];
              const double hi = col.values[bin];
              double thr = lo + (hi - lo) * 0.5;
              if (!(thr > lo)) thr = hi;
              best = {gain, static_cast<int>(col_index), thr};
            }
          }
          gl += stats.g[k];
          hl += stats.h[k];
          prev_bin = bin;
        }
      }
    }
    if (best.column < 0) best.gain = 0.0;
    return best;
  }

  const FeatureMatrix& x_;
  const TrainConfig& cfg_;
  std::vector<ColumnBins> columns_;
  std::vector<std::size_t> entry_offset_;
  std::size_t total_entries_ = 0;
  std::vector<EntryStats> levels_;
  std::vector<std::uint32_t> sorted_;
  std::vector<std::uint32_t> touched_;
  std::vector<std::uint32_t> order_;
  std::vector<std::uint32_t> scratch_;

  std::span<const double> grad_;
  std::span<const double> hess_;
  std::span<double> delta_;
  RegressionTree* tree_ = nullptr;
};

constexpr double kMinHessian = 1e-16;

void check_labels(std::span<const double> labels, Objective objective) {
  for (double y : labels) {
    bool ok = std::isfinite(y);
    if (objective == Objective::BinaryLogistic) ok = ok && (y == -1.0 || y == 1.0);
    if (objective == Objective::Softmax) ok = ok && (y == -1.0 || y == 0.0 || y == 1.0);
    if (!ok) {
      throw std::invalid_argument(std::string("train: label ") + std::to_string(y) +
                                  " does not match objective " + objective_name(objective));
    }
  }
}

}  // namespace

TreeEnsembleModel train(const FeatureMatrix& features, std::span<const double> labels,
                        const TrainConfig& config, RngStream& /*rng*/) {
  config.validate();
  const std::size_t rows = features.rows();
  if (rows < 2) throw std::invalid_argument("train: need at least 2 samples");
  if (labels.size() != rows) throw DimensionMismatch("train: label count differs from rows");
  check_labels(labels, config.objective);

  TreeBuilder builder(features, config);
  std::vector<double> grad(rows);
  std::vector<double> hess(rows);
  std::vector<double> delta(rows);
  std::vector<RegressionTree> trees;

  if (config.objective == Objective::Softmax) {
    std::vector<std::array<double, kSoftmaxClasses>> margin(rows, std::array<double, kSoftmaxClasses>{});
    std::vector<std::array<double, kSoftmaxClasses>> prob(rows);
    trees.reserve(static_cast<std::size_t>(config.rounds) * kSoftmaxClasses);
    for (int round = 0; round < config.rounds; ++round) {
      for (std::size_t r = 0; r < rows; ++r) prob[r] = softmax(margin[r]);
      for (std::size_t k = 0; k < kSoftmaxClasses; ++k) {
        for (std::size_t r = 0; r < rows; ++r) {
          const double p = prob[r][k];
          const double y = static_cast<std::size_t>(labels[r] + 1.0) == k ? 1.0 : 0.0;
          grad[r] = p - y;
          hess[r] = std::max(p * (1.0 - p), kMinHessian);
        }
        trees.push_back(builder.build(grad, hess, delta));
        for (std::size_t r = 0; r < rows; ++r) margin[r][k] += delta[r];
      }
    }
    return TreeEnsembleModel(config.objective, features.cols(), 0.0, std::move(trees));
  }

  double base = 0.0;
  if (config.objective == Objective::SquaredError) {
    base = std::accumulate(labels.begin(), labels.end(), 0.0) / static_cast<double>(rows);
  }
  std::vector<double> margin(rows, base);
  trees.reserve(static_cast<std::size_t>(config.rounds));
  for (int round = 0; round < config.rounds; ++round) {
    for (std::size_t r = 0; r < rows; ++r) {
      if (config.objective == Objective::SquaredError) {
        grad[r] = margin[r] - labels[r];
        hess[r] = 1.0;
      } else {
        const double p = sigmoid(margin[r]);
        const double y = labels[r] > 0.0 ? 1.0 : 0.0;
        grad[r] = p - y;
        hess[r] = std::max(p * (1.0 - p), kMinHessian);
      }
    }
    trees.push_back(builder.build(grad, hess, delta));
    for (std::size_t r = 0; r < rows; ++r) margin[r] += delta[r];
  }
  return TreeEnsembleModel(config.objective, features.cols(), base, std::move(trees));
}

}  // namespace drso
