#include "rwres/walk.hpp"

#include <algorithm>
#include <cmath>

#include "rwres/errors.hpp"

namespace rwres {

WalkId WalkId::child(NodeId node, TimeStep t) const {
  WalkId out = *this;
  out.forks.push_back({node, t});
  return out;
}

std::string WalkId::str() const {
  std::string s = std::to_string(root);
  for (const auto& mark : forks) {
    s += "/(";
    s += std::to_string(mark.node);
    s += ',';
    s += std::to_string(mark.t);
    s += ')';
  }
  return s;
}

void ReturnTimeHistogram::grow(std::int64_t value) {
  std::size_t cap = std::max<std::size_t>(counts_.size(), 64);
  while (cap <= static_cast<std::size_t>(value)) cap *= 2;
  if (cap == counts_.size()) return;
  counts_.resize(cap, 0);
  // Rebuild the Fenwick tree in O(cap).
  tree_.assign(cap + 1, 0);
  for (std::size_t v = 0; v < cap; ++v) {
    const std::size_t i = v + 1;
    tree_[i] += counts_[v];
    const std::size_t parent = i + (i & (~i + 1));
    if (parent <= cap) tree_[parent] += tree_[i];
  }
}

void ReturnTimeHistogram::add(std::int64_t gap) {
  if (gap < 1) throw std::invalid_argument("return gap must be positive");
  if (static_cast<std::size_t>(gap) >= counts_.size()) grow(gap);
  ++counts_[static_cast<std::size_t>(gap)];
  for (std::size_t i = static_cast<std::size_t>(gap) + 1; i < tree_.size(); i += i & (~i + 1))
    ++tree_[i];
  ++total_;
  sum_ += gap;
  min_ = std::min(min_, gap);
}

std::uint64_t ReturnTimeHistogram::prefix(std::int64_t value) const {
  if (value < 0 || counts_.empty()) return 0;
  std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(value), counts_.size() - 1) + 1;
  std::uint64_t acc = 0;
  for (; i > 0; i -= i & (~i + 1)) acc += tree_[i];
  return acc;
}

std::uint64_t ReturnTimeHistogram::count_greater(std::int64_t elapsed) const {
  return total_ - prefix(elapsed);
}

double ReturnTimeHistogram::excess_over(std::int64_t cutoff) const {
  double acc = 0.0;
  for (std::size_t v = static_cast<std::size_t>(std::max<std::int64_t>(cutoff + 1, 0));
       v < counts_.size(); ++v) {
    acc += static_cast<double>(counts_[v]) * static_cast<double>(static_cast<std::int64_t>(v) - cutoff);
  }
  return acc;
}

std::int64_t ReturnTimeHistogram::quantile(double level) const {
  if (total_ == 0) throw std::logic_error("quantile of empty histogram");
  const auto needed = static_cast<std::uint64_t>(std::ceil(level * static_cast<double>(total_)));
  std::uint64_t acc = 0;
  for (std::size_t v = 0; v < counts_.size(); ++v) {
    acc += counts_[v];
    if (acc >= std::max<std::uint64_t>(needed, 1)) return static_cast<std::int64_t>(v);
  }
  return static_cast<std::int64_t>(counts_.size() - 1);
}

void ReturnTimeHistogram::merge(const ReturnTimeHistogram& other) {
  if (other.total_ == 0) return;
  if (other.counts_.size() > counts_.size()) grow(static_cast<std::int64_t>(other.counts_.size() - 1));
  for (std::size_t v = 0; v < other.counts_.size(); ++v) counts_[v] += other.counts_[v];
  tree_.assign(counts_.size() + 1, 0);
  for (std::size_t v = 0; v < counts_.size(); ++v) {
    const std::size_t i = v + 1;
    tree_[i] += counts_[v];
    const std::size_t parent = i + (i & (~i + 1));
    if (parent <= counts_.size()) tree_[parent] += tree_[i];
  }
  total_ += other.total_;
  sum_ += other.sum_;
  min_ = std::min(min_, other.min_);
}

void NodeState::set_last_seen(WalkKey key, TimeStep t) {
  if (key >= last_seen_.size()) last_seen_.resize(static_cast<std::size_t>(key) + 1, kNever);
  if (last_seen_[key] == kNever) known_.push_back(key);
  last_seen_[key] = t;
}

void NodeState::forget(WalkKey key) {
  if (!knows(key)) return;
  last_seen_[key] = kNever;
  known_.erase(std::find(known_.begin(), known_.end(), key));
}

void NodeState::shift_time(TimeStep offset) {
  for (WalkKey key : known_) last_seen_[key] -= offset;
}

std::optional<std::int64_t> record_visit(NodeState& node, WalkKey key, TimeStep t) {
  if (node.knows(key)) {
    const std::int64_t gap = t - node.last_seen(key);
    // Two tokens sharing a key (MissingPerson replacements) can land on the
    // same node in the same step; the second carries no return information.
    if (gap == 0) return std::nullopt;
    node.return_samples().add(gap);
    node.set_last_seen(key, t);
    return gap;
  }
  node.set_last_seen(key, t);
  return std::nullopt;
}

}  // namespace rwres
