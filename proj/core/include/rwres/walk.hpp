#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rwres/graph.hpp"

namespace rwres {

using TimeStep = std::int64_t;

/// Identity under which nodes track a walk. Forked walks get a fresh key;
/// MissingPerson replacements reuse the key of the walk they replace.
using WalkKey = std::uint32_t;

/// Lineage identifier: root index plus every (forking node, fork time) pair.
/// Rendered as "7/(12,2040)/(3,2100)".
struct WalkId {
  struct ForkMark {
    NodeId node = 0;
    TimeStep t = 0;
    friend bool operator==(const ForkMark&, const ForkMark&) = default;
  };

  std::uint32_t root = 0;
  std::vector<ForkMark> forks;

  WalkId child(NodeId node, TimeStep t) const;
  std::string str() const;

  friend bool operator==(const WalkId&, const WalkId&) = default;
};

struct WalkToken {
  WalkKey key = 0;
  WalkId id;
  NodeId position = 0;
  bool active = true;
  TimeStep born_at = 0;
  std::optional<TimeStep> died_at;
};

/// Pooled multiset of positive return gaps with O(log V) "how many exceed e"
/// queries (Fenwick tree over gap values, grown on demand).
class ReturnTimeHistogram {
 public:
  void add(std::int64_t gap);

  std::uint64_t size() const { return total_; }
  bool empty() const { return total_ == 0; }

  /// Number of recorded gaps strictly greater than `elapsed`.
  std::uint64_t count_greater(std::int64_t elapsed) const;

  double mean() const { return total_ ? static_cast<double>(sum_) / static_cast<double>(total_) : 0.0; }
  std::int64_t min() const { return min_; }

  /// Sum of (gap - cutoff) over gaps greater than `cutoff`.
  double excess_over(std::int64_t cutoff) const;

  /// Smallest gap g with P(gap <= g) >= level.
  std::int64_t quantile(double level) const;

  /// Appends the contents of another histogram.
  void merge(const ReturnTimeHistogram& other);

 private:
  std::uint64_t prefix(std::int64_t value) const;  // count of gaps <= value
  void grow(std::int64_t value);

  std::vector<std::uint64_t> counts_;  // raw counts indexed by gap
  std::vector<std::uint64_t> tree_;    // Fenwick tree, 1-based over gap values
  std::uint64_t total_ = 0;
  std::int64_t sum_ = 0;
  std::int64_t min_ = std::numeric_limits<std::int64_t>::max();
};

/// What one node remembers: last-seen time per walk key, the set of known
/// keys (in first-seen order), and the pooled return-time samples.
class NodeState {
 public:
  static constexpr TimeStep kNever = std::numeric_limits<TimeStep>::min();

  bool knows(WalkKey key) const {
    return key < last_seen_.size() && last_seen_[key] != kNever;
  }
  TimeStep last_seen(WalkKey key) const { return knows(key) ? last_seen_[key] : kNever; }
  std::span<const WalkKey> known() const { return known_; }

  /// Inserts or overwrites last_seen without recording a sample.
  void set_last_seen(WalkKey key, TimeStep t);

  /// Drops a key entirely.
  void forget(WalkKey key);

  /// Subtracts `offset` from every last-seen entry (time-axis relabeling).
  void shift_time(TimeStep offset);

  const ReturnTimeHistogram& return_samples() const { return samples_; }
  ReturnTimeHistogram& return_samples() { return samples_; }

 private:
  std::vector<TimeStep> last_seen_;
  std::vector<WalkKey> known_;
  ReturnTimeHistogram samples_;
};

/// Visit bookkeeping for one arrival. Returns the recorded return gap when
/// the walk was already known, nullopt on a first visit.
std::optional<std::int64_t> record_visit(NodeState& node, WalkKey key, TimeStep t);

}  // namespace rwres
