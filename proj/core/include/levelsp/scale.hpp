#pragma once

#include <memory>
#include <string>
#include <unordered_set>
#include <vector>

#include "levelsp/errors.hpp"

namespace levelsp {

/// A finite ordered set of grades. Position in the label list is the order:
/// index 0 is the lowest grade, index size()-1 the highest. Labels are
/// opaque strings; nothing is inferred from their spelling.
class OutcomeScale {
 public:
  explicit OutcomeScale(std::vector<std::string> labels)
      : labels_(std::move(labels)) {
    if (labels_.empty()) throw InvalidScale("scale needs at least one grade");
    std::unordered_set<std::string> seen;
    for (const auto& l : labels_) {
      if (!seen.insert(l).second)
        throw InvalidScale("duplicate grade label '" + l + "'");
    }
  }

  /// Convenience scale with labels "g1".."gm", lowest first.
  static std::shared_ptr<const OutcomeScale> indexed(int m) {
    std::vector<std::string> labels;
    labels.reserve(m);
    for (int i = 1; i <= m; ++i) labels.push_back("g" + std::to_string(i));
    return std::make_shared<OutcomeScale>(std::move(labels));
  }

  int size() const { return static_cast<int>(labels_.size()); }
  const std::string& label(int index) const { return labels_.at(index); }
  const std::vector<std::string>& labels() const { return labels_; }

  int index_of(const std::string& label) const {
    for (int i = 0; i < size(); ++i)
      if (labels_[i] == label) return i;
    throw DomainError("unknown grade label '" + label + "'");
  }

  friend bool operator==(const OutcomeScale& a, const OutcomeScale& b) {
    return a.labels_ == b.labels_;
  }
  friend bool operator!=(const OutcomeScale& a, const OutcomeScale& b) {
    return !(a == b);
  }

 private:
  std::vector<std::string> labels_;
};

using ScalePtr = std::shared_ptr<const OutcomeScale>;

inline void require_same_scale(const OutcomeScale& a, const OutcomeScale& b,
                               const char* where) {
  if (a != b)
    throw ScaleMismatch(std::string(where) + ": distributions live on different scales");
}

}  // namespace levelsp
