#pragma once

#include <algorithm>
#include <cstddef>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace statesearch {

/// A clustering of observation indices 0..n-1, stored as one label per index.
/// Canonical form numbers clusters 0..K-1 in order of their smallest member.
class Partition {
 public:
  Partition() = default;

  explicit Partition(std::vector<int> labels) : labels_(std::move(labels)) { canonicalize(); }

  static Partition single_cluster(std::size_t n) { return Partition(std::vector<int>(n, 0)); }

  static Partition singletons(std::size_t n) {
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(i);
    return Partition(std::move(labels));
  }

  std::size_t size() const { return labels_.size(); }
  std::size_t num_clusters() const { return num_clusters_; }
  int label(std::size_t i) const { return labels_[i]; }
  const std::vector<int>& labels() const { return labels_; }

  /// Member indices of every cluster, in canonical cluster order.
  std::vector<std::vector<std::size_t>> clusters() const {
    std::vector<std::vector<std::size_t>> out(num_clusters_);
    for (std::size_t i = 0; i < labels_.size(); ++i) out[static_cast<std::size_t>(labels_[i])].push_back(i);
    return out;
  }

  std::vector<std::size_t> cluster_sizes() const {
    std::vector<std::size_t> sizes(num_clusters_, 0);
    for (int c : labels_) ++sizes[static_cast<std::size_t>(c)];
    return sizes;
  }

  bool operator==(const Partition&) const = default;

 private:
  void canonicalize() {
    std::vector<int> remap;
    int next = 0;
    for (int& c : labels_) {
      if (c < 0) throw std::invalid_argument("partition labels must be nonnegative");
      const auto key = static_cast<std::size_t>(c);
      if (key >= remap.size()) remap.resize(key + 1, -1);
      if (remap[key] < 0) remap[key] = next++;
      c = remap[key];
    }
    num_clusters_ = static_cast<std::size_t>(next);
  }

  std::vector<int> labels_;
  std::size_t num_clusters_ = 0;
};

/// One sample per line, labels comma separated.
inline void write_partitions(std::ostream& os, const std::vector<Partition>& samples) {
  for (const auto& p : samples) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (i) os << ',';
      os << p.label(i);
    }
    os << '\n';
  }
}

inline std::vector<Partition> read_partitions(std::istream& is) {
  std::vector<Partition> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<int> labels;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
      try {
        std::size_t used = 0;
        labels.push_back(std::stoi(field, &used));
        if (used != field.size()) throw std::invalid_argument(field);
      } catch (const std::exception&) {
        throw std::runtime_error("malformed partition label on line " + std::to_string(line_no));
      }
    }
    out.emplace_back(std::move(labels));
  }
  return out;
}

}  // namespace statesearch
