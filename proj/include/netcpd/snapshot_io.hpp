#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "netcpd/graph_core.hpp"

namespace netcpd {

/// Pull-based stream of snapshots in time order.
class SnapshotSource {
 public:
  virtual ~SnapshotSource() = default;
  virtual std::optional<AdjacencySnapshot> next() = 0;
};

/// Replays an in-memory sequence.
class VectorSource final : public SnapshotSource {
 public:
  explicit VectorSource(std::vector<AdjacencySnapshot> snapshots)
      : snapshots_(std::move(snapshots)) {}

  std::optional<AdjacencySnapshot> next() override {
    if (pos_ >= snapshots_.size()) return std::nullopt;
    return snapshots_[pos_++];
  }

 private:
  std::vector<AdjacencySnapshot> snapshots_;
  std::size_t pos_ = 0;
};

enum class SnapshotFormat { dense, edge_list };

// Dense text layout: a header line "n T", then T blocks of n rows with n
// space-separated 0/1 tokens each. Blank lines and lines starting with '#'
// are ignored.
//
// Edge-list layout: lines "t i j" with 1-based indices, symmetrised on load.
// An optional leading "n T" header fixes the dimensions; otherwise they are
// the largest node and time index seen.
std::vector<AdjacencySnapshot> read_snapshots(std::istream& in,
                                              SnapshotFormat format = SnapshotFormat::dense);
std::vector<AdjacencySnapshot> read_snapshot_file(const std::string& path,
                                                  SnapshotFormat format = SnapshotFormat::dense);

void write_snapshots(std::ostream& out, const std::vector<AdjacencySnapshot>& snapshots);
void write_snapshot_file(const std::string& path,
                         const std::vector<AdjacencySnapshot>& snapshots);

}  // namespace netcpd
