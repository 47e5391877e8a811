#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "netcpd/graph_core.hpp"
#include "netcpd/snapshot_io.hpp"

namespace netcpd {

enum class ScenarioKind {
  sbm3,    // 3-block SBM, communities swap connection pattern
  sbm5,    // 5-block SBM, level shift 0.9/0.2 -> 0.5/0.1
  dcbm,    // degree-corrected 3-block model, 0.9/0.1 -> 0.95/0.15
  rdpg,    // random dot product graph, first quarter of latent positions redrawn
  custom,  // user-supplied before/after graphons
};

std::string to_string(ScenarioKind k);
/// Accepts "1".."4" or the enum names.
ScenarioKind parse_scenario_kind(const std::string& s);

struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::sbm3;
  int n = 100;
  std::optional<int> delta = 150;  // raw change index; empty = no change
  int horizon = 300;
  std::uint64_t seed = 1;
  std::optional<GraphonMatrix> custom_before;
  std::optional<GraphonMatrix> custom_after;

  void validate() const;
};

/// Latent positions of the random dot product scenario (n x 5 each).
struct LatentPositions {
  Matrix x;
  Matrix x_tilde;
};

/// Community label (0-based) of every node for the block scenarios: 3 blocks
/// of floor(n/3), floor(n/3), n - 2 floor(n/3); 5 blocks of floor(n/5) with the
/// remainder in the last block.
std::vector<int> community_labels(int n, int blocks);

/// Materialised scenario: both graphons and, for rdpg, the latent positions
/// drawn once from spec.seed and then shared by every stream.
class Scenario {
 public:
  explicit Scenario(ScenarioSpec spec);

  const ScenarioSpec& spec() const { return spec_; }
  int n() const { return spec_.n; }
  int horizon() const { return spec_.horizon; }
  std::optional<int> delta() const { return spec_.delta; }

  /// Mean matrix at raw time t in [1, horizon].
  const GraphonMatrix& graphon_at(int t) const;
  const GraphonMatrix& before() const { return truth_.theta_before; }
  const GraphonMatrix& after() const { return truth_.theta_after; }
  const ChangeScenario& truth() const { return truth_; }
  const std::optional<LatentPositions>& latent() const { return latent_; }

  /// The pre-change law with no change point, over `horizon` snapshots.
  Scenario null_law(int horizon) const;

 private:
  ScenarioSpec spec_;
  std::optional<LatentPositions> latent_;
  ChangeScenario truth_;
};

GraphonMatrix graphon_of(const ScenarioSpec& spec, int t);

/// Independent seed for replicate `index` of a run keyed by `base`.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

/// Samples a stream of the scenario: independent Bernoulli upper-triangle
/// entries, mirrored, zero diagonal. Same seed gives a bit-identical stream.
class StreamSampler final : public SnapshotSource {
 public:
  StreamSampler(std::shared_ptr<const Scenario> scenario, std::uint64_t seed);

  std::optional<AdjacencySnapshot> next() override;

  const Scenario& scenario() const { return *scenario_; }

 private:
  std::shared_ptr<const Scenario> scenario_;
  std::mt19937_64 rng_;
  int t_ = 0;
};

/// Sampler seeded from spec.seed together with the ground truth.
std::pair<StreamSampler, ChangeScenario> sample_stream(const ScenarioSpec& spec);

std::vector<AdjacencySnapshot> collect(SnapshotSource& source, int max_count = -1);

}  // namespace netcpd
