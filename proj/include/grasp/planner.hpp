#pragma once

#include "grasp/collision.hpp"
#include "grasp/contact_quality.hpp"
#include "grasp/hand_model.hpp"
#include "grasp/jpo.hpp"
#include "grasp/ppo.hpp"
#include "grasp/random.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace grasp {

struct PlannerConfig {
  int t_max = 40;
  double w0 = 1.0;
  double w_growth = 1.1;
  double beta = 0.03;
  std::size_t n_samples = 10;
  std::size_t k_clusters = 10;
  double standoff = 0.10;  // m, palm face above the cluster center
  std::uint64_t seed = 0;
  double e_cls_tol = 1e-4;  // m^2
  double collision_margin = kDefaultCollisionMargin;
  TrustRegion trust_region{};
  BoxLsOptions jpo{};
  std::size_t workers = 1;

  /// Throws std::invalid_argument naming the first bad field.
  void validate() const;
};

/// w(t) = w0 * w_growth^t
double penalty_weight(const PlannerConfig& cfg, int t);

/// State at the start of iteration t, before the PPO step.
struct TraceEntry {
  int t = 0;
  double w = 0.0;
  double e_quality = 0.0;  // -Q_com - Q_jc - Q_align
  double e_col = 0.0;  // with the raised ground plane
  double e_cls = 0.0;

  double e_penalty() const { return e_col + e_cls; }
};

struct GraspResult {
  std::size_t sample_index = 0;
  std::size_t cluster = 0;
  HandState initial_state;
  HandState final_state;
  ContactSet contacts;
  QualityReport quality;
  double e_col = 0.0;
  std::size_t object_pairs = 0;
  std::size_t ground_pairs = 0;
  /// No hand-object or hand-ground pairs at the final state.
  bool collision_free = false;
  /// collision_free, e_cls within tolerance, and no fallback contact normal.
  bool accepted = false;
  /// Set when a solver or geometry error aborted the run; the other fields
  /// then describe the last valid state.
  std::string error;
  std::vector<TraceEntry> trace;
  double wall_time_s = 0.0;

  double e_quality() const { return quality.e_quality(); }
  double e_penalty() const { return e_col + quality.e_cls; }
};

struct SamplerState {
  std::vector<Vec3> centers;
  std::vector<UnitVec3> normals;  // outward
  std::vector<std::size_t> trials;
  std::vector<std::size_t> successes;

  std::size_t size() const { return centers.size(); }
  void record(std::size_t cluster, bool success);
};

SamplerState init_sampler(const SurfacePointCloud& object, std::size_t k, std::uint64_t seed);

/// Cluster index drawn with probability proportional to (successes + 1) / (trials + 2).
std::size_t draw_cluster(const SamplerState& sampler, Rng& rng);

struct InitialDraw {
  std::size_t cluster = 0;
  HandState state;
};

/// Palm face at center + standoff * normal, approach axis -normal, roll
/// uniform in [0, 2 pi), joints at the model's open pose.
InitialDraw draw_initial_state(const SamplerState& sampler, const HandModel& model, Rng& rng,
                               double standoff);

/// One run of the alternating palm/joint optimization from `init`. While
/// iterating, ground pairs use the plane z = collision_margin, mirroring the
/// grown link boxes; the final check uses z = 0.
GraspResult iterative_ppo_jpo(const HandState& init, const ObjectSurface& object,
                              const HandModel& model, const PlannerConfig& cfg);

/// Runs cfg.n_samples guided samples, cfg.workers at a time, and returns the
/// results sorted by final E_quality (stable, ascending).
std::vector<GraspResult> plan(const ObjectSurface& object, const HandModel& model,
                              const PlannerConfig& cfg);

}  // namespace grasp
