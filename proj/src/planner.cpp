#include "grasp/planner.hpp"

#include "grasp/kmeans.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace grasp {

void PlannerConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("planner config: ") + what);
  };
  require(t_max >= 0, "t_max must be non-negative");
  require(std::isfinite(w0) && w0 > 0.0, "w0 must be positive");
  require(std::isfinite(w_growth) && w_growth >= 1.0, "w_growth must be >= 1");
  require(std::isfinite(beta) && beta > 0.0, "beta must be positive");
  require(k_clusters >= 1, "k_clusters must be positive");
  require(std::isfinite(standoff) && standoff > 0.0, "standoff must be positive");
  require(e_cls_tol > 0.0, "e_cls_tol must be positive");
  require(collision_margin >= 0.0, "collision_margin must be non-negative");
  require(trust_region.max_rotation > 0.0 && trust_region.max_translation > 0.0,
          "trust region caps must be positive");
  require(jpo.max_iterations >= 0 && jpo.power_iterations >= 1 && jpo.tolerance >= 0.0,
          "invalid JPO solver options");
  require(workers >= 1, "workers must be positive");
}

double penalty_weight(const PlannerConfig& cfg, int t) { return cfg.w0 * std::pow(cfg.w_growth, t); }

void SamplerState::record(std::size_t cluster, bool success) {
  ++trials.at(cluster);
  if (success) ++successes[cluster];
}

SamplerState init_sampler(const SurfacePointCloud& object, std::size_t k, std::uint64_t seed) {
  const KMeansResult km = kmeans_cluster(object.points(), k, seed);
  SamplerState s;
  s.centers = km.centers;
  std::vector<Vec3> sums(k, Vec3::Zero());
  for (std::size_t i = 0; i < object.size(); ++i) sums[static_cast<std::size_t>(km.labels[i])] += object.normal(i);
  for (std::size_t c = 0; c < k; ++c) {
    Vec3 n = sums[c];
    if (n.norm() < 1e-12) n = s.centers[c] - object.center_of_mass();
    if (n.norm() < 1e-12) n = Vec3::UnitZ();
    s.normals.push_back(n.normalized());
  }
  s.trials.assign(k, 0);
  s.successes.assign(k, 0);
  return s;
}

std::size_t draw_cluster(const SamplerState& sampler, Rng& rng) {
  std::vector<double> weights(sampler.size());
  double total = 0.0;
  for (std::size_t c = 0; c < sampler.size(); ++c) {
    weights[c] = (static_cast<double>(sampler.successes[c]) + 1.0) /
                 (static_cast<double>(sampler.trials[c]) + 2.0);
    total += weights[c];
  }
  const double target = uniform01(rng) * total;
  double acc = 0.0;
  for (std::size_t c = 0; c < sampler.size(); ++c) {
    acc += weights[c];
    if (target < acc) return c;
  }
  return sampler.size() - 1;
}

InitialDraw draw_initial_state(const SamplerState& sampler, const HandModel& model, Rng& rng,
                               double standoff) {
  if (sampler.size() == 0) throw std::invalid_argument("sampler has no clusters");
  InitialDraw draw;
  draw.cluster = draw_cluster(sampler, rng);
  const Vec3& n = sampler.normals[draw.cluster];
  const double roll = 2.0 * std::numbers::pi * uniform01(rng);
  const Vec3 x0 = n.unitOrthogonal();
  const Vec3 y0 = n.cross(x0);
  const Vec3 x = std::cos(roll) * x0 + std::sin(roll) * y0;
  Mat3 r;
  r.col(0) = x;
  r.col(1) = n.cross(x);
  r.col(2) = n;
  draw.state = HandState(model, RigidTransform(r, sampler.centers[draw.cluster] + standoff * n),
                         model.q_open());
  return draw;
}

namespace {

struct Snapshot {
  PosedHand posed;
  ContactSet contacts;
  CollisionSet collisions;
};

// While optimizing, the ground plane is raised by the margin like the link
// boxes are grown; the final check uses the true plane z = 0.
Snapshot observe(const HandState& state, const ObjectSurface& object, const HandModel& model,
                 const PlannerConfig& cfg, bool final_check) {
  Snapshot s;
  s.posed = forward_kinematics(model, state);
  s.contacts = assign_contacts(s.posed, object);
  s.collisions = detect_collisions(s.posed, object.cloud(), cfg.collision_margin,
                                   final_check ? 0.0 : cfg.collision_margin);
  return s;
}

}  // namespace

GraspResult iterative_ppo_jpo(const HandState& init, const ObjectSurface& object,
                              const HandModel& model, const PlannerConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const Vec3& p_com = object.cloud().center_of_mass();
  GraspResult res;
  res.initial_state = init;
  HandState state = init;
  res.trace.reserve(static_cast<std::size_t>(cfg.t_max) + 1);

  try {
    for (int t = 0; t <= cfg.t_max; ++t) {
      const double w = penalty_weight(cfg, t);
      Snapshot s = observe(state, object, model, cfg, false);
      const QualityReport q = evaluate_quality(s.contacts, s.posed, state, model, p_com, cfg.beta);
      res.trace.push_back({t, w, q.e_quality(), eval_e_col(s.collisions), q.e_cls});

      const PpoSystem ppo = build_ppo_system(s.contacts, s.collisions, p_com, q.n_perp, w, cfg.beta);
      state = apply_palm_update(model, state, solve_ppo(ppo, cfg.trust_region));

      s = observe(state, object, model, cfg, false);
      const UnitVec3 n_perp = polygon_normal(s.contacts.fingertips(), s.posed.approach_axis());
      const JpoSystem jpo = build_jpo_system(s.contacts, s.collisions, s.posed, state, model, p_com,
                                             n_perp, w, cfg.beta);
      state = apply_joint_update(model, state, solve_box_ls(jpo, cfg.jpo));
    }
  } catch (const std::exception& e) {
    res.error = e.what();
  }

  res.final_state = state;
  const Snapshot s = observe(state, object, model, cfg, true);
  res.contacts = s.contacts;
  res.e_col = eval_e_col(s.collisions);
  res.object_pairs = s.collisions.object_pairs.size();
  res.ground_pairs = s.collisions.ground_pairs.size();
  res.collision_free = s.collisions.empty();
  try {
    res.quality = evaluate_quality(s.contacts, s.posed, state, model, p_com, cfg.beta);
  } catch (const std::exception& e) {
    res.quality.q_jc = eval_q_jc(state, model);
    res.quality.q_align = eval_q_align(s.contacts, cfg.beta);
    res.quality.e_cls = eval_e_cls(s.contacts);
    if (res.error.empty()) res.error = e.what();
  }
  res.accepted = res.error.empty() && res.collision_free && res.quality.e_cls <= cfg.e_cls_tol &&
                 !s.contacts.any_fallback();
  res.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

std::vector<GraspResult> plan(const ObjectSurface& object, const HandModel& model,
                              const PlannerConfig& cfg) {
  cfg.validate();
  std::vector<GraspResult> results;
  if (cfg.n_samples == 0) return results;
  SamplerState sampler = init_sampler(object.cloud(), cfg.k_clusters, cfg.seed);
  Rng rng(cfg.seed);
  results.reserve(cfg.n_samples);

  for (std::size_t begin = 0; begin < cfg.n_samples; begin += cfg.workers) {
    const std::size_t count = std::min(cfg.workers, cfg.n_samples - begin);
    std::vector<InitialDraw> draws;
    for (std::size_t i = 0; i < count; ++i) {
      draws.push_back(draw_initial_state(sampler, model, rng, cfg.standoff));
    }
    std::vector<GraspResult> batch(count);
    auto run = [&](std::size_t i) {
      batch[i] = iterative_ppo_jpo(draws[i].state, object, model, cfg);
      batch[i].sample_index = begin + i;
      batch[i].cluster = draws[i].cluster;
    };
    if (count == 1) {
      run(0);
    } else {
      std::vector<std::thread> threads;
      std::vector<std::exception_ptr> errors(count);
      for (std::size_t i = 0; i < count; ++i) {
        threads.emplace_back([&, i] {
          try {
            run(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        });
      }
      for (auto& th : threads) th.join();
      for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }
    }
    for (auto& r : batch) {
      sampler.record(r.cluster, r.accepted);
      results.push_back(std::move(r));
    }
  }

  auto key = [](const GraspResult& r) {
    const double e = r.e_quality();
    return std::isfinite(e) ? e : std::numeric_limits<double>::infinity();
  };
  std::stable_sort(results.begin(), results.end(),
                   [&](const GraspResult& a, const GraspResult& b) { return key(a) < key(b); });
  return results;
}

}  // namespace grasp
