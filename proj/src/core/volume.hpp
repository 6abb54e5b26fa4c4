#ifndef PERMSIM_CORE_VOLUME_HPP
#define PERMSIM_CORE_VOLUME_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <json.hpp>
#include <vector>

#include "core/adjacency.hpp"

namespace permsim {

// Intersection of half-spaces u^T x >= offset with a centered ball.
// The origin must be strictly interior (offsets negative here).
struct ConvexBody {
  int dim = 0;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>
      normals;              // one constraint per row; may have zero rows
  Eigen::VectorXd offsets;  // same length as rows of normals
  double ball_radius = 0.0;
};

// Constraint test with 1e-12 slack so points on the boundary count as in.
bool membership(const ConvexBody& body, const Eigen::VectorXd& x);

// Radii t_j = 2^(j/N)/n for j = 0..M with M = ceil(N log2(n sqrt(n-1))):
// a geometric ladder from the inscribed 1/n ball to just past sqrt(n-1).
struct RadiusSchedule {
  int n = 0;
  int granularity = 0;  // N
  std::vector<double> radii;
  int phases() const { return static_cast<int>(radii.size()) - 1; }
};

RadiusSchedule radius_schedule(int n, int granularity);

// ceil(400 eps^-2 N ln N), floored at 100 for degenerate granularities.
uint64_t phase_sample_count(double eps, int granularity);

// Approximately uniform points from a hit-and-run chain started at the
// origin; one point per `stride` steps after `burn_in` steps.
std::vector<Eigen::VectorXd> sample_uniform(const ConvexBody& body,
                                            size_t count, size_t burn_in,
                                            size_t stride, uint64_t seed);

struct RatioEstimate {
  uint64_t samples = 0, hits = 0;
  double ratio = 0.0;       // vol(outer) / vol(inner)
  double rel_stderr = 0.0;  // binomial, relative to the ratio
  double t_inner = 0.0, t_outer = 0.0;
};

// Fraction-of-hits estimate from explicit outer-body samples; the inner
// body shares the constraints and shrinks the ball. Zero hits signal
// under-sampling and yield ratio = 0.
RatioEstimate estimate_ratio(const ConvexBody& outer, double inner_radius,
                             const std::vector<Eigen::VectorXd>& points);

struct VolumePhase {
  int index = 0;  // schedule position j, counting from 1
  double t_inner = 0.0, t_outer = 0.0;
  RatioEstimate estimate;               // combined over segments
  std::vector<RatioEstimate> segments;  // more than one after subdivision
  double log_volume = 0.0;              // cumulative at t_outer
};

struct SamplerParams {
  double eps = 0.1;
  uint64_t seed = 0;
  uint64_t samples = 0;  // per phase; 0 derives the count from eps
  int chains = 4;        // fixed logical chains, merged by index
  int threads = 1;
};

struct VolumeProfile {
  int dim = 0, n = 0, granularity = 0;
  double eps = 0.0;
  uint64_t seed = 0;
  uint64_t samples_per_phase = 0;
  double log_anchor = 0.0;  // exact ball volume at t_0
  std::vector<VolumePhase> phases;
  uint64_t steps = 0;
  uint64_t membership_checks = 0;
  double log_volume() const {
    return phases.empty() ? log_anchor : phases.back().log_volume;
  }
};

// One phase of the ladder: sample the outer body, count the points that
// also lie in the inner ball. A phase with zero hits is split at the
// geometric-mean radius and the halves are combined.
VolumePhase estimate_phase(const ConvexBody& constraints, int index,
                           double t_inner, double t_outer, uint64_t samples,
                           int chains, int threads, uint64_t seed,
                           uint64_t* steps = nullptr,
                           uint64_t* checks = nullptr);

// Full multiphase run over the schedule, anchored at the closed-form
// volume of the inscribed ball.
VolumeProfile volume_profile(const ConvexBody& constraints,
                             const RadiusSchedule& schedule,
                             const SamplerParams& params);

double log_ball_volume(int dim, double radius);

nlohmann::ordered_json profile_to_json(const VolumeProfile& profile);

}  // namespace permsim

#endif
