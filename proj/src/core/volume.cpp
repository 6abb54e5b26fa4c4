#include "core/volume.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include "core/rng.hpp"

namespace permsim {

bool membership(const ConvexBody& body, const Eigen::VectorXd& x) {
  if (x.size() != body.dim)
    throw std::invalid_argument("point dimension does not match the body");
  if (x.squaredNorm() > body.ball_radius * body.ball_radius * (1.0 + 2e-12))
    return false;
  for (int r = 0; r < body.normals.rows(); ++r)
    if (body.normals.row(r).dot(x) < body.offsets(r) - 1e-12) return false;
  return true;
}

RadiusSchedule radius_schedule(int n, int granularity) {
  if (n < 2) throw std::invalid_argument("schedule needs order at least 2");
  if (granularity < 1)
    throw std::invalid_argument("schedule granularity must be positive");
  RadiusSchedule s;
  s.n = n;
  s.granularity = granularity;
  double top = std::log2(n * std::sqrt(static_cast<double>(n - 1)));
  int m = static_cast<int>(std::ceil(granularity * top - 1e-9));
  m = std::max(m, 1);
  s.radii.reserve(m + 1);
  for (int j = 0; j <= m; ++j)
    s.radii.push_back(std::exp2(static_cast<double>(j) / granularity) / n);
  if (s.radii.back() < std::sqrt(static_cast<double>(n - 1)) * (1.0 - 1e-12))
    throw InternalError("schedule does not reach the outer radius");
  return s;
}

uint64_t phase_sample_count(double eps, int granularity) {
  if (eps <= 0.0 || eps >= 1.0)
    throw std::invalid_argument("eps must lie in (0,1)");
  if (granularity < 1)
    throw std::invalid_argument("granularity must be positive");
  long double p = 400.0L / (static_cast<long double>(eps) * eps) *
                  granularity * std::log(static_cast<long double>(granularity));
  auto count = static_cast<uint64_t>(std::ceil(p));
  return std::max<uint64_t>(count, 100);
}

namespace {

// One hit-and-run chain. Chord endpoints come from the sphere and every
// half-space in closed form; cached constraint values make a step cost
// one (rows x dim) product.
struct Chain {
  const ConvexBody* body;
  Eigen::VectorXd x, dir, gvals, cvals;
  double norm2 = 0.0;
  Rng rng;
  uint64_t steps = 0;

  Chain(const ConvexBody& b, uint64_t seed)
      : body(&b),
        x(Eigen::VectorXd::Zero(b.dim)),
        dir(b.dim),
        gvals(b.normals.rows()),
        cvals(Eigen::VectorXd::Zero(b.normals.rows())),
        rng(seed) {}

  void step() {
    const int dim = body->dim;
    const auto rows = body->normals.rows();
    for (int attempt = 0; attempt < 64; ++attempt) {
      double d2 = 0.0;
      for (int i = 0; i < dim; ++i) {
        dir[i] = rng.normal();
        d2 += dir[i] * dir[i];
      }
      if (d2 < 1e-300) continue;
      dir /= std::sqrt(d2);

      double xd = x.dot(dir);
      double disc = body->ball_radius * body->ball_radius - norm2 + xd * xd;
      if (disc <= 0.0) continue;
      double root = std::sqrt(disc);
      double lo = -xd - root, hi = -xd + root;

      if (rows > 0) {
        gvals.noalias() = body->normals * dir;
        const double* g = gvals.data();
        const double* c = cvals.data();
        const double* b = body->offsets.data();
        for (Eigen::Index r = 0; r < rows; ++r) {
          double gr = g[r];
          if (gr > 1e-14) {
            double bound = (b[r] - c[r]) / gr;
            if (bound > lo) lo = bound;
          } else if (gr < -1e-14) {
            double bound = (b[r] - c[r]) / gr;
            if (bound < hi) hi = bound;
          }
        }
      }
      if (!(hi > lo)) continue;  // degenerate chord: draw a new direction

      double s = rng.uniform(lo, hi);
      x += s * dir;
      if (rows > 0) cvals += s * gvals;
      norm2 = x.squaredNorm();
      ++steps;
      if ((steps & 0x1fff) == 0) cvals.noalias() = body->normals * x;
      return;
    }
    throw InternalError("hit-and-run could not find a usable chord");
  }
};

struct ChainCounts {
  uint64_t samples = 0, hits = 0, steps = 0;
};

ChainCounts run_chain(const ConvexBody& body, double t_inner, uint64_t samples,
                      uint64_t burn_in, uint64_t stride, uint64_t seed,
                      std::vector<Eigen::VectorXd>* sink) {
  Chain chain(body, seed);
  for (uint64_t i = 0; i < burn_in; ++i) chain.step();
  ChainCounts out;
  double inner2 = t_inner * t_inner;
  for (uint64_t i = 0; i < samples; ++i) {
    for (uint64_t s = 0; s < stride; ++s) chain.step();
    ++out.samples;
    if (chain.norm2 <= inner2) ++out.hits;
    if (sink) sink->push_back(chain.x);
  }
  out.steps = chain.steps;
  return out;
}

RatioEstimate ratio_from_counts(uint64_t samples, uint64_t hits, double t_inner,
                                double t_outer) {
  RatioEstimate est;
  est.samples = samples;
  est.hits = hits;
  est.t_inner = t_inner;
  est.t_outer = t_outer;
  if (hits > 0) {
    double p = static_cast<double>(hits) / static_cast<double>(samples);
    est.ratio = 1.0 / p;
    est.rel_stderr = std::sqrt((1.0 - p) / static_cast<double>(hits));
  }
  return est;
}

}  // namespace

std::vector<Eigen::VectorXd> sample_uniform(const ConvexBody& body,
                                            size_t count, size_t burn_in,
                                            size_t stride, uint64_t seed) {
  if (body.dim < 1) throw std::invalid_argument("body dimension must be positive");
  std::vector<Eigen::VectorXd> pts;
  pts.reserve(count);
  run_chain(body, -1.0, count, burn_in, std::max<size_t>(stride, 1), seed,
            &pts);
  return pts;
}

RatioEstimate estimate_ratio(const ConvexBody& outer, double inner_radius,
                             const std::vector<Eigen::VectorXd>& points) {
  if (inner_radius > outer.ball_radius * (1.0 + 1e-12))
    throw std::invalid_argument("inner body must lie inside the outer body");
  uint64_t hits = 0;
  double inner2 = inner_radius * inner_radius;
  for (const auto& p : points)
    if (p.squaredNorm() <= inner2) ++hits;
  return ratio_from_counts(points.size(), hits, inner_radius,
                           outer.ball_radius);
}

VolumePhase estimate_phase(const ConvexBody& constraints, int index,
                           double t_inner, double t_outer, uint64_t samples,
                           int chains, int threads, uint64_t seed,
                           uint64_t* steps, uint64_t* checks) {
  if (constraints.dim < 1)
    throw std::invalid_argument("body dimension must be positive");
  chains = std::max(chains, 1);
  ConvexBody outer = constraints;
  outer.ball_radius = t_outer;
  uint64_t burn_in =
      10ull * static_cast<uint64_t>(constraints.dim) * constraints.dim;
  uint64_t stride = static_cast<uint64_t>(constraints.dim);

  std::vector<uint64_t> share(chains, samples / chains);
  for (uint64_t c = 0; c < samples % chains; ++c) ++share[c];

  std::vector<ChainCounts> counts(chains);
  auto work = [&](int c) {
    counts[c] = run_chain(outer, t_inner, share[c], burn_in, stride,
                          mix_seed(seed, c + 1), nullptr);
  };
  if (threads > 1 && chains > 1) {
    std::vector<std::future<void>> futs;
    for (int c = 0; c < chains; ++c)
      futs.push_back(std::async(std::launch::async, work, c));
    for (auto& f : futs) f.get();
  } else {
    for (int c = 0; c < chains; ++c) work(c);
  }

  uint64_t total = 0, hits = 0, step_sum = 0;
  for (const auto& c : counts) {
    total += c.samples;
    hits += c.hits;
    step_sum += c.steps;
  }
  if (steps) *steps += step_sum;
  if (checks) *checks += total;

  VolumePhase phase;
  phase.index = index;
  phase.t_inner = t_inner;
  phase.t_outer = t_outer;

  if (hits == 0) {
    // under-sampled: split at the geometric mean and combine the halves
    double mid = std::sqrt(t_inner * t_outer);
    if (t_outer / t_inner < 1.0 + 1e-9)
      throw InternalError("under-sampled phase could not be subdivided");
    VolumePhase left = estimate_phase(constraints, index, t_inner, mid, samples,
                                      chains, threads, mix_seed(seed, 0x5eed),
                                      steps, checks);
    VolumePhase right = estimate_phase(constraints, index, mid, t_outer,
                                       samples, chains, threads,
                                       mix_seed(seed, 0x5eee), steps, checks);
    phase.segments = left.segments;
    phase.segments.insert(phase.segments.end(), right.segments.begin(),
                          right.segments.end());
    phase.estimate.t_inner = t_inner;
    phase.estimate.t_outer = t_outer;
    phase.estimate.ratio = left.estimate.ratio * right.estimate.ratio;
    phase.estimate.rel_stderr =
        std::sqrt(left.estimate.rel_stderr * left.estimate.rel_stderr +
                  right.estimate.rel_stderr * right.estimate.rel_stderr);
    phase.estimate.samples = left.estimate.samples + right.estimate.samples;
    phase.estimate.hits = left.estimate.hits + right.estimate.hits;
    return phase;
  }

  phase.estimate = ratio_from_counts(total, hits, t_inner, t_outer);
  phase.segments.push_back(phase.estimate);
  return phase;
}

VolumeProfile volume_profile(const ConvexBody& constraints,
                             const RadiusSchedule& schedule,
                             const SamplerParams& params) {
  VolumeProfile profile;
  profile.dim = constraints.dim;
  profile.n = schedule.n;
  profile.granularity = schedule.granularity;
  profile.eps = params.eps;
  profile.seed = params.seed;
  profile.samples_per_phase =
      params.samples ? params.samples
                     : phase_sample_count(params.eps, schedule.granularity);
  profile.log_anchor = log_ball_volume(constraints.dim, schedule.radii.front());

  double log_vol = profile.log_anchor;
  for (int j = 1; j <= schedule.phases(); ++j) {
    VolumePhase phase = estimate_phase(
        constraints, j, schedule.radii[j - 1], schedule.radii[j],
        profile.samples_per_phase, params.chains, params.threads,
        mix_seed(params.seed, j), &profile.steps, &profile.membership_checks);

    // nested bodies scale by at most the ball ratio
    double scale = std::pow(schedule.radii[j] / schedule.radii[j - 1],
                            constraints.dim);
    if (phase.estimate.ratio < 1.0 - 1e-9)
      throw InternalError("phase ratio fell below one");
    if (phase.estimate.ratio >
        scale * (1.0 + 3.0 * phase.estimate.rel_stderr) + 1e-6)
      throw InternalError("phase ratio exceeds the ball-scaling bound");

    log_vol += std::log(phase.estimate.ratio);
    phase.log_volume = log_vol;
    profile.phases.push_back(std::move(phase));
  }
  return profile;
}

double log_ball_volume(int dim, double radius) {
  if (dim < 1) throw std::invalid_argument("dimension must be positive");
  if (radius <= 0.0) throw std::invalid_argument("radius must be positive");
  return 0.5 * dim * std::log(M_PI) - std::lgamma(0.5 * dim + 1.0) +
         dim * std::log(radius);
}

nlohmann::ordered_json profile_to_json(const VolumeProfile& profile) {
  nlohmann::ordered_json j;
  j["dim"] = profile.dim;
  j["n"] = profile.n;
  j["N"] = profile.granularity;
  j["eps"] = profile.eps;
  j["seed"] = profile.seed;
  j["samples_per_phase"] = profile.samples_per_phase;
  j["log_anchor"] = profile.log_anchor;
  j["phases"] = nlohmann::ordered_json::array();
  for (const auto& p : profile.phases) {
    nlohmann::ordered_json pj;
    pj["j"] = p.index;
    pj["t_inner"] = p.t_inner;
    pj["t_outer"] = p.t_outer;
    pj["ratio"] = p.estimate.ratio;
    pj["rel_stderr"] = p.estimate.rel_stderr;
    pj["samples"] = p.estimate.samples;
    pj["hits"] = p.estimate.hits;
    pj["log_volume"] = p.log_volume;
    if (p.segments.size() > 1) {
      pj["segments"] = nlohmann::ordered_json::array();
      for (const auto& s : p.segments) {
        nlohmann::ordered_json sj;
        sj["t_inner"] = s.t_inner;
        sj["t_outer"] = s.t_outer;
        sj["ratio"] = s.ratio;
        sj["rel_stderr"] = s.rel_stderr;
        sj["samples"] = s.samples;
        sj["hits"] = s.hits;
        pj["segments"].push_back(sj);
      }
    }
    j["phases"].push_back(pj);
  }
  j["log_volume"] = profile.log_volume();
  j["steps"] = profile.steps;
  j["membership_checks"] = profile.membership_checks;
  return j;
}

}  // namespace permsim
