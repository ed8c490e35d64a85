#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "carpetperc/lattice.hpp"
#include "carpetperc/percolation.hpp"

namespace carpetperc {

/// Sponge window G_n(cols, rows) over a generator set.
struct GeometrySpec {
  std::string generator = "carpet3";
  int n = 1;
  int cols = 1;
  int rows = 1;

  GeneratorSet generators() const { return GeneratorSet::parse(generator); }
  SpongeGraph build(const Limits& limits = Limits::from_env()) const;
  std::string describe() const;
};

/// Named events evaluated on a whole window:
///   lr, ud               open crossing
///   dual-lr, dual-ud     closed dual crossing
///   below-hole           open LR crossing of the bottom strip of height L^(n-1)
///   circuit              open circuit around the central hole (cols = rows = 1)
///   delta                Delta_n at the window origin
///   e                    E_n at the window origin
///   theta                origin joined to {x = L^n} or {y = L^n}
struct EventSpec {
  std::string id = "lr";

  static const std::vector<std::string>& known();
  bool increasing() const;
};

/// Per-window compiled indicator; safe to call from several threads.
using Indicator = std::function<bool(const BondConfiguration&)>;
Indicator compile_event(const EventSpec& e, const GeometrySpec& geo, const SpongeGraph& g);

struct Estimate {
  std::string event;
  GeometrySpec geometry;
  double p = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t successes = 0;
  double mean = 0.0;
  double stderr_ = 0.0;
  double normal_lo = 0.0, normal_hi = 0.0;
  double wilson_lo = 0.0, wilson_hi = 0.0;
  std::uint64_t seed = 0;

  /// Reported interval: normal approximation, Wilson when fewer than five successes or failures.
  double ci_lo() const;
  double ci_hi() const;
};

Estimate make_estimate(std::string event, GeometrySpec geo, double p, std::uint64_t samples,
                       std::uint64_t successes, std::uint64_t seed);

struct RunOptions {
  int workers = 1;
  Limits limits = Limits::from_env();
};

/// Sum of f(replica) over replicas [0, count), split across workers; the result does not depend
/// on the worker count.
std::uint64_t parallel_sum(std::uint64_t count, int workers, const std::function<std::uint64_t(std::uint64_t)>& f);

/// Reusable sampler for one window: uniforms keyed by (seed, replica), thresholded at p.
class Sampler {
 public:
  explicit Sampler(const SpongeGraph& g);
  BondConfiguration config(double p, std::uint64_t seed, std::uint64_t replica,
                           StreamTag tag = StreamTag::Primal) const;
  std::vector<double> uniforms(std::uint64_t seed, std::uint64_t replica, StreamTag tag = StreamTag::Primal) const;
  const SpongeGraph& graph() const { return *g_; }

 private:
  const SpongeGraph* g_;
  std::vector<std::uint64_t> prehash_;
};

Estimate estimate(const EventSpec& e, const GeometrySpec& geo, double p, std::uint64_t samples, std::uint64_t seed,
                  const RunOptions& opt = {});
/// Same on a prebuilt window.
Estimate estimate_on(const Indicator& event, const std::string& id, const SpongeGraph& g, const GeometrySpec& geo,
                     double p, std::uint64_t samples, std::uint64_t seed, const RunOptions& opt = {});

struct SweepRow {
  int n = 0;
  int cols = 0;
  int rows = 0;
  double p = 0.0;
  Estimate est;
};

/// Grid over n-list x p-grid, sorted by (n, p). Coupled sweeps reuse one seed so each replica
/// sees the same uniforms at every p; uncoupled sweeps derive a seed per grid point.
std::vector<SweepRow> sweep(const EventSpec& e, const std::vector<double>& ps, const std::vector<int>& ns, int cols,
                            int rows, const std::string& generator, std::uint64_t samples, std::uint64_t seed,
                            bool coupled = true, const RunOptions& opt = {});

Estimate estimate_theta(double p, int n, std::uint64_t samples, std::uint64_t seed, const RunOptions& opt = {},
                        const std::string& generator = "carpet3");

struct TauEstimate {
  Estimate est;
  Rect window;
};
/// P[x <-> y] inside the S^T window [-L^(k+1), L^(k+1)]^2, k the least level with both points in
/// [-L^k, L^k]^2.
TauEstimate estimate_tau(double p, const Point& x, const Point& y, std::uint64_t samples, std::uint64_t seed,
                         const RunOptions& opt = {}, const std::string& generator = "carpet3");

/// Per replica, the least p at which the window has an open crossing (union-find over edges in
/// increasing uniform order).
std::vector<double> crossing_thresholds(const SpongeGraph& g, Direction d, std::uint64_t samples, std::uint64_t seed,
                                        const RunOptions& opt = {});
/// Per replica, the least q at which a dual crossing occurs when each primal edge is closed with
/// probability q; drawn from the dual stream.
std::vector<double> dual_crossing_thresholds(const SpongeGraph& g, Direction d, std::uint64_t samples,
                                             std::uint64_t seed, const RunOptions& opt = {});

struct PcEstimate {
  double p_hat = 0.0;
  double lo = 0.0, hi = 1.0;
  int iterations = 0;
  Estimate at_p_hat;
};

/// Bisection for P[A_n(cols, rows)] = 1/2 on coupled replicas. Saturation error when the curve
/// does not straddle 1/2 on [0,1].
PcEstimate estimate_pc(int n, int cols, int rows, std::uint64_t samples, double tol, std::uint64_t seed,
                       const RunOptions& opt = {}, const std::string& generator = "carpet3");
/// 1 - q* where q* solves P[closed dual LR crossing at closing probability q] = 1/2.
PcEstimate estimate_pc_dual(int n, int cols, int rows, std::uint64_t samples, double tol, std::uint64_t seed,
                            const RunOptions& opt = {}, const std::string& generator = "carpet3");
PcEstimate pc_from_thresholds(const std::vector<double>& thresholds, double tol);

struct RussoReport {
  double p = 0.0, h = 0.0;
  std::uint64_t samples = 0;
  double derivative = 0.0, derivative_se = 0.0;
  double pivotal_mean = 0.0, pivotal_se = 0.0;
  double pooled_se = 0.0;
  bool pass = false;
};

/// Central difference of P_p[A] on coupled replicas against the mean pivotal count at p.
RussoReport russo_check(const EventSpec& e, const GeometrySpec& geo, double p, double h, std::uint64_t samples,
                        std::uint64_t seed, const RunOptions& opt = {});

struct MeanEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::uint64_t accepted = 0;
  std::uint64_t attempts = 0;
};

/// E[N_A | A] by rejection: replicas are drawn until `samples` satisfy A or `budget` attempts are
/// spent. Starvation error when none is accepted.
MeanEstimate conditional_pivotal(const EventSpec& e, const GeometrySpec& geo, double p, std::uint64_t samples,
                                 std::uint64_t budget, std::uint64_t seed, const RunOptions& opt = {});

const char* estimate_csv_header();
std::string to_csv_row(const Estimate& e);

}  // namespace carpetperc
