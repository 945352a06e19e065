#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "geonarrow/instances.hpp"
#include "geonarrow/rng.hpp"

namespace geonarrow {

class BudgetExhausted : public std::runtime_error {
 public:
  BudgetExhausted() : std::runtime_error("horizon exhausted: no pulls remain") {}
};

struct ObservationView {
  const PointD& x;
  double y;
};

/// Observations released at one communication point. Arms are stored once
/// per run of consecutive identical pulls; `arm_of(i)` maps observation i to
/// its arm.
class Batch {
 public:
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  ObservationView operator[](std::size_t i) const { return {arms_[arm_index_[i]], values_[i]}; }
  std::size_t arm_of(std::size_t i) const { return arm_index_[i]; }
  const std::vector<PointD>& arms() const { return arms_; }
  const std::vector<double>& values() const { return values_; }

 private:
  friend class BatchedEnvironment;
  std::vector<PointD> arms_;
  std::vector<std::uint32_t> arm_index_;
  std::vector<double> values_;
};

/// Run-length record of every pull, kept only when requested.
struct PullRun {
  PointD x;
  long long count;
};

/// Batched stochastic bandit oracle. Losses are drawn at pull time and held
/// back until flush(); there is no accessor for the pending buffer.
class BatchedEnvironment {
 public:
  BatchedEnvironment(InstanceD instance, NoiseSpec noise, long long horizon, std::uint64_t seed,
                     bool record_pulls = false);

  void pull(const PointD& x);
  Batch flush();

  long long remaining_budget() const { return horizon_ - pulled_; }
  long long pulled() const { return pulled_; }
  long long horizon() const { return horizon_; }
  std::uint64_t seed() const { return seed_; }
  const DomainD& domain() const { return instance_.domain; }
  const NoiseSpec& noise() const { return noise_; }

  double cumulative_regret() const { return cum_regret_; }
  const std::vector<long long>& communication_points() const { return comm_points_; }
  const std::vector<PullRun>& pull_log() const { return log_; }

  // Ground-truth accessors for record keeping and diagnostics. Policies
  // must not base decisions on these.
  double audit_value(const PointD& x) const { return instance_.eval(x); }
  double audit_gap(const PointD& x) const { return instance_.eval(x) - f_star_; }
  const PointD& audit_minimizer() const { return instance_.minimizer; }
  const InstanceD& audit_instance() const { return instance_; }

 private:
  InstanceD instance_;
  NoiseSpec noise_;
  long long horizon_;
  std::uint64_t seed_;
  bool record_pulls_;
  double f_star_;
  RandomStream noise_stream_;

  long long pulled_ = 0;
  double cum_regret_ = 0.0;
  std::vector<long long> comm_points_;
  std::vector<PullRun> log_;

  Batch pending_;
  // cache of the last distinct arm so repeated pulls evaluate f once
  PointD last_arm_;
  double last_value_ = 0.0;
  double last_gap_ = 0.0;
  bool have_last_ = false;
};

/// Offline replay of the pull log: sum of noiseless gaps in pull order.
double replay_regret(const BatchedEnvironment& env);

}  // namespace geonarrow
