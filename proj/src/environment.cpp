#include "geonarrow/environment.hpp"

namespace geonarrow {

namespace {
constexpr std::uint32_t kNoiseStream = 0;
}

BatchedEnvironment::BatchedEnvironment(InstanceD instance, NoiseSpec noise, long long horizon,
                                       std::uint64_t seed, bool record_pulls)
    : instance_(std::move(instance)),
      noise_(NoiseSpec::validated(noise)),
      horizon_(horizon),
      seed_(seed),
      record_pulls_(record_pulls),
      f_star_(instance_.optimum()),
      noise_stream_(seed, kNoiseStream) {
  if (horizon_ < 1) throw std::invalid_argument("BatchedEnvironment: horizon must be positive");
}

void BatchedEnvironment::pull(const PointD& x) {
  if (pulled_ >= horizon_) throw BudgetExhausted();
  if (!instance_.domain.contains(x)) throw std::invalid_argument("pull: arm outside the domain");

  const bool same = have_last_ && last_arm_.size() == x.size() && last_arm_ == x;
  if (!same) {
    last_arm_ = x;
    last_value_ = instance_.eval(x);
    last_gap_ = last_value_ - f_star_;
    have_last_ = true;
  }

  double y = last_value_;
  if (noise_.kind == NoiseKind::gaussian && noise_.std > 0.0) y += noise_.std * noise_stream_.normal();

  if (pending_.arms_.empty() || !same) pending_.arms_.push_back(x);
  pending_.arm_index_.push_back(static_cast<std::uint32_t>(pending_.arms_.size() - 1));
  pending_.values_.push_back(y);

  if (record_pulls_) {
    if (log_.empty() || !same) {
      log_.push_back({x, 1});
    } else {
      ++log_.back().count;
    }
  }

  ++pulled_;
  cum_regret_ += last_gap_;
}

Batch BatchedEnvironment::flush() {
  Batch out = std::move(pending_);
  pending_ = Batch{};
  // a new batch starts a new arm table, so the next pull must re-register
  have_last_ = false;
  if (!out.empty()) comm_points_.push_back(pulled_);
  return out;
}

double replay_regret(const BatchedEnvironment& env) {
  double total = 0.0;
  for (const auto& run : env.pull_log()) {
    const double g = env.audit_gap(run.x);
    for (long long i = 0; i < run.count; ++i) total += g;
  }
  return total;
}

}  // namespace geonarrow
