#include "sitesim/losses.hpp"

#include <algorithm>
#include <cmath>

#include "sitesim/errors.hpp"

namespace sitesim {

void TokenPrediction::clamp() {
  for (double& p : probability) p = std::clamp(p, kEps, 1.0 - kEps);
}

double l2_loss(const TimedTrajectory& y, const TimedTrajectory& y_hat) {
  if (y.size() != y_hat.size())
    throw LengthMismatch("l2_loss requires equal trajectory lengths");
  if (y.empty()) throw LengthMismatch("l2_loss requires at least one waypoint");

  double sum = 0.0;
  for (size_t k = 0; k < y.size(); ++k) {
    const double dx = static_cast<double>(y[k].x) - y_hat[k].x;
    const double dy = static_cast<double>(y[k].y) - y_hat[k].y;
    const double dt = static_cast<double>(y[k].t) - y_hat[k].t;
    sum += dx * dx + dy * dy + dt * dt;
  }
  return std::sqrt(sum) / static_cast<double>(y.size());
}

double saw_loss(const TimedTrajectory& predicted, const TimedTrajectory& modified) {
  return l2_loss(predicted, modified);
}

double ca_loss(const TimedTrajectory& traj_a, const TimedTrajectory& traj_b,
               const AgentSpecs& specs, const SawParams& params) {
  return detect_conflict(traj_a, traj_b, specs, params).conflict ? 1.0 : 0.0;
}

double token_loss(const TokenPrediction& pred) {
  double sum = 0.0;
  for (size_t i = 0; i < kTrajectoryCapacity; ++i) {
    const double p = std::clamp(pred.probability[i], TokenPrediction::kEps,
                                1.0 - TokenPrediction::kEps);
    sum += pred.label[i] ? -std::log(p) : -std::log(1.0 - p);
  }
  return sum / static_cast<double>(kTrajectoryCapacity);
}

double done_loss(const SiteState& final_state, double threshold) {
  return uncleared_fraction(final_state, final_state.total_dumped) > threshold ? 1.0
                                                                               : 0.0;
}

double combined_loss(const LossComponents& c, const LossWeights& w) {
  return w.lambda_ca * c.ca + w.lambda_saw * c.saw + w.lambda_token * c.token +
         w.lambda_done * c.done;
}

}  // namespace sitesim
