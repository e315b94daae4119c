#pragma once

#include <array>

#include "sitesim/coordination.hpp"
#include "sitesim/trajectory.hpp"
#include "sitesim/world.hpp"

namespace sitesim {

struct LossWeights {
  double lambda_ca = 100.0;
  double lambda_saw = 8.0;
  double lambda_token = 4.0;
  double lambda_done = 2.0;
};

// Per-slot end-of-leg token probabilities and binary labels over the fixed
// trajectory capacity. Probabilities are clamped away from {0, 1}.
struct TokenPrediction {
  static constexpr double kEps = 1e-7;

  std::array<double, kTrajectoryCapacity> probability{};
  std::array<uint8_t, kTrajectoryCapacity> label{};

  void clamp();
};

/// (1/K) * sqrt(sum_k ||y_k - y_hat_k||^2) over (x, y, t) triples; the root
/// encloses the whole sum and 1/K sits outside it (not an RMSE). Throws
/// LengthMismatch unless both trajectories have the same K >= 1.
double l2_loss(const TimedTrajectory& y, const TimedTrajectory& y_hat);

/// l2_loss of a predicted leg against its stop-and-wait modified version;
/// the (x, y) sequence is shared, so only timestamp shifts contribute.
double saw_loss(const TimedTrajectory& predicted, const TimedTrajectory& modified);

/// 1 if the pair of trajectories conflicts anywhere in time, else 0.
double ca_loss(const TimedTrajectory& traj_a, const TimedTrajectory& traj_b,
               const AgentSpecs& specs, const SawParams& params);

/// Mean binary cross-entropy over the capacity slots.
double token_loss(const TokenPrediction& pred);

/// 1 if sand residue above `threshold` remains at episode end, else 0.
double done_loss(const SiteState& final_state, double threshold = 0.03);

struct LossComponents {
  double ca = 0.0;
  double saw = 0.0;
  double token = 0.0;
  double done = 0.0;
};

/// lambda_CA*L_CA + lambda_SAW*L_SAW + lambda_token*L_token + lambda_done*L_done.
double combined_loss(const LossComponents& components, const LossWeights& weights);

}  // namespace sitesim
