#pragma once

#include <vector>

#include "coopsim/mdp.hpp"

namespace coopsim {

// Projected subgradient move: max(0, lambda + step * (sum_x - target)).
double subgradient_step(double lambda, double step, double sum_x, double target);

// Scale a set of per-user airtime shares down onto the unit simplex when
// they oversubscribe the slot; under-use is left alone.
std::vector<double> normalize_allocations(const std::vector<double>& x);

// One user as seen by the price loop.
struct PricedUser {
  const FiniteTrafficMdp* mdp = nullptr;
  RateModel rates;
  int initial = 0;
};

struct PriceConfig {
  double alpha = 0.9;
  double mu0 = 0.5;         // step size mu0 / k
  double lambda0 = 0.0;
  int max_iter = 60;
  double tol = 1e-3;        // stop when |sum_x - target| drops below
  double stall_tol = 1e-7;  // lambda updates this small count as no movement
  int stall_window = 5;
  double vi_tol = 1e-9;
  int vi_max_iter = 20000;
};

struct PriceHistoryEntry {
  double lambda = 0.0;
  double sum_x = 0.0;
};

struct PriceResult {
  double lambda_star = 0.0;
  bool converged = false;
  double final_sum_x = 0.0;
  std::vector<PriceHistoryEntry> history;
  std::vector<ValueIterationResult> solutions;  // per user, at lambda_star
};

/// Uniform-price dual ascent: every user best-responds to the current price,
// the price follows the aggregate demand subgradient with diminishing steps,
// and the demand target is the discounted airtime of one fully used slot,
// 1 / (1 - alpha). Stops on a met target or on a price that no longer moves
// (including the pinned-at-zero case); otherwise reports the best price seen
// with converged = false.
PriceResult optimize_price(const std::vector<PricedUser>& users,
                           const PriceConfig& cfg);

}  // namespace coopsim
