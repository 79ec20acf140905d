#include "coopsim/pricing.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace coopsim {

double subgradient_step(double lambda, double step, double sum_x, double target) {
  double next = lambda + step * (sum_x - target);
  return next > 0.0 ? next : 0.0;
}

std::vector<double> normalize_allocations(const std::vector<double>& x) {
  double total = 0.0;
  for (double v : x) {
    if (v < 0) throw std::invalid_argument("allocations must be nonnegative");
    total += v;
  }
  if (total <= 1.0) return x;
  std::vector<double> out;
  out.reserve(x.size());
  for (double v : x) out.push_back(v / total);
  return out;
}

PriceResult optimize_price(const std::vector<PricedUser>& users,
                           const PriceConfig& cfg) {
  if (users.empty()) throw std::invalid_argument("no users to price");
  for (const PricedUser& u : users)
    if (!u.mdp) throw std::invalid_argument("user without a traffic chain");

  double share = 1.0 / static_cast<double>(users.size());
  double target = 1.0 / (1.0 - cfg.alpha);

  PriceResult res;
  double lambda = cfg.lambda0;
  double best_gap = std::numeric_limits<double>::infinity();
  double best_lambda = lambda;
  int still = 0;

  std::vector<std::vector<std::vector<double>>> warm(users.size());
  auto demand = [&](double price) {
    double sum_x = 0.0;
    for (std::size_t i = 0; i < users.size(); ++i) {
      const PricedUser& u = users[i];
      ValueIterationResult vi = value_iteration(
          *u.mdp, u.rates, price, cfg.alpha, share, cfg.vi_tol, cfg.vi_max_iter,
          warm[i].empty() ? nullptr : &warm[i]);
      warm[i] = vi.value;
      sum_x += expected_resource(*u.mdp, u.rates, vi.policy, u.initial, cfg.alpha);
    }
    return sum_x;
  };

  for (int k = 1; k <= cfg.max_iter; ++k) {
    double sum_x = demand(lambda);
    res.history.push_back({lambda, sum_x});
    double gap = std::fabs(sum_x - target);
    if (gap < best_gap) {
      best_gap = gap;
      best_lambda = lambda;
    }
    if (gap < cfg.tol) {
      res.converged = true;
      best_lambda = lambda;
      break;
    }
    double next = subgradient_step(lambda, cfg.mu0 / k, sum_x, target);
    if (std::fabs(next - lambda) < cfg.stall_tol) {
      if (++still >= cfg.stall_window) {
        // the price stopped moving (typically pinned at zero by slack
        // capacity): treat it as settled
        res.converged = true;
        best_lambda = lambda;
        break;
      }
    } else {
      still = 0;
    }
    lambda = next;
  }

  res.lambda_star = best_lambda;
  res.final_sum_x = 0.0;
  for (std::size_t i = 0; i < users.size(); ++i) {
    const PricedUser& u = users[i];
    ValueIterationResult vi = value_iteration(
        *u.mdp, u.rates, best_lambda, cfg.alpha, share, cfg.vi_tol,
        cfg.vi_max_iter, warm[i].empty() ? nullptr : &warm[i]);
    res.final_sum_x +=
        expected_resource(*u.mdp, u.rates, vi.policy, u.initial, cfg.alpha);
    res.solutions.push_back(std::move(vi));
  }
  return res;
}

}  // namespace coopsim
