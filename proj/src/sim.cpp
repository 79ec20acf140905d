#include "coopsim/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace coopsim {

GopSpec ScenarioConfig::effective_gop() const {
  if (!gop.classes.empty()) return gop;
  return GopSpec::default_ibpb(packets_per_frame);
}

void ScenarioConfig::validate() const {
  phy.validate();
  coop.validate();
  effective_gop().validate();
  if (n_users < 1) throw std::invalid_argument("need at least one user");
  if (n_relays < 0) throw std::invalid_argument("negative relay count");
  if (!(coverage_radius > 0))
    throw std::invalid_argument("coverage radius must be positive");
  if (!(path_loss_exponent > 0))
    throw std::invalid_argument("path loss exponent must be positive");
  if (!user_distances.empty() &&
      user_distances.size() != static_cast<std::size_t>(n_users))
    throw std::invalid_argument("user_distances must list every user");
  for (double d : user_distances)
    if (!(d > 0) || d > coverage_radius)
      throw std::invalid_argument("user distance outside the cell");
  if (slots < 1) throw std::invalid_argument("need at least one slot");
  if (pmf_samples < 1) throw std::invalid_argument("need rate samples");
  if (!(alpha > 0) || !(alpha < 1))
    throw std::invalid_argument("alpha must lie in (0, 1)");
  if (!(mu0 > 0)) throw std::invalid_argument("mu0 must be positive");
  if (fixed_lambda < 0) throw std::invalid_argument("negative price");
  if (price_max_iter < 1 || !(price_tol > 0))
    throw std::invalid_argument("bad price loop settings");
  if (packets_per_frame < 1)
    throw std::invalid_argument("packets_per_frame must be positive");
}

std::array<double, 2> random_disk_point(double radius, Rng& rng) {
  double r = radius * std::sqrt(rng.uniform());
  double theta = 2.0 * M_PI * rng.uniform();
  return {r * std::cos(theta), r * std::sin(theta)};
}

Topology build_topology(const ScenarioConfig& cfg, Rng& rng) {
  Topology topo;
  topo.path_loss_exponent = cfg.path_loss_exponent;
  topo.coverage_radius = cfg.coverage_radius;
  topo.positions.push_back({0.0, 0.0});
  for (int u = 0; u < cfg.n_users; ++u) {
    if (!cfg.user_distances.empty())
      topo.positions.push_back({cfg.user_distances[u], 0.0});
    else
      topo.positions.push_back(random_disk_point(cfg.coverage_radius, rng));
  }
  for (int i = 0; i < cfg.n_relays; ++i)
    topo.positions.push_back(random_disk_point(cfg.coverage_radius, rng));
  return topo;
}

namespace {

// Does some still-served frame depend on frame `i`?
bool has_served_dependent(const GopSpec& spec, const TrafficState& state,
                          const std::vector<int>& delivery, std::size_t i) {
  for (std::size_t j = 0; j < state.frames.size(); ++j) {
    if (j == i || delivery[j] <= 0) continue;
    for (const DependencyEdge& e : spec.deps) {
      if (e.from_class == state.frames[i].frame.cls &&
          e.to_class == state.frames[j].frame.cls &&
          state.frames[i].frame.gop == state.frames[j].frame.gop + e.gop_delta)
        return true;
    }
  }
  return false;
}

}  // namespace

std::vector<int> truncate_delivery(const GopSpec& spec,
                                   const TrafficState& state,
                                   std::vector<int> delivery, int budget) {
  if (delivery.size() != state.frames.size())
    throw std::invalid_argument("delivery does not match the state");
  if (budget < 0) budget = 0;
  int total = std::accumulate(delivery.begin(), delivery.end(), 0);
  while (total > budget) {
    int pick = -1;
    double pick_marginal = 0.0;
    for (std::size_t i = 0; i < delivery.size(); ++i) {
      if (delivery[i] <= 0) continue;
      if (has_served_dependent(spec, state, delivery, i)) continue;
      const FrameClass& fc = spec.classes[state.frames[i].frame.cls];
      double marginal = fc.quality / fc.packets;
      // lowest marginal wins; the ascending scan makes ties pick the
      // highest index
      if (pick < 0) {
        pick = static_cast<int>(i);
        pick_marginal = marginal;
      } else if (marginal <= pick_marginal + 1e-12) {
        pick = static_cast<int>(i);
        pick_marginal = std::min(pick_marginal, marginal);
      }
    }
    if (pick < 0)
      throw std::logic_error("no frame can be cut; dependency cycle?");
    --delivery[pick];
    --total;
  }
  return delivery;
}

int reoptimize_action(const FiniteTrafficMdp& mdp, const RateModel& rm,
                      const std::vector<std::vector<double>>& value,
                      int state, double lambda, double alpha,
                      double unit_cost, int max_packets) {
  const std::vector<MdpAction>& acts = mdp.states[state];
  int best = -1;
  double best_v = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < acts.size(); ++i) {
    const MdpAction& a = acts[i];
    if (a.packets > max_packets) continue;
    double w = 0.0;
    for (std::size_t b = 0; b < rm.probs.size(); ++b)
      w += rm.probs[b] * value[a.next][b];
    double v = a.utility - lambda * unit_cost * a.packets + alpha * w;
    if (best < 0 || v > best_v + 1e-12 ||
        (v >= best_v - 1e-12 && a.packets < acts[best].packets)) {
      best = static_cast<int>(i);
      best_v = v;
    }
  }
  return best;  // never -1: the all-zero action always fits
}

namespace {

struct SlotPlan {
  int state_idx = 0;
  int action = -1;  // -1 means no usable rate
  std::vector<int> delivery;
  int packets = 0;
  double rate = 0.0;
  double unit_cost = 0.0;
  CoopOutcome oc;
};

std::vector<RateModel> build_rate_models(const ScenarioConfig& cfg,
                                         const Topology& topo, Rng& root) {
  std::vector<RateModel> models;
  for (int u = 0; u < cfg.n_users; ++u) {
    Rng pmf_rng = root.derive(100 + static_cast<std::uint64_t>(u));
    RatePmf pmf =
        estimate_rate_pmf(static_cast<std::size_t>(u + 1), topo, cfg.phy,
                          cfg.coop, cfg.pmf_samples, pmf_rng, cfg.coop_enabled);
    models.push_back(
        rate_model(cfg.phy.slot_seconds, cfg.phy.packet_bits, pmf));
  }
  return models;
}

int compile_budget(const std::vector<RateModel>& models) {
  int cap = 1;
  for (const RateModel& m : models)
    for (int c : m.caps) cap = std::max(cap, c);
  return cap;
}

// Compiled delivery vectors run over the full window layout; while the
// stream is starting up the live state is shorter. Pick out the entries for
// frames that actually exist.
std::vector<int> align_delivery(const std::vector<FrameInstance>& window,
                                const TrafficState& st,
                                const std::vector<int>& delivery) {
  std::vector<int> out(st.frames.size(), 0);
  std::size_t cur = 0;
  for (std::size_t j = 0; j < window.size() && cur < st.frames.size(); ++j)
    if (st.frames[cur].frame == window[j]) {
      out[cur] = delivery[j];
      ++cur;
    }
  return out;
}

double coop_packet_error(const PhyConfig& phy, const ChannelMatrix& ch,
                         std::size_t src, const CoopOutcome& oc) {
  double weakest = std::numeric_limits<double>::infinity();
  for (std::size_t id : oc.relay_ids)
    weakest = std::min(weakest, ch.gain(src, id));
  double ber1 = ber_upper_bound(phy.avg_snr, weakest, oc.bits_phase1);
  double ber2 =
      ber_upper_bound(phy.avg_snr, oc.effective_gain, oc.bits_phase2);
  double per1 = packet_error_probability(ber1, phy.packet_bits);
  double per2 = packet_error_probability(ber2, phy.packet_bits);
  return 1.0 - (1.0 - per1) * (1.0 - per2);
}

}  // namespace

SimResult run_episode(const ScenarioConfig& cfg) {
  cfg.validate();
  const GopSpec gop = cfg.effective_gop();
  const int M = cfg.n_users;

  Rng root(cfg.seed);
  Rng place_rng = root.derive(1);
  Topology topo = build_topology(cfg, place_rng);

  std::vector<RateModel> models = build_rate_models(cfg, topo, root);
  CompiledGop cg = compile_gop(gop, compile_budget(models));

  SimResult out;
  out.traffic_states = static_cast<int>(cg.mdp.states.size());
  const double share = 1.0 / M;
  std::vector<ValueIterationResult> sols;
  if (cfg.optimize_price) {
    std::vector<PricedUser> pus;
    for (const RateModel& rm : models) pus.push_back({&cg.mdp, rm, cg.initial});
    PriceConfig pc;
    pc.alpha = cfg.alpha;
    pc.mu0 = cfg.mu0;
    pc.max_iter = cfg.price_max_iter;
    pc.tol = cfg.price_tol;
    PriceResult pr = optimize_price(pus, pc);
    out.lambda_star = pr.lambda_star;
    out.price_converged = pr.converged;
    out.sum_expected_airtime = pr.final_sum_x;
    sols = std::move(pr.solutions);
  } else {
    out.lambda_star = cfg.fixed_lambda;
    out.price_converged = true;  // nothing to search for
    for (int u = 0; u < M; ++u) {
      sols.push_back(value_iteration(cg.mdp, models[u], cfg.fixed_lambda,
                                     cfg.alpha, share));
      out.sum_expected_airtime += expected_resource(
          cg.mdp, models[u], sols.back().policy, cg.initial, cfg.alpha);
    }
  }

  out.users.resize(M);
  std::vector<TrafficState> st(M, schedulable_state(gop, 0));
  for (int u = 0; u < M; ++u)
    out.users[u].expected_airtime = expected_resource(
        cg.mdp, models[u], sols[u].policy, cg.initial, cfg.alpha);

  Rng chan_rng = root.derive(2);
  Rng rec_rng = root.derive(3);
  Rng loss_rng = root.derive(4);

  std::vector<SlotPlan> plans(M);
  for (int t = 0; t < cfg.slots; ++t) {
    ChannelMatrix ch = draw_channel_matrix(topo, chan_rng);
    std::vector<FrameInstance> wf = window_frames(cg, t);

    // every user plans against its own policy at the observed rate
    double sum_x = 0.0;
    for (int u = 0; u < M; ++u) {
      SlotPlan& p = plans[u];
      const std::size_t node = static_cast<std::size_t>(u + 1);
      p.state_idx = state_index(cg, st[u], t);
      if (cfg.coop_enabled) {
        p.oc = run_recruitment(node, ch, cfg.phy, cfg.coop, rec_rng,
                               out.lambda_star);
      } else {
        p.oc = CoopOutcome{};
        p.oc.bits_direct =
            direct_bits(cfg.phy, ch.gain(node, 0), cfg.phy.bep_target);
        p.oc.rate_direct = cfg.phy.rate_from_bits(p.oc.bits_direct);
      }
      p.rate = p.oc.decision == Decision::Cooperative ? p.oc.rate_coop
                                                      : p.oc.rate_direct;
      int bin = rate_bin_floor(models[u].rates, p.rate);
      if (bin < 0) {
        p.action = -1;
        p.packets = 0;
        p.unit_cost = 0.0;
        p.delivery.assign(st[u].frames.size(), 0);
      } else {
        p.action = sols[u].policy[p.state_idx][bin];
        const MdpAction& a = cg.mdp.states[p.state_idx][p.action];
        p.delivery = align_delivery(wf, st[u], a.delivery);
        p.packets = a.packets;
        p.unit_cost = resource_per_packet(cfg.phy.slot_seconds,
                                          cfg.phy.packet_bits, p.rate);
        sum_x += p.packets * p.unit_cost;
      }
    }

    // plans that oversubscribe the slot get scaled back
    if (sum_x > 1.0 + 1e-12) {
      std::vector<double> xs(M, 0.0);
      for (int u = 0; u < M; ++u) xs[u] = plans[u].packets * plans[u].unit_cost;
      std::vector<double> scaled = normalize_allocations(xs);
      for (int u = 0; u < M; ++u) {
        SlotPlan& p = plans[u];
        if (p.packets == 0) continue;
        int allowed =
            static_cast<int>(std::floor(scaled[u] / p.unit_cost + 1e-9));
        if (allowed >= p.packets) continue;
        if (cfg.reoptimize_on_cut) {
          p.action = reoptimize_action(cg.mdp, models[u], sols[u].value,
                                       p.state_idx, out.lambda_star, cfg.alpha,
                                       p.unit_cost, allowed);
          const MdpAction& a = cg.mdp.states[p.state_idx][p.action];
          p.delivery = align_delivery(wf, st[u], a.delivery);
          p.packets = a.packets;
        } else {
          p.delivery = truncate_delivery(gop, st[u], p.delivery, allowed);
          p.packets =
              std::accumulate(p.delivery.begin(), p.delivery.end(), 0);
        }
      }
    }

    double final_x = 0.0;
    for (const SlotPlan& p : plans) final_x += p.packets * p.unit_cost;
    if (final_x > out.max_slot_airtime) out.max_slot_airtime = final_x;

    // execute: losses, energy, traffic transition
    for (int u = 0; u < M; ++u) {
      SlotPlan& p = plans[u];
      UserStats& s = out.users[u];
      const std::size_t node = static_cast<std::size_t>(u + 1);
      std::vector<int> delivered = p.delivery;
      if (p.packets > 0) {
        if (cfg.apply_packet_errors) {
          double per = p.oc.decision == Decision::Cooperative
                           ? coop_packet_error(cfg.phy, ch, node, p.oc)
                           : packet_error_probability(
                                 ber_upper_bound(cfg.phy.avg_snr,
                                                 ch.gain(node, 0),
                                                 p.oc.bits_direct),
                                 cfg.phy.packet_bits);
          for (std::size_t i = 0; i < delivered.size(); ++i) {
            int kept = 0;
            for (int k = 0; k < delivered[i]; ++k)
              if (loss_rng.uniform() >= per) ++kept;
            delivered[i] = kept;
          }
        }
        s.sent_packets += p.packets;
        s.airtime += p.packets * p.unit_cost;
        if (p.oc.decision == Decision::Cooperative) {
          ++s.coop_slots;
          s.mean_relay_count += static_cast<double>(p.oc.relay_ids.size());
          EnergyReport er = coop_energy(cfg.phy, p.oc.rate_coop,
                                        p.oc.rate_phase2, cfg.coop.stbc_rate,
                                        p.packets,
                                        static_cast<int>(p.oc.relay_ids.size()));
          s.energy += er.total;
        } else {
          ++s.direct_slots;
          s.energy += p.packets * direct_energy_per_packet(cfg.phy, p.rate);
        }
      } else if (p.action < 0) {
        ++s.blocked_slots;
      } else {
        ++s.idle_slots;
      }
      for (int d : delivered) s.delivered_packets += d;

      AdvanceResult ar = advance(gop, st[u], delivered, t);
      st[u] = ar.state;
      s.admitted_packets += ar.admitted_packets;
      s.expired_packets += ar.expired_packets;
      s.dropped_packets += ar.dropped_packets;
      s.completed_frames += ar.completed_frames;
      s.undecodable_frames += ar.undecodable_frames;
      s.realized_utility += ar.realized_utility;
      ++s.slots;
    }
  }

  for (UserStats& s : out.users)
    if (s.coop_slots > 0) s.mean_relay_count /= static_cast<double>(s.coop_slots);
  out.final_traffic = std::move(st);
  return out;
}

PriceResult price_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  const GopSpec gop = cfg.effective_gop();
  Rng root(cfg.seed);
  Rng place_rng = root.derive(1);
  Topology topo = build_topology(cfg, place_rng);
  std::vector<RateModel> models = build_rate_models(cfg, topo, root);
  CompiledGop cg = compile_gop(gop, compile_budget(models));
  std::vector<PricedUser> pus;
  for (const RateModel& rm : models) pus.push_back({&cg.mdp, rm, cg.initial});
  PriceConfig pc;
  pc.alpha = cfg.alpha;
  pc.mu0 = cfg.mu0;
  pc.max_iter = cfg.price_max_iter;
  pc.tol = cfg.price_tol;
  return optimize_price(pus, pc);
}

std::vector<SweepRow> sweep_distance(const ScenarioConfig& cfg,
                                     const std::vector<double>& distances,
                                     const std::vector<double>& xi_values) {
  cfg.phy.validate();
  cfg.coop.validate();
  if (cfg.slots < 1) throw std::invalid_argument("need at least one slot");
  if (cfg.n_relays < 0) throw std::invalid_argument("negative relay count");
  if (distances.empty() || xi_values.empty())
    throw std::invalid_argument("empty sweep grid");
  for (double d : distances)
    if (!(d > 0)) throw std::invalid_argument("distances must be positive");
  for (double xi : xi_values)
    if (xi < 0 || xi > 1)
      throw std::invalid_argument("xi must lie in [0, 1]");

  Rng root(cfg.seed);
  Rng place_rng = root.derive(1);
  std::vector<std::array<double, 2>> relay_pos;
  for (int i = 0; i < cfg.n_relays; ++i)
    relay_pos.push_back(random_disk_point(cfg.coverage_radius, place_rng));

  std::vector<SweepRow> rows;
  for (std::size_t di = 0; di < distances.size(); ++di) {
    Topology topo;
    topo.path_loss_exponent = cfg.path_loss_exponent;
    topo.coverage_radius = cfg.coverage_radius;
    topo.positions.push_back({0.0, 0.0});
    topo.positions.push_back({distances[di], 0.0});
    for (const auto& p : relay_pos) topo.positions.push_back(p);

    for (std::size_t xj = 0; xj < xi_values.size(); ++xj) {
      const double xi = xi_values[xj];
      const bool coop_on = xi > 0;
      CoopConfig cc = cfg.coop;
      if (coop_on) cc.self_select_xi = xi;

      // the channel stream restarts per distance so every xi replays the
      // exact same fading; recruitment noise gets its own stream per cell
      Rng ch_rng = root.derive(1000 + static_cast<std::uint64_t>(di));
      Rng rec_rng = root.derive(100000 +
                                static_cast<std::uint64_t>(di) * 1000 + xj);

      SweepRow row;
      row.distance = distances[di];
      row.xi = xi;
      long coop_n = 0;
      long packets = 0;
      long deq_n = 0;
      double relay_sum = 0, spec_sum = 0, energy_sum = 0, bits = 0,
             deq_sum = 0;
      for (int t = 0; t < cfg.slots; ++t) {
        ChannelMatrix ch = draw_channel_matrix(topo, ch_rng);
        if (!coop_on) {
          int b = direct_bits(cfg.phy, ch.gain(1, 0), cfg.phy.bep_target);
          double r = cfg.phy.rate_from_bits(b);
          spec_sum += r / cfg.phy.symbol_rate;
          if (r > 0) {
            ++packets;
            bits += cfg.phy.packet_bits;
            energy_sum += direct_energy_per_packet(cfg.phy, r);
          }
          continue;
        }
        CoopOutcome oc = run_recruitment(1, ch, cfg.phy, cc, rec_rng);
        relay_sum += static_cast<double>(oc.relay_ids.size());
        double r = oc.decision == Decision::Cooperative ? oc.rate_coop
                                                        : oc.rate_direct;
        spec_sum += r / cfg.phy.symbol_rate;
        if (oc.decision == Decision::Cooperative) {
          ++coop_n;
          ++packets;
          bits += cfg.phy.packet_bits;
          EnergyReport er =
              coop_energy(cfg.phy, oc.rate_coop, oc.rate_phase2, cc.stbc_rate,
                          1, static_cast<int>(oc.relay_ids.size()));
          energy_sum += er.total;
          deq_sum += direct_equivalent_energy_per_packet(cfg.phy, oc.rate_coop,
                                                         ch.gain(1, 0));
          ++deq_n;
        } else if (r > 0) {
          ++packets;
          bits += cfg.phy.packet_bits;
          energy_sum += direct_energy_per_packet(cfg.phy, r);
        }
      }
      row.mean_spectral_bits = spec_sum / cfg.slots;
      row.coop_probability =
          coop_on ? static_cast<double>(coop_n) / cfg.slots : 0.0;
      row.mean_relay_count = coop_on ? relay_sum / cfg.slots : 0.0;
      row.mean_energy_per_packet = packets > 0 ? energy_sum / packets : 0.0;
      row.throughput_per_energy = energy_sum > 0 ? bits / energy_sum : 0.0;
      row.direct_equiv_energy = deq_n > 0 ? deq_sum / deq_n : 0.0;
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace coopsim
