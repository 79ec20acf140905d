#pragma once

#include <cstddef>
#include <vector>

#include "coopsim/cooperation.hpp"
#include "coopsim/phy.hpp"
#include "coopsim/rng.hpp"
#include "coopsim/traffic.hpp"

namespace coopsim {

// One feasible scheduling move in a given traffic state.
struct MdpAction {
  int packets = 0;            // total packets transmitted
  double utility = 0.0;       // scheduling reward
  int next = 0;               // successor traffic state index
  std::vector<int> delivery;  // per-frame packet counts
};

// Traffic dynamics stripped of everything physical: per state, the feasible
// actions and their deterministic successors. Small hand-built instances
// plug into the same solvers as compiled video traffic.
struct FiniteTrafficMdp {
  std::vector<std::vector<MdpAction>> states;
  int max_packets = 0;  // budget ceiling the actions were enumerated under
};

// Exhaustive enumeration of the periodic window states of a GopSpec.
// Traffic states are grouped by phase (slot mod period); frame identities
// are anchored at reference_base + phase and transitions wrap gop indices
// so the chain is finite.
struct CompiledGop {
  GopSpec spec;
  int reference_base = 0;
  std::vector<TrafficState> traffic;  // index -> canonical state
  std::vector<int> phase_of;          // index -> phase
  std::vector<long> phase_offset;     // first index of each phase block
  int initial = 0;                    // fresh full-buffer state, phase 0
  FiniteTrafficMdp mdp;
};

CompiledGop compile_gop(const GopSpec& spec, int max_packets);

// Index of an episode state observed at absolute `slot` (gop indices are
// shifted back to the compiled anchor). During start-up the window is not
// yet full; positions belonging to groups that predate the stream count as
// already delivered. Throws if the state is not part of the enumerated
// space.
int state_index(const CompiledGop& cg, const TrafficState& st, int slot);

// Frame identities of the compiled window at `slot`, in layout order and
// numbered like the episode sees them (pre-stream groups are negative).
// Aligns compiled per-frame delivery vectors with a live traffic state.
std::vector<FrameInstance> window_frames(const CompiledGop& cg, int slot);

// Discrete distribution over the rate offered by the channel each slot.
struct RatePmf {
  std::vector<double> rates;  // bits/s, strictly increasing
  std::vector<double> probs;
};

// Packets that fit into one slot at `rate`.
int packet_budget(double slot_seconds, int packet_bits, double rate);

// Fraction of a slot one packet occupies at `rate`.
double resource_per_packet(double slot_seconds, int packet_bits, double rate);

// RatePmf plus the per-bin budget and airtime numbers the solver needs.
struct RateModel {
  std::vector<double> rates;
  std::vector<double> probs;
  std::vector<int> caps;
  std::vector<double> cost;  // airtime share per packet
};

RateModel rate_model(double slot_seconds, int packet_bits, const RatePmf& pmf);

// Largest index with rates[i] <= rate, or -1. Lets an episode fall back to
// the policy of the next lower bin when it observes a rate the estimation
// pass never sampled.
int rate_bin_floor(const std::vector<double>& rates, double rate);

struct ValueIterationResult {
  std::vector<std::vector<double>> value;  // [traffic][bin]
  std::vector<std::vector<int>> policy;    // [traffic][bin] -> action index
  bool converged = false;
  int iterations = 0;
  double last_delta = 0.0;
  std::vector<double> delta_history;
};

// Discounted value iteration for one user facing price `lambda` per unit of
// airtime and holding an entitlement `share` refunded every slot:
//   V(T, r) = max_y [ u(y) - lambda * (x(y, r) - share) + a * E_r' V(T', r') ]
// Ties prefer fewer packets, then the lexicographically smallest delivery.
ValueIterationResult value_iteration(
    const FiniteTrafficMdp& mdp, const RateModel& rm, double lambda,
    double alpha, double share, double tol = 1e-9, int max_iter = 20000,
    const std::vector<std::vector<double>>* warm_start = nullptr);

// Expected discounted airtime a user consumes when following `policy` from
// the initial traffic state (rate drawn fresh each slot).
double expected_resource(const FiniteTrafficMdp& mdp, const RateModel& rm,
                         const std::vector<std::vector<int>>& policy,
                         int initial_traffic, double alpha,
                         double tol = 1e-10);

// Monte Carlo estimate of the per-slot rate distribution a user sees, with
// or without relay recruitment. Cooperative slots contribute the combined
// two-hop rate, others the direct rate.
RatePmf estimate_rate_pmf(std::size_t user, const Topology& topo,
                          const PhyConfig& phy, const CoopConfig& coop,
                          int n_samples, Rng& rng, bool coop_enabled);

// Joint law of (direct rate, two-hop rate) for the reference solver below.
struct RatePair {
  double beta_direct = 0.0;
  double beta_coop = 0.0;
  double prob = 0.0;
};

// Collapse pairs to the distribution of max(direct, coop).
RatePmf opportunistic_pmf(const std::vector<RatePair>& pairs);

struct AugmentedInstance {
  const FiniteTrafficMdp* mdp = nullptr;
  std::vector<RatePair> pairs;
  double lambda = 0.0;
  double alpha = 0.9;
  double share = 0.0;
  double slot_seconds = 1.0;
  int packet_bits = 1;
};

// Independent reference solver over the richer state (traffic, rate pair)
// with an explicit use-the-relays switch in every action. Plain nested-loop
// Bellman updates, no shared code with value_iteration. Guarded to small
// instances; returns value[traffic][pair].
std::vector<std::vector<double>> augmented_brute_force(
    const AugmentedInstance& inst, double tol = 1e-12, int max_iter = 200000);

}  // namespace coopsim
