#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "coopsim/cooperation.hpp"
#include "coopsim/mdp.hpp"
#include "coopsim/phy.hpp"
#include "coopsim/pricing.hpp"
#include "coopsim/rng.hpp"
#include "coopsim/traffic.hpp"

namespace coopsim {

// Everything one experiment needs. The traffic pattern defaults to the
// I B P B group when `gop.classes` is left empty.
struct ScenarioConfig {
  PhyConfig phy;
  CoopConfig coop;
  GopSpec gop;

  int n_users = 1;
  int n_relays = 50;
  double coverage_radius = 100.0;
  double path_loss_exponent = 4.0;
  std::vector<double> user_distances;  // optional; users go on the x axis

  bool coop_enabled = true;
  bool apply_packet_errors = true;
  bool reoptimize_on_cut = false;  // re-plan a slot whose budget was cut

  double alpha = 0.9;
  bool optimize_price = true;
  double fixed_lambda = 0.0;  // used when optimize_price is false
  double mu0 = 0.5;
  int price_max_iter = 60;
  double price_tol = 1e-3;

  int pmf_samples = 2000;
  int packets_per_frame = 4;
  int slots = 2000;
  std::uint64_t seed = 1;

  GopSpec effective_gop() const;
  void validate() const;
};

// Uniform draw from the disk of radius `radius` centred on the origin.
std::array<double, 2> random_disk_point(double radius, Rng& rng);

// Node 0 is the access point at the origin, nodes 1..n_users the video
// sources (at the configured distances on the x axis, or scattered), the
// rest candidate relays scattered over the cell.
Topology build_topology(const ScenarioConfig& cfg, Rng& rng);

// Cut a planned delivery down to `budget` packets without breaking decode
// order: a frame may only lose packets while no dependent of it is still
// being served; lowest per-packet quality goes first, ties cut the highest
// index.
std::vector<int> truncate_delivery(const GopSpec& spec,
                                   const TrafficState& state,
                                   std::vector<int> delivery, int budget);

// Best action of `state` worth at most `max_packets`, scored with a
// converged value table as the continuation. Used when a slot's budget
// collapses after normalization.
int reoptimize_action(const FiniteTrafficMdp& mdp, const RateModel& rm,
                      const std::vector<std::vector<double>>& value,
                      int state, double lambda, double alpha,
                      double unit_cost, int max_packets);

struct UserStats {
  long slots = 0;
  long coop_slots = 0;    // transmitted through relays
  long direct_slots = 0;  // transmitted on the direct link
  long idle_slots = 0;    // scheduler chose to wait
  long blocked_slots = 0; // channel offered no usable rate
  long sent_packets = 0;
  long delivered_packets = 0;
  long admitted_packets = 0;
  long expired_packets = 0;
  long dropped_packets = 0;
  long completed_frames = 0;
  long undecodable_frames = 0;
  double realized_utility = 0.0;
  double energy = 0.0;            // joules radiated on this user's behalf
  double airtime = 0.0;           // slot fractions actually consumed
  double mean_relay_count = 0.0;  // volunteers per cooperative slot
  double expected_airtime = 0.0;  // model-side demand at the final price
};

struct SimResult {
  double lambda_star = 0.0;
  bool price_converged = false;
  double sum_expected_airtime = 0.0;
  double max_slot_airtime = 0.0;  // worst realized sum of shares in one slot
  int traffic_states = 0;
  std::vector<UserStats> users;
  std::vector<TrafficState> final_traffic;  // window content after the run
};

SimResult run_episode(const ScenarioConfig& cfg);

// The price search alone, over the same setup run_episode would build.
PriceResult price_scenario(const ScenarioConfig& cfg);

// One row of the relay-recruitment sweep: a saturated source at a fixed
// distance, no scheduler, one packet accounted per usable slot.
struct SweepRow {
  double distance = 0.0;
  double xi = 0.0;                      // 0 = cooperation off
  double mean_spectral_bits = 0.0;      // end-to-end bits per symbol
  double coop_probability = 0.0;
  double mean_relay_count = 0.0;        // volunteers per slot
  double mean_energy_per_packet = 0.0;  // joules, all transmitters combined
  double throughput_per_energy = 0.0;   // delivered bits per joule
  double direct_equiv_energy = 0.0;     // joules/packet a lone direct link
                                        // would pay for the same rate
};

// Matched-randomness sweep over source distance and the self-selection
// threshold: every xi value replays the same channel draws at a given
// distance, so recruitment effects are isolated from channel noise.
std::vector<SweepRow> sweep_distance(const ScenarioConfig& cfg,
                                     const std::vector<double>& distances,
                                     const std::vector<double>& xi_values);

}  // namespace coopsim
