#include "coopsim/config_io.hpp"

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>

#include "json.hpp"

namespace coopsim {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, std::initializer_list<const char*> keys,
                    const char* where) {
  if (!j.is_object())
    throw std::invalid_argument(std::string(where) + " must be an object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : keys)
      if (item.key() == k) {
        known = true;
        break;
      }
    if (!known)
      throw std::invalid_argument("unknown key '" + item.key() + "' in " +
                                  where);
  }
}

PhyConfig parse_phy(const json& j) {
  reject_unknown(j,
                 {"symbol_rate", "avg_snr", "bep_target", "bep_split",
                  "max_bits_per_symbol", "base_bits_per_symbol", "packet_bits",
                  "slot_seconds", "symbol_energy"},
                 "phy");
  PhyConfig p;
  if (j.contains("symbol_rate")) p.symbol_rate = j.at("symbol_rate").get<double>();
  if (j.contains("avg_snr")) p.avg_snr = j.at("avg_snr").get<double>();
  if (j.contains("bep_target")) p.bep_target = j.at("bep_target").get<double>();
  if (j.contains("bep_split")) p.bep_split = j.at("bep_split").get<double>();
  if (j.contains("max_bits_per_symbol"))
    p.max_bits_per_symbol = j.at("max_bits_per_symbol").get<int>();
  if (j.contains("base_bits_per_symbol"))
    p.base_bits_per_symbol = j.at("base_bits_per_symbol").get<int>();
  if (j.contains("packet_bits")) p.packet_bits = j.at("packet_bits").get<int>();
  if (j.contains("slot_seconds")) p.slot_seconds = j.at("slot_seconds").get<double>();
  if (j.contains("symbol_energy"))
    p.symbol_energy = j.at("symbol_energy").get<double>();
  return p;
}

CoopConfig parse_coop(const json& j) {
  reject_unknown(j, {"stbc_length", "stbc_rate", "self_select_xi"}, "coop");
  CoopConfig c;
  if (j.contains("stbc_length")) c.stbc_length = j.at("stbc_length").get<int>();
  if (j.contains("stbc_rate")) c.stbc_rate = j.at("stbc_rate").get<double>();
  if (j.contains("self_select_xi"))
    c.self_select_xi = j.at("self_select_xi").get<double>();
  return c;
}

GopSpec parse_gop(const json& j) {
  reject_unknown(j, {"period", "window", "classes", "deps"}, "gop");
  GopSpec g;
  g.classes.clear();
  g.deps.clear();
  if (j.contains("period")) g.period = j.at("period").get<int>();
  if (j.contains("window")) g.window = j.at("window").get<int>();
  if (j.contains("classes")) {
    for (const json& cj : j.at("classes")) {
      reject_unknown(cj, {"packets", "quality", "deadline_offset"},
                     "gop class");
      FrameClass fc;
      if (cj.contains("packets")) fc.packets = cj.at("packets").get<int>();
      if (cj.contains("quality")) fc.quality = cj.at("quality").get<double>();
      if (cj.contains("deadline_offset"))
        fc.deadline_offset = cj.at("deadline_offset").get<int>();
      g.classes.push_back(fc);
    }
  }
  if (j.contains("deps")) {
    for (const json& dj : j.at("deps")) {
      reject_unknown(dj, {"from", "delta", "to"}, "gop dep");
      DependencyEdge e;
      e.from_class = dj.at("from").get<int>();
      if (dj.contains("delta")) e.gop_delta = dj.at("delta").get<int>();
      e.to_class = dj.at("to").get<int>();
      g.deps.push_back(e);
    }
  }
  return g;
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& text) {
  json j = json::parse(text);
  reject_unknown(j,
                 {"version", "phy", "coop", "gop", "n_users", "n_relays",
                  "coverage_radius", "path_loss_exponent", "user_distances",
                  "coop_enabled", "apply_packet_errors", "reoptimize_on_cut",
                  "alpha", "optimize_price", "fixed_lambda", "mu0",
                  "price_max_iter", "price_tol", "pmf_samples",
                  "packets_per_frame", "slots", "seed"},
                 "scenario");
  if (j.contains("version") && j.at("version").get<int>() != 1)
    throw std::invalid_argument("unsupported scenario version");
  ScenarioConfig cfg;
  if (j.contains("phy")) cfg.phy = parse_phy(j.at("phy"));
  if (j.contains("coop")) cfg.coop = parse_coop(j.at("coop"));
  if (j.contains("gop")) cfg.gop = parse_gop(j.at("gop"));
  if (j.contains("n_users")) cfg.n_users = j.at("n_users").get<int>();
  if (j.contains("n_relays")) cfg.n_relays = j.at("n_relays").get<int>();
  if (j.contains("coverage_radius"))
    cfg.coverage_radius = j.at("coverage_radius").get<double>();
  if (j.contains("path_loss_exponent"))
    cfg.path_loss_exponent = j.at("path_loss_exponent").get<double>();
  if (j.contains("user_distances"))
    cfg.user_distances = j.at("user_distances").get<std::vector<double>>();
  if (j.contains("coop_enabled"))
    cfg.coop_enabled = j.at("coop_enabled").get<bool>();
  if (j.contains("apply_packet_errors"))
    cfg.apply_packet_errors = j.at("apply_packet_errors").get<bool>();
  if (j.contains("reoptimize_on_cut"))
    cfg.reoptimize_on_cut = j.at("reoptimize_on_cut").get<bool>();
  if (j.contains("alpha")) cfg.alpha = j.at("alpha").get<double>();
  if (j.contains("optimize_price"))
    cfg.optimize_price = j.at("optimize_price").get<bool>();
  if (j.contains("fixed_lambda"))
    cfg.fixed_lambda = j.at("fixed_lambda").get<double>();
  if (j.contains("mu0")) cfg.mu0 = j.at("mu0").get<double>();
  if (j.contains("price_max_iter"))
    cfg.price_max_iter = j.at("price_max_iter").get<int>();
  if (j.contains("price_tol")) cfg.price_tol = j.at("price_tol").get<double>();
  if (j.contains("pmf_samples"))
    cfg.pmf_samples = j.at("pmf_samples").get<int>();
  if (j.contains("packets_per_frame"))
    cfg.packets_per_frame = j.at("packets_per_frame").get<int>();
  if (j.contains("slots")) cfg.slots = j.at("slots").get<int>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string scenario_to_json(const ScenarioConfig& cfg) {
  json j;
  j["version"] = 1;
  j["phy"] = {{"symbol_rate", cfg.phy.symbol_rate},
              {"avg_snr", cfg.phy.avg_snr},
              {"bep_target", cfg.phy.bep_target},
              {"bep_split", cfg.phy.bep_split},
              {"max_bits_per_symbol", cfg.phy.max_bits_per_symbol},
              {"base_bits_per_symbol", cfg.phy.base_bits_per_symbol},
              {"packet_bits", cfg.phy.packet_bits},
              {"slot_seconds", cfg.phy.slot_seconds},
              {"symbol_energy", cfg.phy.symbol_energy}};
  j["coop"] = {{"stbc_length", cfg.coop.stbc_length},
               {"stbc_rate", cfg.coop.stbc_rate},
               {"self_select_xi", cfg.coop.self_select_xi}};
  if (!cfg.gop.classes.empty()) {
    json classes = json::array();
    for (const FrameClass& fc : cfg.gop.classes)
      classes.push_back({{"packets", fc.packets},
                         {"quality", fc.quality},
                         {"deadline_offset", fc.deadline_offset}});
    json deps = json::array();
    for (const DependencyEdge& e : cfg.gop.deps)
      deps.push_back(
          {{"from", e.from_class}, {"delta", e.gop_delta}, {"to", e.to_class}});
    j["gop"] = {{"period", cfg.gop.period},
                {"window", cfg.gop.window},
                {"classes", classes},
                {"deps", deps}};
  }
  j["n_users"] = cfg.n_users;
  j["n_relays"] = cfg.n_relays;
  j["coverage_radius"] = cfg.coverage_radius;
  j["path_loss_exponent"] = cfg.path_loss_exponent;
  if (!cfg.user_distances.empty()) j["user_distances"] = cfg.user_distances;
  j["coop_enabled"] = cfg.coop_enabled;
  j["apply_packet_errors"] = cfg.apply_packet_errors;
  j["reoptimize_on_cut"] = cfg.reoptimize_on_cut;
  j["alpha"] = cfg.alpha;
  j["optimize_price"] = cfg.optimize_price;
  j["fixed_lambda"] = cfg.fixed_lambda;
  j["mu0"] = cfg.mu0;
  j["price_max_iter"] = cfg.price_max_iter;
  j["price_tol"] = cfg.price_tol;
  j["pmf_samples"] = cfg.pmf_samples;
  j["packets_per_frame"] = cfg.packets_per_frame;
  j["slots"] = cfg.slots;
  j["seed"] = cfg.seed;
  return j.dump(2) + "\n";
}

void save_scenario(const ScenarioConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write scenario file: " + path);
  out << scenario_to_json(cfg);
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out =
      "distance,xi,mean_spectral_bits,coop_probability,mean_relay_count,"
      "mean_energy_per_packet,throughput_per_energy,direct_equiv_energy\n";
  for (const SweepRow& r : rows) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "%.3f,%.3f,%.6f,%.6f,%.6f,%.9e,%.6e,%.9e\n", r.distance,
                  r.xi, r.mean_spectral_bits, r.coop_probability,
                  r.mean_relay_count, r.mean_energy_per_packet,
                  r.throughput_per_energy, r.direct_equiv_energy);
    out += buf;
  }
  return out;
}

std::string sweep_json(const std::vector<SweepRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const SweepRow& r : rows)
    arr.push_back({{"distance", r.distance},
                   {"xi", r.xi},
                   {"mean_spectral_bits", r.mean_spectral_bits},
                   {"coop_probability", r.coop_probability},
                   {"mean_relay_count", r.mean_relay_count},
                   {"mean_energy_per_packet", r.mean_energy_per_packet},
                   {"throughput_per_energy", r.throughput_per_energy},
                   {"direct_equiv_energy", r.direct_equiv_energy}});
  nlohmann::json j{{"rows", arr}};
  return j.dump(2) + "\n";
}

std::string episode_csv(const SimResult& r) {
  std::string out =
      "user,slots,coop_slots,direct_slots,idle_slots,blocked_slots,"
      "sent_packets,delivered_packets,admitted_packets,expired_packets,"
      "dropped_packets,completed_frames,undecodable_frames,realized_utility,"
      "energy_joules,airtime,mean_relay_count,expected_airtime\n";
  for (std::size_t u = 0; u < r.users.size(); ++u) {
    const UserStats& s = r.users[u];
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "%zu,%ld,%ld,%ld,%ld,%ld,%ld,%ld,%ld,%ld,%ld,%ld,%ld,"
                  "%.6f,%.9e,%.6f,%.6f,%.6f\n",
                  u, s.slots, s.coop_slots, s.direct_slots, s.idle_slots,
                  s.blocked_slots, s.sent_packets, s.delivered_packets,
                  s.admitted_packets, s.expired_packets, s.dropped_packets,
                  s.completed_frames, s.undecodable_frames, s.realized_utility,
                  s.energy, s.airtime, s.mean_relay_count, s.expected_airtime);
    out += buf;
  }
  return out;
}

std::string episode_json(const SimResult& r) {
  nlohmann::json users = nlohmann::json::array();
  for (const UserStats& s : r.users)
    users.push_back({{"slots", s.slots},
                     {"coop_slots", s.coop_slots},
                     {"direct_slots", s.direct_slots},
                     {"idle_slots", s.idle_slots},
                     {"blocked_slots", s.blocked_slots},
                     {"sent_packets", s.sent_packets},
                     {"delivered_packets", s.delivered_packets},
                     {"admitted_packets", s.admitted_packets},
                     {"expired_packets", s.expired_packets},
                     {"dropped_packets", s.dropped_packets},
                     {"completed_frames", s.completed_frames},
                     {"undecodable_frames", s.undecodable_frames},
                     {"realized_utility", s.realized_utility},
                     {"energy_joules", s.energy},
                     {"airtime", s.airtime},
                     {"mean_relay_count", s.mean_relay_count},
                     {"expected_airtime", s.expected_airtime}});
  nlohmann::json j{{"lambda_star", r.lambda_star},
                   {"price_converged", r.price_converged},
                   {"sum_expected_airtime", r.sum_expected_airtime},
                   {"max_slot_airtime", r.max_slot_airtime},
                   {"traffic_states", r.traffic_states},
                   {"users", users}};
  return j.dump(2) + "\n";
}

std::string price_history_csv(const PriceResult& r) {
  std::string out = "iteration,lambda,sum_x\n";
  for (std::size_t i = 0; i < r.history.size(); ++i) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%zu,%.12g,%.12g\n", i,
                  r.history[i].lambda, r.history[i].sum_x);
    out += buf;
  }
  return out;
}

std::string price_history_json(const PriceResult& r) {
  nlohmann::json hist = nlohmann::json::array();
  for (const PriceHistoryEntry& h : r.history)
    hist.push_back({{"lambda", h.lambda}, {"sum_x", h.sum_x}});
  nlohmann::json j{{"lambda_star", r.lambda_star},
                   {"converged", r.converged},
                   {"final_sum_x", r.final_sum_x},
                   {"history", hist}};
  return j.dump(2) + "\n";
}

}  // namespace coopsim
