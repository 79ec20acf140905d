#include "coopsim/cooperation.hpp"

#include <cmath>
#include <stdexcept>

namespace coopsim {

void CoopConfig::validate() const {
  if (stbc_length < 1) throw std::invalid_argument("stbc_length must be at least 1");
  if (stbc_rate <= 0) throw std::invalid_argument("stbc_rate must be positive");
  if (self_select_xi <= 0 || self_select_xi > 1)
    throw std::invalid_argument("self_select_xi must lie in (0, 1]");
}

RandomizationMatrix RandomizationMatrix::draw(int length, int n_relays, Rng& rng) {
  RandomizationMatrix r(length, n_relays);
  double var = 1.0 / length;
  for (int row = 1; row < length; ++row) {
    for (int col = 0; col < n_relays; ++col) {
      r.m_[static_cast<std::size_t>(row) * n_relays + col] = rng.complex_normal(var);
    }
  }
  return r;
}

double RandomizationMatrix::combined_gain(
    const std::vector<std::complex<double>>& h) const {
  double acc = 0.0;
  for (int row = 1; row < length_; ++row) {
    std::complex<double> s{0.0, 0.0};
    for (int col = 0; col < relays_; ++col) s += at(row, col) * h[col];
    acc += std::norm(s);
  }
  return acc;
}

double coop_rate(double rate1, double rate2, double stbc_rate) {
  if (rate1 <= 0 || rate2 <= 0) return 0.0;
  return 1.0 / (1.0 / rate1 + 1.0 / (stbc_rate * rate2));
}

double phase1_time_share(double rate1, double rate2, double stbc_rate) {
  if (rate1 <= 0 || rate2 <= 0) return 0.0;
  return 1.0 / (1.0 + rate1 / (stbc_rate * rate2));
}

bool cooperation_wins(double rate_direct, double rate1, double rate2,
                      double stbc_rate) {
  if (rate1 <= 0 || rate2 <= 0) return false;
  if (rate_direct <= 0) return true;
  return 1.0 / rate1 + 1.0 / (stbc_rate * rate2) < 1.0 / rate_direct;
}

int assigned_phase1_bits(const PhyConfig& phy, int direct_bits, double xi) {
  if (direct_bits <= 0) return phy.base_bits_per_symbol;
  int b = static_cast<int>(std::floor(direct_bits / xi + 1e-9));
  if (b > phy.max_bits_per_symbol) b = phy.max_bits_per_symbol;
  return b;
}

std::vector<std::size_t> self_select(int direct_bits,
                                     const std::vector<int>& bits_to_relay,
                                     double xi, int phase1_bits) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < bits_to_relay.size(); ++i) {
    int b = bits_to_relay[i];
    if (b < phase1_bits) continue;  // could not decode the first hop
    if (direct_bits > 0 && direct_bits > xi * b + 1e-9) continue;
    out.push_back(i);
  }
  return out;
}

CoopOutcome run_recruitment(std::size_t source, const ChannelMatrix& channels,
                            const PhyConfig& phy, const CoopConfig& coop,
                            Rng& rng, double price) {
  CoopOutcome out;
  out.advertised_price = price;
  out.message_trace.push_back(MsgKind::Rts);

  out.bits_direct = direct_bits(phy, channels.gain(source, 0), phy.bep_target);
  out.rate_direct = phy.rate_from_bits(out.bits_direct);
  out.bits_phase1 = assigned_phase1_bits(phy, out.bits_direct, coop.self_select_xi);
  out.rate_phase1 = phy.rate_from_bits(out.bits_phase1);
  out.message_trace.push_back(MsgKind::Crs);

  std::vector<std::size_t> candidates;
  std::vector<int> inbound_bits;
  for (std::size_t node = 1; node < channels.size(); ++node) {
    if (node == source) continue;
    candidates.push_back(node);
    inbound_bits.push_back(
        direct_bits(phy, channels.gain(source, node), phy.bep_phase1()));
  }
  std::vector<std::size_t> picked =
      self_select(out.bits_direct, inbound_bits, coop.self_select_xi, out.bits_phase1);
  for (std::size_t k : picked) out.relay_ids.push_back(candidates[k]);
  out.message_trace.push_back(MsgKind::Hts);

  bool go = false;
  if (!out.relay_ids.empty()) {
    RandomizationMatrix r = RandomizationMatrix::draw(
        coop.stbc_length, static_cast<int>(out.relay_ids.size()), rng);
    std::vector<std::complex<double>> to_ap;
    to_ap.reserve(out.relay_ids.size());
    for (std::size_t node : out.relay_ids) to_ap.push_back(channels.at(node, 0));
    out.effective_gain = channels.gain(source, 0) + r.combined_gain(to_ap);
    out.bits_phase2 = direct_bits(phy, out.effective_gain, phy.bep_phase2());
    out.rate_phase2 = phy.rate_from_bits(out.bits_phase2);
    go = cooperation_wins(out.rate_direct, out.rate_phase1, out.rate_phase2,
                          coop.stbc_rate);
  }
  out.message_trace.push_back(MsgKind::Cts);

  if (go) {
    out.decision = Decision::Cooperative;
    out.rate_coop = coop_rate(out.rate_phase1, out.rate_phase2, coop.stbc_rate);
    out.rho = phase1_time_share(out.rate_phase1, out.rate_phase2, coop.stbc_rate);
    out.message_trace.push_back(MsgKind::DataPhase1);
    out.message_trace.push_back(MsgKind::DataPhase2);
  } else {
    out.decision = Decision::Direct;
    out.message_trace.push_back(MsgKind::DataDirect);
  }
  out.message_trace.push_back(MsgKind::Ack);
  return out;
}

EnergyReport coop_energy(const PhyConfig& phy, double rate_coop, double rate2,
                         double stbc_rate, int n_packets, int n_relays) {
  EnergyReport e;
  double bits = static_cast<double>(n_packets) * phy.packet_bits;
  e.source = bits * phy.symbol_power() / rate_coop;
  e.per_relay = bits * phy.symbol_power() / (stbc_rate * rate2);
  e.total = e.source + n_relays * e.per_relay;
  return e;
}

double direct_equivalent_energy_per_packet(const PhyConfig& phy,
                                           double rate_coop,
                                           double direct_gain) {
  double coeff = snr_coefficient(phy.avg_snr, phy.bep_target);
  double needed = (std::exp2(rate_coop / phy.symbol_rate) - 1.0) / direct_gain;
  double boost = needed / coeff;
  return phy.packet_bits * phy.symbol_power() * boost / rate_coop;
}

}  // namespace coopsim
