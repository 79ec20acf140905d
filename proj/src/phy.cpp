#include "coopsim/phy.hpp"

#include <cmath>
#include <stdexcept>

namespace coopsim {

void PhyConfig::validate() const {
  if (symbol_rate <= 0) throw std::invalid_argument("symbol_rate must be positive");
  if (avg_snr <= 0) throw std::invalid_argument("avg_snr must be positive");
  if (bep_target <= 0 || bep_target >= 1)
    throw std::invalid_argument("bep_target must lie in (0, 1)");
  if (bep_split <= 0 || bep_split >= 1)
    throw std::invalid_argument("bep_split must lie in (0, 1)");
  if (max_bits_per_symbol < 1)
    throw std::invalid_argument("max_bits_per_symbol must be at least 1");
  if (base_bits_per_symbol < 1 || base_bits_per_symbol > max_bits_per_symbol)
    throw std::invalid_argument("base_bits_per_symbol out of range");
  if (packet_bits < 1) throw std::invalid_argument("packet_bits must be positive");
  if (slot_seconds <= 0) throw std::invalid_argument("slot_seconds must be positive");
  if (symbol_energy <= 0) throw std::invalid_argument("symbol_energy must be positive");
}

int PhyConfig::grid_floor_bits(double rate) const {
  if (!(rate > 0)) return 0;
  int b = static_cast<int>(std::floor(rate / symbol_rate + 1e-9));
  if (b < 0) b = 0;
  if (b > max_bits_per_symbol) b = max_bits_per_symbol;
  return b;
}

double Topology::distance(std::size_t a, std::size_t b) const {
  double dx = positions[a][0] - positions[b][0];
  double dy = positions[a][1] - positions[b][1];
  return std::hypot(dx, dy);
}

void ChannelMatrix::set_pair(std::size_t a, std::size_t b, std::complex<double> v) {
  h_[a * n_ + b] = v;
  h_[b * n_ + a] = std::conj(v);
}

ChannelMatrix draw_channel_matrix(const Topology& topo, Rng& rng) {
  std::size_t n = topo.size();
  ChannelMatrix m(n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      double d = topo.distance(a, b);
      double var = std::pow(d, -topo.path_loss_exponent);
      m.set_pair(a, b, rng.complex_normal(var));
    }
  }
  return m;
}

double snr_coefficient(double avg_snr, double bep) {
  return 1.5 * avg_snr / std::fabs(std::log(bep / 4.0));
}

int adaptive_bits(double coeff, double gain, int max_bits) {
  double arg = 1.0 + coeff * gain;
  if (!(arg > 1.0)) return 0;
  int b = static_cast<int>(std::floor(std::log2(arg)));
  if (b < 0) b = 0;
  if (b > max_bits) b = max_bits;
  return b;
}

int direct_bits(const PhyConfig& phy, double gain, double bep) {
  return adaptive_bits(snr_coefficient(phy.avg_snr, bep), gain,
                       phy.max_bits_per_symbol);
}

double ber_upper_bound(double avg_snr, double gain, int bits) {
  if (bits < 1) return 0.0;
  double denom = std::exp2(bits) - 1.0;
  double v = 4.0 * std::exp(-1.5 * avg_snr * gain / denom);
  return v < 1.0 ? v : 1.0;
}

double packet_error_probability(double ber, int bits_per_packet) {
  if (ber <= 0) return 0.0;
  if (ber >= 1) return 1.0;
  return -std::expm1(bits_per_packet * std::log1p(-ber));
}

double direct_energy_per_packet(const PhyConfig& phy, double rate) {
  return phy.packet_bits * phy.symbol_power() / rate;
}

}  // namespace coopsim
