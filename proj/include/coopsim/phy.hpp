#pragma once

#include <array>
#include <complex>
#include <vector>

#include "coopsim/rng.hpp"

namespace coopsim {

// Physical layer parameters shared by every link in a cell.
// Rates live on a discrete grid: a link carries an integer number of bits
// per symbol in [0, max_bits_per_symbol], and bit rate = bits * symbol_rate.
struct PhyConfig {
  double symbol_rate = 1.25e6;        // symbols per second
  double avg_snr = 3e8;               // mean SNR at unit channel gain
  double bep_target = 1e-4;           // end to end bit error budget
  double bep_split = 0.9;             // share of the budget spent on hop 1
  int max_bits_per_symbol = 10;
  int base_bits_per_symbol = 1;       // floor used by the recruitment fallback
  int packet_bits = 1000;
  double slot_seconds = 0.002;
  double symbol_energy = 8e-10;       // joules per symbol

  // Throws std::invalid_argument on a nonsensical combination.
  void validate() const;

  double symbol_power() const { return symbol_energy * symbol_rate; }
  double bep_phase1() const { return bep_split * bep_target; }
  double bep_phase2() const { return (1.0 - bep_split) * bep_target; }
  double rate_from_bits(int bits) const { return bits * symbol_rate; }
  // Largest grid constellation not exceeding `rate` bits/s, clamped to
  // [0, max_bits_per_symbol].
  int grid_floor_bits(double rate) const;
};

// Node layout. positions[0] is the access point at the origin.
struct Topology {
  std::vector<std::array<double, 2>> positions;
  double path_loss_exponent = 3.0;
  double coverage_radius = 100.0;

  std::size_t size() const { return positions.size(); }
  double distance(std::size_t a, std::size_t b) const;
};

// Complex link coefficients for one slot. Reciprocal by construction:
// at(a, b) == conj(at(b, a)). at(i, i) is zero.
class ChannelMatrix {
 public:
  explicit ChannelMatrix(std::size_t n) : n_(n), h_(n * n) {}

  std::size_t size() const { return n_; }
  std::complex<double> at(std::size_t a, std::size_t b) const {
    return h_[a * n_ + b];
  }
  double gain(std::size_t a, std::size_t b) const {
    return std::norm(at(a, b));
  }
  void set_pair(std::size_t a, std::size_t b, std::complex<double> v);

 private:
  std::size_t n_;
  std::vector<std::complex<double>> h_;
};

// Rayleigh block fading: each unordered pair gets an independent
// CN(0, d^-path_loss_exponent) draw.
ChannelMatrix draw_channel_matrix(const Topology& topo, Rng& rng);

// SNR scale factor of the adaptive constellation bound for a bit error
// budget `bep`.
double snr_coefficient(double avg_snr, double bep);

// Bits per symbol a link of squared magnitude `gain` sustains at the
// configured error budget; clamped to [0, max_bits].
int adaptive_bits(double coeff, double gain, int max_bits);

// Direct-link bits per symbol toward the AP under error budget `bep`.
int direct_bits(const PhyConfig& phy, double gain, double bep);

// Upper bound on bit error probability when pushing `bits` per symbol
// through a link of squared magnitude `gain`; clipped to 1.
double ber_upper_bound(double avg_snr, double gain, int bits);

// 1 - (1 - ber)^bits_per_packet.
double packet_error_probability(double ber, int bits_per_packet);

// Joules spent per packet on a single uncoded link at bit rate `rate`.
double direct_energy_per_packet(const PhyConfig& phy, double rate);

}  // namespace coopsim
