#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "coopsim/phy.hpp"
#include "coopsim/rng.hpp"

namespace coopsim {

// Two-hop relaying parameters.
struct CoopConfig {
  int stbc_length = 2;          // rows of the randomized space-time code
  double stbc_rate = 1.0;       // code rate of the second hop
  double self_select_xi = 0.2;  // recruitment threshold, in (0, 1]

  void validate() const;
};

// Random linear dispersion applied by the recruited relays. Row 0 is zero
// because the source keeps the first antenna slot of the code for itself;
// remaining entries are CN(0, 1/length).
class RandomizationMatrix {
 public:
  static RandomizationMatrix draw(int length, int n_relays, Rng& rng);

  int length() const { return length_; }
  int relays() const { return relays_; }
  std::complex<double> at(int row, int col) const {
    return m_[static_cast<std::size_t>(row) * relays_ + col];
  }

  // Squared norm of the matrix-vector product with the relay-to-AP
  // coefficient vector.
  double combined_gain(const std::vector<std::complex<double>>& h) const;

 private:
  RandomizationMatrix(int length, int relays)
      : length_(length), relays_(relays),
        m_(static_cast<std::size_t>(length) * relays) {}

  int length_;
  int relays_;
  std::vector<std::complex<double>> m_;
};

// Serial two-hop rate: the stream runs at rate1 for the first hop and
// rate2 * stbc_rate for the second, so the end to end rate is the harmonic
// combination 1/r = 1/rate1 + 1/(stbc_rate * rate2).
double coop_rate(double rate1, double rate2, double stbc_rate);

// Fraction of the transmission spent in the first hop. Satisfies
// coop_rate == share * rate1.
double phase1_time_share(double rate1, double rate2, double stbc_rate);

// True when two-hop beats the direct link: coop_rate > rate_direct.
bool cooperation_wins(double rate_direct, double rate1, double rate2,
                      double stbc_rate);

// First-hop constellation assigned by the AP: floor(direct_bits / xi)
// clamped to the grid. A dead direct link falls back to the base
// constellation so the node is not stranded.
int assigned_phase1_bits(const PhyConfig& phy, int direct_bits, double xi);

// Indices (into `bits_to_relay`) of relays that volunteer: their inbound
// link must be at least 1/xi times the direct one, and they must be able
// to decode the assigned first-hop constellation.
std::vector<std::size_t> self_select(int direct_bits,
                                     const std::vector<int>& bits_to_relay,
                                     double xi, int phase1_bits);

// Control and data exchanges of one recruitment round, in order.
enum class MsgKind {
  Rts,          // source pilot
  Crs,          // AP broadcasts direct rate and first-hop assignment
  Hts,          // volunteer window (present even when nobody volunteers)
  Cts,          // AP broadcasts go/no-go, second-hop rate and price
  DataPhase1,
  DataPhase2,
  DataDirect,
  Ack,
};

enum class Decision { Direct, Cooperative };

struct CoopOutcome {
  Decision decision = Decision::Direct;
  std::vector<std::size_t> relay_ids;  // node indices of the volunteer set
  int bits_direct = 0;
  double rate_direct = 0.0;
  int bits_phase1 = 0;
  double rate_phase1 = 0.0;
  int bits_phase2 = 0;
  double rate_phase2 = 0.0;
  double rate_coop = 0.0;       // end to end rate when cooperative
  double rho = 0.0;             // first-hop time share when cooperative
  double effective_gain = 0.0;  // squared norm of the composite channel
  double advertised_price = 0.0;
  std::vector<MsgKind> message_trace;
};

// One full recruitment round for `source` (node index, AP is node 0).
// Every other node is a candidate relay. `rng` drives the dispersion
// matrix draw; `price` is only echoed into the outcome.
CoopOutcome run_recruitment(std::size_t source, const ChannelMatrix& channels,
                            const PhyConfig& phy, const CoopConfig& coop,
                            Rng& rng, double price = 0.0);

struct EnergyReport {
  double source = 0.0;     // joules spent by the source
  double per_relay = 0.0;  // joules spent by each recruited relay
  double total = 0.0;
};

// Energy for `n_packets` carried cooperatively. The source radiates for the
// whole transmission (it owns the first code slot); each relay only for the
// second hop.
EnergyReport coop_energy(const PhyConfig& phy, double rate_coop, double rate2,
                         double stbc_rate, int n_packets, int n_relays);

// Joules per packet a direct transmission would need, with power scaled up
// so the raw direct link sustains `rate_coop`.
double direct_equivalent_energy_per_packet(const PhyConfig& phy,
                                           double rate_coop,
                                           double direct_gain);

}  // namespace coopsim
