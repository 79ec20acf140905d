#include "coopsim/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

namespace coopsim {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr long kMaxTrafficStates = 5'000'000;

struct PhaseLayout {
  std::vector<FrameInstance> frames;
  std::vector<int> radix;  // packets + 2 per frame (buffer levels plus doomed)
};

PhaseLayout phase_layout(const GopSpec& spec, int base, int phase) {
  PhaseLayout pl;
  pl.frames = schedulable_set(spec, base + phase);
  for (FrameInstance f : pl.frames)
    pl.radix.push_back(spec.classes[f.cls].packets + 2);
  return pl;
}

long layout_size(const PhaseLayout& pl) {
  long s = 1;
  for (int r : pl.radix) {
    s *= r;
    if (s > kMaxTrafficStates) throw std::invalid_argument("traffic state space too large");
  }
  return s;
}

long encode_state(const GopSpec& spec, const PhaseLayout& pl,
                  const TrafficState& st) {
  if (st.frames.size() != pl.frames.size())
    throw std::invalid_argument("state does not match the window layout");
  long idx = 0;
  for (std::size_t j = 0; j < pl.frames.size(); ++j) {
    const FrameSlot& s = st.frames[j];
    if (!(s.frame == pl.frames[j]))
      throw std::invalid_argument("state holds an unexpected frame instance");
    int full = spec.classes[s.frame.cls].packets;
    int digit;
    if (s.doomed) {
      if (s.buffer != full)
        throw std::invalid_argument("useless frames must carry a reset buffer");
      digit = full + 1;
    } else {
      if (s.buffer < 0 || s.buffer > full)
        throw std::invalid_argument("buffer out of range");
      digit = s.buffer;
    }
    idx = idx * pl.radix[j] + digit;
  }
  return idx;
}

TrafficState decode_state(const GopSpec& spec, const PhaseLayout& pl, long idx) {
  TrafficState st;
  st.frames.resize(pl.frames.size());
  for (int j = static_cast<int>(pl.frames.size()) - 1; j >= 0; --j) {
    int digit = static_cast<int>(idx % pl.radix[j]);
    idx /= pl.radix[j];
    int full = spec.classes[pl.frames[j].cls].packets;
    if (digit == full + 1)
      st.frames[j] = {pl.frames[j], full, true};
    else
      st.frames[j] = {pl.frames[j], digit, false};
  }
  return st;
}

}  // namespace

CompiledGop compile_gop(const GopSpec& spec, int max_packets) {
  spec.validate();
  CompiledGop cg;
  cg.spec = spec;
  int max_off = 0;
  for (const FrameClass& c : spec.classes)
    max_off = std::max(max_off, c.deadline_offset);
  cg.reference_base = spec.period * (1 + max_off / spec.period);

  std::vector<PhaseLayout> layouts;
  long total = 0;
  for (int p = 0; p < spec.period; ++p) {
    layouts.push_back(phase_layout(spec, cg.reference_base, p));
    cg.phase_offset.push_back(total);
    total += layout_size(layouts.back());
    if (total > kMaxTrafficStates)
      throw std::invalid_argument("traffic state space too large");
  }

  cg.traffic.resize(total);
  cg.phase_of.resize(total);
  for (int p = 0; p < spec.period; ++p) {
    long size = layout_size(layouts[p]);
    for (long i = 0; i < size; ++i) {
      cg.traffic[cg.phase_offset[p] + i] = decode_state(spec, layouts[p], i);
      cg.phase_of[cg.phase_offset[p] + i] = p;
    }
  }

  cg.mdp.max_packets = max_packets;
  cg.mdp.states.resize(total);
  for (long s = 0; s < total; ++s) {
    int p = cg.phase_of[s];
    int slot = cg.reference_base + p;
    int np = (p + 1) % spec.period;
    int shift = (p + 1 == spec.period) ? 1 : 0;
    for (std::vector<int>& y : feasible_actions(spec, cg.traffic[s], max_packets)) {
      AdvanceResult r = advance(spec, cg.traffic[s], y, slot);
      if (shift)
        for (FrameSlot& fs : r.state.frames) fs.frame.gop -= shift;
      long nidx = cg.phase_offset[np] + encode_state(spec, layouts[np], r.state);
      MdpAction a;
      a.packets = std::accumulate(y.begin(), y.end(), 0);
      a.utility = utility(spec, cg.traffic[s], y);
      a.next = static_cast<int>(nidx);
      a.delivery = std::move(y);
      cg.mdp.states[s].push_back(std::move(a));
    }
  }

  cg.initial = state_index(cg, schedulable_state(spec, cg.reference_base),
                           cg.reference_base);
  return cg;
}

int state_index(const CompiledGop& cg, const TrafficState& st, int slot) {
  int period = cg.spec.period;
  int rel = slot - cg.reference_base;
  int phase = ((rel % period) + period) % period;
  int shift = (rel - phase) / period;
  PhaseLayout pl = phase_layout(cg.spec, cg.reference_base, phase);
  // Walk the layout and pick up the observed frames in order. A window
  // position whose group started before slot 0 never appears in an episode
  // state (the stream opens with a partial window); it stands in as an
  // already delivered frame so early slots still map onto the periodic
  // chain.
  TrafficState norm;
  norm.frames.reserve(pl.frames.size());
  std::size_t cur = 0;
  for (const FrameInstance& f : pl.frames) {
    FrameInstance seen{f.gop + shift, f.cls};
    if (cur < st.frames.size() && st.frames[cur].frame == seen) {
      norm.frames.push_back({f, st.frames[cur].buffer, st.frames[cur].doomed});
      ++cur;
    } else if (seen.gop < 0) {
      norm.frames.push_back({f, 0, false});
    } else {
      throw std::invalid_argument("state does not match the window layout");
    }
  }
  if (cur != st.frames.size())
    throw std::invalid_argument("state holds an unexpected frame instance");
  return static_cast<int>(cg.phase_offset[phase] + encode_state(cg.spec, pl, norm));
}

std::vector<FrameInstance> window_frames(const CompiledGop& cg, int slot) {
  int period = cg.spec.period;
  int rel = slot - cg.reference_base;
  int phase = ((rel % period) + period) % period;
  int shift = (rel - phase) / period;
  std::vector<FrameInstance> out =
      schedulable_set(cg.spec, cg.reference_base + phase);
  for (FrameInstance& f : out) f.gop += shift;
  return out;
}

int packet_budget(double slot_seconds, int packet_bits, double rate) {
  if (!(rate > 0)) return 0;
  double k = slot_seconds * rate / packet_bits + 1e-9;
  if (k > 1e9) k = 1e9;
  return static_cast<int>(std::floor(k));
}

double resource_per_packet(double slot_seconds, int packet_bits, double rate) {
  if (!(rate > 0)) return 0.0;
  return packet_bits / (slot_seconds * rate);
}

RateModel rate_model(double slot_seconds, int packet_bits, const RatePmf& pmf) {
  if (pmf.rates.size() != pmf.probs.size())
    throw std::invalid_argument("pmf arrays must match");
  if (pmf.rates.empty()) throw std::invalid_argument("empty rate pmf");
  double total = 0.0;
  for (std::size_t i = 0; i < pmf.rates.size(); ++i) {
    if (i > 0 && !(pmf.rates[i] > pmf.rates[i - 1]))
      throw std::invalid_argument("rates must be strictly increasing");
    if (pmf.probs[i] < 0) throw std::invalid_argument("negative probability");
    total += pmf.probs[i];
  }
  if (!(total > 0)) throw std::invalid_argument("pmf has no mass");
  RateModel rm;
  rm.rates = pmf.rates;
  for (double p : pmf.probs) rm.probs.push_back(p / total);
  for (double r : pmf.rates) {
    rm.caps.push_back(packet_budget(slot_seconds, packet_bits, r));
    rm.cost.push_back(resource_per_packet(slot_seconds, packet_bits, r));
  }
  return rm;
}

int rate_bin_floor(const std::vector<double>& rates, double rate) {
  int best = -1;
  for (std::size_t i = 0; i < rates.size(); ++i)
    if (rates[i] <= rate) best = static_cast<int>(i);
  return best;
}

ValueIterationResult value_iteration(
    const FiniteTrafficMdp& mdp, const RateModel& rm, double lambda,
    double alpha, double share, double tol, int max_iter,
    const std::vector<std::vector<double>>* warm_start) {
  std::size_t nT = mdp.states.size();
  std::size_t nR = rm.rates.size();
  if (nT == 0) throw std::invalid_argument("empty traffic chain");
  if (alpha < 0 || alpha >= 1) throw std::invalid_argument("alpha must lie in [0, 1)");

  int maxcap = 0;
  for (int c : rm.caps) maxcap = std::max(maxcap, c);
  maxcap = std::min(maxcap, mdp.max_packets);

  ValueIterationResult res;
  if (warm_start) {
    if (warm_start->size() != nT || (nT && (*warm_start)[0].size() != nR))
      throw std::invalid_argument("warm start shape mismatch");
    res.value = *warm_start;
  } else {
    res.value.assign(nT, std::vector<double>(nR, 0.0));
  }

  std::vector<std::vector<double>> next(nT, std::vector<double>(nR, 0.0));
  std::vector<double> w(nT, 0.0);
  std::vector<double> g(maxcap + 1, kNegInf);

  for (int iter = 1; iter <= max_iter; ++iter) {
    for (std::size_t t = 0; t < nT; ++t) {
      double acc = 0.0;
      for (std::size_t r = 0; r < nR; ++r) acc += rm.probs[r] * res.value[t][r];
      w[t] = acc;
    }
    double delta = 0.0;
    for (std::size_t t = 0; t < nT; ++t) {
      std::fill(g.begin(), g.end(), kNegInf);
      for (const MdpAction& a : mdp.states[t]) {
        if (a.packets > maxcap) continue;
        double v = a.utility + alpha * w[a.next];
        if (v > g[a.packets]) g[a.packets] = v;
      }
      for (std::size_t r = 0; r < nR; ++r) {
        int cap = std::min(rm.caps[r], maxcap);
        double cost = lambda * rm.cost[r];
        double best = kNegInf;
        for (int k = 0; k <= cap; ++k) {
          if (g[k] == kNegInf) continue;
          double v = g[k] - cost * k;
          if (v > best) best = v;
        }
        double nv = best + lambda * share;
        double d = std::fabs(nv - res.value[t][r]);
        if (d > delta) delta = d;
        next[t][r] = nv;
      }
    }
    res.value.swap(next);
    res.delta_history.push_back(delta);
    res.iterations = iter;
    res.last_delta = delta;
    if (delta < tol) {
      res.converged = true;
      break;
    }
  }

  // greedy policy w.r.t. the final value; ties go to fewer packets, then to
  // the lexicographically smallest delivery (the enumeration order)
  for (std::size_t t = 0; t < nT; ++t) {
    double acc = 0.0;
    for (std::size_t r = 0; r < nR; ++r) acc += rm.probs[r] * res.value[t][r];
    w[t] = acc;
  }
  res.policy.assign(nT, std::vector<int>(nR, -1));
  std::vector<int> order;
  for (std::size_t t = 0; t < nT; ++t) {
    order.resize(mdp.states[t].size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return mdp.states[t][a].packets < mdp.states[t][b].packets;
    });
    for (std::size_t r = 0; r < nR; ++r) {
      int cap = std::min(rm.caps[r], mdp.max_packets);
      double cost = lambda * rm.cost[r];
      double best = kNegInf;
      int pick = -1;
      for (int i : order) {
        const MdpAction& a = mdp.states[t][i];
        if (a.packets > cap) continue;
        double v = a.utility - cost * a.packets + alpha * w[a.next];
        if (v > best) {
          best = v;
          pick = i;
        }
      }
      res.policy[t][r] = pick;
    }
  }
  return res;
}

double expected_resource(const FiniteTrafficMdp& mdp, const RateModel& rm,
                         const std::vector<std::vector<int>>& policy,
                         int initial_traffic, double alpha, double tol) {
  std::size_t nT = mdp.states.size();
  std::size_t nR = rm.rates.size();
  if (policy.size() != nT) throw std::invalid_argument("policy shape mismatch");

  std::vector<std::vector<double>> x(nT, std::vector<double>(nR, 0.0));
  std::vector<std::vector<double>> nx(nT, std::vector<double>(nR, 0.0));
  std::vector<double> w(nT, 0.0);
  for (int iter = 0; iter < 1000000; ++iter) {
    for (std::size_t t = 0; t < nT; ++t) {
      double acc = 0.0;
      for (std::size_t r = 0; r < nR; ++r) acc += rm.probs[r] * x[t][r];
      w[t] = acc;
    }
    double delta = 0.0;
    for (std::size_t t = 0; t < nT; ++t) {
      for (std::size_t r = 0; r < nR; ++r) {
        int pick = policy[t][r];
        if (pick < 0) throw std::invalid_argument("policy has an uncovered state");
        const MdpAction& a = mdp.states[t][pick];
        double v = a.packets * rm.cost[r] + alpha * w[a.next];
        delta = std::max(delta, std::fabs(v - x[t][r]));
        nx[t][r] = v;
      }
    }
    x.swap(nx);
    if (delta < tol) break;
  }
  double out = 0.0;
  for (std::size_t r = 0; r < nR; ++r) out += rm.probs[r] * x[initial_traffic][r];
  return out;
}

RatePmf estimate_rate_pmf(std::size_t user, const Topology& topo,
                          const PhyConfig& phy, const CoopConfig& coop,
                          int n_samples, Rng& rng, bool coop_enabled) {
  if (n_samples < 1) throw std::invalid_argument("need at least one sample");
  std::map<double, long> counts;
  for (int s = 0; s < n_samples; ++s) {
    ChannelMatrix m = draw_channel_matrix(topo, rng);
    double rate;
    if (coop_enabled) {
      CoopOutcome o = run_recruitment(user, m, phy, coop, rng);
      // two-hop rates land between constellations; floor them onto the grid
      // so the solver sees a bounded bin count
      rate = o.decision == Decision::Cooperative
                 ? phy.rate_from_bits(phy.grid_floor_bits(o.rate_coop))
                 : o.rate_direct;
    } else {
      rate = phy.rate_from_bits(direct_bits(phy, m.gain(user, 0), phy.bep_target));
    }
    ++counts[rate];
  }
  RatePmf pmf;
  for (const auto& [rate, n] : counts) {
    pmf.rates.push_back(rate);
    pmf.probs.push_back(static_cast<double>(n) / n_samples);
  }
  return pmf;
}

RatePmf opportunistic_pmf(const std::vector<RatePair>& pairs) {
  std::map<double, double> mass;
  for (const RatePair& p : pairs) mass[std::max(p.beta_direct, p.beta_coop)] += p.prob;
  RatePmf pmf;
  for (const auto& [rate, prob] : mass) {
    pmf.rates.push_back(rate);
    pmf.probs.push_back(prob);
  }
  return pmf;
}

std::vector<std::vector<double>> augmented_brute_force(
    const AugmentedInstance& inst, double tol, int max_iter) {
  if (!inst.mdp) throw std::invalid_argument("missing traffic chain");
  const FiniteTrafficMdp& mdp = *inst.mdp;
  std::size_t nT = mdp.states.size();
  std::size_t nP = inst.pairs.size();
  if (nP == 0) throw std::invalid_argument("no rate pairs");

  long work = 0;
  for (const auto& acts : mdp.states) work += static_cast<long>(acts.size());
  if (work * static_cast<long>(nP) > 10000)
    throw std::invalid_argument("instance too large for the reference solver");

  std::vector<std::vector<double>> v(nT, std::vector<double>(nP, 0.0));
  std::vector<std::vector<double>> nv(nT, std::vector<double>(nP, 0.0));
  for (int iter = 0; iter < max_iter; ++iter) {
    double delta = 0.0;
    for (std::size_t t = 0; t < nT; ++t) {
      for (std::size_t p = 0; p < nP; ++p) {
        double best = kNegInf;
        for (int coop = 0; coop < 2; ++coop) {
          double rate = coop ? inst.pairs[p].beta_coop : inst.pairs[p].beta_direct;
          int cap = packet_budget(inst.slot_seconds, inst.packet_bits, rate);
          double unit = resource_per_packet(inst.slot_seconds, inst.packet_bits, rate);
          for (const MdpAction& a : mdp.states[t]) {
            if (a.packets > cap) continue;
            double future = 0.0;
            for (std::size_t q = 0; q < nP; ++q)
              future += inst.pairs[q].prob * v[a.next][q];
            double val = a.utility -
                         inst.lambda * (unit * a.packets - inst.share) +
                         inst.alpha * future;
            if (val > best) best = val;
          }
        }
        delta = std::max(delta, std::fabs(best - v[t][p]));
        nv[t][p] = best;
      }
    }
    v.swap(nv);
    if (delta < tol) break;
  }
  return v;
}

}  // namespace coopsim
