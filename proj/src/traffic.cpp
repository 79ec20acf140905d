#include "coopsim/traffic.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <stdexcept>

namespace coopsim {

namespace {

int floor_div(int a, int b) {
  int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

int ceil_div(int a, int b) { return -floor_div(-a, b); }

bool frame_before(const GopSpec& spec, const FrameSlot& a, const FrameSlot& b) {
  int da = frame_deadline(spec, a.frame);
  int db = frame_deadline(spec, b.frame);
  if (da != db) return da < db;
  if (a.frame.gop != b.frame.gop) return a.frame.gop < b.frame.gop;
  return a.frame.cls < b.frame.cls;
}

}  // namespace

void GopSpec::validate() const {
  if (period < 1) throw std::invalid_argument("period must be at least 1");
  if (window < 0) throw std::invalid_argument("window must be nonnegative");
  if (classes.empty()) throw std::invalid_argument("at least one frame class required");
  for (const FrameClass& c : classes) {
    if (c.packets < 1) throw std::invalid_argument("frame needs at least one packet");
    if (c.quality < 0) throw std::invalid_argument("quality must be nonnegative");
    if (c.deadline_offset < 0) throw std::invalid_argument("deadline offset must be nonnegative");
  }
  int n = frames_per_gop();
  int span = 1;
  for (const DependencyEdge& e : deps) {
    if (e.from_class < 0 || e.from_class >= n || e.to_class < 0 || e.to_class >= n)
      throw std::invalid_argument("dependency class out of range");
    if (e.gop_delta == 0 && e.from_class == e.to_class)
      throw std::invalid_argument("frame cannot depend on itself");
    int anc = e.gop_delta * period + classes[e.from_class].deadline_offset;
    int dec = classes[e.to_class].deadline_offset;
    if (anc > dec)
      throw std::invalid_argument("ancestor deadline must not exceed descendant deadline");
    if (dec - window > anc + 1)
      throw std::invalid_argument(
          "ancestor would leave the window before the descendant enters");
    span = std::max(span, std::abs(e.gop_delta));
  }
  // cycle check on an unrolled slice of groups wide enough to expose any
  // zero-net-shift dependency loop
  int groups = 2 * span + 3;
  int total = groups * n;
  std::vector<std::vector<int>> adj(total);
  for (int g = 0; g < groups; ++g) {
    for (const DependencyEdge& e : deps) {
      int ag = g + e.gop_delta;
      if (ag < 0 || ag >= groups) continue;
      adj[ag * n + e.from_class].push_back(g * n + e.to_class);
    }
  }
  std::vector<int> color(total, 0);
  std::function<void(int)> dfs = [&](int v) {
    color[v] = 1;
    for (int w : adj[v]) {
      if (color[w] == 1) throw std::invalid_argument("cyclic dependencies");
      if (color[w] == 0) dfs(w);
    }
    color[v] = 2;
  };
  for (int v = 0; v < total; ++v)
    if (color[v] == 0) dfs(v);
}

GopSpec GopSpec::default_ibpb(int packets_per_frame) {
  GopSpec g;
  g.period = 3;
  g.window = 2;
  g.classes = {
      {packets_per_frame, 8.0, 0},  // intra
      {packets_per_frame, 1.0, 1},  // bidirectional
      {packets_per_frame, 4.0, 1},  // forward reference
      {packets_per_frame, 1.0, 3},  // bidirectional, also needs next intra
  };
  g.deps = {
      {0, 0, 1}, {0, 0, 2}, {2, 0, 1}, {2, 0, 3}, {0, 1, 3},
  };
  return g;
}

int frame_deadline(const GopSpec& spec, FrameInstance f) {
  return f.gop * spec.period + spec.classes[f.cls].deadline_offset;
}

std::vector<FrameInstance> schedulable_set(const GopSpec& spec, int slot) {
  std::vector<FrameSlot> tmp;
  for (int c = 0; c < spec.frames_per_gop(); ++c) {
    int off = spec.classes[c].deadline_offset;
    int lo = std::max(0, ceil_div(slot - off, spec.period));
    int hi = floor_div(slot + spec.window - off, spec.period);
    for (int g = lo; g <= hi; ++g) tmp.push_back({{g, c}, 0, false});
  }
  std::sort(tmp.begin(), tmp.end(),
            [&](const FrameSlot& a, const FrameSlot& b) { return frame_before(spec, a, b); });
  std::vector<FrameInstance> out;
  out.reserve(tmp.size());
  for (const FrameSlot& s : tmp) out.push_back(s.frame);
  return out;
}

TrafficState schedulable_state(const GopSpec& spec, int slot) {
  TrafficState st;
  for (FrameInstance f : schedulable_set(spec, slot))
    st.frames.push_back({f, spec.classes[f.cls].packets, false});
  return st;
}

namespace {

int find_frame(const std::vector<FrameSlot>& frames, FrameInstance f) {
  for (std::size_t i = 0; i < frames.size(); ++i)
    if (frames[i].frame == f) return static_cast<int>(i);
  return -1;
}

bool precedence_ok(const GopSpec& spec, const TrafficState& state,
                   const std::vector<int>& y) {
  for (std::size_t j = 0; j < state.frames.size(); ++j) {
    if (y[j] == 0) continue;
    for (const DependencyEdge& e : spec.deps) {
      if (e.to_class != state.frames[j].frame.cls) continue;
      FrameInstance anc{state.frames[j].frame.gop + e.gop_delta, e.from_class};
      int a = find_frame(state.frames, anc);
      if (a >= 0 && state.frames[a].buffer - y[a] > 0) return false;
    }
  }
  return true;
}

}  // namespace

std::vector<std::vector<int>> feasible_actions(const GopSpec& spec,
                                               const TrafficState& state,
                                               int max_packets) {
  std::size_t n = state.frames.size();
  std::vector<std::vector<int>> out;
  std::vector<int> cur(n, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int budget) {
    if (i == n) {
      if (precedence_ok(spec, state, cur)) out.push_back(cur);
      return;
    }
    int cap = state.frames[i].doomed ? 0 : std::min(state.frames[i].buffer, budget);
    for (int v = 0; v <= cap; ++v) {
      cur[i] = v;
      rec(i + 1, budget - v);
    }
    cur[i] = 0;
  };
  rec(0, std::max(0, max_packets));
  return out;
}

double utility(const GopSpec& spec, const TrafficState& state,
               const std::vector<int>& delivered) {
  if (delivered.size() != state.frames.size())
    throw std::invalid_argument("delivery vector size mismatch");
  double u = 0.0;
  for (std::size_t i = 0; i < delivered.size(); ++i) {
    const FrameClass& c = spec.classes[state.frames[i].frame.cls];
    u += c.quality * static_cast<double>(delivered[i]) / c.packets;
  }
  return u;
}

AdvanceResult advance(const GopSpec& spec, const TrafficState& state,
                      const std::vector<int>& delivered, int slot) {
  if (delivered.size() != state.frames.size())
    throw std::invalid_argument("delivery vector size mismatch");
  AdvanceResult res;

  struct Item {
    FrameSlot s;
    bool departing;
  };
  std::vector<Item> items;
  items.reserve(state.frames.size() + 2);
  for (std::size_t i = 0; i < state.frames.size(); ++i) {
    FrameSlot s = state.frames[i];
    int y = delivered[i];
    if (y < 0 || y > s.buffer || (s.doomed && y > 0))
      throw std::invalid_argument("delivery out of range");
    s.buffer -= y;
    items.push_back({s, frame_deadline(spec, s.frame) == slot});
  }
  for (FrameInstance f : schedulable_set(spec, slot + 1)) {
    if (frame_deadline(spec, f) != slot + 1 + spec.window) continue;
    bool present = false;
    for (const Item& it : items) present = present || it.s.frame == f;
    if (present) continue;
    items.push_back({{f, spec.classes[f.cls].packets, false}, false});
    res.admitted_packets += spec.classes[f.cls].packets;
  }

  // A frame leaving incomplete (or already useless) dooms every in-window
  // descendant, including ones leaving at the same time; iterate until the
  // marks stop spreading. Packets of a newly useless frame are written off
  // immediately, after which its buffer is reset so useless frames all look
  // alike to the scheduler.
  auto mark = [&](Item& it) {
    if (it.s.doomed) return false;
    it.s.doomed = true;
    int full = spec.classes[it.s.frame.cls].packets;
    res.dropped_packets += full - it.s.buffer;
    res.expired_packets += it.s.buffer;
    it.s.buffer = full;
    return true;
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (const Item& anc : items) {
      if (!anc.departing) continue;
      if (!anc.s.doomed && anc.s.buffer == 0) continue;  // left cleanly
      for (const DependencyEdge& e : spec.deps) {
        if (e.from_class != anc.s.frame.cls) continue;
        FrameInstance target{anc.s.frame.gop - e.gop_delta, e.to_class};
        for (Item& dep : items)
          if (dep.s.frame == target) changed = mark(dep) || changed;
      }
    }
  }

  for (const Item& it : items) {
    if (!it.departing) {
      res.state.frames.push_back(it.s);
      continue;
    }
    if (it.s.doomed) {
      ++res.undecodable_frames;
    } else if (it.s.buffer == 0) {
      ++res.completed_frames;
      res.realized_utility += spec.classes[it.s.frame.cls].quality;
    } else {
      int full = spec.classes[it.s.frame.cls].packets;
      res.expired_packets += it.s.buffer;
      res.dropped_packets += full - it.s.buffer;
    }
  }
  std::sort(res.state.frames.begin(), res.state.frames.end(),
            [&](const FrameSlot& a, const FrameSlot& b) { return frame_before(spec, a, b); });
  return res;
}

}  // namespace coopsim
