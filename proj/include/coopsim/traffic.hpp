#pragma once

#include <vector>

namespace coopsim {

// One frame type within a group of pictures.
struct FrameClass {
  int packets = 4;            // transport packets per frame
  double quality = 1.0;       // utility of a decodable, fully received frame
  int deadline_offset = 0;    // playout slot relative to the group start
};

// `to_class` of group g needs `from_class` of group (g + gop_delta) to decode.
struct DependencyEdge {
  int from_class = 0;
  int gop_delta = 0;
  int to_class = 0;
};

// Periodic traffic pattern. A group of classes.size() frames arrives every
// `period` slots; frame (g, c) must be fully received by the end of slot
// g * period + deadline_offset[c] and may be served during the `window + 1`
// slots leading up to that.
struct GopSpec {
  int period = 3;
  int window = 2;
  std::vector<FrameClass> classes;
  std::vector<DependencyEdge> deps;

  int frames_per_gop() const { return static_cast<int>(classes.size()); }

  // Rejects specs whose dependencies cannot be tracked with a sliding
  // window: an ancestor must never reach its deadline more than one slot
  // before its descendant becomes schedulable, must not outlive the
  // descendant's deadline, and the dependency graph must be acyclic.
  void validate() const;

  // I B P B pattern: the leading intra frame unlocks the whole group, the
  // mid-group reference unlocks both bidirectional frames, and the trailing
  // bidirectional frame also needs the next group's intra frame.
  static GopSpec default_ibpb(int packets_per_frame = 4);
};

struct FrameInstance {
  int gop = 0;
  int cls = 0;
  friend bool operator==(const FrameInstance& a, const FrameInstance& b) {
    return a.gop == b.gop && a.cls == b.cls;
  }
};

struct FrameSlot {
  FrameInstance frame;
  int buffer = 0;      // packets still to deliver
  bool doomed = false; // an ancestor left undecodable; the frame is waste
  friend bool operator==(const FrameSlot& a, const FrameSlot& b) {
    return a.frame == b.frame && a.buffer == b.buffer && a.doomed == b.doomed;
  }
};

// Frames currently inside the scheduling window, sorted by
// (deadline, gop, cls).
struct TrafficState {
  std::vector<FrameSlot> frames;
  friend bool operator==(const TrafficState& a, const TrafficState& b) {
    return a.frames == b.frames;
  }
};

int frame_deadline(const GopSpec& spec, FrameInstance f);

// Frame instances with deadline in [slot, slot + window], canonical order.
std::vector<FrameInstance> schedulable_set(const GopSpec& spec, int slot);

// Fresh state at `slot`: every schedulable frame with a full buffer.
TrafficState schedulable_state(const GopSpec& spec, int slot);

// All per-frame packet vectors y with 0 <= y_i <= buffer_i, sum <=
// max_packets, nothing for doomed frames, and no packet for a frame whose
// in-window ancestor would be left incomplete by the same action.
std::vector<std::vector<int>> feasible_actions(const GopSpec& spec,
                                               const TrafficState& state,
                                               int max_packets);

// Scheduling reward of an action: sum of quality * delivered / packets.
double utility(const GopSpec& spec, const TrafficState& state,
               const std::vector<int>& delivered);

struct AdvanceResult {
  TrafficState state;
  int admitted_packets = 0;   // buffer entering the window this transition
  int expired_packets = 0;    // packets that will never be transmitted
  int dropped_packets = 0;    // packets delivered to a frame that ends up useless
  int completed_frames = 0;   // left the window delivered and decodable
  int undecodable_frames = 0; // left the window with a broken ancestor
  double realized_utility = 0.0;  // quality credited for completed frames
};

// End-of-slot transition from `slot` to `slot + 1`. `delivered` is aligned
// with state.frames and may be any value in [0, buffer] per frame; receiver
// side losses can therefore produce states a cost-aware scheduler never
// aims for. Frames at their deadline leave (credited, expired or
// undecodable), failures doom in-window descendants, and frames entering
// the window are admitted with full buffers.
AdvanceResult advance(const GopSpec& spec, const TrafficState& state,
                      const std::vector<int>& delivered, int slot);

}  // namespace coopsim
