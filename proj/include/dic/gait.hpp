#pragma once

#include <array>
#include <optional>
#include <vector>

#include "dic/types.hpp"

namespace dic {

// Binary contact state of the four feet, ordered LF, RF, LR, RR.
struct ContactState {
  std::array<bool, 4> c{true, true, true, true};

  bool operator[](int i) const { return c[static_cast<size_t>(i)]; }
  bool operator==(const ContactState& o) const { return c == o.c; }
  int stanceCount() const {
    int n = 0;
    for (bool b : c) n += b ? 1 : 0;
    return n;
  }
  static ContactState all(bool v) { return ContactState{{v, v, v, v}}; }
};

enum class GaitKind { FixedTrot, FixedPronk, VariablePronk, Unconstrained };

// Cycle length is counted in high-level steps (d steps of dt_hl each).
struct GaitMode {
  GaitKind kind = GaitKind::FixedTrot;
  int cycle_steps = 10;  // d; even and >= 2 for fixed gaits

  double cycleFrequency(double dt_hl) const { return 1.0 / (cycle_steps * dt_hl); }
  bool isFixed() const {
    return kind == GaitKind::FixedTrot || kind == GaitKind::FixedPronk;
  }
};

// Contact bits carried by an action: 1 bit for variable pronk, 4 for
// unconstrained gaits.
struct ContactBits {
  int n = 0;
  std::array<bool, 4> bits{false, false, false, false};

  static ContactBits one(bool b) { return ContactBits{1, {b, b, b, b}}; }
  static ContactBits four(bool lf, bool rf, bool lr, bool rr) {
    return ContactBits{4, {lf, rf, lr, rr}};
  }
};

// Desired contact state at high-level step t. Fixed gaits are cyclic
// functions of t; variable/unconstrained gaits take the bits verbatim and
// throw MissingContactBitsError when the bits are absent.
ContactState contactAt(const GaitMode& mode, long t,
                       const std::optional<ContactBits>& action_contacts = std::nullopt);

// Horizon of contact states for steps t .. t+H-1. For variable modes,
// planned bits beyond those provided repeat the last provided bit.
std::vector<ContactState> scheduleWindow(
    const GaitMode& mode, long t, int H,
    const std::vector<ContactBits>& planned_bits = {});

// Steps until the next stance step strictly after t for the given leg
// (fixed gaits only; bounded by one cycle).
int stepsToNextStance(const GaitMode& mode, long t, int leg);

}  // namespace dic
