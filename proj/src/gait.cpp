#include "dic/gait.hpp"

#include "dic/errors.hpp"

namespace dic {
namespace {

long positiveMod(long t, long d) {
  long m = t % d;
  return m < 0 ? m + d : m;
}

}  // namespace

ContactState contactAt(const GaitMode& mode, long t,
                       const std::optional<ContactBits>& action_contacts) {
  switch (mode.kind) {
    case GaitKind::FixedTrot: {
      const long d = mode.cycle_steps;
      return positiveMod(t, d) < d / 2 ? ContactState{{true, false, false, true}}
                                       : ContactState{{false, true, true, false}};
    }
    case GaitKind::FixedPronk: {
      const long d = mode.cycle_steps;
      return ContactState::all(positiveMod(t, d) < d / 2);
    }
    case GaitKind::VariablePronk: {
      if (!action_contacts || action_contacts->n < 1)
        throw MissingContactBitsError("variable pronk requires one contact bit");
      return ContactState::all(action_contacts->bits[0]);
    }
    case GaitKind::Unconstrained: {
      if (!action_contacts || action_contacts->n != 4)
        throw MissingContactBitsError("unconstrained gait requires four contact bits");
      return ContactState{action_contacts->bits};
    }
  }
  return ContactState::all(true);
}

std::vector<ContactState> scheduleWindow(const GaitMode& mode, long t, int H,
                                         const std::vector<ContactBits>& planned_bits) {
  std::vector<ContactState> out;
  out.reserve(static_cast<size_t>(H));
  for (int i = 0; i < H; ++i) {
    if (mode.isFixed()) {
      out.push_back(contactAt(mode, t + i));
    } else {
      if (planned_bits.empty())
        throw MissingContactBitsError("variable gait window requires planned bits");
      const size_t idx = std::min(static_cast<size_t>(i), planned_bits.size() - 1);
      out.push_back(contactAt(mode, t + i, planned_bits[idx]));
    }
  }
  return out;
}

int stepsToNextStance(const GaitMode& mode, long t, int leg) {
  for (int j = 1; j <= mode.cycle_steps; ++j) {
    if (contactAt(mode, t + j)[leg]) return j;
  }
  return mode.cycle_steps;
}

}  // namespace dic
