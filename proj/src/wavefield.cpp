#include "pfwi/wavefield.hpp"

namespace pfwi {

NodeSet field_nodes(std::size_t field, std::size_t n1) {
  switch (field) {
    case kV1:
    case kQ1: return NodeSet::X;
    case kV3:
    case kQ3: return NodeSet::Z;
    case kTau13: return NodeSet::XZ;
    case kTau11:
    case kTau33:
    case kNegP: return NodeSet::C;
    default: return field < kThetaBase + n1 ? NodeSet::X : NodeSet::Z;
  }
}

std::string field_name(std::size_t field, std::size_t n1) {
  static const char* names[] = {"v1", "v3", "q1", "q3", "tau11", "tau33", "tau13", "neg_p"};
  if (field < kThetaBase) return names[field];
  if (field < kThetaBase + n1) return "theta1_" + std::to_string(field - kThetaBase);
  return "theta3_" + std::to_string(field - kThetaBase - n1);
}

}  // namespace pfwi
