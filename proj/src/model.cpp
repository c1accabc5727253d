#include "e2r/model.hpp"

#include <algorithm>
#include <stdexcept>

namespace e2r {

Genome genome_clamp(Genome g) {
  if (g.size() < 4 || g.size() % 3 != 1) {
    throw std::invalid_argument("genome length must be 3*J+1, got " + std::to_string(g.size()));
  }
  for (double& v : g.genes) v = std::clamp(v, -1.0, 1.0);
  return g;
}

bool genome_in_range(const Genome& g) {
  return std::all_of(g.genes.begin(), g.genes.end(),
                     [](double v) { return v >= -1.0 && v <= 1.0; });
}

Vec2 BehaviorDescriptor::position(int s) const {
  switch (s) {
    case slot::object_final: return object_final;
    case slot::touch_pos: return touch_pos;
    case slot::mid_pos: return mid_pos;
    default: throw std::invalid_argument("slot " + std::to_string(s) + " is not a position slot");
  }
}

double BehaviorDescriptor::angle(int s) const {
  switch (s) {
    case slot::touch_angle: return touch_angle;
    case slot::mid_angle: return mid_angle;
    default: throw std::invalid_argument("slot " + std::to_string(s) + " is not an angle slot");
  }
}

std::string to_string(MutationKind k) {
  switch (k) {
    case MutationKind::Init: return "init";
    case MutationKind::Explore: return "explore";
    case MutationKind::Refine: return "refine";
    case MutationKind::Uniform: return "uniform";
  }
  return "unknown";
}

std::optional<MutationKind> mutation_kind_from(const std::string& name) {
  if (name == "init") return MutationKind::Init;
  if (name == "explore") return MutationKind::Explore;
  if (name == "refine") return MutationKind::Refine;
  if (name == "uniform") return MutationKind::Uniform;
  return std::nullopt;
}

std::string to_string(Phase p) {
  switch (p) {
    case Phase::Approach: return "approach";
    case Phase::Closing: return "closing";
    case Phase::PostClosure: return "post_closure";
  }
  return "unknown";
}

}  // namespace e2r
