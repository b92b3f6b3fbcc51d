#pragma once

#include <string_view>
#include <vector>

namespace secstore::instances {

// Bundled demonstration instances, one per structural situation the library
// handles. The same texts ship as files under instances/ for direct CLI use;
// a test keeps the two copies in sync.

struct Instance {
  std::string_view name;
  std::string_view text;
};

inline constexpr std::string_view kSingleEdge =
    "# Smallest possible instance: one pair of servers, one demanded source.\n"
    "# Both endpoints see only this demand, so no key is needed.\n"
    "K 1\n"
    "M 1\n"
    "edge A B 1\n";

inline constexpr std::string_view kCycle4 =
    "# Four servers in a cycle, alternating demands for sources 1 and 2.\n"
    "# Every demanded edge crosses two different unqualified components, so\n"
    "# one shared key symbol suffices: key rate 1.\n"
    "K 2\n"
    "M 1\n"
    "edge V1 V2 1\n"
    "edge V2 V3 2\n"
    "edge V3 V4 1\n"
    "edge V4 V1 2\n";

inline constexpr std::string_view kPathConflict =
    "# Four servers, none degenerate; the demand for source 1 sits on a pair\n"
    "# that is also joined by an unqualified path (one source-2 edge, one\n"
    "# unlabeled edge, one source-2 edge). Along that path the source-1\n"
    "# content of the endpoints must align, which contradicts recovering\n"
    "# source 1 from them: key rate 1 is unreachable here.\n"
    "K 2\n"
    "M 1\n"
    "edge V1 V3 1\n"
    "edge V1 V2 2\n"
    "edge V2 V4 -\n"
    "edge V3 V4 2\n";

inline constexpr std::string_view kDegenerateBridge =
    "# Same node layout as path_conflict, but the whole connecting path\n"
    "# carries the single demand set {2}, which makes its interior nodes V2\n"
    "# and V4 degenerate: they satisfy every constraint by storing source 2\n"
    "# verbatim, and the path forces no alignment between V1 and V3. Key\n"
    "# rate 1 is achievable.\n"
    "K 2\n"
    "M 1\n"
    "edge V1 V3 1\n"
    "edge V1 V2 2\n"
    "edge V2 V4 2\n"
    "edge V3 V4 2\n";

inline constexpr std::string_view kTwinPairsM2 =
    "# Eight servers in twin pairs (unlabeled edge inside each pair), with\n"
    "# two-source demands between pairs. Every node has empty common-source\n"
    "# set and no demand is internal to an unqualified component, so the\n"
    "# extremal key rate 1/2 is achievable.\n"
    "K 3\n"
    "M 2\n"
    "edge V1 V2 -\n"
    "edge V3 V4 -\n"
    "edge V5 V6 -\n"
    "edge V7 V8 -\n"
    "edge V1 V3 1,2\n"
    "edge V2 V5 1,3\n"
    "edge V1 V7 2,3\n"
    "edge V4 V6 2,3\n"
    "edge V3 V7 1,3\n"
    "edge V6 V8 1,2\n";

inline constexpr std::string_view kKeylessOverlap =
    "# Six servers where every edge's demand equals the union of its\n"
    "# endpoints' common sources (node V3 contributes just source 1).\n"
    "# Storage can then hold only demanded content: no key at all.\n"
    "K 3\n"
    "M 2\n"
    "edge V1 V2 1,2\n"
    "edge V1 V3 1,2\n"
    "edge V2 V4 1,2\n"
    "edge V3 V5 1,3\n"
    "edge V5 V6 1,3\n";

inline constexpr std::string_view kUniformLabelComponents =
    "# Seven servers split into a source-1 triangle and a source-2 cycle.\n"
    "# Every node sees a single demand set, so each server just stores its\n"
    "# demanded source: keyless.\n"
    "K 2\n"
    "M 1\n"
    "edge V1 V2 1\n"
    "edge V2 V3 1\n"
    "edge V3 V1 1\n"
    "edge V4 V5 2\n"
    "edge V5 V6 2\n"
    "edge V6 V7 2\n"
    "edge V7 V4 2\n";

inline constexpr std::string_view kOverlappingDemands =
    "# Two overlapping two-source demands meet at nodes X and A, whose\n"
    "# common-source sets stay nonempty. The structural theory makes no\n"
    "# capacity claim here, but a best-effort randomized build still\n"
    "# produces a working rate-1/2 code.\n"
    "K 3\n"
    "M 2\n"
    "edge X A 1,2\n"
    "edge X B 2,3\n"
    "edge A Y 2,3\n"
    "edge B Z 2,3\n";

inline std::vector<Instance> all() {
  return {
      {"single_edge", kSingleEdge},
      {"cycle4", kCycle4},
      {"path_conflict", kPathConflict},
      {"degenerate_bridge", kDegenerateBridge},
      {"twin_pairs_m2", kTwinPairsM2},
      {"keyless_overlap", kKeylessOverlap},
      {"uniform_label_components", kUniformLabelComponents},
      {"overlapping_demands", kOverlappingDemands},
  };
}

}  // namespace secstore::instances
