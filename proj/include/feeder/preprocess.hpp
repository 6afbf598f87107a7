#pragma once

#include <optional>
#include <string>
#include <vector>

#include "feeder/model.hpp"

namespace feeder {

struct ArcMask {
  int n_vertices = 0;
  std::vector<std::uint8_t> allowed;
  int eliminated = 0;

  bool operator()(int i, int j) const {
    return allowed[static_cast<std::size_t>(i) * n_vertices + j] != 0;
  }
};

// Time-window tightening to its fixed point. Returns an error message naming
// the request whose window became empty, nullopt on success.
std::optional<std::string> tighten_time_windows(Instance& inst);

// True iff at least one of the six service orders {i,j,n+i,n+j} ... is
// feasible for time windows, ride time and capacity, using the same route
// evaluator as the search. Checked with the most permissive vehicle type.
bool requests_compatible(int i, int j, const Instance& inst);

// Structural and pairwise arc elimination. Stores the mask in the instance
// and overwrites eliminated arcs with sentinel distance/time so they cannot
// appear in any schedule-feasible route.
ArcMask eliminate_arcs(Instance& inst);

struct ChargerPairTriple {
  int i = 0;      // request
  int j = 0;      // request
  int dummy = 0;  // charger dummy vertex
};

// Triples (i, j, s) where both insertions of charger s between the requests'
// dropoff and the partner pickup are time-infeasible, with zero charging
// duration as the lower bound.
std::vector<ChargerPairTriple> charger_infeasible_pairs(const Instance& inst);

// tighten + eliminate; throws std::runtime_error on an infeasible request.
ArcMask preprocess(Instance& inst);

}  // namespace feeder
