#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "feeder/instancegen.hpp"
#include "feeder/model.hpp"
#include "feeder/routesched.hpp"

namespace feeder {

struct OracleResult {
  bool solved = false;  // a feasible solution exists
  double cost = 0;
  double co2 = 0;
  Solution best;
};

// Exhaustive branch-and-bound over request-to-vehicle assignments and visit
// orders; schedules are certified by an independent difference-constraint
// check, charger insertions are enumerated over dummy slots with minimal
// charge amounts, and charger sharing is settled by enumerating service
// orders under a joint schedule. Routing costs never depend on the schedule,
// so the returned objective is the exact optimum.
//
// `max_requests` guards tractability (throws beyond it); raise it
// deliberately for gasoline-only instances where no charging enumeration is
// involved. `incumbent_hint` only speeds up pruning; it never changes the
// result when it is an upper bound on the optimum.
OracleResult exact_solve(const Instance& inst, double pi, std::optional<double> gamma,
                         int max_requests = 5,
                         double incumbent_hint = std::numeric_limits<double>::infinity());

// Gasoline-only exact reference emission (the oracle counterpart of the
// heuristic reference run).
OracleResult exact_reference(const Instance& inst, int max_requests = 5);

struct ExactConfigResult {
  int config_index = -1;
  double z_u = 0;
  double zbar_l = 0;
  bool solved = false;
};

// Full enumeration of the upper level with exact lower-level solves; ties
// fall to the lowest charger count via the enumeration order.
ExactConfigResult exact_best_config(const std::vector<ChargingConfig>& configs,
                                    const std::vector<Scenario>& scenarios, double pi,
                                    int max_requests = 5);

}  // namespace feeder
