#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "feeder/model.hpp"
#include "feeder/routesched.hpp"

namespace feeder {

enum class ModelFormat { Lp, Mps };

// Writes the full mixed-fleet routing MILP over the trimmed arc set in
// CPLEX-style LP or fixed-form MPS text. Constraints are named after their
// equation families (eq9, eq10a_k, eq16_k_i_j, ...) so external-solver
// residuals trace back to the formulation. The emission cap row is included
// iff pi > 0 and then requires the reference emission. Deterministic: the
// same instance yields byte-identical text.
std::string export_milp(const Instance& inst, double pi, std::optional<double> gamma,
                        ModelFormat format, bool with_valid_inequalities = true);

struct ResidualReport {
  std::vector<std::pair<std::string, double>> families;  // family name -> max violation

  double max_residual() const;
  double family(const std::string& name) const;
  bool feasible(double tol = 1e-6) const { return max_residual() <= tol; }
};

// Direct evaluation of every constraint family against a solution; zero
// residuals mean the solution is feasible for the exported model. Expects a
// preprocessed instance (window tightening fixes the off-route B values).
ResidualReport validate_solution(const Solution& sol, const Instance& inst, double pi,
                                 std::optional<double> gamma);

// Reassigns dummy vertices per physical charger so that earlier charging
// operations carry higher dummy ids, the order the dummy-chaining rows
// expect. Costs and schedules are unchanged (dummies are co-located).
Solution canonicalize_charger_dummies(const Solution& sol, const Instance& inst);

// Canonical variable assignment for the exported model's naming contract
// (x_k_i_j, B_k_i, Q_k_i, E_k_i, tau_k_s, v_s); routes are packed into the
// per-type vehicle slots in use-first order, unused vehicles sit on the
// depot-to-depot arc.
std::map<std::string, double> solution_assignment(const Solution& sol, const Instance& inst);

}  // namespace feeder
