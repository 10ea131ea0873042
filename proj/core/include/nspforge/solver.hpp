#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nspforge/model.hpp"
#include "nspforge/rational.hpp"

namespace nsp::solver {

// The constraint families. `coverage` is the only non-unary one; `day_cap`
// exists only on instances carrying a learned per-day ceiling.
enum class ConstraintId { coverage, total_shifts, night_morning, night_count, day_cap };

const char* constraint_name(ConstraintId id);

struct ConstraintVerdict {
  ConstraintId id;
  bool satisfied = true;
  std::string witness;  // first violation, human-readable; empty when satisfied
};

// Per-nurse checks of one candidate pattern: total-shift bounds
// (min_total_shifts <= worked <= h), night->morning pair budget (y),
// night-count ceiling (b), and the per-day ceiling when present.
std::vector<ConstraintVerdict> check_unary(const ShiftPattern& pattern, int nurse,
                                           const NspInstance& instance);

// Verdicts for every family on a complete roster: slot coverage within
// [q, p] plus the unary families aggregated over nurses (witness names the
// first offender).
std::vector<ConstraintVerdict> check_global(const Schedule& schedule,
                                            const NspInstance& instance);
std::vector<ConstraintVerdict> check_global(const Assignment& assignment,
                                            const WcspInstance& wcsp);

bool all_satisfied(const std::vector<ConstraintVerdict>& verdicts);
bool feasible(const Schedule& schedule, const NspInstance& instance);

struct PropagationResult {
  bool changed = false;
  bool inconsistent = false;               // some variable lost every value
  long long removed = 0;
  std::vector<std::pair<int, int>> removals;  // (nurse, domain index)
};

// Node consistency: drops every value failing its own nurse's unary checks.
// Runs once (unary filtering is idempotent by construction).
PropagationResult nc_propagate(WcspInstance& wcsp);

// Generalized arc consistency on the coverage constraint: a value survives
// only if some completion of all other nurses from their current domains
// keeps every slot within [q, p]. Support search is exact (depth-first with
// early exit), preceded by an optimistic min/max slot screen that cheaply
// rejects unsupportable values; iterated to fixpoint.
PropagationResult gac_propagate(WcspInstance& wcsp);

// Optimistic completion bound for a partial assignment: cost of assigned
// nurses plus, per unassigned nurse, the best (minimize) value weight in
// its current domain. An unassigned nurse with an empty domain yields the
// cost cap. compute_ub is the maximize mirror (largest weights; an empty
// domain yields 0 — the branch is dead either way).
Rat compute_lb(const Assignment& partial, const WcspInstance& wcsp);
Rat compute_ub(const Assignment& partial, const WcspInstance& wcsp);

enum class Sense { minimize, maximize };
enum class VarOrder { smallest_domain, index };
enum class ValOrder { by_cost, domain_order };

struct SearchStats {
  long long nodes_expanded = 0;
  long long prunes = 0;
  long long incumbent_updates = 0;
  double elapsed_seconds = 0.0;
};

enum class SolveStatus { optimal, feasible, infeasible, budget_exhausted };

struct SolveResult {
  SolveStatus status = SolveStatus::infeasible;
  std::optional<Assignment> assignment;
  std::optional<Rat> cost;
  bool proved_optimal = false;
  std::vector<Assignment> all_optima;  // filled only when enumerating
  SearchStats stats;
  std::vector<Rat> cost_trace;  // incumbent sequence (local search / search)
};

struct SolveOptions {
  Sense sense = Sense::minimize;
  VarOrder var_order = VarOrder::smallest_domain;  // fewest values first, ties by index
  ValOrder val_order = ValOrder::by_cost;          // best weight first for the sense
  bool use_bounding = true;                        // false: plain exhaustive DFS
  bool enumerate_optima = false;                   // collect every optimal assignment
  long long node_limit = 0;                        // 0 = unlimited
};

// Depth-first branch and bound. Values failing unary checks are never
// taken; partial coverage is screened against [q, p] reachability; with
// bounding on, branches whose optimistic bound cannot beat the incumbent
// are cut. Exact rational comparisons throughout. Proven-empty search
// space reports infeasible (a result, not an error).
SolveResult branch_and_bound(const WcspInstance& wcsp, const SolveOptions& options = {});

// First feasible complete assignment in domain order (no costs involved).
SolveResult dfs_first_feasible(const WcspInstance& wcsp);

enum class SlsInit { random, dfs, dfs_cp };

struct SlsOptions {
  Sense sense = Sense::minimize;
  SlsInit init = SlsInit::random;
  long long budget = 100;       // improvement sweeps over all variables
  std::uint64_t seed = 0;
  int random_retry_cap = 1000;  // feasible-start attempts for random init
};

// Local search over one-variable swaps: sweep nurses in index order, try
// alternative values best-weight-first, accept the first strictly
// improving feasible swap; stop at a full quiet sweep or when the budget
// runs out. cost_trace records the incumbent after init and each accepted
// move; budget 0 returns the initial solution. Deterministic per seed.
SolveResult sls_solve(const WcspInstance& wcsp, const SlsOptions& options = {});

}  // namespace nsp::solver
