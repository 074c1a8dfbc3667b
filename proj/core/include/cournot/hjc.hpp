#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cournot/basin.hpp"
#include "cournot/cell_set.hpp"
#include "cournot/problem.hpp"
#include "cournot/reach.hpp"

namespace cournot {

enum class DepartureCostFamily { zero_on_departure, tabulated, quadratic };
enum class LagrangianFamily { constant, norm, quadratic, tabulated };

struct TabulatedCost {
  double t = 0.0;
  StateVec s{};
  double value = 0.0;
};

/// Departure cost c(t, s); +inf off its domain, which is the induced
/// departure tube.
///  - zero_on_departure: 0 on the problem's C
///  - tabulated: listed (t, s, value) entries
///  - quadratic: weight * |s - center|^2 on the problem's C
struct DepartureCost {
  DepartureCostFamily family = DepartureCostFamily::zero_on_departure;
  std::vector<TabulatedCost> table;
  std::vector<double> center;
  double weight = 1.0;
};

/// Lagrangian l(t, d, x, u) >= 0; +inf removes a control from F_l.
///  - constant: value
///  - norm: weight * |u|
///  - quadratic: weight * |u|^2
///  - tabulated: per_control[k] for control sample k
struct Lagrangian {
  LagrangianFamily family = LagrangianFamily::constant;
  double value = 1.0;
  double weight = 1.0;
  std::vector<double> per_control;
};

struct CostSpec {
  DepartureCost departure;
  Lagrangian lagrangian;
};

/// Cost document: {departure: {family, params}, lagrangian: {family, params}}.
/// Families: zero-on-C | tabulated | quadratic-in-s; constant | norm-of-u |
/// quadratic | tabulated. Throws SchemaError / ValidationError.
CostSpec parse_costs(std::string_view text);
CostSpec load_costs(const std::string& path);
/// Rejects negative Lagrangian values and malformed parameters.
void validate_costs(const ProblemSpec& p, const CostSpec& costs);

double departure_cost(const ProblemSpec& p, const CostSpec& costs, std::size_t t, const StateIndex& s);
double lagrangian(const CostSpec& costs, const ControlSample& u);

/// Problem with C replaced by the cost-induced departure tube; F_l is
/// evaluated per control at solve time.
ProblemSpec induced_problem(const ProblemSpec& p, const CostSpec& costs);

enum class ValueStatus { ok, y_range_exceeded };

/// g: cost-to-arrive over (t, d, x); v and w over (t, x). +inf marks
/// unreachable cells.
struct ValueField {
  GridSpec grid;
  std::vector<double> g;
  std::vector<double> v;
  std::vector<double> w;
  std::optional<Axis> y_axis;
  ValueStatus status = ValueStatus::ok;
  CellSet y_overflow;  // (t, x...) cells with W = +inf only because the y axis is too short

  double V(std::size_t t, std::size_t state) const { return v[t * grid.state_count() + state]; }
  double W(std::size_t t, std::size_t state) const { return w[t * grid.state_count() + state]; }
};

/// Dynamic programming over duration layers: G(t, 0, x) = c(t, x);
/// G(t + h, d + h, x') = min over landing steps of G(t, d, x) + h l(.., u).
/// V(T, x) = min over d of G(T, d, x).
ValueField cost_to_arrive(const ProblemSpec& p, const StepRule& r, const CostSpec& costs);

/// Epigraph sweep on the (t, d, x, y) lattice: seeds y >= c at d = 0, each
/// step raises y by h l rounded up to the y lattice, and every set cell is
/// closed upward in y. W(T, x) = lowest y set in any duration layer.
/// Populates w (and y_axis, status, y_overflow) of vf; vf.grid must match p.
void epigraph_solution(const ProblemSpec& p, const StepRule& r, const CostSpec& costs, const Axis& y_axis,
                       ValueField& vf);
/// cost_to_arrive followed by the epigraph sweep: G, V and W all populated.
ValueField epigraph_solution(const ProblemSpec& p, const StepRule& r, const CostSpec& costs,
                             const Axis& y_axis);

struct CoincidenceStats {
  std::size_t compared = 0;
  double max_abs = 0.0;
  double mean_abs = 0.0;
  std::vector<std::pair<std::size_t, std::size_t>> mismatches;  // (t, state) finite in exactly one
};

CoincidenceStats coincidence_report(const ValueField& vf);

/// CSV `t,x...,V,W` for every (t, x), `inf` sentinels, no header.
std::string export_value_csv(const ValueField& vf);

}  // namespace cournot
