#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cournot/grid.hpp"
#include "cournot/trajectory.hpp"

namespace cournot {

enum class DynamicsFamily { integrator, affine, tabulated };

/// One tabulated cell: the explicit velocity list F(t, d, x).
struct TabulatedVelocities {
  Cell cell;
  std::vector<StateVec> velocities;

  bool operator==(const TabulatedVelocities&) const = default;
};

/// Set-valued dynamics realized by finitely many control samples.
///
///  - integrator: f(x, u) = u, with |u_i| <= velocity_bound[i]
///  - affine:     f(x, u) = A x + B u + drift
///  - tabulated:  the stored list at listed cells (u := velocity there),
///                f(x, u) = u elsewhere
struct DynamicsSpec {
  DynamicsFamily family = DynamicsFamily::integrator;
  std::vector<std::vector<double>> control_samples;
  std::vector<double> velocity_bound;
  std::vector<std::vector<double>> a;
  std::vector<std::vector<double>> b;
  std::vector<double> drift;
  std::vector<TabulatedVelocities> table;  // sorted by cell

  bool operator==(const DynamicsSpec&) const = default;
};

enum class TubeKind { everywhere, box, ball, union_of, time_window, trajectory_singleton };

/// Membership predicate over (t, d, x). Departure tubes ignore d.
struct Tube {
  TubeKind kind = TubeKind::everywhere;
  std::vector<double> lo, hi;        // box
  std::vector<double> center;        // ball
  double radius = 0.0;               // ball
  std::vector<Tube> members;         // union; time_window inner (0 or 1)
  double t_lo = 0.0, t_hi = 0.0;     // time_window
  std::optional<double> d_lo, d_hi;  // time_window, optional duration range
  std::optional<Trajectory> trajectory;  // trajectory_singleton
  double tolerance = 0.5;            // trajectory_singleton, in cells per axis

  static Tube everywhere();
  static Tube box(std::vector<double> lo, std::vector<double> hi);
  static Tube ball(std::vector<double> center, double radius);
  static Tube union_of(std::vector<Tube> members);
  static Tube time_window(double t_lo, double t_hi, std::optional<Tube> inner = {});
  static Tube along(Trajectory tr, double tolerance_cells = 0.5);

  bool contains(const GridSpec& g, double t, double d, const StateVec& x) const;

  bool operator==(const Tube&) const = default;
};

/// The triple (F, K, C) on a grid.
struct ProblemSpec {
  GridSpec grid;
  DynamicsSpec dynamics;
  Tube env;
  Tube departure;

  bool operator==(const ProblemSpec&) const = default;
};

/// A realized element of F(t, d, x): the control index, its control vector
/// and the resulting velocity.
struct ControlSample {
  std::size_t index = 0;
  std::vector<double> u;
  StateVec velocity{};
};

/// Parses and validates a problem document. Throws SchemaError or ValidationError.
ProblemSpec parse_problem(std::string_view text);
ProblemSpec load_problem(const std::string& path);
/// Canonical JSON form; parse_problem(serialize_problem(p)) == p.
std::string serialize_problem(const ProblemSpec& p);

/// Checks every cross-invariant: dynamics shapes, C(t) inside K(t, 0) and,
/// when require_departure, C nonempty for some grid time.
void validate_problem(const ProblemSpec& p, bool require_departure = true);

/// F(t, d, x) in control-sample order.
std::vector<ControlSample> controls_at(const ProblemSpec& p, const Cell& c);
std::vector<StateVec> velocities(const ProblemSpec& p, double t, double d, const StateVec& x);

bool in_env(const ProblemSpec& p, double t, double d, const StateVec& x);
bool in_departure(const ProblemSpec& p, double t, const StateVec& x);
bool in_env(const ProblemSpec& p, const Cell& c);
/// Departure membership of the state at time index t.
bool in_departure(const ProblemSpec& p, std::size_t t, const StateIndex& x);

/// The same problem with its departure tube replaced.
ProblemSpec with_departure(const ProblemSpec& p, Tube departure);

/// Unit integrator fixture: t, d in [0, 4], x in [-2, 2], h = 0.25,
/// u in {-1, 0, 1}, K everywhere, C(t) = {0}.
ProblemSpec unit_integrator_problem();
std::string unit_integrator_document();

}  // namespace cournot
