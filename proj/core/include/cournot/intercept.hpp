#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cournot/basin.hpp"
#include "cournot/cournot_map.hpp"
#include "cournot/regulate.hpp"

namespace cournot {

/// Evader predictions: track i is revealed at reveal_time i and holds until
/// the next reveal.
struct EvaderScript {
  struct Entry {
    double reveal_time = 0.0;
    Trajectory track;
  };
  std::vector<Entry> entries;
};

enum class CaptureStatus { captured, infeasible_at_tflat_then_captured, not_capturable, script_exhausted };

const char* status_name(CaptureStatus s);

struct InterceptionReport {
  static constexpr double kNever = std::numeric_limits<double>::infinity();

  std::size_t round = 0;
  double round_start = 0.0;             // t0 of the round (t0, then each reveal time)
  double t_flat = kNever;               // first time the evader enters the arrival tube
  double t_feasible = kNever;           // first time the aperture fits since round_start
  StateVec x_capture{};
  double omega = kNever;
  StateVec start_state{};
  std::vector<StateVec> alternative_starts;  // other starting states for the same window
  Trajectory pursuer_traj;              // the round's Cournot evolution
  Trajectory pursuer_path;              // full pursuer path since round 0
  CaptureStatus status = CaptureStatus::not_capturable;

  bool captured() const {
    return status == CaptureStatus::captured || status == CaptureStatus::infeasible_at_tflat_then_captured;
  }
};

/// Capture of one evader track from t0. t_flat is the first grid time
/// t >= t0 at which the evader lies in the arrival tube. Capture happens at
/// t_flat when its aperture fits in [t0, t_flat]; otherwise the scan moves on
/// to the first t with aperture(t, evader(t)) <= t - t0. Times after
/// horizon are not considered. Evader states are rounded to the nearest
/// cell; samples off the grid or undefined count as outside the tube.
InterceptionReport capturability(const ProblemSpec& p, const StepRule& r, const CournotGraph& g,
                                 const ApertureField& aperture, const Trajectory& evader, double t0,
                                 double horizon = InterceptionReport::kNever,
                                 Policy policy = Policy::minimal_norm);

/// Re-planning loop. Round 0 uses the problem's departure tube. Each later
/// reveal before the pending capture time rebuilds the graph with the
/// departure tube reduced to the current pursuer path from the reveal time
/// on, and looks for a capture of the new track no later than the pending
/// one. Stops at the first round without capture (marked script_exhausted
/// for rounds after the first) or when the next reveal comes too late.
std::vector<InterceptionReport> pursue(const ProblemSpec& p, const StepRule& r, const EvaderScript& script,
                                       double t0, Policy policy = Policy::minimal_norm);

struct Scenario {
  ProblemSpec problem;
  double t0 = 0.0;
  int dilation_radius = 0;
  EvaderScript script;
};

/// Scenario document: {problem: object | path, t0, script: [{reveal_time,
/// track: {t0, h, states}}], dilation?}. Relative problem paths resolve
/// against base_dir.
Scenario parse_scenario(std::string_view text, const std::string& base_dir = ".");
Scenario load_scenario(const std::string& path);
void validate_script(const EvaderScript& script);

/// JSON with every report field; trajectory_paths[i] is listed per round.
std::string report_json(const std::vector<InterceptionReport>& reports, std::size_t dim,
                        const std::vector<std::string>& trajectory_paths = {});

}  // namespace cournot
