#include "cournot/intercept.hpp"

#include <cmath>
#include <filesystem>

#include "cournot/error.hpp"
#include "json_io.hpp"

namespace cournot {

const char* status_name(CaptureStatus s) {
  switch (s) {
    case CaptureStatus::captured: return "captured";
    case CaptureStatus::infeasible_at_tflat_then_captured: return "infeasible-at-Tflat-then-captured";
    case CaptureStatus::not_capturable: return "not-capturable";
    case CaptureStatus::script_exhausted: return "script-exhausted";
  }
  return "not-capturable";
}

namespace {

constexpr double kTimeEps = 1e-9;

}  // namespace

InterceptionReport capturability(const ProblemSpec& p, const StepRule& r, const CournotGraph& g,
                                 const ApertureField& aperture, const Trajectory& evader, double t0,
                                 double horizon, Policy policy) {
  const GridSpec& grid = g.grid;
  const double eps = kTimeEps * std::max(1.0, grid.t_axis.step);
  InterceptionReport rep;
  rep.round_start = t0;

  bool captured = false;
  for (std::size_t t = 0; t < grid.t_axis.count; ++t) {
    const double tv = grid.t_axis.value(t);
    if (tv < t0 - eps) continue;
    if (tv > horizon + eps) break;
    auto xi_state = evader.sample(tv);
    if (!xi_state) continue;
    auto xi = grid.try_state_index(*xi_state);
    if (!xi) continue;
    const std::size_t s = grid.state_flat(*xi);
    if (!aperture.finite(t, s)) continue;
    if (rep.t_flat == InterceptionReport::kNever) rep.t_flat = tv;
    const double w = aperture.value(t, s);
    if (w <= tv - t0 + eps) {
      rep.t_feasible = tv;
      rep.x_capture = grid.state_point(*xi);
      rep.omega = w;
      captured = true;
      break;
    }
  }
  if (!captured) {
    rep.status = CaptureStatus::not_capturable;
    return rep;
  }
  rep.status = rep.t_feasible == rep.t_flat ? CaptureStatus::captured
                                            : CaptureStatus::infeasible_at_tflat_then_captured;
  rep.pursuer_traj = synthesize(p, r, g, rep.t_feasible, rep.x_capture, rep.omega, policy);
  rep.pursuer_traj.role = TrajectoryRole::pursuer;
  rep.pursuer_path = rep.pursuer_traj;
  rep.start_state = rep.pursuer_traj.states.front();

  const CellSet starts = starting_states(p, r, g, rep.t_feasible, rep.x_capture, rep.omega);
  starts.for_each([&](std::size_t s) {
    const StateVec z = grid.state_point(s);
    if (z != rep.start_state) rep.alternative_starts.push_back(z);
  });
  return rep;
}

std::vector<InterceptionReport> pursue(const ProblemSpec& p, const StepRule& r, const EvaderScript& script,
                                       double t0, Policy policy) {
  validate_script(script);
  std::vector<InterceptionReport> reports;
  if (script.entries.empty()) return reports;
  const double eps = kTimeEps * std::max(1.0, p.grid.t_axis.step);

  {
    const CournotGraph g = capture_basin(p, r);
    const ApertureField ap = aperture(g);
    InterceptionReport rep = capturability(p, r, g, ap, script.entries.front().track, t0,
                                           InterceptionReport::kNever, policy);
    reports.push_back(std::move(rep));
  }
  if (!reports.back().captured()) return reports;

  for (std::size_t i = 1; i < script.entries.size(); ++i) {
    const InterceptionReport& prev = reports.back();
    const double reveal = script.entries[i].reveal_time;
    if (reveal >= prev.t_feasible - eps) break;

    const Trajectory& path = prev.pursuer_path;
    Trajectory tail = restrict(path, reveal, path.end_time());
    if (tail.states.empty()) break;
    tail.role = TrajectoryRole::pursuer;
    const ProblemSpec replanned = with_departure(p, Tube::along(tail));
    validate_problem(replanned);

    const CournotGraph g = capture_basin(replanned, r);
    const ApertureField ap = aperture(g);
    InterceptionReport rep =
        capturability(replanned, r, g, ap, script.entries[i].track, reveal, prev.t_feasible, policy);
    rep.round = i;
    if (!rep.captured()) {
      rep.status = CaptureStatus::script_exhausted;
      rep.pursuer_path = path;
      reports.push_back(std::move(rep));
      break;
    }
    const double departure = rep.pursuer_traj.t0;
    const Trajectory prefix = restrict(path, path.t0, departure);
    rep.pursuer_path = concatenate(p.grid, prefix, rep.pursuer_traj);
    rep.pursuer_path.role = TrajectoryRole::pursuer;
    reports.push_back(std::move(rep));
  }
  return reports;
}

void validate_script(const EvaderScript& script) {
  for (std::size_t i = 0; i < script.entries.size(); ++i) {
    const auto& e = script.entries[i];
    if (e.track.states.empty()) throw ValidationError("evader track has no samples");
    if (i > 0 && !(e.reveal_time > script.entries[i - 1].reveal_time)) {
      throw ValidationError("reveal times must be strictly increasing");
    }
    if (e.track.t0 > e.reveal_time + kTimeEps * std::max(1.0, e.track.h)) {
      throw ValidationError("evader track must be defined from its reveal time onward");
    }
  }
}

Scenario parse_scenario(std::string_view text, const std::string& base_dir) {
  const auto j = detail::parse_json(text, "scenario");
  detail::check_keys(j, "scenario", {"problem", "t0", "script", "dilation"}, {"problem", "t0", "script"});
  Scenario sc{};
  const auto& prob = j.at("problem");
  if (prob.is_string()) {
    std::filesystem::path path(prob.get<std::string>());
    if (path.is_relative()) path = std::filesystem::path(base_dir) / path;
    sc.problem = load_problem(path.string());
  } else {
    sc.problem = detail::problem_from_json(prob);
  }
  sc.t0 = detail::number(j.at("t0"), "scenario.t0");
  if (j.contains("dilation")) sc.dilation_radius = static_cast<int>(detail::number(j.at("dilation"), "scenario.dilation"));
  if (!j.at("script").is_array()) throw SchemaError("scenario.script must be an array");
  for (const auto& e : j.at("script")) {
    detail::check_keys(e, "scenario.script[]", {"reveal_time", "track"}, {"reveal_time", "track"});
    EvaderScript::Entry entry;
    entry.reveal_time = detail::number(e.at("reveal_time"), "scenario.script[].reveal_time");
    entry.track = detail::trajectory_from_json(e.at("track"), "scenario.script[].track");
    entry.track.role = TrajectoryRole::evader;
    if (entry.track.dim != sc.problem.grid.dim()) {
      throw ValidationError("evader track dimension must match the grid");
    }
    sc.script.entries.push_back(std::move(entry));
  }
  validate_script(sc.script);
  return sc;
}

Scenario load_scenario(const std::string& path) {
  const auto dir = std::filesystem::path(path).parent_path();
  return parse_scenario(detail::read_file(path), dir.empty() ? "." : dir.string());
}

std::string report_json(const std::vector<InterceptionReport>& reports, std::size_t dim,
                        const std::vector<std::string>& trajectory_paths) {
  using nlohmann::json;
  auto state = [dim](const StateVec& x) { return std::vector<double>(x.begin(), x.begin() + dim); };
  json rounds = json::array();
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& rep = reports[i];
    json alt = json::array();
    for (const auto& z : rep.alternative_starts) alt.push_back(state(z));
    json j{{"round", rep.round},
           {"round_start", rep.round_start},
           {"t_flat", detail::real_or_inf(rep.t_flat)},
           {"t_feasible", detail::real_or_inf(rep.t_feasible)},
           {"status", status_name(rep.status)},
           {"rounds", reports.size()}};
    if (rep.captured()) {
      j["x_capture"] = state(rep.x_capture);
      j["omega"] = rep.omega;
      j["start_state"] = state(rep.start_state);
      j["alternative_starts"] = alt;
      j["pursuer_traj"] = detail::trajectory_to_json(rep.pursuer_traj);
    } else {
      j["x_capture"] = nullptr;
      j["omega"] = "inf";
      j["start_state"] = nullptr;
      j["alternative_starts"] = alt;
      j["pursuer_traj"] = nullptr;
    }
    if (!rep.pursuer_path.states.empty()) j["pursuer_path"] = detail::trajectory_to_json(rep.pursuer_path);
    if (i < trajectory_paths.size()) j["trajectory_csv"] = trajectory_paths[i];
    rounds.push_back(std::move(j));
  }
  return json{{"reports", rounds}}.dump(2) + "\n";
}

}  // namespace cournot
