#include "cournot/basin.hpp"

#include "cournot/format.hpp"
#include "cournot/parallel.hpp"
#include "json_io.hpp"

namespace cournot {

std::optional<std::size_t> CournotGraph::label(const Cell& c) const {
  if (labels.empty()) return std::nullopt;
  const std::uint32_t l = labels[grid.flat(c)];
  if (l == kNoLabel) return std::nullopt;
  return l;
}

CellSet env_cells(const ProblemSpec& p) {
  const GridSpec& g = p.grid;
  const std::size_t states = g.state_count();
  const std::size_t slices = g.t_axis.count * g.d_axis.count;
  std::vector<std::vector<std::uint8_t>> bytes(slices);
  parallel_for(slices, [&](std::size_t slice) {
    const std::size_t t = slice / g.d_axis.count;
    const std::size_t d = slice % g.d_axis.count;
    auto& row = bytes[slice];
    row.resize(states);
    for (std::size_t s = 0; s < states; ++s) row[s] = in_env(p, Cell{t, d, g.state_index(s)}) ? 1 : 0;
  });
  CellSet out = CellSet::over_cells(g);
  for (std::size_t slice = 0; slice < slices; ++slice) {
    for (std::size_t s = 0; s < states; ++s) {
      if (bytes[slice][s]) out.set(slice * states + s);
    }
  }
  return out;
}

CellSet departure_cells(const ProblemSpec& p) {
  const GridSpec& g = p.grid;
  const std::size_t states = g.state_count();
  CellSet out = CellSet::over_time_states(g);
  for (std::size_t t = 0; t < g.t_axis.count; ++t) {
    for (std::size_t s = 0; s < states; ++s) {
      if (in_departure(p, t, g.state_index(s))) out.set(t * states + s);
    }
  }
  return out;
}

namespace {

struct SliceResult {
  std::vector<std::uint8_t> marks;
  std::vector<std::uint32_t> labels;
  std::size_t clipped = 0;
};

}  // namespace

CournotGraph capture_basin(const ProblemSpec& p, const StepRule& r, BasinOptions opts) {
  validate_rule(p, r);
  const GridSpec& g = p.grid;
  const std::size_t nt = g.t_axis.count;
  const std::size_t nd = g.d_axis.count;
  const std::size_t states = g.state_count();

  CournotGraph out{g, CellSet::over_cells(g), {}, {}, BasinStatus::ok};
  if (opts.labels) out.labels.assign(g.cell_count(), kNoLabel);

  const CellSet env = env_cells(p);
  const CellSet dep = departure_cells(p);

  for (std::size_t t = 0; t < nt; ++t) {
    for (std::size_t s = 0; s < states; ++s) {
      const std::size_t f = g.flat(t, 0, s);
      if (dep.test(t * states + s) && env.test(f)) {
        out.cells.set(f);
        if (opts.labels) out.labels[f] = static_cast<std::uint32_t>(s);
        ++out.stats.seed_cells;
      }
    }
  }
  out.stats.layers = 1;

  for (std::size_t k = 1; k < nd && k < nt; ++k) {
    const std::size_t slices = nt - k;
    std::vector<SliceResult> results(slices);
    parallel_for(slices, [&](std::size_t i) {
      const std::size_t t = k + i;
      SliceResult& res = results[i];
      res.marks.assign(states, 0);
      if (opts.labels) res.labels.assign(states, kNoLabel);
      const std::size_t prev = g.flat(t - 1, k - 1, 0);
      out.cells.for_each_in(prev, prev + states, [&](std::size_t f) {
        const std::size_t src_state = f - prev;
        const Cell src{t - 1, k - 1, g.state_index(src_state)};
        for (std::size_t s : successor_states(p, r, src, &res.clipped)) {
          if (res.marks[s] || !env.test(g.flat(t, k, s))) continue;
          res.marks[s] = 1;
          if (opts.labels) res.labels[s] = out.labels[f];
        }
      });
    });
    for (std::size_t i = 0; i < slices; ++i) {
      const std::size_t t = k + i;
      const SliceResult& res = results[i];
      out.stats.clipped += res.clipped;
      for (std::size_t s = 0; s < states; ++s) {
        if (!res.marks[s]) continue;
        const std::size_t f = g.flat(t, k, s);
        out.cells.set(f);
        if (opts.labels) out.labels[f] = res.labels[s];
      }
    }
    ++out.stats.layers;
  }

  for (std::size_t k = 1; k < nd; ++k) out.stats.pre_grid_cells += std::min(k, nt) * states;
  out.stats.set_cells = out.cells.count();
  if (out.stats.seed_cells == 0) out.status = BasinStatus::empty_basin;
  return out;
}

CellSet basin_step(const ProblemSpec& p, const StepRule& r, const CellSet& current) {
  const GridSpec& g = p.grid;
  const std::size_t states = g.state_count();
  const CellSet env = env_cells(p);
  const CellSet dep = departure_cells(p);
  CellSet next = CellSet::over_cells(g);
  for (std::size_t t = 0; t < g.t_axis.count; ++t) {
    for (std::size_t s = 0; s < states; ++s) {
      const std::size_t f = g.flat(t, 0, s);
      if (dep.test(t * states + s) && env.test(f)) next.set(f);
    }
  }
  current.for_each([&](std::size_t f) {
    const Cell c = g.cell(f);
    for (std::size_t s : successor_states(p, r, c)) {
      const std::size_t target = g.flat(c.t + 1, c.d + 1, s);
      if (env.test(target)) next.set(target);
    }
  });
  return next;
}

CellSet capture_basin_iterative(const ProblemSpec& p, const StepRule& r, std::size_t* iterations) {
  validate_rule(p, r);
  CellSet current = CellSet::over_cells(p.grid);
  std::size_t n = 0;
  while (true) {
    CellSet next = basin_step(p, r, current);
    ++n;
    if (next == current) break;
    current = std::move(next);
  }
  if (iterations) *iterations = n;
  return current;
}

bool fixed_point_check(const ProblemSpec& p, const StepRule& r, const CournotGraph& g) {
  return basin_step(p, r, g.cells) == g.cells;
}

std::string export_graph_csv(const CournotGraph& g) {
  std::string out;
  g.cells.for_each([&](std::size_t f) {
    const Point pt = point_of(g.grid, g.grid.cell(f));
    out += format_real(pt.t);
    out += ',';
    out += format_real(pt.d);
    out += ',';
    append_state(out, pt.x, g.grid.dim());
    out += '\n';
  });
  return out;
}

std::string export_graph_metadata(const CournotGraph& g) {
  nlohmann::json counts{{"t", g.grid.t_axis.count}, {"d", g.grid.d_axis.count}};
  nlohmann::json xs = nlohmann::json::array();
  for (const Axis& a : g.grid.x_axes) xs.push_back(a.count);
  counts["x"] = xs;
  nlohmann::json j{
      {"grid", detail::grid_to_json(g.grid)},
      {"counts", counts},
      {"columns", "t,d,x1..xn"},
      {"status", g.status == BasinStatus::ok ? "ok" : "empty-basin"},
      {"stats",
       {{"layers", g.stats.layers},
        {"seed_cells", g.stats.seed_cells},
        {"set_cells", g.stats.set_cells},
        {"clipped", g.stats.clipped},
        {"pre_grid_cells", g.stats.pre_grid_cells}}}};
  return j.dump(2) + "\n";
}

}  // namespace cournot
