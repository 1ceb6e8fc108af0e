#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lnsforge/bnb.hpp"
#include "lnsforge/errors.hpp"
#include "lnsforge/lns.hpp"
#include "lnsforge/mip.hpp"
#include "lnsforge/primal_gap.hpp"
#include "lnsforge/util.hpp"

namespace lnsforge {

inline constexpr const char* kProvenOptimal = "bnb-proved-optimal";
inline constexpr const char* kBestIncumbent = "best-incumbent-any-method";

struct BestKnownEntry {
  double objective = 0.0;
  std::string provenance;  // kProvenOptimal or kBestIncumbent
};

struct BestKnownTable {
  std::map<std::string, BestKnownEntry> entries;

  const BestKnownEntry& at(const std::string& id) const {
    const auto it = entries.find(id);
    if (it == entries.end())
      throw InvalidParameterError("best-known table has no entry for " + id);
    return it->second;
  }
};

struct BestKnownResult {
  BestKnownTable table;
  std::map<std::string, Assignment> solutions;  // incumbent per instance
  std::vector<std::pair<std::string, std::string>> excluded;  // id, reason
};

// Reference objectives from a generous solve per instance. Proved-optimal
// entries are final; incumbent entries may later be refreshed when an
// evaluated method beats them.
inline BestKnownResult compute_best_known(
    const std::vector<const MipInstance*>& instances,
    const std::vector<std::string>& ids, const SolveBudget& budget,
    int workers = 1) {
  if (instances.size() != ids.size())
    throw DimensionError("compute_best_known: id/instance count mismatch");
  const int n = static_cast<int>(instances.size());
  std::vector<MipSolveResult> solved(n);
  parallel_for(n, workers,
               [&](int i) { solved[i] = solve_mip(*instances[i], budget); });

  BestKnownResult out;
  for (int i = 0; i < n; ++i) {
    const MipSolveResult& r = solved[i];
    if (r.status == MipStatus::Infeasible) {
      out.excluded.emplace_back(ids[i], "infeasible");
      continue;
    }
    if (!r.incumbent) {
      out.excluded.emplace_back(ids[i], "no incumbent within budget");
      continue;
    }
    BestKnownEntry e;
    e.objective = *r.objective;
    e.provenance =
        r.status == MipStatus::Optimal ? kProvenOptimal : kBestIncumbent;
    out.table.entries[ids[i]] = e;
    out.solutions[ids[i]] = *r.incumbent;
  }
  return out;
}

// Lowers a non-proved entry when a better objective shows up. Returns true
// when the table changed; the caller should then warn that previously
// computed gaps are stale.
inline bool refresh_best_known(BestKnownTable& table, const std::string& id,
                               double objective) {
  const auto it = table.entries.find(id);
  if (it == table.entries.end()) return false;
  if (it->second.provenance == kProvenOptimal) return false;
  if (objective < it->second.objective - 1e-9) {
    it->second.objective = objective;
    return true;
  }
  return false;
}

enum class GridMode { Step, Time };

// Linear grid for step counting, geometric for wall-clock seconds (the
// paper plots time on a log axis).
inline std::vector<double> make_grid(GridMode mode, double max_coord,
                                     int points) {
  if (points < 1) throw InvalidParameterError("make_grid: points < 1");
  std::vector<double> grid;
  grid.reserve(points);
  if (mode == GridMode::Step) {
    for (int i = 0; i < points; ++i)
      grid.push_back(std::round(max_coord * i / std::max(1, points - 1)));
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  } else {
    const double lo = std::max(1e-3, max_coord * 1e-3);
    for (int i = 0; i < points; ++i)
      grid.push_back(lo * std::pow(max_coord / lo,
                                   static_cast<double>(i) /
                                       std::max(1, points - 1)));
  }
  return grid;
}

struct CurvePoint {
  double coord = 0.0;
  double mean_gap = 0.0;
  double solved_fraction = 0.0;
  int n_instances = 0;
};

namespace detail {

inline double step_coord(const EpisodeStep& s, GridMode mode) {
  return mode == GridMode::Step ? static_cast<double>(s.t)
                                : static_cast<double>(s.elapsed_ms) / 1000.0;
}

// Best objective achieved by any of the instance's records at or before
// each grid coordinate (right-continuous step function).
inline std::vector<std::optional<double>> best_by_grid(
    const std::vector<const EpisodeRecord*>& records,
    const std::vector<double>& grid, GridMode mode) {
  std::vector<std::optional<double>> best(grid.size());
  for (const EpisodeRecord* r : records) {
    for (const EpisodeStep& s : r->steps) {
      const double c = step_coord(s, mode);
      for (std::size_t g = 0; g < grid.size(); ++g) {
        if (c <= grid[g] + 1e-12) {
          if (!best[g] || s.objective < *best[g]) best[g] = s.objective;
        }
      }
    }
  }
  // best-so-far is monotone along the grid
  for (std::size_t g = 1; g < grid.size(); ++g) {
    if (best[g - 1] && (!best[g] || *best[g - 1] < *best[g]))
      best[g] = best[g - 1];
  }
  return best;
}

inline std::map<std::string, std::vector<const EpisodeRecord*>>
group_by_instance(const std::vector<EpisodeRecord>& records,
                  const BestKnownTable& table) {
  std::map<std::string, std::vector<const EpisodeRecord*>> groups;
  for (const EpisodeRecord& r : records) {
    table.at(r.instance_id);  // throws with the missing name
    groups[r.instance_id].push_back(&r);
  }
  return groups;
}

}  // namespace detail

// Mean best-so-far primal gap over instances at each grid point.
inline std::vector<CurvePoint> average_gap_curve(
    const std::vector<EpisodeRecord>& records, const BestKnownTable& table,
    const std::vector<double>& grid, GridMode mode = GridMode::Step) {
  const auto groups = detail::group_by_instance(records, table);
  const int n = static_cast<int>(groups.size());
  std::vector<CurvePoint> curve(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    curve[g].coord = grid[g];
    curve[g].n_instances = n;
  }
  for (const auto& [id, recs] : groups) {
    const double f_star = table.at(id).objective;
    const auto best = detail::best_by_grid(recs, grid, mode);
    for (std::size_t g = 0; g < grid.size(); ++g)
      curve[g].mean_gap += primal_gap(best[g], f_star);
  }
  for (CurvePoint& p : curve)
    if (n > 0) p.mean_gap /= n;
  return curve;
}

// Fraction of instances whose best-so-far gap is at or below the threshold.
inline std::vector<CurvePoint> survival_curve(
    const std::vector<EpisodeRecord>& records, const BestKnownTable& table,
    double threshold, const std::vector<double>& grid,
    GridMode mode = GridMode::Step) {
  if (threshold < 0.0)
    throw InvalidParameterError("survival_curve: threshold < 0");
  const auto groups = detail::group_by_instance(records, table);
  const int n = static_cast<int>(groups.size());
  std::vector<CurvePoint> curve(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    curve[g].coord = grid[g];
    curve[g].n_instances = n;
  }
  for (const auto& [id, recs] : groups) {
    const double f_star = table.at(id).objective;
    const auto best = detail::best_by_grid(recs, grid, mode);
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const double gap = primal_gap(best[g], f_star);
      if (gap <= threshold) curve[g].solved_fraction += 1.0;
      curve[g].mean_gap += gap;
    }
  }
  for (CurvePoint& p : curve) {
    if (n > 0) {
      p.solved_fraction /= n;
      p.mean_gap /= n;
    }
  }
  return curve;
}

inline void write_gap_curve_csv(const std::string& path,
                                const std::vector<CurvePoint>& curve) {
  std::ofstream out(path);
  if (!out) throw LoadError("cannot write " + path);
  out << "grid_point,mean_gap,n\n";
  for (const CurvePoint& p : curve)
    out << p.coord << ',' << p.mean_gap << ',' << p.n_instances << '\n';
}

inline void write_survival_csv(const std::string& path,
                               const std::vector<CurvePoint>& curve,
                               double threshold) {
  std::ofstream out(path);
  if (!out) throw LoadError("cannot write " + path);
  out << "grid_point,fraction,threshold\n";
  for (const CurvePoint& p : curve)
    out << p.coord << ',' << p.solved_fraction << ',' << threshold << '\n';
}

}  // namespace lnsforge
