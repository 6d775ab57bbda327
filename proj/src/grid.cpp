#include "pmeobst/grid.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

namespace pmeobst {

SpaceTimeGrid SpaceTimeGrid::create(std::vector<Interval> domain,
                                    std::vector<int> n_space, int n_time,
                                    double T) {
  if (domain.empty() || domain.size() > 2) {
    throw ConfigError("domain: spatial dimension must be 1 or 2, got " +
                      std::to_string(domain.size()));
  }
  if (n_space.size() != domain.size()) {
    throw ConfigError("n_space: expected one entry per spatial axis");
  }
  for (size_t a = 0; a < domain.size(); ++a) {
    if (!(domain[a].hi > domain[a].lo)) {
      throw ConfigError("domain: degenerate interval on axis " +
                        std::to_string(a));
    }
    if (n_space[a] < 3) {
      throw ConfigError("n_space: insufficient spatial resolution on axis " +
                        std::to_string(a) + " (need >= 3, got " +
                        std::to_string(n_space[a]) + ")");
    }
  }
  if (n_time < 2) {
    throw ConfigError("n_time: insufficient temporal resolution (need >= 2)");
  }
  if (!(T > 0.0)) {
    throw ConfigError("T: final time must be positive");
  }

  SpaceTimeGrid g;
  g.domain_ = std::move(domain);
  g.n_space_ = std::move(n_space);
  g.n_time_ = n_time;
  g.T_ = T;
  g.tau_ = T / static_cast<double>(n_time - 1);
  g.h_.resize(g.domain_.size());
  for (size_t a = 0; a < g.domain_.size(); ++a) {
    g.h_[a] = g.domain_[a].extent() / static_cast<double>(g.n_space_[a] - 1);
  }
  return g;
}

SpaceTimeBox SpaceTimeBox::full_cylinder(const SpaceTimeGrid& grid) {
  SpaceTimeBox b;
  b.dim = grid.spatial_dim();
  for (int a = 0; a < b.dim; ++a) {
    b.lo[static_cast<size_t>(a)] = 0;
    b.hi[static_cast<size_t>(a)] = grid.n_space(a) - 1;
  }
  b.t_start = 0;
  return b;
}

void SpaceTimeBox::validate(const SpaceTimeGrid& grid) const {
  if (dim != grid.spatial_dim()) {
    throw GeometryError("box dimension does not match grid");
  }
  for (int a = 0; a < dim; ++a) {
    const auto ua = static_cast<size_t>(a);
    if (lo[ua] < 0 || hi[ua] > grid.n_space(a) - 1 || hi[ua] - lo[ua] < 1) {
      throw GeometryError("box exceeds grid bounds or is degenerate on axis " +
                          std::to_string(a));
    }
  }
  if (t_start < 0 || t_start > grid.n_time() - 1) {
    throw GeometryError("box start time level outside grid");
  }
}

bool SpaceTimeBox::is_spatially_interior(const SpaceTimeGrid& grid) const {
  for (int a = 0; a < dim; ++a) {
    const auto ua = static_cast<size_t>(a);
    if (lo[ua] < 1 || hi[ua] > grid.n_space(a) - 2) return false;
  }
  return true;
}

long SpaceTimeBox::closed_spatial_count() const {
  long n = 1;
  for (int a = 0; a < dim; ++a) {
    n *= hi[static_cast<size_t>(a)] - lo[static_cast<size_t>(a)] + 1;
  }
  return n;
}

long SpaceTimeBox::interior_spatial_count() const {
  long n = 1;
  for (int a = 0; a < dim; ++a) {
    const long w = hi[static_cast<size_t>(a)] - lo[static_cast<size_t>(a)] - 1;
    n *= std::max<long>(w, 0);
  }
  return n;
}

bool SpaceTimeBox::contains_spatial(std::span<const int> ix) const {
  for (int a = 0; a < dim; ++a) {
    const auto ua = static_cast<size_t>(a);
    if (ix[ua] < lo[ua] || ix[ua] > hi[ua]) return false;
  }
  return true;
}

bool SpaceTimeBox::spatial_strictly_inside(std::span<const int> ix) const {
  for (int a = 0; a < dim; ++a) {
    const auto ua = static_cast<size_t>(a);
    if (ix[ua] <= lo[ua] || ix[ua] >= hi[ua]) return false;
  }
  return true;
}

void for_each_closed_spatial(const SpaceTimeGrid& grid, const SpaceTimeBox& box,
                             const std::function<void(long)>& fn) {
  if (grid.spatial_dim() == 1) {
    for (int i = box.lo[0]; i <= box.hi[0]; ++i) fn(i);
    return;
  }
  const long nx = grid.n_space(0);
  for (int j = box.lo[1]; j <= box.hi[1]; ++j) {
    for (int i = box.lo[0]; i <= box.hi[0]; ++i) fn(i + nx * j);
  }
}

void for_each_interior_spatial(const SpaceTimeGrid& grid,
                               const SpaceTimeBox& box,
                               const std::function<void(long)>& fn) {
  if (grid.spatial_dim() == 1) {
    for (int i = box.lo[0] + 1; i <= box.hi[0] - 1; ++i) fn(i);
    return;
  }
  const long nx = grid.n_space(0);
  for (int j = box.lo[1] + 1; j <= box.hi[1] - 1; ++j) {
    for (int i = box.lo[0] + 1; i <= box.hi[0] - 1; ++i) fn(i + nx * j);
  }
}

void for_each_perimeter_spatial(const SpaceTimeGrid& grid,
                                const SpaceTimeBox& box,
                                const std::function<void(long)>& fn) {
  if (grid.spatial_dim() == 1) {
    fn(box.lo[0]);
    if (box.hi[0] != box.lo[0]) fn(box.hi[0]);
    return;
  }
  const long nx = grid.n_space(0);
  for (int j = box.lo[1]; j <= box.hi[1]; ++j) {
    for (int i = box.lo[0]; i <= box.hi[0]; ++i) {
      const bool edge = (i == box.lo[0] || i == box.hi[0] || j == box.lo[1] ||
                         j == box.hi[1]);
      if (edge) fn(i + nx * j);
    }
  }
}

ParabolicBoundary parabolic_boundary(const SpaceTimeBox& box,
                                     const SpaceTimeGrid& grid) {
  box.validate(grid);
  ParabolicBoundary pb;
  for_each_closed_spatial(grid, box, [&](long flat) {
    pb.initial.push_back({flat, box.t_start});
  });
  const int klast = grid.n_time() - 1;
  std::vector<long> peri;
  for_each_perimeter_spatial(grid, box, [&](long f) { peri.push_back(f); });
  for (long f : peri) {
    for (int k = box.t_start + 1; k <= klast; ++k) {
      pb.lateral.push_back({f, k});
    }
  }
  return pb;
}

namespace {

// Per-axis dyadic sub-ranges of [0, extent] at the given level: width about
// extent/2^level, placed at half-width strides so neighbours overlap.
std::vector<std::pair<int, int>> dyadic_ranges(long extent, int level) {
  std::vector<std::pair<int, int>> out;
  const long denom = 1L << (level + 1);
  const long jmax = denom - 2;
  for (long j = 0; j <= jmax; ++j) {
    const long lo = (j * extent) / denom;
    const long hi = ((j + 2) * extent + denom - 1) / denom;  // ceil
    if (hi - lo >= 2 && hi <= extent) {
      out.emplace_back(static_cast<int>(lo), static_cast<int>(hi));
    }
  }
  return out;
}

std::vector<int> dyadic_time_starts(int n_time, int level) {
  std::vector<int> out;
  const long denom = 1L << level;
  for (long q = 0; q < denom; ++q) {
    const int k = static_cast<int>((q * (n_time - 1)) / denom);
    if (k <= n_time - 2) out.push_back(k);
  }
  return out;
}

using BoxKey = std::tuple<int, int, int, int, int>;

BoxKey key_of(const SpaceTimeBox& b) {
  return {b.lo[0], b.hi[0], b.lo[1], b.hi[1], b.t_start};
}

std::vector<SpaceTimeBox> boxes_at_level(const SpaceTimeGrid& grid, int lvl,
                                         std::set<BoxKey>& seen) {
  std::vector<SpaceTimeBox> fresh;
  const int dim = grid.spatial_dim();
  std::array<std::vector<std::pair<int, int>>, 2> ranges;
  for (int a = 0; a < dim; ++a) {
    const long extent = grid.n_space(a) - 3;  // intervals within [1, n-2]
    if (extent < 2) return fresh;
    ranges[static_cast<size_t>(a)] = dyadic_ranges(extent, lvl);
    if (ranges[static_cast<size_t>(a)].empty()) return fresh;
  }
  const auto starts = dyadic_time_starts(grid.n_time(), lvl);

  auto emit = [&](const std::array<std::pair<int, int>, 2>& r) {
    for (int k0 : starts) {
      SpaceTimeBox b;
      b.dim = dim;
      b.t_start = k0;
      for (int a = 0; a < dim; ++a) {
        const auto ua = static_cast<size_t>(a);
        b.lo[ua] = 1 + r[ua].first;
        b.hi[ua] = 1 + r[ua].second;
      }
      if (seen.insert(key_of(b)).second) fresh.push_back(b);
    }
  };

  if (dim == 1) {
    for (const auto& r0 : ranges[0]) emit({r0, {0, 0}});
  } else {
    for (const auto& r0 : ranges[0]) {
      for (const auto& r1 : ranges[1]) emit({r0, r1});
    }
  }
  return fresh;
}

}  // namespace

std::vector<EnumeratedBox> enumerate_boxes(const SpaceTimeGrid& grid, int level,
                                           BoxOrder order) {
  if (level < 0) throw ConfigError("level: must be >= 0");
  if (level > 24) throw ConfigError("level: enumeration level too large");
  std::vector<EnumeratedBox> out;
  std::set<BoxKey> seen;
  for (int lvl = 0; lvl <= level; ++lvl) {
    auto fresh = boxes_at_level(grid, lvl, seen);
    if (order == BoxOrder::kReversedWithinLevel) {
      std::reverse(fresh.begin(), fresh.end());
    }
    for (auto& b : fresh) {
      out.push_back({b, lvl, static_cast<int>(out.size())});
    }
  }
  return out;
}

int enumeration_depth(const SpaceTimeGrid& grid) {
  std::set<BoxKey> seen;
  for (int lvl = 0; lvl <= 24; ++lvl) {
    if (boxes_at_level(grid, lvl, seen).empty()) return lvl;
  }
  return 24;
}

}  // namespace pmeobst
