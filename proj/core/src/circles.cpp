#include "mrmr/circles.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace mrmr {

int CircleSet::insert(Circle c) {
  c.id = next_id_++;
  circles_.push_back(c);
  return c.id;
}

bool CircleSet::erase(int id) {
  auto it = std::find_if(circles_.begin(), circles_.end(),
                         [id](const Circle& c) { return c.id == id; });
  if (it == circles_.end()) return false;
  circles_.erase(it);
  return true;
}

Circle* CircleSet::find(int id) {
  for (auto& c : circles_) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

const Circle* CircleSet::find(int id) const {
  for (const auto& c : circles_) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

Circle generate_circle(Vec2 center, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("circle radius must be positive");
  Circle c;
  c.center = center;
  c.r = delta;
  return c;
}

Circle merge(const Circle& candidate, const Circle& existing, const CircleConfig& cfg) {
  const double r1 = candidate.r;
  const double r2 = existing.r;
  const double sum = r1 + r2;
  const double d = distance(candidate.center, existing.center);
  if (!(d > 0.0) || !(d < cfg.merge_eps * sum)) {
    throw std::invalid_argument("merge requires 0 < d < eps * (r1 + r2)");
  }
  Circle out;
  out.center = {(r1 * candidate.center.x + r2 * existing.center.x) / sum,
                (r1 * candidate.center.y + r2 * existing.center.y) / sum};
  out.r = (sum + d) * d / (2.0 * sum);
  out.reached = candidate.reached && existing.reached;
  return out;
}

std::vector<Circle> split_circle(const Circle& c, Vec2 direction, const CircleConfig& cfg) {
  if (!(c.r > cfg.r_thresh)) throw std::invalid_argument("split requires r > r_thresh");
  const double n = direction.norm();
  const Vec2 dir = n > 0.0 ? direction * (1.0 / n) : Vec2{1.0, 0.0};

  std::vector<Circle> out;
  Circle rest = c;
  while (rest.r > cfg.r_thresh) {
    Circle first = rest;
    first.id = 0;
    first.r = cfg.r_thresh;
    first.center = rest.center - dir * (rest.r - cfg.r_thresh);
    out.push_back(first);

    const double r2 = std::max(rest.r - cfg.r_thresh, cfg.r_min);
    Circle second = rest;
    second.id = 0;
    second.r = r2;
    second.center = first.center + dir * (cfg.r_thresh + r2);
    rest = second;
  }
  out.push_back(rest);
  return out;
}

std::vector<CircleCandidate> candidates_from(std::span<const Maximum> maxima) {
  std::vector<CircleCandidate> out;
  out.reserve(maxima.size());
  for (const auto& m : maxima) out.push_back({m.point.xy(), m.distance});
  return out;
}

namespace {

Vec2 split_direction(const SplitDirection& fn, const Circle& c) {
  if (!fn) return {1.0, 0.0};
  const Vec2 d = fn(c);
  return d.norm() > 0.0 ? d : Vec2{1.0, 0.0};
}

}  // namespace

CircleSet update_circles(CircleSet set, std::span<const CircleCandidate> candidates,
                         const CircleConfig& cfg, const SplitDirection& split_dir) {
  std::deque<Circle> work;
  for (const auto& cand : candidates) {
    if (cand.delta > 0.0) work.push_back(generate_circle(cand.center, cand.delta));
  }

  // Merges can in principle chain; the budget keeps a pathological input from
  // looping forever. Past it, circles are appended without interaction.
  std::size_t budget = 16 * (work.size() + set.size()) + 64;

  while (!work.empty()) {
    Circle c = work.front();
    work.pop_front();

    if (c.r > cfg.r_thresh) {
      auto pieces = split_circle(c, split_direction(split_dir, c), cfg);
      for (auto it = pieces.rbegin(); it != pieces.rend(); ++it) work.push_front(*it);
      continue;
    }
    if (budget == 0) {
      set.insert(c);
      continue;
    }
    --budget;

    bool dominated = false;
    const Circle* partner = nullptr;
    std::vector<int> absorbed;
    for (const auto& e : set.circles()) {
      const double d = distance(c.center, e.center);
      const double sum = c.r + e.r;
      if (d < cfg.contain_ratio * sum) {
        if (c.r > e.r) {
          absorbed.push_back(e.id);
          continue;
        }
        dominated = true;
        break;
      }
      if (d < cfg.merge_eps * sum) {
        partner = &e;
        break;
      }
    }
    if (dominated) continue;

    if (partner) {
      Circle merged = merge(c, *partner, cfg);
      const int partner_id = partner->id;
      set.erase(partner_id);
      for (int id : absorbed) set.erase(id);
      work.push_front(merged);
      continue;
    }
    for (int id : absorbed) set.erase(id);
    set.insert(c);
  }

  // Anything still oversized (only possible past the budget) is split in place.
  bool any_split = false;
  for (const auto& c : set.circles()) {
    if (c.r > cfg.r_thresh) any_split = true;
  }
  if (any_split) {
    CircleSet out;
    for (const auto& c : set.circles()) {
      if (c.r > cfg.r_thresh) {
        for (auto& p : split_circle(c, split_direction(split_dir, c), cfg)) out.insert(p);
      } else {
        out.insert(c);
      }
    }
    return out;
  }
  return set;
}

void clamp_to_free_space(CircleSet& set, const DistanceField& m, const CircleConfig& cfg) {
  auto& cs = set.mutable_circles();
  std::erase_if(cs, [&](Circle& c) {
    const Cell2 cell = m.cell_of(c.center);
    if (!m.contains(cell)) return true;
    c.r = std::min(c.r, m[cell]);
    return c.r < cfg.min_keep;
  });
}

Vec2 longest_free_direction(const BinaryMap& map, Vec2 center, double max_len) {
  constexpr int kAxes = 16;
  const double step = 0.5 * map.cell_size();
  auto run = [&](double angle) {
    const Vec2 d{std::cos(angle), std::sin(angle)};
    double t = 0.0;
    while (t + step <= max_len) {
      const Cell2 c = map.cell_of(center + d * (t + step));
      if (!map.contains(c) || map[c]) break;
      t += step;
    }
    return t;
  };

  int best = 0;
  double best_len = -1.0;
  double best_fwd = 0.0;
  double best_back = 0.0;
  for (int k = 0; k < kAxes; ++k) {
    const double a = k * std::numbers::pi / kAxes;
    const double fwd = run(a);
    const double back = run(a + std::numbers::pi);
    if (fwd + back > best_len + 1e-9) {
      best = k;
      best_len = fwd + back;
      best_fwd = fwd;
      best_back = back;
    }
  }
  const double a = best * std::numbers::pi / kAxes + (best_back > best_fwd ? std::numbers::pi : 0.0);
  return {std::cos(a), std::sin(a)};
}

}  // namespace mrmr
