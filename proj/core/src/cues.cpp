#include "mrmr/cues.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

namespace mrmr {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Lower envelope of parabolas rooted at the finite entries of f:
// out[q] = min_p f[p] + (q - p)^2. Entries of f are squared cell distances,
// so every finite output is an exact small integer.
void envelope_1d(const std::vector<double>& f, std::vector<double>& out,
                 std::vector<int>& v, std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[q] == kInf) continue;
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -kInf;
      z[1] = kInf;
      continue;
    }
    auto intersect = [&](int p) {
      return ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * q - 2.0 * p);
    };
    double s = intersect(v[k]);
    // z[0] is -inf, so this stops at k == 0.
    while (s <= z[k]) s = intersect(v[--k]);
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  if (k < 0) {
    std::fill(out.begin(), out.end(), kInf);
    return;
  }
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[j + 1] < q) ++j;
    const double d = q - v[j];
    out[q] = d * d + f[v[j]];
  }
}

// Bilinear sample of m at fractional cell coordinates, clamped to the map.
double sample(const DistanceField& m, double fx, double fy) {
  fx = std::clamp(fx, 0.0, double(m.width() - 1));
  fy = std::clamp(fy, 0.0, double(m.height() - 1));
  const int x0 = static_cast<int>(std::floor(fx));
  const int y0 = static_cast<int>(std::floor(fy));
  const int x1 = std::min(x0 + 1, m.width() - 1);
  const int y1 = std::min(y0 + 1, m.height() - 1);
  const double tx = fx - x0;
  const double ty = fy - y0;
  if (tx == 0.0 && ty == 0.0) return m(x0, y0);
  const double a = m(x0, y0) * (1 - tx) + m(x1, y0) * tx;
  const double b = m(x0, y1) * (1 - tx) + m(x1, y1) * tx;
  return a * (1 - ty) + b * ty;
}

// Walks a circle of `radius` meters around c and counts how often the field
// alternates between clearly above and clearly below m[c]. Samples within
// `margin` of m[c] are skipped. A doorway gives 4: two jambs, two rooms.
int ring_alternations(const DistanceField& m, Cell2 c, double radius, double margin) {
  constexpr int kSamples = 32;
  const double rc = radius / m.cell_size();
  const double v = m[c];
  int first = 0, prev = 0, changes = 0;
  for (int k = 0; k < kSamples; ++k) {
    const double a = 2.0 * std::numbers::pi * k / kSamples;
    const double s = sample(m, c.x + rc * std::cos(a), c.y + rc * std::sin(a));
    const int sign = s > v + margin ? 1 : (s < v - margin ? -1 : 0);
    if (sign == 0) continue;
    if (first == 0) first = sign;
    if (prev != 0 && sign != prev) ++changes;
    prev = sign;
  }
  if (prev != 0 && prev != first) ++changes;  // close the loop
  return changes;
}

struct DisjointSets {
  std::vector<int> parent;
  explicit DisjointSets(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

Cell2 snap_to_free(const BinaryMap& binary, const BinaryMap& filtered, Vec2 p) {
  const double cs = binary.cell_size();
  const Cell2 base = binary.cell_of(p);
  const int max_r = std::max(binary.width(), binary.height());
  for (int r = 0; r <= max_r; ++r) {
    Cell2 best{-1, -1};
    double best_d = kInf;
    for (int y = base.y - r; y <= base.y + r; ++y) {
      for (int x = base.x - r; x <= base.x + r; ++x) {
        if (!binary.contains(x, y)) continue;
        if (binary(x, y) || filtered(x, y)) continue;
        const double d = distance(binary.center({x, y}), p);
        if (d < best_d - 1e-12) {
          best_d = d;
          best = {x, y};
        }
      }
    }
    // A hit at ring r can still be beaten by ring r + 1 only if farther
    // than r cells; accept once the ring radius exceeds the best distance.
    if (best.x >= 0 && best_d <= r * cs) return best;
    if (best.x >= 0 && r == max_r) return best;
  }
  return base;
}

}  // namespace

BinaryMap flatten(const KnownMap& map, double z_low, double z_high) {
  const GridSpec& g = map.grid();
  if (!(z_low < z_high)) throw std::invalid_argument("flatten: z_low must be below z_high");
  int k0 = g.nz, k1 = -1;
  for (int k = 0; k < g.nz; ++k) {
    const double zc = g.center(k);
    if (zc >= z_low && zc <= z_high) {
      k0 = std::min(k0, k);
      k1 = std::max(k1, k);
    }
  }
  if (k1 < k0) throw std::invalid_argument("flatten: height band contains no voxel layer");
  BinaryMap b(g.nx, g.ny, g.cell_size, 0);
  const auto states = map.states();
  for (int y = 0; y < g.ny; ++y) {
    for (int x = 0; x < g.nx; ++x) {
      const std::size_t base = g.index({x, y, 0});
      for (int k = k0; k <= k1; ++k) {
        if (states[base + k] == VoxelState::occupied) {
          b(x, y) = 1;
          break;
        }
      }
    }
  }
  return b;
}

BinaryMap median_filter(const BinaryMap& b, MedianMode mode) {
  const int w = b.width();
  const int h = b.height();
  auto majority = [](int a, int c, int d) -> std::uint8_t { return (a + c + d) >= 2 ? 1 : 0; };
  BinaryMap along_x(w, h, b.cell_size(), 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      along_x(x, y) = majority(b(std::max(x - 1, 0), y), b(x, y), b(std::min(x + 1, w - 1), y));
    }
  }
  const BinaryMap& src = mode == MedianMode::sequential ? along_x : b;
  BinaryMap out(w, h, b.cell_size(), 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      out(x, y) = majority(src(x, std::max(y - 1, 0)), src(x, y), src(x, std::min(y + 1, h - 1)));
      if (mode == MedianMode::either_axis) out(x, y) |= along_x(x, y);
    }
  }
  return out;
}

DistanceField distance_transform(const BinaryMap& b) {
  const int w = b.width();
  const int h = b.height();
  const double cs = b.cell_size();
  DistanceField out(w, h, cs, 0.0);
  if (w == 0 || h == 0) return out;

  const int n = std::max(w, h);
  std::vector<double> f(n), d(n), z(n + 1);
  std::vector<int> v(n);
  std::vector<double> sq(static_cast<std::size_t>(w) * h);

  bool any = false;
  for (int x = 0; x < w; ++x) {
    f.resize(h);
    d.resize(h);
    for (int y = 0; y < h; ++y) {
      f[y] = b(x, y) ? 0.0 : kInf;
      any = any || b(x, y);
    }
    envelope_1d(f, d, v, z);
    for (int y = 0; y < h; ++y) sq[static_cast<std::size_t>(y) * w + x] = d[y];
  }
  if (!any) {
    const double diag = cs * std::sqrt(double(w) * w + double(h) * h);
    for (auto& e : out.data()) e = diag;
    return out;
  }
  f.resize(w);
  d.resize(w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) f[x] = sq[static_cast<std::size_t>(y) * w + x];
    envelope_1d(f, d, v, z);
    for (int x = 0; x < w; ++x) out(x, y) = cs * std::sqrt(d[x]);
  }
  return out;
}

HessianField hessian(const DistanceField& m) {
  const int w = m.width();
  const int h = m.height();
  if (w < 3 || h < 3) throw std::invalid_argument("hessian: field must be at least 3x3");
  const double cs = m.cell_size();
  const double h2 = cs * cs;
  HessianField out(w, h, cs);
  for (int y = 0; y < h; ++y) {
    const int yc = std::clamp(y, 1, h - 2);
    const int yp = std::min(y + 1, h - 1);
    const int ym = std::max(y - 1, 0);
    for (int x = 0; x < w; ++x) {
      const int xc = std::clamp(x, 1, w - 2);
      const int xp = std::min(x + 1, w - 1);
      const int xm = std::max(x - 1, 0);
      HessianEntry e;
      e.fxx = (m(xc + 1, y) - 2.0 * m(xc, y) + m(xc - 1, y)) / h2;
      e.fyy = (m(x, yc + 1) - 2.0 * m(x, yc) + m(x, yc - 1)) / h2;
      e.fxy = (m(xp, yp) - m(xp, ym) - m(xm, yp) + m(xm, ym)) / (double((xp - xm) * (yp - ym)) * h2);
      out(x, y) = e;
    }
  }
  return out;
}

CueSet classify_cues(const BinaryMap& binary, const BinaryMap& filtered, const DistanceField& m,
                     const HessianField& hs, const CueConfig& cfg,
                     std::vector<Cell2>* saddle_cells_out,
                     std::vector<Cell2>* maximum_cells_out) {
  const int w = m.width();
  const int h = m.height();
  std::vector<Cell2> saddle_cells;
  std::vector<Cell2> max_cells;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (binary(x, y) || filtered(x, y)) continue;
      const Cell2 c{x, y};
      const HessianEntry& e = hs[c];
      const double det = e.det();
      if (det < cfg.det_thresh) {
        // The determinant alone fires along every diagonal ridge of the
        // field; require the high-low-high-low pattern of a real pass.
        if (ring_alternations(m, c, cfg.saddle_ring_radius, cfg.saddle_ring_margin) >= 4) {
          saddle_cells.push_back(c);
        }
        continue;
      }
      if (!(det > 0.0 && e.fxx < cfg.fxx_thresh)) continue;
      const double v = m[c];
      if (!(v > 0.0)) continue;
      bool is_peak = true;
      for (int dy = -1; dy <= 1 && is_peak; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if ((dx == 0 && dy == 0) || !m.contains(x + dx, y + dy)) continue;
          const double nv = m(x + dx, y + dy);
          // Plateaus keep only their first cell in raster order.
          const bool earlier = (dy < 0) || (dy == 0 && dx < 0);
          if (nv > v || (nv == v && earlier)) {
            is_peak = false;
            break;
          }
        }
      }
      if (is_peak) max_cells.push_back(c);
    }
  }

  CueSet cues;
  const int n = static_cast<int>(saddle_cells.size());
  DisjointSets sets(n);
  for (int i = 0; i < n; ++i) {
    for (int k = i + 1; k < n; ++k) {
      if (distance(m.center(saddle_cells[i]), m.center(saddle_cells[k])) < cfg.cluster_radius) {
        sets.unite(i, k);
      }
    }
  }
  // Roots are the lowest member index, so clusters come out in raster order.
  for (int root = 0; root < n; ++root) {
    if (sets.find(root) != root) continue;
    Vec2 acc;
    int count = 0;
    for (int i = root; i < n; ++i) {
      if (sets.find(i) == root) {
        acc = acc + m.center(saddle_cells[i]);
        ++count;
      }
    }
    const Vec2 centroid = acc * (1.0 / count);
    const Vec2 p = m.center(snap_to_free(binary, filtered, centroid));
    cues.saddles.push_back({p.x, p.y, cfg.cue_z});
  }
  for (Cell2 c : max_cells) {
    const Vec2 p = m.center(c);
    cues.maxima.push_back({{p.x, p.y, cfg.cue_z}, m[c]});
  }
  if (saddle_cells_out) *saddle_cells_out = std::move(saddle_cells);
  if (maximum_cells_out) *maximum_cells_out = std::move(max_cells);
  return cues;
}

CuePipeline run_cue_pipeline(const BinaryMap& binary, const CueConfig& cfg) {
  CuePipeline p;
  p.binary = binary;
  p.filtered = median_filter(binary, cfg.median);
  p.distance = distance_transform(p.filtered);
  p.hessian = hessian(p.distance);
  p.cues = classify_cues(p.binary, p.filtered, p.distance, p.hessian, cfg, &p.saddle_cells,
                         &p.maximum_cells);
  return p;
}

CueSet extract_cues(const BinaryMap& binary, const CueConfig& cfg) {
  const BinaryMap filtered = median_filter(binary, cfg.median);
  const DistanceField m = distance_transform(filtered);
  const HessianField hs = hessian(m);
  return classify_cues(binary, filtered, m, hs, cfg);
}

CueSet extract_cues(const KnownMap& map, const CueConfig& cfg) {
  return extract_cues(flatten(map, cfg.z_low, cfg.z_high), cfg);
}

namespace {

template <typename T, typename Scale>
void write_pgm_impl(std::ostream& out, const Grid2<T>& g, Scale scale) {
  out << "P2\n" << g.width() << ' ' << g.height() << "\n65535\n";
  for (int y = g.height() - 1; y >= 0; --y) {
    for (int x = 0; x < g.width(); ++x) {
      const double v = std::clamp(std::round(scale(g(x, y)) * 100.0), 0.0, 65535.0);
      out << static_cast<long>(v) << (x + 1 < g.width() ? ' ' : '\n');
    }
  }
}

std::string next_token(std::istream& in) {
  std::string tok;
  char ch;
  while (in.get(ch)) {
    if (ch == '#') {
      std::string line;
      std::getline(in, line);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(ch))) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(ch);
  }
  return tok;
}

}  // namespace

void write_pgm(std::ostream& out, const BinaryMap& b) {
  write_pgm_impl(out, b, [](std::uint8_t v) { return double(v); });
}

void write_pgm(std::ostream& out, const DistanceField& m) {
  write_pgm_impl(out, m, [](double v) { return v; });
}

BinaryMap read_pgm_binary(std::istream& in, double cell_size) {
  const std::string magic = next_token(in);
  if (magic != "P2" && magic != "P5") throw std::runtime_error("pgm: unsupported magic '" + magic + "'");
  int w = 0, h = 0;
  long maxval = 0;
  try {
    w = std::stoi(next_token(in));
    h = std::stoi(next_token(in));
    maxval = std::stol(next_token(in));
  } catch (const std::exception&) {
    throw std::runtime_error("pgm: malformed header");
  }
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535) throw std::runtime_error("pgm: bad dimensions");
  BinaryMap b(w, h, cell_size, 0);
  for (int row = 0; row < h; ++row) {
    for (int x = 0; x < w; ++x) {
      long v = 0;
      if (magic == "P2") {
        const std::string t = next_token(in);
        if (t.empty()) throw std::runtime_error("pgm: truncated pixel data");
        v = std::stol(t);
      } else {
        unsigned char hi = 0, lo = 0;
        if (maxval > 255) {
          if (!in.get(reinterpret_cast<char&>(hi)) || !in.get(reinterpret_cast<char&>(lo))) {
            throw std::runtime_error("pgm: truncated pixel data");
          }
          v = (long(hi) << 8) | lo;
        } else {
          if (!in.get(reinterpret_cast<char&>(lo))) throw std::runtime_error("pgm: truncated pixel data");
          v = lo;
        }
      }
      b(x, h - 1 - row) = v >= 50 ? 1 : 0;
    }
  }
  return b;
}

}  // namespace mrmr
