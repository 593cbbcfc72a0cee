#include "mrmr/coordination.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <tuple>

namespace mrmr {

double quantize_mm(double v) {
  const double q = static_cast<double>(std::llround(v * 1000.0)) / 1000.0;
  return q == 0.0 ? 0.0 : q;  // no negative zero
}

Vec3 quantize_mm(Vec3 p) { return {quantize_mm(p.x), quantize_mm(p.y), quantize_mm(p.z)}; }

namespace {

bool point_less(Vec3 a, Vec3 b) { return std::tie(a.x, a.y, a.z) < std::tie(b.x, b.y, b.z); }

bool circle_less(const ReachedCircle& a, const ReachedCircle& b) {
  return std::tie(a.center.x, a.center.y, a.center.z, a.r) <
         std::tie(b.center.x, b.center.y, b.center.z, b.r);
}

template <typename T, typename Less>
bool insert_sorted(std::vector<T>& v, const T& x, Less less) {
  auto it = std::lower_bound(v.begin(), v.end(), x, less);
  if (it != v.end() && *it == x) return false;
  v.insert(it, x);
  return true;
}

}  // namespace

void CoordinationState::set_doors(const std::vector<Vec3>& points) {
  doors.clear();
  int id = 0;
  for (const auto& p : points) doors.push_back({id++, p});
}

bool CoordinationState::add_reached_door(Vec3 p) {
  return insert_sorted(doors_reached, quantize_mm(p), point_less);
}

bool CoordinationState::add_reached_circle(Vec3 center, double r) {
  return insert_sorted(circles_reached, ReachedCircle{quantize_mm(center), quantize_mm(r)},
                       circle_less);
}

bool door_excluded(const CoordinationState& s, Vec3 p) {
  for (const auto& d : s.doors_reached) {
    if (distance(p, d) < s.eps_door) return true;
  }
  for (const auto& d : s.doors_others) {
    if (distance(p, d) < s.eps_door) return true;
  }
  return false;
}

bool circle_excluded(const CoordinationState& s, Vec3 center) {
  for (const auto& c : s.circles_reached) {
    if (distance(center, c.center) < s.eps_circle * c.r) return true;
  }
  for (const auto& c : s.circles_others) {
    if (distance(center, c.center) < s.eps_circle * c.r) return true;
  }
  return false;
}

std::optional<DoorCandidate> target_door(CoordinationState& s, Vec3 robot) {
  std::erase_if(s.doors, [&](const DoorCandidate& d) { return door_excluded(s, d.point); });
  std::optional<DoorCandidate> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& d : s.doors) {
    const double dist = distance(robot, d.point);
    if (dist < best_d || (dist == best_d && best && d.id < best->id)) {
      best = d;
      best_d = dist;
    }
  }
  return best;
}

std::optional<Circle> target_circle(CoordinationState& s, Vec3 robot, double z) {
  auto& cs = s.circles.mutable_circles();
  std::erase_if(cs, [&](const Circle& c) {
    return c.reached || circle_excluded(s, c.center3(z));
  });
  std::optional<Circle> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& c : cs) {
    const double dist = distance(robot, c.center3(z));
    if (dist < best_d || (dist == best_d && best && c.id < best->id)) {
      best = c;
      best_d = dist;
    }
  }
  return best;
}

ReachedSetsMessage canonical(ReachedSetsMessage m) {
  for (auto& d : m.doors) d = quantize_mm(d);
  for (auto& c : m.circles) {
    c.center = quantize_mm(c.center);
    c.r = quantize_mm(c.r);
  }
  std::sort(m.doors.begin(), m.doors.end(), point_less);
  m.doors.erase(std::unique(m.doors.begin(), m.doors.end()), m.doors.end());
  std::sort(m.circles.begin(), m.circles.end(), circle_less);
  m.circles.erase(std::unique(m.circles.begin(), m.circles.end()), m.circles.end());
  return m;
}

namespace {

void append_mm(std::string& out, double v) {
  long long mm = std::llround(v * 1000.0);
  if (mm < 0) {
    out += '-';
    mm = -mm;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%lld.%03lld", mm / 1000, mm % 1000);
  out += buf;
}

// Strict: optional '-', digits, '.', exactly three digits.
double parse_mm(std::string_view s) {
  std::size_t i = 0;
  bool neg = false;
  if (i < s.size() && s[i] == '-') {
    neg = true;
    ++i;
  }
  const std::size_t dot = s.find('.', i);
  if (dot == std::string_view::npos || dot == i || s.size() - dot - 1 != 3) {
    throw WireError("malformed number '" + std::string(s) + "'");
  }
  long long whole = 0;
  long long frac = 0;
  auto r1 = std::from_chars(s.data() + i, s.data() + dot, whole);
  auto r2 = std::from_chars(s.data() + dot + 1, s.data() + s.size(), frac);
  if (r1.ec != std::errc{} || r1.ptr != s.data() + dot || r2.ec != std::errc{} ||
      r2.ptr != s.data() + s.size() || s[i] == '+' || s[dot + 1] == '+' || s[dot + 1] == '-') {
    throw WireError("malformed number '" + std::string(s) + "'");
  }
  const double v = static_cast<double>(whole * 1000 + frac) / 1000.0;
  return neg ? (v == 0.0 ? 0.0 : -v) : v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t p = s.find(sep, start);
    if (p == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, p - start));
    start = p + 1;
  }
}

std::string_view field(std::string_view part, std::string_view key) {
  if (part.size() < key.size() + 1 || part.substr(0, key.size()) != key ||
      part[key.size()] != '=') {
    throw WireError("expected field '" + std::string(key) + "'");
  }
  return part.substr(key.size() + 1);
}

template <typename Int>
Int parse_int(std::string_view s, const char* what) {
  Int v{};
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || r.ec != std::errc{} || r.ptr != s.data() + s.size()) {
    throw WireError(std::string("malformed ") + what);
  }
  return v;
}

std::vector<std::vector<double>> parse_tuples(std::string_view s, std::size_t arity,
                                              const char* what) {
  std::vector<std::vector<double>> out;
  if (s.empty()) return out;
  for (auto item : split(s, ';')) {
    auto nums = split(item, ',');
    if (nums.size() != arity) {
      throw WireError(std::string(what) + " entry needs " + std::to_string(arity) + " fields");
    }
    std::vector<double> t;
    for (auto n : nums) t.push_back(parse_mm(n));
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace

std::string encode_message(const ReachedSetsMessage& msg) {
  const ReachedSetsMessage m = canonical(msg);
  std::string out = "MRMR1|robot=" + std::to_string(m.robot_id) + "|seq=" + std::to_string(m.seq);
  out += "|doors=";
  for (std::size_t i = 0; i < m.doors.size(); ++i) {
    if (i) out += ';';
    append_mm(out, m.doors[i].x);
    out += ',';
    append_mm(out, m.doors[i].y);
    out += ',';
    append_mm(out, m.doors[i].z);
  }
  out += "|circles=";
  for (std::size_t i = 0; i < m.circles.size(); ++i) {
    if (i) out += ';';
    const auto& c = m.circles[i];
    append_mm(out, c.center.x);
    out += ',';
    append_mm(out, c.center.y);
    out += ',';
    append_mm(out, c.center.z);
    out += ',';
    append_mm(out, c.r);
  }
  return out;
}

ReachedSetsMessage decode_message(std::string_view line) {
  auto parts = split(line, '|');
  if (parts.size() != 5) throw WireError("expected 5 fields, got " + std::to_string(parts.size()));
  if (parts[0] != "MRMR1") throw WireError("bad header");
  ReachedSetsMessage m;
  m.robot_id = parse_int<int>(field(parts[1], "robot"), "robot id");
  m.seq = parse_int<std::uint64_t>(field(parts[2], "seq"), "sequence number");
  for (const auto& t : parse_tuples(field(parts[3], "doors"), 3, "door")) {
    m.doors.push_back({t[0], t[1], t[2]});
  }
  for (const auto& t : parse_tuples(field(parts[4], "circles"), 4, "circle")) {
    m.circles.push_back({{t[0], t[1], t[2]}, t[3]});
  }
  return m;
}

ReachedSetsMessage make_message(const CoordinationState& s, int robot_id, std::uint64_t seq) {
  ReachedSetsMessage m;
  m.robot_id = robot_id;
  m.seq = seq;
  m.doors = s.doors_reached;
  m.circles = s.circles_reached;
  return canonical(std::move(m));
}

bool merge_message(CoordinationState& s, const ReachedSetsMessage& msg) {
  const ReachedSetsMessage m = canonical(msg);
  bool grew = false;
  for (const auto& d : m.doors) grew |= insert_sorted(s.doors_others, d, point_less);
  for (const auto& c : m.circles) grew |= insert_sorted(s.circles_others, c, circle_less);
  return grew;
}

void validate(const BusConfig& cfg) {
  if (!(cfg.drop_probability >= 0.0 && cfg.drop_probability <= 1.0)) {
    throw std::invalid_argument("drop probability must lie in [0, 1]");
  }
  if (cfg.latency_ticks < 0) throw std::invalid_argument("latency must be >= 0");
  if (cfg.delivery == Delivery::perfect && (cfg.drop_probability != 0.0 || cfg.latency_ticks != 0)) {
    throw std::invalid_argument("perfect delivery implies no drops and no latency");
  }
}

Bus::Bus(const BusConfig& cfg, int robots) : cfg_(cfg), robots_(robots), rng_(cfg.seed) {
  validate(cfg_);
}

double Bus::uniform() {
  // 53 random bits, identical on every platform (unlike uniform_real_distribution).
  return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
}

void Bus::post(std::int64_t tick, int from, std::string payload) {
  for (int to = 0; to < robots_; ++to) {
    if (to == from) continue;
    ++sent_;
    if (cfg_.delivery == Delivery::lossy && uniform() < cfg_.drop_probability) {
      ++dropped_;
      continue;
    }
    queue_.push_back({tick + 1 + cfg_.latency_ticks, to, payload});
  }
}

std::vector<std::string> Bus::collect(std::int64_t tick, int robot) {
  std::vector<std::string> out;
  std::vector<Pending> rest;
  rest.reserve(queue_.size());
  for (auto& p : queue_) {
    if (p.to == robot && p.due <= tick) {
      out.push_back(std::move(p.payload));
    } else {
      rest.push_back(std::move(p));
    }
  }
  queue_ = std::move(rest);
  return out;
}

std::vector<std::vector<std::string>> bus_step(Bus& bus, std::int64_t tick,
                                               const std::vector<std::vector<std::string>>& outbox) {
  for (std::size_t r = 0; r < outbox.size(); ++r) {
    for (const auto& msg : outbox[r]) bus.post(tick, static_cast<int>(r), msg);
  }
  std::vector<std::vector<std::string>> inbox(outbox.size());
  for (std::size_t r = 0; r < outbox.size(); ++r) {
    inbox[r] = bus.collect(tick + 1, static_cast<int>(r));
  }
  return inbox;
}

}  // namespace mrmr
