#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mrmr/circles.hpp"
#include "mrmr/geometry.hpp"

namespace mrmr {

struct DoorCandidate {
  int id = 0;
  Vec3 point;
};

// A circle someone has visited, as exchanged between robots.
struct ReachedCircle {
  Vec3 center;
  double r = 0.0;
  friend bool operator==(const ReachedCircle&, const ReachedCircle&) = default;
};

// Coordinates are snapped to millimetres before entering any reached set, so
// set membership and the wire format agree exactly.
double quantize_mm(double v);
Vec3 quantize_mm(Vec3 p);

struct CoordinationState {
  std::vector<DoorCandidate> doors;  // D
  CircleSet circles;                 // C
  std::vector<Vec3> doors_reached;   // D_r, sorted, unique
  std::vector<ReachedCircle> circles_reached;  // C_r, sorted, unique
  std::vector<Vec3> doors_others;    // D_o
  std::vector<ReachedCircle> circles_others;  // C_o
  double eps_door = 1.0;
  double eps_circle = 1.5;

  // Replaces D with fresh candidates; ids follow the given order.
  void set_doors(const std::vector<Vec3>& points);

  // Both return true if the set grew.
  bool add_reached_door(Vec3 p);
  bool add_reached_circle(Vec3 center, double r);
};

// Drops doors within eps_door of D_r or D_o and returns the nearest survivor
// (lowest id on ties).
std::optional<DoorCandidate> target_door(CoordinationState& s, Vec3 robot);

// Drops circles marked reached or whose center lies within eps_circle * r' of
// a reached circle (own or others', r' being that reached circle's radius),
// and returns the nearest survivor (lowest id on ties).
std::optional<Circle> target_circle(CoordinationState& s, Vec3 robot, double z = 1.0);

// True when `p` would be filtered out as an already reached door / circle.
bool door_excluded(const CoordinationState& s, Vec3 p);
bool circle_excluded(const CoordinationState& s, Vec3 center);

struct ReachedSetsMessage {
  int robot_id = 0;
  std::uint64_t seq = 0;
  std::vector<Vec3> doors;
  std::vector<ReachedCircle> circles;

  friend bool operator==(const ReachedSetsMessage&, const ReachedSetsMessage&) = default;
};

class WireError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Rounds to millimetres, sorts and deduplicates both lists.
ReachedSetsMessage canonical(ReachedSetsMessage m);

// `MRMR1|robot=<id>|seq=<n>|doors=x,y,z;...|circles=x,y,z,r;...` with three
// decimals per number and no trailing newline.
std::string encode_message(const ReachedSetsMessage& m);
// Throws WireError on anything that is not a well-formed line.
ReachedSetsMessage decode_message(std::string_view line);

ReachedSetsMessage make_message(const CoordinationState& s, int robot_id, std::uint64_t seq);

// Union of the message contents into D_o / C_o. Returns true if anything new.
bool merge_message(CoordinationState& s, const ReachedSetsMessage& m);

enum class Delivery { perfect, lossy };

struct BusConfig {
  Delivery delivery = Delivery::perfect;
  double drop_probability = 0.0;
  int latency_ticks = 0;
  std::uint64_t seed = 0;
};

// Throws std::invalid_argument for out-of-range fields.
void validate(const BusConfig& cfg);

// In-process broadcast channel. A message posted at tick t reaches every
// other robot at tick t + 1 + latency, unless dropped.
class Bus {
 public:
  Bus(const BusConfig& cfg, int robots);

  void post(std::int64_t tick, int from, std::string payload);
  // Messages due for `robot` at `tick`, in posting order; removes them.
  std::vector<std::string> collect(std::int64_t tick, int robot);

  std::uint64_t sent() const { return sent_; }
  std::uint64_t dropped() const { return dropped_; }

 private:
  struct Pending {
    std::int64_t due;
    int to;
    std::string payload;
  };

  double uniform();

  BusConfig cfg_;
  int robots_;
  std::mt19937_64 rng_;
  std::vector<Pending> queue_;
  std::uint64_t sent_ = 0;
  std::uint64_t dropped_ = 0;
};

// One tick of traffic: posts each robot's outbox, then returns what each robot
// receives at tick + 1 + latency once that tick arrives. Convenience wrapper
// used by tests; the simulator calls post/collect directly.
std::vector<std::vector<std::string>> bus_step(Bus& bus, std::int64_t tick,
                                               const std::vector<std::vector<std::string>>& outbox);

}  // namespace mrmr
