#pragma once

#include <string>
#include <vector>

namespace uwbpos {

// Units are fixed across the library: meters for space, nanoseconds for
// time, dBm for power.
inline constexpr double kSpeedOfLightMPerNs = 0.299792458;

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct Segment {
  Point2 a;
  Point2 b;
};

struct Rect {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double diagonal() const;
  Point2 center() const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }
  bool contains(const Point2& p) const {
    return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1;
  }
};

struct Anchor {
  int id = 0;
  Point2 position;
};

// Fixed infrastructure nodes, unique ids. Size requirements (>= 3 anchors
// for a 2-D TDOA fix) are enforced at the call sites that need them.
class AnchorMap {
 public:
  AnchorMap() = default;
  explicit AnchorMap(std::vector<Anchor> anchors);

  const std::vector<Anchor>& anchors() const { return anchors_; }
  std::size_t size() const { return anchors_.size(); }
  const Anchor* find(int id) const;
  const Anchor& at(int id) const;  // throws if absent

 private:
  std::vector<Anchor> anchors_;
};

struct Floorplan {
  std::vector<Segment> walls;
  Rect bounds;

  // Throws std::invalid_argument on degenerate bounds or wall endpoints
  // outside the bounds.
  void validate() const;
};

enum class PropagationClass { los = 0, nlos = 1, snlos = 2 };
inline constexpr std::size_t kNumClasses = 3;

std::string to_string(PropagationClass c);
PropagationClass propagation_class_from_string(const std::string& s);

double distance(const Point2& p, const Point2& q);

// Time of flight in ns for the straight tag-anchor path.
double geometric_toa(const Point2& tag, const Anchor& anchor);

// True when the segments share at least one point. Endpoint grazing and
// collinear overlap count as intersection.
bool segments_intersect(const Segment& s, const Segment& t);

// Number of walls the segment a-b crosses. Touching a wall counts as a
// crossing; collinear overlap with a wall counts once.
int count_wall_crossings(const Point2& a, const Point2& b,
                         const Floorplan& plan);

// 0 crossings -> LOS, 1 -> NLOS, >=2 -> SNLOS.
PropagationClass classify_link_geometric(const Point2& tag,
                                         const Anchor& anchor,
                                         const Floorplan& plan);

}  // namespace uwbpos
