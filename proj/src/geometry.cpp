#include "uwbpos/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace uwbpos {

namespace {

double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

int orient_sign(const Point2& o, const Point2& a, const Point2& b) {
  const double c = cross(o, a, b);
  if (c > 0.0) return 1;
  if (c < 0.0) return -1;
  return 0;
}

// p collinear with a-b assumed; checks p within the segment's bounding box.
bool on_segment(const Point2& a, const Point2& b, const Point2& p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

}  // namespace

double Rect::diagonal() const { return std::hypot(width(), height()); }

AnchorMap::AnchorMap(std::vector<Anchor> anchors) : anchors_(std::move(anchors)) {
  std::unordered_set<int> ids;
  for (const auto& a : anchors_) {
    if (!std::isfinite(a.position.x) || !std::isfinite(a.position.y))
      throw std::invalid_argument("anchor position must be finite");
    if (!ids.insert(a.id).second)
      throw std::invalid_argument("duplicate anchor id " + std::to_string(a.id));
  }
}

const Anchor* AnchorMap::find(int id) const {
  for (const auto& a : anchors_)
    if (a.id == id) return &a;
  return nullptr;
}

const Anchor& AnchorMap::at(int id) const {
  const Anchor* a = find(id);
  if (!a) throw std::out_of_range("unknown anchor id " + std::to_string(id));
  return *a;
}

void Floorplan::validate() const {
  if (!(bounds.x1 > bounds.x0) || !(bounds.y1 > bounds.y0))
    throw std::invalid_argument("floorplan bounds must have positive area");
  for (const auto& w : walls) {
    if (!bounds.contains(w.a) || !bounds.contains(w.b))
      throw std::invalid_argument("wall endpoint outside floorplan bounds");
  }
}

std::string to_string(PropagationClass c) {
  switch (c) {
    case PropagationClass::los: return "LOS";
    case PropagationClass::nlos: return "NLOS";
    case PropagationClass::snlos: return "SNLOS";
  }
  return "?";
}

PropagationClass propagation_class_from_string(const std::string& s) {
  if (s == "LOS" || s == "los") return PropagationClass::los;
  if (s == "NLOS" || s == "nlos") return PropagationClass::nlos;
  if (s == "SNLOS" || s == "snlos") return PropagationClass::snlos;
  throw std::invalid_argument("unknown propagation class '" + s + "'");
}

double distance(const Point2& p, const Point2& q) {
  return std::hypot(p.x - q.x, p.y - q.y);
}

double geometric_toa(const Point2& tag, const Anchor& anchor) {
  return distance(tag, anchor.position) / kSpeedOfLightMPerNs;
}

bool segments_intersect(const Segment& s, const Segment& t) {
  const int d1 = orient_sign(t.a, t.b, s.a);
  const int d2 = orient_sign(t.a, t.b, s.b);
  const int d3 = orient_sign(s.a, s.b, t.a);
  const int d4 = orient_sign(s.a, s.b, t.b);

  if (d1 * d2 < 0 && d3 * d4 < 0) return true;

  if (d1 == 0 && on_segment(t.a, t.b, s.a)) return true;
  if (d2 == 0 && on_segment(t.a, t.b, s.b)) return true;
  if (d3 == 0 && on_segment(s.a, s.b, t.a)) return true;
  if (d4 == 0 && on_segment(s.a, s.b, t.b)) return true;

  return false;
}

int count_wall_crossings(const Point2& a, const Point2& b,
                         const Floorplan& plan) {
  const Segment link{a, b};
  int n = 0;
  for (const auto& w : plan.walls)
    if (segments_intersect(link, w)) ++n;
  return n;
}

PropagationClass classify_link_geometric(const Point2& tag,
                                         const Anchor& anchor,
                                         const Floorplan& plan) {
  const int crossings = count_wall_crossings(tag, anchor.position, plan);
  if (crossings == 0) return PropagationClass::los;
  if (crossings == 1) return PropagationClass::nlos;
  return PropagationClass::snlos;
}

}  // namespace uwbpos
