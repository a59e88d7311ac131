#pragma once

#include <string>
#include <vector>

#include "sessio/payload.hpp"
#include "sessio/protocol.hpp"

namespace sessio::apps {

using Polygon = std::vector<Vector2>;

// Directed edge of a convex clipper. Points on its left, or on the line,
// are inside.
struct ClipEdge {
  Vector2 from;
  Vector2 to;
};

double cross(Vector2 o, Vector2 a, Vector2 b);

// Where segment (p, q) crosses the line through the edge.
Vector2 intersection(Vector2 p, Vector2 q, const ClipEdge& edge);

// Vertices one clipping stage emits for the segment from `from` to `to`.
std::vector<Vector2> clip_segment(Vector2 from, Vector2 to, const ClipEdge& edge);

double signed_area(const Polygon& p);

// Edges of the clipper in counter-clockwise order.
std::vector<ClipEdge> clipper_edges(Polygon clipper);

// Vertices stream through the session one per select-left, then
// select-right ends the stream.
inline constexpr auto clip_protocol = [] {
  using namespace combinators;
  return select(send(val<Vector2>, goto0), end);
}();

// Sutherland-Hodgman with one pipeline stage per clipper edge.
Polygon run_clip(const Polygon& subject, const Polygon& clipper);

// One `x y` pair per line; blank lines are skipped.
Polygon parse_polygon(const std::string& text);

}  // namespace sessio::apps
