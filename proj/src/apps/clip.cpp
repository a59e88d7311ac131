#include "sessio/apps/clip.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "sessio/apps/parallel.hpp"
#include "sessio/runtime.hpp"

namespace sessio::apps {

double cross(Vector2 o, Vector2 a, Vector2 b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

Vector2 intersection(Vector2 p, Vector2 q, const ClipEdge& edge) {
  const double cp = cross(edge.from, edge.to, p);
  const double cq = cross(edge.from, edge.to, q);
  const double t = cp / (cp - cq);
  return {p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)};
}

std::vector<Vector2> clip_segment(Vector2 from, Vector2 to, const ClipEdge& edge) {
  const bool from_in = cross(edge.from, edge.to, from) >= 0;
  const bool to_in = cross(edge.from, edge.to, to) >= 0;
  if (from_in && to_in) return {to};
  if (from_in) return {intersection(from, to, edge)};
  if (to_in) return {intersection(from, to, edge), to};
  return {};
}

double signed_area(const Polygon& p) {
  double twice = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto& a = p[i];
    const auto& b = p[(i + 1) % p.size()];
    twice += a.x * b.y - b.x * a.y;
  }
  return twice / 2;
}

std::vector<ClipEdge> clipper_edges(Polygon clipper) {
  if (clipper.size() < 3) throw std::invalid_argument("clipper needs at least three vertices");
  if (signed_area(clipper) < 0) std::reverse(clipper.begin(), clipper.end());
  std::vector<ClipEdge> edges;
  for (std::size_t i = 0; i < clipper.size(); ++i) edges.push_back({clipper[i], clipper[(i + 1) % clipper.size()]});
  return edges;
}

Polygon run_clip(const Polygon& subject, const Polygon& clipper) {
  auto [in, out] = pipeline(clip_protocol, clipper_edges(clipper), [](auto prev, auto next, ClipEdge edge) {
    std::optional<Vector2> first;
    Vector2 from{}, to{};
    auto emit = [&](const std::vector<Vector2>& vs) {
      for (const auto& v : vs) next = next.select_left().send(v).jump();
    };
    for (bool loop = true; loop;) {
      prev.offer(
          [&](auto left) {
            auto [vertex, prev2] = left.receive();
            from = to;
            to = vertex;
            if (!first) {
              first = to;
            } else {
              emit(clip_segment(from, to, edge));
            }
            prev = prev2.jump();
          },
          [&](auto right) {
            right.close();
            if (first) emit(clip_segment(to, *first, edge));
            next.select_right().close();
            loop = false;
          });
    }
  });

  for (const auto& v : subject) in = in.select_left().send(v).jump();
  in.select_right().close();

  Polygon result;
  for (bool loop = true; loop;) {
    out.offer(
        [&](auto left) {
          auto [vertex, rest] = left.receive();
          result.push_back(vertex);
          out = rest.jump();
        },
        [&](auto right) {
          right.close();
          loop = false;
        });
  }
  return result;
}

Polygon parse_polygon(const std::string& text) {
  Polygon out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    double x, y;
    if (!(fields >> x)) continue;
    if (!(fields >> y) || !std::isfinite(x) || !std::isfinite(y)) throw std::invalid_argument("bad vertex line: " + line);
    out.push_back({x, y});
  }
  return out;
}

}  // namespace sessio::apps
