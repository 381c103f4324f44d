#include "smart/svg.hpp"

#include <array>
#include <iterator>

#include <fmt/format.h>

namespace smart {

namespace {

constexpr std::array<const char*, 8> kPalette{"#2b6cb0", "#dd6b20", "#38a169", "#805ad5",
                                              "#d53f8c", "#319795", "#b7791f", "#718096"};

const char* tree_color(int index) {
  if (index < 0) {
    return "#a0aec0";
  }
  return kPalette[static_cast<std::size_t>(index) % kPalette.size()];
}

}  // namespace

std::string render_snapshot(const TraceData& trace, std::size_t index, double pixels_per_meter) {
  const TreeSnapshot snap = replay(trace, index);
  const TraceTick& tick = trace.ticks[index];
  const double s = pixels_per_meter;
  auto X = [&](double x) { return (x - trace.origin.x) * s; };
  auto Y = [&](double y) { return (trace.origin.y + trace.height - y) * s; };

  std::string out;
  auto it = std::back_inserter(out);
  fmt::format_to(it,
                 "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n",
                 trace.width * s, trace.height * s);
  fmt::format_to(it, "<title>t = {} s</title>\n", tick.t);
  fmt::format_to(it, "<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\" stroke=\"black\"/>\n",
                 trace.width * s, trace.height * s);

  fmt::format_to(it, "<g id=\"static\" fill=\"#4a5568\">\n");
  for (const CellIndex c : trace.static_cells) {
    const double x0 = trace.origin.x + c.col * trace.cell_size;
    const double y1 = trace.origin.y + (c.row + 1) * trace.cell_size;
    fmt::format_to(it, "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"/>\n", X(x0), Y(y1), trace.cell_size * s,
                   trace.cell_size * s);
  }
  fmt::format_to(it, "</g>\n");

  fmt::format_to(it, "<g id=\"tree\" stroke-width=\"1\">\n");
  for (std::size_t i = 0; i < snap.parents.size(); ++i) {
    const int p = snap.parents[i];
    if (p < 0) {
      continue;
    }
    const Point2 a = snap.positions[i];
    const Point2 b = snap.positions[static_cast<std::size_t>(p)];
    fmt::format_to(it, "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" data-tree=\"{}\"/>\n", X(a.x),
                   Y(a.y), X(b.x), Y(b.y), tree_color(snap.tree_index[i]), snap.tree_index[i]);
  }
  for (std::size_t i = 0; i < snap.positions.size(); ++i) {
    if (!snap.active[i]) {
      const Point2 a = snap.positions[i];
      fmt::format_to(it, "<circle class=\"pruned\" cx=\"{}\" cy=\"{}\" r=\"1.5\" fill=\"#a0aec0\"/>\n", X(a.x),
                     Y(a.y));
    }
  }
  fmt::format_to(it, "</g>\n");

  fmt::format_to(it, "<g id=\"zones\" fill=\"none\">\n");
  if (tick.lrz) {
    fmt::format_to(it, "<circle class=\"lrz\" cx=\"{}\" cy=\"{}\" r=\"{}\" stroke=\"#3182ce\" stroke-dasharray=\"4 3\"/>\n",
                   X(tick.lrz->center.x), Y(tick.lrz->center.y), tick.lrz->radius * s);
  }
  for (const TraceZone& z : tick.ohz) {
    fmt::format_to(it, "<circle class=\"ohz\" cx=\"{}\" cy=\"{}\" r=\"{}\" stroke=\"#ed8936\"/>\n", X(z.disc.center.x),
                   Y(z.disc.center.y), z.disc.radius * s);
  }
  for (const Disc& d : tick.cpr) {
    fmt::format_to(it,
                   "<circle class=\"cpr\" cx=\"{}\" cy=\"{}\" r=\"{}\" stroke=\"#e53e3e\" fill=\"#e53e3e\" "
                   "fill-opacity=\"0.15\"/>\n",
                   X(d.center.x), Y(d.center.y), d.radius * s);
  }
  fmt::format_to(it, "</g>\n");

  fmt::format_to(it, "<g id=\"path\" fill=\"none\" stroke=\"#1a202c\" stroke-width=\"2\">\n");
  if (snap.path.size() >= 2) {
    fmt::format_to(it, "<polyline points=\"");
    for (std::size_t i = 0; i < snap.path.size(); ++i) {
      fmt::format_to(it, "{}{},{}", i == 0 ? "" : " ", X(snap.path[i].x), Y(snap.path[i].y));
    }
    fmt::format_to(it, "\"/>\n");
  }
  fmt::format_to(it, "</g>\n");

  fmt::format_to(it, "<g id=\"agents\">\n");
  fmt::format_to(it, "<circle class=\"goal\" cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"#38a169\"/>\n", X(trace.goal.x),
                 Y(trace.goal.y), 0.3 * s);
  for (const TraceObstacle& o : tick.obstacles) {
    fmt::format_to(it, "<circle class=\"obstacle\" cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"#c53030\"/>\n", X(o.position.x),
                   Y(o.position.y), o.radius * s);
  }
  fmt::format_to(it, "<circle class=\"cobot\" cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"#2b6cb0\"/>\n", X(tick.cobot.x),
                 Y(tick.cobot.y), trace.robot_radius * s);
  fmt::format_to(it, "</g>\n</svg>\n");
  return out;
}

}  // namespace smart
