#include "carpetperc/svg.hpp"

#include <sstream>

#include "carpetperc/error.hpp"

namespace carpetperc {

namespace {

constexpr int kUnit = 10;

class Doc {
 public:
  explicit Doc(const Rect& box) : box_(box) {
    const Coord m = 1;
    const Coord w = (box.width() + 2 * m) * kUnit, h = (box.height() + 2 * m) * kUnit;
    out_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" viewBox=\"0 0 "
         << w << ' ' << h << "\">\n";
    // lattice y grows upward
    out_ << "<g transform=\"translate(" << (m - box.x0) * kUnit << ',' << (box.y1 + m) * kUnit << ") scale(1,-1)\">\n";
  }

  void open_layer(const std::string& id, const std::string& style) {
    out_ << "<g id=\"" << id << "\" " << style << ">\n";
  }
  void close_layer() { out_ << "</g>\n"; }

  void line(double x0, double y0, double x1, double y1) {
    out_ << "<line x1=\"" << x0 * kUnit << "\" y1=\"" << y0 * kUnit << "\" x2=\"" << x1 * kUnit << "\" y2=\""
         << y1 * kUnit << "\"/>\n";
  }
  void rect(const Rect& r, const std::string& extra = {}) {
    out_ << "<rect x=\"" << r.x0 * kUnit << "\" y=\"" << r.y0 * kUnit << "\" width=\"" << r.width() * kUnit
         << "\" height=\"" << r.height() * kUnit << "\"" << extra << "/>\n";
  }

  std::string finish() {
    out_ << "</g>\n</svg>\n";
    return out_.str();
  }

 private:
  Rect box_;
  std::ostringstream out_;
};

void edge_lines(Doc& doc, const SpongeGraph& g, const std::vector<std::uint8_t>* keep) {
  for (EdgeId e = 0; e < static_cast<EdgeId>(g.edge_count()); ++e) {
    if (keep && !(*keep)[static_cast<std::size_t>(e)]) continue;
    const Point a = g.edge_low(e), b = g.edge_high(e);
    doc.line(static_cast<double>(a.x), static_cast<double>(a.y), static_cast<double>(b.x), static_cast<double>(b.y));
  }
}

// the unit segment crossing edge e at its midpoint
void crossing_segment(Doc& doc, const SpongeGraph& g, EdgeId e) {
  const Point a = g.edge_low(e), b = g.edge_high(e);
  const double mx = 0.5 * static_cast<double>(a.x + b.x), my = 0.5 * static_cast<double>(a.y + b.y);
  if (a.y == b.y) doc.line(mx, my - 0.5, mx, my + 0.5);
  else doc.line(mx - 0.5, my, mx + 0.5, my);
}

void face_outlines(Doc& doc, const DualGraph& d) {
  doc.open_layer("faces", "fill=\"none\" stroke=\"#9ab\" stroke-width=\"1\"");
  for (std::size_t f = 0; f < d.finite_face_count(); ++f) {
    const Face& face = d.faces()[f];
    doc.rect(face.bounds, face.kind == FaceKind::Hole ? " class=\"hole\"" : "");
  }
  doc.close_layer();
}

}  // namespace

std::string svg_graph(const SpongeGraph& g, bool with_faces) {
  Doc doc(g.box());
  if (with_faces) face_outlines(doc, DualGraph(g));
  doc.open_layer("edges", "stroke=\"#222\" stroke-width=\"2\"");
  edge_lines(doc, g, nullptr);
  doc.close_layer();
  return doc.finish();
}

std::string svg_configuration(const BondConfiguration& w, bool dual_overlay) {
  const SpongeGraph& g = w.graph();
  Doc doc(g.box());
  doc.open_layer("open", "stroke=\"#222\" stroke-width=\"2\"");
  edge_lines(doc, g, &w.bits());
  doc.close_layer();
  if (dual_overlay) {
    const DualGraph d(g);
    const auto label = dual_clusters(w, d, {Sector::Left, Sector::Right});
    const auto top = label[static_cast<std::size_t>(d.sector(Sector::Top))];
    const bool crossing = top == label[static_cast<std::size_t>(d.sector(Sector::Bottom))];
    doc.open_layer("dual-crossing", "stroke=\"#c22\" stroke-width=\"2\"");
    if (crossing)
      for (const DualEdge& de : d.edges())
        if (!w.open(de.primal) && label[static_cast<std::size_t>(de.a)] == top &&
            label[static_cast<std::size_t>(de.b)] == top)
          crossing_segment(doc, g, de.primal);
    doc.close_layer();
  }
  return doc.finish();
}

std::string svg_dual(const DualGraph& d) {
  const SpongeGraph& g = d.graph();
  Doc doc(g.box());
  face_outlines(doc, d);
  doc.open_layer("dual-edges", "stroke=\"#c22\" stroke-width=\"1\"");
  for (const DualEdge& de : d.edges()) crossing_segment(doc, g, de.primal);
  doc.close_layer();
  return doc.finish();
}

std::string svg_boxes(const std::vector<BoxSpec>& boxes) {
  if (boxes.empty()) throw Error(ErrorKind::Argument, "no boxes to draw");
  Rect hull = boxes.front().hull();
  for (const auto& b : boxes) hull = hull.united(b.hull());
  Doc doc(hull);
  doc.open_layer("boxes", "fill=\"none\" stroke-width=\"2\"");
  for (const auto& b : boxes)
    for (const auto& p : b.pieces) {
      const std::string colour = p.dir == Direction::LeftRight ? "#27a" : "#a52";
      doc.rect(p.rect, " stroke=\"" + colour + "\" data-box=\"" + std::string(b.mirror ? "B+" : "B") + "_" +
                           b.index.to_string() + "\" data-piece=\"" + p.name + "\"");
    }
  doc.close_layer();
  return doc.finish();
}

std::size_t svg_layer_size(const std::string& svg, const std::string& layer) {
  const std::string tag = "<g id=\"" + layer + "\"";
  auto pos = svg.find(tag);
  if (pos == std::string::npos) return 0;
  pos = svg.find('\n', pos);
  const auto end = svg.find("</g>", pos);
  std::size_t count = 0;
  for (auto i = svg.find('<', pos); i != std::string::npos && i < end; i = svg.find('<', i + 1)) ++count;
  return count;
}

}  // namespace carpetperc
