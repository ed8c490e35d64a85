#pragma once

#include <string>
#include <vector>

#include "carpetperc/branching.hpp"
#include "carpetperc/dual.hpp"
#include "carpetperc/lattice.hpp"
#include "carpetperc/percolation.hpp"

namespace carpetperc {

/// Static SVG documents with stable element order. Every drawable sits in a <g> layer with an id
/// ("edges", "faces", "open", "dual-crossing", "dual-edges", "boxes").
std::string svg_graph(const SpongeGraph& g, bool with_faces = true);
std::string svg_configuration(const BondConfiguration& w, bool dual_overlay = false);
std::string svg_dual(const DualGraph& d);
std::string svg_boxes(const std::vector<BoxSpec>& boxes);

/// Number of elements in the layer with the given id.
std::size_t svg_layer_size(const std::string& svg, const std::string& layer);

}  // namespace carpetperc
