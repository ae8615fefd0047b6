#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "mirror/adams.hpp"
#include "mirror/atlas.hpp"

namespace mirror {

/// Hasse diagram of the strata poset: one node per stratum labelled
/// "I<J [dim]", edges the covering relations only.  Node order is the sorted
/// stratum order, so the output is byte-identical across runs.
inline std::string strata_poset_dot(const AdamsCube& cube, const std::string& name = "strata") {
  auto strata = enumerate_strata(cube);
  std::ostringstream os;
  os << "digraph " << name << " {\n";
  for (size_t i = 0; i < strata.size(); ++i)
    os << "  n" << i << " [label=\"" << stratum_str(cube, strata[i]) << "\"];\n";
  for (size_t i = 0; i < strata.size(); ++i)
    for (size_t j = 0; j < strata.size(); ++j) {
      if (i == j) continue;
      if (stratum_dim(strata[i]) + 1 != stratum_dim(strata[j])) continue;
      if (stratum_in_closure(strata[i], strata[j])) os << "  n" << j << " -> n" << i << ";\n";
    }
  os << "}\n";
  return os.str();
}

/// Hasse diagram of the pairs barycentric cells of an atlas.
inline std::string cells_poset_dot(const std::vector<PairsBarycentricCell>& cells,
                                   const std::string& name = "cells") {
  std::ostringstream os;
  os << "digraph " << name << " {\n";
  for (size_t i = 0; i < cells.size(); ++i)
    os << "  n" << i << " [label=\"" << bchain_str(cells[i].inner) << " < "
       << bchain_str(cells[i].outer) << " [" << cells[i].dim() << "]\"];\n";
  for (size_t i = 0; i < cells.size(); ++i)
    for (size_t j = 0; j < cells.size(); ++j) {
      if (i == j) continue;
      if (cells[i].dim() + 1 != cells[j].dim()) continue;
      if (is_cell_face(cells[j], cells[i])) os << "  n" << j << " -> n" << i << ";\n";
    }
  os << "}\n";
  return os.str();
}

}  // namespace mirror
