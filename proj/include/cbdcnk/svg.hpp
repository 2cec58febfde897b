#pragma once

#include <string>
#include <vector>

#include "cbdcnk/simulation.hpp"

namespace cbdcnk {

// Small-multiples line chart of IRF overlays; one panel per listed column.
// Empty panel list selects a default set of headline panels.
std::string overlay_svg(const IrfOverlay& overlay, std::vector<std::string> panels = {});

}  // namespace cbdcnk
