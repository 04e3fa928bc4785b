#pragma once

#include "budgetsvm/diagnostics.hpp"

#include <iosfwd>
#include <span>
#include <string>

namespace budgetsvm {

/// Static SVG with two linear-axis panels: primal/dual objective and test accuracy per epoch.
void write_svg_plot(std::span<const EpochRecord> records, const std::string& title, std::ostream& out);

}  // namespace budgetsvm
