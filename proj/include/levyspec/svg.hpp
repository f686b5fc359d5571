#pragma once

#include <string>
#include <vector>

#include "levyspec/io.hpp"

namespace levyspec::svg {

// Standalone vector image overlaying up to 4 curves with a legend. Fixed
// 800x500 layout, fixed palette, shortest round-trip coordinates: identical
// inputs give identical bytes. The x axis spans the data range padded by 0.5
// on each side.
std::string render_plot(const std::vector<io::Curve>& curves, const std::string& title,
                        const std::string& x_label, const std::string& y_label);

}  // namespace levyspec::svg
