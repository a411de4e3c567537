#pragma once

// Minimal SVG line plots for loss / RMSE traces and BER sweeps.

#include <filesystem>
#include <string>
#include <vector>

namespace graphem::plot {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotSpec {
    std::string title;
    std::string xlabel;
    std::string ylabel;
    bool log_y = false;
    int width = 640;
    int height = 420;
};

/// Renders the series to an SVG document. Non-finite points (and
/// non-positive ones on a log axis) are skipped.
std::string render_svg(const PlotSpec& spec, const std::vector<Series>& series);

void write_svg(const std::filesystem::path& path, const PlotSpec& spec,
               const std::vector<Series>& series);

}  // namespace graphem::plot
