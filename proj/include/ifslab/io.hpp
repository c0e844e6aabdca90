#pragma once

#include <filesystem>
#include <string>

#include "ifslab/measure.hpp"
#include "ifslab/metric.hpp"

namespace ifslab {

/// All writers are atomic: content goes to a sibling temp file which is then
/// renamed over the target, so readers never see a partial file.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);

/// %.17g - shortest text that round-trips the double exactly.
std::string format_number(double v);

/// Round-trip-exact CSV ("x"/"x,y"/"x,y,z" header, %.17g fields).
void write_points_csv(const std::filesystem::path& path, const PointCloud& cloud);
PointCloud read_points_csv(const std::filesystem::path& path);

/// Same layout with a trailing "weight" column.
void write_measure_csv(const std::filesystem::path& path, const DiscreteMeasure& mu);
DiscreteMeasure read_measure_csv(const std::filesystem::path& path);

struct RenderOptions {
  int width = 512;
  int height = 512;
};

/// Binary PPM (P6), black points on white. 1D clouds draw as a horizontal
/// band at mid-height; 3D clouds are not renderable and throw.
void render_points_ppm(const std::filesystem::path& path, const PointCloud& cloud,
                       const BoxDomain& window, const RenderOptions& opts = {});

/// Binary PPM (P6), per-pixel weight in gray (darker = more mass).
void render_measure_ppm(const std::filesystem::path& path, const DiscreteMeasure& mu,
                        const BoxDomain& window, const RenderOptions& opts = {});

}  // namespace ifslab
