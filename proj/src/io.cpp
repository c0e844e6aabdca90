#include "ifslab/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "ifslab/errors.hpp"

namespace ifslab {

namespace {

const char* const kAxisNames[3] = {"x", "y", "z"};

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    const std::size_t comma = std::min(line.find(',', pos), line.size());
    out.push_back(line.substr(pos, comma - pos));
    pos = comma + 1;
  }
  return out;
}

double parse_field(const std::string& tok, const std::filesystem::path& path, std::size_t lineno) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (tok.empty() || end != tok.c_str() + tok.size()) {
    throw InvalidArgument(path.string() + ":" + std::to_string(lineno) + ": bad number '" + tok + "'");
  }
  return v;
}

// header → (dim, has_weight); anything unexpected throws
std::pair<int, bool> parse_header(const std::vector<std::string>& cols,
                                  const std::filesystem::path& path) {
  bool has_weight = false;
  std::size_t n = cols.size();
  if (n > 1 && cols.back() == "weight") {
    has_weight = true;
    --n;
  }
  if (n < 1 || n > 3) throw InvalidArgument(path.string() + ": header must have 1-3 axes");
  for (std::size_t i = 0; i < n; ++i) {
    if (cols[i] != kAxisNames[i]) {
      throw InvalidArgument(path.string() + ": unexpected header column '" + cols[i] + "'");
    }
  }
  return {static_cast<int>(n), has_weight};
}

struct ParsedCsv {
  int dim = 0;
  bool has_weight = false;
  std::vector<Point> points;
  std::vector<double> weights;
};

ParsedCsv parse_csv(const std::filesystem::path& path, bool want_weight) {
  const std::string text = read_file(path);
  ParsedCsv out;
  std::size_t pos = 0;
  std::size_t lineno = 0;
  while (pos < text.size()) {
    std::size_t nl = std::min(text.find('\n', pos), text.size());
    std::string line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    pos = nl + 1;
    ++lineno;
    if (line.empty()) continue;
    const std::vector<std::string> cols = split_line(line);
    if (lineno == 1) {
      const auto [dim, has_weight] = parse_header(cols, path);
      if (has_weight != want_weight) {
        throw InvalidArgument(path.string() + ": expected a file " + (want_weight ? "with" : "without") +
                    " a weight column");
      }
      out.dim = dim;
      out.has_weight = has_weight;
      continue;
    }
    const std::size_t expect = static_cast<std::size_t>(out.dim) + (out.has_weight ? 1 : 0);
    if (cols.size() != expect) {
      throw InvalidArgument(path.string() + ":" + std::to_string(lineno) + ": expected " +
                  std::to_string(expect) + " fields, got " + std::to_string(cols.size()));
    }
    Point p;
    p.dim = out.dim;
    for (int i = 0; i < out.dim; ++i) {
      const double v = parse_field(cols[static_cast<std::size_t>(i)], path, lineno);
      p.c[i] = v == 0.0 ? 0.0 : v;
    }
    out.points.push_back(p);
    if (out.has_weight) out.weights.push_back(parse_field(cols.back(), path, lineno));
  }
  if (out.dim == 0) throw InvalidArgument(path.string() + ": missing header");
  return out;
}

}  // namespace

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_points_csv(const std::filesystem::path& path, const PointCloud& cloud) {
  std::string out;
  for (int i = 0; i < cloud.dim(); ++i) {
    if (i) out += ',';
    out += kAxisNames[i];
  }
  out += '\n';
  for (const Point& p : cloud.points()) {
    for (int i = 0; i < cloud.dim(); ++i) {
      if (i) out += ',';
      out += format_number(p.c[i]);
    }
    out += '\n';
  }
  write_text_atomic(path, out);
}

PointCloud read_points_csv(const std::filesystem::path& path) {
  ParsedCsv parsed = parse_csv(path, /*want_weight=*/false);
  if (parsed.points.empty()) throw InvalidArgument(path.string() + ": no points");
  return PointCloud(std::move(parsed.points));
}

void write_measure_csv(const std::filesystem::path& path, const DiscreteMeasure& mu) {
  std::string out;
  for (int i = 0; i < mu.dim(); ++i) {
    if (i) out += ',';
    out += kAxisNames[i];
  }
  out += ",weight\n";
  for (const Atom& a : mu.atoms()) {
    for (int i = 0; i < mu.dim(); ++i) {
      if (i) out += ',';
      out += format_number(a.x.c[i]);
    }
    out += ',';
    out += format_number(a.w);
    out += '\n';
  }
  write_text_atomic(path, out);
}

DiscreteMeasure read_measure_csv(const std::filesystem::path& path) {
  ParsedCsv parsed = parse_csv(path, /*want_weight=*/true);
  if (parsed.points.empty()) throw InvalidArgument(path.string() + ": no atoms");
  std::vector<Atom> atoms;
  atoms.reserve(parsed.points.size());
  for (std::size_t i = 0; i < parsed.points.size(); ++i) {
    atoms.push_back({parsed.points[i], parsed.weights[i]});
  }
  return DiscreteMeasure::of(std::move(atoms), 0.0);
}

namespace {

struct Raster {
  int w = 0;
  int h = 0;
  std::vector<unsigned char> gray;  // row-major, 255 = white
};

int to_col(double x, double lo, double hi, int w) {
  if (!(hi > lo)) return (w - 1) / 2;
  const int c = static_cast<int>(std::floor((x - lo) / (hi - lo) * w));
  return std::clamp(c, 0, w - 1);
}

// row 0 is the top of the image; world y grows upward
int to_row(double y, double lo, double hi, int h) {
  if (!(hi > lo)) return (h - 1) / 2;
  const int r = static_cast<int>(std::floor((y - lo) / (hi - lo) * h));
  return h - 1 - std::clamp(r, 0, h - 1);
}

void check_renderable(int dim, const BoxDomain& window, const RenderOptions& opts) {
  if (dim > 2) throw InvalidArgument("rendering needs a 1D or 2D cloud, got 3D");
  if (window.dim() != dim) throw DimensionMismatch("render window dimension mismatch");
  if (opts.width < 1 || opts.height < 1) {
    throw InvalidArgument("render size must be at least 1x1");
  }
}

// rows covered by a 1D value: a band around mid-height
std::pair<int, int> band_rows(int h) {
  const int r0 = (3 * h) / 8;
  const int r1 = std::max(r0, (5 * h) / 8 - 1);
  return {r0, r1};
}

void write_ppm(const std::filesystem::path& path, const Raster& img) {
  std::string out = "P6\n" + std::to_string(img.w) + " " + std::to_string(img.h) + "\n255\n";
  out.reserve(out.size() + static_cast<std::size_t>(img.w) * img.h * 3);
  for (unsigned char g : img.gray) {
    out.push_back(static_cast<char>(g));
    out.push_back(static_cast<char>(g));
    out.push_back(static_cast<char>(g));
  }
  write_text_atomic(path, out);
}

}  // namespace

void render_points_ppm(const std::filesystem::path& path, const PointCloud& cloud,
                       const BoxDomain& window, const RenderOptions& opts) {
  check_renderable(cloud.dim(), window, opts);
  Raster img{opts.width, opts.height,
             std::vector<unsigned char>(static_cast<std::size_t>(opts.width) * opts.height, 255)};
  for (const Point& p : cloud.points()) {
    const int col = to_col(p.c[0], window.lo.c[0], window.hi.c[0], img.w);
    if (cloud.dim() == 1) {
      const auto [r0, r1] = band_rows(img.h);
      for (int r = r0; r <= r1; ++r) {
        img.gray[static_cast<std::size_t>(r) * img.w + col] = 0;
      }
    } else {
      const int row = to_row(p.c[1], window.lo.c[1], window.hi.c[1], img.h);
      img.gray[static_cast<std::size_t>(row) * img.w + col] = 0;
    }
  }
  write_ppm(path, img);
}

void render_measure_ppm(const std::filesystem::path& path, const DiscreteMeasure& mu,
                        const BoxDomain& window, const RenderOptions& opts) {
  check_renderable(mu.dim(), window, opts);
  std::vector<double> mass(static_cast<std::size_t>(opts.width) * opts.height, 0.0);
  for (const Atom& a : mu.atoms()) {
    const int col = to_col(a.x.c[0], window.lo.c[0], window.hi.c[0], opts.width);
    if (mu.dim() == 1) {
      const auto [r0, r1] = band_rows(opts.height);
      for (int r = r0; r <= r1; ++r) {
        mass[static_cast<std::size_t>(r) * opts.width + col] += a.w;
      }
    } else {
      const int row = to_row(a.x.c[1], window.lo.c[1], window.hi.c[1], opts.height);
      mass[static_cast<std::size_t>(row) * opts.width + col] += a.w;
    }
  }
  const double wmax = *std::max_element(mass.begin(), mass.end());
  Raster img{opts.width, opts.height,
             std::vector<unsigned char>(static_cast<std::size_t>(opts.width) * opts.height, 255)};
  if (wmax > 0.0) {
    for (std::size_t i = 0; i < mass.size(); ++i) {
      if (mass[i] > 0.0) {
        const double g = 255.0 - std::nearbyint(255.0 * mass[i] / wmax);
        img.gray[i] = static_cast<unsigned char>(std::clamp(g, 0.0, 255.0));
      }
    }
  }
  write_ppm(path, img);
}

}  // namespace ifslab
