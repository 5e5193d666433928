#include "penudge/cli/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace penudge::cli {
namespace {

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = {}) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::out | std::ios::trunc | mode);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

constexpr char kMagic[8] = {'P', 'N', 'U', 'D', 'G', 'E', '0', '1'};

}  // namespace

std::string format_csv_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

void write_csv(const std::filesystem::path& path, const std::vector<Column>& columns) {
  const std::size_t n = columns.empty() ? 0 : columns.front().values.size();
  for (const auto& c : columns)
    if (c.values.size() != n) throw Error("write_csv: column " + c.name + " has wrong length");
  auto out = open_out(path);
  for (std::size_t j = 0; j < columns.size(); ++j) out << (j ? "," : "") << columns[j].name;
  out << "\n";
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < columns.size(); ++j)
      out << (j ? "," : "") << format_csv_number(columns[j].values[i]);
    out << "\n";
  }
}

void write_csv_rows(const std::filesystem::path& path, const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows) {
  auto out = open_out(path);
  for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
  out << "\n";
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < r.size(); ++j) out << (j ? "," : "") << r[j];
    out << "\n";
  }
}

void write_json(const std::filesystem::path& path, const Json& doc) {
  auto out = open_out(path);
  out << doc.dump(2) << "\n";
}

void write_svg(const std::filesystem::path& path, const std::string& title,
               std::span<const double> times, const std::vector<Column>& series) {
  constexpr double W = 640, H = 400, L = 60, R = 20, T = 30, B = 40;
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& s : series)
    for (double v : s.values)
      if (v > 0.0) {
        lo = std::min(lo, std::log10(v));
        hi = std::max(hi, std::log10(v));
      }
  if (!std::isfinite(lo)) lo = -1.0, hi = 0.0;
  lo = std::floor(lo);
  hi = std::max(std::ceil(hi), lo + 1.0);
  const double t0 = times.empty() ? 0.0 : times.front();
  const double t1 = times.empty() ? 1.0 : std::max(times.back(), t0 + 1e-12);
  auto px = [&](double t) { return L + (t - t0) / (t1 - t0) * (W - L - R); };
  auto py = [&](double y) { return T + (hi - y) / (hi - lo) * (H - T - B); };

  auto out = open_out(path);
  char buf[160];
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << L << "\" y=\"18\" font-size=\"13\">" << title << "</text>\n";
  std::snprintf(buf, sizeof buf,
                "<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"none\" stroke=\"#444\"/>\n",
                L, T, W - L - R, H - T - B);
  out << buf;
  for (double y = lo; y <= hi + 1e-9; y += std::max(1.0, std::floor((hi - lo) / 8.0))) {
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%g\" y=\"%.1f\" text-anchor=\"end\">1e%g</text>\n", L - 4, py(y) + 4, y);
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%g\">t = %.4g</text>\n", L, H - 12, t0);
  out << buf;
  std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%g\" text-anchor=\"end\">t = %.4g</text>\n",
                W - R, H - 12, t1);
  out << buf;
  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* color = colors[k % 5];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
    for (std::size_t i = 0; i < times.size() && i < series[k].values.size(); ++i) {
      const double v = series[k].values[i];
      if (!(v > 0.0)) continue;
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(times[i]), py(std::log10(v)));
      out << buf;
    }
    out << "\"/>\n";
    std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%g\" fill=\"%s\">%s</text>\n",
                  W - R - 90, T + 16.0 + 14.0 * static_cast<double>(k), color,
                  series[k].name.c_str());
    out << buf;
  }
  out << "</svg>\n";
}

void write_checkpoint(const std::filesystem::path& path, const StateSnapshot& s) {
  auto out = open_out(path, std::ios::binary);
  const GridSpec& g = s.v.grid();
  const std::int32_t dims[3] = {g.nx, g.ny, g.nz};
  const double geom[5] = {g.l, g.lx, g.ly, g.dealias_fraction, s.t};
  out.write(kMagic, sizeof kMagic);
  out.write(reinterpret_cast<const char*>(dims), sizeof dims);
  out.write(reinterpret_cast<const char*>(geom), sizeof geom);
  for (int c = 0; c < 2; ++c) {
    const auto v = s.v.velocity()[c].values();
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(double)));
  }
  if (!out) throw Error("failed writing " + path.string());
}

StateSnapshot read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  char magic[8];
  std::int32_t dims[3];
  double geom[5];
  in.read(magic, sizeof magic);
  in.read(reinterpret_cast<char*>(dims), sizeof dims);
  in.read(reinterpret_cast<char*>(geom), sizeof geom);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw Error(path.string() + ": not a checkpoint");
  GridSpec g;
  g.nx = dims[0];
  g.ny = dims[1];
  g.nz = dims[2];
  g.l = geom[0];
  g.lx = geom[1];
  g.ly = geom[2];
  g.dealias_fraction = geom[3];
  g.validate();
  HVelocity v(g);
  for (int c = 0; c < 2; ++c) {
    auto d = v[c].values();
    in.read(reinterpret_cast<char*>(d.data()), static_cast<std::streamsize>(d.size() * sizeof(double)));
  }
  if (!in) throw Error(path.string() + ": truncated checkpoint");
  StateSnapshot s;
  s.t = geom[4];
  s.v = ProjectedVelocity::checked(std::move(v));
  return s;
}

}  // namespace penudge::cli
