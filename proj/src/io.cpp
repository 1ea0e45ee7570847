#include "paracalc/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <stdexcept>

namespace paracalc {

static_assert(std::endian::native == std::endian::little,
              "snapshot payloads are written as native little-endian doubles");

namespace {

using nlohmann::json;

void write_doubles(std::ofstream& out, const std::vector<double>& v) {
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
}

void read_doubles(std::ifstream& in, std::vector<double>& v) {
  in.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(v.size() * sizeof(double)));
  if (!in) throw std::runtime_error("snapshot: payload shorter than its header claims");
}

json read_header(std::ifstream& in, const std::filesystem::path& file) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("snapshot: missing header: " + file.string());
  return json::parse(line);
}

std::ofstream open_out(const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + file.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + file.string());
  return in;
}

json slab_header(int n, const char* kind, double t0, double dt, int frames) {
  json h;
  h["n"] = n;
  h["kind"] = kind;
  h["t0"] = t0;
  h["dt"] = dt;
  h["frames"] = frames;
  return h;
}

}  // namespace

void write_field(const std::filesystem::path& file, const Field& f) {
  std::ofstream out = open_out(file);
  out << slab_header(f.grid.n, "field", 0.0, 0.0, 1).dump() << '\n';
  write_doubles(out, f.v);
}

Field read_field(const std::filesystem::path& file) {
  std::ifstream in = open_in(file);
  json h = read_header(in, file);
  if (h.at("kind") != "field") throw std::runtime_error("snapshot: not a field: " + file.string());
  Field f(Grid(h.at("n").get<int>()));
  read_doubles(in, f.v);
  return f;
}

void write_slab(const std::filesystem::path& file, const TimeSlab& s) {
  std::ofstream out = open_out(file);
  out << slab_header(s.grid.n, "slab", s.t0, s.dt, s.frame_count()).dump() << '\n';
  for (const Field& f : s.frames) write_doubles(out, f.v);
}

TimeSlab read_slab(const std::filesystem::path& file) {
  std::ifstream in = open_in(file);
  json h = read_header(in, file);
  if (h.at("kind") != "slab" || h.contains("eta_nodes"))
    throw std::runtime_error("snapshot: not a plain slab: " + file.string());
  TimeSlab s(Grid(h.at("n").get<int>()), h.at("t0").get<double>(), h.at("dt").get<double>(),
             h.at("frames").get<int>());
  for (Field& f : s.frames) read_doubles(in, f.v);
  return s;
}

void write_param_slab(const std::filesystem::path& file, const ParamSlab& s) {
  std::ofstream out = open_out(file);
  json h = slab_header(s.grid().n, "slab", s.slabs[0].t0, s.slabs[0].dt, s.frame_count());
  h["eta_nodes"] = s.eta.nodes;
  out << h.dump() << '\n';
  for (const TimeSlab& node : s.slabs)
    for (const Field& f : node.frames) write_doubles(out, f.v);
}

ParamSlab read_param_slab(const std::filesystem::path& file) {
  std::ifstream in = open_in(file);
  json h = read_header(in, file);
  if (h.at("kind") != "slab" || !h.contains("eta_nodes"))
    throw std::runtime_error("snapshot: not a parameter slab: " + file.string());
  const auto nodes = h.at("eta_nodes").get<std::vector<double>>();
  EtaGrid eg(nodes.front(), static_cast<int>(nodes.size()));
  for (size_t i = 0; i < nodes.size(); ++i)
    if (std::abs(eg.nodes[i] - nodes[i]) > 1e-12)
      throw std::runtime_error("snapshot: eta nodes are not a Chebyshev set: " + file.string());
  ParamSlab s(eg, Grid(h.at("n").get<int>()), h.at("t0").get<double>(), h.at("dt").get<double>(),
              h.at("frames").get<int>());
  for (TimeSlab& node : s.slabs)
    for (Field& f : node.frames) read_doubles(in, f.v);
  return s;
}

void write_noise_archive(const std::filesystem::path& dir, const EnhancedNoise& data) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path manifest = dir / "manifest.json";
  if (std::filesystem::exists(manifest))
    throw std::runtime_error("noise archive already exists: " + dir.string());

  json m;
  m["eps"] = data.eps;
  m["seed"] = data.seed;
  m["sigma"] = data.sigma;
  m["eta_nodes"] = data.theta.eta.nodes;
  m["mollifier"] = data.mollifier.kind == Mollifier::Kind::gaussian ? "gaussian" : "sharp";
  write_field(dir / "xi_eps.snap", data.xi_eps);
  write_field(dir / "theta_base.snap", data.theta.values.back());
  write_field(dir / "xi2_base.snap", data.xi2.values.back());
  std::ofstream out = open_out(manifest);
  out << m.dump(2) << '\n';
}

EnhancedNoise read_noise_archive(const std::filesystem::path& dir) {
  std::ifstream in = open_in(dir / "manifest.json");
  json m = json::parse(in);
  const auto nodes = m.at("eta_nodes").get<std::vector<double>>();
  EtaGrid eg(nodes.front(), static_cast<int>(nodes.size()));

  EnhancedNoise data;
  data.eps = m.at("eps").get<double>();
  data.seed = m.at("seed").get<uint64_t>();
  data.sigma = m.at("sigma").get<double>();
  const std::string kind = m.at("mollifier").get<std::string>();
  if (kind != "gaussian" && kind != "sharp")
    throw std::runtime_error("noise archive: unknown mollifier kind: " + kind);
  data.mollifier.kind = kind == "gaussian" ? Mollifier::Kind::gaussian : Mollifier::Kind::sharp;
  data.xi_eps = read_field(dir / "xi_eps.snap");
  data.theta = ParamField::over_eta(eg, read_field(dir / "theta_base.snap"));
  data.xi2 = ParamField::over_eta_sq(eg, read_field(dir / "xi2_base.snap"));
  return data;
}

void write_csv(const std::filesystem::path& file, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out = open_out(file);
  for (size_t i = 0; i < header.size(); ++i)
    out << header[i] << (i + 1 < header.size() ? "," : "\n");
  char buf[40];
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw std::invalid_argument("write_csv: row width does not match the header");
    for (size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", row[i]);
      out << buf << (i + 1 < row.size() ? "," : "\n");
    }
  }
}

void write_svg_lines(const std::filesystem::path& file, const std::string& title,
                     const std::vector<PlotSeries>& series, bool log_x, bool log_y) {
  const double W = 640.0, H = 480.0, L = 70.0, R = 20.0, T = 40.0, B = 50.0;
  std::vector<PlotSeries> data;
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const PlotSeries& s : series) {
    PlotSeries t{s.label, {}, {}};
    for (size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      double x = s.x[i], y = s.y[i];
      if (log_x) {
        if (x <= 0.0) continue;
        x = std::log10(x);
      }
      if (log_y) {
        if (y <= 0.0) continue;
        y = std::log10(y);
      }
      t.x.push_back(x);
      t.y.push_back(y);
      x0 = std::min(x0, x), x1 = std::max(x1, x);
      y0 = std::min(y0, y), y1 = std::max(y1, y);
    }
    data.push_back(std::move(t));
  }
  if (x1 < x0) x0 = 0.0, x1 = 1.0;
  if (y1 < y0) y0 = 0.0, y1 = 1.0;
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

  static const char* palette[] = {"#1b6ca8", "#c34a36", "#2e8b57", "#8a4fbf", "#b8860b"};
  std::ofstream out = open_out(file);
  char buf[256];
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 640 480\" "
         "font-family=\"monospace\" font-size=\"12\">\n";
  out << "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof buf,
                "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"none\" "
                "stroke=\"black\"/>\n",
                L, T, W - L - R, H - T - B);
  out << buf;
  std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"20\" font-size=\"14\">%s</text>\n", L,
                title.c_str());
  out << buf;
  for (int i = 0; i <= 4; ++i) {
    const double fx = x0 + (x1 - x0) * i / 4.0, fy = y0 + (y1 - y0) * i / 4.0;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%s%.3g</text>\n", px(fx),
                  H - B + 18.0, log_x ? "1e" : "", fx);
    out << buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">%s%.3g</text>\n", L - 6.0,
                  py(fy) + 4.0, log_y ? "1e" : "", fy);
    out << buf;
  }
  for (size_t s = 0; s < data.size(); ++s) {
    const char* color = palette[s % 5];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (size_t i = 0; i < data[s].x.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(data[s].x[i]), py(data[s].y[i]));
      out << buf;
    }
    out << "\"/>\n";
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%.1f\" fill=\"%s\">%s</text>\n", W - R - 180.0,
                  T + 16.0 + 14.0 * double(s), color, data[s].label.c_str());
    out << buf;
  }
  out << "</svg>\n";
}

uint64_t fnv1a(std::string_view bytes) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace paracalc
