#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "paracalc/grid.hpp"
#include "paracalc/noise.hpp"
#include "paracalc/param.hpp"
#include "paracalc/slab.hpp"

namespace paracalc {

/// Snapshot files carry one JSON header line followed by raw little-endian
/// 64-bit floats, row-major within a frame, frames consecutive.  Reads
/// validate the header against the payload size and reproduce the written
/// values bit for bit.
void write_field(const std::filesystem::path& file, const Field& f);
[[nodiscard]] Field read_field(const std::filesystem::path& file);

void write_slab(const std::filesystem::path& file, const TimeSlab& s);
[[nodiscard]] TimeSlab read_slab(const std::filesystem::path& file);

/// Parameter slabs add "eta_nodes" to the header; payload is node-major,
/// one full slab per node.  The closed-form tag is not stored: families
/// reload as generic node data.
void write_param_slab(const std::filesystem::path& file, const ParamSlab& s);
[[nodiscard]] ParamSlab read_param_slab(const std::filesystem::path& file);

/// Enhanced-noise archive: a directory holding manifest.json together with
/// field snapshots of the sample and the eta = 1 bases of both parameter
/// families; reading re-tags the bases with their closed forms.  Archives
/// are immutable: writing into a directory that already holds a manifest
/// throws.
void write_noise_archive(const std::filesystem::path& dir, const EnhancedNoise& data);
[[nodiscard]] EnhancedNoise read_noise_archive(const std::filesystem::path& dir);

void write_csv(const std::filesystem::path& file, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Minimal line-chart emitter; log axes apply log10 to the data and drop
/// non-positive points.
void write_svg_lines(const std::filesystem::path& file, const std::string& title,
                     const std::vector<PlotSeries>& series, bool log_x, bool log_y);

/// FNV-1a content hash used to key runs to their configuration.
[[nodiscard]] uint64_t fnv1a(std::string_view bytes);
[[nodiscard]] std::string hex64(uint64_t value);

}  // namespace paracalc
