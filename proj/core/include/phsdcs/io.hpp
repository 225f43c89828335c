#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "phsdcs/core.hpp"
#include "phsdcs/sensing.hpp"
#include "phsdcs/solvers.hpp"

namespace phsdcs {

using Bytes = std::vector<std::uint8_t>;

Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_file(const std::filesystem::path& path, const std::string& text);

// --- PGM (binary P5) --------------------------------------------------------

/// maxval 255 -> 8-bit image, 65535 -> 16-bit. Other maxvals are rejected.
Image read_pgm(std::span<const std::uint8_t> bytes);
/// Values are clamped to [0, maxval] and rounded half away from zero;
/// 16-bit samples are written big-endian.
Bytes write_pgm(const Image& img);

// --- FITS primary HDU ---------------------------------------------------------

struct CropInfo {
  std::size_t row0 = 0;
  std::size_t col0 = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  bool cropped = false;

  /// "row0:col0:heightxwidth", or empty when nothing was cropped.
  std::string to_string() const;
};

/// Centre crop each axis to the largest power of two not exceeding it (and
/// not exceeding `max_side` when nonzero). `square` crops both axes to the
/// smaller of the two.
Image center_crop_pow2(const Image& img, std::size_t max_side, bool square, CropInfo* info);

struct FitsImage {
  Image image;
  int bitpix = 0;
  double bscale = 1.0;
  double bzero = 0.0;
  /// Physical values fell outside [0, 2^depth - 1] and were linearly
  /// rescaled onto it.
  bool rescaled = false;
  CropInfo crop;
};

/// Reads a 2-D primary HDU (BITPIX 8, 16, 32, -32 or -64). BITPIX 8 gives an
/// 8-bit image, everything else 16-bit. Files with extensions are rejected.
/// A nonzero `crop_size` centre-crops to powers of two of at most that size.
FitsImage read_fits_primary(std::span<const std::uint8_t> bytes, std::size_t crop_size = 0);

/// Sniffs the format (P5 or FITS) and reads the image.
Image read_image(std::span<const std::uint8_t> bytes, std::size_t crop_size = 0,
                 CropInfo* crop = nullptr);

// --- Mask files ---------------------------------------------------------------

/// `mask <n_t> <n_y> <domain> <M>` followed by one `u v` line per index.
std::string write_mask(const SamplingMask& mask);
SamplingMask read_mask(const std::string& text);

// --- Measurements ---------------------------------------------------------------

/// `measurements <M> <mask_id>` followed by one `re im` line per value.
std::string write_measurements(const MeasurementVector& meas);
MeasurementVector read_measurements(const std::string& text);

// --- Reports ------------------------------------------------------------------

struct ExperimentReport {
  std::string image_id;
  std::string mask_id;
  std::string basis_tag;
  std::string solver;
  std::optional<std::size_t> lines;  // empty for masks loaded from file
  std::optional<std::size_t> points_per_line;
  bool hermitian = false;
  std::size_t m = 0;
  std::size_t n = 0;
  int iterations = 0;
  double mu = 0.0;
  double gamma = 0.0;
  std::optional<double> operator_norm;
  std::optional<Decibels> psnr_db;
  std::optional<double> final_residual;
  std::optional<double> kkt_residual;
  std::optional<std::size_t> k_significant;
  std::size_t clamped_filters = 0;
  std::string crop;
  std::string status = "ok";
  std::optional<double> wall_time_seconds;
  /// compare only: PSNR(phsd) - PSNR(daub2d) for the row's solver.
  std::optional<double> psnr_delta_db;
};

std::vector<std::string> report_columns(bool with_delta);
/// Header row plus one row per report; RFC 4180 quoting; doubles at 17
/// significant digits; missing optionals are empty fields.
std::string write_report_csv(std::span<const ExperimentReport> reports, bool with_delta = false);

/// `iteration,objective,residual`.
std::string write_trace_csv(const SolveResult& result);

}  // namespace phsdcs
