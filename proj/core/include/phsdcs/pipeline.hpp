#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "phsdcs/core.hpp"
#include "phsdcs/io.hpp"
#include "phsdcs/sensing.hpp"
#include "phsdcs/solvers.hpp"
#include "phsdcs/transform.hpp"

namespace phsdcs::pipeline {

enum class BasisChoice { phsd, daub2d, both };
enum class SolverChoice { bp, lasso, both };

BasisChoice parse_basis_choice(const std::string& s);
SolverChoice parse_solver_choice(const std::string& s);

inline constexpr std::size_t kDefaultLines = 50;
inline constexpr std::size_t kDefaultPointsPerLine = 100;

struct RunConfig {
  std::filesystem::path input;
  std::filesystem::path output;  // directory (reconstruct/compare) or file (mask/measure)
  BasisChoice basis = BasisChoice::both;
  int order = kDefaultOrder;
  int levels = kDefaultLevels;
  double y_scale = 1.0;
  std::size_t size = 256;  // mask grid size when no input image is given
  std::size_t lines = kDefaultLines;
  std::size_t points_per_line = kDefaultPointsPerLine;  // capped at the grid size
  bool hermitian = true;
  std::optional<std::filesystem::path> mask_file;
  SolverChoice solver = SolverChoice::both;
  double mu = 1.0;
  double gamma = 100.0;
  int iterations = 10;
  bool transpose = false;
  std::uint64_t seed = 0;
  std::size_t crop_size = 0;  // 0: no size limit beyond power-of-two cropping
  bool record_time = false;   // wall_time_seconds makes reports non-reproducible
  bool write_traces = true;

  void validate() const;
};

/// Image prepared for an experiment: cropped to powers of two, optionally
/// transposed so that t runs along the rows.
struct PreparedImage {
  std::string id;
  Image image;
  CropInfo crop;
};

PreparedImage load_image(const RunConfig& cfg, bool square);

/// The radial mask described by cfg for an n x n grid, or the mask file.
SamplingMask make_mask(const RunConfig& cfg, std::size_t n_t, std::size_t n_y);

TransformHandle make_transform(BasisKind kind, const RunConfig& cfg, std::size_t n_t,
                               std::size_t n_y);

struct ExperimentResult {
  ExperimentReport report;
  std::optional<Image> reconstruction;  // unclamped, in the prepared orientation
  std::optional<SolveResult> solve;
  int error_class = 0;  // 0 ok, 2 data error, 3 numerical failure
};

/// measure -> solve -> inverse transform -> PSNR for one (basis, solver).
/// Failures are caught and recorded in the report's status.
ExperimentResult run_experiment(const PreparedImage& img, const SamplingMask& mask,
                                BasisKind basis, SolverMethod solver, const RunConfig& cfg);

/// Rows for the (basis, solver) cross product in fixed order: phsd before
/// daub2d, bp before lasso.
std::vector<ExperimentResult> run_cross_product(const PreparedImage& img,
                                                const SamplingMask& mask, const RunConfig& cfg);

/// Fills psnr_delta_db on every row whose solver has both bases present.
void attach_deltas(std::vector<ExperimentReport>& reports);

// Subcommands. Each returns the process exit code.
int cmd_mask(const RunConfig& cfg, std::ostream& out);
int cmd_measure(const RunConfig& cfg, std::ostream& out);
int cmd_reconstruct(const RunConfig& cfg, std::ostream& out);
int cmd_compare(const RunConfig& cfg, std::ostream& out);
int cmd_evaluate(const std::filesystem::path& reference, const std::filesystem::path& test,
                 std::ostream& out);

}  // namespace phsdcs::pipeline
