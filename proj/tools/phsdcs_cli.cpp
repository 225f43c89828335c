// phsdcs: compressive-sensing reconstruction experiments with PHSD and
// Daubechies sparsifying bases.
//
//   phsdcs mask --size 256 --lines 50 --points 100 -o mask.txt
//   phsdcs reconstruct -i lena.pgm -o out/ --basis phsd --solver both
//   phsdcs compare -i plate.fits -o cmp/ --lines 100 --points 150
//   phsdcs evaluate reference.pgm out/lena_phsd-p2_bp.pgm
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.

#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "phsdcs/error.hpp"
#include "phsdcs/pipeline.hpp"

namespace {

using phsdcs::pipeline::RunConfig;

struct Options {
  RunConfig cfg;
  std::string basis = "both";
  std::string solver = "both";
  std::string mask_file;
  std::string reference;
  std::string test;
};

void add_image_options(CLI::App* cmd, Options& o, bool output_is_dir) {
  cmd->add_option("-i,--input", o.cfg.input, "Input image (binary PGM or FITS primary HDU)");
  cmd->add_option("-o,--output", o.cfg.output,
                  output_is_dir ? "Output directory" : "Output file");
  cmd->add_flag("--transpose", o.cfg.transpose,
                "Run the wavelet axis along image columns instead of rows");
  cmd->add_option("--crop-size", o.cfg.crop_size,
                  "Centre-crop to powers of two no larger than this (0: no limit)")
      ->capture_default_str();
}

void add_mask_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--lines", o.cfg.lines, "Radial lines in the Fourier domain")
      ->capture_default_str();
  cmd->add_option("--points,--points-per-line", o.cfg.points_per_line,
                  "Samples per radial line (capped at the grid size)")
      ->capture_default_str();
  cmd->add_flag("--hermitian,!--no-hermitian", o.cfg.hermitian,
                "Complete the mask under index negation so real images stay real")
      ->capture_default_str();
  cmd->add_option("--mask-file", o.mask_file, "Use this mask file instead of radial lines");
  cmd->add_option("--seed", o.cfg.seed, "Seed for randomized components")->capture_default_str();
}

void add_solver_options(CLI::App* cmd, Options& o, bool with_basis) {
  if (with_basis) {
    cmd->add_option("--basis", o.basis, "phsd | daub2d | both")
        ->check(CLI::IsMember({"phsd", "daub2d", "both"}))
        ->capture_default_str();
  }
  cmd->add_option("--order", o.cfg.order, "Wavelet order p")->capture_default_str();
  cmd->add_option("--levels", o.cfg.levels, "Decomposition depth L")->capture_default_str();
  cmd->add_option("--y-scale", o.cfg.y_scale, "Scale of the per-frequency exponent")
      ->capture_default_str();
  cmd->add_option("--solver", o.solver, "bp | lasso | both")
      ->check(CLI::IsMember({"bp", "lasso", "both"}))
      ->capture_default_str();
  cmd->add_option("--mu", o.cfg.mu, "Lasso penalty")->capture_default_str();
  cmd->add_option("--gamma", o.cfg.gamma, "Basis pursuit prox scale")->capture_default_str();
  cmd->add_option("--iterations", o.cfg.iterations, "Solver iterations")->capture_default_str();
  cmd->add_flag("--record-time", o.cfg.record_time,
                "Record wall time in reports (outputs are then not byte-reproducible)");
  cmd->add_flag("--no-traces{false}", o.cfg.write_traces, "Skip per-run objective trace CSVs");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compressive-sensing image reconstruction with PHSD and Daubechies wavelets"};
  app.require_subcommand(1);
  Options o;

  auto* mask = app.add_subcommand("mask", "Generate a radial-line Fourier sampling mask");
  mask->add_option("--size", o.cfg.size, "Grid size n (n x n)")->capture_default_str();
  add_image_options(mask, o, false);
  add_mask_options(mask, o);

  auto* measure = app.add_subcommand("measure", "Measure an image through a mask");
  add_image_options(measure, o, false);
  add_mask_options(measure, o);
  measure->get_option("--input")->required();

  auto* recon = app.add_subcommand("reconstruct", "Measure, solve and reconstruct an image");
  add_image_options(recon, o, true);
  add_mask_options(recon, o);
  add_solver_options(recon, o, true);
  recon->get_option("--input")->required();
  recon->get_option("--output")->required();

  auto* compare = app.add_subcommand("compare", "Run both bases on one shared mask");
  add_image_options(compare, o, true);
  add_mask_options(compare, o);
  add_solver_options(compare, o, false);
  compare->get_option("--input")->required();
  compare->get_option("--output")->required();

  auto* evaluate = app.add_subcommand("evaluate", "PSNR of a test image against a reference");
  evaluate->add_option("reference", o.reference, "Reference image")->required();
  evaluate->add_option("test", o.test, "Test image")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    namespace pl = phsdcs::pipeline;
    if (!o.mask_file.empty()) o.cfg.mask_file = o.mask_file;
    o.cfg.basis = pl::parse_basis_choice(o.basis);
    o.cfg.solver = pl::parse_solver_choice(o.solver);
    if (*mask) return pl::cmd_mask(o.cfg, std::cout);
    if (*measure) return pl::cmd_measure(o.cfg, std::cout);
    if (*recon) return pl::cmd_reconstruct(o.cfg, std::cout);
    if (*compare) return pl::cmd_compare(o.cfg, std::cout);
    if (*evaluate) return pl::cmd_evaluate(o.reference, o.test, std::cout);
  } catch (const phsdcs::NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
