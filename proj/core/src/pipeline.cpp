#include "phsdcs/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

#include "phsdcs/error.hpp"

namespace phsdcs::pipeline {

namespace fs = std::filesystem;

namespace {

std::vector<BasisKind> bases_for(BasisChoice c) {
  switch (c) {
    case BasisChoice::phsd: return {BasisKind::phsd};
    case BasisChoice::daub2d: return {BasisKind::daub2d};
    case BasisChoice::both: break;
  }
  return {BasisKind::phsd, BasisKind::daub2d};
}

std::vector<SolverMethod> solvers_for(SolverChoice c) {
  switch (c) {
    case SolverChoice::bp: return {SolverMethod::bp};
    case SolverChoice::lasso: return {SolverMethod::lasso};
    case SolverChoice::both: break;
  }
  return {SolverMethod::bp, SolverMethod::lasso};
}

std::string row_stem(const ExperimentReport& r) {
  return r.image_id + "_" + r.basis_tag + "_" + r.solver;
}

int worst(const std::vector<ExperimentResult>& rows) {
  int code = 0;
  for (const auto& r : rows) code = std::max(code, r.error_class);
  return code;
}

void write_rows(const std::vector<ExperimentResult>& rows, const RunConfig& cfg) {
  for (const auto& row : rows) {
    if (!row.reconstruction) continue;
    Image out = cfg.transpose ? row.reconstruction->transposed() : *row.reconstruction;
    write_file(cfg.output / (row_stem(row.report) + ".pgm"), write_pgm(out));
    if (cfg.write_traces && row.solve) {
      write_file(cfg.output / (row_stem(row.report) + "_trace.csv"), write_trace_csv(*row.solve));
    }
  }
}

void print_rows(const std::vector<ExperimentResult>& rows, std::ostream& out) {
  for (const auto& row : rows) {
    const auto& r = row.report;
    out << r.basis_tag << " " << r.solver << ": M=" << r.m << " N=" << r.n
        << " PSNR=" << (r.psnr_db ? r.psnr_db->to_string() : std::string("-"));
    if (r.status != "ok") out << " [" << r.status << "]";
    out << "\n";
  }
}

}  // namespace

BasisChoice parse_basis_choice(const std::string& s) {
  if (s == "phsd") return BasisChoice::phsd;
  if (s == "daub2d") return BasisChoice::daub2d;
  if (s == "both") return BasisChoice::both;
  throw DataError("unknown basis '" + s + "'");
}

SolverChoice parse_solver_choice(const std::string& s) {
  if (s == "bp") return SolverChoice::bp;
  if (s == "lasso") return SolverChoice::lasso;
  if (s == "both") return SolverChoice::both;
  throw DataError("unknown solver '" + s + "'");
}

void RunConfig::validate() const {
  if (order < 1) throw DataError("order must be >= 1");
  if (levels < 0) throw DataError("levels must be >= 0");
  if (!(y_scale > 0.0)) throw DataError("y-scale must be positive");
  if (lines < 1) throw DataError("lines must be >= 1");
  if (points_per_line < 1) throw DataError("points must be >= 1");
  if (!(mu > 0.0)) throw DataError("mu must be positive");
  if (!(gamma > 0.0)) throw DataError("gamma must be positive");
  if (iterations < 1) throw DataError("iterations must be >= 1");
}

PreparedImage load_image(const RunConfig& cfg, bool square) {
  if (cfg.input.empty()) throw DataError("no input image given");
  PreparedImage p;
  p.id = cfg.input.stem().string();
  Image raw = read_image(read_file(cfg.input));
  if (cfg.transpose) raw = raw.transposed();
  p.image = center_crop_pow2(raw, cfg.crop_size, square, &p.crop);
  if (p.image.width() < 2 || p.image.height() < 2) throw DataError("image too small");
  return p;
}

SamplingMask make_mask(const RunConfig& cfg, std::size_t n_t, std::size_t n_y) {
  if (cfg.mask_file) {
    auto bytes = read_file(*cfg.mask_file);
    SamplingMask mask = read_mask(std::string(bytes.begin(), bytes.end()));
    if (mask.n_t() != n_t || mask.n_y() != n_y) {
      throw DataError("mask file is " + std::to_string(mask.n_t()) + "x" +
                      std::to_string(mask.n_y()) + " but the image is " + std::to_string(n_t) +
                      "x" + std::to_string(n_y));
    }
    return mask;
  }
  if (n_t != n_y) throw DataError("radial masks need a square grid");
  return radial_mask(n_t, cfg.lines, std::min(cfg.points_per_line, n_t), cfg.hermitian, cfg.seed);
}

TransformHandle make_transform(BasisKind kind, const RunConfig& cfg, std::size_t n_t,
                               std::size_t n_y) {
  return kind == BasisKind::phsd
             ? TransformHandle::phsd(n_t, n_y, cfg.order, cfg.levels, cfg.y_scale)
             : TransformHandle::daub2d(n_t, n_y, cfg.order, cfg.levels);
}

ExperimentResult run_experiment(const PreparedImage& img, const SamplingMask& mask,
                                BasisKind basis, SolverMethod solver, const RunConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentResult res;
  auto& rep = res.report;
  rep.image_id = img.id;
  rep.mask_id = mask.id();
  rep.basis_tag = BasisTag{basis, cfg.order}.to_string();
  rep.solver = to_string(solver);
  if (!cfg.mask_file) {
    rep.lines = cfg.lines;
    rep.points_per_line = std::min(cfg.points_per_line, mask.n_t());
  }
  rep.hermitian = mask.hermitian_completed();
  rep.m = mask.size();
  rep.n = img.image.size();
  rep.iterations = cfg.iterations;
  rep.mu = cfg.mu;
  rep.gamma = cfg.gamma;
  rep.crop = img.crop.to_string();
  try {
    const auto handle = make_transform(basis, cfg, img.image.height(), img.image.width());
    if (basis == BasisKind::phsd) rep.clamped_filters = handle.bank().clamped_count();
    const ComposedOperator op(mask, handle);
    const auto y = measure(img.image, mask);

    SolverConfig sc;
    sc.method = solver;
    sc.mu = cfg.mu;
    sc.gamma = cfg.gamma;
    sc.iterations = cfg.iterations;
    sc.seed = cfg.seed;
    auto result = solve(op, y.values, sc);

    const auto pyr = op.to_pyramid(result.beta);
    auto inv = transform_inverse(pyr, handle, img.image.bit_depth());
    rep.operator_norm = result.operator_norm;
    rep.final_residual = result.residual;
    rep.kkt_residual = result.kkt_residual;
    double max_mod = 0.0;
    for (const auto& v : pyr.values) max_mod = std::max(max_mod, std::abs(v));
    rep.k_significant = sparsity_report(pyr, 1e-3 * max_mod).significant_count;
    rep.psnr_db = psnr(img.image, inv.image);
    if (inv.corrupted()) rep.status = "imaginary residue " + std::to_string(inv.imaginary_residue);
    res.reconstruction = std::move(inv.image);
    res.solve = std::move(result);
  } catch (const NumericalError& e) {
    rep.status = std::string("numerical error: ") + e.what();
    res.error_class = 3;
  } catch (const std::exception& e) {
    rep.status = std::string("data error: ") + e.what();
    res.error_class = 2;
  }
  if (cfg.record_time) {
    rep.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return res;
}

std::vector<ExperimentResult> run_cross_product(const PreparedImage& img,
                                                const SamplingMask& mask, const RunConfig& cfg) {
  std::vector<ExperimentResult> rows;
  for (auto b : bases_for(cfg.basis)) {
    for (auto s : solvers_for(cfg.solver)) rows.push_back(run_experiment(img, mask, b, s, cfg));
  }
  return rows;
}

void attach_deltas(std::vector<ExperimentReport>& reports) {
  for (auto& r : reports) {
    const ExperimentReport* phsd = nullptr;
    const ExperimentReport* daub = nullptr;
    for (const auto& o : reports) {
      if (o.solver != r.solver || !o.psnr_db) continue;
      if (o.basis_tag.rfind("phsd", 0) == 0) phsd = &o;
      if (o.basis_tag.rfind("daub2d", 0) == 0) daub = &o;
    }
    if (phsd && daub && !phsd->psnr_db->infinite && !daub->psnr_db->infinite) {
      r.psnr_delta_db = phsd->psnr_db->value - daub->psnr_db->value;
    }
  }
}

int cmd_mask(const RunConfig& cfg, std::ostream& out) {
  cfg.validate();
  std::size_t n = cfg.size;
  if (!cfg.input.empty()) n = load_image(cfg, true).image.height();
  const SamplingMask mask = make_mask(cfg, n, n);
  if (!cfg.output.empty()) write_file(cfg.output, write_mask(mask));
  out << "M = " << mask.size() << " (n = " << n << ", mask_id " << mask.id() << ")\n";
  return 0;
}

int cmd_measure(const RunConfig& cfg, std::ostream& out) {
  cfg.validate();
  const auto img = load_image(cfg, !cfg.mask_file);
  const auto mask = make_mask(cfg, img.image.height(), img.image.width());
  const auto meas = measure(img.image, mask);
  if (!cfg.output.empty()) write_file(cfg.output, write_measurements(meas));
  out << "M = " << meas.values.size() << " (mask_id " << meas.mask_id << ")\n";
  return 0;
}

int cmd_reconstruct(const RunConfig& cfg, std::ostream& out) {
  cfg.validate();
  if (cfg.output.empty()) throw DataError("reconstruct needs an output directory");
  const auto img = load_image(cfg, !cfg.mask_file);
  const auto mask = make_mask(cfg, img.image.height(), img.image.width());
  fs::create_directories(cfg.output);
  write_file(cfg.output / "mask.txt", write_mask(mask));
  const auto rows = run_cross_product(img, mask, cfg);
  write_rows(rows, cfg);
  std::vector<ExperimentReport> reports;
  for (const auto& r : rows) reports.push_back(r.report);
  write_file(cfg.output / "report.csv", write_report_csv(reports));
  print_rows(rows, out);
  return worst(rows);
}

int cmd_compare(const RunConfig& cfg_in, std::ostream& out) {
  RunConfig cfg = cfg_in;
  cfg.basis = BasisChoice::both;
  cfg.validate();
  if (cfg.output.empty()) throw DataError("compare needs an output directory");
  const auto img = load_image(cfg, !cfg.mask_file);
  const auto mask = make_mask(cfg, img.image.height(), img.image.width());
  fs::create_directories(cfg.output);
  write_file(cfg.output / "mask.txt", write_mask(mask));
  const auto rows = run_cross_product(img, mask, cfg);
  write_rows(rows, cfg);
  std::vector<ExperimentReport> reports;
  for (const auto& r : rows) reports.push_back(r.report);
  attach_deltas(reports);
  write_file(cfg.output / "compare.csv", write_report_csv(reports, true));
  print_rows(rows, out);
  for (const auto& r : reports) {
    if (r.basis_tag.rfind("phsd", 0) == 0 && r.psnr_delta_db) {
      out << "delta " << r.solver << " (phsd - daub2d): " << *r.psnr_delta_db << " dB\n";
    }
  }
  return worst(rows);
}

int cmd_evaluate(const fs::path& reference, const fs::path& test, std::ostream& out) {
  const Image ref = read_image(read_file(reference));
  const Image tst = read_image(read_file(test));
  out << psnr(ref, tst).to_string() << "\n";
  return 0;
}

}  // namespace phsdcs::pipeline
