#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>
#include <string>

#include "phsdcs/error.hpp"
#include "phsdcs/pipeline.hpp"
#include "test_support.hpp"

using namespace phsdcs;
namespace pl = phsdcs::pipeline;
namespace pt = phsdcs::testutil;
namespace fs = std::filesystem;

namespace {

class PipelineTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("phsdcs_pipeline_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write_image(const std::string& name, const Image& img) {
    const auto p = dir_ / name;
    write_file(p, write_pgm(img));
    return p;
  }

  pl::RunConfig small_config(const fs::path& input, const std::string& out) {
    pl::RunConfig cfg;
    cfg.input = input;
    cfg.output = dir_ / out;
    cfg.lines = 8;
    cfg.points_per_line = 32;
    cfg.levels = 3;
    cfg.mu = 1.0;
    cfg.gamma = 10.0;
    cfg.iterations = 5;
    return cfg;
  }

  static std::string slurp(const fs::path& p) {
    const auto b = read_file(p);
    return std::string(b.begin(), b.end());
  }

  static std::size_t rows(const std::string& csv) {
    std::size_t n = 0;
    for (std::size_t i = 0; i + 1 < csv.size(); ++i) n += csv[i] == '\r' && csv[i + 1] == '\n';
    return n - 1;
  }

  fs::path dir_;
};

Image smooth_image(std::size_t n) {
  Image img(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      img.at(r, c) = 128.0 + 60.0 * std::sin(0.2 * double(r)) * std::cos(0.15 * double(c));
  return img;
}

}  // namespace

TEST_F(PipelineTest, ZeroImageReconstructsExactly) {
  const auto in = write_image("zero.pgm", Image(32, 32));
  auto cfg = small_config(in, "out");
  const auto img = pl::load_image(cfg, true);
  const auto mask = pl::make_mask(cfg, 32, 32);
  for (const auto& row : pl::run_cross_product(img, mask, cfg)) {
    EXPECT_EQ(row.error_class, 0);
    ASSERT_TRUE(row.report.psnr_db.has_value());
    EXPECT_TRUE(row.report.psnr_db->infinite) << row.report.basis_tag << " " << row.report.solver;
  }
}

TEST_F(PipelineTest, CrossProductOrderAndMaskCount) {
  const auto in = write_image("smooth.pgm", smooth_image(32));
  auto cfg = small_config(in, "out");
  const auto img = pl::load_image(cfg, true);
  const auto mask = pl::make_mask(cfg, 32, 32);
  const auto rows = pl::run_cross_product(img, mask, cfg);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].report.basis_tag, "phsd-p2");
  EXPECT_EQ(rows[0].report.solver, "bp");
  EXPECT_EQ(rows[1].report.solver, "lasso");
  EXPECT_EQ(rows[2].report.basis_tag, "daub2d-p2");
  for (const auto& r : rows) {
    EXPECT_EQ(r.report.m, mask.size());
    EXPECT_EQ(r.report.mask_id, mask.id());
    EXPECT_EQ(r.report.status, "ok");
    EXPECT_TRUE(r.report.k_significant.has_value());
    EXPECT_FALSE(r.report.wall_time_seconds.has_value());
  }
  const auto y = measure(img.image, mask);
  EXPECT_LE(*rows[0].report.final_residual, 1e-10 * pt::norm2(y.values));
  EXPECT_LE(*rows[2].report.final_residual, 1e-10 * pt::norm2(y.values));
  EXPECT_TRUE(rows[1].report.kkt_residual.has_value());
  EXPECT_FALSE(rows[0].report.kkt_residual.has_value());
}

TEST_F(PipelineTest, ReconstructWritesArtifacts) {
  const auto in = write_image("smooth.pgm", smooth_image(32));
  auto cfg = small_config(in, "out");
  std::ostringstream log;
  EXPECT_EQ(pl::cmd_reconstruct(cfg, log), 0);
  EXPECT_TRUE(fs::exists(cfg.output / "mask.txt"));
  EXPECT_TRUE(fs::exists(cfg.output / "smooth_phsd-p2_bp.pgm"));
  EXPECT_TRUE(fs::exists(cfg.output / "smooth_daub2d-p2_lasso_trace.csv"));
  const auto csv = slurp(cfg.output / "report.csv");
  EXPECT_EQ(rows(csv), 4u);
  const auto mask = read_mask(slurp(cfg.output / "mask.txt"));
  EXPECT_NE(csv.find("," + std::to_string(mask.size()) + ","), std::string::npos);
  const auto rec = read_pgm(read_file(cfg.output / "smooth_phsd-p2_lasso.pgm"));
  for (double v : rec.pixels()) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 255.0);
  }
}

TEST_F(PipelineTest, ReconstructIsByteIdentical) {
  const auto in = write_image("smooth.pgm", smooth_image(32));
  auto a = small_config(in, "a");
  auto b = small_config(in, "b");
  std::ostringstream log;
  pl::cmd_reconstruct(a, log);
  pl::cmd_reconstruct(b, log);
  for (const auto& entry : fs::directory_iterator(a.output)) {
    const auto name = entry.path().filename();
    EXPECT_EQ(read_file(a.output / name), read_file(b.output / name)) << name;
  }
}

TEST_F(PipelineTest, CompareSharesMaskAndReportsDelta) {
  const auto in = write_image("smooth.pgm", smooth_image(32));
  auto cfg = small_config(in, "cmp");
  cfg.basis = pl::BasisChoice::phsd;
  std::ostringstream log;
  EXPECT_EQ(pl::cmd_compare(cfg, log), 0);
  const auto csv = slurp(cfg.output / "compare.csv");
  EXPECT_EQ(rows(csv), 4u);
  EXPECT_NE(csv.find("psnr_delta_phsd_minus_daub2d"), std::string::npos);
  const auto id = read_mask(slurp(cfg.output / "mask.txt")).id();
  std::size_t hits = 0;
  for (std::size_t p = csv.find(id); p != std::string::npos; p = csv.find(id, p + 1)) ++hits;
  EXPECT_EQ(hits, 4u);
  EXPECT_NE(log.str().find("delta bp"), std::string::npos);
}

TEST_F(PipelineTest, AttachDeltas) {
  std::vector<ExperimentReport> r(3);
  r[0].basis_tag = "phsd-p2";
  r[0].solver = "bp";
  r[0].psnr_db = Decibels{30.0, false};
  r[1].basis_tag = "daub2d-p2";
  r[1].solver = "bp";
  r[1].psnr_db = Decibels{28.5, false};
  r[2].basis_tag = "phsd-p2";
  r[2].solver = "lasso";
  r[2].psnr_db = Decibels{20.0, false};
  pl::attach_deltas(r);
  EXPECT_DOUBLE_EQ(*r[0].psnr_delta_db, 1.5);
  EXPECT_DOUBLE_EQ(*r[1].psnr_delta_db, 1.5);
  EXPECT_FALSE(r[2].psnr_delta_db.has_value());
}

TEST_F(PipelineTest, MaskFileMustMatchImage) {
  const auto in = write_image("smooth.pgm", smooth_image(32));
  write_file(dir_ / "m.txt", write_mask(radial_mask(16, 3, 16, true)));
  auto cfg = small_config(in, "out");
  cfg.mask_file = dir_ / "m.txt";
  std::ostringstream log;
  EXPECT_THROW(pl::cmd_reconstruct(cfg, log), DataError);
}

TEST_F(PipelineTest, MaskFileOnRectangularImage) {
  Image img(32, 16);
  for (std::size_t i = 0; i < img.size(); ++i) img.pixels()[i] = double(i % 200);
  const auto in = write_image("rect.pgm", img);
  std::vector<GridIndex> idx;
  for (std::size_t u = 0; u < 16; ++u) idx.push_back({u, 0});
  write_file(dir_ / "m.txt", write_mask(SamplingMask(16, 32, MaskDomain::fourier, idx)));
  auto cfg = small_config(in, "out");
  cfg.mask_file = dir_ / "m.txt";
  cfg.basis = pl::BasisChoice::phsd;
  cfg.solver = pl::SolverChoice::lasso;
  std::ostringstream log;
  EXPECT_EQ(pl::cmd_reconstruct(cfg, log), 0);
  const auto csv = slurp(cfg.output / "report.csv");
  EXPECT_EQ(rows(csv), 1u);
}

TEST_F(PipelineTest, TransposeRoundTripsOrientation) {
  Image img(32, 16);
  for (std::size_t i = 0; i < img.size(); ++i) img.pixels()[i] = double(i % 97);
  const auto in = write_image("rect.pgm", img);
  auto cfg = small_config(in, "out");
  cfg.transpose = true;
  const auto prepared = pl::load_image(cfg, false);
  EXPECT_EQ(prepared.image.width(), 16u);
  EXPECT_EQ(prepared.image.height(), 32u);
  EXPECT_EQ(prepared.image, img.transposed());
}

TEST_F(PipelineTest, EvaluateSelfIsInfinite) {
  const auto in = write_image("smooth.pgm", smooth_image(16));
  std::ostringstream out;
  EXPECT_EQ(pl::cmd_evaluate(in, in, out), 0);
  EXPECT_EQ(out.str(), "inf\n");
}

TEST_F(PipelineTest, MaskCommand) {
  pl::RunConfig cfg;
  cfg.size = 8;
  cfg.lines = 1;
  cfg.points_per_line = 8;
  cfg.hermitian = false;
  cfg.output = dir_ / "mask.txt";
  std::ostringstream out;
  EXPECT_EQ(pl::cmd_mask(cfg, out), 0);
  EXPECT_EQ(out.str().rfind("M = 8 ", 0), 0u);
  EXPECT_EQ(read_mask(slurp(cfg.output)).size(), 8u);
}

TEST_F(PipelineTest, NumericalFailureIsRecordedPerRow) {
  const auto in = write_image("smooth.pgm", smooth_image(32));
  auto cfg = small_config(in, "out");
  cfg.order = 40;
  cfg.basis = pl::BasisChoice::phsd;
  cfg.solver = pl::SolverChoice::lasso;
  std::ostringstream log;
  const int code = pl::cmd_reconstruct(cfg, log);
  EXPECT_GT(code, 0);
  const auto csv = slurp(cfg.output / "report.csv");
  EXPECT_EQ(rows(csv), 1u);
  EXPECT_EQ(csv.find(",ok,"), std::string::npos);
}

TEST_F(PipelineTest, ConfigValidation) {
  pl::RunConfig cfg;
  cfg.iterations = 0;
  EXPECT_THROW(cfg.validate(), DataError);
  cfg = {};
  cfg.mu = -1;
  EXPECT_THROW(cfg.validate(), DataError);
  EXPECT_THROW(pl::parse_basis_choice("haar"), DataError);
  EXPECT_EQ(pl::parse_solver_choice("both"), pl::SolverChoice::both);
}
