#include "gcs/error.hpp"
#include "gcs/experiments.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>

#include <sys/wait.h>

namespace {

std::string temp_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("gcs_exp_" + name);
  std::filesystem::remove_all(p);
  return p.string();
}

gcs::SweepSpec quick_spec() {
  gcs::SweepSpec spec;
  spec.axis = gcs::SweepAxis::Snr;
  spec.grid = {12.0, 16.0};
  spec.fixed = 0.0;
  spec.systems = {{"qam16", "qam"}};
  spec.qam_m = 4;
  spec.n_symbols = 2000;
  spec.n_seeds = 2;
  spec.bps.window = 40;
  spec.bps.n_angles = 20;
  return spec;
}

gcs::SweepTable table(const std::string& name, gcs::DemapperKind kind, int n,
                      std::vector<gcs::RunRecord> rows) {
  gcs::SweepTable t;
  t.system.name = name;
  t.system.kind = kind;
  t.system.m = 6;
  t.system.n = n;
  t.system.multiplications = gcs::count_multiplications(kind, 6, n);
  t.axis = gcs::SweepAxis::Linewidth;
  t.rows = std::move(rows);
  return t;
}

}  // namespace

TEST_CASE("default grids") {
  const auto snr = gcs::default_grid(gcs::SweepAxis::Snr);
  CHECK(snr.size() == 12);
  CHECK(snr.front() == 14.0);
  CHECK(snr.back() == 25.0);
  const auto lw = gcs::default_grid(gcs::SweepAxis::Linewidth);
  CHECK(lw == std::vector<double>{50e3, 100e3, 200e3, 300e3, 400e3, 500e3, 600e3});
}

TEST_CASE("sweep spec validation and config round trip") {
  auto spec = quick_spec();
  spec.systems.push_back({"b", "/nonexistent"});
  const auto back = gcs::sweep_spec_from(gcs::text::parse_key_values(gcs::to_config_text(spec)));
  CHECK(gcs::to_config_text(back) == gcs::to_config_text(spec));

  auto bad = quick_spec();
  bad.grid = {16.0, 12.0};
  CHECK_THROWS_AS(bad.validate(), gcs::ParameterError);
  bad.grid = {};
  CHECK_THROWS_AS(bad.validate(), gcs::ParameterError);
  bad = quick_spec();
  bad.grid = {3.0, 3.0};
  CHECK_THROWS_AS(bad.validate(), gcs::ParameterError);
  bad = quick_spec();
  bad.systems.push_back({"qam16", "qam"});
  CHECK_THROWS_AS(bad.validate(), gcs::ParameterError);

  const auto lw = gcs::sweep_spec_from({{"axis", "linewidth"}});
  CHECK(lw.grid == gcs::default_grid(gcs::SweepAxis::Linewidth));
  CHECK(lw.fixed == 17.0);
  CHECK(gcs::parse_systems(" a = qam , b=/x/y ").size() == 2);
  CHECK_THROWS_AS(gcs::parse_systems("noequals"), gcs::ParameterError);
}

TEST_CASE("a single-point sweep equals a direct validate call") {
  auto spec = quick_spec();
  spec.grid = {14.0};
  const auto tables = gcs::run_sweep(spec);
  REQUIRE(tables.size() == 1);
  REQUIRE(tables[0].rows.size() == 1);
  gcs::ValidationOptions opts;
  opts.n_symbols = spec.n_symbols;
  opts.n_seeds = spec.n_seeds;
  opts.seed = gcs::grid_point_seed(spec.seed, 0);
  const auto direct = gcs::validate({gcs::square_qam(4), std::nullopt}, gcs::params_from(14.0, 0.0),
                                    spec.bps, opts);
  CHECK(tables[0].rows[0].mean == direct.mean);
  CHECK(tables[0].rows[0].stddev == direct.stddev);
  CHECK(tables[0].system.multiplications == 64);
}

TEST_CASE("sweep data files are sorted, re-readable and deterministic") {
  const auto spec = quick_spec();
  const auto tables = gcs::run_sweep(spec);
  const std::string text = gcs::to_text(tables[0]);
  CHECK(text.rfind("snr mean stddev\n# system=qam16 ", 0) == 0);
  CHECK(text.find("config_hash=") != std::string::npos);
  CHECK(text.find("seed=1") != std::string::npos);
  CHECK(text.find(std::string("version=") + gcs::kVersion) != std::string::npos);
  const auto back = gcs::table_from_text(text);
  CHECK(back.axis == gcs::SweepAxis::Snr);
  REQUIRE(back.rows.size() == 2);
  CHECK(back.rows[0].x < back.rows[1].x);
  CHECK(back.rows[1].mean == tables[0].rows[1].mean);
  CHECK(back.system.name == "qam16");
  CHECK(back.config_hash == tables[0].config_hash);
  CHECK(gcs::to_text(back) == text);

  const std::string dir = temp_dir("files");
  const auto paths = gcs::write_tables(dir, tables);
  REQUIRE(paths.size() == 1);
  const std::string first = gcs::text::read_file(paths[0]);
  gcs::write_tables(dir, gcs::run_sweep(spec));
  CHECK(gcs::text::read_file(paths[0]) == first);
  std::filesystem::remove_all(dir);

  CHECK_THROWS_AS(gcs::table_from_text("x y\n"), gcs::InputError);
  CHECK_THROWS_AS(gcs::table_from_text("snr mean stddev\n2 1 0\n1 1 0\n"), gcs::InputError);
  CHECK_THROWS_AS(gcs::table_from_text("snr mean stddev\n1 1 -0.5\n"), gcs::InputError);
}

TEST_CASE("linewidth files carry Hz in the first column") {
  auto spec = quick_spec();
  spec.axis = gcs::SweepAxis::Linewidth;
  spec.grid = {100e3};
  spec.fixed = 14.0;
  const auto text = gcs::to_text(gcs::run_sweep(spec)[0]);
  CHECK(text.rfind("linewidth mean stddev\n", 0) == 0);
  CHECK(text.find("\n100000 ") != std::string::npos);
}

TEST_CASE("missing checkpoints are reported by system name") {
  auto spec = quick_spec();
  spec.systems.push_back({"ghost", temp_dir("nothing_here")});
  try {
    gcs::run_sweep(spec);
    FAIL("expected a file error");
  } catch (const gcs::FileError& e) {
    CHECK(std::string(e.what()).find("ghost") != std::string::npos);
  }
}

TEST_CASE("compare_report") {
  const std::vector<gcs::RunRecord> rows{{200e3, 4.0, 0.01}, {300e3, 3.5, 0.02}};
  const std::vector<gcs::SweepTable> same{table("a", gcs::DemapperKind::NnSeparated, 8, rows),
                                          table("b", gcs::DemapperKind::NnSeparated, 8, rows)};
  const std::string r = gcs::compare_report(same);
  CHECK(r.find("+0.0000") != std::string::npos);
  CHECK(r.find("-0.") == std::string::npos);

  const std::vector<gcs::SweepTable> four{
      table("separated_n8", gcs::DemapperKind::NnSeparated, 8, {{200e3, 4.0, 0}, {300e3, 3.5, 0}}),
      table("full_n16", gcs::DemapperKind::NnFull, 16, {{200e3, 3.9, 0}, {300e3, 3.6, 0}}),
      table("full_n8", gcs::DemapperKind::NnFull, 8, {{200e3, 3.8, 0}, {300e3, 3.7, 0}}),
      table("qam", gcs::DemapperKind::Gaussian, 0, {{200e3, 4.1, 0}, {300e3, 3.0, 0}})};
  const std::string report = gcs::compare_report(four);
  CHECK(report.find("separated_n8 demapper=nn_separated m=6 n=8 multiplications=64") != std::string::npos);
  CHECK(report.find("full_n16 demapper=nn_full m=6 n=16 multiplications=128") != std::string::npos);
  CHECK(report.find("multiplications=256") != std::string::npos);
  CHECK(report.find("linewidth separated_n8 full_n16 full_n8 qam delta_full_n16") != std::string::npos);
  CHECK(report.find("200000 4.0000 3.9000 3.8000 4.1000 -0.1000 -0.2000 +0.1000 yes") != std::string::npos);
  CHECK(report.find("300000 3.5000 3.6000 3.7000 3.0000 +0.1000 +0.2000 -0.5000 no") != std::string::npos);
  CHECK(report.find("separated_n8") < report.find("full_n16"));
  CHECK(gcs::compare_report(four) == report);

  auto shifted = four;
  shifted[1].rows[1].x = 400e3;
  CHECK_THROWS_AS(gcs::compare_report(shifted), gcs::InputError);
  CHECK_THROWS_AS(gcs::compare_report(std::span(four).first(1)), gcs::InputError);
}

TEST_CASE("axis Gray check") {
  CHECK(gcs::axis_labels_gray(gcs::square_qam(6)));
  CHECK(gcs::axis_labels_gray(gcs::square_qam(4)));
  // Natural binary labels on the in-phase axis are not Gray.
  const auto qam = gcs::square_qam(4);
  std::vector<gcs::cplx> pts(qam.points().begin(), qam.points().end());
  for (std::size_t i = 0; i < 16; ++i) pts[i] = {static_cast<double>(i >> 2), pts[i].imag()};
  CHECK_FALSE(gcs::axis_labels_gray(gcs::Constellation(4, pts)));
  CHECK_THROWS_AS(gcs::axis_labels_gray(gcs::Constellation(3, std::vector<gcs::cplx>(8, {1, 0}))),
                  gcs::ParameterError);
}

namespace {

struct CliResult {
  int code = 0;
  std::string out;
};

CliResult run_cli(const std::string& args) {
  const auto log = std::filesystem::temp_directory_path() / "gcs_exp_cli.txt";
  const std::string cmd = std::string("\"") + GCS_CLI_PATH + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  CliResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = gcs::text::read_file(log.string());
  return r;
}

}  // namespace

TEST_CASE("cli entry points") {
  const auto cx = run_cli("complexity --kind separated --m 6 --n 8");
  CHECK(cx.code == 0);
  CHECK(cx.out == "64\n");
  CHECK(run_cli("complexity --kind full --m 6 --n 16").out == "128\n");

  CHECK(run_cli("complexity --kind separated --bogus 3").code == 2);
  CHECK(run_cli("complexity").code == 2);
  CHECK(run_cli("no-such-command").code == 2);

  const auto missing = run_cli("validate --checkpoint " + temp_dir("absent"));
  CHECK(missing.code == 1);
  CHECK(missing.out.rfind("error: kind=file message=", 0) == 0);

  const auto qam = run_cli("export-constellation --qam-m 2");
  CHECK(qam.code == 0);
  CHECK(qam.out.rfind("re\tim\tlabel\n", 0) == 0);

  const auto gc = run_cli("gradcheck");
  CHECK(gc.code == 0);
  CHECK(gc.out.find("PASS") != std::string::npos);
}
