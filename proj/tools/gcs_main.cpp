// Command-line front end: train, validate, sweep, export-constellation,
// complexity and gradcheck.

#include "gcs/error.hpp"
#include "gcs/experiments.hpp"
#include "gcs/training.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <sstream>

namespace {

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string config;
};

gcs::text::KeyValues config_values(const Globals& g) {
  if (g.config.empty()) return {};
  return gcs::text::parse_key_values(gcs::text::read_file(g.config));
}

void emit(const std::string& path, const std::string& contents) {
  if (path.empty() || path == "-") {
    std::cout << contents;
  } else {
    gcs::text::write_file(path, contents);
  }
}

gcs::Receiver receiver_from(const std::string& checkpoint, int qam_m) {
  gcs::Receiver rx;
  if (checkpoint.empty()) {
    rx.constellation = gcs::square_qam(qam_m);
    return rx;
  }
  gcs::TrainedSystem sys = gcs::load_checkpoint(checkpoint);
  rx.constellation = std::move(sys.constellation);
  rx.demapper = std::move(sys.demapper);
  return rx;
}

gcs::DemapperKind parse_kind(const std::string& s) {
  if (s == "gaussian") return gcs::DemapperKind::Gaussian;
  if (s == "full") return gcs::DemapperKind::NnFull;
  if (s == "separated") return gcs::DemapperKind::NnSeparated;
  throw gcs::UsageError("unknown demapper kind '" + s + "' (expected gaussian|full|separated)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geometric constellation shaping for Wiener phase-noise channels"};
  app.require_subcommand(1);
  Globals g;
  std::uint64_t seed_value = 0;
  auto* seed_opt = app.add_option("--seed", seed_value, "Master seed");
  app.add_option("--out", g.out, "Output file or directory");
  app.add_option("--config", g.config, "Flat key = value config file");

  // train
  auto* train = app.add_subcommand("train", "Train a constellation and demapper end to end");
  train->fallthrough();
  std::optional<int> t_steps, t_batch, t_hidden, t_m;
  std::optional<double> t_lr, t_snr, t_lw;
  std::optional<std::string> t_layout, t_act;
  bool t_quiet = false;
  train->add_option("--steps", t_steps);
  train->add_option("--batch", t_batch, "Symbols per step");
  train->add_option("--hidden", t_hidden, "Hidden width n");
  train->add_option("--m", t_m, "Bits per symbol");
  train->add_option("--lr", t_lr, "Learning rate");
  train->add_option("--snr", t_snr, "SNR in dB");
  train->add_option("--linewidth", t_lw, "Laser linewidth in Hz");
  train->add_option("--layout", t_layout, "full|separated");
  train->add_option("--activation", t_act, "relu|tanh");
  train->add_flag("--quiet", t_quiet, "No progress output");

  // validate
  auto* val = app.add_subcommand("validate", "Validated BMI with hard BPS");
  val->fallthrough();
  std::string v_ckpt;
  int v_qam = 6;
  double v_snr = 17.0, v_lw = 100e3;
  std::size_t v_symbols = 100000;
  int v_seeds = 5;
  std::string v_recovery = "bps";
  val->add_option("--checkpoint", v_ckpt, "Checkpoint directory (default: square QAM)");
  val->add_option("--qam-m", v_qam, "Bits per symbol of the QAM baseline");
  val->add_option("--snr", v_snr, "SNR in dB");
  val->add_option("--linewidth", v_lw, "Laser linewidth in Hz");
  val->add_option("--n-symbols", v_symbols);
  val->add_option("--n-seeds", v_seeds);
  val->add_option("--recovery", v_recovery, "bps|genie");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "BMI sweep over SNR or linewidth");
  sweep->fallthrough();
  std::optional<std::string> s_axis, s_systems, s_grid;
  std::optional<double> s_fixed;
  std::optional<std::size_t> s_symbols;
  std::optional<int> s_seeds;
  sweep->add_option("--axis", s_axis, "snr|linewidth");
  sweep->add_option("--systems", s_systems, "name=checkpoint_dir|qam, comma separated");
  sweep->add_option("--grid", s_grid, "Comma separated grid values");
  sweep->add_option("--fixed", s_fixed, "Value of the other parameter");
  sweep->add_option("--n-symbols", s_symbols);
  sweep->add_option("--n-seeds", s_seeds);

  // export-constellation
  auto* exp = app.add_subcommand("export-constellation", "Write a constellation as TSV");
  exp->fallthrough();
  std::string e_ckpt;
  int e_qam = 6;
  exp->add_option("--checkpoint", e_ckpt, "Checkpoint directory (default: square QAM)");
  exp->add_option("--qam-m", e_qam, "Bits per symbol of the QAM baseline");

  // complexity
  auto* cx = app.add_subcommand("complexity", "Real multiplications per received symbol");
  cx->fallthrough();
  std::string c_kind;
  int c_m = 6, c_n = 0, c_layers = 1;
  cx->add_option("--kind", c_kind, "gaussian|full|separated")->required();
  cx->add_option("--m", c_m);
  cx->add_option("--n", c_n, "Hidden width");
  cx->add_option("--layers", c_layers, "Hidden layers");

  // gradcheck
  auto* gc = app.add_subcommand("gradcheck", "Finite-difference check of the training chain");
  gc->fallthrough();
  std::string g_layout = "separated", g_act = "relu";
  double g_tau = 0.1;
  gc->add_option("--layout", g_layout);
  gc->add_option("--activation", g_act);
  gc->add_option("--temperature", g_tau);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  if (*seed_opt) g.seed = seed_value;

  try {
    if (train->parsed()) {
      gcs::TrainConfig cfg = gcs::train_config_from(config_values(g));
      if (g.seed) cfg.seed = *g.seed;
      if (t_steps) cfg.steps = *t_steps;
      if (t_batch) cfg.batch_symbols = *t_batch;
      if (t_hidden) cfg.hidden = *t_hidden;
      if (t_m) cfg.m = *t_m;
      if (t_lr) cfg.learning_rate = *t_lr;
      if (t_layout) cfg.layout = gcs::parse_layout(*t_layout);
      if (t_act) cfg.activation = gcs::parse_activation(*t_act);
      if (t_snr || t_lw) {
        cfg.channel = gcs::params_from(t_snr.value_or(cfg.channel.snr_db),
                                       t_lw.value_or(cfg.channel.linewidth_hz),
                                       cfg.channel.symbol_rate_baud);
      }
      const std::string dir = g.out.empty() ? "run" : g.out;
      const int every = std::max(1, cfg.steps / 20);
      const gcs::TrainedSystem sys = gcs::train_e2e(cfg, [&](int step, double loss, double tau) {
        if (!t_quiet && (step % every == 0 || step + 1 == cfg.steps)) {
          std::cerr << "step " << step << " loss " << loss << " bmi "
                    << gcs::bmi_from_loss(loss, cfg.m) << " tau " << tau << '\n';
        }
      });
      gcs::save_checkpoint(dir, sys);
      std::cout << "checkpoint=" << dir << " initial_loss=" << gcs::text::format_double(sys.meta.initial_loss)
                << " final_loss=" << gcs::text::format_double(sys.meta.final_loss) << '\n';
    } else if (val->parsed()) {
      const gcs::text::KeyValues kv = config_values(g);
      gcs::BpsConfig bps = gcs::sweep_spec_from(kv).bps;
      gcs::ValidationOptions opts;
      opts.n_symbols = v_symbols;
      opts.n_seeds = v_seeds;
      if (g.seed) opts.seed = *g.seed;
      if (v_recovery == "genie") {
        opts.recovery = gcs::PhaseRecovery::Genie;
      } else if (v_recovery != "bps") {
        throw gcs::UsageError("unknown recovery '" + v_recovery + "' (expected bps|genie)");
      }
      const gcs::Receiver rx = receiver_from(v_ckpt, v_qam);
      const gcs::ValidationResult r = gcs::validate(rx, gcs::params_from(v_snr, v_lw), bps, opts);
      std::ostringstream out;
      out << "mean = " << gcs::text::format_double(r.mean) << '\n'
          << "stddev = " << gcs::text::format_double(r.stddev) << '\n'
          << "best_rotation_mean = " << gcs::text::format_double(r.best_rotation_mean) << '\n';
      std::size_t slips = 0;
      for (const gcs::SeedResult& s : r.seeds) slips += s.slips;
      out << "slips = " << slips << '\n';
      emit(g.out, out.str());
    } else if (sweep->parsed()) {
      gcs::text::KeyValues kv = config_values(g);
      if (s_axis) kv["axis"] = *s_axis;
      if (s_systems) kv["systems"] = *s_systems;
      if (s_grid) kv["grid"] = *s_grid;
      gcs::SweepSpec spec = gcs::sweep_spec_from(kv);
      if (s_fixed) spec.fixed = *s_fixed;
      if (s_symbols) spec.n_symbols = *s_symbols;
      if (s_seeds) spec.n_seeds = *s_seeds;
      if (g.seed) spec.seed = *g.seed;
      const std::vector<gcs::SweepTable> tables = gcs::run_sweep(spec);
      const std::string dir = g.out.empty() ? "sweep" : g.out;
      for (const std::string& p : gcs::write_tables(dir, tables)) std::cout << p << '\n';
      if (tables.size() >= 2) {
        const std::string report = gcs::compare_report(tables);
        gcs::text::write_file(dir + "/report.txt", report);
        std::cout << report;
      }
    } else if (exp->parsed()) {
      emit(g.out, gcs::to_tsv(receiver_from(e_ckpt, e_qam).constellation));
    } else if (cx->parsed()) {
      std::ostringstream out;
      out << gcs::count_multiplications(parse_kind(c_kind), c_m, c_n, c_layers) << '\n';
      emit(g.out, out.str());
    } else if (gc->parsed()) {
      gcs::MiniChainOptions opts;
      if (g.seed) opts.seed = *g.seed;
      opts.layout = gcs::parse_layout(g_layout);
      opts.activation = gcs::parse_activation(g_act);
      opts.temperature = g_tau;
      const gcs::ad::GradcheckReport r = gcs::gradcheck_chain(opts);
      const bool pass = r.max_rel_error < 1e-4;
      std::ostringstream out;
      out << "max_rel_error = " << gcs::text::format_double(r.max_rel_error) << '\n'
          << "worst_index = " << r.worst_index << '\n'
          << (pass ? "PASS" : "FAIL") << '\n';
      emit(g.out, out.str());
      return pass ? 0 : 1;
    }
  } catch (const gcs::UsageError& e) {
    std::cerr << "error: kind=" << e.kind() << " message=" << e.what() << '\n';
    return 2;
  } catch (const gcs::Error& e) {
    std::cerr << "error: kind=" << e.kind() << " message=" << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: kind=internal message=" << e.what() << '\n';
    return 1;
  }
  return 0;
}
