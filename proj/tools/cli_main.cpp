// Command-line driver: dataset generation, prior training, segmentation,
// the classical grid-evolution baseline, property verification, and paired
// run comparison. Outputs are deterministic given --seed.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nncv/baseline.hpp"
#include "nncv/dataio.hpp"
#include "nncv/optimizer.hpp"
#include "nncv/parallel.hpp"
#include "nncv/trainer.hpp"
#include "nncv/verify.hpp"

namespace fs = std::filesystem;
using namespace nncv;

namespace {

fs::path default_out_dir() {
  if (const char* env = std::getenv("NNCV_OUT_DIR")) return fs::path(env);
  return fs::path("out");
}

std::string trace_csv(const std::vector<TraceRow>& trace) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "iteration,data,length,area,total,grad_norm\n";
  for (const TraceRow& row : trace) {
    os << row.energy.csv_row(row.iteration) << ',' << row.grad_norm << '\n';
  }
  return os.str();
}

// Foreground = union of patterns whose constant lies above the midpoint of
// the constants' range (bright objects on a dark background).
LabelMask foreground_mask(const LabelMask& labels, const std::vector<double>& constants) {
  double lo = constants[0], hi = constants[0];
  for (double c : constants) {
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  const double mid = 0.5 * (lo + hi);
  LabelMask fg(labels.width, labels.height);
  for (std::size_t p = 0; p < labels.labels.size(); ++p) {
    fg.labels[p] = constants[labels.labels[p]] >= mid ? 1 : 0;
  }
  return fg;
}

// Input image with label-transition pixels painted white.
GrayImage boundary_overlay(const GrayImage& img, const LabelMask& labels) {
  GrayImage overlay = img;
  for (int j = 0; j < img.height; ++j) {
    for (int i = 0; i < img.width; ++i) {
      const bool edge = (i + 1 < img.width && labels.at(i, j) != labels.at(i + 1, j)) ||
                        (j + 1 < img.height && labels.at(i, j) != labels.at(i, j + 1)) ||
                        (i > 0 && labels.at(i, j) != labels.at(i - 1, j)) ||
                        (j > 0 && labels.at(i, j) != labels.at(i, j - 1));
      if (edge) overlay.at(i, j) = 1.0;
    }
  }
  return overlay;
}

std::string four_digits(int n) {
  std::ostringstream os;
  os << std::setw(4) << std::setfill('0') << n;
  return os.str();
}

int run_generate(const DatasetSpec& spec, const fs::path& out_dir) {
  const auto data = generate_dataset(spec);
  std::ostringstream manifest;
  manifest << std::setprecision(17);
  manifest << "index,image,mask,background,circle,center_x,center_y,radius,foreground\n";
  for (int i = 0; i < spec.count; ++i) {
    const std::string img_name = "image_" + four_digits(i) + ".pgm";
    const std::string mask_name = "mask_" + four_digits(i) + ".pgm";
    write_image(data[i].image, out_dir / img_name);
    write_mask(data[i].truth, out_dir / mask_name);
    for (std::size_t c = 0; c < data[i].circles.size(); ++c) {
      const CircleSpec& cs = data[i].circles[c];
      manifest << i << ',' << img_name << ',' << mask_name << ',' << data[i].bg << ',' << c << ','
               << cs.center.x << ',' << cs.center.y << ',' << cs.radius << ',' << cs.fg << '\n';
    }
    if (data[i].circles.empty()) {
      manifest << i << ',' << img_name << ',' << mask_name << ',' << data[i].bg << ",,,,,\n";
    }
  }
  atomic_write(out_dir / "manifest.csv", manifest.str());
  std::cout << "wrote " << spec.count << " images to " << out_dir.string() << "\n";
  return 0;
}

int run_segment(const fs::path& image_path, const RunConfig& cfg, const fs::path& out_dir,
                const std::optional<fs::path>& init_path) {
  const GrayImage f = read_image(image_path);
  std::optional<std::vector<LayerParams>> init;
  if (init_path) {
    const MultiphaseModel prior = load_checkpoint(*init_path);
    if (prior.m != cfg.m || prior.n1 != cfg.n1) {
      throw ShapeMismatch("checkpoint shape does not match --m/--n1");
    }
    init = prior.levelsets;
  }
  const SegmentationResult res = run_segmentation(f, cfg, init ? &*init : nullptr);

  const LabelMask labels = segmentation_mask(res.model, f.width, f.height);
  write_mask(labels, out_dir / "mask.pgm");
  write_mask(foreground_mask(labels, res.model.constants), out_dir / "foreground.pgm");
  write_image(boundary_overlay(f, labels), out_dir / "overlay.pgm");
  atomic_write(out_dir / "energy.csv", trace_csv(res.trace));
  save_checkpoint(res.model, out_dir / "model.json");

  std::cout << "iterations: " << res.trace.size()
            << (res.early_stopped ? " (early stop)" : "") << "\n";
  if (!res.trace.empty()) {
    std::cout << std::setprecision(17) << "initial total: " << res.trace.front().energy.total
              << "\nfinal total:   " << res.trace.back().energy.total << "\n";
  }
  return 0;
}

int run_train(const fs::path& data_dir, const RunConfig& cfg, int epochs, int patience,
              double split, const fs::path& out_dir) {
  Dataset data;
  data.split = split;
  data.seed = cfg.seed;
  for (int i = 0;; ++i) {
    const fs::path p = data_dir / ("image_" + four_digits(i) + ".pgm");
    if (!fs::exists(p)) break;
    data.images.push_back(read_image(p));
  }
  if (data.images.empty()) {
    throw EmptyDataset();
  }
  const TrainResult res = train_prior(data, cfg, epochs, patience);

  MultiphaseModel prior;
  prior.m = cfg.m;
  prior.n1 = cfg.n1;
  prior.epsilon = Smoothing(cfg.epsilon);
  prior.levelsets = res.params;
  prior.constants.assign(prior.pattern_count(), 0.0);
  save_checkpoint(prior, out_dir / "prior.json");
  atomic_write(out_dir / "train_report.csv", res.report.csv());

  std::cout << std::setprecision(17) << "epochs run: " << res.report.val_loss.size()
            << "\nbest epoch: " << res.report.best_epoch
            << "\nbest validation loss: " << res.report.best_val_loss << "\nstopped by: "
            << (res.report.reason == TrainReport::StopReason::patience ? "patience" : "max-epochs")
            << "\n";
  return 0;
}

int run_evolve(const fs::path& image_path, int m, int steps, double mu, double nu, double eps,
               double dt, int snapshot_every, const fs::path& out_dir) {
  const GrayImage f = read_image(image_path);
  std::vector<GridLevelSet> init = default_evolution_init(f.width, f.height, m);
  for (GridLevelSet& l : init) l.dt = dt;

  std::ostringstream constants_csv;
  constants_csv << std::setprecision(17);
  constants_csv << "step";
  for (std::size_t idx = 0; idx < (std::size_t{1} << m); ++idx) {
    constants_csv << ",c_" << SignPattern::from_index(m, idx).to_string();
  }
  constants_csv << '\n';

  std::vector<GridLevelSet> fields = std::move(init);
  int done = 0;
  while (done < steps) {
    const int chunk = snapshot_every > 0 ? std::min(snapshot_every, steps - done) : steps - done;
    EvolveResult res = evolve(f, m, std::move(fields), chunk, mu, nu, Smoothing(eps));
    fields = std::move(res.fields);
    for (int s = 0; s < chunk; ++s) {
      constants_csv << (done + s + 1);
      for (double c : res.constants_trace[s]) constants_csv << ',' << c;
      constants_csv << '\n';
    }
    done += chunk;
    if (snapshot_every > 0) {
      write_mask(evolution_mask(fields), out_dir / ("mask_step_" + four_digits(done) + ".pgm"));
    }
  }

  const LabelMask labels = evolution_mask(fields);
  write_mask(labels, out_dir / "mask.pgm");

  // Brighter mean phase counts as foreground.
  std::vector<std::vector<double>> values;
  for (const GridLevelSet& l : fields) values.push_back(l.values);
  const std::vector<double> means = region_means_from_values(
      values, f, Smoothing(eps), std::vector<double>(std::size_t{1} << m, 0.0), ActKind::sigmoid);
  write_mask(foreground_mask(labels, means), out_dir / "foreground.pgm");
  atomic_write(out_dir / "constants.csv", constants_csv.str());
  std::cout << "evolved " << steps << " steps\n";
  return 0;
}

int run_verify_cmd(std::uint64_t seed) {
  const std::vector<VerifyCheck> checks = run_verification(seed);
  bool all = true;
  for (const VerifyCheck& c : checks) {
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ": measured " << std::setprecision(6)
              << c.measured << " vs tolerance " << c.tolerance << "\n";
    all = all && c.pass;
  }
  return all ? 0 : 2;
}

double final_total_from_trace(const fs::path& csv) {
  std::ifstream in(csv);
  if (!in) throw std::runtime_error("cannot open " + csv.string());
  std::string line, last;
  std::getline(in, line);  // header
  int total_col = -1;
  {
    std::stringstream hs(line);
    std::string col;
    for (int i = 0; std::getline(hs, col, ','); ++i) {
      if (col == "total") total_col = i;
    }
  }
  if (total_col < 0) throw std::runtime_error("no 'total' column in " + csv.string());
  while (std::getline(in, line)) {
    if (!line.empty()) last = line;
  }
  std::stringstream ls(last);
  std::string cell;
  for (int i = 0; std::getline(ls, cell, ','); ++i) {
    if (i == total_col) return std::stod(cell);
  }
  throw std::runtime_error("missing total value in " + csv.string());
}

int run_report(const std::vector<std::string>& runs_a, const std::vector<std::string>& runs_b,
               const std::vector<std::string>& masks_a, const std::vector<std::string>& masks_b,
               const std::vector<std::string>& truths, const fs::path& out_path) {
  if (runs_a.size() != runs_b.size()) {
    throw ConfigInvalid("--run-a and --run-b must be paired");
  }
  const bool with_dice = !truths.empty();
  if (with_dice && (masks_a.size() != runs_a.size() || masks_b.size() != runs_a.size() ||
                    truths.size() != runs_a.size())) {
    throw ConfigInvalid("--mask-a/--mask-b/--truth must pair with the runs");
  }

  std::ostringstream os;
  os << std::setprecision(17);
  os << "pair,final_a,final_b,dice_a,dice_b\n";
  int a_lower = 0;
  for (std::size_t i = 0; i < runs_a.size(); ++i) {
    const double fa = final_total_from_trace(runs_a[i]);
    const double fb = final_total_from_trace(runs_b[i]);
    if (fa < fb) ++a_lower;
    os << i << ',' << fa << ',' << fb;
    if (with_dice) {
      const LabelMask truth = read_mask(truths[i]);
      LabelMask fg_truth(truth.width, truth.height);
      for (std::size_t p = 0; p < truth.labels.size(); ++p) {
        fg_truth.labels[p] = truth.labels[p] > 0 ? 1 : 0;
      }
      os << ',' << dice(read_mask(masks_a[i]), fg_truth, 1) << ','
         << dice(read_mask(masks_b[i]), fg_truth, 1);
    } else {
      os << ",,";
    }
    os << '\n';
  }
  atomic_write(out_path, os.str());
  std::cout << "pairs with run-a final energy lower: " << a_lower << "/" << runs_a.size() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiphase piecewise-constant segmentation with one-layer "
               "level-set networks"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  fs::path out_dir = default_out_dir();
  int threads = 1;
  app.add_option("--seed", seed, "Seed for all stochastic draws")->capture_default_str();
  app.add_option("--out-dir", out_dir, "Output directory (env NNCV_OUT_DIR overrides the default)")
      ->capture_default_str();
  app.add_option("--threads", threads, "Worker cap for pixel loops")->capture_default_str();

  // generate-data
  auto* gen = app.add_subcommand("generate-data", "Write a synthetic circle dataset");
  DatasetSpec dspec;
  gen->add_option("--count", dspec.count, "Number of images")->capture_default_str();
  gen->add_option("--width", dspec.width, "Image width")->capture_default_str();
  gen->add_option("--height", dspec.height, "Image height")->capture_default_str();
  gen->add_option("--min-circles", dspec.min_circles, "Fewest circles per image")
      ->capture_default_str();
  gen->add_option("--max-circles", dspec.max_circles, "Most circles per image")
      ->capture_default_str();
  gen->add_option("--min-radius", dspec.min_radius, "Smallest circle radius")
      ->capture_default_str();
  gen->add_option("--max-radius", dspec.max_radius, "Largest circle radius")
      ->capture_default_str();

  // segment
  auto* seg = app.add_subcommand("segment", "Segment one image by mini-batch optimization");
  fs::path seg_image;
  RunConfig seg_cfg;
  std::string seg_init;
  seg->add_option("--image", seg_image, "Input PGM image")->required();
  seg->add_option("--m", seg_cfg.m, "Number of level-set networks")->capture_default_str();
  seg->add_option("--n1", seg_cfg.n1, "Neurons per network")->capture_default_str();
  seg->add_option("--eps", seg_cfg.epsilon, "Smoothing epsilon")->capture_default_str();
  seg->add_option("--mu", seg_cfg.mu, "Boundary length weight (per pixel edge)")
      ->capture_default_str();
  seg->add_option("--nu", seg_cfg.nu, "Area weight")->capture_default_str();
  seg->add_option("--iters", seg_cfg.iters, "Max iterations")->capture_default_str();
  seg->add_option("--batch", seg_cfg.batch, "Pixels per mini-batch")->capture_default_str();
  seg->add_option("--lr", seg_cfg.lr, "Learning rate")->capture_default_str();
  seg->add_option("--weight-decay", seg_cfg.weight_decay, "Decoupled weight decay")
      ->capture_default_str();
  seg->add_option("--tau", seg_cfg.tol, "Early-stop gradient tolerance")->capture_default_str();
  seg->add_option("--init-std", seg_cfg.init_std, "Random init standard deviation")
      ->capture_default_str();
  seg->add_option("--init", seg_init, "Checkpoint with initial parameters");

  // train
  auto* train = app.add_subcommand("train", "Train initialization priors on a dataset");
  fs::path train_dir;
  RunConfig train_cfg;
  train_cfg.lr = 3e-5;
  int train_epochs = 100;
  int train_patience = 10;
  double train_split = 0.9;
  train->add_option("--data-dir", train_dir, "Directory with image_*.pgm files")->required();
  train->add_option("--m", train_cfg.m, "Number of level-set networks")->capture_default_str();
  train->add_option("--n1", train_cfg.n1, "Neurons per network")->capture_default_str();
  train->add_option("--eps", train_cfg.epsilon, "Smoothing epsilon")->capture_default_str();
  train->add_option("--mu", train_cfg.mu, "Boundary length weight (per pixel edge)")
      ->capture_default_str();
  train->add_option("--nu", train_cfg.nu, "Area weight")->capture_default_str();
  train->add_option("--lr", train_cfg.lr, "Learning rate")->capture_default_str();
  train->add_option("--weight-decay", train_cfg.weight_decay, "Decoupled weight decay")
      ->capture_default_str();
  train->add_option("--epochs", train_epochs, "Max epochs")->capture_default_str();
  train->add_option("--patience", train_patience, "Early-stop patience")->capture_default_str();
  train->add_option("--split", train_split, "Training fraction of the dataset")
      ->capture_default_str();

  // evolve-baseline
  auto* evo = app.add_subcommand("evolve-baseline", "Classical grid level-set evolution");
  fs::path evo_image;
  int evo_m = 1;
  int evo_steps = 500;
  double evo_mu = 0.5, evo_nu = 0.0, evo_eps = 0.5, evo_dt = 0.1;
  int evo_snapshot = 0;
  evo->add_option("--image", evo_image, "Input PGM image")->required();
  evo->add_option("--m", evo_m, "Number of level-set fields (1 or 2)")->capture_default_str();
  evo->add_option("--steps", evo_steps, "Time steps")->capture_default_str();
  evo->add_option("--mu", evo_mu, "Boundary length weight (per pixel edge)")
      ->capture_default_str();
  evo->add_option("--nu", evo_nu, "Area weight")->capture_default_str();
  evo->add_option("--eps", evo_eps, "Smoothing epsilon")->capture_default_str();
  evo->add_option("--dt", evo_dt, "Time step")->capture_default_str();
  evo->add_option("--snapshot-every", evo_snapshot, "Write a mask every N steps (0 = off)")
      ->capture_default_str();

  // verify
  auto* ver = app.add_subcommand("verify", "Run the property checks and print PASS/FAIL lines");

  // report
  auto* rep = app.add_subcommand("report", "Compare paired runs (final energies and Dice)");
  std::vector<std::string> rep_a, rep_b, rep_mask_a, rep_mask_b, rep_truth;
  std::string rep_out = "report.csv";
  rep->add_option("--run-a", rep_a, "Energy CSV of run A (repeatable)")->required();
  rep->add_option("--run-b", rep_b, "Energy CSV of run B (repeatable)")->required();
  rep->add_option("--mask-a", rep_mask_a, "Foreground mask of run A (repeatable)");
  rep->add_option("--mask-b", rep_mask_b, "Foreground mask of run B (repeatable)");
  rep->add_option("--truth", rep_truth, "Ground-truth label mask (repeatable)");
  rep->add_option("--out", rep_out, "Output CSV path")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);  // --help and friends exit 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;  // usage error
  }

  set_thread_count(threads);
  dspec.seed = seed;
  seg_cfg.seed = seed;
  train_cfg.seed = seed;

  try {
    if (gen->parsed()) return run_generate(dspec, out_dir);
    if (seg->parsed()) {
      return run_segment(seg_image, seg_cfg, out_dir,
                         seg_init.empty() ? std::nullopt
                                          : std::optional<fs::path>(seg_init));
    }
    if (train->parsed()) {
      return run_train(train_dir, train_cfg, train_epochs, train_patience, train_split, out_dir);
    }
    if (evo->parsed()) {
      return run_evolve(evo_image, evo_m, evo_steps, evo_mu, evo_nu, evo_eps, evo_dt,
                        evo_snapshot, out_dir);
    }
    if (ver->parsed()) return run_verify_cmd(seed);
    if (rep->parsed()) {
      return run_report(rep_a, rep_b, rep_mask_a, rep_mask_b, rep_truth, out_dir / rep_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
