#include "nncv/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "nncv/errors.hpp"

namespace nncv {

namespace {

std::vector<std::size_t> split_permutation(const Dataset& d) {
  std::vector<std::size_t> order(d.images.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(d.seed);
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

}  // namespace

std::vector<std::size_t> Dataset::train_indices() const {
  const auto order = split_permutation(*this);
  const std::size_t n_train = static_cast<std::size_t>(std::round(split * images.size()));
  return {order.begin(), order.begin() + std::min(n_train, order.size())};
}

std::vector<std::size_t> Dataset::val_indices() const {
  const auto order = split_permutation(*this);
  const std::size_t n_train = static_cast<std::size_t>(std::round(split * images.size()));
  return {order.begin() + std::min(n_train, order.size()), order.end()};
}

std::string TrainReport::csv() const {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "epoch,train_loss,val_loss\n";
  os << "0,," << initial_val_loss << '\n';
  for (std::size_t e = 0; e < val_loss.size(); ++e) {
    os << (e + 1) << ',' << train_loss[e] << ',' << val_loss[e] << '\n';
  }
  return os.str();
}

namespace {

// Loss of one image under the current parameters: region means recomputed on
// that image, then the smoothed energy.
double image_loss(const std::vector<LayerParams>& params, const GrayImage& img,
                  const RunConfig& cfg, MultiphaseModel& scratch) {
  scratch.levelsets = params;
  scratch.constants.assign(scratch.pattern_count(), 0.0);
  scratch.constants = region_means(scratch, img);
  return energy_levelset(scratch, img, cfg.internal_mu(img.width, img.height), cfg.nu).total;
}

}  // namespace

TrainResult train_prior(const Dataset& data, const RunConfig& cfg, int epochs, int patience) {
  cfg.validate();
  if (data.images.empty()) throw EmptyDataset();
  if (epochs < 1) throw ConfigInvalid("epoch count must be >= 1");
  if (patience < 1) throw ConfigInvalid("patience must be >= 1");
  for (const GrayImage& img : data.images) img.validate();

  const std::vector<std::size_t> train_idx = data.train_indices();
  const std::vector<std::size_t> val_idx = data.val_indices();

  const int dim = std::max(data.images[0].width, data.images[0].height);
  std::vector<LayerParams> params = random_init(cfg.m, cfg.n1, cfg.init_std, cfg.seed,
                                                static_cast<double>(dim),
                                                init_coefficient_scale(cfg.n1));
  OptimizerState opt = OptimizerState::init(params, cfg.adamw());

  MultiphaseModel scratch;
  scratch.m = cfg.m;
  scratch.n1 = cfg.n1;
  scratch.epsilon = Smoothing(cfg.epsilon);
  scratch.constants.assign(scratch.pattern_count(), 0.0);

  const auto validation_loss = [&](const std::vector<LayerParams>& p) {
    if (val_idx.empty()) return 0.0;
    double sum = 0.0;
    for (std::size_t i : val_idx) sum += image_loss(p, data.images[i], cfg, scratch);
    return sum / static_cast<double>(val_idx.size());
  };

  TrainResult out;
  TrainReport& report = out.report;
  report.initial_val_loss = validation_loss(params);

  double best = std::numeric_limits<double>::infinity();
  std::vector<LayerParams> best_params = params;
  int best_epoch = 0;
  int wait = 0;
  std::mt19937_64 epoch_rng(cfg.seed ^ 0xda3e39cb94b95bdbull);
  report.reason = TrainReport::StopReason::max_epochs;

  for (int epoch = 1; epoch <= epochs; ++epoch) {
    std::vector<std::size_t> order = train_idx;
    std::shuffle(order.begin(), order.end(), epoch_rng);

    double train_sum = 0.0;
    for (std::size_t i : order) {
      const GrayImage& img = data.images[i];
      scratch.levelsets = params;
      scratch.constants.assign(scratch.pattern_count(), 0.0);
      scratch.constants = region_means(scratch, img);
      const double mu = cfg.internal_mu(img.width, img.height);
      train_sum += energy_levelset(scratch, img, mu, cfg.nu).total;

      std::vector<std::size_t> all(img.pixel_count());
      std::iota(all.begin(), all.end(), std::size_t{0});
      const EnergyGradient g = grad_energy(scratch, img, mu, cfg.nu, all);
      adamw_step(opt, params, g.levelsets);
    }
    report.train_loss.push_back(order.empty() ? 0.0 : train_sum / order.size());

    const double val = validation_loss(params);
    report.val_loss.push_back(val);
    if (val < best) {
      best = val;
      best_params = params;
      best_epoch = epoch;
      wait = 0;
    } else {
      ++wait;
      if (wait >= patience) {
        report.reason = TrainReport::StopReason::patience;
        break;
      }
    }
  }

  report.best_epoch = best_epoch;
  report.best_val_loss = best;
  out.params = std::move(best_params);
  return out;
}

PriorEvaluation evaluate_prior(const std::vector<LayerParams>& params, const GrayImage& image,
                               const RunConfig& cfg) {
  cfg.validate();
  image.validate();
  if (static_cast<int>(params.size()) != cfg.m) {
    throw ShapeMismatch("parameter count does not match the configured phase count");
  }
  for (const LayerParams& p : params) {
    if (p.size() != cfg.n1) throw ShapeMismatch("network width does not match the configuration");
  }
  PriorEvaluation out;
  out.model.m = cfg.m;
  out.model.n1 = cfg.n1;
  out.model.epsilon = Smoothing(cfg.epsilon);
  out.model.levelsets = params;
  out.model.constants.assign(out.model.pattern_count(), 0.0);
  out.model.constants = region_means(out.model, image);
  out.energy =
      energy_levelset(out.model, image, cfg.internal_mu(image.width, image.height), cfg.nu);
  return out;
}

}  // namespace nncv
