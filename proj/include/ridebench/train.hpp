#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "ridebench/network.hpp"
#include "ridebench/rng.hpp"

namespace ridebench {

enum class OptimizerKind { kAdam, kSgdMomentum };

struct TrainConfig {
  int epochs = 40;
  int batch_size = 32;
  double learning_rate = 1e-3;
  OptimizerKind optimizer = OptimizerKind::kAdam;
  std::uint64_t seed = 0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double sgd_momentum = 0.9;
};

struct TrainTrace {
  std::vector<double> epoch_loss;  // mean batch loss per epoch
};

// First-order update over a fixed parameter set. State (Adam moments or
// momentum buffers) is serializable so online runs can checkpoint exactly.
class Optimizer {
public:
  Optimizer(std::vector<autodiff::Var> params, const TrainConfig& cfg);

  void step();

  void serialize(std::ostream& out) const;
  void deserialize(std::istream& in);

private:
  std::vector<autodiff::Var> params_;
  TrainConfig cfg_;
  std::vector<Tensor> m_, v_;  // Adam moments / momentum buffers
  long step_count_ = 0;
};

// Owns the shuffle stream and optimizer state for one model's training
// loop. Online strategies keep a Trainer alive across the whole test walk
// so fine-tuning continues from both the parameters and the optimizer
// state; the whole object round-trips through serialize for checkpoints.
class Trainer {
public:
  Trainer(Network& net, const TrainConfig& cfg);

  // `epochs` full passes over `windows` in seeded-shuffle order. Throws
  // ModelError with the learning rate and epoch when the loss goes NaN.
  TrainTrace run(std::span<const SupervisedWindow> windows, int epochs);

  void serialize(std::ostream& out) const;
  void deserialize(std::istream& in);

private:
  Network& net_;
  TrainConfig cfg_;
  Optimizer opt_;
  Rng shuffle_rng_;
};

// One-shot training with a fresh optimizer, cfg.epochs passes.
TrainTrace train(Network& net, std::span<const SupervisedWindow> windows,
                 const TrainConfig& cfg);

// Continues gradient descent from the current parameters on the given
// recent windows (sliding-window online update). Same mechanics as train;
// the caller keeps a persistent Trainer when optimizer state should carry
// across calls.
TrainTrace fine_tune(Network& net, std::span<const SupervisedWindow> recent,
                     const TrainConfig& cfg_online);

}  // namespace ridebench
