#include <doctest.h>

#include <cmath>
#include <sstream>

#include "ridebench/rng.hpp"
#include "ridebench/errors.hpp"
#include "ridebench/train.hpp"

using namespace ridebench;

namespace {

// Windows drawn from an exactly linear map of the features so an MLP with
// enough capacity can reach (near) zero loss.
std::vector<SupervisedWindow> linear_task(int n, Rng& rng) {
  std::vector<SupervisedWindow> out;
  for (int i = 0; i < n; ++i) {
    SupervisedWindow w;
    w.origin = Date::from_iso("2020-01-01") + i;
    w.station = 0;
    double acc = 0;
    for (int k = 0; k < kLookbackDays; ++k) {
      const double v = rng.uniform(0, 1);
      w.lookback.push_back(v);
      acc += v;
    }
    for (int k = 0; k < kHorizonDays * kFeaturesPerDay; ++k) {
      w.features.push_back(0.0);
    }
    for (int h = 0; h < kHorizonDays; ++h) {
      w.target.push_back(acc / kLookbackDays * (1.0 + 0.05 * h));
    }
    out.push_back(std::move(w));
  }
  return out;
}

NetworkSpec mlp_spec() {
  NetworkSpec s;
  s.family = Family::kMlp;
  return s;
}

}  // namespace

TEST_CASE("learning rate 0 leaves parameters unchanged with a flat trace") {
  Rng rng(1);
  auto windows = linear_task(40, rng);
  Network net(mlp_spec(), 5);
  const auto before = net.param_checksum();
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.batch_size = 40;  // one batch per epoch: the trace must be exactly flat
  cfg.learning_rate = 0.0;
  cfg.seed = 5;
  auto trace = train(net, windows, cfg);
  CHECK(net.param_checksum() == before);
  REQUIRE(trace.epoch_loss.size() == 3);
  // Row order inside the batch follows the shuffle, so the reduction may
  // round differently across epochs; the value itself must not move.
  CHECK(trace.epoch_loss[0] ==
        doctest::Approx(trace.epoch_loss[2]).epsilon(1e-12));
}

TEST_CASE("mlp reaches near-zero loss on the noiseless linear task") {
  Rng rng(2);
  auto windows = linear_task(120, rng);
  Network net(mlp_spec(), 7);
  TrainConfig cfg;
  cfg.epochs = 200;
  cfg.batch_size = 16;
  cfg.learning_rate = 3e-3;
  cfg.seed = 7;
  auto trace = train(net, windows, cfg);
  CHECK(trace.epoch_loss.back() < 1e-3);
}

TEST_CASE("same seed gives identical loss traces, different seed differs") {
  Rng rng(3);
  auto windows = linear_task(60, rng);
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.seed = 11;

  Network a(mlp_spec(), 13);
  Network b(mlp_spec(), 13);
  auto ta = train(a, windows, cfg);
  auto tb = train(b, windows, cfg);
  CHECK(ta.epoch_loss == tb.epoch_loss);
  CHECK(a.param_checksum() == b.param_checksum());

  Network c(mlp_spec(), 13);
  cfg.seed = 12;  // different shuffle order
  auto tc = train(c, windows, cfg);
  CHECK(ta.epoch_loss != tc.epoch_loss);
}

TEST_CASE("non-finite loss aborts with the learning rate in the message") {
  Rng rng(4);
  auto windows = linear_task(60, rng);
  Network net(mlp_spec(), 17);
  TrainConfig cfg;
  cfg.epochs = 400;
  cfg.learning_rate = 1e6;  // guaranteed blow-up
  cfg.optimizer = OptimizerKind::kSgdMomentum;
  cfg.seed = 1;
  CHECK_THROWS_WITH_AS(train(net, windows, cfg), doctest::Contains("1e+06"),
                       ModelError);
}

TEST_CASE("fine_tune with zero epochs is the identity") {
  Rng rng(5);
  auto windows = linear_task(30, rng);
  Network net(mlp_spec(), 19);
  const auto before = net.param_checksum();
  TrainConfig cfg;
  cfg.epochs = 0;
  auto trace = fine_tune(net, windows, cfg);
  CHECK(net.param_checksum() == before);
  CHECK(trace.epoch_loss.empty());
}

TEST_CASE("fine_tune on the same distribution does not blow up the loss") {
  Rng rng(6);
  auto windows = linear_task(120, rng);
  Network net(mlp_spec(), 23);
  TrainConfig cfg;
  cfg.epochs = 60;
  cfg.seed = 3;
  train(net, windows, cfg);

  auto more = linear_task(120, rng);
  TrainConfig online = cfg;
  online.epochs = 1;
  // Measure loss on the new windows before and after one fine-tune pass.
  auto loss_on = [&](std::span<const SupervisedWindow> ws) {
    auto batch = net.prepare_batch(ws);
    auto pred = net.forward(batch);
    return autodiff::mse_loss(pred, batch.target).value().v[0];
  };
  const double before = loss_on(more);
  fine_tune(net, more, online);
  const double after = loss_on(more);
  CHECK(after <= before * 1.10);
}

TEST_CASE("sgd momentum trains too") {
  Rng rng(7);
  auto windows = linear_task(80, rng);
  Network net(mlp_spec(), 29);
  TrainConfig cfg;
  cfg.epochs = 100;
  cfg.optimizer = OptimizerKind::kSgdMomentum;
  cfg.learning_rate = 1e-2;
  cfg.seed = 2;
  auto trace = train(net, windows, cfg);
  CHECK(trace.epoch_loss.back() < trace.epoch_loss.front());
}

TEST_CASE("trainer state round trips through serialization") {
  Rng rng(8);
  auto windows = linear_task(40, rng);
  TrainConfig cfg;
  cfg.epochs = 2;
  cfg.seed = 21;

  Network a(mlp_spec(), 31);
  Trainer ta(a, cfg);
  ta.run(windows, 2);

  std::ostringstream net_state, trainer_state;
  a.save(net_state);
  ta.serialize(trainer_state);

  // Continue two more epochs directly...
  ta.run(windows, 2);
  const auto direct = a.param_checksum();

  // ...and via a restored network + trainer.
  Network b(mlp_spec(), 32);
  Trainer tb(b, cfg);
  std::istringstream ns(net_state.str()), ts(trainer_state.str());
  b.load(ns);
  tb.deserialize(ts);
  tb.run(windows, 2);
  CHECK(b.param_checksum() == direct);
}
