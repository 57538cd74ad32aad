#include <doctest.h>

#include <cmath>
#include <sstream>

#include "ridebench/errors.hpp"
#include "ridebench/network.hpp"
#include "ridebench/rng.hpp"

using namespace ridebench;

namespace {

SupervisedWindow random_window(int stations, Rng& rng, bool with_target = true) {
  SupervisedWindow w;
  w.origin = Date::from_iso("2020-01-01");
  w.station = stations == 1 ? 0 : -1;
  for (int i = 0; i < stations * kLookbackDays; ++i) {
    w.lookback.push_back(rng.uniform(0, 1));
  }
  for (int i = 0; i < kHorizonDays * kFeaturesPerDay; ++i) {
    w.features.push_back(rng.uniform(-1, 1));
  }
  if (with_target) {
    for (int i = 0; i < stations * kHorizonDays; ++i) {
      w.target.push_back(rng.uniform(0, 1));
    }
  }
  return w;
}

NetworkSpec spec_for(Family f, int stations) {
  NetworkSpec s;
  s.family = f;
  s.stations_in = stations;
  s.stations_out = stations;
  return s;
}

}  // namespace

TEST_CASE("hidden width is the rounded mean of input and output widths") {
  NetworkSpec s;
  s.family = Family::kMlp;
  s.stations_in = 1;
  s.stations_out = 1;
  s.feature_width = 6;  // input 21 + 6 = 27, output 7
  CHECK(s.input_width() == 27);
  CHECK(s.output_width() == 7);
  CHECK(s.mlp_hidden() == 17);

  NetworkSpec d;  // full default feature block
  CHECK(d.input_width() == 63);
  CHECK(d.mlp_hidden() == 35);
}

TEST_CASE("parameter counts match the closed-form formulas") {
  for (int stations : {1, 5}) {
    {
      Network net(spec_for(Family::kMlp, stations), 1);
      const long I = stations * 21 + 42, O = stations * 7;
      const long H = std::lround((I + O) / 2.0);
      CHECK(net.param_count() == I * H + H + H * O + O);
      CHECK(net.param_count() == net.spec().expected_param_count());
    }
    {
      Network net(spec_for(Family::kCnn, stations), 1);
      const long O = stations * 7;
      const long conv = static_cast<long>(stations) * 2 * 256 + 256;
      const long head = (21L * 256 + 42) * O + O;
      CHECK(net.param_count() == conv + head);
      CHECK(net.param_count() == net.spec().expected_param_count());
    }
    {
      Network net(spec_for(Family::kLstm, stations), 1);
      const long O = stations * 7;
      const long cell = static_cast<long>(stations) * 128 + 32L * 128 + 128;
      const long head = (32L + 42) * O + O;
      CHECK(net.param_count() == cell + head);
      CHECK(net.param_count() == net.spec().expected_param_count());
    }
  }
}

TEST_CASE("zero weights produce all-zero predictions") {
  Rng rng(3);
  for (Family f : {Family::kMlp, Family::kCnn, Family::kLstm}) {
    Network net(spec_for(f, 2), 7);
    for (auto& p : net.params()) {
      std::fill(p.value().v.begin(), p.value().v.end(), 0.0);
    }
    std::vector<SupervisedWindow> ws = {random_window(2, rng)};
    auto batch = net.prepare_batch(ws);
    auto pred = net.forward(batch);
    for (double v : pred.value().v) CHECK(v == 0.0);
  }
}

TEST_CASE("forward is a pure function of parameters and input") {
  Rng rng(5);
  for (Family f : {Family::kMlp, Family::kCnn, Family::kLstm}) {
    Network net(spec_for(f, 3), 11);
    std::vector<SupervisedWindow> ws;
    for (int i = 0; i < 4; ++i) ws.push_back(random_window(3, rng));
    auto batch = net.prepare_batch(ws);
    auto a = net.forward(batch).value();
    auto b = net.forward(batch).value();
    CHECK(a.v == b.v);

    Network net2(spec_for(f, 3), 11);  // same seed -> same init
    auto c = net2.forward(net2.prepare_batch(ws)).value();
    CHECK(a.v == c.v);
  }
}

TEST_CASE("cnn receptive field is exactly {t, t-7}") {
  const int stations = 2, T = 21, K = 2, dil = 7;
  Rng rng(9);
  Tensor lookback = Tensor::zeros({1, stations * T});
  for (double& v : lookback.v) v = rng.uniform(0, 1);

  Tensor weights = Tensor::zeros({stations * K, 5});
  for (double& v : weights.v) v = rng.uniform(-1, 1);

  auto conv_out = [&](const Tensor& lb) {
    using namespace autodiff;
    Tensor cols = conv_im2col(lb, stations, T, K, dil);
    Var out = matmul(Var::constant(cols), Var::constant(weights));
    return out.value();  // [(1*T), 5]
  };

  const Tensor base = conv_out(lookback);
  for (int day = 0; day < T; ++day) {
    for (int s = 0; s < stations; ++s) {
      Tensor bumped = lookback;
      bumped.v[s * T + day] += 0.5;
      const Tensor out = conv_out(bumped);
      for (int t = 0; t < T; ++t) {
        bool changed = false;
        for (int fcol = 0; fcol < 5; ++fcol) {
          if (out.at(t, fcol) != base.at(t, fcol)) changed = true;
        }
        const bool in_field = (t == day) || (t == day + dil);
        CHECK(changed == in_field);
      }
    }
  }
}

TEST_CASE("lstm final state is identical across repeated runs from reset") {
  Rng rng(13);
  Network net(spec_for(Family::kLstm, 2), 17);
  std::vector<SupervisedWindow> ws = {random_window(2, rng),
                                      random_window(2, rng)};
  auto batch = net.prepare_batch(ws);
  auto h1 = net.lstm_final_hidden(batch);
  auto h2 = net.lstm_final_hidden(batch);
  CHECK(h1.v == h2.v);
  CHECK(h1.shape == std::vector<int>{2, 32});
}

TEST_CASE("checkpoint save/load restores parameters bit-exactly") {
  Rng rng(15);
  for (Family f : {Family::kMlp, Family::kCnn, Family::kLstm}) {
    Network net(spec_for(f, 2), 99);
    std::ostringstream out;
    net.save(out);

    Network other(spec_for(f, 2), 100);  // different init
    CHECK(other.param_checksum() != net.param_checksum());
    std::istringstream in(out.str());
    other.load(in);
    CHECK(other.param_checksum() == net.param_checksum());

    std::vector<SupervisedWindow> ws = {random_window(2, rng)};
    auto pa = net.forward(net.prepare_batch(ws)).value();
    auto pb = other.forward(other.prepare_batch(ws)).value();
    CHECK(pa.v == pb.v);
  }
}

TEST_CASE("checkpoint with mismatched spec is rejected") {
  Network a(spec_for(Family::kMlp, 2), 1);
  Network b(spec_for(Family::kMlp, 3), 1);
  std::ostringstream out;
  a.save(out);
  std::istringstream in(out.str());
  CHECK_THROWS_AS(b.load(in), ModelError);
}

TEST_CASE("window width mismatches are named") {
  Rng rng(17);
  Network net(spec_for(Family::kMlp, 2), 1);
  std::vector<SupervisedWindow> ws = {random_window(3, rng)};
  CHECK_THROWS_WITH_AS(net.prepare_batch(ws), doctest::Contains("mlp"),
                       ModelError);
}
