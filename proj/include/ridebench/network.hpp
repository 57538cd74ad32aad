#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ridebench/autodiff.hpp"
#include "ridebench/windows.hpp"

namespace ridebench {

enum class Family { kMlp, kCnn, kLstm };

std::string family_name(Family f);
Family family_from_name(const std::string& name);

// Architecture sizes. The MLP hidden layer is the rounded mean of the input
// and output widths; the CNN is one causal conv layer (256 filters, kernel 2,
// dilation 7); the LSTM is a single 32-unit layer. Feature width is the
// full 7-day temporal block.
struct NetworkSpec {
  Family family = Family::kMlp;
  int stations_in = 1;
  int stations_out = 1;
  int lookback = kLookbackDays;
  int horizon = kHorizonDays;
  int feature_width = kHorizonDays * kFeaturesPerDay;

  int cnn_filters = 256;
  int cnn_kernel = 2;
  int cnn_dilation = 7;
  int lstm_units = 32;

  int input_width() const { return stations_in * lookback + feature_width; }
  int output_width() const { return stations_out * horizon; }
  int mlp_hidden() const {
    return static_cast<int>(
        std::lround((input_width() + output_width()) / 2.0));
  }
  long expected_param_count() const;
  void validate() const;
};

// Inputs for one mini-batch, laid out per family. Targets may be absent for
// pure inference batches.
struct Batch {
  int size = 0;
  Tensor input;      // MLP: [B, I]; CNN: im2col [(B*T), C*K]; LSTM: [(T*B), S]
  Tensor features;   // [B, feature_width]
  Tensor target;     // [B, O] (empty when forecasting)
  bool has_target = false;
};

// im2col for the causal dilated convolution: row (b*T + t) holds, for each
// channel, the kernel taps [x(t - (K-1)*dil), ..., x(t)], zero-padded on the
// left. The receptive field of output position t is exactly the tap set.
Tensor conv_im2col(const Tensor& lookback, int stations, int time, int kernel,
                   int dilation);

class Network {
public:
  Network(const NetworkSpec& spec, std::uint64_t seed);

  const NetworkSpec& spec() const { return spec_; }
  std::vector<autodiff::Var>& params() { return params_; }
  long param_count() const;

  Batch prepare_batch(std::span<const SupervisedWindow> windows) const;
  Batch prepare_batch(std::span<const SupervisedWindow> windows,
                      std::span<const int> indices) const;

  // Builds the graph and returns predictions [B, output_width]. Pure in
  // (parameters, input): repeated calls give identical values.
  autodiff::Var forward(const Batch& batch);

  // Final LSTM hidden state [B, units]; only valid for the LSTM family.
  Tensor lstm_final_hidden(const Batch& batch);

  std::uint64_t param_checksum() const;

  // Flat binary checkpoint: version header, spec table, then 64-bit
  // little-endian parameter floats. Reload is bit-exact.
  void save(std::ostream& out) const;
  void load(std::istream& in);
  void save_file(const std::string& path) const;
  void load_file(const std::string& path);

private:
  autodiff::Var lstm_walk(const Batch& batch);  // returns final hidden
  NetworkSpec spec_;
  std::vector<autodiff::Var> params_;
};

}  // namespace ridebench
