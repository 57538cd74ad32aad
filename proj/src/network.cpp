#include "ridebench/network.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "ridebench/checksum.hpp"
#include "ridebench/errors.hpp"
#include "ridebench/rng.hpp"

namespace ridebench {

using autodiff::Var;

std::string family_name(Family f) {
  switch (f) {
    case Family::kMlp: return "mlp";
    case Family::kCnn: return "cnn";
    case Family::kLstm: return "lstm";
  }
  return "?";
}

Family family_from_name(const std::string& name) {
  if (name == "mlp") return Family::kMlp;
  if (name == "cnn") return Family::kCnn;
  if (name == "lstm") return Family::kLstm;
  throw ConfigError("unknown model family: '" + name + "'");
}

void NetworkSpec::validate() const {
  if (stations_in <= 0 || stations_out <= 0 || lookback <= 0 || horizon <= 0 ||
      feature_width < 0) {
    throw ModelError("network spec: sizes must be positive");
  }
  if (family == Family::kCnn &&
      (cnn_filters <= 0 || cnn_kernel <= 0 || cnn_dilation <= 0)) {
    throw ModelError("network spec: conv sizes must be positive");
  }
  if (family == Family::kLstm && lstm_units <= 0) {
    throw ModelError("network spec: lstm units must be positive");
  }
}

long NetworkSpec::expected_param_count() const {
  const long I = input_width();
  const long O = output_width();
  switch (family) {
    case Family::kMlp: {
      const long H = mlp_hidden();
      return I * H + H + H * O + O;
    }
    case Family::kCnn: {
      const long C = stations_in;
      const long F = cnn_filters;
      const long head_in = static_cast<long>(lookback) * F + feature_width;
      return C * cnn_kernel * F + F + head_in * O + O;
    }
    case Family::kLstm: {
      const long S = stations_in;
      const long H = lstm_units;
      const long head_in = H + feature_width;
      return S * 4 * H + H * 4 * H + 4 * H + head_in * O + O;
    }
  }
  return 0;
}

namespace {

Var init_weight(int rows, int cols, Rng& rng) {
  Tensor t = Tensor::zeros({rows, cols});
  const double bound = 1.0 / std::sqrt(static_cast<double>(rows));
  for (double& x : t.v) x = rng.uniform(-bound, bound);
  return Var::parameter(std::move(t));
}

Var init_bias(int cols) {
  return Var::parameter(Tensor::zeros({1, cols}));
}

}  // namespace

Network::Network(const NetworkSpec& spec, std::uint64_t seed) : spec_(spec) {
  spec_.validate();
  Rng rng(seed);
  const int I = spec_.input_width();
  const int O = spec_.output_width();
  switch (spec_.family) {
    case Family::kMlp: {
      const int H = spec_.mlp_hidden();
      params_.push_back(init_weight(I, H, rng));
      params_.push_back(init_bias(H));
      params_.push_back(init_weight(H, O, rng));
      params_.push_back(init_bias(O));
      break;
    }
    case Family::kCnn: {
      const int F = spec_.cnn_filters;
      const int CK = spec_.stations_in * spec_.cnn_kernel;
      const int head_in = spec_.lookback * F + spec_.feature_width;
      params_.push_back(init_weight(CK, F, rng));
      params_.push_back(init_bias(F));
      params_.push_back(init_weight(head_in, O, rng));
      params_.push_back(init_bias(O));
      break;
    }
    case Family::kLstm: {
      const int S = spec_.stations_in;
      const int H = spec_.lstm_units;
      const int head_in = H + spec_.feature_width;
      params_.push_back(init_weight(S, 4 * H, rng));   // input projection
      params_.push_back(init_weight(H, 4 * H, rng));   // recurrent
      params_.push_back(init_bias(4 * H));
      params_.push_back(init_weight(head_in, O, rng));
      params_.push_back(init_bias(O));
      break;
    }
  }
}

long Network::param_count() const {
  long n = 0;
  for (const auto& p : params_) n += p.value().size();
  return n;
}

Tensor conv_im2col(const Tensor& lookback, int stations, int time, int kernel,
                   int dilation) {
  const int B = lookback.rows();
  if (lookback.cols() != stations * time) {
    throw ModelError("conv_im2col: lookback width mismatch");
  }
  Tensor out = Tensor::zeros({B * time, stations * kernel});
  for (int b = 0; b < B; ++b) {
    for (int t = 0; t < time; ++t) {
      for (int c = 0; c < stations; ++c) {
        for (int k = 0; k < kernel; ++k) {
          const int src = t - (kernel - 1 - k) * dilation;
          if (src < 0) continue;  // causal left padding
          out.at(b * time + t, c * kernel + k) = lookback.at(b, c * time + src);
        }
      }
    }
  }
  return out;
}

Batch Network::prepare_batch(std::span<const SupervisedWindow> windows) const {
  std::vector<int> idx(windows.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
  return prepare_batch(windows, idx);
}

Batch Network::prepare_batch(std::span<const SupervisedWindow> windows,
                             std::span<const int> indices) const {
  const int B = static_cast<int>(indices.size());
  if (B == 0) throw ModelError("prepare_batch: empty batch");
  const int S = spec_.stations_in;
  const int T = spec_.lookback;
  const int FW = spec_.feature_width;
  const int O = spec_.output_width();

  Batch batch;
  batch.size = B;
  batch.features = Tensor::zeros({B, FW});
  Tensor lookback = Tensor::zeros({B, S * T});
  batch.has_target = !windows[indices[0]].target.empty();
  if (batch.has_target) batch.target = Tensor::zeros({B, O});

  for (int b = 0; b < B; ++b) {
    const auto& w = windows[indices[b]];
    if (static_cast<int>(w.lookback.size()) != S * T ||
        static_cast<int>(w.features.size()) != FW) {
      throw ModelError("prepare_batch: window width mismatch for " +
                       family_name(spec_.family));
    }
    std::memcpy(&lookback.at(b, 0), w.lookback.data(),
                sizeof(double) * w.lookback.size());
    std::memcpy(&batch.features.at(b, 0), w.features.data(),
                sizeof(double) * w.features.size());
    if (batch.has_target) {
      if (static_cast<int>(w.target.size()) != O) {
        throw ModelError("prepare_batch: target width mismatch");
      }
      std::memcpy(&batch.target.at(b, 0), w.target.data(),
                  sizeof(double) * w.target.size());
    }
  }

  switch (spec_.family) {
    case Family::kMlp: {
      batch.input = Tensor::zeros({B, S * T + FW});
      for (int b = 0; b < B; ++b) {
        std::memcpy(&batch.input.at(b, 0), &lookback.at(b, 0),
                    sizeof(double) * S * T);
        std::memcpy(&batch.input.at(b, S * T), &batch.features.at(b, 0),
                    sizeof(double) * FW);
      }
      break;
    }
    case Family::kCnn:
      batch.input =
          conv_im2col(lookback, S, T, spec_.cnn_kernel, spec_.cnn_dilation);
      break;
    case Family::kLstm: {
      // Step-major stacking: rows [t*B, (t+1)*B) hold step t of each window.
      batch.input = Tensor::zeros({T * B, S});
      for (int b = 0; b < B; ++b) {
        for (int t = 0; t < T; ++t) {
          for (int s = 0; s < S; ++s) {
            batch.input.at(t * B + b, s) = lookback.at(b, s * T + t);
          }
        }
      }
      break;
    }
  }
  return batch;
}

Var Network::lstm_walk(const Batch& batch) {
  using namespace autodiff;
  const int B = batch.size;
  const int H = spec_.lstm_units;
  const int T = spec_.lookback;

  Var x_all = Var::constant(batch.input);
  Var xw = matmul(x_all, params_[0]);  // [(T*B), 4H], one fused projection

  Var h = Var::constant(Tensor::zeros({B, H}));
  Var c = Var::constant(Tensor::zeros({B, H}));
  for (int t = 0; t < T; ++t) {
    Var z = add_bias(add(slice_rows(xw, t * B, B), matmul(h, params_[1])),
                     params_[2]);
    Var i_gate = sigmoid(slice_cols(z, 0, H));
    Var f_gate = sigmoid(slice_cols(z, H, H));
    Var g_gate = autodiff::tanh(slice_cols(z, 2 * H, H));
    Var o_gate = sigmoid(slice_cols(z, 3 * H, H));
    c = add(mul(f_gate, c), mul(i_gate, g_gate));
    h = mul(o_gate, autodiff::tanh(c));
  }
  return h;
}

Var Network::forward(const Batch& batch) {
  using namespace autodiff;
  switch (spec_.family) {
    case Family::kMlp: {
      Var x = Var::constant(batch.input);
      Var hidden = relu(add_bias(matmul(x, params_[0]), params_[1]));
      return add_bias(matmul(hidden, params_[2]), params_[3]);
    }
    case Family::kCnn: {
      Var cols = Var::constant(batch.input);
      Var fmap = relu(add_bias(matmul(cols, params_[0]), params_[1]));
      Var flat = regroup_rows(fmap, batch.size, spec_.lookback);
      Var x = concat_cols(flat, Var::constant(batch.features));
      return add_bias(matmul(x, params_[2]), params_[3]);
    }
    case Family::kLstm: {
      Var h = lstm_walk(batch);
      Var x = concat_cols(h, Var::constant(batch.features));
      return add_bias(matmul(x, params_[3]), params_[4]);
    }
  }
  throw ModelError("forward: unknown family");
}

Tensor Network::lstm_final_hidden(const Batch& batch) {
  if (spec_.family != Family::kLstm) {
    throw ModelError("lstm_final_hidden: not an LSTM network");
  }
  return lstm_walk(batch).value();
}

std::uint64_t Network::param_checksum() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& p : params_) h = fnv1a64(p.value().v, h);
  return h;
}

namespace {
constexpr char kMagic[8] = {'R', 'B', 'N', 'E', 'T', '0', '0', '1'};

void put_i32(std::ostream& out, std::int32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = (static_cast<std::uint32_t>(v) >> (8 * i)) & 0xff;
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::int32_t get_i32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return static_cast<std::int32_t>(v);
}

void put_f64(std::ostream& out, double x) {
  std::uint64_t bits;
  std::memcpy(&bits, &x, 8);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = (bits >> (8 * i)) & 0xff;
  out.write(reinterpret_cast<const char*>(b), 8);
}

double get_f64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  double x;
  std::memcpy(&x, &bits, 8);
  return x;
}
}  // namespace

void Network::save(std::ostream& out) const {
  out.write(kMagic, 8);
  put_i32(out, static_cast<std::int32_t>(spec_.family));
  put_i32(out, spec_.stations_in);
  put_i32(out, spec_.stations_out);
  put_i32(out, spec_.lookback);
  put_i32(out, spec_.horizon);
  put_i32(out, spec_.feature_width);
  put_i32(out, static_cast<std::int32_t>(params_.size()));
  for (const auto& p : params_) {
    const auto& t = p.value();
    put_i32(out, static_cast<std::int32_t>(t.shape.size()));
    for (int s : t.shape) put_i32(out, s);
    for (double x : t.v) put_f64(out, x);
  }
}

void Network::load(std::istream& in) {
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0) {
    throw ModelError("checkpoint: bad magic");
  }
  if (get_i32(in) != static_cast<std::int32_t>(spec_.family) ||
      get_i32(in) != spec_.stations_in || get_i32(in) != spec_.stations_out ||
      get_i32(in) != spec_.lookback || get_i32(in) != spec_.horizon ||
      get_i32(in) != spec_.feature_width) {
    throw ModelError("checkpoint: spec mismatch");
  }
  const int np = get_i32(in);
  if (np != static_cast<int>(params_.size())) {
    throw ModelError("checkpoint: parameter count mismatch");
  }
  for (auto& p : params_) {
    const int rank = get_i32(in);
    std::vector<int> shape(rank);
    for (int& s : shape) s = get_i32(in);
    if (shape != p.value().shape) throw ModelError("checkpoint: shape mismatch");
    for (double& x : p.value().v) x = get_f64(in);
  }
  if (!in) throw ModelError("checkpoint: truncated");
}

void Network::save_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint: " + path);
  save(out);
}

void Network::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint: " + path);
  load(in);
}

}  // namespace ridebench
