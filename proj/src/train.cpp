#include "ridebench/train.hpp"

#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>

#include "ridebench/csv.hpp"
#include "ridebench/errors.hpp"

namespace ridebench {

Optimizer::Optimizer(std::vector<autodiff::Var> params, const TrainConfig& cfg)
    : params_(std::move(params)), cfg_(cfg) {
  for (const auto& p : params_) {
    m_.push_back(Tensor::zeros(p.value().shape));
    if (cfg_.optimizer == OptimizerKind::kAdam) {
      v_.push_back(Tensor::zeros(p.value().shape));
    }
  }
}

void Optimizer::step() {
  ++step_count_;
  if (cfg_.optimizer == OptimizerKind::kAdam) {
    const double b1 = cfg_.adam_beta1;
    const double b2 = cfg_.adam_beta2;
    const double corr1 = 1.0 - std::pow(b1, static_cast<double>(step_count_));
    const double corr2 = 1.0 - std::pow(b2, static_cast<double>(step_count_));
    for (std::size_t k = 0; k < params_.size(); ++k) {
      auto& p = params_[k].value().v;
      const auto& g = params_[k].grad().v;
      auto& m = m_[k].v;
      auto& v = v_[k].v;
      for (std::size_t i = 0; i < p.size(); ++i) {
        m[i] = b1 * m[i] + (1.0 - b1) * g[i];
        v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
        const double mhat = m[i] / corr1;
        const double vhat = v[i] / corr2;
        p[i] -= cfg_.learning_rate * mhat / (std::sqrt(vhat) + cfg_.adam_eps);
      }
    }
  } else {
    for (std::size_t k = 0; k < params_.size(); ++k) {
      auto& p = params_[k].value().v;
      const auto& g = params_[k].grad().v;
      auto& m = m_[k].v;
      for (std::size_t i = 0; i < p.size(); ++i) {
        m[i] = cfg_.sgd_momentum * m[i] + g[i];
        p[i] -= cfg_.learning_rate * m[i];
      }
    }
  }
}

namespace {

void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = (v >> (8 * i)) & 0xff;
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

void put_tensor(std::ostream& out, const Tensor& t) {
  put_u64(out, t.v.size());
  for (double x : t.v) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, 8);
    put_u64(out, bits);
  }
}

void get_tensor(std::istream& in, Tensor& t) {
  const std::uint64_t n = get_u64(in);
  if (n != t.v.size()) throw ModelError("optimizer state: size mismatch");
  for (double& x : t.v) {
    const std::uint64_t bits = get_u64(in);
    std::memcpy(&x, &bits, 8);
  }
}

}  // namespace

void Optimizer::serialize(std::ostream& out) const {
  put_u64(out, static_cast<std::uint64_t>(step_count_));
  for (const auto& t : m_) put_tensor(out, t);
  for (const auto& t : v_) put_tensor(out, t);
}

void Optimizer::deserialize(std::istream& in) {
  step_count_ = static_cast<long>(get_u64(in));
  for (auto& t : m_) get_tensor(in, t);
  for (auto& t : v_) get_tensor(in, t);
  if (!in) throw ModelError("optimizer state: truncated");
}

Trainer::Trainer(Network& net, const TrainConfig& cfg)
    : net_(net),
      cfg_(cfg),
      opt_(net.params(), cfg),
      shuffle_rng_(splitmix64(cfg.seed ^ 0x7261696e65722aULL)) {}

TrainTrace Trainer::run(std::span<const SupervisedWindow> windows, int epochs) {
  if (windows.empty()) throw ModelError("train: no windows");
  TrainTrace trace;
  std::vector<int> order(windows.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);

  for (int epoch = 0; epoch < epochs; ++epoch) {
    shuffle_rng_.shuffle(order);
    double loss_sum = 0.0;
    int n_batches = 0;
    for (std::size_t at = 0; at < order.size(); at += cfg_.batch_size) {
      const std::size_t len =
          std::min<std::size_t>(cfg_.batch_size, order.size() - at);
      Batch batch = net_.prepare_batch(
          windows, std::span<const int>(order.data() + at, len));
      autodiff::zero_grad(net_.params());
      autodiff::Var pred = net_.forward(batch);
      autodiff::Var loss = autodiff::mse_loss(pred, batch.target);
      const double l = loss.value().v[0];
      if (!std::isfinite(l)) {
        throw ModelError("train: non-finite loss at epoch " +
                         std::to_string(epoch) + " (learning rate " +
                         format_double(cfg_.learning_rate) + ")");
      }
      autodiff::backward(loss);
      opt_.step();
      loss_sum += l;
      ++n_batches;
    }
    trace.epoch_loss.push_back(loss_sum / n_batches);
  }
  return trace;
}

void Trainer::serialize(std::ostream& out) const {
  opt_.serialize(out);
  std::ostringstream rng_state;
  rng_state << const_cast<Rng&>(shuffle_rng_).engine();
  const std::string s = rng_state.str();
  put_u64(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void Trainer::deserialize(std::istream& in) {
  opt_.deserialize(in);
  const std::uint64_t n = get_u64(in);
  std::string s(n, '\0');
  in.read(s.data(), static_cast<std::streamsize>(n));
  std::istringstream rng_state(s);
  rng_state >> shuffle_rng_.engine();
  if (!in || !rng_state) throw ModelError("trainer state: truncated");
}

TrainTrace train(Network& net, std::span<const SupervisedWindow> windows,
                 const TrainConfig& cfg) {
  Trainer trainer(net, cfg);
  return trainer.run(windows, cfg.epochs);
}

TrainTrace fine_tune(Network& net, std::span<const SupervisedWindow> recent,
                     const TrainConfig& cfg_online) {
  if (cfg_online.epochs == 0) return {};  // explicit no-op
  Trainer trainer(net, cfg_online);
  return trainer.run(recent, cfg_online.epochs);
}

}  // namespace ridebench
