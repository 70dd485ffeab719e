#pragma once

namespace ballot {

template <typename Scalar>
void BasicElectionNet<Scalar>::declare_parameters() {
  params_ = {};
  for (std::size_t i = 0; i < config_.conv.size(); ++i) {
    const auto& c = config_.conv[i];
    const std::string name = "conv" + std::to_string(i + 1);
    params_.add(name + ".weight", c.filters, c.window * c.in_channels);
    params_.add(name + ".bias", 1, c.filters);
  }
  for (std::size_t i = 0; i < config_.dense.size(); ++i) {
    const auto& d = config_.dense[i];
    const std::string name = "dense" + std::to_string(i + 1);
    params_.add(name + ".weight", d.out_size, d.in_size);
    params_.add(name + ".bias", 1, d.out_size);
  }
}

template <typename Scalar>
BasicElectionNet<Scalar> BasicElectionNet<Scalar>::build(const ElectionNetConfig& config,
                                                         std::uint64_t seed) {
  config.validate();
  BasicElectionNet net;
  net.config_ = config;
  net.declare_parameters();
  nn::Rng rng(seed);
  for (std::size_t i = 0; i < config.conv.size(); ++i) {
    const auto& c = config.conv[i];
    nn::glorot_uniform(net.params_[net.conv_weight(i)], c.window * c.in_channels,
                       c.window * c.filters, rng);
  }
  for (std::size_t i = 0; i < config.dense.size(); ++i) {
    const auto& d = config.dense[i];
    nn::glorot_uniform(net.params_[net.dense_weight(i)], d.in_size, d.out_size, rng);
  }
  return net;
}

template <typename Scalar>
BasicElectionNet<Scalar>::BasicElectionNet(ElectionNetConfig config,
                                           nn::ParameterSet<Scalar> params)
    : config_(std::move(config)) {
  config_.validate();
  declare_parameters();
  if (!params_.same_shape(params))
    throw Error(Errc::shape, "election net: parameter shapes do not match the configuration");
  if (!params.all_finite()) throw Error(Errc::parameter, "election net: non-finite parameters");
  params_ = std::move(params);
}

template <typename Scalar>
void BasicElectionNet<Scalar>::check_input(const CharMatrix& input) const {
  if (input.rows() != config_.input_length || input.cols() != config_.alphabet_size)
    throw Error(Errc::shape, "election net: input " + nn::shape_str(input) + ", expected " +
                                 nn::shape_str(config_.input_length, config_.alphabet_size));
}

template <typename Scalar>
auto BasicElectionNet<Scalar>::conv_stack(const CharMatrix& input,
                                          std::vector<ConvCache>* caches) const -> Matrix {
  check_input(input);
  Matrix x = input.template cast<Scalar>();
  if (caches) caches->resize(config_.conv.size());
  for (std::size_t i = 0; i < config_.conv.size(); ++i) {
    const auto& spec = config_.conv[i];
    const nn::Index w = conv_weight(i);
    Matrix y = nn::conv1d_forward(x, params_[w], params_[w + 1], nn::Activation::relu);
    Matrix next;
    nn::IndexMatrix argmax;
    if (spec.pool) next = nn::maxpool1d(y, *spec.pool, caches ? &argmax : nullptr);
    if (caches) {
      auto& cache = (*caches)[i];
      cache.input = std::move(x);
      cache.argmax = std::move(argmax);
      if (spec.pool) {
        cache.output = std::move(y);
      } else {
        cache.output = y;
      }
    }
    x = spec.pool ? std::move(next) : std::move(y);
  }
  return x;
}

template <typename Scalar>
auto BasicElectionNet<Scalar>::dense_stack(Matrix h, std::vector<DenseCache>* caches,
                                           nn::Rng* dropout_rng) const -> Matrix {
  if (caches) caches->resize(config_.dense.size());
  for (std::size_t i = 0; i < config_.dense.size(); ++i) {
    const auto& spec = config_.dense[i];
    const nn::Index w = dense_weight(i);
    Matrix a = nn::dense_forward(h, params_[w], params_[w + 1], spec.activation);
    Matrix mask;
    if (dropout_rng && spec.dropout_rate > 0.0)
      mask = nn::dropout_mask<Scalar>(a.rows(), a.cols(), spec.dropout_rate, *dropout_rng);
    Matrix out = mask.size() ? Matrix(a.cwiseProduct(mask)) : a;
    if (caches) {
      auto& cache = (*caches)[i];
      cache.input = std::move(h);
      cache.activated = std::move(a);
      cache.mask = std::move(mask);
    }
    h = std::move(out);
  }
  return h;
}

template <typename Scalar>
std::vector<double> BasicElectionNet<Scalar>::forward(std::span<const CharMatrix> inputs) const {
  if (inputs.empty()) return {};
  Matrix flat(static_cast<nn::Index>(inputs.size()), config_.flatten_size());
  for (std::size_t b = 0; b < inputs.size(); ++b)
    flat.row(static_cast<nn::Index>(b)) =
        conv_stack(inputs[b], nullptr).template reshaped<Eigen::RowMajor>().transpose();
  const Matrix out = dense_stack(std::move(flat), nullptr, nullptr);
  std::vector<double> probs(inputs.size());
  for (std::size_t b = 0; b < inputs.size(); ++b)
    probs[b] = static_cast<double>(out(static_cast<nn::Index>(b), 0));
  return probs;
}

template <typename Scalar>
double BasicElectionNet<Scalar>::forward(const CharMatrix& input) const {
  return forward(std::span<const CharMatrix>(&input, 1)).front();
}

template <typename Scalar>
std::vector<std::pair<nn::Index, nn::Index>> BasicElectionNet<Scalar>::trace_shapes(
    const CharMatrix& input) const {
  std::vector<std::pair<nn::Index, nn::Index>> shapes{{input.rows(), input.cols()}};
  std::vector<ConvCache> caches;
  const Matrix last = conv_stack(input, &caches);
  for (std::size_t i = 0; i < caches.size(); ++i) {
    shapes.emplace_back(caches[i].output.rows(), caches[i].output.cols());
    if (config_.conv[i].pool) {
      const nn::Index pooled = i + 1 < caches.size() ? caches[i + 1].input.rows() : last.rows();
      shapes.emplace_back(pooled, caches[i].output.cols());
    }
  }
  Matrix h = last.template reshaped<Eigen::RowMajor>().transpose();
  shapes.emplace_back(h.rows(), h.cols());
  std::vector<DenseCache> dense;
  const Matrix out = dense_stack(std::move(h), &dense, nullptr);
  for (const auto& d : dense) shapes.emplace_back(d.activated.rows(), d.activated.cols());
  (void)out;
  return shapes;
}

template <typename Scalar>
nn::LossAndGradients<Scalar> BasicElectionNet<Scalar>::loss_and_gradients(
    std::span<const CharMatrix> inputs, std::span<const double> targets,
    nn::Rng* dropout_rng) const {
  if (inputs.empty()) throw Error(Errc::empty_input, "election net: empty batch");
  if (inputs.size() != targets.size())
    throw Error(Errc::shape, "election net: " + std::to_string(inputs.size()) + " inputs but " +
                                 std::to_string(targets.size()) + " targets");
  const auto batch = static_cast<nn::Index>(inputs.size());

  std::vector<std::vector<ConvCache>> conv_caches(inputs.size());
  Matrix flat(batch, config_.flatten_size());
  for (nn::Index b = 0; b < batch; ++b) {
    const auto ub = static_cast<std::size_t>(b);
    flat.row(b) =
        conv_stack(inputs[ub], &conv_caches[ub]).template reshaped<Eigen::RowMajor>().transpose();
  }
  std::vector<DenseCache> dense_caches;
  const Matrix out = dense_stack(std::move(flat), &dense_caches, dropout_rng);

  nn::LossAndGradients<Scalar> result{Scalar(0), params_.zeros_like()};
  Matrix grad(batch, 1);
  for (nn::Index b = 0; b < batch; ++b) {
    const Scalar o = out(b, 0);
    const double t = targets[static_cast<std::size_t>(b)];
    result.loss += nn::bce_loss(o, t);
    grad(b, 0) = nn::bce_logit_gradient(o, t) / static_cast<Scalar>(batch);
  }
  result.loss /= static_cast<Scalar>(batch);

  // The sigmoid is folded into the logit gradient above, so the output layer
  // backpropagates as linear.
  auto& grads = result.grads;
  for (std::size_t i = config_.dense.size(); i-- > 0;) {
    const auto& cache = dense_caches[i];
    const nn::Index w = dense_weight(i);
    const bool is_output = i + 1 == config_.dense.size();
    if (cache.mask.size()) grad = grad.cwiseProduct(cache.mask);
    Matrix grad_input;
    nn::dense_backward(cache.input, params_[w], cache.activated, grad,
                       is_output ? nn::Activation::none : config_.dense[i].activation, grads[w],
                       grads[w + 1], &grad_input);
    grad = std::move(grad_input);
  }

  for (nn::Index b = 0; b < batch; ++b) {
    const auto& caches = conv_caches[static_cast<std::size_t>(b)];
    const auto& last = config_.conv.back();
    const nn::Index last_rows =
        caches.back().output.rows() / (last.pool ? *last.pool : nn::Index{1});
    Matrix g = grad.row(b).template reshaped<Eigen::RowMajor>(last_rows, last.filters);
    for (std::size_t i = config_.conv.size(); i-- > 0;) {
      const auto& cache = caches[i];
      const nn::Index w = conv_weight(i);
      if (config_.conv[i].pool) g = nn::maxpool1d_backward(g, cache.argmax, cache.output.rows());
      Matrix grad_input;
      nn::conv1d_backward(cache.input, params_[w], cache.output, g, nn::Activation::relu, grads[w],
                          grads[w + 1], i > 0 ? &grad_input : nullptr);
      g = std::move(grad_input);
    }
  }
  return result;
}

template <typename Scalar>
nn::TrainReport train_election(BasicElectionNet<Scalar>& net, std::span<const CharMatrix> inputs,
                               std::span<const int> labels, const nn::TrainOptions& options) {
  if (inputs.empty()) throw Error(Errc::empty_input, "train_election: empty dataset");
  if (inputs.size() != labels.size())
    throw Error(Errc::shape, "train_election: inputs and labels differ in length");
  std::size_t positives = 0;
  for (int label : labels) {
    if (label != 0 && label != 1)
      throw Error(Errc::parameter, "train_election: labels must be 0 or 1");
    positives += static_cast<std::size_t>(label);
  }
  if (positives == 0 || positives == labels.size())
    warn("train_election: dataset contains a single class");

  return nn::train_minibatch(net.parameters(), inputs.size(), options,
                             [&](const std::vector<std::size_t>& indices, nn::Rng& rng) {
                               std::vector<CharMatrix> batch;
                               std::vector<double> targets;
                               batch.reserve(indices.size());
                               for (std::size_t i : indices) {
                                 batch.push_back(inputs[i]);
                                 targets.push_back(static_cast<double>(labels[i]));
                               }
                               return net.loss_and_gradients(batch, targets, &rng);
                             });
}

}  // namespace ballot
