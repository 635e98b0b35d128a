#include "spar/layers.hpp"

#include <cmath>

#include "spar/error.hpp"

namespace spar::nets {

using kernels::Conv2dDims;

namespace {

std::int64_t pixels_of(const Tensor& t) {
    return t.size() / t.dim(t.ndim() - 1);
}

void accumulate(Tensor& grad, const Tensor& fresh) {
    kernels::add_scaled(grad.size(), 1.0f, fresh.data(), grad.data());
}

} // namespace

// ---------------------------------------------------------------- Conv2d

Conv2d::Conv2d(std::string name, int cin, int cout, int k, int stride, int pad)
    : name_(std::move(name)), cin_(cin), cout_(cout), k_(k), stride_(stride), pad_(pad),
      w_({k, k, cin, cout}), b_({cout}), gw_({k, k, cin, cout}), gb_({cout}) {}

void Conv2d::init(Rng& rng) {
    const double std = std::sqrt(2.0 / (static_cast<double>(k_) * k_ * cin_));
    for (std::int64_t i = 0; i < w_.size(); ++i) w_[i] = static_cast<float>(std * rng.normal());
    b_.fill(0.0f);
}

Tensor Conv2d::forward(const Tensor& x) {
    require(x.ndim() == 4 && x.dim(3) == cin_, "conv " + name_ + ": input channel mismatch");
    x_ = x;
    Conv2dDims d{x.dim(0), x.dim(1), x.dim(2), cin_, cout_, k_, k_, stride_, pad_};
    Tensor y({d.n, d.out_h(), d.out_w(), cout_});
    kernels::conv2d_forward(d, x.data(), w_.data(), b_.data(), y.data());
    return y;
}

Tensor Conv2d::backward(const Tensor& dy) {
    Conv2dDims d{x_.dim(0), x_.dim(1), x_.dim(2), cin_, cout_, k_, k_, stride_, pad_};
    Tensor dw({k_, k_, cin_, cout_}), db({cout_});
    kernels::conv2d_backward_filter(d, x_.data(), dy.data(), dw.data(), db.data());
    accumulate(gw_, dw);
    accumulate(gb_, db);
    Tensor dx({d.n, d.in_h, d.in_w, cin_});
    kernels::conv2d_backward_data(d, dy.data(), w_.data(), dx.data());
    return dx;
}

void Conv2d::collect(std::vector<ParamRef>& out) {
    out.push_back({name_ + ".w", &w_, &gw_, true});
    out.push_back({name_ + ".b", &b_, &gb_, true});
}

// ------------------------------------------------------- ConvTranspose2x2

ConvTranspose2x2::ConvTranspose2x2(std::string name, int cin, int cout)
    : name_(std::move(name)), cin_(cin), cout_(cout),
      w_({2, 2, cin, cout}), b_({cout}), gw_({2, 2, cin, cout}), gb_({cout}) {}

void ConvTranspose2x2::init(Rng& rng) {
    // Each output position sees exactly cin inputs.
    const double std = std::sqrt(2.0 / static_cast<double>(cin_));
    for (std::int64_t i = 0; i < w_.size(); ++i) w_[i] = static_cast<float>(std * rng.normal());
    b_.fill(0.0f);
}

Tensor ConvTranspose2x2::forward(const Tensor& x) {
    require(x.ndim() == 4 && x.dim(3) == cin_, "convT " + name_ + ": input channel mismatch");
    x_ = x;
    Tensor y({x.dim(0), 2 * x.dim(1), 2 * x.dim(2), cout_});
    kernels::convt2x2_forward(x.dim(0), x.dim(1), x.dim(2), cin_, cout_, x.data(), w_.data(), b_.data(), y.data());
    return y;
}

Tensor ConvTranspose2x2::backward(const Tensor& dy) {
    Tensor dw({2, 2, cin_, cout_}), db({cout_});
    kernels::convt2x2_backward_filter(x_.dim(0), x_.dim(1), x_.dim(2), cin_, cout_, x_.data(), dy.data(),
                                      dw.data(), db.data());
    accumulate(gw_, dw);
    accumulate(gb_, db);
    Tensor dx({x_.dim(0), x_.dim(1), x_.dim(2), cin_});
    kernels::convt2x2_backward_data(x_.dim(0), x_.dim(1), x_.dim(2), cin_, cout_, dy.data(), w_.data(), dx.data());
    return dx;
}

void ConvTranspose2x2::collect(std::vector<ParamRef>& out) {
    out.push_back({name_ + ".w", &w_, &gw_, true});
    out.push_back({name_ + ".b", &b_, &gb_, true});
}

// ------------------------------------------------------------- BatchNorm

BatchNorm::BatchNorm(std::string name, int c)
    : name_(std::move(name)), c_(c), gamma_({c}), beta_({c}), g_gamma_({c}), g_beta_({c}),
      running_mean_({c}), running_var_({c}) {
    gamma_.fill(1.0f);
    running_var_.fill(1.0f);
}

Tensor BatchNorm::forward(const Tensor& x, Mode m) {
    require(x.dim(x.ndim() - 1) == c_, "batchnorm " + name_ + ": channel mismatch");
    fwd_mode_ = m;
    n_ = x.dim(0);
    hw_ = pixels_of(x) / n_;

    std::vector<float> mean_f(static_cast<size_t>(c_)), inv_std(static_cast<size_t>(c_));
    if (m == Mode::Eval) {
        for (int c = 0; c < c_; ++c) {
            mean_f[static_cast<size_t>(c)] = running_mean_[c];
            inv_std[static_cast<size_t>(c)] = 1.0f / std::sqrt(running_var_[c] + eps_);
        }
    } else {
        std::vector<double> mean(static_cast<size_t>(c_)), var(static_cast<size_t>(c_));
        kernels::moments_per_channel(n_, static_cast<int>(hw_), c_, x.data(), mean.data(), var.data());
        for (int c = 0; c < c_; ++c) {
            mean_f[static_cast<size_t>(c)] = static_cast<float>(mean[static_cast<size_t>(c)]);
            inv_std[static_cast<size_t>(c)] =
                static_cast<float>(1.0 / std::sqrt(var[static_cast<size_t>(c)] + eps_));
        }
        if (m == Mode::Train) {
            for (int c = 0; c < c_; ++c) {
                running_mean_[c] = momentum_ * running_mean_[c] +
                                   (1.0f - momentum_) * static_cast<float>(mean[static_cast<size_t>(c)]);
                running_var_[c] = momentum_ * running_var_[c] +
                                  (1.0f - momentum_) * static_cast<float>(var[static_cast<size_t>(c)]);
            }
        }
    }

    xhat_ = Tensor(x.shape());
    Tensor y(x.shape());
    kernels::bn_normalize(pixels_of(x), c_, x.data(), mean_f.data(), inv_std.data(), gamma_.data(),
                          beta_.data(), xhat_.data(), y.data());
    inv_std_ = std::move(inv_std);
    return y;
}

Tensor BatchNorm::backward(const Tensor& dy) {
    Tensor dg({c_}), db({c_});
    Tensor dx(dy.shape());
    if (fwd_mode_ == Mode::Eval) {
        kernels::bn_backward_fixed(n_, static_cast<int>(hw_), c_, dy.data(), xhat_.data(), inv_std_.data(),
                                   gamma_.data(), dg.data(), db.data(), dx.data());
    } else {
        kernels::bn_backward_batch(n_, static_cast<int>(hw_), c_, dy.data(), xhat_.data(), inv_std_.data(),
                                   gamma_.data(), dg.data(), db.data(), dx.data());
    }
    accumulate(g_gamma_, dg);
    accumulate(g_beta_, db);
    return dx;
}

void BatchNorm::collect(std::vector<ParamRef>& out) {
    out.push_back({name_ + ".gamma", &gamma_, &g_gamma_, true});
    out.push_back({name_ + ".beta", &beta_, &g_beta_, true});
    out.push_back({name_ + ".running_mean", &running_mean_, nullptr, false});
    out.push_back({name_ + ".running_var", &running_var_, nullptr, false});
}

// ------------------------------------------------------------ activations

Tensor ReLU::forward(const Tensor& x) {
    y_ = Tensor(x.shape());
    kernels::relu_forward(x.size(), x.data(), y_.data());
    return y_;
}

Tensor ReLU::backward(const Tensor& dy) const {
    Tensor dx(dy.shape());
    kernels::relu_backward(dy.size(), y_.data(), dy.data(), dx.data());
    return dx;
}

Tensor LeakyReLU::forward(const Tensor& x) {
    y_ = Tensor(x.shape());
    kernels::leaky_relu_forward(x.size(), slope_, x.data(), y_.data());
    return y_;
}

Tensor LeakyReLU::backward(const Tensor& dy) const {
    Tensor dx(dy.shape());
    kernels::leaky_relu_backward(dy.size(), slope_, y_.data(), dy.data(), dx.data());
    return dx;
}

Tensor MaxPool2x2::forward(const Tensor& x) {
    n_ = x.dim(0);
    h_ = x.dim(1);
    w_ = x.dim(2);
    c_ = x.dim(3);
    require(h_ % 2 == 0 && w_ % 2 == 0 && h_ >= 2 && w_ >= 2,
            "maxpool: spatial size too small or odd for 2x2 pooling");
    Tensor y({n_, h_ / 2, w_ / 2, c_});
    arg_.assign(static_cast<size_t>(y.size()), 0);
    kernels::maxpool2x2_forward(n_, h_, w_, c_, x.data(), y.data(), arg_.data());
    return y;
}

Tensor MaxPool2x2::backward(const Tensor& dy) const {
    Tensor dx({n_, h_, w_, c_});
    kernels::maxpool2x2_backward(n_, h_, w_, c_, dy.data(), arg_.data(), dx.data());
    return dx;
}

Tensor SoftmaxChannels::forward(const Tensor& x) {
    y_ = Tensor(x.shape());
    kernels::softmax_channels_forward(pixels_of(x), x.dim(x.ndim() - 1), x.data(), y_.data());
    return y_;
}

Tensor SoftmaxChannels::backward(const Tensor& dy) const {
    Tensor dx(dy.shape());
    kernels::softmax_channels_backward(pixels_of(dy), dy.dim(dy.ndim() - 1), y_.data(), dy.data(), dx.data());
    return dx;
}

Tensor Sigmoid::forward(const Tensor& x) {
    y_ = Tensor(x.shape());
    kernels::sigmoid_forward(x.size(), x.data(), y_.data());
    return y_;
}

Tensor Sigmoid::backward(const Tensor& dy) const {
    Tensor dx(dy.shape());
    kernels::sigmoid_backward(dy.size(), y_.data(), dy.data(), dx.data());
    return dx;
}

Tensor GlobalAvgPool::forward(const Tensor& x) {
    n_ = x.dim(0);
    h_ = x.dim(1);
    w_ = x.dim(2);
    c_ = x.dim(3);
    Tensor y({n_, c_});
    kernels::global_avg_pool_forward(n_, h_ * w_, c_, x.data(), y.data());
    return y;
}

Tensor GlobalAvgPool::backward(const Tensor& dy) const {
    Tensor dx({n_, h_, w_, c_});
    kernels::global_avg_pool_backward(n_, h_ * w_, c_, dy.data(), dx.data());
    return dx;
}

// -------------------------------------------------------------- ConvBlock

ConvBlock::ConvBlock(const std::string& name, int cin, int cout, int k, int stride, int pad)
    : conv_(name + ".conv", cin, cout, k, stride, pad), bn_(name + ".bn", cout) {}

void ConvBlock::init(Rng& rng) {
    conv_.init(rng);
}

Tensor ConvBlock::forward(const Tensor& x, Mode m) {
    return act_.forward(bn_.forward(conv_.forward(x), m));
}

Tensor ConvBlock::backward(const Tensor& dy) {
    return conv_.backward(bn_.backward(act_.backward(dy)));
}

void ConvBlock::collect(std::vector<ParamRef>& out) {
    conv_.collect(out);
    bn_.collect(out);
}

} // namespace spar::nets
