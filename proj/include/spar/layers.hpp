#pragma once

#include <string>
#include <vector>

#include "spar/kernels.hpp"
#include "spar/rng.hpp"
#include "spar/tensor.hpp"

namespace spar::nets {

// Normalization behavior of a forward pass.
//  Train:  batch statistics, running averages updated.
//  Frozen: batch statistics, running averages untouched (used for the
//          discriminator pass inside the segmenter step).
//  Eval:   running statistics.
enum class Mode { Train, Frozen, Eval };

struct ParamRef {
    std::string name;
    Tensor* value = nullptr;
    Tensor* grad = nullptr;  // null for non-trainable state (running stats)
    bool trainable = true;
};

// Layers cache whatever their backward pass needs; backward accumulates into
// the parameter gradients and returns the input gradient.

class Conv2d {
public:
    Conv2d(std::string name, int cin, int cout, int k, int stride, int pad);
    void init(Rng& rng);
    Tensor forward(const Tensor& x);
    Tensor backward(const Tensor& dy);
    void collect(std::vector<ParamRef>& out);
    int out_channels() const { return cout_; }

private:
    std::string name_;
    int cin_, cout_, k_, stride_, pad_;
    Tensor w_, b_, gw_, gb_;
    Tensor x_;
};

class ConvTranspose2x2 {
public:
    ConvTranspose2x2(std::string name, int cin, int cout);
    void init(Rng& rng);
    Tensor forward(const Tensor& x);
    Tensor backward(const Tensor& dy);
    void collect(std::vector<ParamRef>& out);

private:
    std::string name_;
    int cin_, cout_;
    Tensor w_, b_, gw_, gb_;
    Tensor x_;
};

class BatchNorm {
public:
    BatchNorm(std::string name, int c);
    Tensor forward(const Tensor& x, Mode m);
    Tensor backward(const Tensor& dy);
    void collect(std::vector<ParamRef>& out);

private:
    std::string name_;
    int c_;
    float momentum_ = 0.99f;
    float eps_ = 1e-5f;
    Tensor gamma_, beta_, g_gamma_, g_beta_;
    Tensor running_mean_, running_var_;
    Tensor xhat_;
    std::vector<float> inv_std_;
    Mode fwd_mode_ = Mode::Train;
    int n_ = 0;
    std::int64_t hw_ = 0;
};

class ReLU {
public:
    Tensor forward(const Tensor& x);
    Tensor backward(const Tensor& dy) const;

private:
    Tensor y_;
};

class LeakyReLU {
public:
    explicit LeakyReLU(float slope) : slope_(slope) {}
    Tensor forward(const Tensor& x);
    Tensor backward(const Tensor& dy) const;

private:
    float slope_;
    Tensor y_;
};

class MaxPool2x2 {
public:
    Tensor forward(const Tensor& x);
    Tensor backward(const Tensor& dy) const;

private:
    std::vector<std::uint8_t> arg_;
    int n_ = 0, h_ = 0, w_ = 0, c_ = 0;
};

// Softmax over the trailing (channel) dimension.
class SoftmaxChannels {
public:
    Tensor forward(const Tensor& x);
    Tensor backward(const Tensor& dy) const;

private:
    Tensor y_;
};

class Sigmoid {
public:
    Tensor forward(const Tensor& x);
    Tensor backward(const Tensor& dy) const;

private:
    Tensor y_;
};

class GlobalAvgPool {
public:
    Tensor forward(const Tensor& x);   // (n,h,w,c) -> (n,c)
    Tensor backward(const Tensor& dy) const;

private:
    int n_ = 0, h_ = 0, w_ = 0, c_ = 0;
};

// conv -> BN -> ReLU
class ConvBlock {
public:
    ConvBlock(const std::string& name, int cin, int cout, int k = 3, int stride = 1, int pad = 1);
    void init(Rng& rng);
    Tensor forward(const Tensor& x, Mode m);
    Tensor backward(const Tensor& dy);
    void collect(std::vector<ParamRef>& out);

private:
    Conv2d conv_;
    BatchNorm bn_;
    ReLU act_;
};

} // namespace spar::nets
