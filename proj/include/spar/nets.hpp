#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spar/layers.hpp"

namespace spar::nets {

struct NetConfig {
    int input_size = 64;
    int num_classes = 4;
    int unet_levels = 4;
    int base_channels = 32;
    std::vector<int> ae_channels = {32, 64, 128, 256, 512};
    int disc_blocks = 3;

    void validate() const;
    int code_hw() const { return input_size >> (static_cast<int>(ae_channels.size()) - 1); }
    int code_channels() const { return ae_channels.back(); }
};

// Segmentation network: convolutional encoder-decoder with skip connections
// and a per-pixel softmax head.
class UNet {
public:
    UNet(const NetConfig& cfg, std::uint64_t init_seed);
    // (n, s, s, 1) grayscale -> (n, s, s, C) class probabilities.
    Tensor forward(const Tensor& x, Mode m);
    Tensor backward(const Tensor& dprob);
    std::vector<ParamRef> params();
    void zero_grad();
    const NetConfig& config() const { return cfg_; }

private:
    NetConfig cfg_;
    std::vector<ConvBlock> enc_a_, enc_b_;
    std::vector<MaxPool2x2> pools_;
    ConvBlock bott_a_, bott_b_;
    std::vector<ConvTranspose2x2> ups_;
    std::vector<ConvBlock> dec_a_, dec_b_;
    Conv2d head_;
    SoftmaxChannels softmax_;
    std::vector<Tensor> skips_;
};

// Shape encoder F: the UNet contraction path without skips; the bottleneck
// activation is the latent shape code (post-ReLU, spatial side input/2^P,
// ae_channels.back() channels).
class ShapeEncoder {
public:
    ShapeEncoder(const NetConfig& cfg, std::uint64_t init_seed);
    // (n, s, s, C) mask probabilities -> (n, s/2^P, s/2^P, ae.back()) code.
    Tensor forward(const Tensor& masks, Mode m);
    Tensor backward(const Tensor& dcode);
    std::vector<ParamRef> params();
    void zero_grad();
    const NetConfig& config() const { return cfg_; }

private:
    NetConfig cfg_;
    std::vector<ConvBlock> lvl_a_, lvl_b_;
    std::vector<MaxPool2x2> pools_;
    ConvBlock bott_a_, bott_b_;
};

// Shape decoder G: mirrors the encoder without skip paths, softmax head.
class ShapeDecoder {
public:
    ShapeDecoder(const NetConfig& cfg, std::uint64_t init_seed);
    Tensor forward(const Tensor& code, Mode m);
    Tensor backward(const Tensor& dprob);
    std::vector<ParamRef> params();
    void zero_grad();

private:
    NetConfig cfg_;
    std::vector<ConvTranspose2x2> ups_;
    std::vector<ConvBlock> lvl_a_, lvl_b_;
    Conv2d head_;
    SoftmaxChannels softmax_;
};

// Latent shape code discriminator: disc_blocks of [1x1 conv halving channels,
// BN, ReLU, 2x2 max-pool], then 1x1 conv to one channel, global average pool
// and sigmoid. Emits one probability per batch item.
class CodeDiscriminator {
public:
    CodeDiscriminator(const NetConfig& cfg, std::uint64_t init_seed);
    // (n, hw, hw, code_channels) -> (n, 1) in (0,1).
    Tensor forward(const Tensor& code, Mode m);
    Tensor backward(const Tensor& dy);
    std::vector<ParamRef> params();
    void zero_grad();
    // Channel widths seen along the path, ending with the 1-channel head.
    std::vector<int> channel_ladder() const;

private:
    NetConfig cfg_;
    std::vector<Conv2d> convs_;
    std::vector<BatchNorm> bns_;
    std::vector<ReLU> acts_;
    std::vector<MaxPool2x2> pools_;
    Conv2d head_;
    GlobalAvgPool gap_;
    Sigmoid sigmoid_;
};

// Comparator discriminator that consumes full mask probability maps:
// 4 blocks of [3x3 stride-2 conv, BN, LeakyReLU(0.2)] with channels
// 32/64/128/256, then 1x1 conv, global average pool, sigmoid.
class MaskDiscriminator {
public:
    MaskDiscriminator(const NetConfig& cfg, std::uint64_t init_seed);
    Tensor forward(const Tensor& masks, Mode m);
    Tensor backward(const Tensor& dy);
    std::vector<ParamRef> params();
    void zero_grad();

private:
    NetConfig cfg_;
    std::vector<Conv2d> convs_;
    std::vector<BatchNorm> bns_;
    std::vector<LeakyReLU> acts_;
    Conv2d head_;
    GlobalAvgPool gap_;
    Sigmoid sigmoid_;
};

void zero_grads(const std::vector<ParamRef>& refs);

} // namespace spar::nets
