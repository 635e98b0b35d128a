#include "spar/nets.hpp"

#include <cmath>

#include "spar/error.hpp"

namespace spar::nets {

void NetConfig::validate() const {
    require(input_size > 0, "input_size must be positive");
    require(unet_levels >= 1 && unet_levels <= 6, "unet_levels out of range");
    require(input_size % (1 << unet_levels) == 0, "input_size must be divisible by 2^unet_levels");
    require(base_channels >= 1, "base_channels must be positive");
    require(base_channels * (1 << unet_levels) <= 1024, "UNet bottleneck too wide");
    require(num_classes >= 2, "need at least 2 classes");
    require(ae_channels.size() >= 2, "ae_channels needs at least two levels");
    for (int c : ae_channels) require(c >= 1 && c <= 1024, "ae channel count out of range");
    require(ae_channels.back() == 512, "encoder bottleneck must have 512 channels");
    const int pools = static_cast<int>(ae_channels.size()) - 1;
    require(input_size % (1 << pools) == 0, "input_size must be divisible by 2^(ae levels)");
    require(disc_blocks >= 0, "disc_blocks must be non-negative");
    require(disc_blocks == 0 || ae_channels.back() % (1 << disc_blocks) == 0,
            "code channels must halve cleanly across disc_blocks");
}

namespace {

void check_input(const Tensor& x, int size, int channels, const char* what) {
    require(x.ndim() == 4 && x.dim(1) == size && x.dim(2) == size && x.dim(3) == channels,
            std::string(what) + ": expected (n," + std::to_string(size) + "," + std::to_string(size) + "," +
                std::to_string(channels) + "), got " + x.shape_str());
}

} // namespace

// ------------------------------------------------------------------ UNet

UNet::UNet(const NetConfig& cfg, std::uint64_t init_seed)
    : cfg_(cfg),
      bott_a_("bott_a", cfg.base_channels << (cfg.unet_levels - 1), cfg.base_channels << cfg.unet_levels),
      bott_b_("bott_b", cfg.base_channels << cfg.unet_levels, cfg.base_channels << cfg.unet_levels),
      head_("head", cfg.base_channels, cfg.num_classes, 1, 1, 0) {
    cfg_.validate();
    const int L = cfg_.unet_levels;
    for (int i = 0; i < L; ++i) {
        const int cin = (i == 0) ? 1 : cfg_.base_channels << (i - 1);
        const int ch = cfg_.base_channels << i;
        enc_a_.emplace_back("enc" + std::to_string(i) + "a", cin, ch);
        enc_b_.emplace_back("enc" + std::to_string(i) + "b", ch, ch);
        pools_.emplace_back();
    }
    for (int j = 0; j < L; ++j) {
        const int level = L - 1 - j;
        const int ch = cfg_.base_channels << level;
        const int cin_up = (j == 0) ? cfg_.base_channels << L : cfg_.base_channels << (level + 1);
        ups_.emplace_back("dec" + std::to_string(level) + "_up", cin_up, ch);
        dec_a_.emplace_back("dec" + std::to_string(level) + "a", 2 * ch, ch);
        dec_b_.emplace_back("dec" + std::to_string(level) + "b", ch, ch);
    }
    skips_.resize(static_cast<size_t>(L));

    Rng rng(init_seed);
    for (int i = 0; i < L; ++i) {
        enc_a_[static_cast<size_t>(i)].init(rng);
        enc_b_[static_cast<size_t>(i)].init(rng);
    }
    bott_a_.init(rng);
    bott_b_.init(rng);
    for (int j = 0; j < L; ++j) {
        ups_[static_cast<size_t>(j)].init(rng);
        dec_a_[static_cast<size_t>(j)].init(rng);
        dec_b_[static_cast<size_t>(j)].init(rng);
    }
    head_.init(rng);
}

Tensor UNet::forward(const Tensor& x, Mode m) {
    check_input(x, cfg_.input_size, 1, "unet_forward");
    Tensor t = x;
    const int L = cfg_.unet_levels;
    for (int i = 0; i < L; ++i) {
        t = enc_a_[static_cast<size_t>(i)].forward(t, m);
        t = enc_b_[static_cast<size_t>(i)].forward(t, m);
        skips_[static_cast<size_t>(i)] = t;
        t = pools_[static_cast<size_t>(i)].forward(t);
    }
    t = bott_a_.forward(t, m);
    t = bott_b_.forward(t, m);
    for (int j = 0; j < L; ++j) {
        const int level = L - 1 - j;
        Tensor up = ups_[static_cast<size_t>(j)].forward(t);
        const Tensor& skip = skips_[static_cast<size_t>(level)];
        Tensor cat({up.dim(0), up.dim(1), up.dim(2), skip.dim(3) + up.dim(3)});
        kernels::concat_channels(up.size() / up.dim(3), skip.dim(3), up.dim(3), skip.data(), up.data(),
                                 cat.data());
        t = dec_a_[static_cast<size_t>(j)].forward(cat, m);
        t = dec_b_[static_cast<size_t>(j)].forward(t, m);
    }
    t = head_.forward(t);
    return softmax_.forward(t);
}

Tensor UNet::backward(const Tensor& dprob) {
    const int L = cfg_.unet_levels;
    Tensor d = softmax_.backward(dprob);
    d = head_.backward(d);
    std::vector<Tensor> dskips(static_cast<size_t>(L));
    for (int j = L - 1; j >= 0; --j) {
        const int level = L - 1 - j;
        d = dec_b_[static_cast<size_t>(j)].backward(d);
        d = dec_a_[static_cast<size_t>(j)].backward(d);
        const int ch = cfg_.base_channels << level;
        Tensor dskip({d.dim(0), d.dim(1), d.dim(2), ch});
        Tensor dup({d.dim(0), d.dim(1), d.dim(2), ch});
        kernels::split_channels(d.size() / d.dim(3), ch, ch, d.data(), dskip.data(), dup.data());
        dskips[static_cast<size_t>(level)] = std::move(dskip);
        d = ups_[static_cast<size_t>(j)].backward(dup);
    }
    d = bott_b_.backward(d);
    d = bott_a_.backward(d);
    for (int i = L - 1; i >= 0; --i) {
        Tensor dp = pools_[static_cast<size_t>(i)].backward(d);
        kernels::add_scaled(dp.size(), 1.0f, dskips[static_cast<size_t>(i)].data(), dp.data());
        dp = enc_b_[static_cast<size_t>(i)].backward(dp);
        d = enc_a_[static_cast<size_t>(i)].backward(dp);
    }
    return d;
}

std::vector<ParamRef> UNet::params() {
    std::vector<ParamRef> out;
    for (auto& b : enc_a_) b.collect(out);
    for (auto& b : enc_b_) b.collect(out);
    bott_a_.collect(out);
    bott_b_.collect(out);
    for (auto& u : ups_) u.collect(out);
    for (auto& b : dec_a_) b.collect(out);
    for (auto& b : dec_b_) b.collect(out);
    head_.collect(out);
    return out;
}

void UNet::zero_grad() { zero_grads(params()); }

// ---------------------------------------------------------- ShapeEncoder

ShapeEncoder::ShapeEncoder(const NetConfig& cfg, std::uint64_t init_seed)
    : cfg_(cfg),
      bott_a_("bott_a", cfg.ae_channels[cfg.ae_channels.size() - 2], cfg.ae_channels.back()),
      bott_b_("bott_b", cfg.ae_channels.back(), cfg.ae_channels.back()) {
    cfg_.validate();
    const int P = static_cast<int>(cfg_.ae_channels.size()) - 1;
    for (int i = 0; i < P; ++i) {
        const int cin = (i == 0) ? cfg_.num_classes : cfg_.ae_channels[static_cast<size_t>(i - 1)];
        const int ch = cfg_.ae_channels[static_cast<size_t>(i)];
        lvl_a_.emplace_back("lvl" + std::to_string(i) + "a", cin, ch);
        lvl_b_.emplace_back("lvl" + std::to_string(i) + "b", ch, ch);
        pools_.emplace_back();
    }
    Rng rng(init_seed);
    for (int i = 0; i < P; ++i) {
        lvl_a_[static_cast<size_t>(i)].init(rng);
        lvl_b_[static_cast<size_t>(i)].init(rng);
    }
    bott_a_.init(rng);
    bott_b_.init(rng);
}

Tensor ShapeEncoder::forward(const Tensor& masks, Mode m) {
    check_input(masks, cfg_.input_size, cfg_.num_classes, "encoder_forward");
    Tensor t = masks;
    const int P = static_cast<int>(cfg_.ae_channels.size()) - 1;
    for (int i = 0; i < P; ++i) {
        t = lvl_a_[static_cast<size_t>(i)].forward(t, m);
        t = lvl_b_[static_cast<size_t>(i)].forward(t, m);
        t = pools_[static_cast<size_t>(i)].forward(t);
    }
    t = bott_a_.forward(t, m);
    return bott_b_.forward(t, m);
}

Tensor ShapeEncoder::backward(const Tensor& dcode) {
    Tensor d = bott_b_.backward(dcode);
    d = bott_a_.backward(d);
    const int P = static_cast<int>(cfg_.ae_channels.size()) - 1;
    for (int i = P - 1; i >= 0; --i) {
        d = pools_[static_cast<size_t>(i)].backward(d);
        d = lvl_b_[static_cast<size_t>(i)].backward(d);
        d = lvl_a_[static_cast<size_t>(i)].backward(d);
    }
    return d;
}

std::vector<ParamRef> ShapeEncoder::params() {
    std::vector<ParamRef> out;
    for (auto& b : lvl_a_) b.collect(out);
    for (auto& b : lvl_b_) b.collect(out);
    bott_a_.collect(out);
    bott_b_.collect(out);
    return out;
}

void ShapeEncoder::zero_grad() { zero_grads(params()); }

// ---------------------------------------------------------- ShapeDecoder

ShapeDecoder::ShapeDecoder(const NetConfig& cfg, std::uint64_t init_seed)
    : cfg_(cfg), head_("head", cfg.ae_channels.front(), cfg.num_classes, 1, 1, 0) {
    cfg_.validate();
    const int P = static_cast<int>(cfg_.ae_channels.size()) - 1;
    for (int j = 0; j < P; ++j) {
        const int level = P - 1 - j;
        const int cin = (j == 0) ? cfg_.ae_channels.back() : cfg_.ae_channels[static_cast<size_t>(level + 1)];
        const int ch = cfg_.ae_channels[static_cast<size_t>(level)];
        ups_.emplace_back("up" + std::to_string(level), cin, ch);
        lvl_a_.emplace_back("lvl" + std::to_string(level) + "a", ch, ch);
        lvl_b_.emplace_back("lvl" + std::to_string(level) + "b", ch, ch);
    }
    Rng rng(init_seed);
    for (int j = 0; j < P; ++j) {
        ups_[static_cast<size_t>(j)].init(rng);
        lvl_a_[static_cast<size_t>(j)].init(rng);
        lvl_b_[static_cast<size_t>(j)].init(rng);
    }
    head_.init(rng);
}

Tensor ShapeDecoder::forward(const Tensor& code, Mode m) {
    check_input(code, cfg_.code_hw(), cfg_.code_channels(), "decoder_forward");
    Tensor t = code;
    const int P = static_cast<int>(cfg_.ae_channels.size()) - 1;
    for (int j = 0; j < P; ++j) {
        t = ups_[static_cast<size_t>(j)].forward(t);
        t = lvl_a_[static_cast<size_t>(j)].forward(t, m);
        t = lvl_b_[static_cast<size_t>(j)].forward(t, m);
    }
    t = head_.forward(t);
    return softmax_.forward(t);
}

Tensor ShapeDecoder::backward(const Tensor& dprob) {
    Tensor d = softmax_.backward(dprob);
    d = head_.backward(d);
    const int P = static_cast<int>(cfg_.ae_channels.size()) - 1;
    for (int j = P - 1; j >= 0; --j) {
        d = lvl_b_[static_cast<size_t>(j)].backward(d);
        d = lvl_a_[static_cast<size_t>(j)].backward(d);
        d = ups_[static_cast<size_t>(j)].backward(d);
    }
    return d;
}

std::vector<ParamRef> ShapeDecoder::params() {
    std::vector<ParamRef> out;
    for (auto& u : ups_) u.collect(out);
    for (auto& b : lvl_a_) b.collect(out);
    for (auto& b : lvl_b_) b.collect(out);
    head_.collect(out);
    return out;
}

void ShapeDecoder::zero_grad() { zero_grads(params()); }

// ----------------------------------------------------- CodeDiscriminator

CodeDiscriminator::CodeDiscriminator(const NetConfig& cfg, std::uint64_t init_seed)
    : cfg_(cfg),
      head_("head", cfg.code_channels() >> cfg.disc_blocks, 1, 1, 1, 0) {
    cfg_.validate();
    int ch = cfg_.code_channels();
    int hw = cfg_.code_hw();
    for (int b = 0; b < cfg_.disc_blocks; ++b) {
        if (hw < 2 || hw % 2 != 0)
            throw InvalidArgument("code spatial size too small for disc_blocks poolings");
        convs_.emplace_back("blk" + std::to_string(b) + ".conv", ch, ch / 2, 1, 1, 0);
        bns_.emplace_back("blk" + std::to_string(b) + ".bn", ch / 2);
        acts_.emplace_back();
        pools_.emplace_back();
        ch /= 2;
        hw /= 2;
    }
    Rng rng(init_seed);
    for (auto& c : convs_) c.init(rng);
    head_.init(rng);
}

Tensor CodeDiscriminator::forward(const Tensor& code, Mode m) {
    check_input(code, cfg_.code_hw(), cfg_.code_channels(), "discriminator_forward");
    Tensor t = code;
    for (size_t b = 0; b < convs_.size(); ++b) {
        t = convs_[b].forward(t);
        t = bns_[b].forward(t, m);
        t = acts_[b].forward(t);
        t = pools_[b].forward(t);
    }
    t = head_.forward(t);
    t = gap_.forward(t);
    return sigmoid_.forward(t);
}

Tensor CodeDiscriminator::backward(const Tensor& dy) {
    Tensor d = sigmoid_.backward(dy);
    d = gap_.backward(d);
    d = head_.backward(d);
    for (size_t b = convs_.size(); b-- > 0;) {
        d = pools_[b].backward(d);
        d = acts_[b].backward(d);
        d = bns_[b].backward(d);
        d = convs_[b].backward(d);
    }
    return d;
}

std::vector<ParamRef> CodeDiscriminator::params() {
    std::vector<ParamRef> out;
    for (size_t b = 0; b < convs_.size(); ++b) {
        convs_[b].collect(out);
        bns_[b].collect(out);
    }
    head_.collect(out);
    return out;
}

void CodeDiscriminator::zero_grad() { zero_grads(params()); }

std::vector<int> CodeDiscriminator::channel_ladder() const {
    std::vector<int> ladder{cfg_.code_channels()};
    int ch = cfg_.code_channels();
    for (int b = 0; b < cfg_.disc_blocks; ++b) {
        ch /= 2;
        ladder.push_back(ch);
    }
    ladder.push_back(1);
    return ladder;
}

// ----------------------------------------------------- MaskDiscriminator

MaskDiscriminator::MaskDiscriminator(const NetConfig& cfg, std::uint64_t init_seed)
    : cfg_(cfg), head_("head", 256, 1, 1, 1, 0) {
    cfg_.validate();
    require(cfg_.input_size % 16 == 0, "mask discriminator needs input divisible by 16");
    const int chans[4] = {32, 64, 128, 256};
    int cin = cfg_.num_classes;
    for (int b = 0; b < 4; ++b) {
        convs_.emplace_back("blk" + std::to_string(b) + ".conv", cin, chans[b], 3, 2, 1);
        bns_.emplace_back("blk" + std::to_string(b) + ".bn", chans[b]);
        acts_.emplace_back(0.2f);
        cin = chans[b];
    }
    Rng rng(init_seed);
    for (auto& c : convs_) c.init(rng);
    head_.init(rng);
}

Tensor MaskDiscriminator::forward(const Tensor& masks, Mode m) {
    check_input(masks, cfg_.input_size, cfg_.num_classes, "mask discriminator");
    Tensor t = masks;
    for (size_t b = 0; b < convs_.size(); ++b) {
        t = convs_[b].forward(t);
        t = bns_[b].forward(t, m);
        t = acts_[b].forward(t);
    }
    t = head_.forward(t);
    t = gap_.forward(t);
    return sigmoid_.forward(t);
}

Tensor MaskDiscriminator::backward(const Tensor& dy) {
    Tensor d = sigmoid_.backward(dy);
    d = gap_.backward(d);
    d = head_.backward(d);
    for (size_t b = convs_.size(); b-- > 0;) {
        d = acts_[b].backward(d);
        d = bns_[b].backward(d);
        d = convs_[b].backward(d);
    }
    return d;
}

std::vector<ParamRef> MaskDiscriminator::params() {
    std::vector<ParamRef> out;
    for (size_t b = 0; b < convs_.size(); ++b) {
        convs_[b].collect(out);
        bns_[b].collect(out);
    }
    head_.collect(out);
    return out;
}

void MaskDiscriminator::zero_grad() { zero_grads(params()); }

void zero_grads(const std::vector<ParamRef>& refs) {
    for (const auto& r : refs) {
        if (r.grad) r.grad->fill(0.0f);
    }
}

} // namespace spar::nets
