#pragma once

#include <cstdint>

// Data-parallel kernels behind the network layers. Each kernel computes every
// output element with a fixed accumulation order owned by a single thread, so
// results are bit-identical to the serial reference in kernels::ref and do not
// depend on the OpenMP thread count.
//
// Layouts: activations [n][h][w][c] (NHWC), conv weights [kh][kw][cin][cout].

namespace spar::kernels {

struct Conv2dDims {
    int n = 0;
    int in_h = 0, in_w = 0, in_c = 0;
    int out_c = 0;
    int kh = 3, kw = 3;
    int stride = 1;
    int pad = 1;

    int out_h() const { return (in_h + 2 * pad - kh) / stride + 1; }
    int out_w() const { return (in_w + 2 * pad - kw) / stride + 1; }
};

void conv2d_forward(const Conv2dDims& d, const float* x, const float* w, const float* bias, float* y);
void conv2d_backward_data(const Conv2dDims& d, const float* dy, const float* w, float* dx);
void conv2d_backward_filter(const Conv2dDims& d, const float* x, const float* dy, float* dw, float* db);

// Transposed convolution, kernel 2x2, stride 2 (exact 2x upsampling).
// x: [n][h][w][cin], w: [2][2][cin][cout], y: [n][2h][2w][cout].
void convt2x2_forward(int n, int h, int w, int cin, int cout,
                      const float* x, const float* wt, const float* bias, float* y);
void convt2x2_backward_data(int n, int h, int w, int cin, int cout,
                            const float* dy, const float* wt, float* dx);
void convt2x2_backward_filter(int n, int h, int w, int cin, int cout,
                              const float* x, const float* dy, float* dw, float* db);

// 2x2 max pooling, stride 2. arg stores the in-window winner index
// (0=(0,0), 1=(0,1), 2=(1,0), 3=(1,1)); ties go to the earliest candidate.
void maxpool2x2_forward(int n, int h, int w, int c, const float* x, float* y, std::uint8_t* arg);
void maxpool2x2_backward(int n, int h, int w, int c, const float* dy, const std::uint8_t* arg, float* dx);

// Per-channel mean and biased variance over all n*hw positions.
void moments_per_channel(int n, int hw, int c, const float* x, double* mean, double* var);

// xhat = (x - mean) * inv_std ; y = gamma * xhat + beta. Elementwise over count pixels.
void bn_normalize(std::int64_t count, int c, const float* x, const float* mean, const float* inv_std,
                  const float* gamma, const float* beta, float* xhat, float* y);

// Backward when the forward used statistics of this batch.
void bn_backward_batch(int n, int hw, int c, const float* dy, const float* xhat, const float* inv_std,
                       const float* gamma, float* dgamma, float* dbeta, float* dx);
// Backward when the forward used fixed (running) statistics.
void bn_backward_fixed(int n, int hw, int c, const float* dy, const float* xhat, const float* inv_std,
                       const float* gamma, float* dgamma, float* dbeta, float* dx);

void relu_forward(std::int64_t sz, const float* x, float* y);
void relu_backward(std::int64_t sz, const float* y, const float* dy, float* dx);
void leaky_relu_forward(std::int64_t sz, float slope, const float* x, float* y);
void leaky_relu_backward(std::int64_t sz, float slope, const float* y, const float* dy, float* dx);

// Softmax over the channel dimension, one distribution per pixel.
void softmax_channels_forward(std::int64_t pixels, int c, const float* x, float* y);
void softmax_channels_backward(std::int64_t pixels, int c, const float* y, const float* dy, float* dx);

void sigmoid_forward(std::int64_t sz, const float* x, float* y);
void sigmoid_backward(std::int64_t sz, const float* y, const float* dy, float* dx);

void global_avg_pool_forward(int n, int hw, int c, const float* x, float* y);   // y: [n][c]
void global_avg_pool_backward(int n, int hw, int c, const float* dy, float* dx);
void global_max_pool_forward(int n, int hw, int c, const float* x, float* y);    // y: [n][c]

// y rows become [a_row | b_row] along channels.
void concat_channels(std::int64_t pixels, int ca, int cb, const float* a, const float* b, float* y);
void split_channels(std::int64_t pixels, int ca, int cb, const float* y, float* a, float* b);

// y += alpha * x
void add_scaled(std::int64_t sz, float alpha, const float* x, float* y);

void adam_step(std::int64_t sz, float* p, const float* g, float* m, float* v,
               float lr, float beta1, float beta2, float eps, std::int64_t t);

// Naive single-threaded reference implementations with the same accumulation
// order. Kept for correctness tests and the kernel benchmark.
namespace ref {

void conv2d_forward(const Conv2dDims& d, const float* x, const float* w, const float* bias, float* y);
void conv2d_backward_data(const Conv2dDims& d, const float* dy, const float* w, float* dx);
void conv2d_backward_filter(const Conv2dDims& d, const float* x, const float* dy, float* dw, float* db);
void convt2x2_forward(int n, int h, int w, int cin, int cout,
                      const float* x, const float* wt, const float* bias, float* y);
void convt2x2_backward_data(int n, int h, int w, int cin, int cout,
                            const float* dy, const float* wt, float* dx);
void convt2x2_backward_filter(int n, int h, int w, int cin, int cout,
                              const float* x, const float* dy, float* dw, float* db);
void maxpool2x2_forward(int n, int h, int w, int c, const float* x, float* y, std::uint8_t* arg);
void maxpool2x2_backward(int n, int h, int w, int c, const float* dy, const std::uint8_t* arg, float* dx);
void moments_per_channel(int n, int hw, int c, const float* x, double* mean, double* var);
void softmax_channels_forward(std::int64_t pixels, int c, const float* x, float* y);

} // namespace ref

} // namespace spar::kernels
