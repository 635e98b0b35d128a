#include "spar/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <vector>

namespace spar::kernels {

namespace {
constexpr int kMaxChannels = 1024;
}

void conv2d_forward(const Conv2dDims& d, const float* x, const float* w, const float* bias, float* y) {
    const int oh = d.out_h(), ow = d.out_w();
    const std::int64_t rows = static_cast<std::int64_t>(d.n) * oh;
#pragma omp parallel for schedule(static)
    for (std::int64_t row = 0; row < rows; ++row) {
        const int n = static_cast<int>(row / oh);
        const int oy = static_cast<int>(row % oh);
        float acc[kMaxChannels];
        for (int ox = 0; ox < ow; ++ox) {
            for (int co = 0; co < d.out_c; ++co) acc[co] = 0.0f;
            for (int ky = 0; ky < d.kh; ++ky) {
                const int iy = oy * d.stride - d.pad + ky;
                if (iy < 0 || iy >= d.in_h) continue;
                for (int kx = 0; kx < d.kw; ++kx) {
                    const int ix = ox * d.stride - d.pad + kx;
                    if (ix < 0 || ix >= d.in_w) continue;
                    const float* xr = x + ((static_cast<std::int64_t>(n) * d.in_h + iy) * d.in_w + ix) * d.in_c;
                    const float* wr = w + (static_cast<std::int64_t>(ky) * d.kw + kx) * d.in_c * d.out_c;
                    for (int ci = 0; ci < d.in_c; ++ci) {
                        const float s = xr[ci];
                        const float* __restrict__ wc = wr + static_cast<std::int64_t>(ci) * d.out_c;
                        float* __restrict__ a = acc;
                        for (int co = 0; co < d.out_c; ++co) a[co] += s * wc[co];
                    }
                }
            }
            float* yr = y + ((static_cast<std::int64_t>(n) * oh + oy) * ow + ox) * d.out_c;
            for (int co = 0; co < d.out_c; ++co) yr[co] = acc[co] + bias[co];
        }
    }
}

void conv2d_backward_data(const Conv2dDims& d, const float* dy, const float* w, float* dx) {
    const int oh = d.out_h(), ow = d.out_w();
    // Transposed copy [kh][kw][cout][cin] keeps the inner loop contiguous.
    std::vector<float> wt(static_cast<size_t>(d.kh) * d.kw * d.in_c * d.out_c);
    for (int ky = 0; ky < d.kh; ++ky)
        for (int kx = 0; kx < d.kw; ++kx)
            for (int ci = 0; ci < d.in_c; ++ci)
                for (int co = 0; co < d.out_c; ++co)
                    wt[((static_cast<size_t>(ky) * d.kw + kx) * d.out_c + co) * d.in_c + ci] =
                        w[((static_cast<size_t>(ky) * d.kw + kx) * d.in_c + ci) * d.out_c + co];

    const std::int64_t rows = static_cast<std::int64_t>(d.n) * d.in_h;
#pragma omp parallel for schedule(static)
    for (std::int64_t row = 0; row < rows; ++row) {
        const int n = static_cast<int>(row / d.in_h);
        const int iy = static_cast<int>(row % d.in_h);
        float acc[kMaxChannels];
        for (int ix = 0; ix < d.in_w; ++ix) {
            for (int ci = 0; ci < d.in_c; ++ci) acc[ci] = 0.0f;
            for (int ky = 0; ky < d.kh; ++ky) {
                const int oy_num = iy + d.pad - ky;
                if (oy_num < 0 || oy_num % d.stride != 0) continue;
                const int oy = oy_num / d.stride;
                if (oy >= oh) continue;
                for (int kx = 0; kx < d.kw; ++kx) {
                    const int ox_num = ix + d.pad - kx;
                    if (ox_num < 0 || ox_num % d.stride != 0) continue;
                    const int ox = ox_num / d.stride;
                    if (ox >= ow) continue;
                    const float* dyr = dy + ((static_cast<std::int64_t>(n) * oh + oy) * ow + ox) * d.out_c;
                    const float* wr = wt.data() + (static_cast<std::int64_t>(ky) * d.kw + kx) * d.out_c * d.in_c;
                    for (int co = 0; co < d.out_c; ++co) {
                        const float s = dyr[co];
                        const float* __restrict__ wc = wr + static_cast<std::int64_t>(co) * d.in_c;
                        float* __restrict__ a = acc;
                        for (int ci = 0; ci < d.in_c; ++ci) a[ci] += s * wc[ci];
                    }
                }
            }
            float* dxr = dx + ((static_cast<std::int64_t>(n) * d.in_h + iy) * d.in_w + ix) * d.in_c;
            for (int ci = 0; ci < d.in_c; ++ci) dxr[ci] = acc[ci];
        }
    }
}

void conv2d_backward_filter(const Conv2dDims& d, const float* x, const float* dy, float* dw, float* db) {
    const int oh = d.out_h(), ow = d.out_w();
    const int blk = std::min(d.out_c, 64);
    const int nblk = (d.out_c + blk - 1) / blk;

    // Each thread owns a block of output channels: every dw element is summed
    // by one thread in (n, oy, ox) order.
#pragma omp parallel for schedule(static)
    for (int b = 0; b < nblk; ++b) {
        const int co0 = b * blk;
        const int co1 = std::min(d.out_c, co0 + blk);
        const int bw = co1 - co0;
        std::vector<float> acc(static_cast<size_t>(d.kh) * d.kw * d.in_c * bw, 0.0f);
        for (int n = 0; n < d.n; ++n) {
            for (int oy = 0; oy < oh; ++oy) {
                for (int ox = 0; ox < ow; ++ox) {
                    const float* dyr = dy + ((static_cast<std::int64_t>(n) * oh + oy) * ow + ox) * d.out_c + co0;
                    for (int ky = 0; ky < d.kh; ++ky) {
                        const int iy = oy * d.stride - d.pad + ky;
                        if (iy < 0 || iy >= d.in_h) continue;
                        for (int kx = 0; kx < d.kw; ++kx) {
                            const int ix = ox * d.stride - d.pad + kx;
                            if (ix < 0 || ix >= d.in_w) continue;
                            const float* xr = x + ((static_cast<std::int64_t>(n) * d.in_h + iy) * d.in_w + ix) * d.in_c;
                            float* ar = acc.data() + (static_cast<size_t>(ky) * d.kw + kx) * d.in_c * bw;
                            for (int ci = 0; ci < d.in_c; ++ci) {
                                const float s = xr[ci];
                                float* __restrict__ a = ar + static_cast<std::int64_t>(ci) * bw;
                                const float* __restrict__ g = dyr;
                                for (int co = 0; co < bw; ++co) a[co] += s * g[co];
                            }
                        }
                    }
                }
            }
        }
        for (int ky = 0; ky < d.kh; ++ky)
            for (int kx = 0; kx < d.kw; ++kx)
                for (int ci = 0; ci < d.in_c; ++ci) {
                    const float* a = acc.data() + ((static_cast<size_t>(ky) * d.kw + kx) * d.in_c + ci) * bw;
                    float* out = dw + ((static_cast<std::int64_t>(ky) * d.kw + kx) * d.in_c + ci) * d.out_c + co0;
                    for (int co = 0; co < bw; ++co) out[co] = a[co];
                }
    }

    // db[co] = sum over (n, oy, ox), combined across samples in index order.
    std::vector<float> partial(static_cast<size_t>(d.n) * d.out_c, 0.0f);
#pragma omp parallel for schedule(static)
    for (int n = 0; n < d.n; ++n) {
        float* p = partial.data() + static_cast<std::int64_t>(n) * d.out_c;
        const float* dyn = dy + static_cast<std::int64_t>(n) * oh * ow * d.out_c;
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(oh) * ow; ++i)
            for (int co = 0; co < d.out_c; ++co) p[co] += dyn[i * d.out_c + co];
    }
    for (int co = 0; co < d.out_c; ++co) db[co] = 0.0f;
    for (int n = 0; n < d.n; ++n)
        for (int co = 0; co < d.out_c; ++co) db[co] += partial[static_cast<std::int64_t>(n) * d.out_c + co];
}

void convt2x2_forward(int n, int h, int w, int cin, int cout,
                      const float* x, const float* wt, const float* bias, float* y) {
    const int oh = 2 * h, ow = 2 * w;
    const std::int64_t rows = static_cast<std::int64_t>(n) * oh;
#pragma omp parallel for schedule(static)
    for (std::int64_t row = 0; row < rows; ++row) {
        const int ni = static_cast<int>(row / oh);
        const int oy = static_cast<int>(row % oh);
        const int iy = oy / 2, ky = oy % 2;
        float acc[kMaxChannels];
        for (int ox = 0; ox < ow; ++ox) {
            const int ix = ox / 2, kx = ox % 2;
            const float* xr = x + ((static_cast<std::int64_t>(ni) * h + iy) * w + ix) * cin;
            const float* wr = wt + (static_cast<std::int64_t>(ky) * 2 + kx) * cin * cout;
            for (int co = 0; co < cout; ++co) acc[co] = 0.0f;
            for (int ci = 0; ci < cin; ++ci) {
                const float s = xr[ci];
                const float* __restrict__ wc = wr + static_cast<std::int64_t>(ci) * cout;
                float* __restrict__ a = acc;
                for (int co = 0; co < cout; ++co) a[co] += s * wc[co];
            }
            float* yr = y + ((static_cast<std::int64_t>(ni) * oh + oy) * ow + ox) * cout;
            for (int co = 0; co < cout; ++co) yr[co] = acc[co] + bias[co];
        }
    }
}

void convt2x2_backward_data(int n, int h, int w, int cin, int cout,
                            const float* dy, const float* wt, float* dx) {
    const int oh = 2 * h, ow = 2 * w;
    std::vector<float> wtr(static_cast<size_t>(4) * cin * cout);
    for (int k = 0; k < 4; ++k)
        for (int ci = 0; ci < cin; ++ci)
            for (int co = 0; co < cout; ++co)
                wtr[(static_cast<size_t>(k) * cout + co) * cin + ci] =
                    wt[(static_cast<size_t>(k) * cin + ci) * cout + co];

    const std::int64_t rows = static_cast<std::int64_t>(n) * h;
#pragma omp parallel for schedule(static)
    for (std::int64_t row = 0; row < rows; ++row) {
        const int ni = static_cast<int>(row / h);
        const int iy = static_cast<int>(row % h);
        float acc[kMaxChannels];
        for (int ix = 0; ix < w; ++ix) {
            for (int ci = 0; ci < cin; ++ci) acc[ci] = 0.0f;
            for (int ky = 0; ky < 2; ++ky) {
                for (int kx = 0; kx < 2; ++kx) {
                    const int oy = 2 * iy + ky, ox = 2 * ix + kx;
                    const float* dyr = dy + ((static_cast<std::int64_t>(ni) * oh + oy) * ow + ox) * cout;
                    const float* wr = wtr.data() + (static_cast<std::int64_t>(ky) * 2 + kx) * cout * cin;
                    for (int co = 0; co < cout; ++co) {
                        const float s = dyr[co];
                        const float* __restrict__ wc = wr + static_cast<std::int64_t>(co) * cin;
                        float* __restrict__ a = acc;
                        for (int ci = 0; ci < cin; ++ci) a[ci] += s * wc[ci];
                    }
                }
            }
            float* dxr = dx + ((static_cast<std::int64_t>(ni) * h + iy) * w + ix) * cin;
            for (int ci = 0; ci < cin; ++ci) dxr[ci] = acc[ci];
        }
    }
}

void convt2x2_backward_filter(int n, int h, int w, int cin, int cout,
                              const float* x, const float* dy, float* dw, float* db) {
    const int oh = 2 * h, ow = 2 * w;
    const int blk = std::min(cout, 64);
    const int nblk = (cout + blk - 1) / blk;
#pragma omp parallel for schedule(static)
    for (int b = 0; b < nblk; ++b) {
        const int co0 = b * blk;
        const int co1 = std::min(cout, co0 + blk);
        const int bw = co1 - co0;
        std::vector<float> acc(static_cast<size_t>(4) * cin * bw, 0.0f);
        for (int ni = 0; ni < n; ++ni) {
            for (int iy = 0; iy < h; ++iy) {
                for (int ix = 0; ix < w; ++ix) {
                    const float* xr = x + ((static_cast<std::int64_t>(ni) * h + iy) * w + ix) * cin;
                    for (int ky = 0; ky < 2; ++ky) {
                        for (int kx = 0; kx < 2; ++kx) {
                            const int oy = 2 * iy + ky, ox = 2 * ix + kx;
                            const float* dyr =
                                dy + ((static_cast<std::int64_t>(ni) * oh + oy) * ow + ox) * cout + co0;
                            float* ar = acc.data() + (static_cast<size_t>(ky) * 2 + kx) * cin * bw;
                            for (int ci = 0; ci < cin; ++ci) {
                                const float s = xr[ci];
                                float* __restrict__ a = ar + static_cast<std::int64_t>(ci) * bw;
                                const float* __restrict__ g = dyr;
                                for (int co = 0; co < bw; ++co) a[co] += s * g[co];
                            }
                        }
                    }
                }
            }
        }
        for (int k = 0; k < 4; ++k)
            for (int ci = 0; ci < cin; ++ci) {
                const float* a = acc.data() + (static_cast<size_t>(k) * cin + ci) * bw;
                float* out = dw + (static_cast<std::int64_t>(k) * cin + ci) * cout + co0;
                for (int co = 0; co < bw; ++co) out[co] = a[co];
            }
    }

    std::vector<float> partial(static_cast<size_t>(n) * cout, 0.0f);
#pragma omp parallel for schedule(static)
    for (int ni = 0; ni < n; ++ni) {
        float* p = partial.data() + static_cast<std::int64_t>(ni) * cout;
        const float* dyn = dy + static_cast<std::int64_t>(ni) * oh * ow * cout;
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(oh) * ow; ++i)
            for (int co = 0; co < cout; ++co) p[co] += dyn[i * cout + co];
    }
    for (int co = 0; co < cout; ++co) db[co] = 0.0f;
    for (int ni = 0; ni < n; ++ni)
        for (int co = 0; co < cout; ++co) db[co] += partial[static_cast<std::int64_t>(ni) * cout + co];
}

void maxpool2x2_forward(int n, int h, int w, int c, const float* x, float* y, std::uint8_t* arg) {
    const int oh = h / 2, ow = w / 2;
    const std::int64_t rows = static_cast<std::int64_t>(n) * oh;
#pragma omp parallel for schedule(static)
    for (std::int64_t row = 0; row < rows; ++row) {
        const int ni = static_cast<int>(row / oh);
        const int oy = static_cast<int>(row % oh);
        for (int ox = 0; ox < ow; ++ox) {
            const std::int64_t out_off = ((static_cast<std::int64_t>(ni) * oh + oy) * ow + ox) * c;
            for (int ch = 0; ch < c; ++ch) {
                float best = 0.0f;
                std::uint8_t best_k = 0;
                for (int k = 0; k < 4; ++k) {
                    const int iy = 2 * oy + (k >> 1), ix = 2 * ox + (k & 1);
                    const float v = x[((static_cast<std::int64_t>(ni) * h + iy) * w + ix) * c + ch];
                    if (k == 0 || v > best) {
                        best = v;
                        best_k = static_cast<std::uint8_t>(k);
                    }
                }
                y[out_off + ch] = best;
                arg[out_off + ch] = best_k;
            }
        }
    }
}

void maxpool2x2_backward(int n, int h, int w, int c, const float* dy, const std::uint8_t* arg, float* dx) {
    const int oh = h / 2, ow = w / 2;
    const std::int64_t rows = static_cast<std::int64_t>(n) * h;
#pragma omp parallel for schedule(static)
    for (std::int64_t row = 0; row < rows; ++row) {
        const int ni = static_cast<int>(row / h);
        const int iy = static_cast<int>(row % h);
        const int oy = iy / 2;
        const int ky = iy % 2;
        for (int ix = 0; ix < w; ++ix) {
            const int ox = ix / 2;
            const std::uint8_t k = static_cast<std::uint8_t>((ky << 1) | (ix % 2));
            const std::int64_t in_off = ((static_cast<std::int64_t>(ni) * h + iy) * w + ix) * c;
            const std::int64_t out_off = ((static_cast<std::int64_t>(ni) * oh + oy) * ow + ox) * c;
            for (int ch = 0; ch < c; ++ch)
                dx[in_off + ch] = (arg[out_off + ch] == k) ? dy[out_off + ch] : 0.0f;
        }
    }
}

void moments_per_channel(int n, int hw, int c, const float* x, double* mean, double* var) {
    std::vector<double> psum(static_cast<size_t>(n) * c, 0.0);
    std::vector<double> psq(static_cast<size_t>(n) * c, 0.0);
#pragma omp parallel for schedule(static)
    for (int ni = 0; ni < n; ++ni) {
        double* s = psum.data() + static_cast<std::int64_t>(ni) * c;
        double* q = psq.data() + static_cast<std::int64_t>(ni) * c;
        const float* xr = x + static_cast<std::int64_t>(ni) * hw * c;
        for (std::int64_t i = 0; i < hw; ++i)
            for (int ch = 0; ch < c; ++ch) {
                const double v = xr[i * c + ch];
                s[ch] += v;
                q[ch] += v * v;
            }
    }
    const double m = static_cast<double>(n) * hw;
    for (int ch = 0; ch < c; ++ch) {
        double s = 0.0, q = 0.0;
        for (int ni = 0; ni < n; ++ni) {
            s += psum[static_cast<std::int64_t>(ni) * c + ch];
            q += psq[static_cast<std::int64_t>(ni) * c + ch];
        }
        const double mu = s / m;
        mean[ch] = mu;
        var[ch] = std::max(0.0, q / m - mu * mu);
    }
}

void bn_normalize(std::int64_t count, int c, const float* x, const float* mean, const float* inv_std,
                  const float* gamma, const float* beta, float* xhat, float* y) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < count; ++i) {
        const float* xr = x + i * c;
        float* hr = xhat + i * c;
        float* yr = y + i * c;
        for (int ch = 0; ch < c; ++ch) {
            const float h = (xr[ch] - mean[ch]) * inv_std[ch];
            hr[ch] = h;
            yr[ch] = gamma[ch] * h + beta[ch];
        }
    }
}

namespace {

// dgamma = sum(dy * xhat), dbeta = sum(dy); per-sample partials combined in
// sample order so the result is thread-count independent.
void bn_grad_sums(int n, int hw, int c, const float* dy, const float* xhat, float* dgamma, float* dbeta) {
    std::vector<double> pg(static_cast<size_t>(n) * c, 0.0);
    std::vector<double> pb(static_cast<size_t>(n) * c, 0.0);
#pragma omp parallel for schedule(static)
    for (int ni = 0; ni < n; ++ni) {
        double* g = pg.data() + static_cast<std::int64_t>(ni) * c;
        double* bsum = pb.data() + static_cast<std::int64_t>(ni) * c;
        const float* dyr = dy + static_cast<std::int64_t>(ni) * hw * c;
        const float* hr = xhat + static_cast<std::int64_t>(ni) * hw * c;
        for (std::int64_t i = 0; i < hw; ++i)
            for (int ch = 0; ch < c; ++ch) {
                g[ch] += static_cast<double>(dyr[i * c + ch]) * hr[i * c + ch];
                bsum[ch] += dyr[i * c + ch];
            }
    }
    for (int ch = 0; ch < c; ++ch) {
        double g = 0.0, bsum = 0.0;
        for (int ni = 0; ni < n; ++ni) {
            g += pg[static_cast<std::int64_t>(ni) * c + ch];
            bsum += pb[static_cast<std::int64_t>(ni) * c + ch];
        }
        dgamma[ch] = static_cast<float>(g);
        dbeta[ch] = static_cast<float>(bsum);
    }
}

} // namespace

void bn_backward_batch(int n, int hw, int c, const float* dy, const float* xhat, const float* inv_std,
                       const float* gamma, float* dgamma, float* dbeta, float* dx) {
    bn_grad_sums(n, hw, c, dy, xhat, dgamma, dbeta);
    const float inv_m = 1.0f / (static_cast<float>(n) * hw);
    const std::int64_t count = static_cast<std::int64_t>(n) * hw;
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < count; ++i) {
        const float* dyr = dy + i * c;
        const float* hr = xhat + i * c;
        float* dxr = dx + i * c;
        for (int ch = 0; ch < c; ++ch) {
            dxr[ch] = gamma[ch] * inv_std[ch] *
                      (dyr[ch] - dbeta[ch] * inv_m - hr[ch] * dgamma[ch] * inv_m);
        }
    }
}

void bn_backward_fixed(int n, int hw, int c, const float* dy, const float* xhat, const float* inv_std,
                       const float* gamma, float* dgamma, float* dbeta, float* dx) {
    bn_grad_sums(n, hw, c, dy, xhat, dgamma, dbeta);
    const std::int64_t count = static_cast<std::int64_t>(n) * hw;
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < count; ++i) {
        const float* dyr = dy + i * c;
        float* dxr = dx + i * c;
        for (int ch = 0; ch < c; ++ch) dxr[ch] = dyr[ch] * gamma[ch] * inv_std[ch];
    }
}

void relu_forward(std::int64_t sz, const float* x, float* y) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < sz; ++i) y[i] = x[i] > 0.0f ? x[i] : 0.0f;
}

void relu_backward(std::int64_t sz, const float* y, const float* dy, float* dx) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < sz; ++i) dx[i] = y[i] > 0.0f ? dy[i] : 0.0f;
}

void leaky_relu_forward(std::int64_t sz, float slope, const float* x, float* y) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < sz; ++i) y[i] = x[i] > 0.0f ? x[i] : slope * x[i];
}

void leaky_relu_backward(std::int64_t sz, float slope, const float* y, const float* dy, float* dx) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < sz; ++i) dx[i] = y[i] > 0.0f ? dy[i] : slope * dy[i];
}

void softmax_channels_forward(std::int64_t pixels, int c, const float* x, float* y) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < pixels; ++i) {
        const float* xr = x + i * c;
        float* yr = y + i * c;
        float mx = xr[0];
        for (int ch = 1; ch < c; ++ch) mx = std::max(mx, xr[ch]);
        float sum = 0.0f;
        for (int ch = 0; ch < c; ++ch) {
            const float e = std::exp(xr[ch] - mx);
            yr[ch] = e;
            sum += e;
        }
        const float inv = 1.0f / sum;
        for (int ch = 0; ch < c; ++ch) yr[ch] *= inv;
    }
}

void softmax_channels_backward(std::int64_t pixels, int c, const float* y, const float* dy, float* dx) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < pixels; ++i) {
        const float* yr = y + i * c;
        const float* dyr = dy + i * c;
        float* dxr = dx + i * c;
        float dot = 0.0f;
        for (int ch = 0; ch < c; ++ch) dot += dyr[ch] * yr[ch];
        for (int ch = 0; ch < c; ++ch) dxr[ch] = yr[ch] * (dyr[ch] - dot);
    }
}

void sigmoid_forward(std::int64_t sz, const float* x, float* y) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < sz; ++i) y[i] = 1.0f / (1.0f + std::exp(-x[i]));
}

void sigmoid_backward(std::int64_t sz, const float* y, const float* dy, float* dx) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < sz; ++i) dx[i] = dy[i] * y[i] * (1.0f - y[i]);
}

void global_avg_pool_forward(int n, int hw, int c, const float* x, float* y) {
#pragma omp parallel for schedule(static)
    for (int ni = 0; ni < n; ++ni) {
        const float* xr = x + static_cast<std::int64_t>(ni) * hw * c;
        float* yr = y + static_cast<std::int64_t>(ni) * c;
        for (int ch = 0; ch < c; ++ch) yr[ch] = 0.0f;
        for (std::int64_t i = 0; i < hw; ++i)
            for (int ch = 0; ch < c; ++ch) yr[ch] += xr[i * c + ch];
        const float inv = 1.0f / static_cast<float>(hw);
        for (int ch = 0; ch < c; ++ch) yr[ch] *= inv;
    }
}

void global_avg_pool_backward(int n, int hw, int c, const float* dy, float* dx) {
    const float inv = 1.0f / static_cast<float>(hw);
#pragma omp parallel for schedule(static)
    for (int ni = 0; ni < n; ++ni) {
        const float* dyr = dy + static_cast<std::int64_t>(ni) * c;
        float* dxr = dx + static_cast<std::int64_t>(ni) * hw * c;
        for (std::int64_t i = 0; i < hw; ++i)
            for (int ch = 0; ch < c; ++ch) dxr[i * c + ch] = dyr[ch] * inv;
    }
}

void global_max_pool_forward(int n, int hw, int c, const float* x, float* y) {
#pragma omp parallel for schedule(static)
    for (int ni = 0; ni < n; ++ni) {
        const float* xr = x + static_cast<std::int64_t>(ni) * hw * c;
        float* yr = y + static_cast<std::int64_t>(ni) * c;
        for (int ch = 0; ch < c; ++ch) yr[ch] = xr[ch];
        for (std::int64_t i = 1; i < hw; ++i)
            for (int ch = 0; ch < c; ++ch) yr[ch] = std::max(yr[ch], xr[i * c + ch]);
    }
}

void concat_channels(std::int64_t pixels, int ca, int cb, const float* a, const float* b, float* y) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < pixels; ++i) {
        std::memcpy(y + i * (ca + cb), a + i * ca, sizeof(float) * static_cast<size_t>(ca));
        std::memcpy(y + i * (ca + cb) + ca, b + i * cb, sizeof(float) * static_cast<size_t>(cb));
    }
}

void split_channels(std::int64_t pixels, int ca, int cb, const float* y, float* a, float* b) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < pixels; ++i) {
        std::memcpy(a + i * ca, y + i * (ca + cb), sizeof(float) * static_cast<size_t>(ca));
        std::memcpy(b + i * cb, y + i * (ca + cb) + ca, sizeof(float) * static_cast<size_t>(cb));
    }
}

void add_scaled(std::int64_t sz, float alpha, const float* x, float* y) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < sz; ++i) y[i] += alpha * x[i];
}

void adam_step(std::int64_t sz, float* p, const float* g, float* m, float* v,
               float lr, float beta1, float beta2, float eps, std::int64_t t) {
    const double bc1 = 1.0 - std::pow(static_cast<double>(beta1), static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(static_cast<double>(beta2), static_cast<double>(t));
    const float inv_bc1 = static_cast<float>(1.0 / bc1);
    const float inv_bc2 = static_cast<float>(1.0 / bc2);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < sz; ++i) {
        m[i] = beta1 * m[i] + (1.0f - beta1) * g[i];
        v[i] = beta2 * v[i] + (1.0f - beta2) * g[i] * g[i];
        const float mhat = m[i] * inv_bc1;
        const float vhat = v[i] * inv_bc2;
        p[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
}

} // namespace spar::kernels
