#include "spar/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

// Plain loops, no pragmas, no blocking. The accumulation order per output
// element matches the parallel kernels exactly, so tests can assert bit
// equality.

namespace spar::kernels::ref {

void conv2d_forward(const Conv2dDims& d, const float* x, const float* w, const float* bias, float* y) {
    const int oh = d.out_h(), ow = d.out_w();
    for (int n = 0; n < d.n; ++n)
        for (int oy = 0; oy < oh; ++oy)
            for (int ox = 0; ox < ow; ++ox)
                for (int co = 0; co < d.out_c; ++co) {
                    float sum = 0.0f;
                    for (int ky = 0; ky < d.kh; ++ky) {
                        const int iy = oy * d.stride - d.pad + ky;
                        if (iy < 0 || iy >= d.in_h) continue;
                        for (int kx = 0; kx < d.kw; ++kx) {
                            const int ix = ox * d.stride - d.pad + kx;
                            if (ix < 0 || ix >= d.in_w) continue;
                            for (int ci = 0; ci < d.in_c; ++ci) {
                                sum += x[((static_cast<std::int64_t>(n) * d.in_h + iy) * d.in_w + ix) * d.in_c + ci] *
                                       w[((static_cast<std::int64_t>(ky) * d.kw + kx) * d.in_c + ci) * d.out_c + co];
                            }
                        }
                    }
                    y[((static_cast<std::int64_t>(n) * oh + oy) * ow + ox) * d.out_c + co] = sum + bias[co];
                }
}

void conv2d_backward_data(const Conv2dDims& d, const float* dy, const float* w, float* dx) {
    const int oh = d.out_h(), ow = d.out_w();
    for (int n = 0; n < d.n; ++n)
        for (int iy = 0; iy < d.in_h; ++iy)
            for (int ix = 0; ix < d.in_w; ++ix)
                for (int ci = 0; ci < d.in_c; ++ci) {
                    float sum = 0.0f;
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
                            for (int co = 0; co < d.out_c; ++co) {
                                sum += dy[((static_cast<std::int64_t>(n) * oh + oy) * ow + ox) * d.out_c + co] *
                                       w[((static_cast<std::int64_t>(ky) * d.kw + kx) * d.in_c + ci) * d.out_c + co];
                            }
                        }
                    }
                    dx[((static_cast<std::int64_t>(n) * d.in_h + iy) * d.in_w + ix) * d.in_c + ci] = sum;
                }
}

void conv2d_backward_filter(const Conv2dDims& d, const float* x, const float* dy, float* dw, float* db) {
    const int oh = d.out_h(), ow = d.out_w();
    for (int ky = 0; ky < d.kh; ++ky)
        for (int kx = 0; kx < d.kw; ++kx)
            for (int ci = 0; ci < d.in_c; ++ci)
                for (int co = 0; co < d.out_c; ++co) {
                    float sum = 0.0f;
                    for (int n = 0; n < d.n; ++n)
                        for (int oy = 0; oy < oh; ++oy) {
                            const int iy = oy * d.stride - d.pad + ky;
                            if (iy < 0 || iy >= d.in_h) continue;
                            for (int ox = 0; ox < ow; ++ox) {
                                const int ix = ox * d.stride - d.pad + kx;
                                if (ix < 0 || ix >= d.in_w) continue;
                                sum += x[((static_cast<std::int64_t>(n) * d.in_h + iy) * d.in_w + ix) * d.in_c + ci] *
                                       dy[((static_cast<std::int64_t>(n) * oh + oy) * ow + ox) * d.out_c + co];
                            }
                        }
                    dw[((static_cast<std::int64_t>(ky) * d.kw + kx) * d.in_c + ci) * d.out_c + co] = sum;
                }
    for (int co = 0; co < d.out_c; ++co) {
        db[co] = 0.0f;
    }
    std::vector<float> partial(static_cast<size_t>(d.n) * d.out_c, 0.0f);
    for (int n = 0; n < d.n; ++n) {
        float* p = partial.data() + static_cast<std::int64_t>(n) * d.out_c;
        const float* dyn = dy + static_cast<std::int64_t>(n) * oh * ow * d.out_c;
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(oh) * ow; ++i)
            for (int co = 0; co < d.out_c; ++co) p[co] += dyn[i * d.out_c + co];
    }
    for (int n = 0; n < d.n; ++n)
        for (int co = 0; co < d.out_c; ++co) db[co] += partial[static_cast<std::int64_t>(n) * d.out_c + co];
}

void convt2x2_forward(int n, int h, int w, int cin, int cout,
                      const float* x, const float* wt, const float* bias, float* y) {
    const int oh = 2 * h, ow = 2 * w;
    for (int ni = 0; ni < n; ++ni)
        for (int oy = 0; oy < oh; ++oy)
            for (int ox = 0; ox < ow; ++ox)
                for (int co = 0; co < cout; ++co) {
                    const int iy = oy / 2, ix = ox / 2;
                    const int k = (oy % 2) * 2 + (ox % 2);
                    float sum = 0.0f;
                    for (int ci = 0; ci < cin; ++ci) {
                        sum += x[((static_cast<std::int64_t>(ni) * h + iy) * w + ix) * cin + ci] *
                               wt[(static_cast<std::int64_t>(k) * cin + ci) * cout + co];
                    }
                    y[((static_cast<std::int64_t>(ni) * oh + oy) * ow + ox) * cout + co] = sum + bias[co];
                }
}

void convt2x2_backward_data(int n, int h, int w, int cin, int cout,
                            const float* dy, const float* wt, float* dx) {
    const int oh = 2 * h, ow = 2 * w;
    for (int ni = 0; ni < n; ++ni)
        for (int iy = 0; iy < h; ++iy)
            for (int ix = 0; ix < w; ++ix)
                for (int ci = 0; ci < cin; ++ci) {
                    float sum = 0.0f;
                    for (int ky = 0; ky < 2; ++ky)
                        for (int kx = 0; kx < 2; ++kx) {
                            const int oy = 2 * iy + ky, ox = 2 * ix + kx;
                            for (int co = 0; co < cout; ++co) {
                                sum += dy[((static_cast<std::int64_t>(ni) * oh + oy) * ow + ox) * cout + co] *
                                       wt[((static_cast<std::int64_t>(ky) * 2 + kx) * cin + ci) * cout + co];
                            }
                        }
                    dx[((static_cast<std::int64_t>(ni) * h + iy) * w + ix) * cin + ci] = sum;
                }
}

void convt2x2_backward_filter(int n, int h, int w, int cin, int cout,
                              const float* x, const float* dy, float* dw, float* db) {
    const int oh = 2 * h, ow = 2 * w;
    for (int k = 0; k < 4; ++k)
        for (int ci = 0; ci < cin; ++ci)
            for (int co = 0; co < cout; ++co) {
                const int ky = k / 2, kx = k % 2;
                float sum = 0.0f;
                for (int ni = 0; ni < n; ++ni)
                    for (int iy = 0; iy < h; ++iy)
                        for (int ix = 0; ix < w; ++ix) {
                            const int oy = 2 * iy + ky, ox = 2 * ix + kx;
                            sum += x[((static_cast<std::int64_t>(ni) * h + iy) * w + ix) * cin + ci] *
                                   dy[((static_cast<std::int64_t>(ni) * oh + oy) * ow + ox) * cout + co];
                        }
                dw[(static_cast<std::int64_t>(k) * cin + ci) * cout + co] = sum;
            }
    std::vector<float> partial(static_cast<size_t>(n) * cout, 0.0f);
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
    for (int ni = 0; ni < n; ++ni)
        for (int oy = 0; oy < oh; ++oy)
            for (int ox = 0; ox < ow; ++ox)
                for (int ch = 0; ch < c; ++ch) {
                    float best = 0.0f;
                    std::uint8_t best_k = 0;
                    for (int k = 0; k < 4; ++k) {
                        const int iy = 2 * oy + k / 2, ix = 2 * ox + k % 2;
                        const float v = x[((static_cast<std::int64_t>(ni) * h + iy) * w + ix) * c + ch];
                        if (k == 0 || v > best) {
                            best = v;
                            best_k = static_cast<std::uint8_t>(k);
                        }
                    }
                    const std::int64_t off = ((static_cast<std::int64_t>(ni) * oh + oy) * ow + ox) * c + ch;
                    y[off] = best;
                    arg[off] = best_k;
                }
}

void maxpool2x2_backward(int n, int h, int w, int c, const float* dy, const std::uint8_t* arg, float* dx) {
    const int oh = h / 2, ow = w / 2;
    for (int ni = 0; ni < n; ++ni)
        for (int iy = 0; iy < h; ++iy)
            for (int ix = 0; ix < w; ++ix)
                for (int ch = 0; ch < c; ++ch) {
                    const int oy = iy / 2, ox = ix / 2;
                    const std::uint8_t k = static_cast<std::uint8_t>((iy % 2) * 2 + (ix % 2));
                    const std::int64_t out_off = ((static_cast<std::int64_t>(ni) * oh + oy) * ow + ox) * c + ch;
                    dx[((static_cast<std::int64_t>(ni) * h + iy) * w + ix) * c + ch] =
                        (arg[out_off] == k) ? dy[out_off] : 0.0f;
                }
}

void moments_per_channel(int n, int hw, int c, const float* x, double* mean, double* var) {
    std::vector<double> psum(static_cast<size_t>(n) * c, 0.0);
    std::vector<double> psq(static_cast<size_t>(n) * c, 0.0);
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

void softmax_channels_forward(std::int64_t pixels, int c, const float* x, float* y) {
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

} // namespace spar::kernels::ref
