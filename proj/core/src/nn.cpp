#include "envopt/nn.hpp"

#include <algorithm>
#include <cmath>

namespace envopt::nn {

std::vector<double> init_params(const ParamLayout& layout, Rng& rng) {
    std::vector<double> p(layout.total, 0.0);
    for (const auto& slice : layout.slices) {
        if (slice.fan_in == 0) continue;
        double s = 1.0 / std::sqrt(double(slice.fan_in));
        for (size_t i = 0; i < slice.size; ++i) p[slice.offset + i] = rng.uniform(-s, s);
    }
    return p;
}

AffineSpec make_affine(ParamLayout& layout, const std::string& name, int in, int out) {
    AffineSpec a;
    a.in = in;
    a.out = out;
    a.w_off = layout.add(name + ".w", size_t(in) * out, size_t(in));
    a.b_off = layout.add(name + ".b", size_t(out), 0);
    return a;
}

void affine_forward(std::span<const double> p, const AffineSpec& a, std::span<const double> x,
                    std::span<double> y) {
    for (int r = 0; r < a.out; ++r) {
        double acc = p[a.b_off + r];
        const double* w = &p[a.w_off + size_t(r) * a.in];
        for (int c = 0; c < a.in; ++c) acc += w[c] * x[c];
        y[r] = acc;
    }
}

void affine_backward(std::span<const double> p, const AffineSpec& a, std::span<const double> x,
                     std::span<const double> dy, std::span<double> dp, std::span<double> dx) {
    for (int r = 0; r < a.out; ++r) {
        double g = dy[r];
        dp[a.b_off + r] += g;
        double* dw = &dp[a.w_off + size_t(r) * a.in];
        for (int c = 0; c < a.in; ++c) dw[c] += g * x[c];
    }
    if (!dx.empty()) {
        for (int c = 0; c < a.in; ++c) {
            double acc = 0.0;
            for (int r = 0; r < a.out; ++r) acc += p[a.w_off + size_t(r) * a.in + c] * dy[r];
            dx[c] += acc;
        }
    }
}

MlpSpec make_mlp(ParamLayout& layout, const std::string& name, int in, int hidden, int out) {
    MlpSpec m;
    m.l1 = make_affine(layout, name + ".l1", in, hidden);
    m.l2 = make_affine(layout, name + ".l2", hidden, out);
    return m;
}

void mlp_forward(std::span<const double> p, const MlpSpec& m, std::span<const double> x,
                 std::span<double> hidden, std::span<double> y) {
    affine_forward(p, m.l1, x, hidden);
    tanh_inplace(hidden);
    affine_forward(p, m.l2, hidden, y);
}

void mlp_backward(std::span<const double> p, const MlpSpec& m, std::span<const double> x,
                  std::span<const double> hidden, std::span<const double> dy,
                  std::span<double> dp, std::span<double> dx) {
    std::vector<double> dh(size_t(m.hidden()), 0.0);
    affine_backward(p, m.l2, hidden, dy, dp, dh);
    tanh_backward(hidden, dh);
    affine_backward(p, m.l1, x, dh, dp, dx);
}

ConvSpec make_conv(ParamLayout& layout, const std::string& name, int c_in, int c_out, int k,
                   int h_in, int w_in) {
    ConvSpec c;
    c.c_in = c_in;
    c.c_out = c_out;
    c.k = k;
    c.h_in = h_in;
    c.w_in = w_in;
    c.w_off = layout.add(name + ".w", size_t(c_out) * c_in * k * k, size_t(c_in) * k * k);
    c.b_off = layout.add(name + ".b", size_t(c_out), 0);
    return c;
}

void conv_forward(std::span<const double> p, const ConvSpec& c, std::span<const double> x,
                  std::span<double> y) {
    const int ho = c.h_out(), wo = c.w_out();
    if (c.k == 2) {
        for (int co = 0; co < c.c_out; ++co) {
            double bias = p[c.b_off + co];
            double* out = &y[size_t(co) * ho * wo];
            for (int i = 0; i < ho * wo; ++i) out[i] = bias;
            for (int ci = 0; ci < c.c_in; ++ci) {
                const double* w = &p[c.w_off + (size_t(co) * c.c_in + ci) * 4];
                const double w00 = w[0], w01 = w[1], w10 = w[2], w11 = w[3];
                for (int oy = 0; oy < ho; ++oy) {
                    const double* r0 = &x[(size_t(ci) * c.h_in + oy) * c.w_in];
                    const double* r1 = r0 + c.w_in;
                    double* orow = out + size_t(oy) * wo;
                    for (int ox = 0; ox < wo; ++ox)
                        orow[ox] += w00 * r0[ox] + w01 * r0[ox + 1] + w10 * r1[ox] +
                                    w11 * r1[ox + 1];
                }
            }
        }
        return;
    }
    for (int co = 0; co < c.c_out; ++co) {
        double bias = p[c.b_off + co];
        for (int oy = 0; oy < ho; ++oy) {
            for (int ox = 0; ox < wo; ++ox) {
                double acc = bias;
                for (int ci = 0; ci < c.c_in; ++ci) {
                    const double* w =
                        &p[c.w_off + ((size_t(co) * c.c_in + ci) * c.k) * c.k];
                    const double* in = &x[(size_t(ci) * c.h_in + oy) * c.w_in + ox];
                    for (int ky = 0; ky < c.k; ++ky)
                        for (int kx = 0; kx < c.k; ++kx)
                            acc += w[ky * c.k + kx] * in[size_t(ky) * c.w_in + kx];
                }
                y[(size_t(co) * ho + oy) * wo + ox] = acc;
            }
        }
    }
}

void conv_backward(std::span<const double> p, const ConvSpec& c, std::span<const double> x,
                   std::span<const double> dy, std::span<double> dp, std::span<double> dx) {
    const int ho = c.h_out(), wo = c.w_out();
    if (c.k == 2) {
        for (int co = 0; co < c.c_out; ++co) {
            const double* gout = &dy[size_t(co) * ho * wo];
            double gb = 0.0;
            for (int i = 0; i < ho * wo; ++i) gb += gout[i];
            dp[c.b_off + co] += gb;
            for (int ci = 0; ci < c.c_in; ++ci) {
                size_t w_base = c.w_off + (size_t(co) * c.c_in + ci) * 4;
                const double w00 = p[w_base], w01 = p[w_base + 1], w10 = p[w_base + 2],
                             w11 = p[w_base + 3];
                double g00 = 0.0, g01 = 0.0, g10 = 0.0, g11 = 0.0;
                for (int oy = 0; oy < ho; ++oy) {
                    const double* r0 = &x[(size_t(ci) * c.h_in + oy) * c.w_in];
                    const double* r1 = r0 + c.w_in;
                    const double* grow = gout + size_t(oy) * wo;
                    if (!dx.empty()) {
                        double* d0 = &dx[(size_t(ci) * c.h_in + oy) * c.w_in];
                        double* d1 = d0 + c.w_in;
                        for (int ox = 0; ox < wo; ++ox) {
                            double g = grow[ox];
                            g00 += g * r0[ox];
                            g01 += g * r0[ox + 1];
                            g10 += g * r1[ox];
                            g11 += g * r1[ox + 1];
                            d0[ox] += g * w00;
                            d0[ox + 1] += g * w01;
                            d1[ox] += g * w10;
                            d1[ox + 1] += g * w11;
                        }
                    } else {
                        for (int ox = 0; ox < wo; ++ox) {
                            double g = grow[ox];
                            g00 += g * r0[ox];
                            g01 += g * r0[ox + 1];
                            g10 += g * r1[ox];
                            g11 += g * r1[ox + 1];
                        }
                    }
                }
                dp[w_base] += g00;
                dp[w_base + 1] += g01;
                dp[w_base + 2] += g10;
                dp[w_base + 3] += g11;
            }
        }
        return;
    }
    for (int co = 0; co < c.c_out; ++co) {
        for (int oy = 0; oy < ho; ++oy) {
            for (int ox = 0; ox < wo; ++ox) {
                double g = dy[(size_t(co) * ho + oy) * wo + ox];
                if (g == 0.0) continue;
                dp[c.b_off + co] += g;
                for (int ci = 0; ci < c.c_in; ++ci) {
                    size_t w_base = c.w_off + ((size_t(co) * c.c_in + ci) * c.k) * c.k;
                    size_t in_base = (size_t(ci) * c.h_in + oy) * c.w_in + ox;
                    for (int ky = 0; ky < c.k; ++ky) {
                        for (int kx = 0; kx < c.k; ++kx) {
                            dp[w_base + ky * c.k + kx] += g * x[in_base + size_t(ky) * c.w_in + kx];
                            if (!dx.empty())
                                dx[in_base + size_t(ky) * c.w_in + kx] +=
                                    g * p[w_base + ky * c.k + kx];
                        }
                    }
                }
            }
        }
    }
}

std::vector<double> softmax(std::span<const double> logits) {
    double mx = *std::max_element(logits.begin(), logits.end());
    std::vector<double> out(logits.size());
    double sum = 0.0;
    for (size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp(logits[i] - mx);
        sum += out[i];
    }
    for (auto& v : out) v /= sum;
    return out;
}

} // namespace envopt::nn
