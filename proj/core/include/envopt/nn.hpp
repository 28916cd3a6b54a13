#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "envopt/random.hpp"

namespace envopt::nn {

// Named slices of a flat parameter vector.
struct ParamSlice {
    std::string name;
    size_t offset = 0;
    size_t size = 0;
    size_t fan_in = 0;  // drives the init scale; 0 for biases (init to zero)
};

struct ParamLayout {
    std::vector<ParamSlice> slices;
    size_t total = 0;

    size_t add(const std::string& name, size_t size, size_t fan_in) {
        size_t off = total;
        slices.push_back({name, off, size, fan_in});
        total += size;
        return off;
    }
};

// Uniform [-s, s] with s = fan_in^{-1/2} per slice; zero-fan slices start at zero.
std::vector<double> init_params(const ParamLayout& layout, Rng& rng);

// y = W x + b with W row-major [rows][cols].
struct AffineSpec {
    size_t w_off = 0;
    size_t b_off = 0;
    int in = 0;
    int out = 0;
};

AffineSpec make_affine(ParamLayout& layout, const std::string& name, int in, int out);

void affine_forward(std::span<const double> p, const AffineSpec& a, std::span<const double> x,
                    std::span<double> y);
// Accumulates parameter gradients; dx may be empty when input grads are not needed.
void affine_backward(std::span<const double> p, const AffineSpec& a, std::span<const double> x,
                     std::span<const double> dy, std::span<double> dp, std::span<double> dx);

// Two affine layers with tanh in between (linear output).
struct MlpSpec {
    AffineSpec l1;
    AffineSpec l2;
    int in() const { return l1.in; }
    int hidden() const { return l1.out; }
    int out() const { return l2.out; }
};

MlpSpec make_mlp(ParamLayout& layout, const std::string& name, int in, int hidden, int out);

// `hidden` receives tanh(l1 x) and is required again by the backward pass.
void mlp_forward(std::span<const double> p, const MlpSpec& m, std::span<const double> x,
                 std::span<double> hidden, std::span<double> y);
void mlp_backward(std::span<const double> p, const MlpSpec& m, std::span<const double> x,
                  std::span<const double> hidden, std::span<const double> dy,
                  std::span<double> dp, std::span<double> dx);

// Valid (no padding), stride-1 convolution over [channels][height][width] data.
struct ConvSpec {
    size_t w_off = 0;  // [c_out][c_in][k][k]
    size_t b_off = 0;
    int c_in = 0;
    int c_out = 0;
    int k = 0;
    int h_in = 0;
    int w_in = 0;
    int h_out() const { return h_in - k + 1; }
    int w_out() const { return w_in - k + 1; }
};

ConvSpec make_conv(ParamLayout& layout, const std::string& name, int c_in, int c_out, int k,
                   int h_in, int w_in);

void conv_forward(std::span<const double> p, const ConvSpec& c, std::span<const double> x,
                  std::span<double> y);
void conv_backward(std::span<const double> p, const ConvSpec& c, std::span<const double> x,
                   std::span<const double> dy, std::span<double> dp, std::span<double> dx);

inline void tanh_inplace(std::span<double> v) {
    for (auto& x : v) x = std::tanh(x);
}
// dz = dy * (1 - y^2) where y = tanh(z).
inline void tanh_backward(std::span<const double> y, std::span<double> dy) {
    for (size_t i = 0; i < y.size(); ++i) dy[i] *= 1.0 - y[i] * y[i];
}

// Numerically stable softmax.
std::vector<double> softmax(std::span<const double> logits);

} // namespace envopt::nn
