#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "vrb/rng.hpp"

namespace vrb {

enum class Activation { relu, identity };
enum class OutputActivation { identity, softplus };

// Fully connected network description. Parameters are stored flat, one layer
// after another: weights row-major (out x in), then biases.
struct MlpSpec {
    std::vector<int> layer_widths; // input, hidden..., output
    Activation hidden_activation = Activation::relu;
    OutputActivation output_activation = OutputActivation::identity;

    void validate() const;
    int input_width() const { return layer_widths.front(); }
    int output_width() const { return layer_widths.back(); }
    std::size_t layer_count() const { return layer_widths.size() - 1; }
    std::size_t param_count() const;
    // Offset of layer l's weight block / bias block in the flat vector.
    std::size_t weight_offset(std::size_t layer) const;
    std::size_t bias_offset(std::size_t layer) const;

    bool operator==(const MlpSpec&) const = default;
};

using ParamVector = std::vector<double>;

// Reusable scratch for forward/backward passes; activations and
// pre-activations of the last forward pass are kept so a backward pass can
// follow without recomputing.
struct MlpWorkspace {
    std::vector<std::vector<double>> acts;    // acts[0] = input, acts[L] = output
    std::vector<std::vector<double>> preacts; // preacts[l-1] = layer l pre-activation
    std::vector<double> delta, delta_prev;    // backward scratch
};

// Forward evaluation. Throws ShapeError on dimension mismatch and
// NumericError (naming the layer) if a non-finite value appears.
std::vector<double> mlp_forward(const MlpSpec& spec, const ParamVector& params,
                                std::span<const double> input);
void mlp_forward(const MlpSpec& spec, const ParamVector& params,
                 std::span<const double> input, MlpWorkspace& ws,
                 std::vector<double>& output);

// Exact reverse-mode gradients of output . output_grad with respect to the
// parameters and the input.
std::pair<ParamVector, std::vector<double>>
mlp_backward(const MlpSpec& spec, const ParamVector& params,
             std::span<const double> input, std::span<const double> output_grad);

// Accumulating variant: ws must hold a forward pass of the matching input;
// param_grad += gradient. input_grad may be null when not needed.
void mlp_backward(const MlpSpec& spec, const ParamVector& params,
                  std::span<const double> output_grad, MlpWorkspace& ws,
                  std::span<double> param_grad, std::vector<double>* input_grad);

// Uniform in +-sqrt(6 / (fan_in + fan_out)); biases zero.
ParamVector init_params(const MlpSpec& spec, RngStream& rng);

} // namespace vrb
