#include "vrb/mlp.hpp"

#include <cmath>
#include <string>

#include "vrb/errors.hpp"
#include "vrb/num_util.hpp"

namespace vrb {

namespace {

void check_finite_span(std::span<const double> v, std::size_t layer, const char* what) {
    for (double x : v) {
        if (!std::isfinite(x)) {
            throw NumericError("non-finite " + std::string(what) + " in layer " +
                               std::to_string(layer));
        }
    }
}

} // namespace

void MlpSpec::validate() const {
    if (layer_widths.size() < 2) {
        throw ShapeError("MlpSpec needs at least 2 layer widths, got " +
                         std::to_string(layer_widths.size()));
    }
    for (int w : layer_widths) {
        if (w < 1) throw ShapeError("MlpSpec layer width must be >= 1, got " + std::to_string(w));
    }
}

std::size_t MlpSpec::param_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < layer_widths.size(); ++l) {
        n += static_cast<std::size_t>(layer_widths[l] + 1) * layer_widths[l + 1];
    }
    return n;
}

std::size_t MlpSpec::weight_offset(std::size_t layer) const {
    std::size_t off = 0;
    for (std::size_t l = 0; l < layer; ++l) {
        off += static_cast<std::size_t>(layer_widths[l] + 1) * layer_widths[l + 1];
    }
    return off;
}

std::size_t MlpSpec::bias_offset(std::size_t layer) const {
    return weight_offset(layer) +
           static_cast<std::size_t>(layer_widths[layer]) * layer_widths[layer + 1];
}

static void check_params(const MlpSpec& spec, const ParamVector& params) {
    if (params.size() != spec.param_count()) {
        throw ShapeError("parameter vector length " + std::to_string(params.size()) +
                         " does not match spec parameter count " +
                         std::to_string(spec.param_count()));
    }
}

static void check_input(const MlpSpec& spec, std::size_t n) {
    if (n != static_cast<std::size_t>(spec.input_width())) {
        throw ShapeError("input length " + std::to_string(n) + " does not match first layer width " +
                         std::to_string(spec.input_width()));
    }
}

void mlp_forward(const MlpSpec& spec, const ParamVector& params,
                 std::span<const double> input, MlpWorkspace& ws,
                 std::vector<double>& output) {
    spec.validate();
    check_params(spec, params);
    check_input(spec, input.size());

    const std::size_t layers = spec.layer_count();
    ws.acts.resize(layers + 1);
    ws.preacts.resize(layers);
    ws.acts[0].assign(input.begin(), input.end());

    for (std::size_t l = 0; l < layers; ++l) {
        const int in_w = spec.layer_widths[l];
        const int out_w = spec.layer_widths[l + 1];
        const double* w = params.data() + spec.weight_offset(l);
        const double* b = params.data() + spec.bias_offset(l);
        const std::vector<double>& a = ws.acts[l];

        std::vector<double>& pre = ws.preacts[l];
        pre.resize(out_w);
        for (int o = 0; o < out_w; ++o) {
            const double* row = w + static_cast<std::size_t>(o) * in_w;
            double s = b[o];
            for (int i = 0; i < in_w; ++i) s += row[i] * a[i];
            pre[o] = s;
        }
        check_finite_span(pre, l + 1, "pre-activation");

        std::vector<double>& act = ws.acts[l + 1];
        act.resize(out_w);
        const bool last = l + 1 == layers;
        if (!last && spec.hidden_activation == Activation::relu) {
            for (int o = 0; o < out_w; ++o) act[o] = pre[o] > 0.0 ? pre[o] : 0.0;
        } else if (last && spec.output_activation == OutputActivation::softplus) {
            for (int o = 0; o < out_w; ++o) act[o] = num::softplus(pre[o]);
        } else {
            act = pre;
        }
    }
    output = ws.acts[layers];
}

std::vector<double> mlp_forward(const MlpSpec& spec, const ParamVector& params,
                                std::span<const double> input) {
    MlpWorkspace ws;
    std::vector<double> out;
    mlp_forward(spec, params, input, ws, out);
    return out;
}

void mlp_backward(const MlpSpec& spec, const ParamVector& params,
                  std::span<const double> output_grad, MlpWorkspace& ws,
                  std::span<double> param_grad, std::vector<double>* input_grad) {
    const std::size_t layers = spec.layer_count();
    if (ws.acts.size() != layers + 1) {
        throw StateError("mlp_backward called without a matching forward pass");
    }
    if (output_grad.size() != static_cast<std::size_t>(spec.output_width())) {
        throw ShapeError("output_grad length " + std::to_string(output_grad.size()) +
                         " does not match last layer width " +
                         std::to_string(spec.output_width()));
    }
    if (param_grad.size() != spec.param_count()) {
        throw ShapeError("param_grad length " + std::to_string(param_grad.size()) +
                         " does not match spec parameter count " +
                         std::to_string(spec.param_count()));
    }

    std::vector<double>& delta = ws.delta;
    delta.assign(output_grad.begin(), output_grad.end());
    if (spec.output_activation == OutputActivation::softplus) {
        const std::vector<double>& pre = ws.preacts[layers - 1];
        for (std::size_t o = 0; o < delta.size(); ++o) delta[o] *= num::sigmoid(pre[o]);
    }

    for (std::size_t l = layers; l-- > 0;) {
        const int in_w = spec.layer_widths[l];
        const int out_w = spec.layer_widths[l + 1];
        const double* w = params.data() + spec.weight_offset(l);
        double* gw = param_grad.data() + spec.weight_offset(l);
        double* gb = param_grad.data() + spec.bias_offset(l);
        const std::vector<double>& a = ws.acts[l];

        for (int o = 0; o < out_w; ++o) {
            const double d = delta[o];
            double* grow = gw + static_cast<std::size_t>(o) * in_w;
            for (int i = 0; i < in_w; ++i) grow[i] += d * a[i];
            gb[o] += d;
        }
        check_finite_span(delta, l + 1, "gradient");

        if (l == 0 && input_grad == nullptr) break;
        std::vector<double>& prev = ws.delta_prev;
        prev.assign(in_w, 0.0);
        for (int o = 0; o < out_w; ++o) {
            const double d = delta[o];
            const double* row = w + static_cast<std::size_t>(o) * in_w;
            for (int i = 0; i < in_w; ++i) prev[i] += d * row[i];
        }
        if (l > 0 && spec.hidden_activation == Activation::relu) {
            const std::vector<double>& pre = ws.preacts[l - 1];
            // relu subgradient at 0 is 0
            for (int i = 0; i < in_w; ++i) {
                if (pre[i] <= 0.0) prev[i] = 0.0;
            }
        }
        delta.swap(prev);
    }
    if (input_grad != nullptr) *input_grad = delta;
}

std::pair<ParamVector, std::vector<double>>
mlp_backward(const MlpSpec& spec, const ParamVector& params,
             std::span<const double> input, std::span<const double> output_grad) {
    MlpWorkspace ws;
    std::vector<double> out;
    mlp_forward(spec, params, input, ws, out);
    ParamVector pg(spec.param_count(), 0.0);
    std::vector<double> ig;
    mlp_backward(spec, params, output_grad, ws, pg, &ig);
    return {std::move(pg), std::move(ig)};
}

ParamVector init_params(const MlpSpec& spec, RngStream& rng) {
    spec.validate();
    ParamVector p(spec.param_count(), 0.0);
    for (std::size_t l = 0; l < spec.layer_count(); ++l) {
        const int in_w = spec.layer_widths[l];
        const int out_w = spec.layer_widths[l + 1];
        const double bound = std::sqrt(6.0 / (in_w + out_w));
        double* w = p.data() + spec.weight_offset(l);
        const std::size_t n = static_cast<std::size_t>(in_w) * out_w;
        for (std::size_t i = 0; i < n; ++i) w[i] = rng.uniform(-bound, bound);
        // biases stay zero
    }
    return p;
}

} // namespace vrb
