#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "forgetlens/random.hpp"
#include "forgetlens/tensor.hpp"

namespace forgetlens {

enum class ArchitectureId { mnist_net, lenet_variant, mlp };

std::string to_string(ArchitectureId id);
ArchitectureId architecture_from_string(const std::string& name);

enum class LayerKind { conv, max_pool, relu, flatten, dense, dropout };

// One pipeline stage. conv uses (out_channels, kernel); max_pool uses
// kernel; dense uses width; dropout uses rate.
struct LayerDesc {
    LayerKind kind;
    int out_channels = 0;
    int kernel = 0;
    int width = 0;
    double rate = 0.0;
};

struct NetworkSpec {
    ArchitectureId id = ArchitectureId::mlp;
    int in_channels = 1;
    int in_height = 1;
    int in_width = 1;
    int num_classes = 0;
    std::vector<LayerDesc> layers;

    std::size_t input_size() const {
        return static_cast<std::size_t>(in_channels) * in_height * in_width;
    }
};

// Two 5x5 convolutions (10 then 20 maps), one hidden dense layer of 50,
// ReLU after each, dropout after the hidden layer.
NetworkSpec make_mnist_net(double dropout_rate = 0.5, int in_height = 28, int in_width = 28);

// conv 5x5 -> 6 maps, 2x2 max pool, conv 5x5 -> 16 maps, dense 120,
// dense 84, output layer.
NetworkSpec make_lenet_variant(double dropout_rate = 0.5, int in_height = 28, int in_width = 28);

NetworkSpec make_mlp(int input_dim, std::vector<int> hidden_widths, int num_classes,
                     double dropout_rate = 0.0);

// Downscaled builds of the conv topologies, for gradient checks.
NetworkSpec make_mnist_net_toy(double dropout_rate = 0.0);
NetworkSpec make_lenet_variant_toy(double dropout_rate = 0.0);

struct TrainConfig {
    ArchitectureId architecture = ArchitectureId::mnist_net;
    double learning_rate = 0.01;
    double momentum = 0.5;
    int batch_size = 64;
    int epochs = 0;
    double dropout_rate = 0.5;
    std::uint64_t seed = 0;
    std::vector<int> hidden_widths;  // mlp only

    void validate() const;
};

struct ModelState {
    std::vector<Tensor> parameters;
    std::vector<Tensor> momentum;
    std::uint64_t step = 0;
};

// Uniform [-1/sqrt(fan_in), +1/sqrt(fan_in)] weights and biases.
ModelState init_model(const NetworkSpec& spec, RandomSource& rng);

std::size_t parameter_count(const ModelState& state);

// batch has shape [B, C, H, W] matching the spec input. Dropout masks are
// drawn from rng only in training mode, in a fixed order, so copying the
// RandomSource before a call lets a later call replay the same masks.
Tensor forward(const NetworkSpec& spec, const ModelState& state, const Tensor& batch,
               bool training_mode, RandomSource& rng);

// Gradient of the mean cross-entropy w.r.t. every parameter. Runs the
// forward pass internally; pass the same rng state as the paired forward
// so the dropout masks match. logits_out, when non-null, receives the
// training-mode logits of that pass.
std::vector<Tensor> backward(const NetworkSpec& spec, const ModelState& state, const Tensor& batch,
                             const std::vector<int>& labels, bool training_mode, RandomSource& rng,
                             Tensor* logits_out = nullptr);

// Mean over the batch of -log softmax(logits)[label], stable up to
// |logit| ~ 1e4.
double cross_entropy(const Tensor& logits, const std::vector<int>& labels);

std::vector<double> cross_entropy_per_example(const Tensor& logits, const std::vector<int>& labels);

// logit of the labelled class minus the largest other logit; an example
// counts as correct iff the margin is strictly positive (exact ties are
// misclassifications).
double classification_margin(const double* logits_row, std::size_t num_classes, int label);
double classification_margin(const Tensor& logits, std::size_t row, int label);

// b <- momentum * b + g; theta <- theta - learning_rate * b.
void sgd_momentum_step(ModelState& state, const std::vector<Tensor>& gradients,
                       double learning_rate, double momentum);

}  // namespace forgetlens
