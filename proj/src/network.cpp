#include "forgetlens/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>

#include "forgetlens/errors.hpp"

namespace forgetlens {

std::string to_string(ArchitectureId id) {
    switch (id) {
        case ArchitectureId::mnist_net: return "mnist_net";
        case ArchitectureId::lenet_variant: return "lenet_variant";
        case ArchitectureId::mlp: return "mlp";
    }
    return "unknown";
}

ArchitectureId architecture_from_string(const std::string& name) {
    if (name == "mnist_net") return ArchitectureId::mnist_net;
    if (name == "lenet_variant") return ArchitectureId::lenet_variant;
    if (name == "mlp") return ArchitectureId::mlp;
    throw InvalidArgument("unknown architecture: " + name);
}

namespace {

LayerDesc conv(int out_channels, int kernel) {
    return LayerDesc{LayerKind::conv, out_channels, kernel, 0, 0.0};
}
LayerDesc max_pool(int kernel) { return LayerDesc{LayerKind::max_pool, 0, kernel, 0, 0.0}; }
LayerDesc relu() { return LayerDesc{LayerKind::relu, 0, 0, 0, 0.0}; }
LayerDesc flatten() { return LayerDesc{LayerKind::flatten, 0, 0, 0, 0.0}; }
LayerDesc dense(int width) { return LayerDesc{LayerKind::dense, 0, 0, width, 0.0}; }
LayerDesc dropout(double rate) { return LayerDesc{LayerKind::dropout, 0, 0, 0, rate}; }

void maybe_dropout(std::vector<LayerDesc>& layers, double rate) {
    if (rate > 0.0) layers.push_back(dropout(rate));
}

}  // namespace

NetworkSpec make_mnist_net(double dropout_rate, int in_height, int in_width) {
    NetworkSpec spec;
    spec.id = ArchitectureId::mnist_net;
    spec.in_channels = 1;
    spec.in_height = in_height;
    spec.in_width = in_width;
    spec.num_classes = 10;
    spec.layers = {conv(10, 5), relu(), conv(20, 5), relu(), flatten(), dense(50), relu()};
    maybe_dropout(spec.layers, dropout_rate);
    spec.layers.push_back(dense(10));
    return spec;
}

NetworkSpec make_lenet_variant(double dropout_rate, int in_height, int in_width) {
    NetworkSpec spec;
    spec.id = ArchitectureId::lenet_variant;
    spec.in_channels = 1;
    spec.in_height = in_height;
    spec.in_width = in_width;
    spec.num_classes = 10;
    spec.layers = {conv(6, 5), max_pool(2), relu(), conv(16, 5), relu(), flatten(), dense(120), relu()};
    maybe_dropout(spec.layers, dropout_rate);
    spec.layers.push_back(dense(84));
    spec.layers.push_back(relu());
    maybe_dropout(spec.layers, dropout_rate);
    spec.layers.push_back(dense(10));
    return spec;
}

NetworkSpec make_mlp(int input_dim, std::vector<int> hidden_widths, int num_classes,
                     double dropout_rate) {
    if (input_dim <= 0 || num_classes < 2) {
        throw InvalidArgument("mlp: need positive input dim and >= 2 classes");
    }
    NetworkSpec spec;
    spec.id = ArchitectureId::mlp;
    spec.in_channels = 1;
    spec.in_height = 1;
    spec.in_width = input_dim;
    spec.num_classes = num_classes;
    spec.layers.push_back(flatten());
    for (int h : hidden_widths) {
        spec.layers.push_back(dense(h));
        spec.layers.push_back(relu());
        maybe_dropout(spec.layers, dropout_rate);
    }
    spec.layers.push_back(dense(num_classes));
    return spec;
}

NetworkSpec make_mnist_net_toy(double dropout_rate) {
    NetworkSpec spec;
    spec.id = ArchitectureId::mnist_net;
    spec.in_channels = 1;
    spec.in_height = 12;
    spec.in_width = 12;
    spec.num_classes = 2;
    spec.layers = {conv(1, 5), relu(), conv(2, 5), relu(), flatten(), dense(3), relu()};
    maybe_dropout(spec.layers, dropout_rate);
    spec.layers.push_back(dense(2));
    return spec;
}

NetworkSpec make_lenet_variant_toy(double dropout_rate) {
    NetworkSpec spec;
    spec.id = ArchitectureId::lenet_variant;
    spec.in_channels = 1;
    spec.in_height = 14;
    spec.in_width = 14;
    spec.num_classes = 2;
    spec.layers = {conv(2, 5), max_pool(2), relu(), conv(2, 5), relu(), flatten(), dense(3), relu()};
    maybe_dropout(spec.layers, dropout_rate);
    spec.layers.push_back(dense(3));
    spec.layers.push_back(relu());
    maybe_dropout(spec.layers, dropout_rate);
    spec.layers.push_back(dense(2));
    return spec;
}

void TrainConfig::validate() const {
    if (learning_rate <= 0.0) throw InvalidArgument("config: learning_rate must be positive");
    if (momentum < 0.0 || momentum >= 1.0) throw InvalidArgument("config: momentum must be in [0,1)");
    if (batch_size <= 0) throw InvalidArgument("config: batch_size must be positive");
    if (epochs < 0) throw InvalidArgument("config: epochs must be non-negative");
    if (dropout_rate < 0.0 || dropout_rate >= 1.0) {
        throw InvalidArgument("config: dropout_rate must be in [0,1)");
    }
}

namespace {

// Activation geometry entering each layer; flat after a flatten.
struct StageShape {
    bool flat = false;
    int c = 0, h = 0, w = 0;
    std::size_t width = 0;  // valid when flat

    std::size_t count() const {
        return flat ? width : static_cast<std::size_t>(c) * h * w;
    }
};

std::vector<StageShape> infer_shapes(const NetworkSpec& spec) {
    std::vector<StageShape> shapes;
    StageShape s;
    s.flat = false;
    s.c = spec.in_channels;
    s.h = spec.in_height;
    s.w = spec.in_width;
    shapes.push_back(s);
    for (const LayerDesc& layer : spec.layers) {
        switch (layer.kind) {
            case LayerKind::conv:
                if (s.flat) throw InvalidArgument("network: conv after flatten");
                if (s.h < layer.kernel || s.w < layer.kernel) {
                    throw InvalidArgument("network: conv kernel larger than input");
                }
                s.c = layer.out_channels;
                s.h = s.h - layer.kernel + 1;
                s.w = s.w - layer.kernel + 1;
                break;
            case LayerKind::max_pool:
                if (s.flat) throw InvalidArgument("network: pool after flatten");
                s.h /= layer.kernel;
                s.w /= layer.kernel;
                if (s.h == 0 || s.w == 0) throw InvalidArgument("network: pool output empty");
                break;
            case LayerKind::flatten:
                s.width = s.count();
                s.flat = true;
                break;
            case LayerKind::dense:
                if (!s.flat) throw InvalidArgument("network: dense before flatten");
                s.width = static_cast<std::size_t>(layer.width);
                break;
            case LayerKind::relu:
            case LayerKind::dropout:
                break;
        }
        shapes.push_back(s);
    }
    return shapes;
}

std::size_t batch_rows(const NetworkSpec& spec, const Tensor& batch) {
    const std::size_t in = spec.input_size();
    const bool rank4_ok = batch.rank() == 4 &&
                          batch.dim(1) == static_cast<std::size_t>(spec.in_channels) &&
                          batch.dim(2) == static_cast<std::size_t>(spec.in_height) &&
                          batch.dim(3) == static_cast<std::size_t>(spec.in_width);
    const bool rank2_ok = batch.rank() == 2 && batch.dim(1) == in;
    if (!rank4_ok && !rank2_ok) {
        throw InvalidArgument("forward: batch shape does not match network input");
    }
    return batch.dim(0);
}

// cols[(ic*k+ky)*k + kx][oy*ow + ox] = img[ic][oy+ky][ox+kx]
void im2col(const double* img, int c, int h, int w, int k, double* cols) {
    const int oh = h - k + 1;
    const int ow = w - k + 1;
    double* out = cols;
    for (int ic = 0; ic < c; ++ic) {
        const double* plane = img + static_cast<std::size_t>(ic) * h * w;
        for (int ky = 0; ky < k; ++ky) {
            for (int kx = 0; kx < k; ++kx) {
                for (int oy = 0; oy < oh; ++oy) {
                    std::memcpy(out + static_cast<std::size_t>(oy) * ow,
                                plane + static_cast<std::size_t>(oy + ky) * w + kx,
                                static_cast<std::size_t>(ow) * sizeof(double));
                }
                out += static_cast<std::size_t>(oh) * ow;
            }
        }
    }
}

void col2im_add(const double* cols, int c, int h, int w, int k, double* img) {
    const int oh = h - k + 1;
    const int ow = w - k + 1;
    const double* in = cols;
    for (int ic = 0; ic < c; ++ic) {
        double* plane = img + static_cast<std::size_t>(ic) * h * w;
        for (int ky = 0; ky < k; ++ky) {
            for (int kx = 0; kx < k; ++kx) {
                for (int oy = 0; oy < oh; ++oy) {
                    double* dst = plane + static_cast<std::size_t>(oy + ky) * w + kx;
                    const double* src = in + static_cast<std::size_t>(oy) * ow;
                    for (int ox = 0; ox < ow; ++ox) dst[ox] += src[ox];
                }
                in += static_cast<std::size_t>(oh) * ow;
            }
        }
    }
}

struct ForwardCache {
    std::vector<Tensor> inputs;                     // activation entering each layer
    std::vector<Tensor> masks;                      // dropout masks, per layer
    std::vector<std::vector<std::size_t>> argmax;   // pool winners, per layer
    Tensor logits;
};

void run_forward(const NetworkSpec& spec, const ModelState& state, const Tensor& batch,
                 bool training_mode, RandomSource& rng, ForwardCache* cache, Tensor* logits_out) {
    const std::size_t b = batch_rows(spec, batch);
    const std::vector<StageShape> shapes = infer_shapes(spec);
    const std::size_t n_layers = spec.layers.size();
    if (cache) {
        cache->inputs.resize(n_layers);
        cache->masks.assign(n_layers, Tensor());
        cache->argmax.assign(n_layers, {});
    }

    Tensor act({b, shapes.front().count()}, batch.values());
    std::size_t param_idx = 0;
    std::vector<double> cols;

    for (std::size_t li = 0; li < n_layers; ++li) {
        const LayerDesc& layer = spec.layers[li];
        const StageShape& in_s = shapes[li];
        const StageShape& out_s = shapes[li + 1];
        if (cache) cache->inputs[li] = act;

        switch (layer.kind) {
            case LayerKind::conv: {
                const Tensor& weight = state.parameters[param_idx];
                const Tensor& bias = state.parameters[param_idx + 1];
                param_idx += 2;
                const int k = layer.kernel;
                const std::size_t ickk = static_cast<std::size_t>(in_s.c) * k * k;
                const std::size_t ohow = static_cast<std::size_t>(out_s.h) * out_s.w;
                cols.resize(ickk * ohow);
                Tensor out({b, out_s.count()});
                for (std::size_t img = 0; img < b; ++img) {
                    im2col(act.data() + img * in_s.count(), in_s.c, in_s.h, in_s.w, k, cols.data());
                    double* y = out.data() + img * out_s.count();
                    gemm(weight.data(), cols.data(), y, static_cast<std::size_t>(out_s.c), ickk,
                         ohow, false);
                    for (int oc = 0; oc < out_s.c; ++oc) {
                        const double bv = bias[static_cast<std::size_t>(oc)];
                        double* row = y + static_cast<std::size_t>(oc) * ohow;
                        for (std::size_t p = 0; p < ohow; ++p) row[p] += bv;
                    }
                }
                act = std::move(out);
                break;
            }
            case LayerKind::max_pool: {
                const int k = layer.kernel;
                Tensor out({b, out_s.count()});
                std::vector<std::size_t> winners(cache ? b * out_s.count() : 0);
                for (std::size_t img = 0; img < b; ++img) {
                    const double* x = act.data() + img * in_s.count();
                    double* y = out.data() + img * out_s.count();
                    for (int c = 0; c < in_s.c; ++c) {
                        const double* plane = x + static_cast<std::size_t>(c) * in_s.h * in_s.w;
                        for (int oy = 0; oy < out_s.h; ++oy) {
                            for (int ox = 0; ox < out_s.w; ++ox) {
                                std::size_t best = static_cast<std::size_t>(oy * k) * in_s.w + ox * k;
                                double best_v = plane[best];
                                for (int dy = 0; dy < k; ++dy) {
                                    for (int dx = 0; dx < k; ++dx) {
                                        const std::size_t idx =
                                            static_cast<std::size_t>(oy * k + dy) * in_s.w + ox * k + dx;
                                        if (plane[idx] > best_v) {
                                            best_v = plane[idx];
                                            best = idx;
                                        }
                                    }
                                }
                                const std::size_t out_idx =
                                    (static_cast<std::size_t>(c) * out_s.h + oy) * out_s.w + ox;
                                y[out_idx] = best_v;
                                if (cache) {
                                    winners[img * out_s.count() + out_idx] =
                                        static_cast<std::size_t>(c) * in_s.h * in_s.w + best;
                                }
                            }
                        }
                    }
                }
                if (cache) cache->argmax[li] = std::move(winners);
                act = std::move(out);
                break;
            }
            case LayerKind::relu: {
                Tensor out = act;
                for (double& v : out.values())
                    if (v < 0.0) v = 0.0;
                act = std::move(out);
                break;
            }
            case LayerKind::flatten:
                break;  // same buffer, flat view
            case LayerKind::dense: {
                const Tensor& weight = state.parameters[param_idx];  // [in, out]
                const Tensor& bias = state.parameters[param_idx + 1];
                param_idx += 2;
                Tensor out({b, out_s.width});
                gemm(act.data(), weight.data(), out.data(), b, in_s.count(), out_s.width, false);
                for (std::size_t r = 0; r < b; ++r) {
                    double* row = out.data() + r * out_s.width;
                    for (std::size_t j = 0; j < out_s.width; ++j) row[j] += bias[j];
                }
                act = std::move(out);
                break;
            }
            case LayerKind::dropout: {
                if (!training_mode) break;
                const double keep = 1.0 - layer.rate;
                Tensor mask({b, in_s.count()});
                for (double& m : mask.values()) m = rng.bernoulli(layer.rate) ? 0.0 : 1.0 / keep;
                for (std::size_t i = 0; i < act.size(); ++i) act[i] *= mask[i];
                if (cache) cache->masks[li] = std::move(mask);
                break;
            }
        }
    }

    Tensor logits = act.reshaped({b, static_cast<std::size_t>(spec.num_classes)});
    if (logits_out) *logits_out = logits;
    if (cache) cache->logits = std::move(logits);
}

}  // namespace

ModelState init_model(const NetworkSpec& spec, RandomSource& rng) {
    const std::vector<StageShape> shapes = infer_shapes(spec);
    if (shapes.back().width != static_cast<std::size_t>(spec.num_classes)) {
        throw InvalidArgument("network: final layer width must equal num_classes");
    }
    ModelState state;
    for (std::size_t li = 0; li < spec.layers.size(); ++li) {
        const LayerDesc& layer = spec.layers[li];
        const StageShape& in_s = shapes[li];
        if (layer.kind == LayerKind::conv) {
            const std::size_t fan_in = static_cast<std::size_t>(in_s.c) * layer.kernel * layer.kernel;
            const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
            Tensor w({static_cast<std::size_t>(layer.out_channels), fan_in});
            for (double& v : w.values()) v = rng.uniform(-bound, bound);
            Tensor bias({static_cast<std::size_t>(layer.out_channels)});
            for (double& v : bias.values()) v = rng.uniform(-bound, bound);
            state.parameters.push_back(std::move(w));
            state.parameters.push_back(std::move(bias));
        } else if (layer.kind == LayerKind::dense) {
            const std::size_t fan_in = in_s.count();
            const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
            Tensor w({fan_in, static_cast<std::size_t>(layer.width)});
            for (double& v : w.values()) v = rng.uniform(-bound, bound);
            Tensor bias({static_cast<std::size_t>(layer.width)});
            for (double& v : bias.values()) v = rng.uniform(-bound, bound);
            state.parameters.push_back(std::move(w));
            state.parameters.push_back(std::move(bias));
        }
    }
    for (const Tensor& p : state.parameters) state.momentum.push_back(Tensor::zeros_like(p));
    state.step = 0;
    return state;
}

std::size_t parameter_count(const ModelState& state) {
    std::size_t n = 0;
    for (const Tensor& p : state.parameters) n += p.size();
    return n;
}

Tensor forward(const NetworkSpec& spec, const ModelState& state, const Tensor& batch,
               bool training_mode, RandomSource& rng) {
    Tensor logits;
    run_forward(spec, state, batch, training_mode, rng, nullptr, &logits);
    return logits;
}

double cross_entropy(const Tensor& logits, const std::vector<int>& labels) {
    const std::vector<double> losses = cross_entropy_per_example(logits, labels);
    double sum = 0.0;
    for (double l : losses) sum += l;
    return sum / static_cast<double>(losses.size());
}

std::vector<double> cross_entropy_per_example(const Tensor& logits, const std::vector<int>& labels) {
    if (logits.rank() != 2 || logits.dim(0) != labels.size()) {
        throw InvalidArgument("cross_entropy: logits/labels size mismatch");
    }
    const std::size_t k = logits.dim(1);
    std::vector<double> losses(labels.size());
    for (std::size_t r = 0; r < labels.size(); ++r) {
        if (labels[r] < 0 || static_cast<std::size_t>(labels[r]) >= k) {
            throw InvalidArgument("cross_entropy: label out of range");
        }
        const double* row = logits.data() + r * k;
        double max = row[0];
        for (std::size_t j = 1; j < k; ++j) max = std::max(max, row[j]);
        double sum = 0.0;
        for (std::size_t j = 0; j < k; ++j) sum += std::exp(row[j] - max);
        losses[r] = max + std::log(sum) - row[static_cast<std::size_t>(labels[r])];
    }
    return losses;
}

std::vector<Tensor> backward(const NetworkSpec& spec, const ModelState& state, const Tensor& batch,
                             const std::vector<int>& labels, bool training_mode, RandomSource& rng,
                             Tensor* logits_out) {
    ForwardCache cache;
    run_forward(spec, state, batch, training_mode, rng, &cache, nullptr);
    const std::size_t b = cache.logits.dim(0);
    const std::size_t k = cache.logits.dim(1);
    if (labels.size() != b) throw InvalidArgument("backward: labels do not match batch");
    if (logits_out) *logits_out = cache.logits;

    // d(mean CE)/d(logits) = (softmax - onehot) / B
    Tensor grad({b, k});
    for (std::size_t r = 0; r < b; ++r) {
        if (labels[r] < 0 || static_cast<std::size_t>(labels[r]) >= k) {
            throw InvalidArgument("backward: label out of range");
        }
        const double* row = cache.logits.data() + r * k;
        double max = row[0];
        for (std::size_t j = 1; j < k; ++j) max = std::max(max, row[j]);
        double sum = 0.0;
        for (std::size_t j = 0; j < k; ++j) sum += std::exp(row[j] - max);
        double* grow = grad.data() + r * k;
        for (std::size_t j = 0; j < k; ++j) grow[j] = std::exp(row[j] - max) / sum;
        grow[static_cast<std::size_t>(labels[r])] -= 1.0;
        for (std::size_t j = 0; j < k; ++j) grow[j] /= static_cast<double>(b);
    }

    const std::vector<StageShape> shapes = infer_shapes(spec);
    std::vector<Tensor> grads(state.parameters.size());

    // Map each parametric layer to its slot in the parameter list.
    std::vector<std::size_t> param_of_layer(spec.layers.size(), SIZE_MAX);
    std::size_t pi = 0;
    for (std::size_t li = 0; li < spec.layers.size(); ++li) {
        const LayerKind kind = spec.layers[li].kind;
        if (kind == LayerKind::conv || kind == LayerKind::dense) {
            param_of_layer[li] = pi;
            pi += 2;
        }
    }

    std::vector<double> cols, colsT, dy_img, dcols;
    for (std::size_t li = spec.layers.size(); li-- > 0;) {
        const LayerDesc& layer = spec.layers[li];
        const StageShape& in_s = shapes[li];
        const StageShape& out_s = shapes[li + 1];
        const Tensor& input = cache.inputs[li];

        switch (layer.kind) {
            case LayerKind::dense: {
                const std::size_t p = param_of_layer[li];
                const Tensor& weight = state.parameters[p];  // [in, out]
                const std::size_t in_w = in_s.count();
                const std::size_t out_w = out_s.width;
                Tensor dW({in_w, out_w});
                std::vector<double> xT(in_w * b);
                transpose(input.data(), xT.data(), b, in_w);
                gemm(xT.data(), grad.data(), dW.data(), in_w, b, out_w, false);
                Tensor db({out_w});
                for (std::size_t r = 0; r < b; ++r) {
                    const double* row = grad.data() + r * out_w;
                    for (std::size_t j = 0; j < out_w; ++j) db[j] += row[j];
                }
                std::vector<double> wT(out_w * in_w);
                transpose(weight.data(), wT.data(), in_w, out_w);
                Tensor dx({b, in_w});
                gemm(grad.data(), wT.data(), dx.data(), b, out_w, in_w, false);
                grads[p] = std::move(dW);
                grads[p + 1] = std::move(db);
                grad = std::move(dx);
                break;
            }
            case LayerKind::conv: {
                const std::size_t p = param_of_layer[li];
                const Tensor& weight = state.parameters[p];  // [oc, ic*k*k]
                const int kk = layer.kernel;
                const std::size_t oc = static_cast<std::size_t>(out_s.c);
                const std::size_t ickk = static_cast<std::size_t>(in_s.c) * kk * kk;
                const std::size_t ohow = static_cast<std::size_t>(out_s.h) * out_s.w;
                Tensor dW({oc, ickk});
                Tensor db({oc});
                Tensor dx({b, in_s.count()});
                cols.resize(ickk * ohow);
                colsT.resize(ohow * ickk);
                dcols.resize(ickk * ohow);
                std::vector<double> wT(ickk * oc);
                transpose(weight.data(), wT.data(), oc, ickk);
                for (std::size_t img = 0; img < b; ++img) {
                    const double* dy = grad.data() + img * out_s.count();  // [oc, ohow]
                    im2col(input.data() + img * in_s.count(), in_s.c, in_s.h, in_s.w, kk,
                           cols.data());
                    transpose(cols.data(), colsT.data(), ickk, ohow);
                    gemm(dy, colsT.data(), dW.data(), oc, ohow, ickk, true);
                    for (std::size_t o = 0; o < oc; ++o) {
                        const double* row = dy + o * ohow;
                        double s = 0.0;
                        for (std::size_t q = 0; q < ohow; ++q) s += row[q];
                        db[o] += s;
                    }
                    gemm(wT.data(), dy, dcols.data(), ickk, oc, ohow, false);
                    col2im_add(dcols.data(), in_s.c, in_s.h, in_s.w, kk,
                               dx.data() + img * in_s.count());
                }
                grads[p] = std::move(dW);
                grads[p + 1] = std::move(db);
                grad = std::move(dx);
                break;
            }
            case LayerKind::max_pool: {
                Tensor dx({b, in_s.count()});
                const std::vector<std::size_t>& winners = cache.argmax[li];
                for (std::size_t img = 0; img < b; ++img) {
                    const double* dy = grad.data() + img * out_s.count();
                    double* dst = dx.data() + img * in_s.count();
                    const std::size_t* win = winners.data() + img * out_s.count();
                    for (std::size_t q = 0; q < out_s.count(); ++q) dst[win[q]] += dy[q];
                }
                grad = std::move(dx);
                break;
            }
            case LayerKind::relu: {
                for (std::size_t i = 0; i < grad.size(); ++i) {
                    if (input[i] <= 0.0) grad[i] = 0.0;
                }
                break;
            }
            case LayerKind::dropout: {
                if (!training_mode) break;
                const Tensor& mask = cache.masks[li];
                for (std::size_t i = 0; i < grad.size(); ++i) grad[i] *= mask[i];
                break;
            }
            case LayerKind::flatten:
                break;
        }
    }
    return grads;
}

double classification_margin(const double* logits_row, std::size_t num_classes, int label) {
    if (num_classes < 2) throw InvalidArgument("margin: need at least 2 classes");
    if (label < 0 || static_cast<std::size_t>(label) >= num_classes) {
        throw InvalidArgument("margin: label out of range");
    }
    double best_other = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < num_classes; ++j) {
        if (j != static_cast<std::size_t>(label)) best_other = std::max(best_other, logits_row[j]);
    }
    return logits_row[static_cast<std::size_t>(label)] - best_other;
}

double classification_margin(const Tensor& logits, std::size_t row, int label) {
    return classification_margin(logits.data() + row * logits.dim(1), logits.dim(1), label);
}

void sgd_momentum_step(ModelState& state, const std::vector<Tensor>& gradients,
                       double learning_rate, double momentum) {
    if (gradients.size() != state.parameters.size()) {
        throw InvalidArgument("sgd: gradient count does not match parameters");
    }
    for (std::size_t i = 0; i < gradients.size(); ++i) {
        if (!gradients[i].same_shape(state.parameters[i])) {
            throw InvalidArgument("sgd: gradient shape does not match parameter");
        }
        if (!gradients[i].all_finite()) throw NumericError("sgd: non-finite gradient");
    }
    for (std::size_t i = 0; i < gradients.size(); ++i) {
        Tensor& buf = state.momentum[i];
        Tensor& theta = state.parameters[i];
        const Tensor& g = gradients[i];
        for (std::size_t j = 0; j < g.size(); ++j) {
            buf[j] = momentum * buf[j] + g[j];
            theta[j] -= learning_rate * buf[j];
        }
    }
    state.step += 1;
}

}  // namespace forgetlens
