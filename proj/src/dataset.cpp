#include "forgetlens/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "forgetlens/errors.hpp"
#include "forgetlens/random.hpp"

namespace forgetlens {

namespace {

std::vector<unsigned char> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    return std::vector<unsigned char>(std::istreambuf_iterator<char>(in),
                                      std::istreambuf_iterator<char>());
}

std::uint32_t read_be32(const std::vector<unsigned char>& buf, std::size_t offset) {
    return (static_cast<std::uint32_t>(buf[offset]) << 24) |
           (static_cast<std::uint32_t>(buf[offset + 1]) << 16) |
           (static_cast<std::uint32_t>(buf[offset + 2]) << 8) |
           static_cast<std::uint32_t>(buf[offset + 3]);
}

void write_be32(std::ofstream& out, std::uint32_t v) {
    const unsigned char bytes[4] = {static_cast<unsigned char>(v >> 24),
                                    static_cast<unsigned char>(v >> 16),
                                    static_cast<unsigned char>(v >> 8),
                                    static_cast<unsigned char>(v)};
    out.write(reinterpret_cast<const char*>(bytes), 4);
}

constexpr std::uint32_t kIdxImageMagic = 0x00000803;
constexpr std::uint32_t kIdxLabelMagic = 0x00000801;
constexpr std::size_t kCifarRowBytes = 3073;

unsigned char to_byte(double v) {
    const double scaled = std::lround(v * 255.0);
    return static_cast<unsigned char>(std::clamp(scaled, 0.0, 255.0));
}

}  // namespace

std::size_t Dataset::row_of(ExampleId id) const {
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (ids[i] == id) return i;
    }
    throw InvalidArgument("dataset: unknown example id " + std::to_string(id));
}

void Dataset::validate() const {
    const std::size_t n = ids.size();
    if (labels.size() != n || features.size() != n * feature_dim()) {
        throw InvalidArgument("dataset: inconsistent sizes");
    }
    std::unordered_set<ExampleId> seen;
    for (ExampleId id : ids) {
        if (!seen.insert(id).second) throw InvalidArgument("dataset: duplicate id");
    }
    for (int label : labels) {
        if (label < 0 || label >= num_classes) throw InvalidArgument("dataset: label out of range");
    }
}

std::string Dataset::fingerprint() const {
    // FNV-1a over labels, ids and feature bytes.
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](const void* data, std::size_t len) {
        const unsigned char* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < len; ++i) {
            h ^= p[i];
            h *= 1099511628211ULL;
        }
    };
    mix(ids.data(), ids.size() * sizeof(ExampleId));
    mix(labels.data(), labels.size() * sizeof(int));
    mix(features.data(), features.size() * sizeof(double));
    mix(&num_classes, sizeof(num_classes));
    mix(&layout, sizeof(layout));
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
    const std::vector<unsigned char> img = read_file(images_path);
    const std::vector<unsigned char> lab = read_file(labels_path);
    if (img.size() < 16) throw DataIntegrityError("idx: image file truncated: " + images_path);
    if (lab.size() < 8) throw DataIntegrityError("idx: label file truncated: " + labels_path);
    if (read_be32(img, 0) != kIdxImageMagic) {
        throw DataIntegrityError("idx: wrong image magic in " + images_path);
    }
    if (read_be32(lab, 0) != kIdxLabelMagic) {
        throw DataIntegrityError("idx: wrong label magic in " + labels_path);
    }
    const std::size_t n = read_be32(img, 4);
    const std::size_t h = read_be32(img, 8);
    const std::size_t w = read_be32(img, 12);
    if (img.size() != 16 + n * h * w) {
        throw DataIntegrityError("idx: image payload length mismatch in " + images_path);
    }
    if (read_be32(lab, 4) != n) {
        throw DataIntegrityError("idx: image/label count mismatch");
    }
    if (lab.size() != 8 + n) throw DataIntegrityError("idx: label payload length mismatch");

    Dataset ds;
    ds.layout = ChannelLayout{1, static_cast<int>(h), static_cast<int>(w)};
    ds.num_classes = 10;
    ds.features.resize(n * h * w);
    ds.labels.resize(n);
    ds.ids.resize(n);
    for (std::size_t i = 0; i < n * h * w; ++i) ds.features[i] = img[16 + i] / 255.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (lab[8 + i] > 9) throw DataIntegrityError("idx: label byte out of range");
        ds.labels[i] = lab[8 + i];
        ds.ids[i] = static_cast<ExampleId>(i);
    }
    return ds;
}

void save_idx(const Dataset& dataset, const std::string& images_path,
              const std::string& labels_path) {
    std::ofstream img(images_path, std::ios::binary);
    if (!img) throw IoError("cannot write file: " + images_path);
    write_be32(img, kIdxImageMagic);
    write_be32(img, static_cast<std::uint32_t>(dataset.size()));
    write_be32(img, static_cast<std::uint32_t>(dataset.layout.height));
    write_be32(img, static_cast<std::uint32_t>(dataset.layout.width));
    for (double v : dataset.features) {
        const unsigned char byte = to_byte(v);
        img.write(reinterpret_cast<const char*>(&byte), 1);
    }
    std::ofstream lab(labels_path, std::ios::binary);
    if (!lab) throw IoError("cannot write file: " + labels_path);
    write_be32(lab, kIdxLabelMagic);
    write_be32(lab, static_cast<std::uint32_t>(dataset.size()));
    for (int l : dataset.labels) {
        const unsigned char byte = static_cast<unsigned char>(l);
        lab.write(reinterpret_cast<const char*>(&byte), 1);
    }
}

Dataset load_cifar10(const std::vector<std::string>& batch_paths) {
    Dataset ds;
    ds.layout = ChannelLayout{3, 32, 32};
    ds.num_classes = 10;
    ExampleId next_id = 0;
    for (const std::string& path : batch_paths) {
        const std::vector<unsigned char> buf = read_file(path);
        if (buf.size() % kCifarRowBytes != 0) {
            throw DataIntegrityError("cifar: file length is not a whole number of rows: " + path);
        }
        const std::size_t rows = buf.size() / kCifarRowBytes;
        for (std::size_t r = 0; r < rows; ++r) {
            const unsigned char* row = buf.data() + r * kCifarRowBytes;
            if (row[0] > 9) throw DataIntegrityError("cifar: label byte out of range in " + path);
            ds.labels.push_back(row[0]);
            ds.ids.push_back(next_id++);
            for (std::size_t i = 0; i < 3072; ++i) ds.features.push_back(row[1 + i] / 255.0);
        }
    }
    return ds;
}

void save_cifar10(const Dataset& dataset, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write file: " + path);
    const std::size_t d = dataset.feature_dim();
    for (std::size_t r = 0; r < dataset.size(); ++r) {
        const unsigned char label = static_cast<unsigned char>(dataset.labels[r]);
        out.write(reinterpret_cast<const char*>(&label), 1);
        const double* f = dataset.example(r);
        for (std::size_t i = 0; i < d; ++i) {
            const unsigned char byte = to_byte(f[i]);
            out.write(reinterpret_cast<const char*>(&byte), 1);
        }
    }
}

std::vector<std::size_t> pixel_permutation(std::size_t dim, std::int64_t seed) {
    std::vector<std::size_t> perm(dim);
    for (std::size_t i = 0; i < dim; ++i) perm[i] = i;
    if (seed == kIdentityPermutationSeed) return perm;
    RandomSource rng(static_cast<std::uint64_t>(seed));
    rng.shuffle(perm);
    return perm;
}

Dataset permute_pixels(const Dataset& dataset, std::int64_t seed) {
    const std::vector<std::size_t> perm = pixel_permutation(dataset.feature_dim(), seed);
    Dataset out = dataset;
    const std::size_t d = dataset.feature_dim();
    for (std::size_t r = 0; r < dataset.size(); ++r) {
        const double* src = dataset.example(r);
        double* dst = out.features.data() + r * d;
        for (std::size_t i = 0; i < d; ++i) dst[i] = src[perm[i]];
    }
    return out;
}

ChannelStats standardize(Dataset& train, std::vector<Dataset*> others) {
    if (train.size() == 0) throw InvalidArgument("standardize: empty train set");
    const int channels = train.layout.channels;
    const std::size_t per_channel = train.layout.pixels_per_channel();
    ChannelStats stats;
    stats.mean.assign(channels, 0.0);
    stats.stddev.assign(channels, 0.0);

    const std::size_t count = train.size() * per_channel;
    for (int c = 0; c < channels; ++c) {
        double sum = 0.0;
        for (std::size_t r = 0; r < train.size(); ++r) {
            const double* f = train.example(r) + c * per_channel;
            for (std::size_t i = 0; i < per_channel; ++i) sum += f[i];
        }
        const double mean = sum / static_cast<double>(count);
        double sq = 0.0;
        for (std::size_t r = 0; r < train.size(); ++r) {
            const double* f = train.example(r) + c * per_channel;
            for (std::size_t i = 0; i < per_channel; ++i) sq += (f[i] - mean) * (f[i] - mean);
        }
        const double var = sq / static_cast<double>(count);
        if (var == 0.0) {
            throw InvalidArgument("standardize: degenerate channel with zero variance");
        }
        stats.mean[c] = mean;
        stats.stddev[c] = std::sqrt(var);
    }

    std::vector<Dataset*> all{&train};
    all.insert(all.end(), others.begin(), others.end());
    for (Dataset* ds : all) {
        if (ds->layout != train.layout) throw InvalidArgument("standardize: layout mismatch");
        for (std::size_t r = 0; r < ds->size(); ++r) {
            double* f = ds->features.data() + r * ds->feature_dim();
            for (int c = 0; c < channels; ++c) {
                for (std::size_t i = 0; i < per_channel; ++i) {
                    f[c * per_channel + i] = (f[c * per_channel + i] - stats.mean[c]) / stats.stddev[c];
                }
            }
        }
    }
    return stats;
}

std::pair<Dataset, NoiseRecord> inject_label_noise(const Dataset& dataset, double fraction,
                                                   std::uint64_t seed) {
    if (fraction <= 0.0 || fraction > 1.0) {
        throw InvalidArgument("label noise: fraction must be in (0,1]");
    }
    if (dataset.num_classes < 2) throw InvalidArgument("label noise: need at least 2 classes");
    Dataset out = dataset;
    NoiseRecord record;
    record.kind = NoiseRecord::Kind::label;
    const std::size_t count = static_cast<std::size_t>(fraction * dataset.size());
    RandomSource rng(seed);
    const std::vector<std::size_t> rows = rng.sample_without_replacement(dataset.size(), count);
    for (std::size_t row : rows) {
        const int original = dataset.labels[row];
        // Uniform over the other classes, so every affected example is
        // genuinely mislabeled.
        int offset = static_cast<int>(rng.below(dataset.num_classes - 1));
        int new_label = offset >= original ? offset + 1 : offset;
        out.labels[row] = new_label;
        record.affected_ids.insert(dataset.ids[row]);
        record.original_labels[dataset.ids[row]] = original;
    }
    return {std::move(out), std::move(record)};
}

std::pair<Dataset, NoiseRecord> inject_pixel_noise(const Dataset& dataset, double lambda,
                                                   double fraction, std::uint64_t seed) {
    if (lambda <= 0.0) throw InvalidArgument("pixel noise: lambda must be positive");
    if (fraction <= 0.0 || fraction > 1.0) {
        throw InvalidArgument("pixel noise: fraction must be in (0,1]");
    }
    Dataset out = dataset;
    NoiseRecord record;
    record.kind = NoiseRecord::Kind::pixel;
    record.lambda = lambda;
    const std::size_t count = static_cast<std::size_t>(fraction * dataset.size());
    RandomSource rng(seed);
    const std::size_t d = dataset.feature_dim();
    const std::vector<std::size_t> rows = rng.sample_without_replacement(dataset.size(), count);
    for (std::size_t row : rows) {
        double* f = out.features.data() + row * d;
        for (std::size_t i = 0; i < d; ++i) f[i] += rng.normal(0.0, lambda);
        record.affected_ids.insert(dataset.ids[row]);
    }
    return {std::move(out), std::move(record)};
}

Dataset synth_blobs(int n_per_class, int num_classes, int dim, double separation,
                    std::uint64_t seed) {
    if (n_per_class <= 0 || num_classes <= 0 || dim <= 0 || separation <= 0.0) {
        throw InvalidArgument("blobs: all arguments must be positive");
    }
    if (dim < num_classes) throw InvalidArgument("blobs: dim must be >= num_classes");
    Dataset ds;
    ds.num_classes = num_classes;
    ds.layout = ChannelLayout{1, 1, dim};
    RandomSource rng(seed);
    ExampleId next_id = 0;
    for (int c = 0; c < num_classes; ++c) {
        for (int i = 0; i < n_per_class; ++i) {
            for (int j = 0; j < dim; ++j) {
                const double center = (j == c) ? separation : 0.0;
                ds.features.push_back(center + rng.normal());
            }
            ds.labels.push_back(c);
            ds.ids.push_back(next_id++);
        }
    }
    return ds;
}

Dataset remove_ids(const Dataset& dataset, const std::set<ExampleId>& ids_to_remove) {
    std::unordered_set<ExampleId> known(dataset.ids.begin(), dataset.ids.end());
    for (ExampleId id : ids_to_remove) {
        if (!known.count(id)) {
            throw InvalidArgument("remove_ids: unknown id " + std::to_string(id));
        }
    }
    Dataset out;
    out.num_classes = dataset.num_classes;
    out.layout = dataset.layout;
    const std::size_t d = dataset.feature_dim();
    for (std::size_t r = 0; r < dataset.size(); ++r) {
        if (ids_to_remove.count(dataset.ids[r])) continue;
        out.ids.push_back(dataset.ids[r]);
        out.labels.push_back(dataset.labels[r]);
        const double* f = dataset.example(r);
        out.features.insert(out.features.end(), f, f + d);
    }
    return out;
}

void export_jsonl(const Dataset& dataset, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write file: " + path);
    for (std::size_t r = 0; r < dataset.size(); ++r) {
        nlohmann::json j;
        j["id"] = dataset.ids[r];
        j["label"] = dataset.labels[r];
        j["features"] = std::vector<double>(dataset.example(r), dataset.example(r) + dataset.feature_dim());
        out << j.dump() << '\n';
    }
}

}  // namespace forgetlens
