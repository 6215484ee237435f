#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace forgetlens {

using ExampleId = std::int64_t;

struct ChannelLayout {
    int channels = 1;
    int height = 1;
    int width = 1;

    std::size_t pixels_per_channel() const {
        return static_cast<std::size_t>(height) * width;
    }
    std::size_t feature_count() const { return channels * pixels_per_channel(); }
    bool operator==(const ChannelLayout&) const = default;
};

// Indexed example collection. Ids are stable: subsetting keeps the original
// id values, so statistics computed on the full set stay joinable.
struct Dataset {
    std::vector<double> features;  // N x D, row-major
    std::vector<int> labels;       // N
    std::vector<ExampleId> ids;    // N, unique
    int num_classes = 0;
    ChannelLayout layout;

    std::size_t size() const { return ids.size(); }
    std::size_t feature_dim() const { return layout.feature_count(); }
    const double* example(std::size_t row) const { return features.data() + row * feature_dim(); }

    // Row index of an id; throws InvalidArgument for unknown ids.
    std::size_t row_of(ExampleId id) const;

    void validate() const;
    std::string fingerprint() const;  // content hash for run metadata
};

struct NoiseRecord {
    enum class Kind { label, pixel };
    Kind kind = Kind::label;
    std::set<ExampleId> affected_ids;
    std::map<ExampleId, int> original_labels;  // label kind only
    double lambda = 0.0;                       // pixel kind only
};

// MNIST IDX pair: big-endian, image magic 0x00000803 (N x 28 x 28),
// label magic 0x00000801; pixel bytes scaled to [0,1].
Dataset load_idx(const std::string& images_path, const std::string& labels_path);
void save_idx(const Dataset& dataset, const std::string& images_path,
              const std::string& labels_path);

// CIFAR-10 binary batches: 3073-byte rows (1 label + 1024 R + 1024 G +
// 1024 B); ids assigned in file order across batches.
Dataset load_cifar10(const std::vector<std::string>& batch_paths);
void save_cifar10(const Dataset& dataset, const std::string& path);

// One pixel permutation drawn from seed, applied identically to every
// example. kIdentityPermutationSeed yields the identity.
inline constexpr std::int64_t kIdentityPermutationSeed = -1;
std::vector<std::size_t> pixel_permutation(std::size_t dim, std::int64_t seed);
Dataset permute_pixels(const Dataset& dataset, std::int64_t seed);

struct ChannelStats {
    std::vector<double> mean;  // per channel
    std::vector<double> stddev;
};

// Per-channel statistics from the train set only (population stddev); the
// same affine transform is applied to every dataset passed in.
ChannelStats standardize(Dataset& train, std::vector<Dataset*> others);

std::pair<Dataset, NoiseRecord> inject_label_noise(const Dataset& dataset, double fraction,
                                                   std::uint64_t seed);

// Additive zero-mean Gaussian noise with stddev lambda, on a fraction of
// examples; intended for datasets that are already standardized.
std::pair<Dataset, NoiseRecord> inject_pixel_noise(const Dataset& dataset, double lambda,
                                                   double fraction, std::uint64_t seed);

// Gaussian class blobs: class c is centered at separation * e_c with unit
// isotropic spread. Deterministic given seed.
Dataset synth_blobs(int n_per_class, int num_classes, int dim, double separation,
                    std::uint64_t seed);

Dataset remove_ids(const Dataset& dataset, const std::set<ExampleId>& ids_to_remove);

// JSONL export, one {"id":..,"label":..,"features":[..]} object per line.
void export_jsonl(const Dataset& dataset, const std::string& path);

}  // namespace forgetlens
