#ifndef INITLAB_DATA_HPP
#define INITLAB_DATA_HPP

#include <string>
#include <vector>

#include "initlab/tensor.hpp"

namespace initlab {

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Dataset {
    Matrix inputs;            // n x d, entries in [0,1]
    std::vector<int> labels;  // length n, in [0, M)
    int num_classes = 0;
    std::string name;

    int size() const { return inputs.rows; }
    int dim() const { return inputs.cols; }
};

// IDX image file (magic 0x00000803), raw or gzip; pixels normalized by /255.
Matrix load_idx_images(const std::string& path);

// IDX label file (magic 0x00000801), raw or gzip.
std::vector<int> load_idx_labels(const std::string& path);

// Pairs image and label files and validates counts.
Dataset load_idx_dataset(const std::string& images_path, const std::string& labels_path,
                         int num_classes = 10, const std::string& name = "idx");

void write_idx_images(const std::string& path, const Matrix& images, int rows, int cols);
void write_idx_labels(const std::string& path, const std::vector<int>& labels);

// Gaussian class blobs squashed into [0,1]^d; desk-scale stand-in for MNIST.
Dataset synthetic_blobs(int d, int num_classes, int n_per_class, double separation, double sigma,
                        RngState& rng);

// Deterministic seeded train/validation split.
std::pair<Dataset, Dataset> split_dataset(const Dataset& full, double val_fraction, RngState& rng);

// First n examples.
Dataset subset(const Dataset& full, int n);

}  // namespace initlab

#endif
