#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace forgetlens {

// Dense row-major tensor of doubles. All arithmetic in the library is
// 64-bit; shapes are validated on construction.
class Tensor {
  public:
    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> shape);
    Tensor(std::vector<std::size_t> shape, std::vector<double> values);
    Tensor(std::initializer_list<std::size_t> shape) : Tensor(std::vector<std::size_t>(shape)) {}

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t dim(std::size_t i) const { return shape_[i]; }
    std::size_t size() const { return values_.size(); }

    double* data() { return values_.data(); }
    const double* data() const { return values_.data(); }
    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }

    // 2-D accessors (row-major); shape must be rank 2.
    double& at(std::size_t r, std::size_t c) { return values_[r * shape_[1] + c]; }
    double at(std::size_t r, std::size_t c) const { return values_[r * shape_[1] + c]; }

    void fill(double v);
    bool all_finite() const;
    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

    // Reinterpret the flat buffer under a new shape of equal element count.
    Tensor reshaped(std::vector<std::size_t> shape) const;

    static Tensor zeros_like(const Tensor& t) { return Tensor(t.shape()); }

  private:
    std::vector<std::size_t> shape_;
    std::vector<double> values_;
};

// C[m,n] (+)= A[m,k] * B[k,n], row-major. accumulate=false clears C first.
void gemm(const double* a, const double* b, double* c, std::size_t m, std::size_t k, std::size_t n,
          bool accumulate);

// out[n,m] = in[m,n]^T
void transpose(const double* in, double* out, std::size_t m, std::size_t n);

}  // namespace forgetlens
