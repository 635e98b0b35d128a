#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace spar {

// Dense row-major float32 tensor. Activations use NHWC index order.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::vector<int> shape);

    static Tensor zeros(std::vector<int> shape) { return Tensor(std::move(shape)); }
    static Tensor full(std::vector<int> shape, float value);

    int ndim() const { return static_cast<int>(shape_.size()); }
    int dim(int i) const { return shape_[static_cast<size_t>(i)]; }
    const std::vector<int>& shape() const { return shape_; }
    std::string shape_str() const;
    std::int64_t size() const { return static_cast<std::int64_t>(v_.size()); }

    float* data() { return v_.data(); }
    const float* data() const { return v_.data(); }
    float& operator[](std::int64_t i) { return v_[static_cast<size_t>(i)]; }
    float operator[](std::int64_t i) const { return v_[static_cast<size_t>(i)]; }

    // NHWC accessor.
    float& at(int n, int h, int w, int c) {
        return v_[static_cast<size_t>(((static_cast<std::int64_t>(n) * shape_[1] + h) * shape_[2] + w) * shape_[3] + c)];
    }
    float at(int n, int h, int w, int c) const {
        return v_[static_cast<size_t>(((static_cast<std::int64_t>(n) * shape_[1] + h) * shape_[2] + w) * shape_[3] + c)];
    }

    bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }
    void fill(float value);
    bool all_finite() const;

private:
    std::vector<int> shape_;
    std::vector<float> v_;
};

std::int64_t shape_product(const std::vector<int>& shape);

} // namespace spar
