#include "spar/tensor.hpp"

#include <cmath>
#include <sstream>

#include "spar/error.hpp"

namespace spar {

std::int64_t shape_product(const std::vector<int>& shape) {
    std::int64_t p = 1;
    for (int d : shape) {
        if (d < 0) throw InvalidArgument("tensor shape has negative dimension");
        p *= d;
    }
    return p;
}

Tensor::Tensor(std::vector<int> shape) : shape_(std::move(shape)) {
    v_.assign(static_cast<size_t>(shape_product(shape_)), 0.0f);
}

Tensor Tensor::full(std::vector<int> shape, float value) {
    Tensor t(std::move(shape));
    t.fill(value);
    return t;
}

void Tensor::fill(float value) {
    for (auto& x : v_) x = value;
}

bool Tensor::all_finite() const {
    for (float x : v_) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

std::string Tensor::shape_str() const {
    std::ostringstream os;
    os << "(";
    for (size_t i = 0; i < shape_.size(); ++i) {
        if (i) os << ",";
        os << shape_[i];
    }
    os << ")";
    return os.str();
}

} // namespace spar
