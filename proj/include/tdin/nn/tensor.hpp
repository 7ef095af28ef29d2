#pragma once

#include <cstddef>
#include <numeric>
#include <vector>

#include "tdin/errors.hpp"

namespace tdin::nn {

// Dense row-major tensor. In practice only vectors and matrices appear.
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> data;

    Tensor() = default;
    Tensor(std::vector<std::size_t> s, std::vector<double> d)
        : shape(std::move(s)), data(std::move(d)) {
        if (data.size() != element_count(shape)) {
            throw ShapeMismatch("tensor data length does not match shape");
        }
    }

    static std::size_t element_count(const std::vector<std::size_t>& s) {
        std::size_t n = 1;
        for (std::size_t d : s) n *= d;
        return n;
    }

    static Tensor zeros(std::vector<std::size_t> s) {
        const std::size_t n = element_count(s);
        return Tensor(std::move(s), std::vector<double>(n, 0.0));
    }

    static Tensor vec(std::vector<double> d) {
        const std::size_t n = d.size();
        return Tensor({n}, std::move(d));
    }

    std::size_t size() const { return data.size(); }

    std::size_t rows() const { return shape.empty() ? 0 : shape[0]; }
    std::size_t cols() const { return shape.size() < 2 ? 1 : shape[1]; }
};

}  // namespace tdin::nn
