#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace hexplore {

// Dense row-major 2D array.
template <class T>
class Grid2D {
public:
    Grid2D() = default;
    Grid2D(int rows, int cols, T fill = T{})
        : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {
        if (rows < 0 || cols < 0) throw std::invalid_argument("Grid2D: negative dimensions");
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool in_bounds(int r, int c) const { return r >= 0 && r < rows_ && c >= 0 && c < cols_; }

    T& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
    const T& operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }

    T& at(int r, int c) {
        if (!in_bounds(r, c)) throw std::out_of_range("Grid2D::at");
        return (*this)(r, c);
    }
    const T& at(int r, int c) const {
        if (!in_bounds(r, c)) throw std::out_of_range("Grid2D::at");
        return (*this)(r, c);
    }

    std::vector<T>& data() { return data_; }
    const std::vector<T>& data() const { return data_; }

    bool operator==(const Grid2D&) const = default;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<T> data_;
};

}  // namespace hexplore
