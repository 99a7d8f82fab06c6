#ifndef PCMC_ARRAY3_HPP
#define PCMC_ARRAY3_HPP

#include <cassert>
#include <cstddef>
#include <vector>

namespace pcmc {

/// Dense 3D array, z-fastest storage.
template <typename T>
class Array3 {
public:
    Array3() = default;
    Array3(int nx, int ny, int nz, T fill = T{})
        : nx_(nx), ny_(ny), nz_(nz),
          data_(static_cast<std::size_t>(nx) * ny * nz, fill) {}

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    int nz() const { return nz_; }
    std::size_t size() const { return data_.size(); }

    T& operator()(int i, int j, int k) {
        assert(i >= 0 && i < nx_ && j >= 0 && j < ny_ && k >= 0 && k < nz_);
        return data_[(static_cast<std::size_t>(i) * ny_ + j) * nz_ + k];
    }
    const T& operator()(int i, int j, int k) const {
        assert(i >= 0 && i < nx_ && j >= 0 && j < ny_ && k >= 0 && k < nz_);
        return data_[(static_cast<std::size_t>(i) * ny_ + j) * nz_ + k];
    }

    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }
    std::vector<T>& raw() { return data_; }
    const std::vector<T>& raw() const { return data_; }

    void fill(T v) { data_.assign(data_.size(), v); }

private:
    int nx_ = 0, ny_ = 0, nz_ = 0;
    std::vector<T> data_;
};

} // namespace pcmc

#endif
