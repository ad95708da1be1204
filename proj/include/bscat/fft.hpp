#pragma once

// Thin RAII layer over FFTW and a zero-padded Toeplitz convolution on
// 3D / 4D boxes. Plans use FFTW_ESTIMATE so results do not depend on timing.

#include <fftw3.h>

#include <array>
#include <complex>
#include <cstring>
#include <functional>
#include <memory>
#include <mutex>
#include <numeric>
#include <vector>

#include "bscat/core.hpp"

namespace bscat {

namespace detail {
inline std::mutex& fftw_planner_mutex() {
    static std::mutex mu;
    return mu;
}
}  // namespace detail

/// fftw_malloc'd complex buffer.
class FftBuffer {
public:
    FftBuffer() = default;
    explicit FftBuffer(std::size_t n) : n_(n), data_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))) {
        if (!data_) throw std::bad_alloc();
        std::memset(data_.get(), 0, sizeof(fftw_complex) * n);
    }
    std::size_t size() const { return n_; }
    fftw_complex* raw() { return data_.get(); }
    cplx* data() { return reinterpret_cast<cplx*>(data_.get()); }
    const cplx* data() const { return reinterpret_cast<const cplx*>(data_.get()); }
    cplx& operator[](std::size_t i) { return data()[i]; }
    void zero() { std::memset(data_.get(), 0, sizeof(fftw_complex) * n_); }

private:
    struct Free {
        void operator()(fftw_complex* p) const { fftw_free(p); }
    };
    std::size_t n_ = 0;
    std::unique_ptr<fftw_complex, Free> data_;
};

/// In-place forward/backward plan pair for a fixed buffer and shape.
class FftPlan {
public:
    FftPlan(FftBuffer& buf, const std::vector<int>& dims) {
        std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
        fwd_ = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), buf.raw(), buf.raw(), FFTW_FORWARD, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), buf.raw(), buf.raw(), FFTW_BACKWARD, FFTW_ESTIMATE);
        if (!fwd_ || !bwd_) throw NumericalError("FFTW plan creation failed");
    }
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;
    ~FftPlan() {
        std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
    }
    void forward() { fftw_execute(fwd_); }
    void backward() { fftw_execute(bwd_); }

private:
    fftw_plan fwd_ = nullptr, bwd_ = nullptr;
};

/// Smallest m >= n whose prime factors are all in {2, 3, 5, 7}.
inline int fft_friendly(int n) {
    for (int m = std::max(n, 1);; ++m) {
        int r = m;
        for (int p : {2, 3, 5, 7})
            while (r % p == 0) r /= p;
        if (r == 1) return m;
    }
}

/// Linear (non-periodic) convolution u[i] = sum_j K[i - j] s[j] on a box of
/// shape n (row-major, last index fastest), for kernels given on offsets in
/// [-(n_d - 1), n_d - 1]. The kernel transform is computed once.
class ToeplitzConvolution {
public:
    using KernelFn = std::function<cplx(const std::vector<int>& offset)>;

    ToeplitzConvolution(std::vector<int> shape, const KernelFn& kernel) : shape_(std::move(shape)) {
        for (int d : shape_) padded_.push_back(fft_friendly(2 * d - 1));
        total_ = std::accumulate(padded_.begin(), padded_.end(), std::size_t{1},
                                 [](std::size_t a, int b) { return a * static_cast<std::size_t>(b); });
        kernel_hat_ = FftBuffer(total_);
        work_ = FftBuffer(total_);
        plan_ = std::make_unique<FftPlan>(work_, padded_);

        // Place K[m] at wrapped index m mod padded.
        const int D = static_cast<int>(shape_.size());
        std::vector<int> m(D);
        for (std::size_t idx = 0; idx < total_; ++idx) {
            std::size_t rem = idx;
            bool inside = true;
            for (int d = D - 1; d >= 0; --d) {
                int w = static_cast<int>(rem % padded_[d]);
                rem /= padded_[d];
                if (w >= shape_[d]) w -= padded_[d];
                if (w <= -shape_[d]) inside = false;
                m[d] = w;
            }
            work_[idx] = inside ? kernel(m) : cplx(0.0);
        }
        plan_->forward();
        const double scale = 1.0 / static_cast<double>(total_);
        for (std::size_t i = 0; i < total_; ++i) kernel_hat_[i] = work_[i] * scale;
    }

    const std::vector<int>& shape() const { return shape_; }
    std::size_t size() const {
        return std::accumulate(shape_.begin(), shape_.end(), std::size_t{1},
                               [](std::size_t a, int b) { return a * static_cast<std::size_t>(b); });
    }

    std::vector<cplx> apply(const std::vector<cplx>& src) {
        if (src.size() != size()) throw ShapeError("convolution input has the wrong size");
        work_.zero();
        scatter(src);
        plan_->forward();
        for (std::size_t i = 0; i < total_; ++i) work_[i] *= kernel_hat_[i];
        plan_->backward();
        return gather();
    }

private:
    // Walk the unpadded box in row-major order and map to the padded index.
    template <class Fn>
    void for_each_index(Fn&& fn) const {
        const int D = static_cast<int>(shape_.size());
        std::vector<int> c(D, 0);
        const std::size_t n = size();
        for (std::size_t idx = 0; idx < n; ++idx) {
            std::size_t p = 0;
            for (int d = 0; d < D; ++d) p = p * padded_[d] + c[d];
            fn(idx, p);
            for (int d = D - 1; d >= 0; --d) {
                if (++c[d] < shape_[d]) break;
                c[d] = 0;
            }
        }
    }
    void scatter(const std::vector<cplx>& src) {
        for_each_index([&](std::size_t i, std::size_t p) { work_[p] = src[i]; });
    }
    std::vector<cplx> gather() {
        std::vector<cplx> out(size());
        for_each_index([&](std::size_t i, std::size_t p) { out[i] = work_[p]; });
        return out;
    }

    std::vector<int> shape_, padded_;
    std::size_t total_ = 0;
    FftBuffer kernel_hat_, work_;
    std::unique_ptr<FftPlan> plan_;
};

}  // namespace bscat
