#pragma once

// Thin RAII layer over FFTW's 3-D real transforms. Plans are created once per
// grid size and then executed through the new-array interface, which is
// thread-safe; only planning itself is serialized.

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <span>

#include "mixgn/grid.hpp"

namespace mixgn {

namespace detail {

struct FftwDeleter {
    void operator()(void* p) const { fftw_free(p); }
};

template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwDeleter>;

template <class T>
FftwBuffer<T> fftw_buffer(std::size_t count)
{
    auto* raw = static_cast<T*>(fftw_malloc(sizeof(T) * count));
    if (raw == nullptr) {
        throw std::bad_alloc();
    }
    return FftwBuffer<T>(raw);
}

class FftPlanPair {
public:
    explicit FftPlanPair(int n) : n_(n)
    {
        const auto nn = static_cast<std::size_t>(n);
        auto real = fftw_buffer<double>(nn * nn * nn);
        auto cplx = fftw_buffer<fftw_complex>(nn * nn * (nn / 2 + 1));
        forward_ = fftw_plan_dft_r2c_3d(n, n, n, real.get(), cplx.get(), FFTW_ESTIMATE);
        backward_ = fftw_plan_dft_c2r_3d(n, n, n, cplx.get(), real.get(), FFTW_ESTIMATE);
    }
    ~FftPlanPair()
    {
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(backward_);
    }
    FftPlanPair(const FftPlanPair&) = delete;
    FftPlanPair& operator=(const FftPlanPair&) = delete;

    void forward(double* in, fftw_complex* out) const { fftw_execute_dft_r2c(forward_, in, out); }
    void backward(fftw_complex* in, double* out) const { fftw_execute_dft_c2r(backward_, in, out); }

private:
    int n_;
    fftw_plan forward_ = nullptr;
    fftw_plan backward_ = nullptr;
};

inline const FftPlanPair& plans_for(int n)
{
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<FftPlanPair>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[n];
    if (!slot) {
        slot = std::make_unique<FftPlanPair>(n);
    }
    return *slot;
}

} // namespace detail

/// Unnormalized forward transform c_k = sum_j u_j e^{-2 pi i j.k / n}.
inline Spectrum forward(const Field& u)
{
    const GridSpec& g = u.grid();
    auto in = detail::fftw_buffer<double>(g.size());
    auto out = detail::fftw_buffer<fftw_complex>(g.spectrum_size());
    std::copy(u.values().begin(), u.values().end(), in.get());
    detail::plans_for(g.n).forward(in.get(), out.get());
    Spectrum spec{g, std::vector<std::complex<double>>(g.spectrum_size())};
    const auto* src = reinterpret_cast<const std::complex<double>*>(out.get());
    std::copy(src, src + g.spectrum_size(), spec.coefficients.begin());
    return spec;
}

/// Inverse of forward (includes the 1/n^3 factor).
inline Field inverse(const Spectrum& spec)
{
    const GridSpec& g = spec.grid;
    auto in = detail::fftw_buffer<fftw_complex>(g.spectrum_size());
    auto out = detail::fftw_buffer<double>(g.size());
    std::copy(spec.coefficients.begin(), spec.coefficients.end(), reinterpret_cast<std::complex<double>*>(in.get()));
    detail::plans_for(g.n).backward(in.get(), out.get());
    const double scale = 1.0 / static_cast<double>(g.size());
    std::vector<double> values(g.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        values[i] = out[i] * scale;
    }
    return Field(g, std::move(values));
}

} // namespace mixgn
