#pragma once

#include <complex>
#include <memory>
#include <vector>

namespace dsk {

using cplx = std::complex<double>;

/// Periodic DFT on N nodes of spacing h. Plans use FFTW_ESTIMATE so results are reproducible.
class Fourier {
public:
    Fourier(int n, double h);
    ~Fourier();
    Fourier(const Fourier& other);
    Fourier& operator=(const Fourier&) = delete;

    int size() const { return n_; }
    double spacing() const { return h_; }
    /// Wavenumbers of the derivative symbol; the Nyquist entry (even N) is zero.
    const std::vector<double>& wavenumbers() const { return kappa_; }
    const std::vector<double>& wavenumbers_sq() const { return kappa2_; }

    void forward(const cplx* in, cplx* out) const;
    /// Unnormalized inverse; callers divide by N.
    void backward(const cplx* in, cplx* out) const;

    /// out = F⁻¹(symbol · F(in)); in and out may alias.
    void apply(const cplx* in, cplx* out, const cplx* symbol) const;
    void apply(const cplx* in, cplx* out, const double* symbol) const;

    /// Spectral derivative D.
    void derivative(const cplx* in, cplx* out) const;

private:
    int n_;
    double h_;
    std::vector<double> kappa_, kappa2_;
    struct Plans;
    std::unique_ptr<Plans> plans_;
};

} // namespace dsk
