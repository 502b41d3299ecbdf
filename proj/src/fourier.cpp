#include "dsk/fourier.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>

namespace dsk {

namespace {
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
} // namespace

struct Fourier::Plans {
    fftw_plan fwd = nullptr, bwd = nullptr;
    explicit Plans(int n) {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_complex* a = fftw_alloc_complex(n);
        fftw_complex* b = fftw_alloc_complex(n);
        unsigned flags = FFTW_ESTIMATE;
        fwd = fftw_plan_dft_1d(n, a, b, FFTW_FORWARD, flags);
        bwd = fftw_plan_dft_1d(n, a, b, FFTW_BACKWARD, flags);
        fftw_free(a);
        fftw_free(b);
    }
    ~Plans() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
    }
};

Fourier::Fourier(int n, double h) : n_(n), h_(h), kappa_(n), plans_(std::make_unique<Plans>(n)) {
    const double L = n * h;
    for (int k = 0; k < n; ++k) {
        int kk = (k <= n / 2) ? k : k - n;
        if (n % 2 == 0 && k == n / 2) kk = 0;
        kappa_[k] = 2.0 * M_PI * kk / L;
    }
    kappa2_.resize(n);
    for (int k = 0; k < n; ++k) kappa2_[k] = kappa_[k] * kappa_[k];
}

Fourier::Fourier(const Fourier& o)
    : n_(o.n_), h_(o.h_), kappa_(o.kappa_), kappa2_(o.kappa2_), plans_(std::make_unique<Plans>(o.n_)) {}

Fourier::~Fourier() = default;

namespace {

// Plans are made on fftw-aligned arrays; other arrays go through aligned scratch.
void execute(fftw_plan p, int n, const cplx* in, cplx* out) {
    auto* i = reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in));
    auto* o = reinterpret_cast<fftw_complex*>(out);
    if (in != out && fftw_alignment_of(reinterpret_cast<double*>(i)) == 0 && fftw_alignment_of(reinterpret_cast<double*>(o)) == 0) {
        fftw_execute_dft(p, i, o);
        return;
    }
    fftw_complex* a = fftw_alloc_complex(2 * size_t(n));
    fftw_complex* b = a + n;
    std::copy(in, in + n, reinterpret_cast<cplx*>(a));
    fftw_execute_dft(p, a, b);
    std::copy(reinterpret_cast<cplx*>(b), reinterpret_cast<cplx*>(b) + n, out);
    fftw_free(a);
}

struct Scratch {
    fftw_complex* p = nullptr;
    int n = 0;
    ~Scratch() { fftw_free(p); }
    cplx* get(int size) {
        if (size != n) {
            fftw_free(p);
            p = fftw_alloc_complex(size);
            n = size;
        }
        return reinterpret_cast<cplx*>(p);
    }
};

cplx* scratch(int n) {
    thread_local Scratch s;
    return s.get(n);
}

} // namespace

void Fourier::forward(const cplx* in, cplx* out) const { execute(plans_->fwd, n_, in, out); }

void Fourier::backward(const cplx* in, cplx* out) const { execute(plans_->bwd, n_, in, out); }

void Fourier::apply(const cplx* in, cplx* out, const cplx* symbol) const {
    cplx* buf = scratch(n_);
    forward(in, buf);
    const double s = 1.0 / n_;
    for (int k = 0; k < n_; ++k) buf[k] *= symbol[k] * s;
    backward(buf, out);
}

void Fourier::apply(const cplx* in, cplx* out, const double* symbol) const {
    cplx* buf = scratch(n_);
    forward(in, buf);
    const double s = 1.0 / n_;
    for (int k = 0; k < n_; ++k) buf[k] *= symbol[k] * s;
    backward(buf, out);
}

void Fourier::derivative(const cplx* in, cplx* out) const {
    cplx* buf = scratch(n_);
    forward(in, buf);
    const double s = 1.0 / n_;
    for (int k = 0; k < n_; ++k) buf[k] *= cplx(0, kappa_[k] * s);
    backward(buf, out);
}

} // namespace dsk
