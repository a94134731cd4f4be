#include "roughfou/fou.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <istream>
#include <mutex>
#include <ostream>

#include <fftw3.h>

#include "roughfou/errors.hpp"
#include "roughfou/rng.hpp"

namespace roughfou {

// ---------------- grids and weights ----------------

void GridSpec::validate() const {
    if (!(T > 0.0) || !(dt > 0.0)) throw DomainError("GridSpec: T and dt must be positive");
    if (n_forward() < 1) throw DomainError("GridSpec: T/dt must round to at least one step");
    if (n_history() < 0) throw DomainError("GridSpec: negative history step count");
    if (static_cast<double>(n_forward() + n_history()) > 3e8) {
        throw DomainError("GridSpec: grid too large");
    }
}

double GridSpec::resolved_history() const {
    return history < 0.0 ? std::sqrt(T / dt) : history;
}

std::int64_t GridSpec::n_forward() const { return std::llround(T / dt); }

std::int64_t GridSpec::n_history() const { return std::llround(resolved_history() / dt); }

void FouParams::validate() const {
    kernel.validate();
    if (!(eps > 0.0)) throw DomainError("FouParams: eps must be positive");
}

std::vector<double> cell_weights(const FouParams& fp, const GridSpec& grid,
                                 const QuadratureSpec& spec) {
    fp.validate();
    grid.validate();
    const std::int64_t len = grid.n_history() + grid.n_forward();
    const double se = std::sqrt(fp.eps);
    const double step = grid.dt / fp.eps;
    std::vector<double> khat(len);
    double plo = 0.0;
    for (std::int64_t j = 0; j < len; ++j) {
        const double phi = kernel_primitive(static_cast<double>(j + 1) * step, fp.kernel, spec);
        khat[j] = se * (phi - plo);
        plo = phi;
    }
    return khat;
}

double discrete_variance(const std::vector<double>& khat, double dt) {
    double s = 0.0, c = 0.0;
    for (double k : khat) {
        const double x = k * k;
        const double t = s + x;
        c += std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
        s = t;
    }
    return (s + c) / dt;
}

double discrete_covariance(const std::vector<double>& khat, double dt, std::int64_t lag) {
    if (lag < 0) throw DomainError("discrete_covariance: lag must be >= 0");
    double s = 0.0, c = 0.0;
    for (std::size_t j = 0; j + lag < khat.size(); ++j) {
        const double x = khat[j] * khat[j + static_cast<std::size_t>(lag)];
        const double t = s + x;
        c += std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
        s = t;
    }
    return (s + c) / dt;
}

double history_truncation_variance(const FouParams& fp, const GridSpec& grid,
                                   const QuadratureSpec& spec) {
    fp.validate();
    grid.validate();
    const double m_over_eps = grid.effective_history() / fp.eps;
    return std::max(0.0, sigma_ou_sq(fp.kernel) - kernel_l2_partial(m_over_eps, fp.kernel, spec));
}

// ---------------- FFT helpers ----------------

namespace {

std::mutex& fftw_mutex() {
    static std::mutex m;
    return m;
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// one-shot linear convolution, out[l] = sum_j a[j] b[l-j], first n_out terms
void fft_convolve(const std::vector<double>& a, const std::vector<double>& b,
                  std::vector<double>& out, std::size_t n_out) {
    const std::size_t len = next_pow2(a.size() + b.size());
    std::vector<double> ta(len, 0.0), tb(len, 0.0);
    std::copy(a.begin(), a.end(), ta.begin());
    std::copy(b.begin(), b.end(), tb.begin());
    std::vector<std::complex<double>> fa(len / 2 + 1), fb(len / 2 + 1);
    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        fftw_plan pa = fftw_plan_dft_r2c_1d(static_cast<int>(len), ta.data(),
                                            reinterpret_cast<fftw_complex*>(fa.data()),
                                            FFTW_ESTIMATE);
        fftw_plan pb = fftw_plan_dft_r2c_1d(static_cast<int>(len), tb.data(),
                                            reinterpret_cast<fftw_complex*>(fb.data()),
                                            FFTW_ESTIMATE);
        fftw_execute(pa);
        fftw_execute(pb);
        for (std::size_t i = 0; i < fa.size(); ++i) fa[i] *= fb[i];
        fftw_plan pc = fftw_plan_dft_c2r_1d(static_cast<int>(len),
                                            reinterpret_cast<fftw_complex*>(fa.data()),
                                            ta.data(), FFTW_ESTIMATE);
        fftw_execute(pc);
        fftw_destroy_plan(pa);
        fftw_destroy_plan(pb);
        fftw_destroy_plan(pc);
    }
    out.assign(n_out, 0.0);
    for (std::size_t l = 0; l < n_out; ++l) out[l] = ta[l] / static_cast<double>(len);
}

}  // namespace

// persistent per-path convolution plans for long grids
struct FouPathSet::Fft {
    std::size_t len = 0;
    std::vector<std::complex<double>> wspec;  // spectrum of the forward weights
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;

    Fft(const std::vector<double>& wfwd, std::size_t n) {
        len = next_pow2(2 * n);
        std::vector<double> tmp(len, 0.0);
        std::copy(wfwd.begin(), wfwd.end(), tmp.begin());
        wspec.resize(len / 2 + 1);
        std::lock_guard<std::mutex> lock(fftw_mutex());
        r2c = fftw_plan_dft_r2c_1d(static_cast<int>(len), tmp.data(),
                                   reinterpret_cast<fftw_complex*>(wspec.data()),
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_execute_dft_r2c(r2c, tmp.data(), reinterpret_cast<fftw_complex*>(wspec.data()));
        std::vector<std::complex<double>> cbuf(len / 2 + 1);
        c2r = fftw_plan_dft_c2r_1d(static_cast<int>(len),
                                   reinterpret_cast<fftw_complex*>(cbuf.data()), tmp.data(),
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    }

    ~Fft() {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        if (r2c) fftw_destroy_plan(r2c);
        if (c2r) fftw_destroy_plan(c2r);
    }
};

// ---------------- path set ----------------

FouPathSet::FouPathSet(const FouParams& fp, const GridSpec& grid, std::uint64_t n_paths,
                       std::uint64_t seed, std::uint64_t history_id, const QuadratureSpec& spec)
    : params_(fp), grid_(grid), n_paths_(n_paths), seed_(seed) {
    fp.validate();
    grid.validate();
    if (n_paths == 0) throw DomainError("FouPathSet: n_paths must be positive");

    khat_ = cell_weights(fp, grid, spec);
    const std::int64_t n = grid.n_forward();
    const std::int64_t nh = grid.n_history();

    wfwd_.assign(khat_.begin(), khat_.begin() + n);
    for (double& w : wfwd_) w /= grid.dt;

    // history draw: one stream per history_id, independent of eps (CRN)
    history_.history_id = history_id;
    history_.dw.resize(nh);
    {
        Splitmix64 g = substream(seed, kStreamHistory, history_id);
        const double sd = std::sqrt(grid.dt);
        std::int64_t k = 0;
        while (k < nh) {
            const NormalPair p = normal_pair(g);
            history_.dw[k++] = sd * p.z0;
            if (k < nh) history_.dw[k++] = sd * p.z1;
        }
    }

    // induced drift on the forward grid: drift[k] = (1/dt) sum_m Khat_{k+m} rdw[m]
    history_.drift.assign(n + 1, 0.0);
    if (nh > 0) {
        std::vector<double> rdw(history_.dw.rbegin(), history_.dw.rend());
        if (static_cast<double>(n + 1) * static_cast<double>(nh) <= 6.7e7) {
            for (std::int64_t k = 0; k <= n; ++k) {
                double s = 0.0;
                const double* kh = khat_.data() + k;
                for (std::int64_t m = 0; m < nh; ++m) s += kh[m] * rdw[m];
                history_.drift[k] = s / grid.dt;
            }
        } else {
            // drift[k] = conv(khat, dw)[nh-1+k]
            std::vector<double> c;
            fft_convolve(khat_, history_.dw, c, static_cast<std::size_t>(nh + n));
            for (std::int64_t k = 0; k <= n; ++k) {
                history_.drift[k] = c[static_cast<std::size_t>(nh - 1 + k)] / grid.dt;
            }
        }
    }

    if (n >= 4096) fft_ = new Fft(wfwd_, static_cast<std::size_t>(n));
}

FouPathSet::~FouPathSet() { delete fft_; }

void FouPathSet::forward_convolve(const std::vector<double>& dwy, std::vector<double>& f) const {
    const std::int64_t n = grid_.n_forward();
    f.assign(n + 1, 0.0);
    if (!fft_) {
        for (std::int64_t k = 1; k <= n; ++k) {
            double s = 0.0;
            const double* w = wfwd_.data();
            const double* x = dwy.data() + (k - 1);
            for (std::int64_t j = 0; j < k; ++j) s += w[j] * x[-j];
            f[k] = s;
        }
        return;
    }
    const std::size_t len = fft_->len;
    std::vector<double> buf(len, 0.0);
    std::copy(dwy.begin(), dwy.end(), buf.begin());
    std::vector<std::complex<double>> spec(len / 2 + 1);
    fftw_execute_dft_r2c(fft_->r2c, buf.data(), reinterpret_cast<fftw_complex*>(spec.data()));
    for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= fft_->wspec[i];
    fftw_execute_dft_c2r(fft_->c2r, reinterpret_cast<fftw_complex*>(spec.data()), buf.data());
    const double scale = 1.0 / static_cast<double>(len);
    for (std::int64_t k = 1; k <= n; ++k) f[k] = buf[k - 1] * scale;
}

void FouPathSet::path(std::uint64_t i, FouPath& out) const {
    if (i >= n_paths_) throw DomainError("FouPathSet::path: index out of range");
    const std::int64_t n = grid_.n_forward();
    out.dwy.resize(n);
    out.dwp.resize(n);
    Splitmix64 g = substream(seed_, kStreamForward, i);
    const double sd = std::sqrt(grid_.dt);
    for (std::int64_t k = 0; k < n; ++k) {
        const NormalPair p = normal_pair(g);
        out.dwy[k] = sd * p.z0;
        out.dwp[k] = sd * p.z1;
    }
    std::vector<double> f;
    forward_convolve(out.dwy, f);
    out.y.resize(n + 1);
    for (std::int64_t k = 0; k <= n; ++k) out.y[k] = history_.drift[k] + f[k];
}

FouPath FouPathSet::path(std::uint64_t i) const {
    FouPath p;
    path(i, p);
    return p;
}

// ---------------- binary dump ----------------

namespace {

template <class T>
void put(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
void get(std::istream& is, T& v) {
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
}

void put_vec(std::ostream& os, const std::vector<double>& v) {
    os.write(reinterpret_cast<const char*>(v.data()),
             static_cast<std::streamsize>(v.size() * sizeof(double)));
}

void get_vec(std::istream& is, std::vector<double>& v, std::size_t n) {
    v.resize(n);
    is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
}

constexpr char kMagic[8] = {'R', 'F', 'O', 'U', 'P', 'A', 'T', 'H'};

}  // namespace

void dump_paths(const FouPathSet& set, std::ostream& os, std::uint64_t n_dump) {
    n_dump = std::min<std::uint64_t>(n_dump, set.n_paths());
    os.write(kMagic, 8);
    put<std::uint32_t>(os, 1u);  // version
    put<std::uint32_t>(os, 1u);  // endian marker
    put(os, set.params().kernel.H);
    put(os, set.params().kernel.a);
    put(os, set.params().eps);
    put(os, set.grid().T);
    put(os, set.grid().dt);
    put(os, set.grid().resolved_history());
    put<std::uint64_t>(os, static_cast<std::uint64_t>(set.grid().n_forward()));
    put<std::uint64_t>(os, static_cast<std::uint64_t>(set.grid().n_history()));
    put<std::uint64_t>(os, n_dump);
    put<std::uint64_t>(os, set.seed());
    put<std::uint64_t>(os, set.history().history_id);
    put_vec(os, set.history().dw);
    FouPath p;
    for (std::uint64_t i = 0; i < n_dump; ++i) {
        set.path(i, p);
        put_vec(os, p.dwy);
        put_vec(os, p.dwp);
        put_vec(os, p.y);
    }
    if (!os) throw ConfigError("dump_paths: write failed");
}

PathDump load_paths(std::istream& is) {
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kMagic, 8) != 0) {
        throw ConfigError("load_paths: bad magic");
    }
    std::uint32_t version = 0, endian = 0;
    get(is, version);
    get(is, endian);
    if (version != 1 || endian != 1) throw ConfigError("load_paths: unsupported format");
    PathDump d;
    double hist_len = 0.0;
    get(is, d.params.kernel.H);
    get(is, d.params.kernel.a);
    get(is, d.params.eps);
    get(is, d.grid.T);
    get(is, d.grid.dt);
    get(is, hist_len);
    d.grid.history = hist_len;
    std::uint64_t n = 0, nh = 0, n_paths = 0;
    get(is, n);
    get(is, nh);
    get(is, n_paths);
    get(is, d.seed);
    get(is, d.history_id);
    if (!is || n != static_cast<std::uint64_t>(d.grid.n_forward()) ||
        nh != static_cast<std::uint64_t>(d.grid.n_history())) {
        throw ConfigError("load_paths: inconsistent header");
    }
    get_vec(is, d.history_dw, nh);
    d.paths.resize(n_paths);
    for (auto& p : d.paths) {
        get_vec(is, p.dwy, n);
        get_vec(is, p.dwp, n);
        get_vec(is, p.y, n + 1);
    }
    if (!is) throw ConfigError("load_paths: truncated file");
    return d;
}

}  // namespace roughfou
