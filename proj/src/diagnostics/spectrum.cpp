#include "lossbal/diagnostics/spectrum.hpp"

#include <bit>
#include <cmath>
#include <mutex>
#include <stdexcept>

#include <fftw3.h>

#include "lossbal/csv.hpp"

namespace lossbal::diag {

namespace {

void require_pow2(std::size_t n, const char* what) {
    if (n == 0 || !std::has_single_bit(n))
        throw std::invalid_argument(std::string(what) + ": side " + std::to_string(n) + " is not a power of two");
}

// Planning is not thread-safe in FFTW; execution of a finished plan is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

void transform(Complex* data, int rank, int n, bool inverse) {
    auto* buf = reinterpret_cast<fftw_complex*>(data);
    const int dims[2] = {n, n};
    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_dft(rank, dims, buf, buf, inverse ? FFTW_BACKWARD : FFTW_FORWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
}

void require_square(Eigen::Index rows, Eigen::Index cols, const char* what) {
    if (rows != cols) throw std::invalid_argument(std::string(what) + ": field must be square");
    require_pow2(static_cast<std::size_t>(rows), what);
}

}  // namespace

void fft(std::span<Complex> a, bool inverse) {
    const std::size_t n = a.size();
    require_pow2(n, "fft");
    transform(a.data(), 1, static_cast<int>(n), inverse);
    if (inverse)
        for (auto& v : a) v /= static_cast<double>(n);
}

Eigen::MatrixXcd fft2(const Eigen::MatrixXd& field) { return fft2(Eigen::MatrixXcd(field.cast<Complex>())); }

Eigen::MatrixXcd fft2(const Eigen::MatrixXcd& field) {
    require_square(field.rows(), field.cols(), "fft2");
    Eigen::MatrixXcd m = field;
    transform(m.data(), 2, static_cast<int>(m.rows()), false);
    return m;
}

Eigen::MatrixXcd ifft2(const Eigen::MatrixXcd& modes) {
    require_square(modes.rows(), modes.cols(), "ifft2");
    Eigen::MatrixXcd m = modes;
    transform(m.data(), 2, static_cast<int>(m.rows()), true);
    return m / static_cast<double>(m.size());
}

int wavenumber(std::size_t i, std::size_t n) {
    return i <= n / 2 ? static_cast<int>(i) : static_cast<int>(i) - static_cast<int>(n);
}

SpectrumResult power_spectrum(const Eigen::MatrixXd& field) {
    const Eigen::MatrixXcd modes = fft2(field);
    const auto n = static_cast<std::size_t>(field.rows());
    const double norm = std::pow(static_cast<double>(n), 4);
    SpectrumResult out;
    out.resolution = n;
    out.energy.assign(n / 2 + 1, 0.0);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) {
            const double kx = wavenumber(c, n), ky = wavenumber(r, n);
            const auto k = static_cast<std::size_t>(std::lround(std::hypot(kx, ky)));
            if (k < out.energy.size())
                out.energy[k] += std::norm(modes(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c))) / norm;
        }
    return out;
}

ResidualSpectrum residual_spectrum(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& truth, std::size_t epoch) {
    if (pred.rows() != truth.rows() || pred.cols() != truth.cols())
        throw std::invalid_argument("residual_spectrum: grid mismatch");
    return {epoch, fft2(Eigen::MatrixXd(pred - truth)).cwiseAbs()};
}

Eigen::MatrixXd to_field(std::span<const double> values, std::size_t side) {
    if (values.size() != side * side) throw std::invalid_argument("to_field: value count is not side^2");
    Eigen::MatrixXd f(static_cast<Eigen::Index>(side), static_cast<Eigen::Index>(side));
    for (std::size_t iy = 0; iy < side; ++iy)
        for (std::size_t ix = 0; ix < side; ++ix)
            f(static_cast<Eigen::Index>(iy), static_cast<Eigen::Index>(ix)) = values[iy * side + ix];
    return f;
}

void write_spectrum_csv(const std::filesystem::path& path, const std::vector<std::pair<std::string, SpectrumResult>>& spectra) {
    CsvWriter csv(path);
    std::vector<std::string> cols{"k"};
    std::size_t bins = 0;
    for (const auto& [name, s] : spectra) {
        cols.push_back(name);
        bins = std::max(bins, s.energy.size());
    }
    csv.header(cols);
    for (std::size_t k = 0; k < bins; ++k) {
        csv.cell(static_cast<long long>(k));
        for (const auto& [name, s] : spectra)
            csv.cell(k < s.energy.size() ? std::optional<double>(s.energy[k]) : std::nullopt);
        csv.end_row();
    }
    csv.close();
}

void write_residual_spectra_csv(const std::filesystem::path& path, const std::vector<ResidualSpectrum>& spectra) {
    CsvWriter csv(path);
    csv.header({"epoch", "kx", "ky", "magnitude"});
    for (const auto& s : spectra) {
        const auto n = static_cast<std::size_t>(s.magnitude.rows());
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c) {
                csv.cell(static_cast<long long>(s.epoch))
                    .cell(static_cast<long long>(wavenumber(c, n)))
                    .cell(static_cast<long long>(wavenumber(r, n)))
                    .cell(s.magnitude(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
                csv.end_row();
            }
    }
    csv.close();
}

}  // namespace lossbal::diag
