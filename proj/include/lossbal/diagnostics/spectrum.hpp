#pragma once

#include <complex>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace lossbal::diag {

using Complex = std::complex<double>;

/// In-place FFT of a power-of-two length. Forward is unnormalized; inverse scales by 1/n.
void fft(std::span<Complex> data, bool inverse = false);

/// 2D transforms of a square field (row = y, column = x). The side must be a
/// power of two.
Eigen::MatrixXcd fft2(const Eigen::MatrixXd& field);
Eigen::MatrixXcd fft2(const Eigen::MatrixXcd& field);
/// Inverse transform with the 1/N^2 factor.
Eigen::MatrixXcd ifft2(const Eigen::MatrixXcd& modes);

/// Signed integer wavenumber of FFT index i on a grid of side n.
int wavenumber(std::size_t i, std::size_t n);

/// Radially binned power: energy[k] = sum over modes with round(|k|) = k of
/// |u~|^2 / N^4, for k = 0..N/2. Modes beyond the Nyquist ring are dropped.
/// With this normalization the full-mode sum equals the mean of u^2.
struct SpectrumResult {
    std::size_t resolution = 0;
    std::vector<double> energy;
};

SpectrumResult power_spectrum(const Eigen::MatrixXd& field);

/// |FFT2(pred - truth)| per mode.
struct ResidualSpectrum {
    std::size_t epoch = 0;
    Eigen::MatrixXd magnitude;
};

ResidualSpectrum residual_spectrum(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& truth, std::size_t epoch = 0);

/// Values stored point-major (p = iy * side + ix) as a side x side field.
Eigen::MatrixXd to_field(std::span<const double> values, std::size_t side);

void write_spectrum_csv(const std::filesystem::path& path, const std::vector<std::pair<std::string, SpectrumResult>>& spectra);
/// Flat rows: epoch, kx, ky, magnitude.
void write_residual_spectra_csv(const std::filesystem::path& path, const std::vector<ResidualSpectrum>& spectra);

}  // namespace lossbal::diag
