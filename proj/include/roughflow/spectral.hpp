#pragma once

#include <span>
#include <vector>

#include "roughflow/field.hpp"

namespace roughflow {

/// In-place FFT over a row-major array of the given shape (rank 1 or 2).
/// `forward` uses the e^{-2 pi i k x} kernel; neither direction is normalized.
/// Plans are cached process-wide; execution is safe from concurrent threads.
void fft_in_place(std::span<Complex> data, std::span<const int> shape, bool forward);

namespace spectral {

/// Fourier coefficients normalized so that entry 0 is the mean of f.
std::vector<Complex> forward(const ScalarField& f);
/// Inverse of `forward`.
ScalarField inverse(const PeriodicGrid& grid, std::vector<Complex> coefficients);

/// Multiplies coefficient slot i by multiplier[i] and transforms back.
ScalarField apply_multiplier(const ScalarField& f, std::span<const Complex> multiplier);

/// |2 pi k|^2 per coefficient slot.
std::vector<double> squared_frequencies(const PeriodicGrid& grid);

/// Spectral derivative along `axis`; the Nyquist mode is dropped.
ScalarField derivative(const ScalarField& f, int axis);
/// Multiplier 2 pi i k_axis (zero at Nyquist), one entry per slot.
std::vector<Complex> derivative_multiplier(const PeriodicGrid& grid, int axis);

/// Exact heat semigroup on Fourier modes: mode k times exp(-kappa |2 pi k|^2 t).
ScalarField heat(const ScalarField& f, double kappa_times_t);

}  // namespace spectral

/// Spectral divergence sum_i d b_i / d x_i.
ScalarField divergence(const DiscreteVectorField& b);

/// Spectral gradient, one component per axis.
DiscreteVectorField gradient(const ScalarField& f);

}  // namespace roughflow
