"""Fourier differentiation and interpolation of periodic samples on [0, 2pi)"""

import numpy as np


def angles(m: int) -> np.ndarray:
    return 2.0 * np.pi * np.arange(m) / m


def _wavenumbers(m: int) -> np.ndarray:
    return np.arange(m // 2 + 1, dtype=float)


def _derivative_factor(m: int, order: int) -> np.ndarray:
    factor = (1j * _wavenumbers(m)) ** order
    if order % 2 == 1 and m % 2 == 0:
        factor[-1] = 0.0  # odd derivatives of the Nyquist mode are not representable
    return factor


def derivative(values: np.ndarray, order: int = 1, axis: int = -1) -> np.ndarray:
    """Spectral derivative of periodic samples along `axis`."""
    values = np.asarray(values, dtype=float)
    if order == 0:
        return values.copy()
    m = values.shape[axis]
    coeffs = np.fft.rfft(values, axis=axis)
    shape = [1] * values.ndim
    shape[axis] = -1
    coeffs = coeffs * _derivative_factor(m, order).reshape(shape)
    return np.fft.irfft(coeffs, n=m, axis=axis)


def coefficients(values: np.ndarray, order: int = 0, symbol=None) -> np.ndarray:
    """
    Weighted half-spectrum c_k such that f^(order)(theta) = Re sum_k c_k e^{ik theta}.

    `symbol(k)` multiplies the spectrum before differentiation, e.g. 1 - k^2 for h'' + h.
    Works row-wise on 2D input.
    """
    values = np.asarray(values, dtype=float)
    m = values.shape[-1]
    coeffs = np.fft.rfft(values, axis=-1) / m * _derivative_factor(m, order)
    if symbol is not None:
        coeffs = coeffs * symbol(_wavenumbers(m))
    weights = np.full(coeffs.shape[-1], 2.0)
    weights[0] = 1.0
    if m % 2 == 0:
        weights[-1] = 1.0
    return coeffs * weights


def evaluate_coefficients(coeffs: np.ndarray, theta) -> np.ndarray:
    """Evaluate `coefficients` output at angles; 2D coefficients pair row j with theta[j]."""
    theta = np.asarray(theta, dtype=float)
    k = np.arange(coeffs.shape[-1], dtype=float)
    if coeffs.ndim == 1:
        return np.real(np.exp(1j * np.multiply.outer(theta, k)) @ coeffs)
    return np.real(np.sum(np.exp(1j * theta[:, None] * k) * coeffs, axis=-1))


def evaluate(values: np.ndarray, theta, order: int = 0) -> np.ndarray:
    """Evaluate the trigonometric interpolant (or its derivative) at arbitrary angles."""
    return evaluate_coefficients(coefficients(values, order), theta)


def upsample(values: np.ndarray, factor: int) -> np.ndarray:
    """Zero-padded Fourier upsampling by an integer factor."""
    values = np.asarray(values, dtype=float)
    m = values.shape[-1]
    coeffs = np.fft.rfft(values)
    if m % 2 == 0:
        coeffs[-1] *= 0.5
    padded = np.zeros(m * factor // 2 + 1, dtype=complex)
    padded[: coeffs.size] = coeffs
    return np.fft.irfft(padded, n=m * factor) * factor
