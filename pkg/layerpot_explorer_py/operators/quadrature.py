import numpy as np
import scipy.linalg
import scipy.signal

from layerpot_explorer_py.exceptions.custom_exceptions import GeometryError


def _check_size(N):
    if N < 8 or N % 2:
        raise GeometryError(f"Quadrature needs an even number of nodes >= 8, got N={N}.")


def kress_log_weights(N):
    """
    First column of the Kress product-quadrature matrix for log(4 sin^2((t - tau)/2)).

    R_j = -(4 pi/N) sum_{m=1}^{N/2-1} cos(m t_j)/m - (4 pi/N^2) cos(N t_j/2).
    """
    _check_size(N)
    t = 2.0 * np.pi * np.arange(N) / N
    m = np.arange(1, N // 2)
    return (-(4.0 * np.pi / N) * (np.cos(np.outer(t, m)) @ (1.0 / m))
            - (4.0 * np.pi / N ** 2) * np.cos(0.5 * N * t))


def kress_log_matrix(N):
    return scipy.linalg.circulant(kress_log_weights(N))


def differentiation_matrix(N):
    """
    Spectral differentiation in the parameter t on N equispaced periodic nodes.

    Circulant with first column c_0 = 0, c_m = (1/2)(-1)^m cot(m h/2), h = 2 pi/N; the
    Nyquist mode is mapped to zero.
    """
    _check_size(N)
    h = 2.0 * np.pi / N
    m = np.arange(1, N)
    column = np.zeros(N)
    column[1:] = 0.5 * (-1.0) ** m / np.tan(0.5 * m * h)
    return scipy.linalg.circulant(column)


def resample_density(values, M):
    """Spectral (Fourier) resampling of periodic node values to M nodes."""
    return scipy.signal.resample(np.asarray(values, dtype=float), M)


def lowpass_filter(N, band):
    """Real N x N projector onto the Fourier modes |k| <= band, the Nyquist mode excluded."""
    k = np.abs(np.fft.fftfreq(N, d=1.0 / N))
    mask = ((k <= band) & (k < N // 2)).astype(float)
    return np.real(np.fft.ifft(mask[:, None] * np.fft.fft(np.eye(N), axis=0), axis=0))
