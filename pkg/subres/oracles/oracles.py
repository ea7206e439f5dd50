from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from subres.errors import DomainError, NumericalError

"""
Closed-form and semi-analytic references for the BEM capacitance and
for the nonlinear resonance system.
"""

IMAGE_MAX_ITERATIONS = 10000


@dataclass
class ImageChargeState:
    """
    Kelvin image charges on the common axis of two spheres.
    Charges are in units where the potential of q at distance R is q / R,
    so capacitance coefficients are 4 pi times summed charges.
    """
    charges: list = field(default_factory=lambda: [[], []])    # per sphere: (q, axial position)
    iterations: int = 0
    convergence_estimate: float = np.inf

    def totals(self):
        return np.array([sum(q for q, _ in self.charges[0]),
                         sum(q for q, _ in self.charges[1])])


def sphere_capacitance_analytic(radius):
    if not radius > 0:
        raise DomainError('radius must be positive, got ' + str(radius))
    return 4.0 * np.pi * radius


def two_sphere_image_charges(r1, r2, center_distance, source, tol=1e-12,
                             max_iterations=IMAGE_MAX_ITERATIONS):
    """
    Image series for sphere `source` (0 or 1) at unit potential and the
    other sphere grounded. Sphere 0 is centred at 0, sphere 1 at center_distance.
    """
    if not (r1 > 0 and r2 > 0):
        raise DomainError('radii must be positive')
    if not center_distance > r1 + r2:
        raise DomainError('spheres are not separated: distance ' + str(center_distance) +
                          ' <= ' + str(r1 + r2))

    radii = (r1, r2)
    centers = (0.0, float(center_distance))

    state = ImageChargeState()
    q = radii[source]
    z = centers[source]
    inside = source
    state.charges[inside].append((q, z))

    while True:
        target = 1 - inside
        offset = z - centers[target]
        D = abs(offset)
        q = -q * radii[target] / D
        z = centers[target] + radii[target]**2 / D * np.sign(offset)
        inside = target
        state.charges[inside].append((q, z))
        state.iterations += 1
        state.convergence_estimate = abs(q)
        if abs(q) < tol:
            break
        if state.iterations >= max_iterations:
            raise NumericalError('image charge iteration did not converge in ' +
                                 str(max_iterations) + ' reflections')
    return state


def two_sphere_capacitance_images(r1, r2, center_distance, tol=1e-12,
                                  max_iterations=IMAGE_MAX_ITERATIONS):
    """
    2x2 capacitance coefficients of two spheres by Kelvin image iteration.
    """
    columns = []
    for source in (0, 1):
        state = two_sphere_image_charges(r1, r2, center_distance, source,
                                         tol=tol, max_iterations=max_iterations)
        columns.append(4.0 * np.pi * state.totals())
    C = np.column_stack(columns)

    asymmetry = abs(C[0, 1] - C[1, 0])
    if asymmetry > 1e3 * tol * 4.0 * np.pi + 1e-12 * abs(C).max():
        raise NumericalError('image charge capacitance is not symmetric: |C12 - C21| = ' +
                             repr(float(asymmetry)))
    return C


def two_sphere_capacitance_series(radius, center_distance, rtol=1e-17, max_terms=100000):
    """
    Bispherical series for two equal spheres, cosh(alpha) = d / (2a):
        C11 =  4 pi a sinh(alpha) sum_{n>=0} 1 / sinh((2n+1) alpha)
        C12 = -4 pi a sinh(alpha) sum_{n>=1} 1 / sinh(2n alpha)
    """
    a = float(radius)
    if not center_distance > 2 * a:
        raise DomainError('spheres are not separated')
    alpha = np.arccosh(center_distance / (2.0 * a))

    odd = 0.0
    even = 0.0
    for n in range(1, max_terms):
        term = 1.0 / np.sinh(n * alpha)
        if n % 2:
            odd += term
        else:
            even += term
        if term < rtol * odd:
            break

    scale = 4.0 * np.pi * a * np.sinh(alpha)
    return np.array([[scale * odd, -scale * even],
                     [-scale * even, scale * odd]])


def _kerr_denominator(beta, cr, amp):
    denominator = 1.0 - complex(beta) * cr**2 * amp**2
    if abs(denominator) < 1e-14:
        critical = np.sqrt(1.0 / (complex(beta) * cr**2))
        raise DomainError('pole of the closed form at amplitude ' + str(amp) +
                          ' (critical amplitude ' + str(critical) + ')')
    return denominator


def symmetric_dimer_closed_form(lam, beta, cr, amp):
    """
    omega^2 = lambda / (1 - beta cr^2 |a|^2) for q = a * eigenvector of a
    mirror-symmetric dimer; amp is the entry modulus |a|.
    """
    return complex(lam) / _kerr_denominator(beta, cr, amp)


def monomer_closed_form(cgen, beta, cr, amp):
    """
    omega^2 = Cgen / (1 - beta cr^2 |q|^2) for a single resonator.
    """
    return complex(cgen) / _kerr_denominator(beta, cr, amp)


def _imaginary_strength(kappa):
    kappa = complex(kappa)
    if kappa.imag == 0 or abs(kappa.real) > 1e-12 * abs(kappa.imag):
        raise DomainError('the nonlinearity-induced branch closed form needs a purely '
                          'imaginary beta * cr^2, got ' + str(kappa))
    return -kappa.imag


def _third_branch_T(a, rho):
    u = 1.0 - rho**2
    v = 1.0 + rho**2
    w = 1.0 + rho**4
    if not a**2 * rho**2 > v**2:
        raise DomainError('no nonlinearity-induced solution with modulus ratio ' + str(rho))
    A2 = w**2 * (a**2 * rho**2 - v**2)
    B1 = a**2 * rho**2 * u**2 - 2.0 * v**2 * w
    C0 = -v**2
    root = np.sqrt(B1**2 - 4.0 * A2 * C0)
    if B1 > 0:
        return -2.0 * C0 / (root + B1)
    return (root - B1) / (2.0 * A2)


def symmetric_dimer_third_branch(A, B, kappa, rho):
    """
    Point of the nonlinearity-induced branch of Cgen q = w^2 (q - kappa |q|^2 q)
    for Cgen = [[A, B], [B, A]] and kappa = beta cr^2 purely imaginary.

    rho = |q1| / |q2| parametrizes the branch; solutions exist for
    rho in ((|a| - sqrt(a^2 - 4)) / 2, (|a| + sqrt(a^2 - 4)) / 2), a = A / B.
    Returns (q, omega_sq) with q scaled to its actual amplitude.
    """
    k = _imaginary_strength(kappa)
    if B == 0:
        raise DomainError('uncoupled dimer has no nonlinearity-induced branch')
    a = A / B
    rho = float(rho)

    T = _third_branch_T(a, rho)
    t = np.sign(k) * np.sqrt(T)
    u = 1.0 - rho**2
    v = 1.0 + rho**2
    w = 1.0 + rho**4

    cos_theta = -T * w * a * rho / (v * (1.0 + T * w))
    sin_theta = t * u * a * rho / (v * (1.0 + T * w))
    theta = np.arctan2(sin_theta, cos_theta)

    n2 = t / k
    ratio = rho * np.exp(1j * theta)
    q = np.sqrt(n2) * np.array([ratio, 1.0])
    omega_sq = (A + B / ratio) / (1.0 - complex(kappa) * rho**2 * n2)
    return q, complex(omega_sq)


def third_branch_threshold(A, B, kappa):
    """
    Smallest amplitude ||q|| at which the nonlinearity-induced branch exists,
    and the amplitude where it meets the eigenvector family with q1 = q2
    (or q1 = -q2 when B > 0).
    """
    k = abs(_imaginary_strength(kappa))
    a = A / B
    if not abs(a) > 2:
        raise DomainError('|Cgen11 / Cgen12| must exceed 2, got ' + str(abs(a)))

    rho_max = (abs(a) + np.sqrt(a**2 - 4.0)) / 2.0

    def amplitude_sq(log_rho):
        rho = np.exp(log_rho)
        return np.sqrt(_third_branch_T(a, rho)) * (1.0 + rho**2) / k

    result = minimize_scalar(amplitude_sq,
                             bounds=(0.0, np.log(rho_max) * (1.0 - 1e-9)),
                             method='bounded',
                             options={'xatol': 1e-12})
    touching = np.sqrt(2.0 / (k * np.sqrt(abs(a) - 2.0)))
    threshold = min(np.sqrt(result.fun), touching)
    rho = np.exp(result.x) if np.sqrt(result.fun) < touching else 1.0
    return {'threshold_amplitude': float(threshold),
            'rho_at_threshold': float(rho),
            'touching_amplitude': float(touching),
            'rho_limits': (float(1.0 / rho_max), float(rho_max))}
