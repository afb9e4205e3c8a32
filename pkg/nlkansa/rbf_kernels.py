"""Radial basis function kernels module.

Kernels are evaluated through three radial functions of the distance r, which are computed directly rather than
by differencing, such that all directional derivatives up to second order follow from the radial chain rule:

- ``phi(r)``,
- ``phi_d1(r) = phi'(r) / r``,
- ``phi_d2(r) = (phi''(r) - phi'(r) / r) / r^2``.

With these, ``d/dx_k phi = (x_k - x'_k) phi_d1`` and
``d^2/dx_k dx_l phi = delta_kl phi_d1 + (x_k - x'_k) (x_l - x'_l) phi_d2``.
"""

import numpy as np
import scipy.special
import typing

import nlkansa.config
import nlkansa.utils

logger = nlkansa.config.get_logger(__name__)

axis_labels = ['x', 'y', 'z']


class KernelSpec(nlkansa.utils.ObjectBase):
    """Kernel object, describing an RBF family with its shape parameter.

    - `family` is one of 'MQ', 'IMQ', 'MATERN', 'WC4'.
    - `shape` is the shape length-scale `c` for MQ / IMQ / MATERN and the support radius `L` for WC4.
    - `alpha` is the Matérn smoothness integer, which yields the Bessel order `(alpha - dim) / 2`.
    - `normalize` scales Matérn kernels to `phi(0) = 1`, which changes condition numbers but not solutions.
    - `augment_constant` appends a constant to the MQ interpolant, with the matching moment condition.
    """

    family: str
    shape: float
    dim: int
    alpha: int
    normalize: bool
    augment_constant: bool
    bessel_order: float
    wendland_smoothness: int
    scale_factor: float

    def __init__(
            self,
            family: str,
            shape: float,
            dim: int = 2,
            alpha: int = None,
            normalize: bool = None,
            augment_constant: bool = False
    ):

        # Store parameters.
        self.family = str(family).upper()
        self.shape = float(shape)
        self.dim = int(dim)
        self.alpha = None if alpha is None else int(alpha)
        self.normalize = (
            nlkansa.config.config['kernels']['matern_normalize']
            if normalize is None
            else bool(normalize)
        )
        self.augment_constant = bool(augment_constant)
        self.bessel_order = None
        self.wendland_smoothness = None
        self.scale_factor = 1.0

        # Validate parameters.
        if self.family not in ['MQ', 'IMQ', 'MATERN', 'WC4']:
            logger.error(f"Unknown RBF family: {family}")
            raise nlkansa.utils.ConfigurationError(f"Unknown RBF family: {family}")
        if not (self.shape > 0.0):
            logger.error(f"RBF shape parameter must be positive, but is: {shape}")
            raise nlkansa.utils.ConfigurationError(f"RBF shape parameter must be positive, but is: {shape}")
        if self.dim not in [1, 2, 3]:
            logger.error(f"Spatial dimension must be 1, 2 or 3, but is: {dim}")
            raise nlkansa.utils.ConfigurationError(f"Spatial dimension must be 1, 2 or 3, but is: {dim}")
        if self.augment_constant and (self.family != 'MQ'):
            logger.error(f"Constant augmentation is only defined for MQ, not for {self.family}.")
            raise nlkansa.utils.ConfigurationError(f"Constant augmentation is only defined for MQ.")

        # Obtain family-specific constants.
        if self.family == 'MATERN':
            if self.alpha is None:
                logger.error("Matérn kernel requires the smoothness parameter `alpha`.")
                raise nlkansa.utils.ConfigurationError("Matérn kernel requires the smoothness parameter `alpha`.")
            # Bessel order must be an integer or half-integer of at least one half.
            if (self.alpha - self.dim) < 1:
                logger.error(f"Unsupported Matérn order for alpha = {self.alpha}, dim = {self.dim}.")
                raise nlkansa.utils.ConfigurationError(
                    f"Unsupported Matérn order for alpha = {self.alpha}, dim = {self.dim}."
                )
            self.bessel_order = 0.5 * (self.alpha - self.dim)
            if self.normalize:
                self.scale_factor = 1.0 / get_matern_limit(self.bessel_order)
        elif self.family == 'WC4':
            self.wendland_smoothness = 3 + self.dim // 2

    def __repr__(self) -> str:
        if self.family == 'MATERN':
            return f"MATERN(alpha={self.alpha}, c={self.shape})"
        elif self.family == 'WC4':
            return f"WC4(L={self.shape})"
        else:
            return f"{self.family}(c={self.shape})"

    def get_radial_functions(
            self,
            distance: np.ndarray
    ) -> typing.Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Obtain `phi`, `phi_d1 = phi'/r` and `phi_d2 = (phi'' - phi'/r)/r^2` at given distances.

        - At `r = 0`, `phi_d1` is replaced by its finite limit, or infinity if the limit does not exist.
        - At `r = 0`, `phi_d2` only ever multiplies vanishing coordinate differences. It is returned as its limit
          where the limit exists and as zero otherwise.
        """

        distance = np.asarray(distance, dtype=float)
        is_zero = distance == 0.0

        if self.family == 'MQ':
            phi = np.sqrt(distance ** 2 + self.shape ** 2)
            phi_d1 = 1.0 / phi
            phi_d2 = -1.0 / phi ** 3

        elif self.family == 'IMQ':
            phi = 1.0 / np.sqrt(distance ** 2 + self.shape ** 2)
            phi_d1 = -phi ** 3
            phi_d2 = 3.0 * phi ** 5

        elif self.family == 'WC4':
            s = self.wendland_smoothness
            t = distance / self.shape
            one_minus_t = np.maximum(1.0 - t, 0.0)
            phi = (
                one_minus_t ** (s + 2)
                * ((s ** 2 + 4 * s + 3) * t ** 2 + (3 * s + 6) * t + 3.0)
            )
            phi_d1 = (
                -1.0 * (s + 3) * (s + 4) / self.shape ** 2
                * one_minus_t ** (s + 1)
                * ((s + 1) * t + 1.0)
            )
            phi_d2 = (
                1.0 * (s + 1) * (s + 2) * (s + 3) * (s + 4) / self.shape ** 4
                * one_minus_t ** s
            )

        elif self.family == 'MATERN':
            t = distance / self.shape
            phi = get_scaled_bessel(self.bessel_order, t)
            phi_d1 = -1.0 * get_scaled_bessel(self.bessel_order - 1.0, t) / self.shape ** 2
            phi_d2 = get_scaled_bessel(self.bessel_order - 2.0, t) / self.shape ** 4
            phi *= self.scale_factor
            phi_d1 *= self.scale_factor
            phi_d2 *= self.scale_factor

            # Replace the non-existing second limit at the origin.
            # - A non-existing first limit remains infinite and is reported by `assemble_matrix`.
            phi_d2 = np.where(is_zero & ~np.isfinite(phi_d2), 0.0, phi_d2)

        return phi, phi_d1, phi_d2


class DifferentialComponent(nlkansa.utils.ObjectBase):
    """Differential component object, i.e. one linear differential operator D_m applied to the interpolant.

    - `kind` is one of 'identity', 'first', 'second', 'laplacian'.
    - `axes` are the differentiation axes, e.g. `(0,)` for d/dx and `(0, 1)` for d^2/dxdy.
    - `parity` is -1 for first partials and +1 otherwise, such that [D_m phi]^T = parity [D_m phi].
    """

    kind: str
    axes: tuple
    parity: int
    name: str

    def __init__(
            self,
            kind: str,
            axes: tuple = ()
    ):

        self.kind = kind
        self.axes = tuple(sorted(int(axis) for axis in axes))
        self.parity = -1 if kind == 'first' else 1

        # Obtain component name.
        if kind == 'identity':
            self.name = 'u'
        elif kind == 'laplacian':
            self.name = 'laplacian_u'
        elif (kind == 'first') and (len(self.axes) == 1):
            self.name = f'u_{axis_labels[self.axes[0]]}'
        elif (kind == 'second') and (len(self.axes) == 2):
            self.name = f'u_{axis_labels[self.axes[0]]}{axis_labels[self.axes[1]]}'
        else:
            logger.error(f"Invalid differential component: kind = {kind}, axes = {axes}")
            raise nlkansa.utils.ConfigurationError(f"Invalid differential component: kind = {kind}, axes = {axes}")

    def __eq__(self, other) -> bool:
        return isinstance(other, DifferentialComponent) and (self.name == other.name)

    def __hash__(self) -> int:
        return hash(self.name)

    def __repr__(self) -> str:
        return self.name


def get_component(name: str) -> DifferentialComponent:
    """Obtain differential component from its name, e.g. 'u', 'u_x', 'u_xy', 'laplacian_u'."""

    if name == 'u':
        return DifferentialComponent('identity')
    elif name == 'laplacian_u':
        return DifferentialComponent('laplacian')
    elif name.startswith('u_') and (len(name) == 3):
        return DifferentialComponent('first', (axis_labels.index(name[2]),))
    elif name.startswith('u_') and (len(name) == 4):
        return DifferentialComponent('second', (axis_labels.index(name[2]), axis_labels.index(name[3])))
    else:
        logger.error(f"Invalid differential component name: {name}")
        raise nlkansa.utils.ConfigurationError(f"Invalid differential component name: {name}")


def get_matern_limit(order: float) -> float:
    """Limit of t^order K_order(t) for t -> 0, which is finite for positive order."""

    if order <= 0.0:
        return np.inf

    return float(2.0 ** (order - 1.0) * scipy.special.gamma(order))


def get_scaled_bessel(
        order: float,
        argument: np.ndarray
) -> np.ndarray:
    """Evaluate t^order K_|order|(t) elementwise, with the analytic limit at t = 0."""

    argument = np.asarray(argument, dtype=float)
    values = np.empty(argument.shape)
    is_zero = argument == 0.0
    values[is_zero] = get_matern_limit(order)
    values[~is_zero] = argument[~is_zero] ** order * scipy.special.kv(abs(order), argument[~is_zero])

    return values


def eval_kernel(
        kernel: KernelSpec,
        distance
):
    """Evaluate the kernel function phi at given nonnegative distance(s)."""

    distance = np.asarray(distance, dtype=float)
    try:
        assert np.all(distance >= 0.0)
    except AssertionError:
        logger.error("Kernel distance must be nonnegative.")
        raise

    phi = kernel.get_radial_functions(distance)[0]

    return float(phi) if phi.ndim == 0 else phi


def eval_component(
        kernel: KernelSpec,
        component: DifferentialComponent,
        point_row: np.ndarray,
        point_centre: np.ndarray
) -> float:
    """Evaluate D_m phi(|x_i - x_j|), where D_m acts on the first argument `point_row`."""

    return float(assemble_matrix(
        kernel,
        component,
        np.reshape(point_row, (1, -1)),
        np.reshape(point_centre, (1, -1))
    )[0, 0])


def assemble_matrix(
        kernel: KernelSpec,
        component: DifferentialComponent,
        points_row: np.ndarray,
        points_centre: np.ndarray
) -> np.ndarray:
    """Assemble the dense matrix [D_m phi] with entries D_m phi(|x_i - x_j|) for rows x_i and centres x_j."""

    points_row = np.atleast_2d(np.asarray(points_row, dtype=float))
    points_centre = np.atleast_2d(np.asarray(points_centre, dtype=float))

    # Validate dimensions.
    if (
        (points_row.shape[1] != kernel.dim)
        or (points_centre.shape[1] != kernel.dim)
        or (len(points_row) == 0)
        or (len(points_centre) == 0)
    ):
        logger.error(
            f"Point dimensions {points_row.shape} / {points_centre.shape} do not match kernel dimension {kernel.dim}."
        )
        raise nlkansa.utils.ConfigurationError("Point dimensions do not match kernel dimension.")
    if any(axis >= kernel.dim for axis in component.axes):
        logger.error(f"Component {component} is not defined in dimension {kernel.dim}.")
        raise nlkansa.utils.ConfigurationError(f"Component {component} is not defined in dimension {kernel.dim}.")

    # Obtain coordinate differences and distances.
    differences = points_row[:, np.newaxis, :] - points_centre[np.newaxis, :, :]
    distance = np.sqrt(np.sum(differences ** 2, axis=2))

    # Obtain radial functions.
    phi, phi_d1, phi_d2 = kernel.get_radial_functions(distance)

    # Apply radial chain rule.
    if component.kind == 'identity':
        matrix = phi
    elif component.kind == 'first':
        matrix = differences[:, :, component.axes[0]] * phi_d1
    elif component.kind == 'second':
        matrix = differences[:, :, component.axes[0]] * differences[:, :, component.axes[1]] * phi_d2
        if component.axes[0] == component.axes[1]:
            matrix = matrix + phi_d1
    else:
        matrix = kernel.dim * phi_d1 + distance ** 2 * phi_d2

    # Derivative limits at coincident points must exist.
    if (component.kind != 'identity') and not np.all(np.isfinite(matrix)):
        logger.error(f"Derivative limit of {component} at r = 0 does not exist for {kernel}.")
        raise nlkansa.utils.DomainError(f"Derivative limit of {component} at r = 0 does not exist for {kernel}.")

    return np.array(matrix, dtype=float)
