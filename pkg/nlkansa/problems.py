"""Problems module for the nonlinear elliptic boundary value problem definitions and initial guesses."""

import inspect
import numpy as np
import sys
import typing

import nlkansa.config
import nlkansa.rbf_kernels
import nlkansa.system
import nlkansa.utils

logger = nlkansa.config.get_logger(__name__)

quasilinear_components = ['u', 'u_x', 'u_y', 'u_xx', 'u_xy', 'u_yy']


class PoissonProblem(nlkansa.system.ProblemDefinition):
    """Linear Poisson problem ∇²u = f with Dirichlet data.

    - Defaults to the exact solution u = |x|^2, i.e. f = 2 d with matching Dirichlet data.
    - `source` and `boundary_value` may be given as constants, which replaces the defaults.
    """

    problem_type: str = 'poisson'
    source: typing.Optional[float]
    boundary_value: typing.Optional[float]

    def __init__(
            self,
            dim: int = 2,
            source: float = None,
            boundary_value: float = None
    ):

        super().__init__(
            'Poisson', dim, ['laplacian_u'],
            parameters=dict(dim=dim, source=source, boundary_value=boundary_value),
            is_linear=True
        )
        self.source = source
        self.boundary_value = boundary_value

    def get_source(self, points: np.ndarray) -> np.ndarray:
        if self.source is None:
            return np.full(len(points), 2.0 * self.dim)
        return np.full(len(points), float(self.source))

    def get_exact_solution(self, points: np.ndarray) -> typing.Optional[np.ndarray]:
        if (self.source is None) and (self.boundary_value is None):
            return np.sum(points ** 2, axis=1)
        return None

    def get_dirichlet_value(self, points: np.ndarray) -> np.ndarray:
        if self.boundary_value is None:
            return np.sum(points ** 2, axis=1)
        return np.full(len(points), float(self.boundary_value))

    def get_residual(self, points, values):
        return values['laplacian_u'] - self.get_source(points)

    def get_residual_d1(self, points, values):
        return np.ones((1, len(points)))

    def get_residual_d2(self, points, values):
        return np.zeros((1, 1, len(points)))

    def get_linearized_operator(self, points, values):
        return {'laplacian_u': np.ones(len(points))}


class CubicSemilinearProblem(nlkansa.system.ProblemDefinition):
    """Semilinear problem ∇²u - u^3 = f on the unit square with exact solution u = sin(πx) sin(πy)."""

    problem_type: str = 'cubic_semilinear'

    def __init__(self):

        super().__init__('CubicSemilinear', 2, ['u', 'laplacian_u'])

    def get_exact_solution(self, points: np.ndarray) -> np.ndarray:
        return np.sin(np.pi * points[:, 0]) * np.sin(np.pi * points[:, 1])

    def get_source(self, points: np.ndarray) -> np.ndarray:
        exact_solution = self.get_exact_solution(points)
        return -2.0 * np.pi ** 2 * exact_solution - exact_solution ** 3

    def get_dirichlet_value(self, points: np.ndarray) -> np.ndarray:
        return self.get_exact_solution(points)

    def get_residual(self, points, values):
        return values['laplacian_u'] - values['u'] ** 3 - self.get_source(points)

    def get_residual_d1(self, points, values):
        return np.stack([-3.0 * values['u'] ** 2, np.ones(len(points))])

    def get_residual_d2(self, points, values):
        d2 = np.zeros((2, 2, len(points)))
        d2[0, 0] = -6.0 * values['u']
        return d2

    def get_linearized_operator(self, points, values):
        return {
            'u': -3.0 * values['u'] ** 2,
            'laplacian_u': np.ones(len(points))
        }


class QuasilinearProblem(nlkansa.system.ProblemDefinition):
    """Quasilinear problem W = a(T) ∇²u + b(T) Δ∞u - f in two dimensions, with T = |∇u|^2.

    The operator is the row-scaled divergence form W = s(t) div(G(t) ∇u) with t = |∇u|, such that the
    linearized operator follows from the flux function G and the scaling s. Subclasses define a / b and
    their first two derivatives with respect to T, as well as G and s.
    """

    gradient_guard: float

    def __init__(
            self,
            name: str,
            parameters: dict = None
    ):

        super().__init__(name, 2, quasilinear_components, parameters=parameters)
        self.gradient_guard = nlkansa.config.config['system']['gradient_guard']

    def get_source(self, points: np.ndarray) -> np.ndarray:
        return np.zeros(len(points))

    def get_coefficient_functions(
            self,
            gradient_squared: np.ndarray
    ) -> typing.Tuple[np.ndarray, ...]:
        """Obtain a, a', a'', b, b', b'' at T."""
        raise NotImplementedError

    def get_flux_functions(
            self,
            gradient_norm: np.ndarray
    ) -> typing.Tuple[np.ndarray, ...]:
        """Obtain G, G', G'/t and (G'' - G'/t)/t^2 at t."""
        raise NotImplementedError

    def get_scaling_functions(
            self,
            gradient_norm: np.ndarray
    ) -> typing.Tuple[np.ndarray, np.ndarray]:
        """Obtain row scaling s and s'/t at t."""
        return np.ones(np.shape(gradient_norm)), np.zeros(np.shape(gradient_norm))

    def get_gradient_norm(
            self,
            values: typing.Dict[str, np.ndarray]
    ) -> np.ndarray:
        return np.maximum(np.sqrt(values['u_x'] ** 2 + values['u_y'] ** 2), self.gradient_guard)

    @staticmethod
    def get_infinity_laplacian(values: typing.Dict[str, np.ndarray]) -> np.ndarray:
        return (
            values['u_x'] ** 2 * values['u_xx']
            + 2.0 * values['u_x'] * values['u_y'] * values['u_xy']
            + values['u_y'] ** 2 * values['u_yy']
        )

    def get_residual(self, points, values):

        gradient_squared = self.get_gradient_norm(values) ** 2
        a, _, _, b, _, _ = self.get_coefficient_functions(gradient_squared)

        return (
            a * (values['u_xx'] + values['u_yy'])
            + b * self.get_infinity_laplacian(values)
            - self.get_source(points)
        )

    def get_residual_d1(self, points, values):

        u_x, u_y = values['u_x'], values['u_y']
        gradient_squared = self.get_gradient_norm(values) ** 2
        a, a_d1, _, b, b_d1, _ = self.get_coefficient_functions(gradient_squared)
        laplacian = values['u_xx'] + values['u_yy']
        infinity_laplacian = self.get_infinity_laplacian(values)
        c = a_d1 * laplacian + b_d1 * infinity_laplacian
        g_x = u_x * values['u_xx'] + u_y * values['u_xy']
        g_y = u_x * values['u_xy'] + u_y * values['u_yy']

        return np.stack([
            np.zeros(len(points)),
            2.0 * u_x * c + 2.0 * b * g_x,
            2.0 * u_y * c + 2.0 * b * g_y,
            a + b * u_x ** 2,
            2.0 * b * u_x * u_y,
            a + b * u_y ** 2
        ])

    def get_residual_d2(self, points, values):

        u_x, u_y = values['u_x'], values['u_y']
        gradient_squared = self.get_gradient_norm(values) ** 2
        a, a_d1, a_d2, b, b_d1, b_d2 = self.get_coefficient_functions(gradient_squared)
        laplacian = values['u_xx'] + values['u_yy']
        infinity_laplacian = self.get_infinity_laplacian(values)
        c = a_d1 * laplacian + b_d1 * infinity_laplacian
        e = a_d2 * laplacian + b_d2 * infinity_laplacian
        g_x = u_x * values['u_xx'] + u_y * values['u_xy']
        g_y = u_x * values['u_xy'] + u_y * values['u_yy']

        d2 = np.zeros((6, 6, len(points)))
        d2[1, 1] = 2.0 * c + 4.0 * u_x ** 2 * e + 8.0 * b_d1 * u_x * g_x + 2.0 * b * values['u_xx']
        d2[2, 2] = 2.0 * c + 4.0 * u_y ** 2 * e + 8.0 * b_d1 * u_y * g_y + 2.0 * b * values['u_yy']
        d2[1, 2] = d2[2, 1] = (
            4.0 * u_x * u_y * e + 4.0 * b_d1 * (u_x * g_y + u_y * g_x) + 2.0 * b * values['u_xy']
        )
        d2[1, 3] = d2[3, 1] = 2.0 * u_x * (a_d1 + b_d1 * u_x ** 2) + 2.0 * b * u_x
        d2[1, 4] = d2[4, 1] = 4.0 * b_d1 * u_x ** 2 * u_y + 2.0 * b * u_y
        d2[1, 5] = d2[5, 1] = 2.0 * u_x * (a_d1 + b_d1 * u_y ** 2)
        d2[2, 3] = d2[3, 2] = 2.0 * u_y * (a_d1 + b_d1 * u_x ** 2)
        d2[2, 4] = d2[4, 2] = 4.0 * b_d1 * u_y ** 2 * u_x + 2.0 * b * u_x
        d2[2, 5] = d2[5, 2] = 2.0 * u_y * (a_d1 + b_d1 * u_y ** 2) + 2.0 * b * u_y

        return d2

    def get_linearized_operator(self, points, values):
        """Coefficients A to E of the linearized operator L_u v = A v_xx + B v_xy + C v_yy + D v_x + E v_y.

        - The unscaled operator is div(G ∇u), which linearizes via G, G'/t and (G'' - G'/t)/t^2.
        - The row scaling s(t) adds the product-rule term div(G ∇u) s'(t) ∇u / t . ∇v.
        """

        u_x, u_y = values['u_x'], values['u_y']
        gradient_norm = self.get_gradient_norm(values)
        flux, _, flux_d1_over_t, flux_d2_term = self.get_flux_functions(gradient_norm)
        scaling, scaling_d1_over_t = self.get_scaling_functions(gradient_norm)
        laplacian = values['u_xx'] + values['u_yy']
        infinity_laplacian = self.get_infinity_laplacian(values)
        g_x = u_x * values['u_xx'] + u_y * values['u_xy']
        g_y = u_x * values['u_xy'] + u_y * values['u_yy']
        divergence = flux * laplacian + flux_d1_over_t * infinity_laplacian

        coefficient_a = flux + flux_d1_over_t * u_x ** 2
        coefficient_b = 2.0 * flux_d1_over_t * u_x * u_y
        coefficient_c = flux + flux_d1_over_t * u_y ** 2
        coefficient_d = (
            2.0 * flux_d1_over_t * g_x
            + flux_d1_over_t * u_x * laplacian
            + flux_d2_term * u_x * infinity_laplacian
        )
        coefficient_e = (
            2.0 * flux_d1_over_t * g_y
            + flux_d1_over_t * u_y * laplacian
            + flux_d2_term * u_y * infinity_laplacian
        )

        return {
            'u': np.zeros(len(points)),
            'u_x': scaling * coefficient_d + divergence * scaling_d1_over_t * u_x,
            'u_y': scaling * coefficient_e + divergence * scaling_d1_over_t * u_y,
            'u_xx': scaling * coefficient_a,
            'u_xy': scaling * coefficient_b,
            'u_yy': scaling * coefficient_c
        }

    def get_linearization_conditions(
            self,
            gradient_norm: np.ndarray
    ) -> typing.Tuple[np.ndarray, np.ndarray]:
        """Evaluate the linearization condition |G'(t)| <= 1/t^2 and the ellipticity condition G'/G > -1/t."""

        flux, flux_d1, _, _ = self.get_flux_functions(gradient_norm)
        is_linearizable = np.abs(flux_d1) * gradient_norm ** 2 <= 1.0
        is_elliptic = flux_d1 * gradient_norm > -flux

        return is_linearizable, is_elliptic


class PlateauProblem(QuasilinearProblem):
    """Minimal surface (Plateau) problem (1 + |∇u|^2) ∇²u - Δ∞u = 0 on the disc of radius π/2 - s.

    The Dirichlet data log(cos x / cos y) is the exact solution (Scherk's surface), which is singular at
    |x| = π/2 or |y| = π/2.
    """

    problem_type: str = 'plateau'
    margin: float
    radius: float

    def __init__(
            self,
            margin: float = 0.1
    ):

        if not (0.0 < margin < 0.5 * np.pi):
            logger.error(f"Plateau problem requires 0 < s < π/2, but got s = {margin}.")
            raise nlkansa.utils.DomainError(f"Plateau problem requires 0 < s < π/2, but got s = {margin}.")

        super().__init__('Plateau', parameters=dict(margin=margin))
        self.margin = float(margin)
        self.radius = 0.5 * np.pi - self.margin

    def get_exact_solution(self, points: np.ndarray) -> np.ndarray:
        return np.log(np.cos(points[:, 0]) / np.cos(points[:, 1]))

    def get_dirichlet_value(self, points: np.ndarray) -> np.ndarray:
        return self.get_exact_solution(points)

    def get_coefficient_functions(self, gradient_squared):
        ones = np.ones(np.shape(gradient_squared))
        zeros = np.zeros(np.shape(gradient_squared))
        return 1.0 + gradient_squared, ones, zeros, -ones, zeros, zeros

    def get_flux_functions(self, gradient_norm):
        base = 1.0 + gradient_norm ** 2
        return (
            base ** -0.5,
            -gradient_norm * base ** -1.5,
            -base ** -1.5,
            3.0 * base ** -2.5
        )

    def get_scaling_functions(self, gradient_norm):
        base = 1.0 + gradient_norm ** 2
        return base ** 1.5, 3.0 * base ** 0.5

    def get_residual(self, points, values):
        return (
            (1.0 + values['u_y'] ** 2) * values['u_xx']
            - 2.0 * values['u_x'] * values['u_y'] * values['u_xy']
            + (1.0 + values['u_x'] ** 2) * values['u_yy']
        )

    def get_residual_d1(self, points, values):
        u_x, u_y = values['u_x'], values['u_y']
        return np.stack([
            np.zeros(len(points)),
            2.0 * (u_x * values['u_yy'] - u_y * values['u_xy']),
            2.0 * (u_y * values['u_xx'] - u_x * values['u_xy']),
            1.0 + u_y ** 2,
            -2.0 * u_x * u_y,
            1.0 + u_x ** 2
        ])

    def get_residual_d2(self, points, values):
        u_x, u_y = values['u_x'], values['u_y']
        d2 = np.zeros((6, 6, len(points)))
        d2[1, 1] = 2.0 * values['u_yy']
        d2[2, 2] = 2.0 * values['u_xx']
        d2[1, 2] = d2[2, 1] = -2.0 * values['u_xy']
        d2[1, 4] = d2[4, 1] = -2.0 * u_y
        d2[1, 5] = d2[5, 1] = 2.0 * u_x
        d2[2, 3] = d2[3, 2] = 2.0 * u_y
        d2[2, 4] = d2[4, 2] = -2.0 * u_x
        return d2


class HeleShawProblem(QuasilinearProblem):
    """Hele-Shaw pressure problem div(|∇u|^(p-2) ∇u) = 0 with p = gamma + 2 on the mold floor plan.

    - Expanded as |∇u|^(p-2) ∇²u + (p-2) |∇u|^(p-4) Δ∞u.
    - Boundary conditions: u = 1 on the inlet (left edge), u = 0 on the front (right edge), zero normal
      derivative on the walls.
    - Optional Motz enrichment with `motz_functions` functions at each end of the inlet.
    """

    problem_type: str = 'hele_shaw'
    gamma: float
    motz_functions: int
    width: float
    height: float
    inlet: tuple

    def __init__(
            self,
            gamma: float = 0.6,
            motz_functions: int = 0,
            width: float = 2.0,
            height: float = 1.0,
            inlet: typing.Tuple[float, float] = (0.375, 0.625)
    ):

        if not (gamma > -1.0):
            logger.error(f"Hele-Shaw problem is elliptic only for gamma > -1, but got gamma = {gamma}.")
            raise nlkansa.utils.DomainError(f"Hele-Shaw problem requires gamma > -1, but got gamma = {gamma}.")

        super().__init__(
            'HeleShawPLaplace',
            parameters=dict(gamma=gamma, motz_functions=motz_functions)
        )
        self.gamma = float(gamma)
        self.motz_functions = int(motz_functions)
        self.width = float(width)
        self.height = float(height)
        self.inlet = tuple(inlet)

    def get_dirichlet_value(self, points: np.ndarray) -> np.ndarray:
        return np.where(points[:, 0] <= 0.5 * self.width, 1.0, 0.0)

    def get_coefficient_functions(self, gradient_squared):
        power = 0.5 * self.gamma
        return (
            gradient_squared ** power,
            power * gradient_squared ** (power - 1.0),
            power * (power - 1.0) * gradient_squared ** (power - 2.0),
            self.gamma * gradient_squared ** (power - 1.0),
            self.gamma * (power - 1.0) * gradient_squared ** (power - 2.0),
            self.gamma * (power - 1.0) * (power - 2.0) * gradient_squared ** (power - 3.0)
        )

    def get_flux_functions(self, gradient_norm):
        return (
            gradient_norm ** self.gamma,
            self.gamma * gradient_norm ** (self.gamma - 1.0),
            self.gamma * gradient_norm ** (self.gamma - 2.0),
            self.gamma * (self.gamma - 2.0) * gradient_norm ** (self.gamma - 4.0)
        )

    def get_enrichment(self) -> list:
        # Lower inlet end: wall runs downwards, domain lies counterclockwise of it.
        # Upper inlet end: wall runs upwards, domain lies clockwise of it.
        return (
            nlkansa.system.motz_enrichment(self.motz_functions, [0.0, self.inlet[0]], -0.5 * np.pi, 1)
            + nlkansa.system.motz_enrichment(self.motz_functions, [0.0, self.inlet[1]], 0.5 * np.pi, -1)
        )


class MongeAmpereProblem(nlkansa.system.ProblemDefinition):
    """Monge-Ampère problem det(D²u) = f on the unit square / cube.

    - Exact solution u = exp(|x|^2 / 2) with f = (1 + |x|^2) exp(d |x|^2 / 2) and matching Dirichlet data.
    - Components are the distinct second partials. Off-diagonal partials enter the determinant twice, hence
      their first partials are twice the cofactors.
    """

    problem_type: str = 'monge_ampere'
    index_pairs: typing.List[typing.Tuple[int, int]]

    def __init__(
            self,
            dim: int = 2
    ):

        if dim not in [2, 3]:
            logger.error(f"Monge-Ampère problem is defined for dimension 2 or 3, but got {dim}.")
            raise nlkansa.utils.ConfigurationError(f"Monge-Ampère problem requires dimension 2 or 3.")

        labels = nlkansa.rbf_kernels.axis_labels
        index_pairs = [(index_1, index_2) for index_1 in range(dim) for index_2 in range(index_1, dim)]
        super().__init__(
            f'MongeAmpere{dim}D', dim,
            [f'u_{labels[index_1]}{labels[index_2]}' for index_1, index_2 in index_pairs],
            parameters=dict(dim=dim)
        )
        self.index_pairs = index_pairs

    def get_exact_solution(self, points: np.ndarray) -> np.ndarray:
        return np.exp(0.5 * np.sum(points ** 2, axis=1))

    def get_source(self, points: np.ndarray) -> np.ndarray:
        radius_squared = np.sum(points ** 2, axis=1)
        return (1.0 + radius_squared) * np.exp(0.5 * self.dim * radius_squared)

    def get_dirichlet_value(self, points: np.ndarray) -> np.ndarray:
        return self.get_exact_solution(points)

    def get_hessian_field(
            self,
            values: typing.Dict[str, np.ndarray]
    ) -> np.ndarray:
        """Stack the second partials into symmetric matrices of shape (n, d, d)."""

        hessian = np.zeros((len(values[self.component_names[0]]), self.dim, self.dim))
        for name, (index_1, index_2) in zip(self.component_names, self.index_pairs):
            hessian[:, index_1, index_2] = values[name]
            hessian[:, index_2, index_1] = values[name]

        return hessian

    def get_residual(self, points, values):

        if self.dim == 2:
            determinant = values['u_xx'] * values['u_yy'] - values['u_xy'] ** 2
        else:
            u_xx, u_yy, u_zz = values['u_xx'], values['u_yy'], values['u_zz']
            u_xy, u_xz, u_yz = values['u_xy'], values['u_xz'], values['u_yz']
            determinant = (
                u_xx * u_yy * u_zz + 2.0 * u_xy * u_xz * u_yz
                - u_xx * u_yz ** 2 - u_yy * u_xz ** 2 - u_zz * u_xy ** 2
            )

        return determinant - self.get_source(points)

    def get_residual_d1(self, points, values):

        if self.dim == 2:
            return np.stack([values['u_yy'], -2.0 * values['u_xy'], values['u_xx']])

        # Component order: u_xx, u_xy, u_xz, u_yy, u_yz, u_zz.
        u_xx, u_yy, u_zz = values['u_xx'], values['u_yy'], values['u_zz']
        u_xy, u_xz, u_yz = values['u_xy'], values['u_xz'], values['u_yz']
        return np.stack([
            u_yy * u_zz - u_yz ** 2,
            2.0 * (u_xz * u_yz - u_zz * u_xy),
            2.0 * (u_xy * u_yz - u_yy * u_xz),
            u_xx * u_zz - u_xz ** 2,
            2.0 * (u_xy * u_xz - u_xx * u_yz),
            u_xx * u_yy - u_xy ** 2
        ])

    def get_residual_d2(self, points, values):

        count = len(points)
        if self.dim == 2:
            d2 = np.zeros((3, 3, count))
            d2[0, 2] = d2[2, 0] = 1.0
            d2[1, 1] = -2.0
            return d2

        u_xx, u_yy, u_zz = values['u_xx'], values['u_yy'], values['u_zz']
        u_xy, u_xz, u_yz = values['u_xy'], values['u_xz'], values['u_yz']
        xx, xy, xz, yy, yz, zz = range(6)
        d2 = np.zeros((6, 6, count))
        for (index_1, index_2), value in [
            ((xx, yy), u_zz), ((xx, zz), u_yy), ((yy, zz), u_xx),
            ((xx, yz), -2.0 * u_yz), ((yy, xz), -2.0 * u_xz), ((zz, xy), -2.0 * u_xy),
            ((xy, xz), 2.0 * u_yz), ((xy, yz), 2.0 * u_xz), ((xz, yz), 2.0 * u_xy)
        ]:
            d2[index_1, index_2] = d2[index_2, index_1] = value
        d2[xy, xy] = -2.0 * u_zz
        d2[xz, xz] = -2.0 * u_yy
        d2[yz, yz] = -2.0 * u_xx

        return d2

    def get_linearized_operator(self, points, values):
        """Coefficients of the linearized Monge-Ampère operator, i.e. the cofactor matrix of D²u against D²v."""

        hessian = self.get_hessian_field(values)
        if self.dim == 2:
            cofactor = np.stack([
                np.stack([hessian[:, 1, 1], -hessian[:, 0, 1]], axis=1),
                np.stack([-hessian[:, 1, 0], hessian[:, 0, 0]], axis=1)
            ], axis=1)
        else:
            # Rows of the cofactor matrix are cross products of the other two rows.
            cofactor = np.stack([
                np.cross(hessian[:, 1], hessian[:, 2]),
                np.cross(hessian[:, 2], hessian[:, 0]),
                np.cross(hessian[:, 0], hessian[:, 1])
            ], axis=1)

        return {
            name: (1.0 if index_1 == index_2 else 2.0) * cofactor[:, index_1, index_2]
            for name, (index_1, index_2) in zip(self.component_names, self.index_pairs)
        }


class ProblemCatalogEntry(nlkansa.utils.ObjectBase):
    """Problem catalog entry, with problem identifier, definition and default small-scale configuration."""

    problem_id: str
    definition: nlkansa.system.ProblemDefinition
    default_config: dict

    def __init__(
            self,
            problem_id: str,
            definition: nlkansa.system.ProblemDefinition,
            default_config: dict
    ):

        self.problem_id = problem_id
        self.definition = definition
        self.default_config = default_config


def cubic_semilinear() -> CubicSemilinearProblem:
    return CubicSemilinearProblem()


def plateau(margin: float = 0.1) -> PlateauProblem:
    return PlateauProblem(margin)


def hele_shaw(gamma: float = 0.6, motz_functions: int = 0, **geometry) -> HeleShawProblem:
    return HeleShawProblem(gamma, motz_functions, **geometry)


def monge_ampere(dim: int = 2) -> MongeAmpereProblem:
    return MongeAmpereProblem(dim)


def poisson(dim: int = 2, source: float = None, boundary_value: float = None) -> PoissonProblem:
    return PoissonProblem(dim, source, boundary_value)


def make_problem(
        problem_type: str,
        **parameters
) -> nlkansa.system.ProblemDefinition:
    """Factory method for problems, makes appropriate problem type for given `problem_type`."""

    # Obtain problem classes.
    problem_classes = inspect.getmembers(
        sys.modules[__name__],
        lambda cls: inspect.isclass(cls) and issubclass(cls, nlkansa.system.ProblemDefinition)
    )

    # Obtain problem for given `problem_type`.
    for problem_class_name, problem_class in problem_classes:
        if problem_type == getattr(problem_class, 'problem_type', None):
            try:
                return problem_class(**parameters)
            except TypeError as exception:
                logger.error(f"Invalid parameters for problem type '{problem_type}': {exception}")
                raise nlkansa.utils.ConfigurationError(
                    f"Invalid parameters for problem type '{problem_type}': {exception}"
                )

    # Raise error, if no problem class found for given `problem_type`.
    logger.error(f"Can't find problem class for problem type '{problem_type}'. Please check the problem type.")
    raise nlkansa.utils.ConfigurationError(f"Unknown problem type: {problem_type}")


def get_catalog() -> typing.Dict[str, ProblemCatalogEntry]:
    """Obtain the problem catalog with small-scale default configurations for validation runs."""

    test_config = nlkansa.config.config['tests']
    grid = dict(type='grid', domain='UnitSquare', points_per_side=test_config['grid_points_per_side'])
    catalog = [
        ProblemCatalogEntry(
            'cubic_semilinear',
            cubic_semilinear(),
            dict(
                problem=dict(type='cubic_semilinear'),
                kernel=dict(family='MQ', shape=0.3), pointset=grid, guess=dict(strategy='gaussian')
            )
        ),
        ProblemCatalogEntry(
            'plateau',
            plateau(0.1),
            dict(
                problem=dict(type='plateau', margin=0.1),
                kernel=dict(family='MQ', shape=0.5),
                pointset=dict(
                    type='disc', radius=0.5 * np.pi - 0.1,
                    interior_count=test_config['disc_interior_points'],
                    boundary_count=test_config['disc_boundary_points']
                ),
                guess=dict(strategy='gaussian')
            )
        ),
        ProblemCatalogEntry(
            'hele_shaw',
            hele_shaw(0.6, 1, inlet=(0.25, 0.75)),
            dict(
                problem=dict(type='hele_shaw', gamma=0.6, motz_functions=1),
                kernel=dict(family='IMQ', shape=0.75),
                pointset=dict(type='mold', inlet=[0.25, 0.75], boundary_spacing=0.25, interior_count=30),
                guess=dict(strategy='laplacian', perturbation=100.0)
            )
        ),
        ProblemCatalogEntry(
            'monge_ampere_2d',
            monge_ampere(2),
            dict(
                problem=dict(type='monge_ampere', dim=2),
                kernel=dict(family='MQ', shape=0.3), pointset=grid, guess=dict(strategy='poisson')
            )
        ),
        ProblemCatalogEntry(
            'monge_ampere_3d',
            monge_ampere(3),
            dict(
                problem=dict(type='monge_ampere', dim=3),
                kernel=dict(family='MQ', shape=0.4, dim=3),
                pointset=dict(type='grid', domain='UnitCube', points_per_side=5),
                guess=dict(strategy='poisson')
            )
        ),
        ProblemCatalogEntry(
            'poisson',
            poisson(2),
            dict(
                problem=dict(type='poisson', dim=2),
                kernel=dict(family='MQ', shape=0.3), pointset=grid, guess=dict(strategy='zero')
            )
        )
    ]

    return {entry.problem_id: entry for entry in catalog}


def initial_guess(
        strategy: str,
        system: nlkansa.system.CollocationSystem,
        seed: int = 0,
        perturbation: float = None,
        poisson_source: float = None
) -> np.ndarray:
    """Obtain initial reduced coefficients beta for given strategy.

    - 'zero': beta = 0.
    - 'gaussian': i.i.d. standard normal entries, seeded.
    - 'laplacian': solution of ∇²u = 0 with the problem's boundary conditions.
    - 'poisson': solution of ∇²u = d f^(1/d) with the problem's boundary conditions, where f is the problem
      source, or of ∇²u = `poisson_source` if given.
    - If `perturbation` is given, a seeded standard normal vector divided by `perturbation` is added.
    """

    random_generator = np.random.default_rng(seed)

    if strategy == 'zero':
        beta = np.zeros(system.dimension)
    elif strategy == 'gaussian':
        beta = random_generator.standard_normal(system.dimension)
    elif strategy in ['laplacian', 'poisson']:
        count = len(system.pde_points)
        if strategy == 'laplacian':
            right_hand_side = np.zeros(count)
        elif poisson_source is not None:
            right_hand_side = np.full(count, float(poisson_source))
        else:
            source = system.problem.get_source(system.pde_points)
            if np.any(source < 0.0):
                logger.error(f"Poisson guess requires a nonnegative problem source for {system.problem}.")
                raise nlkansa.utils.GuessError(
                    f"Poisson guess requires a nonnegative problem source for {system.problem}."
                )
            right_hand_side = system.problem.dim * source ** (1.0 / system.problem.dim)
        alpha = system.solve_linear(system.get_laplacian_coefficients(), right_hand_side)
        beta = system.get_reduced_coefficients(alpha)
    else:
        logger.error(f"Unknown initial guess strategy: {strategy}")
        raise nlkansa.utils.ConfigurationError(f"Unknown initial guess strategy: {strategy}")

    if perturbation is not None:
        beta = beta + random_generator.standard_normal(system.dimension) / perturbation

    return beta


def check_convexity(
        system: nlkansa.system.CollocationSystem,
        alpha: np.ndarray,
        points: np.ndarray
) -> typing.Tuple[bool, float]:
    """Check positive definiteness of the Hessian field of the interpolant at given points.

    - Returns whether all Hessians are positive definite and the smallest eigenvalue encountered.
    """

    labels = nlkansa.rbf_kernels.axis_labels
    dim = system.problem.dim
    hessian = np.zeros((len(points), dim, dim))
    for index_1 in range(dim):
        for index_2 in range(index_1, dim):
            values = system.evaluate(alpha, f'u_{labels[index_1]}{labels[index_2]}', points)
            hessian[:, index_1, index_2] = values
            hessian[:, index_2, index_1] = values
    minimum_eigenvalue = float(np.min(np.linalg.eigvalsh(hessian)))

    return minimum_eigenvalue > 0.0, minimum_eigenvalue
