"""Collocation system module.

The collocation system couples a kernel, a pointset and a problem definition into the square nonlinear system
W(alpha) = 0 for the RBF coefficients alpha. Linear rows, i.e. boundary conditions and ancillary equations of
enrichment functions, are eliminated by a pivoted QR factorization, such that the unknowns are the reduced
coefficients beta with alpha = alpha_particular + Z beta.
"""

import numpy as np
import scipy.linalg
import typing

import nlkansa.config
import nlkansa.geometry
import nlkansa.rbf_kernels
import nlkansa.utils

logger = nlkansa.config.get_logger(__name__)


class ProblemDefinition(nlkansa.utils.ObjectBase):
    """Problem definition base object.

    - The PDE residual W is a pointwise function of the values of the differential components `component_names`
      of the interpolant, i.e. W_i = W(x_i, D_1 u(x_i), ..., D_S u(x_i)).
    - Component values are passed as dictionary from component name to array of nodal values.
    - `get_residual_d1` returns the partials dW / dD_m as array of shape (S, n), `get_residual_d2` returns the
      symmetric second partials as array of shape (S, S, n), both in the order of `component_names`.
    - Boundary conditions are linear: Dirichlet `u = g` and Neumann `n . grad u = g_N`.
    """

    name: str
    dim: int
    component_names: typing.List[str]
    components: typing.List[nlkansa.rbf_kernels.DifferentialComponent]
    parameters: dict
    is_linear: bool

    def __init__(
            self,
            name: str,
            dim: int,
            component_names: typing.List[str],
            parameters: dict = None,
            is_linear: bool = False
    ):

        self.name = name
        self.dim = int(dim)
        self.component_names = list(component_names)
        self.components = [nlkansa.rbf_kernels.get_component(name) for name in self.component_names]
        self.parameters = dict() if parameters is None else parameters
        self.is_linear = is_linear

    def __repr__(self) -> str:
        parameters = ', '.join(f'{key}={value}' for key, value in self.parameters.items())
        return f"{self.name}({parameters})"

    def get_residual(
            self,
            points: np.ndarray,
            values: typing.Dict[str, np.ndarray]
    ) -> np.ndarray:
        raise NotImplementedError

    def get_residual_d1(
            self,
            points: np.ndarray,
            values: typing.Dict[str, np.ndarray]
    ) -> np.ndarray:
        raise NotImplementedError

    def get_residual_d2(
            self,
            points: np.ndarray,
            values: typing.Dict[str, np.ndarray]
    ) -> np.ndarray:
        raise NotImplementedError

    def get_source(
            self,
            points: np.ndarray
    ) -> np.ndarray:
        return np.zeros(len(points))

    def get_dirichlet_value(
            self,
            points: np.ndarray
    ) -> np.ndarray:
        return np.zeros(len(points))

    def get_neumann_value(
            self,
            points: np.ndarray,
            normals: np.ndarray
    ) -> np.ndarray:
        return np.zeros(len(points))

    def get_exact_solution(
            self,
            points: np.ndarray
    ) -> typing.Optional[np.ndarray]:
        """Exact solution at given points, or None if unknown."""
        return None

    def get_linearized_operator(
            self,
            points: np.ndarray,
            values: typing.Dict[str, np.ndarray]
    ) -> typing.Dict[str, np.ndarray]:
        """Coefficients of the Fréchet derivative of the PDE operator, by component name."""
        logger.error(f"Problem {self} does not define a linearized operator.")
        raise nlkansa.utils.ConfigurationError(f"Problem {self} does not define a linearized operator.")

    def get_enrichment(self) -> list:
        return []


class MotzFunction(nlkansa.utils.ObjectBase):
    """Motz enrichment function h_k = r^a cos(a theta) with a = (2k - 1) / 2 around a singular point.

    - The local polar frame has theta = 0 along the Neumann edge, given by `edge_direction` (global angle), and
      theta increases towards the domain for `orientation` = +1 (counterclockwise) or -1 (clockwise).
    - The branch cut lies at theta = -pi / 2, i.e. outside the domain sector [0, pi].
    - h_k is evaluated as the real part of the analytic function z^a in the local frame, hence is harmonic.
    """

    index: int
    order: float
    singularity: np.ndarray
    edge_direction: float
    orientation: int

    def __init__(
            self,
            index: int,
            singularity: np.ndarray,
            edge_direction: float,
            orientation: int = 1
    ):

        self.index = int(index)
        self.order = 0.5 * (2 * self.index - 1)
        self.singularity = np.array(singularity, dtype=float)
        self.edge_direction = float(edge_direction)
        self.orientation = 1 if orientation >= 0 else -1

    def __repr__(self) -> str:
        return f"Motz(k={self.index}, at={self.singularity.tolist()})"

    def evaluate(
            self,
            component: nlkansa.rbf_kernels.DifferentialComponent,
            points: np.ndarray
    ) -> np.ndarray:
        """Evaluate D_m h_k at given points. Derivatives are infinite at the singularity itself."""

        points = np.atleast_2d(points)
        if points.shape[1] != 2:
            logger.error("Motz enrichment is only defined in two dimensions.")
            raise nlkansa.utils.ConfigurationError("Motz enrichment is only defined in two dimensions.")
        if component.kind == 'laplacian':
            return np.zeros(len(points))

        # Obtain local frame.
        edge_vector = np.array([np.cos(self.edge_direction), np.sin(self.edge_direction)])
        normal_vector = self.orientation * np.array([-edge_vector[1], edge_vector[0]])
        differences = points - self.singularity
        local_x = differences @ edge_vector
        local_y = differences @ normal_vector
        radius = np.sqrt(local_x ** 2 + local_y ** 2)
        angle = np.arctan2(local_y, local_x)
        angle = np.where(angle < -0.5 * np.pi, angle + 2.0 * np.pi, angle)

        # Obtain derivative of z^a of given order.
        def get_derivative(derivative_order: int) -> np.ndarray:
            coefficient = np.prod([self.order - index for index in range(derivative_order)])
            with np.errstate(divide='ignore', invalid='ignore'):
                return (
                    coefficient
                    * radius ** (self.order - derivative_order)
                    * np.exp(1j * (self.order - derivative_order) * angle)
                )

        if component.kind == 'identity':
            return np.real(get_derivative(0))
        elif component.kind == 'first':
            derivative = get_derivative(1)
            axis = component.axes[0]
            return np.real(derivative) * edge_vector[axis] - np.imag(derivative) * normal_vector[axis]
        else:
            derivative = get_derivative(2)
            axis_1, axis_2 = component.axes
            with np.errstate(invalid='ignore'):
                return (
                    np.real(derivative) * edge_vector[axis_1] * edge_vector[axis_2]
                    - np.imag(derivative) * (
                        edge_vector[axis_1] * normal_vector[axis_2] + normal_vector[axis_1] * edge_vector[axis_2]
                    )
                    - np.real(derivative) * normal_vector[axis_1] * normal_vector[axis_2]
                )


def motz_enrichment(
        functions_per_corner: int,
        singularity: np.ndarray,
        edge_direction: float,
        orientation: int = 1
) -> typing.List[MotzFunction]:
    """Obtain the first `functions_per_corner` Motz functions h_1, h_2, ... around given singular point."""

    if functions_per_corner < 0:
        logger.error(f"Number of Motz functions must be nonnegative, but is: {functions_per_corner}")
        raise nlkansa.utils.ConfigurationError("Number of Motz functions must be nonnegative.")

    return [
        MotzFunction(index, singularity, edge_direction, orientation)
        for index in range(1, functions_per_corner + 1)
    ]


class MeritState(nlkansa.utils.ObjectBase):
    """Merit state at given reduced coefficients, with merit = 0.5 |W|^2 and gradient = J^T W."""

    beta: np.ndarray
    alpha: np.ndarray
    residual: np.ndarray
    merit: float
    gradient: np.ndarray
    jacobian: np.ndarray
    hessian: np.ndarray

    def __init__(
            self,
            beta: np.ndarray,
            alpha: np.ndarray,
            residual: np.ndarray,
            jacobian: np.ndarray,
            hessian: np.ndarray = None
    ):

        self.beta = beta
        self.alpha = alpha
        self.residual = residual
        self.merit = 0.5 * float(residual @ residual)
        self.jacobian = jacobian
        self.gradient = jacobian.T @ residual
        self.hessian = hessian


class CollocationSystem(nlkansa.utils.ObjectBase):
    """Collocation system object.

    - Columns are the RBF centres (nodes and extra centres), followed by the enrichment functions and,
      for constant-augmented MQ, the constant.
    - PDE rows are the interior nodes and the PDE-enforced boundary nodes. Linear rows are the Dirichlet and
      Neumann conditions, one ancillary equation per enrichment function and the moment condition of the constant.
    - With elimination, linear rows are satisfied exactly by alpha = alpha_particular + Z beta, where Z spans the
      null space of the linear block B. Without elimination, Z = I and the linear rows B alpha - b are appended to
      the residual.
    """

    kernel: nlkansa.rbf_kernels.KernelSpec
    pointset: nlkansa.geometry.Pointset
    problem: ProblemDefinition
    centres: np.ndarray
    enrichment: typing.List[MotzFunction]
    column_count: int
    pde_node_indexes: np.ndarray
    pde_points: np.ndarray
    component_matrices: np.ndarray
    linear_matrix: np.ndarray
    linear_vector: np.ndarray
    linear_row_classes: np.ndarray
    eliminate: bool
    permutation: np.ndarray
    triangular_factor: np.ndarray
    range_basis: np.ndarray
    null_space_basis: np.ndarray
    particular_coefficients: np.ndarray
    reduced_matrices: np.ndarray
    offset_values: np.ndarray
    dimension: int

    def __init__(
            self,
            kernel: nlkansa.rbf_kernels.KernelSpec,
            pointset: nlkansa.geometry.Pointset,
            problem: ProblemDefinition,
            eliminate: bool = None
    ):

        nlkansa.utils.log_time('collocation system setup', logger_object=logger)

        if not (kernel.dim == pointset.dim == problem.dim):
            logger.error(
                f"Dimensions of kernel ({kernel.dim}), pointset ({pointset.dim}) and problem ({problem.dim}) differ."
            )
            raise nlkansa.utils.ConfigurationError("Dimensions of kernel, pointset and problem differ.")

        self.kernel = kernel
        self.pointset = pointset
        self.problem = problem
        self.eliminate = (
            nlkansa.config.config['system']['eliminate_linear_block']
            if eliminate is None
            else bool(eliminate)
        )
        self.centres = pointset.centres
        self.enrichment = problem.get_enrichment()
        self.column_count = len(self.centres) + len(self.enrichment) + (1 if kernel.augment_constant else 0)

        # Obtain PDE rows.
        boundary_tags = pointset.boundary_tags
        boundary_indexes = np.arange(pointset.interior_count, pointset.node_count)
        self.pde_node_indexes = np.concatenate([
            np.arange(pointset.interior_count),
            boundary_indexes[np.isin(boundary_tags, ['DP', 'NP'])]
        ]).astype(int)
        self.pde_points = pointset.nodes[self.pde_node_indexes]
        self.component_matrices = np.stack([
            self.get_columns(component, self.pde_points)
            for component in problem.components
        ])
        self.check_finite(self.component_matrices, self.pde_node_indexes, "PDE row matrix")

        # Obtain linear rows.
        linear_rows = []
        linear_values = []
        linear_row_classes = []
        is_dirichlet = np.isin(boundary_tags, ['D', 'DP'])
        if np.any(is_dirichlet):
            points = pointset.nodes[boundary_indexes[is_dirichlet]]
            linear_rows.append(self.get_columns(nlkansa.rbf_kernels.get_component('u'), points))
            linear_values.append(problem.get_dirichlet_value(points))
            linear_row_classes.extend(['dirichlet'] * len(points))
        is_neumann = np.isin(boundary_tags, ['N', 'NP'])
        if np.any(is_neumann):
            points = pointset.nodes[boundary_indexes[is_neumann]]
            normals = pointset.normals[is_neumann]
            matrix = sum(
                normals[:, [axis]]
                * self.get_columns(nlkansa.rbf_kernels.DifferentialComponent('first', (axis,)), points)
                for axis in range(pointset.dim)
            )
            self.check_finite(matrix, boundary_indexes[is_neumann], "Neumann row matrix")
            linear_rows.append(matrix)
            linear_values.append(problem.get_neumann_value(points, normals))
            linear_row_classes.extend(['neumann'] * len(points))
        for function in self.enrichment:
            row = np.zeros((1, self.column_count))
            row[0, :len(self.centres)] = function.evaluate(nlkansa.rbf_kernels.get_component('u'), self.centres)
            linear_rows.append(row)
            linear_values.append(np.zeros(1))
            linear_row_classes.append('ancillary')
        if kernel.augment_constant:
            row = np.zeros((1, self.column_count))
            row[0, :len(self.centres)] = 1.0
            linear_rows.append(row)
            linear_values.append(np.zeros(1))
            linear_row_classes.append('moment')
        self.linear_matrix = (
            np.concatenate(linear_rows, axis=0) if len(linear_rows) > 0 else np.zeros((0, self.column_count))
        )
        self.linear_vector = (
            np.concatenate(linear_values).astype(float) if len(linear_values) > 0 else np.zeros(0)
        )
        self.linear_row_classes = np.array(linear_row_classes, dtype=object)

        # Check squareness.
        if len(self.pde_node_indexes) + len(self.linear_vector) != self.column_count:
            logger.error(
                f"Collocation system is not square: {len(self.pde_node_indexes)} PDE rows and "
                f"{len(self.linear_vector)} linear rows for {self.column_count} unknowns."
            )
            raise nlkansa.utils.ValidationError("Collocation system is not square.")

        # Obtain elimination of the linear block.
        if self.eliminate and (len(self.linear_vector) > 0):
            self.set_elimination()
            self.reduced_matrices = self.component_matrices @ self.null_space_basis
            self.offset_values = self.component_matrices @ self.particular_coefficients
        else:
            self.permutation = None
            self.triangular_factor = None
            self.range_basis = np.zeros((self.column_count, 0))
            self.null_space_basis = np.eye(self.column_count)
            self.particular_coefficients = np.zeros(self.column_count)
            self.reduced_matrices = self.component_matrices
            self.offset_values = np.zeros(self.component_matrices.shape[:2])
        self.dimension = self.null_space_basis.shape[1]

        nlkansa.utils.log_time('collocation system setup', logger_object=logger)
        logger.debug(
            f"Collocation system for {problem} with {kernel}: {len(self.pde_node_indexes)} PDE rows, "
            f"{len(self.linear_vector)} linear rows, reduced dimension {self.dimension}."
        )

    def get_columns(
            self,
            component: nlkansa.rbf_kernels.DifferentialComponent,
            points: np.ndarray
    ) -> np.ndarray:
        """Obtain row block [D_m phi, D_m h, D_m 1] for all columns at given points."""

        blocks = [nlkansa.rbf_kernels.assemble_matrix(self.kernel, component, points, self.centres)]
        if len(self.enrichment) > 0:
            blocks.append(np.stack([function.evaluate(component, points) for function in self.enrichment], axis=1))
        if self.kernel.augment_constant:
            blocks.append(np.full((len(points), 1), 1.0 if component.kind == 'identity' else 0.0))

        return np.concatenate(blocks, axis=1)

    @staticmethod
    def check_finite(
            matrix: np.ndarray,
            node_indexes: np.ndarray,
            label: str
    ):
        is_finite = np.isfinite(matrix)
        if not np.all(is_finite):
            row_index = np.nonzero(~is_finite)[-2][0]
            logger.error(f"Non-finite entries in {label} at node {node_indexes[row_index]}.")
            raise nlkansa.utils.EvaluationError(f"Non-finite entries in {label}.", int(node_indexes[row_index]))

    def set_elimination(self):
        """Factorize B^T P = Q R and obtain null space basis Z and particular solution of B alpha = b."""

        row_count = len(self.linear_vector)
        q_factor, r_factor, permutation = scipy.linalg.qr(self.linear_matrix.T, pivoting=True)
        diagonal = np.abs(np.diag(r_factor[:row_count, :row_count]))
        tolerance = max(self.linear_matrix.shape) * nlkansa.config.machine_epsilon * diagonal[0]
        if (row_count > self.column_count) or (diagonal[-1] <= tolerance):
            rank = int(np.sum(diagonal > tolerance))
            logger.error(f"Linear block is rank deficient: rank {rank} for {row_count} rows.")
            raise nlkansa.utils.DegenerateLinearBlockError(
                f"Linear block is rank deficient: rank {rank} for {row_count} rows."
            )

        self.permutation = permutation
        self.triangular_factor = r_factor[:row_count, :row_count]
        self.range_basis = q_factor[:, :row_count]
        self.null_space_basis = q_factor[:, row_count:]
        self.particular_coefficients = self.range_basis @ scipy.linalg.solve_triangular(
            self.triangular_factor,
            self.linear_vector[permutation],
            trans='T'
        )

    def get_coefficients(
            self,
            beta: np.ndarray
    ) -> np.ndarray:
        """Obtain full coefficients alpha from reduced coefficients beta."""
        return self.particular_coefficients + self.null_space_basis @ beta

    def get_reduced_coefficients(
            self,
            alpha: np.ndarray
    ) -> np.ndarray:
        """Obtain reduced coefficients beta by projecting alpha - alpha_particular onto Z."""
        return self.null_space_basis.T @ (alpha - self.particular_coefficients)

    def get_component_values(
            self,
            beta: np.ndarray
    ) -> typing.Dict[str, np.ndarray]:
        values = self.offset_values + self.reduced_matrices @ beta
        return dict(zip(self.problem.component_names, values))

    def get_full_component_values(
            self,
            alpha: np.ndarray
    ) -> typing.Dict[str, np.ndarray]:
        values = self.component_matrices @ alpha
        return dict(zip(self.problem.component_names, values))

    def get_pde_terms(
            self,
            values: typing.Dict[str, np.ndarray],
            order: int
    ) -> typing.List[np.ndarray]:
        """Obtain residual and, up to given order, its first and second partials at the PDE rows."""

        terms = [self.problem.get_residual(self.pde_points, values)]
        if order >= 1:
            terms.append(np.reshape(self.problem.get_residual_d1(self.pde_points, values), (-1, len(self.pde_points))))
        if order >= 2:
            terms.append(np.reshape(
                self.problem.get_residual_d2(self.pde_points, values),
                (len(self.components), len(self.components), len(self.pde_points))
            ))
        for term in terms:
            is_finite = np.isfinite(term)
            if not np.all(is_finite):
                node_index = int(self.pde_node_indexes[np.nonzero(~is_finite)[-1][0]])
                logger.debug(f"Non-finite residual evaluation at node {node_index}.")
                raise nlkansa.utils.EvaluationError("Non-finite residual evaluation.", node_index)

        return terms

    @property
    def components(self) -> list:
        return self.problem.components

    def residual(
            self,
            beta: np.ndarray
    ) -> np.ndarray:
        """Residual vector W(beta), restricted to the PDE rows when eliminating."""

        pde_residual = self.get_pde_terms(self.get_component_values(beta), order=0)[0]
        if self.eliminate:
            return pde_residual
        return np.concatenate([pde_residual, self.linear_matrix @ beta - self.linear_vector])

    def jacobian(
            self,
            beta: np.ndarray
    ) -> np.ndarray:
        """Jacobian J(beta) = sum_m diag[dW / dD_m] [D_m phi] Z."""

        return self.get_merit_state(beta).jacobian

    def merit_hessian(
            self,
            beta: np.ndarray
    ) -> np.ndarray:
        """Merit Hessian H(beta) = sum_m sum_n [D_m phi Z]^T diag[d1_m d1_n + W d2_mn] [D_n phi Z]."""

        return self.get_merit_state(beta, with_hessian=True).hessian

    def merit_and_grad(
            self,
            beta: np.ndarray
    ) -> typing.Tuple[float, np.ndarray]:

        merit_state = self.get_merit_state(beta)

        return merit_state.merit, merit_state.gradient

    def get_merit(
            self,
            beta: np.ndarray
    ) -> float:
        residual = self.residual(beta)
        return 0.5 * float(residual @ residual)

    def get_merit_state(
            self,
            beta: np.ndarray,
            with_hessian: bool = False
    ) -> MeritState:
        """Obtain merit state at beta. The Hessian is only assembled if requested."""

        values = self.get_component_values(beta)
        terms = self.get_pde_terms(values, order=(2 if with_hessian else 1))
        pde_residual, d1 = terms[0], terms[1]

        # Obtain Jacobian.
        jacobian = np.einsum('mi,mij->ij', d1, self.reduced_matrices)
        residual = pde_residual
        if not self.eliminate:
            residual = np.concatenate([pde_residual, self.linear_matrix @ beta - self.linear_vector])
            jacobian = np.concatenate([jacobian, self.linear_matrix], axis=0)

        # Obtain Hessian.
        hessian = None
        if with_hessian:
            weights = d1[:, np.newaxis, :] * d1[np.newaxis, :, :] + pde_residual * terms[2]
            hessian = np.zeros((self.dimension, self.dimension))
            for index_m in range(len(self.components)):
                weighted_matrix = np.einsum('ni,nij->ij', weights[index_m], self.reduced_matrices)
                hessian += self.reduced_matrices[index_m].T @ weighted_matrix
            if not self.eliminate:
                hessian += self.linear_matrix.T @ self.linear_matrix
            hessian = 0.5 * (hessian + hessian.T)

        return MeritState(beta, self.get_coefficients(beta), residual, jacobian, hessian)

    def merit_hessian_parity(
            self,
            beta: np.ndarray
    ) -> np.ndarray:
        """Merit Hessian assembled with [D_m phi]^T = parity_m [D_m phi].

        - Only valid for the symmetric layout, where the PDE rows coincide with the centres, i.e. without
          boundary rows, extra centres, enrichment or elimination.
        """

        if not (
            (len(self.linear_vector) == 0)
            and (len(self.enrichment) == 0)
            and not self.kernel.augment_constant
            and (len(self.pde_points) == len(self.centres))
            and np.array_equal(self.pde_points, self.centres)
        ):
            logger.error("Parity Hessian assembly requires PDE rows which coincide with the centres.")
            raise nlkansa.utils.ConfigurationError(
                "Parity Hessian assembly requires PDE rows which coincide with the centres."
            )

        values = self.get_component_values(beta)
        pde_residual, d1, d2 = self.get_pde_terms(values, order=2)
        weights = d1[:, np.newaxis, :] * d1[np.newaxis, :, :] + pde_residual * d2
        hessian = np.zeros((self.dimension, self.dimension))
        for index_m, component in enumerate(self.components):
            weighted_matrix = np.einsum('ni,nij->ij', weights[index_m], self.component_matrices)
            hessian += component.parity * self.component_matrices[index_m] @ weighted_matrix

        return hessian

    def get_full_jacobian(
            self,
            alpha: np.ndarray
    ) -> np.ndarray:
        """Jacobian of the PDE rows with respect to the full coefficients alpha."""

        d1 = self.get_pde_terms(self.get_full_component_values(alpha), order=1)[1]

        return np.einsum('mi,mij->ij', d1, self.component_matrices)

    def get_collocation_residual(
            self,
            alpha: np.ndarray
    ) -> np.ndarray:
        """Collocation residual on all rows, i.e. PDE rows followed by linear rows."""

        pde_residual = self.get_pde_terms(self.get_full_component_values(alpha), order=0)[0]

        return np.concatenate([pde_residual, self.linear_matrix @ alpha - self.linear_vector])

    def evaluate(
            self,
            alpha: np.ndarray,
            component_name: str,
            points: np.ndarray
    ) -> np.ndarray:
        """Evaluate D_m u of the interpolant with coefficients alpha at given points."""

        return self.get_columns(nlkansa.rbf_kernels.get_component(component_name), points) @ alpha

    def get_pde_residual_at(
            self,
            alpha: np.ndarray,
            points: np.ndarray
    ) -> np.ndarray:
        """Evaluate the PDE residual of the interpolant at arbitrary points, e.g. an evaluation set."""

        values = {
            name: self.evaluate(alpha, name, points)
            for name in self.problem.component_names
        }

        return self.problem.get_residual(points, values)

    def get_laplacian_coefficients(self) -> typing.Dict[str, np.ndarray]:
        """Obtain coefficients which express the Laplacian through the problem components."""

        if 'laplacian_u' in self.problem.component_names:
            names = ['laplacian_u']
        else:
            names = [f"u_{label}{label}" for label in nlkansa.rbf_kernels.axis_labels[:self.problem.dim]]
            if not all(name in self.problem.component_names for name in names):
                logger.error(f"Problem {self.problem} does not provide components to form the Laplacian.")
                raise nlkansa.utils.GuessError(f"Problem {self.problem} does not provide the Laplacian components.")

        return {name: np.ones(len(self.pde_points)) for name in names}

    def solve_linear(
            self,
            coefficients: typing.Dict[str, np.ndarray],
            right_hand_side: np.ndarray
    ) -> np.ndarray:
        """Solve the linear Kansa system sum_m c_m D_m u = rhs on the PDE rows, with the linear rows of this system.

        - Returns the full coefficients alpha. Singular collocation matrices raise a guess error.
        """

        matrix = np.concatenate([
            sum(
                np.asarray(coefficient, dtype=float)[:, np.newaxis]
                * self.component_matrices[self.problem.component_names.index(name)]
                for name, coefficient in coefficients.items()
            ),
            self.linear_matrix
        ])
        vector = np.concatenate([right_hand_side, self.linear_vector])

        try:
            lu_factors = scipy.linalg.lu_factor(matrix)
            alpha = scipy.linalg.lu_solve(lu_factors, vector)
        except (ValueError, np.linalg.LinAlgError) as exception:
            logger.error(f"Linear collocation solve failed: {exception}")
            raise nlkansa.utils.GuessError(f"Linear collocation solve failed: {exception}")
        if (not np.all(np.isfinite(alpha))) or np.any(np.diag(lu_factors[0]) == 0.0):
            logger.error("Linear collocation matrix is singular.")
            raise nlkansa.utils.GuessError("Linear collocation matrix is singular.")

        return alpha


def build_system(
        kernel: nlkansa.rbf_kernels.KernelSpec,
        pointset: nlkansa.geometry.Pointset,
        problem: ProblemDefinition,
        eliminate: bool = None
) -> CollocationSystem:
    """Build the collocation system. See `CollocationSystem`."""

    return CollocationSystem(kernel, pointset, problem, eliminate=eliminate)


def residual(system: CollocationSystem, beta: np.ndarray) -> np.ndarray:
    return system.residual(beta)


def jacobian(system: CollocationSystem, beta: np.ndarray) -> np.ndarray:
    return system.jacobian(beta)


def merit_hessian(system: CollocationSystem, beta: np.ndarray) -> np.ndarray:
    return system.merit_hessian(beta)


def merit_and_grad(system: CollocationSystem, beta: np.ndarray) -> typing.Tuple[float, np.ndarray]:
    return system.merit_and_grad(beta)


def get_finite_difference_jacobian(
        function: typing.Callable[[np.ndarray], np.ndarray],
        point: np.ndarray,
        step_factor: float = None,
        scheme: str = 'central'
) -> np.ndarray:
    """Column-wise finite difference Jacobian of a vector function, with steps h_j = factor (1 + |x_j|).

    - `scheme` is 'central' (default step factor eps^(1/3)) or 'forward' (default step factor eps^(1/2)).
    """

    point = np.asarray(point, dtype=float)
    if scheme == 'central':
        if step_factor is None:
            step_factor = nlkansa.config.config['system']['finite_difference_step_factor']
    elif scheme == 'forward':
        if step_factor is None:
            step_factor = np.sqrt(nlkansa.config.machine_epsilon)
        value = np.asarray(function(point))
    else:
        logger.error(f"Unknown finite difference scheme: {scheme}")
        raise nlkansa.utils.ConfigurationError(f"Unknown finite difference scheme: {scheme}")

    columns = []
    for index in range(len(point)):
        step = step_factor * (1.0 + abs(point[index]))
        point_plus = point.copy()
        point_plus[index] += step
        if scheme == 'central':
            point_minus = point.copy()
            point_minus[index] -= step
            columns.append((np.asarray(function(point_plus)) - np.asarray(function(point_minus))) / (2.0 * step))
        else:
            columns.append((np.asarray(function(point_plus)) - value) / step)

    return np.stack(columns, axis=-1)


def fd_jacobian(
        system: CollocationSystem,
        beta: np.ndarray,
        step_factor: float = None,
        scheme: str = 'central'
) -> np.ndarray:
    """Finite difference Jacobian of the residual, used as oracle and as degraded baseline."""

    return get_finite_difference_jacobian(system.residual, beta, step_factor=step_factor, scheme=scheme)


def fd_merit_hessian(
        system: CollocationSystem,
        beta: np.ndarray,
        step_factor: float = None
) -> np.ndarray:
    """Finite difference merit Hessian from central differences of the analytic gradient, symmetrized."""

    hessian = get_finite_difference_jacobian(
        lambda beta_: system.merit_and_grad(beta_)[1],
        beta,
        step_factor=step_factor
    )

    return 0.5 * (hessian + hessian.T)


def get_relative_discrepancy(
        actual: np.ndarray,
        reference: np.ndarray
) -> float:
    """Maximum entrywise deviation, relative to the maximum reference entry."""

    scale = np.max(np.abs(reference)) if np.size(reference) > 0 else 0.0
    deviation = np.max(np.abs(np.asarray(actual) - np.asarray(reference))) if np.size(reference) > 0 else 0.0
    if scale == 0.0:
        return float(deviation)

    return float(deviation / scale)


def get_derivative_discrepancy(
        problem: ProblemDefinition,
        points: np.ndarray,
        values: typing.Dict[str, np.ndarray],
        step_factor: float = None
) -> typing.Tuple[float, float]:
    """Compare the problem's first / second partials against central differences of residual / first partials.

    - The residual at each node only depends on the component values at that node, hence each component is
      perturbed at all nodes at once.
    - Returns the relative discrepancies of d1 and d2.
    """

    if step_factor is None:
        step_factor = nlkansa.config.config['system']['finite_difference_step_factor']

    d1 = np.reshape(problem.get_residual_d1(points, values), (len(problem.components), len(points)))
    d2 = np.reshape(
        problem.get_residual_d2(points, values),
        (len(problem.components), len(problem.components), len(points))
    )
    d1_difference = np.zeros(d1.shape)
    d2_difference = np.zeros(d2.shape)
    for index, name in enumerate(problem.component_names):
        step = step_factor * (1.0 + np.abs(values[name]))
        values_plus = {**values, name: values[name] + step}
        values_minus = {**values, name: values[name] - step}
        d1_difference[index] = (
            (problem.get_residual(points, values_plus) - problem.get_residual(points, values_minus)) / (2.0 * step)
        )
        d2_difference[index] = (
            (
                np.reshape(problem.get_residual_d1(points, values_plus), d1.shape)
                - np.reshape(problem.get_residual_d1(points, values_minus), d1.shape)
            ) / (2.0 * step)
        )

    return get_relative_discrepancy(d1, d1_difference), get_relative_discrepancy(d2, d2_difference)
