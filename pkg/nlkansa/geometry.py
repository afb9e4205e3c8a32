"""Geometry module for collocation pointsets, evaluation sets and fill distance."""

import numpy as np
import os
import scipy.spatial
import scipy.stats.qmc
import typing

import nlkansa.config
import nlkansa.utils

logger = nlkansa.config.get_logger(__name__)

boundary_tags = ['D', 'N', 'DP', 'NP']


class Pointset(nlkansa.utils.ObjectBase):
    """Collocation pointset object.

    - `nodes` holds the interior nodes first, followed by the boundary nodes.
    - `normals` and `boundary_tags` are given per boundary node, with tags:
      'D' (Dirichlet), 'N' (Neumann), 'DP' (Dirichlet and PDE), 'NP' (Neumann and PDE).
    - `extra_centres` are the additional RBF centres, one per PDE-enforced boundary node.
    - `domain` describes the generating domain, which is used to draw evaluation sets.
    """

    nodes: np.ndarray
    interior_count: int
    normals: np.ndarray
    boundary_tags: np.ndarray
    extra_centres: np.ndarray
    domain: dict
    dim: int

    def __init__(
            self,
            nodes: np.ndarray,
            interior_count: int,
            normals: np.ndarray,
            boundary_tags: typing.Sequence[str],
            extra_centres: np.ndarray = None,
            domain: dict = None
    ):

        self.nodes = np.array(nodes, dtype=float, ndmin=2)
        self.dim = self.nodes.shape[1]
        self.interior_count = int(interior_count)
        self.normals = np.array(normals, dtype=float).reshape((-1, self.dim))
        self.boundary_tags = np.array(boundary_tags, dtype=object)
        self.extra_centres = (
            np.zeros((0, self.dim))
            if extra_centres is None
            else np.array(extra_centres, dtype=float).reshape((-1, self.dim))
        )
        self.domain = dict(name='File') if domain is None else domain

        self.validate()

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def boundary_count(self) -> int:
        return len(self.nodes) - self.interior_count

    @property
    def centres(self) -> np.ndarray:
        """All RBF centres, i.e. the nodes followed by the extra centres."""
        return np.concatenate([self.nodes, self.extra_centres], axis=0)

    def validate(self):
        """Validate pointset invariants, raising a validation error on violation."""

        if not (0 <= self.interior_count <= len(self.nodes)):
            logger.error(f"Invalid interior count {self.interior_count} for {len(self.nodes)} nodes.")
            raise nlkansa.utils.ValidationError(f"Invalid interior count {self.interior_count}.")
        if (len(self.normals) != self.boundary_count) or (len(self.boundary_tags) != self.boundary_count):
            logger.error("Number of normals / boundary tags does not match the number of boundary nodes.")
            raise nlkansa.utils.ValidationError(
                "Number of normals / boundary tags does not match the number of boundary nodes."
            )
        invalid_tags = set(self.boundary_tags) - set(boundary_tags)
        if len(invalid_tags) > 0:
            logger.error(f"Invalid boundary tags: {invalid_tags}")
            raise nlkansa.utils.ValidationError(f"Invalid boundary tags: {invalid_tags}")

        # Unit normals.
        if self.boundary_count > 0:
            normal_error = np.max(np.abs(np.linalg.norm(self.normals, axis=1) - 1.0))
            if normal_error > 1e-8:
                logger.error(f"Boundary normals are not of unit length (deviation {normal_error}).")
                raise nlkansa.utils.ValidationError(
                    f"Boundary normals are not of unit length (deviation {normal_error})."
                )

        # Distinct centres.
        centres = self.centres
        if len(np.unique(centres, axis=0)) < len(centres):
            logger.error("Pointset contains duplicate nodes / centres.")
            raise nlkansa.utils.ValidationError("Pointset contains duplicate nodes / centres.")

        # One extra centre per PDE-enforced boundary node keeps the collocation system square.
        pde_boundary_count = int(np.sum(np.isin(self.boundary_tags, ['DP', 'NP'])))
        if len(self.extra_centres) != pde_boundary_count:
            logger.error(
                f"Number of extra centres ({len(self.extra_centres)}) does not match the number of "
                f"PDE-enforced boundary nodes ({pde_boundary_count})."
            )
            raise nlkansa.utils.ValidationError(
                "Number of extra centres does not match the number of PDE-enforced boundary nodes."
            )


class EvaluationSet(nlkansa.utils.ObjectBase):
    """Evaluation set object, i.e. points inside the closed domain, disjoint from the collocation nodes."""

    points: np.ndarray

    def __init__(
            self,
            points: np.ndarray
    ):

        self.points = np.array(points, dtype=float, ndmin=2)

        try:
            assert len(self.points) >= 1
        except AssertionError:
            logger.error("Evaluation set must contain at least one point.")
            raise


def generate_grid(
        domain: str,
        points_per_side: int
) -> Pointset:
    """Generate tensor grid pointset on 'UnitSquare' or 'UnitCube', with all boundary nodes tagged Dirichlet."""

    if domain == 'UnitSquare':
        dim = 2
    elif domain == 'UnitCube':
        dim = 3
    else:
        logger.error(f"Unknown grid domain: {domain}")
        raise nlkansa.utils.ConfigurationError(f"Unknown grid domain: {domain}")
    if points_per_side < 3:
        logger.error(f"Grid requires at least 3 points per side, but got {points_per_side}.")
        raise nlkansa.utils.ConfigurationError(f"Grid requires at least 3 points per side.")

    # Obtain grid coordinates and indexes.
    coordinates = np.linspace(0.0, 1.0, points_per_side)
    indexes = np.stack(np.meshgrid(*[np.arange(points_per_side)] * dim, indexing='ij'), axis=-1).reshape((-1, dim))
    nodes = coordinates[indexes]

    # Obtain outward normals as normalized sum of the adjacent face normals.
    face_normals = (
        (indexes == (points_per_side - 1)).astype(float)
        - (indexes == 0).astype(float)
    )
    is_boundary = np.any(face_normals != 0.0, axis=1)
    normals = face_normals[is_boundary]
    normals = normals / np.linalg.norm(normals, axis=1, keepdims=True)

    return Pointset(
        np.concatenate([nodes[~is_boundary], nodes[is_boundary]]),
        int(np.sum(~is_boundary)),
        normals,
        ['D'] * int(np.sum(is_boundary)),
        domain=dict(name=domain)
    )


def get_halton_points(
        count: int,
        lower_bounds: np.ndarray,
        upper_bounds: np.ndarray,
        seed: int,
        is_inside: typing.Callable[[np.ndarray], np.ndarray]
) -> np.ndarray:
    """Draw `count` points of a scrambled Halton sequence within the box and accept those `is_inside` the domain."""

    lower_bounds = np.asarray(lower_bounds, dtype=float)
    upper_bounds = np.asarray(upper_bounds, dtype=float)
    sampler = scipy.stats.qmc.Halton(d=len(lower_bounds), scramble=True, seed=seed)

    points = np.zeros((0, len(lower_bounds)))
    batch_size = max(64, 2 * count)
    while len(points) < count:
        candidates = scipy.stats.qmc.scale(sampler.random(batch_size), lower_bounds, upper_bounds)
        points = np.concatenate([points, candidates[is_inside(candidates)]])
        if batch_size > 1e8:
            logger.error("Halton rejection sampling does not produce points inside the domain.")
            raise nlkansa.utils.ConfigurationError("Halton rejection sampling failed. Check the domain parameters.")
        batch_size *= 2

    return points[:count]


def generate_disc(
        radius: float,
        interior_count: int,
        boundary_count: int,
        seed: int = 0
) -> Pointset:
    """Generate scattered pointset on the disc of given radius centred at the origin.

    - Interior nodes are drawn from a scrambled Halton sequence, rejected to the disc and kept half a boundary
      spacing away from the boundary ring.
    - Boundary nodes are equispaced on the ring, starting at angle zero, with radial outward normals.
    """

    if not (radius > 0.0) or (boundary_count < 1) or (interior_count < 0):
        logger.error(f"Invalid disc parameters: radius = {radius}, counts = {interior_count}, {boundary_count}")
        raise nlkansa.utils.ConfigurationError("Invalid disc parameters.")

    # Obtain boundary nodes.
    angles = 2.0 * np.pi * np.arange(boundary_count) / boundary_count
    boundary_nodes = radius * np.stack([np.cos(angles), np.sin(angles)], axis=1)
    normals = boundary_nodes / np.linalg.norm(boundary_nodes, axis=1, keepdims=True)

    # Obtain interior nodes.
    margin = 0.5 * 2.0 * np.pi * radius / boundary_count
    interior_radius = max(radius - margin, 0.5 * radius)
    interior_nodes = (
        get_halton_points(
            interior_count,
            [-radius, -radius],
            [radius, radius],
            seed,
            lambda points: np.linalg.norm(points, axis=1) < interior_radius
        )
        if interior_count > 0
        else np.zeros((0, 2))
    )

    return Pointset(
        np.concatenate([interior_nodes, boundary_nodes]),
        interior_count,
        normals,
        ['D'] * boundary_count,
        domain=dict(name='Disc', radius=radius)
    )


def generate_mold(
        width: float = 2.0,
        height: float = 1.0,
        inlet: typing.Tuple[float, float] = (0.375, 0.625),
        boundary_spacing: float = 0.0625,
        interior_count: int = 400,
        seed: int = 0
) -> Pointset:
    """Generate the mold floor-plan pointset: a rectangle with an injection slit.

    - The inlet lies on the left edge `x = 0` between `inlet[0]` and `inlet[1]`. Its two end nodes are the
      singular points and are tagged Dirichlet only. The other inlet nodes are tagged Dirichlet and PDE.
    - The moving front is the right edge `x = width` including its corners, tagged Dirichlet and PDE.
    - The walls are the remaining boundary, tagged Neumann and PDE. The left corners carry diagonal normals.
    - One extra centre per PDE-enforced boundary node is placed along the outward normal at the boundary spacing.
    """

    # Obtain edge subdivisions.
    width_steps = int(round(width / boundary_spacing))
    height_steps = int(round(height / boundary_spacing))
    inlet_steps = [int(round(value / boundary_spacing)) for value in inlet]
    try:
        assert np.isclose(width_steps * boundary_spacing, width)
        assert np.isclose(height_steps * boundary_spacing, height)
        assert all(np.isclose(step * boundary_spacing, value) for step, value in zip(inlet_steps, inlet))
        assert 0 < inlet_steps[0] < inlet_steps[1] < height_steps
    except AssertionError:
        logger.error(
            f"Mold dimensions ({width}, {height}) and inlet {inlet} must be positive multiples of the boundary "
            f"spacing {boundary_spacing}, with the inlet strictly inside the left edge."
        )
        raise nlkansa.utils.ConfigurationError("Invalid mold geometry parameters.")

    # Obtain boundary nodes, normals and tags, counterclockwise from the origin.
    boundary_nodes = []
    normals = []
    tags = []
    diagonal = 1.0 / np.sqrt(2.0)
    boundary_nodes.append([0.0, 0.0])
    normals.append([-diagonal, -diagonal])
    tags.append('NP')
    for index in range(1, width_steps):
        boundary_nodes.append([index * boundary_spacing, 0.0])
        normals.append([0.0, -1.0])
        tags.append('NP')
    for index in range(0, height_steps + 1):
        boundary_nodes.append([width, index * boundary_spacing])
        normals.append([1.0, 0.0])
        tags.append('DP')
    for index in range(width_steps - 1, 0, -1):
        boundary_nodes.append([index * boundary_spacing, height])
        normals.append([0.0, 1.0])
        tags.append('NP')
    boundary_nodes.append([0.0, height])
    normals.append([-diagonal, diagonal])
    tags.append('NP')
    for index in range(height_steps - 1, 0, -1):
        boundary_nodes.append([0.0, index * boundary_spacing])
        normals.append([-1.0, 0.0])
        if index in inlet_steps:
            tags.append('D')
        elif inlet_steps[0] < index < inlet_steps[1]:
            tags.append('DP')
        else:
            tags.append('NP')
    boundary_nodes = np.array(boundary_nodes)
    normals = np.array(normals)
    tags = np.array(tags, dtype=object)

    # Obtain extra centres.
    is_pde = np.isin(tags, ['DP', 'NP'])
    extra_centres = boundary_nodes[is_pde] + boundary_spacing * normals[is_pde]

    # Obtain interior nodes.
    margin = 0.5 * boundary_spacing
    interior_nodes = get_halton_points(
        interior_count,
        [margin, margin],
        [width - margin, height - margin],
        seed,
        lambda points: np.ones(len(points), dtype=bool)
    )

    return Pointset(
        np.concatenate([interior_nodes, boundary_nodes]),
        interior_count,
        normals,
        tags,
        extra_centres=extra_centres,
        domain=dict(
            name='Mold',
            width=width,
            height=height,
            inlet=tuple(inlet),
            singularities=[[0.0, inlet[0]], [0.0, inlet[1]]]
        )
    )


def get_domain_sampler(
        pointset: Pointset
) -> typing.Tuple[np.ndarray, np.ndarray, typing.Callable[[np.ndarray], np.ndarray]]:
    """Obtain bounding box and membership test of the closed domain of given pointset."""

    domain = pointset.domain
    if domain['name'] in ['UnitSquare', 'UnitCube']:
        return (
            np.zeros(pointset.dim),
            np.ones(pointset.dim),
            lambda points: np.ones(len(points), dtype=bool)
        )
    elif domain['name'] == 'Disc':
        return (
            -domain['radius'] * np.ones(2),
            domain['radius'] * np.ones(2),
            lambda points: np.linalg.norm(points, axis=1) <= domain['radius']
        )
    elif domain['name'] == 'Mold':
        return (
            np.zeros(2),
            np.array([domain['width'], domain['height']]),
            lambda points: np.ones(len(points), dtype=bool)
        )
    elif pointset.dim == 1:
        return (
            np.min(pointset.nodes, axis=0),
            np.max(pointset.nodes, axis=0),
            lambda points: np.ones(len(points), dtype=bool)
        )
    else:
        # Loaded pointsets are sampled within the convex hull of their nodes.
        try:
            triangulation = scipy.spatial.Delaunay(pointset.nodes)
        except scipy.spatial.QhullError as exception:
            logger.error(f"Cannot triangulate the nodes of the loaded pointset: {exception}")
            raise nlkansa.utils.DomainError(f"Cannot triangulate the nodes of the loaded pointset: {exception}")
        return (
            np.min(pointset.nodes, axis=0),
            np.max(pointset.nodes, axis=0),
            lambda points: triangulation.find_simplex(points) >= 0
        )


def generate_evaluation_set(
        pointset: Pointset,
        count: int,
        seed: int = 0
) -> EvaluationSet:
    """Generate evaluation set of `count` quasi-random points in the closed domain, disjoint from the nodes."""

    lower_bounds, upper_bounds, is_inside = get_domain_sampler(pointset)
    node_tree = scipy.spatial.cKDTree(pointset.nodes)

    def is_valid(points: np.ndarray) -> np.ndarray:
        distances = node_tree.query(points)[0]
        return is_inside(points) & (distances > 1e-12)

    # A different seed stream than the node generators avoids reproducing the interior nodes.
    points = get_halton_points(count, lower_bounds, upper_bounds, seed + 7919, is_valid)

    return EvaluationSet(points)


def fill_distance(
        pointset: Pointset,
        evaluation_set: EvaluationSet
) -> float:
    """Obtain fill distance, i.e. the maximum distance of evaluation points to their nearest node."""

    node_tree = scipy.spatial.cKDTree(pointset.nodes)
    distances = node_tree.query(evaluation_set.points)[0]

    return float(np.max(distances))


def save_pointset(
        pointset: Pointset,
        path: str
):
    """Write pointset to the plain text format.

    - Header line `d M N n_extra`.
    - One node per line `x [y [z]] tag [nx [ny [nz]]]`, where interior nodes carry tag `I` and no normal.
    - Extra centres follow with tag `X`.
    - Floats are written with their shortest round-trip representation, hence loading reproduces them exactly.
    """

    def format_values(values) -> str:
        return ' '.join(repr(float(value)) for value in values)

    with open(path, 'w') as file:
        file.write(
            f"{pointset.dim} {pointset.interior_count} {pointset.node_count} {len(pointset.extra_centres)}\n"
        )
        for node in pointset.nodes[:pointset.interior_count]:
            file.write(f"{format_values(node)} I\n")
        for node, tag, normal in zip(
                pointset.nodes[pointset.interior_count:],
                pointset.boundary_tags,
                pointset.normals
        ):
            file.write(f"{format_values(node)} {tag} {format_values(normal)}\n")
        for centre in pointset.extra_centres:
            file.write(f"{format_values(centre)} X\n")


def load_pointset(
        path: str
) -> Pointset:
    """Load pointset from the plain text format, see `save_pointset`. Raises parse errors with line number."""

    if not os.path.isfile(path):
        logger.error(f"Pointset file not found: {path}")
        raise nlkansa.utils.ParseError(f"Pointset file not found: {path}")

    with open(path, 'r') as file:
        lines = [
            (line_number, line.split())
            for line_number, line in enumerate(file, start=1)
            if (len(line.strip()) > 0) and not line.strip().startswith('#')
        ]

    if len(lines) == 0:
        logger.error(f"Empty pointset file: {path}")
        raise nlkansa.utils.ParseError(f"Empty pointset file: {path}")

    # Parse header.
    line_number, fields = lines[0]
    try:
        dim, interior_count, node_count, extra_count = (int(field) for field in fields)
        assert dim in [1, 2, 3]
        assert 0 <= interior_count <= node_count
        assert extra_count >= 0
    except (ValueError, AssertionError):
        logger.error(f"Invalid pointset header in line {line_number}: {' '.join(fields)}")
        raise nlkansa.utils.ParseError(f"Invalid header `{' '.join(fields)}`, expected `d M N n_extra`.", line_number)
    if len(lines) != 1 + node_count + extra_count:
        logger.error(f"Pointset file has {len(lines) - 1} entries, expected {node_count + extra_count}.")
        raise nlkansa.utils.ParseError(
            f"Pointset file has {len(lines) - 1} entries, expected {node_count + extra_count}.",
            lines[-1][0]
        )

    # Parse nodes and extra centres.
    nodes = []
    normals = []
    tags = []
    extra_centres = []
    for entry_index, (line_number, fields) in enumerate(lines[1:]):
        if entry_index < interior_count:
            expected_tags = ['I']
        elif entry_index < node_count:
            expected_tags = boundary_tags
        else:
            expected_tags = ['X']
        try:
            tag = fields[dim]
            assert tag in expected_tags
            coordinates = [float(field) for field in fields[:dim]]
            if tag in boundary_tags:
                assert len(fields) == 2 * dim + 1
                normals.append([float(field) for field in fields[dim + 1:]])
            else:
                assert len(fields) == dim + 1
        except (ValueError, IndexError, AssertionError):
            logger.error(f"Invalid pointset entry in line {line_number}: {' '.join(fields)}")
            raise nlkansa.utils.ParseError(
                f"Invalid entry `{' '.join(fields)}`, expected tag in {expected_tags}.",
                line_number
            )
        if tag == 'X':
            extra_centres.append(coordinates)
        else:
            nodes.append(coordinates)
            if tag != 'I':
                tags.append(tag)

    return Pointset(
        np.array(nodes).reshape((-1, dim)),
        interior_count,
        np.array(normals).reshape((-1, dim)),
        tags,
        extra_centres=np.array(extra_centres).reshape((-1, dim)),
        domain=dict(name='File', path=path)
    )
