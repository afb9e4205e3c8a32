"""Test geometry."""

import numpy as np
import os
from parameterized import parameterized
import tempfile
import time
import unittest

import nlkansa.config
import nlkansa.geometry
import nlkansa.utils

logger = nlkansa.config.get_logger(__name__)


class TestGeometry(unittest.TestCase):

    def test_generate_grid(self):
        points_per_side = nlkansa.config.config['tests']['grid_points_per_side']

        # Get actual result.
        time_start = time.time()
        pointset = nlkansa.geometry.generate_grid('UnitSquare', points_per_side)
        time_duration = time.time() - time_start
        logger.info(f"Test generate_grid: Completed in {time_duration:.6f} seconds.")

        # Compare expected and actual.
        self.assertEqual(pointset.node_count, points_per_side ** 2)
        self.assertEqual(pointset.interior_count, (points_per_side - 2) ** 2)
        self.assertTrue(np.all(pointset.boundary_tags == 'D'))
        interior_nodes = pointset.nodes[:pointset.interior_count]
        self.assertTrue(np.all((interior_nodes > 0.0) & (interior_nodes < 1.0)))
        corner_index = np.nonzero(np.all(pointset.nodes[pointset.interior_count:] == 0.0, axis=1))[0][0]
        np.testing.assert_allclose(pointset.normals[corner_index], -np.ones(2) / np.sqrt(2.0))

    def test_generate_grid_cube(self):
        time_start = time.time()
        pointset = nlkansa.geometry.generate_grid('UnitCube', 5)
        time_duration = time.time() - time_start
        logger.info(f"Test generate_grid (cube): Completed in {time_duration:.6f} seconds.")

        self.assertEqual(pointset.node_count, 125)
        self.assertEqual(pointset.interior_count, 27)
        np.testing.assert_allclose(np.linalg.norm(pointset.normals, axis=1), 1.0)

    def test_generate_disc(self):
        test_config = nlkansa.config.config['tests']

        time_start = time.time()
        pointset = nlkansa.geometry.generate_disc(
            1.2, test_config['disc_interior_points'], test_config['disc_boundary_points'], seed=1
        )
        time_duration = time.time() - time_start
        logger.info(f"Test generate_disc: Completed in {time_duration:.6f} seconds.")

        self.assertEqual(pointset.interior_count, test_config['disc_interior_points'])
        self.assertEqual(pointset.boundary_count, test_config['disc_boundary_points'])
        np.testing.assert_allclose(np.linalg.norm(pointset.nodes[pointset.interior_count:], axis=1), 1.2)
        self.assertTrue(np.all(np.linalg.norm(pointset.nodes[:pointset.interior_count], axis=1) < 1.2))

    def test_generate_disc_deterministic(self):
        time_start = time.time()
        pointset_1 = nlkansa.geometry.generate_disc(1.0, 30, 12, seed=4)
        pointset_2 = nlkansa.geometry.generate_disc(1.0, 30, 12, seed=4)
        time_duration = time.time() - time_start
        logger.info(f"Test generate_disc deterministic: Completed in {time_duration:.6f} seconds.")

        np.testing.assert_array_equal(pointset_1.nodes, pointset_2.nodes)

    def test_generate_mold(self):
        time_start = time.time()
        pointset = nlkansa.geometry.generate_mold()
        time_duration = time.time() - time_start
        logger.info(f"Test generate_mold: Completed in {time_duration:.6f} seconds.")

        # Boundary of 2 x 1 rectangle at spacing 1/16, with inlet ends at 6/16 and 10/16.
        self.assertEqual(pointset.boundary_count, 96)
        self.assertEqual(int(np.sum(pointset.boundary_tags == 'D')), 2)
        self.assertEqual(int(np.sum(pointset.boundary_tags == 'DP')), 17 + 3)
        self.assertEqual(len(pointset.extra_centres), 94)
        singular_nodes = pointset.nodes[pointset.interior_count:][pointset.boundary_tags == 'D']
        np.testing.assert_allclose(singular_nodes[np.argsort(singular_nodes[:, 1])], [[0.0, 0.375], [0.0, 0.625]])
        interior_nodes = pointset.nodes[:pointset.interior_count]
        self.assertTrue(np.all((interior_nodes > 0.0) & (interior_nodes < [2.0, 1.0])))

    @parameterized.expand([
        ('spacing', dict(boundary_spacing=0.3)),
        ('inlet', dict(inlet=(0.6, 0.4)))
    ])
    def test_generate_mold_invalid(self, label, parameters):
        time_start = time.time()
        with self.assertRaises(nlkansa.utils.ConfigurationError):
            nlkansa.geometry.generate_mold(**parameters)
        time_duration = time.time() - time_start
        logger.info(f"Test generate_mold invalid ({label}): Completed in {time_duration:.6f} seconds.")

    def test_pointset_duplicate_nodes(self):
        nodes = np.array([[0.5, 0.5], [0.5, 0.5], [0.0, 0.0]])

        time_start = time.time()
        with self.assertRaises(nlkansa.utils.ValidationError):
            nlkansa.geometry.Pointset(nodes, 2, [[-1.0, 0.0]], ['D'])
        time_duration = time.time() - time_start
        logger.info(f"Test pointset duplicate nodes: Completed in {time_duration:.6f} seconds.")

    def test_pointset_normals(self):
        nodes = np.array([[0.5, 0.5], [0.0, 0.0]])

        time_start = time.time()
        with self.assertRaises(nlkansa.utils.ValidationError):
            nlkansa.geometry.Pointset(nodes, 1, [[-1.0, -1.0]], ['D'])
        with self.assertRaises(nlkansa.utils.ValidationError):
            nlkansa.geometry.Pointset(nodes, 1, [[-1.0, 0.0]], ['NP'])
        time_duration = time.time() - time_start
        logger.info(f"Test pointset normals and extra centres: Completed in {time_duration:.6f} seconds.")

    def test_evaluation_set(self):
        pointset = nlkansa.geometry.generate_grid('UnitSquare', 5)

        time_start = time.time()
        evaluation_set = nlkansa.geometry.generate_evaluation_set(pointset, 200, seed=2)
        fill_distance = nlkansa.geometry.fill_distance(pointset, evaluation_set)
        time_duration = time.time() - time_start
        logger.info(f"Test evaluation set: Completed in {time_duration:.6f} seconds.")

        self.assertEqual(len(evaluation_set.points), 200)
        self.assertTrue(np.all((evaluation_set.points >= 0.0) & (evaluation_set.points <= 1.0)))
        # Maximum nearest-node distance on a grid of spacing 1/4 is half the cell diagonal.
        self.assertGreater(fill_distance, 0.0)
        self.assertLessEqual(fill_distance, 0.125 * np.sqrt(2.0) + 1e-12)

    def test_evaluation_set_disc(self):
        pointset = nlkansa.geometry.generate_disc(0.8, 20, 10)

        time_start = time.time()
        evaluation_set = nlkansa.geometry.generate_evaluation_set(pointset, 100)
        time_duration = time.time() - time_start
        logger.info(f"Test evaluation set (disc): Completed in {time_duration:.6f} seconds.")

        self.assertTrue(np.all(np.linalg.norm(evaluation_set.points, axis=1) <= 0.8))

    def test_save_load_pointset(self):
        pointset = nlkansa.geometry.generate_mold(inlet=(0.25, 0.75), boundary_spacing=0.25, interior_count=30)

        time_start = time.time()
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'mold.txt')
            nlkansa.geometry.save_pointset(pointset, path)
            loaded_pointset = nlkansa.geometry.load_pointset(path)
        time_duration = time.time() - time_start
        logger.info(f"Test save / load pointset: Completed in {time_duration:.6f} seconds.")

        np.testing.assert_array_equal(loaded_pointset.nodes, pointset.nodes)
        np.testing.assert_array_equal(loaded_pointset.normals, pointset.normals)
        np.testing.assert_array_equal(loaded_pointset.extra_centres, pointset.extra_centres)
        self.assertEqual(list(loaded_pointset.boundary_tags), list(pointset.boundary_tags))
        self.assertEqual(loaded_pointset.interior_count, pointset.interior_count)

    def test_generate_evaluation_set_loaded_interval(self):
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'interval.txt')
            with open(path, 'w') as file:
                file.write("1 3 5 0\n0.25 I\n0.5 I\n0.75 I\n0.0 D -1.0\n1.0 D 1.0\n")
            pointset = nlkansa.geometry.load_pointset(path)

        time_start = time.time()
        evaluation_set = nlkansa.geometry.generate_evaluation_set(pointset, 10)
        time_duration = time.time() - time_start
        logger.info(f"Test generate_evaluation_set (loaded interval): Completed in {time_duration:.6f} seconds.")

        self.assertEqual(evaluation_set.points.shape, (10, 1))
        self.assertTrue(np.all((evaluation_set.points >= 0.0) & (evaluation_set.points <= 1.0)))

    def test_generate_evaluation_set_loaded_degenerate(self):
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'segment.txt')
            with open(path, 'w') as file:
                file.write("2 0 3 0\n0.0 0.0 D 0.0 -1.0\n0.5 0.0 D 0.0 -1.0\n1.0 0.0 D 0.0 -1.0\n")
            pointset = nlkansa.geometry.load_pointset(path)

        time_start = time.time()
        with self.assertRaises(nlkansa.utils.DomainError):
            nlkansa.geometry.generate_evaluation_set(pointset, 10)
        time_duration = time.time() - time_start
        logger.info(f"Test generate_evaluation_set (loaded degenerate): Completed in {time_duration:.6f} seconds.")

    @parameterized.expand([
        ('header', "2 1 x 0\n0.5 0.5 I\n", 1),
        ('tag', "2 1 2 0\n0.5 0.5 I\n0.0 0.0 Q -1.0 0.0\n", 3),
        ('count', "# Comment.\n2 1 3 0\n0.5 0.5 I\n0.0 0.0 D -1.0 0.0\n", 4)
    ])
    def test_load_pointset_invalid(self, label, content, line_number):
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'invalid.txt')
            with open(path, 'w') as file:
                file.write(content)

            time_start = time.time()
            with self.assertRaises(nlkansa.utils.ParseError) as context:
                nlkansa.geometry.load_pointset(path)
            time_duration = time.time() - time_start
            logger.info(f"Test load_pointset invalid ({label}): Completed in {time_duration:.6f} seconds.")

        self.assertEqual(context.exception.line_number, line_number)


if __name__ == '__main__':
    unittest.main()
