# Copyright Contributors to the gaussdyn project.
# SPDX-License-Identifier: Apache-2.0

import math
import unittest

import numpy as np

from gaussdyn.config import TestGaussdynConfig, load_config
from gaussdyn.dynamics_engine import propagate_closed_form
from gaussdyn.fock_oracle.lindblad import (
    FockConfig, TruncationLeakError, evolve, evolve_and_extract, fock_state,
    lindblad_rhs, moments, pure_state, thermal_state, top_level_population,
    vacuum_state
)
from gaussdyn.fock_oracle.suites import params_for
from gaussdyn.gaussian_core import TwoModeCovariance
from gaussdyn.reservoir_models import EngineeredParams, Variant, build_drift

PROBE = {(0, 0): 1.0, (1, 0): 0.3, (0, 1): 0.3j, (2, 0): 0.25, (0, 2): -0.2j, (1, 1): 0.35}


class TestFockConfig(unittest.TestCase):
    def test_create(self) -> None:
        self.assertEqual(FockConfig(cutoff=12, dt=None, leak_tol=1e-4), FockConfig.create())
        with self.assertRaisesRegex(AssertionError, r'expected a cutoff in \[4, 24\]'):
            FockConfig.create(cutoff=3)
        with self.assertRaisesRegex(AssertionError, r'expected a cutoff in \[4, 24\]'):
            FockConfig.create(cutoff=25)
        with self.assertRaisesRegex(AssertionError, 'expected a positive step'):
            FockConfig.create(dt=0.0)
        with self.assertRaisesRegex(AssertionError, 'expected a leak tolerance'):
            FockConfig.create(leak_tol=1e-2)

    def test_create_from_config(self) -> None:
        cfg = FockConfig.create_from_config(load_config(config_object=TestGaussdynConfig))
        self.assertEqual(FockConfig(cutoff=12, dt=1e-2, leak_tol=1e-4), cfg)
        cfg = FockConfig.create_from_config({'FOCK_CUTOFF': 8})
        self.assertEqual(8, cfg.cutoff)
        self.assertIsNone(cfg.dt)

    def test_step(self) -> None:
        params = EngineeredParams.asymmetric(r=0.3, kappa=1.0, lam=2.0)
        self.assertAlmostEqual(2.5e-4, FockConfig.create().step_for(params), places=15)
        self.assertEqual(0.01, FockConfig.create(dt=0.01).step_for(params))


class TestStates(unittest.TestCase):
    def test_vacuum_moments(self) -> None:
        np.testing.assert_allclose(np.zeros(10), moments(vacuum_state(5)).to_vector(), atol=1e-15)

    def test_fock_state(self) -> None:
        V = moments(fock_state(5, 1, 2))
        self.assertAlmostEqual(1.0, V.n1, places=12)
        self.assertAlmostEqual(2.0, V.n2, places=12)
        with self.assertRaisesRegex(AssertionError, 'expected levels below the cutoff'):
            fock_state(5, 5, 0)

    def test_thermal_state(self) -> None:
        rho = thermal_state(12, 0.2, 0.0)
        self.assertAlmostEqual(1.0, np.trace(rho).real, places=12)
        V = moments(rho)
        self.assertAlmostEqual(0.2, V.n1, places=7)
        self.assertAlmostEqual(0.0, V.n2, places=15)

    def test_pure_state(self) -> None:
        rho = pure_state(6, PROBE)
        self.assertAlmostEqual(1.0, np.trace(rho).real, places=12)
        np.testing.assert_allclose(rho, rho @ rho, atol=1e-12)
        V = moments(rho)
        self.assertNotEqual(0, V.mc)
        self.assertNotEqual(0, V.ms)
        self.assertNotEqual(0, V.m1)

    def test_top_level_population(self) -> None:
        self.assertEqual(1.0, top_level_population(fock_state(4, 3, 0)))
        self.assertEqual(1.0, top_level_population(fock_state(4, 0, 3)))
        self.assertEqual(0.0, top_level_population(fock_state(4, 2, 2)))


class TestLindbladRhs(unittest.TestCase):
    def test_no_dissipation(self) -> None:
        params = EngineeredParams.symmetric(r=0.5, kappa=0.0, lam=0.0)
        np.testing.assert_array_equal(np.zeros((36, 36)), lindblad_rhs(pure_state(6, PROBE), params))

    def test_population_growth_from_vacuum(self) -> None:
        params = EngineeredParams.symmetric(r=0.3, kappa=1.0, lam=0.0)
        derivative = moments(lindblad_rhs(vacuum_state(6), params))
        self.assertAlmostEqual(0.1860930, derivative.n1, places=7)
        self.assertAlmostEqual(0.1860930, derivative.n2, places=7)
        self.assertAlmostEqual(math.sinh(0.6), derivative.mc.real, places=12)

    def test_moment_equations(self) -> None:
        # d<O>/dt from the master equation is exactly the drift applied to the moments, away from the cutoff
        rho = pure_state(8, PROBE)
        cases = ((Variant.symmetric, EngineeredParams.symmetric(r=0.4, kappa=1.0, lam=0.7, n_thermal=0.3, phi=0.2)),
                 (Variant.asymmetric, EngineeredParams.asymmetric(r=0.4, kappa=1.0, lam=0.7, n_thermal=0.3,
                                                                  phi=0.2)),
                 (Variant.laser_frame, EngineeredParams.symmetric(r=0.4, kappa=1.0, lam=0.7, n_thermal=0.3, phi=0.2,
                                                                  d=0.9)))
        for variant, params in cases:
            expected = build_drift(params, variant=variant).rhs(moments(rho).to_vector())
            actual = moments(lindblad_rhs(rho, params, variant=variant)).to_vector()
            np.testing.assert_allclose(expected, actual, atol=1e-12, err_msg=f'{variant}')

    def test_moment_equations_as_printed_disagree(self) -> None:
        rho = pure_state(8, PROBE)
        params = EngineeredParams.asymmetric(r=0.4, kappa=1.0, lam=0.7, n_thermal=0.3)
        printed = build_drift(params, variant=Variant.asymmetric, paper_verbatim=True).rhs(moments(rho).to_vector())
        actual = moments(lindblad_rhs(rho, params, variant=Variant.asymmetric)).to_vector()
        self.assertFalse(np.allclose(printed, actual, atol=1e-6))

    def test_thermal_state_is_stationary(self) -> None:
        params = EngineeredParams.symmetric(r=0.0, kappa=0.0, lam=1.0, n_thermal=0.2)
        self.assertLess(np.max(np.abs(lindblad_rhs(thermal_state(12, 0.2, 0.2), params))), 1e-6)

    def test_wrong_shape(self) -> None:
        with self.assertRaisesRegex(AssertionError, 'expected a two-mode density matrix'):
            lindblad_rhs(np.zeros((5, 5), dtype=complex), EngineeredParams.symmetric(r=0.5, kappa=1.0, lam=1.0))


class TestEvolve(unittest.TestCase):
    def test_photon_loss(self) -> None:
        params = EngineeredParams.symmetric(r=0.0, kappa=0.0, lam=1.0)
        times = (0.25, 0.5, 1.0)
        extracted = evolve_and_extract(fock_state(4, 1, 0), params, times, FockConfig.create(cutoff=4, dt=1e-3))
        for t, V in zip(times, extracted):
            self.assertAlmostEqual(math.exp(-2 * t), V.n1, delta=1e-9, msg=f't={t}')
            self.assertAlmostEqual(0.0, V.n2, places=15)

    def test_matches_closed_form(self) -> None:
        params = EngineeredParams.symmetric(r=0.3, kappa=1.0, lam=1.0, n_thermal=0.2)
        times = (0.25, 0.5, 1.0)
        extracted = evolve_and_extract(vacuum_state(10), params, times, FockConfig.create(cutoff=10, dt=5e-3))
        for t, V in zip(times, extracted):
            expected = propagate_closed_form(TwoModeCovariance.vacuum(), params, t)
            np.testing.assert_allclose(expected.to_vector(), V.to_vector(), atol=1e-6, err_msg=f't={t}')

    def test_density_matrix_stays_physical(self) -> None:
        cfg = FockConfig.create(cutoff=10, dt=5e-3)
        for variant in (Variant.symmetric, Variant.asymmetric, Variant.laser_frame):
            for rho in evolve(pure_state(10, PROBE), params_for(variant), (0.1, 0.5), cfg, variant=variant):
                np.testing.assert_allclose(rho, rho.conj().T, rtol=0, atol=1e-12, err_msg=f'{variant}')
                self.assertAlmostEqual(1.0, np.trace(rho).real, delta=1e-9, msg=f'{variant}')
                self.assertGreaterEqual(np.linalg.eigvalsh(rho).min(), -1e-9, msg=f'{variant}')

    def test_extracts_the_moments_of_the_states(self) -> None:
        params = params_for(Variant.symmetric)
        cfg = FockConfig.create(cutoff=8, dt=1e-2)
        (rho,) = evolve(vacuum_state(8), params, (0.3,), cfg)
        (V,) = evolve_and_extract(vacuum_state(8), params, (0.3,), cfg)
        self.assertEqual(moments(rho), V)

    def test_time_zero(self) -> None:
        params = EngineeredParams.symmetric(r=0.3, kappa=1.0, lam=1.0)
        (V,) = evolve_and_extract(fock_state(5, 1, 1), params, (0.0,), FockConfig.create(cutoff=5, dt=1e-2))
        self.assertAlmostEqual(1.0, V.n1, places=15)

    def test_leak(self) -> None:
        params = EngineeredParams.symmetric(r=0.5, kappa=1.0, lam=1.0, n_thermal=0.5)
        with self.assertRaisesRegex(TruncationLeakError, 'truncation no longer trustworthy') as raised:
            evolve_and_extract(vacuum_state(6), params, (1.0,), FockConfig.create(cutoff=6, dt=1e-2))
        self.assertGreater(raised.exception.t, 0.0)
        self.assertLessEqual(raised.exception.t, 1.0 + 1e-9)
        self.assertGreater(raised.exception.population, 1e-4)

    def test_initial_leak(self) -> None:
        params = EngineeredParams.symmetric(r=0.5, kappa=1.0, lam=1.0)
        with self.assertRaisesRegex(TruncationLeakError, 'initial state already populates the top level') as raised:
            evolve_and_extract(fock_state(4, 3, 0), params, (1.0,), FockConfig.create(cutoff=4))
        self.assertEqual(0.0, raised.exception.t)

    def test_bad_arguments(self) -> None:
        params = EngineeredParams.symmetric(r=0.5, kappa=1.0, lam=1.0)
        with self.assertRaisesRegex(AssertionError, 'expected a density matrix for cutoff 6'):
            evolve_and_extract(vacuum_state(5), params, (1.0,), FockConfig.create(cutoff=6))
        with self.assertRaisesRegex(AssertionError, 'expected ascending non-negative times'):
            evolve_and_extract(vacuum_state(5), params, (1.0, 0.5), FockConfig.create(cutoff=5))


