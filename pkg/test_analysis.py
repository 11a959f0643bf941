import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from pydantic import ValidationError
from scipy.integrate import trapezoid

import analysis.density
from analysis.curves import CurveParams, classical_curve, thresholded_curve
from analysis.dataset import ExperimentalDataset
from analysis.density import PopulationWeights, mixed_density
from analysis.fitting import fit_populations, fit_threshold_curve
from analysis.scan import PopulationModel, cavity_length_sweep, predict_scan
from eigensolver.eigensolver import GridPolicy, solve_spectrum
from potential.potential import GravityFloor
from potential.units import cm, um
from transmission.absorber import AbsorberModel
from transmission.transmission import overlaps
from utils.errors import ArityError, DataError, ScanError, UnfittableDataError


########## Curves ##########
def test_classical_curve_values():
    assert classical_curve(0.0, 3.0) == 0.0
    assert classical_curve(4.0, 1.0) == pytest.approx(8.0)


@given(st.floats(min_value=1e-7, max_value=1e-3), st.floats(min_value=1e-3, max_value=1e9))
def test_classical_curve_scaling(z, scale):
    assert classical_curve(2 * z, scale) / classical_curve(z, scale) == pytest.approx(2**1.5, rel=1e-12)


def test_thresholded_curve_values():
    z = np.array([um(10), um(15), um(20)])
    out = thresholded_curve(z, um(15), 2.0)
    assert out[0] == 0.0 and out[1] == 0.0
    assert out[2] == pytest.approx(2.0 * um(5) ** 1.5)


def test_thresholded_curve_without_threshold_is_classical():
    z = np.linspace(0.0, um(50), 11)
    assert np.allclose(thresholded_curve(z, 0.0, 5.0), classical_curve(z, 5.0))


def test_curve_params_reject_negative_threshold():
    with pytest.raises(ValidationError):
        CurveParams(scale=1.0, z0=-1e-6)


########## Mixed density ##########
def test_weights_must_lie_on_simplex():
    with pytest.raises(ValidationError):
        PopulationWeights(c=(0.5, 0.5, 0.5, -0.5))
    with pytest.raises(ValidationError):
        PopulationWeights(c=(0.5, 0.2, 0.2, 0.2))


def test_ground_state_density(gravity_spectrum):
    density = mixed_density(gravity_spectrum, PopulationWeights.ground_state())
    assert np.array_equal(density, gravity_spectrum[0].psi ** 2)


@pytest.mark.parametrize("seed", range(5))
def test_mixed_density_is_normalised(gravity_spectrum, gravity_grid, seed):
    c = np.random.default_rng(seed).dirichlet(np.ones(4))
    weights = PopulationWeights(c=tuple(c / c.sum()))
    density = mixed_density(gravity_spectrum, weights)
    assert np.all(density >= 0)
    assert trapezoid(density, gravity_grid.points()) == pytest.approx(1.0, abs=1e-8)


def test_fourth_power_breaks_normalisation(gravity_spectrum, gravity_grid, monkeypatch):
    monkeypatch.setattr(analysis.density, "FOURTH_TERM_POWER", 4)
    density = mixed_density(gravity_spectrum, PopulationWeights.uniform())
    assert abs(trapezoid(density, gravity_grid.points()) - 1.0) > 1e-3


def test_mixed_density_needs_four_states(consts, gravity_grid):
    spectrum = solve_spectrum(GravityFloor(), consts, gravity_grid, 3)
    with pytest.raises(ArityError):
        mixed_density(spectrum, PopulationWeights.uniform())


########## Scan ##########
@pytest.fixture(scope="module")
def absorber():
    return AbsorberModel(delta_x=cm(0.0320259), cavity_length=cm(10))


def _scan(consts, family, absorber, slits_um, weights=None, **kwargs):
    weights = weights or PopulationWeights.ground_state()
    return predict_scan(family, consts, GridPolicy(), absorber, weights, [um(s) for s in slits_um], **kwargs)


def test_wide_slit_transmits_everything(consts, family, absorber):
    scan = _scan(consts, family, absorber, [200.0], weights=PopulationWeights.uniform())
    assert scan.n_out[0] == pytest.approx(0.3, rel=1e-9)


def test_count_follows_attenuation(consts, family, absorber):
    row = _scan(consts, family, absorber, [15.0]).rows[0]
    assert 0.0 < row.areas[0] < 1.0
    assert row.n_out == pytest.approx(0.3 * np.exp(-row.ks[0] * cm(10)), rel=1e-12)


def test_scan_areas_come_from_overlaps(consts, family, absorber):
    row = _scan(consts, family, absorber, [15.0]).rows[0]
    spec = family(um(15))
    grid = GridPolicy().grid_for(spec, consts, 4)
    expected = overlaps(solve_spectrum(spec, consts, grid, 4).states, grid, um(15))
    assert row.areas == expected.areas


def test_log_count_is_linear_in_length(consts, family, absorber):
    row = _scan(consts, family, absorber, [16.0]).rows[0]
    n10, n20 = cavity_length_sweep(row, PopulationWeights.ground_state(), [cm(10), cm(20)])
    assert np.log(n20 / 0.3) == pytest.approx(2 * np.log(n10 / 0.3), rel=1e-9)


def test_narrow_slits_transmit_nothing(consts, family, absorber):
    scan = _scan(consts, family, absorber, [5.0, 8.0, 10.0, 12.0, 13.0])
    assert np.all(scan.n_out < 1e-6 * 0.3)


def test_count_grows_with_slit(consts, family, absorber):
    scan = _scan(consts, family, absorber, np.arange(14.0, 32.0, 2.0), weights=PopulationWeights.uniform())
    assert scan.non_monotone == ()
    assert np.all(np.diff(scan.n_out) > 0)


def test_threaded_scan_matches_serial(consts, family, absorber):
    slits = [14.0, 18.0, 22.0, 26.0]
    serial = _scan(consts, family, absorber, slits)
    threaded = _scan(consts, family, absorber, slits, workers=3)
    assert np.array_equal(serial.n_out, threaded.n_out)


def test_scan_rejects_unordered_slits(consts, family, absorber):
    with pytest.raises(ValueError):
        _scan(consts, family, absorber, [20.0, 15.0])


def test_scan_wraps_solver_errors(consts, family, absorber):
    with pytest.raises(ScanError) as info:
        predict_scan(family, consts, GridPolicy(z_max=um(10)), absorber, PopulationWeights.ground_state(), [um(20)])
    assert info.value.context["slit_um"] == pytest.approx(20.0)
    assert info.value.exit_code == 3


def test_population_model_reproduces_scan(consts, family, absorber):
    weights = PopulationWeights(c=(0.4, 0.3, 0.2, 0.1))
    scan = _scan(consts, family, absorber, [14.0, 20.0, 26.0], weights=weights)
    model = PopulationModel.from_scan(scan)
    assert np.allclose(model(weights), scan.n_out, rtol=1e-12, atol=0)
    with pytest.raises(ValueError):
        model.design_at(np.array([um(17)]))


########## Datasets ##########
def test_dataset_from_rows_sorts():
    data = ExperimentalDataset.from_rows([(30, 5.0), (15, 1.0, 0.5), (20, 2.0)])
    assert data.z_um.tolist() == [15.0, 20.0, 30.0]
    assert data.sigma.tolist() == [0.5, 1.0, 1.0]
    assert data.z == pytest.approx([um(15), um(20), um(30)])


def test_dataset_rejects_duplicate_slits():
    with pytest.raises(DataError, match="20"):
        ExperimentalDataset.from_rows([(20, 1.0), (15, 1.0), (20, 2.0)])


########## Population fit ##########
def _synthetic_model(z_um):
    # One bump per level, so the populations are well separated
    z_um = np.asarray(z_um, dtype=float)
    centres = np.array([12.0, 20.0, 28.0, 36.0])
    design = 0.3 * np.exp(-(((z_um[:, None] - centres[None, :]) / 5.0) ** 2))
    return PopulationModel(um(z_um), design)


def _fit_synthetic(c_true, order=None):
    z_um = np.arange(10.0, 42.0, 2.0)
    model = _synthetic_model(z_um)
    y = model(PopulationWeights(c=c_true))
    rows = list(zip(z_um, y))
    if order is not None:
        rows = [rows[i] for i in order]
    return fit_populations(ExperimentalDataset.from_rows(rows), model)


def test_fit_recovers_interior_populations():
    fit = _fit_synthetic((0.5, 0.2, 0.2, 0.1))
    assert np.allclose(fit.weights.c, (0.5, 0.2, 0.2, 0.1), atol=1e-3)
    assert fit.residual == pytest.approx(0.0, abs=1e-12)


def test_fit_recovers_corner():
    fit = _fit_synthetic((1.0, 0.0, 0.0, 0.0))
    assert fit.weights.c[0] >= 0.99


def test_fit_ignores_row_order():
    forward = _fit_synthetic((0.5, 0.2, 0.2, 0.1))
    shuffled = _fit_synthetic((0.5, 0.2, 0.2, 0.1), order=np.random.default_rng(3).permutation(16))
    assert forward.weights.c == shuffled.weights.c


def test_fit_recovers_ground_state_from_physics(consts, family, absorber):
    slits = np.arange(14.0, 32.0, 2.0)
    scan = _scan(consts, family, absorber, slits, weights=PopulationWeights.uniform())
    model = PopulationModel.from_scan(scan)
    y = model(PopulationWeights.ground_state())
    fit = fit_populations(ExperimentalDataset.from_rows(zip(slits, y)), model)
    assert fit.weights.c[0] >= 0.99


def test_fit_recovers_mixed_populations_from_physics(consts, family, absorber):
    slits = np.arange(14.0, 60.0, 4.0)
    c_true = (0.4, 0.3, 0.2, 0.1)
    scan = _scan(consts, family, absorber, slits, weights=PopulationWeights.uniform())
    model = PopulationModel.from_scan(scan)
    y = model(PopulationWeights(c=c_true))
    fit = fit_populations(ExperimentalDataset.from_rows(zip(slits, y)), model)
    assert np.allclose(fit.weights.c, c_true, atol=1e-3)


def test_fit_result_is_on_simplex():
    z_um = np.arange(10.0, 42.0, 2.0)
    noisy = ExperimentalDataset.from_rows(zip(z_um, np.random.default_rng(0).uniform(0, 0.3, z_um.size)))
    fit = fit_populations(noisy, _synthetic_model(z_um))
    assert min(fit.weights.c) >= 0.0
    assert sum(fit.weights.c) == pytest.approx(1.0, abs=1e-12)


def test_population_fit_needs_data():
    z_um = [10.0, 20.0, 30.0]
    with pytest.raises(UnfittableDataError):
        fit_populations(ExperimentalDataset.from_rows(zip(z_um, [1.0, 2.0, 3.0])), _synthetic_model(z_um))
    z_um = [10.0, 20.0, 30.0, 40.0]
    with pytest.raises(UnfittableDataError):
        fit_populations(ExperimentalDataset.from_rows(zip(z_um, [0.0] * 4)), _synthetic_model(z_um))


########## Threshold fit ##########
def _threshold_data(z0_um, scale=1e7):
    z_um = np.arange(10.0, 41.0, 1.0)
    return ExperimentalDataset.from_rows(zip(z_um, thresholded_curve(um(z_um), um(z0_um), scale)))


def test_threshold_fit_recovers_z0():
    fit = fit_threshold_curve(_threshold_data(15.0))
    assert fit.params.z0 == pytest.approx(um(15), abs=um(0.1))
    assert fit.params.scale == pytest.approx(1e7, rel=1e-2)


def test_threshold_fit_classical_data():
    z_um = np.arange(10.0, 41.0, 1.0)
    data = ExperimentalDataset.from_rows(zip(z_um, classical_curve(um(z_um), 1e7)))
    fit = fit_threshold_curve(data)
    assert fit.params.z0 == 0.0
    assert fit.params.scale == pytest.approx(1e7, rel=1e-9)


def test_threshold_never_below_leading_zeros():
    data = ExperimentalDataset.from_rows([(10, 0.0), (12, 0.0), (14, 0.2), (16, 1.0), (18, 2.0)])
    fit = fit_threshold_curve(data)
    assert fit.params.z0 >= um(12)


def test_threshold_fit_needs_three_rows():
    with pytest.raises(UnfittableDataError):
        fit_threshold_curve(ExperimentalDataset.from_rows([(10, 1.0), (20, 2.0)]))
