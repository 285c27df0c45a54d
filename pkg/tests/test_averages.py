import math

import numpy as np
import pytest

from horolab.defaults import (
    BUMP_WIDTHS,
    DEFAULT_BUMPS,
    EQUIDIST_RADII,
    EXPERIMENT_PERIODS,
    MIXING_LEAF_COORDINATE,
    MIXING_TIMES,
    NONDIV_HEIGHT,
    PATTERSON_RADIUS,
    RATIO_BUMPS,
    cusped_group,
    schottky_group,
)
from horolab.groups import WordSpec, sample_limit_point
from horolab.geometry import (
    INFINITY,
    BoundaryPoint,
    from_coordinates,
    geodesic_flow,
    horocycle_flow,
)
from horolab.measures import PattersonConfig, build_patterson, ps_integral
from horolab.averages import (
    AverageSeries,
    AveragesError,
    ConstantFunction,
    CuspHeightCap,
    HaarDensity,
    HoroBall,
    ShiftedFunction,
    TestFunction,
    VectorClass,
    WeightedFunction,
    average_haar,
    average_lebesgue,
    average_ps,
    build_vector,
    flow_commutation_residual,
    mass_in_compact,
    mixing_series,
    periodic_closure,
    pointed_frame,
    ratio_series,
)

DELTA_SCH = 0.4322791205538202
DELTA_CUS = 0.646822563859683
WB, WA = BUMP_WIDTHS


@pytest.fixture(scope="module")
def sch():
    return schottky_group()


@pytest.fixture(scope="module")
def cus():
    return cusped_group()


@pytest.fixture(scope="module")
def m_sch(sch):
    return build_patterson(sch, PattersonConfig(DELTA_SCH, 14, PATTERSON_RADIUS["schottky"]))


@pytest.fixture(scope="module")
def m_cus(cus):
    return build_patterson(cus, PattersonConfig(DELTA_CUS, 14, PATTERSON_RADIUS["cusped"]))


def _vector(group, name, s=0.0):
    pm, pp = EXPERIMENT_PERIODS[name]
    u, cls = build_vector(
        group,
        sample_limit_point(group, WordSpec(period=pm)),
        sample_limit_point(group, WordSpec(period=pp)),
        s=s,
    )
    assert cls is VectorClass.RADIAL
    return u


@pytest.fixture(scope="module")
def u8(sch):
    return _vector(sch, "schottky")


@pytest.fixture(scope="module")
def u9(cus):
    return _vector(cus, "cusped")


def _bumps(group, name):
    return [
        TestFunction(group, pointed_frame(*cd), base_width=WB, angle_width=WA)
        for cd in DEFAULT_BUMPS[name]
    ]


def test_pointed_frame_round_trip():
    rng = np.random.default_rng(7)
    for _ in range(20):
        x = float(rng.uniform(-4, 4))
        y = float(rng.uniform(0.2, 5.0))
        th = float(rng.uniform(-3.0, 3.0))
        u = pointed_frame(x, y, th)
        bp = u.base_point
        assert bp.x == pytest.approx(x, abs=1e-12)
        assert bp.y == pytest.approx(y, abs=1e-12)
        assert math.sin(u.direction_angle - th) == pytest.approx(0.0, abs=1e-12)
        assert math.cos(u.direction_angle - th) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(AveragesError):
        pointed_frame(0.0, 0.0, 0.0)


def test_bump_peaks_at_center(sch):
    c = pointed_frame(0.0, 1.4, 0.3)
    psi = TestFunction(sch, c)
    assert psi(c) == pytest.approx(1.0, abs=1e-12)
    assert psi(pointed_frame(0.0, 1.4, 0.3 + 2.0)) < 1.0


def test_bump_group_invariance(sch, cus):
    rng = np.random.default_rng(11)
    for group, name in ((sch, "schottky"), (cus, "cusped")):
        psi = _bumps(group, name)[0]
        for _ in range(10):
            word = tuple(group._random_reduced_letters(rng, 5))
            g = group.word_matrix(word)
            x = float(rng.uniform(-1.5, 1.5))
            y = float(rng.uniform(0.5, 3.0))
            th = float(rng.uniform(-3, 3))
            u = pointed_frame(x, y, th)
            from horolab.geometry import mobius_apply

            assert psi(mobius_apply(g, u)) == pytest.approx(psi(u), abs=1e-9)


def test_bump_validation(sch):
    with pytest.raises(AveragesError):
        TestFunction(sch, pointed_frame(2.0, 0.3, 0.0))  # inside a generator disk
    with pytest.raises(AveragesError):
        TestFunction(sch, pointed_frame(0.0, 1.0, 0.0), base_width=0.0)


def test_build_vector_classes(sch, cus):
    u, cls = build_vector(sch, BoundaryPoint(30.0), BoundaryPoint(0.5))
    assert cls is VectorClass.WANDERING
    pm, _ = EXPERIMENT_PERIODS["schottky"]
    rad = sample_limit_point(sch, WordSpec(period=pm))
    u, cls = build_vector(sch, rad, BoundaryPoint(0.5))
    assert cls is VectorClass.RADIAL
    par = sample_limit_point(cus, WordSpec(period=("p",)))
    u, cls = build_vector(cus, par, BoundaryPoint(5.0))
    assert cls is VectorClass.PARABOLIC
    assert u.minus.value == pytest.approx(0.0, abs=1e-14)


def test_average_ps_of_constant_is_one(u8, m_sch):
    assert average_ps(u8, math.e ** 2, ConstantFunction(), m_sch, DELTA_SCH) == pytest.approx(1.0, abs=1e-13)


def test_average_ps_frozen_series(sch, u8, m_sch):
    psi0, psi1, psi2 = _bumps(sch, "schottky")
    vals0 = [average_ps(u8, r, psi0, m_sch, DELTA_SCH) for r in EQUIDIST_RADII]
    assert vals0[0] == pytest.approx(0.0, abs=1e-15)
    assert vals0[1] == pytest.approx(0.031596213665290605, rel=1e-9)
    assert vals0[2] == pytest.approx(0.06028288509173061, rel=1e-9)
    assert average_ps(u8, EQUIDIST_RADII[2], psi1, m_sch, DELTA_SCH) == pytest.approx(
        0.028492533504734536, rel=1e-9
    )
    assert average_ps(u8, EQUIDIST_RADII[2], psi2, m_sch, DELTA_SCH) == pytest.approx(
        0.029125745180586072, rel=1e-9
    )


def test_average_ps_empty_ball_raises(u8, m_sch):
    with pytest.raises(AveragesError):
        average_ps(u8, 1e-15, ConstantFunction(), m_sch, DELTA_SCH)


def test_flow_commutation_residual(sch, u8, m_sch):
    psi = _bumps(sch, "schottky")[0]
    for r, t in ((math.e ** 2, 1.0), (math.e ** 3, 2.5)):
        assert flow_commutation_residual(u8, r, t, psi, m_sch, DELTA_SCH) < 1e-9


def test_average_lebesgue_basics(sch, u8):
    assert average_lebesgue(u8, 3.0, ConstantFunction(2.5)) == pytest.approx(2.5, abs=1e-12)
    far = TestFunction(sch, pointed_frame(0.0, 60.0, 0.0), base_width=0.4, angle_width=0.8)
    assert average_lebesgue(u8, 3.0, far) == 0.0
    with pytest.raises(AveragesError):
        average_lebesgue(u8, 0.0, ConstantFunction())


def test_average_lebesgue_frozen(cus, u9):
    psi = _bumps(cus, "cusped")[0]
    assert average_lebesgue(u9, math.e ** 4, psi) == pytest.approx(0.007482198194821519, rel=1e-8)


def test_average_haar_choices(sch, u8, m_sch):
    psi = _bumps(sch, "schottky")[0]
    r = math.e ** 2
    assert average_haar(u8, r, psi, HaarDensity("constant")) == average_lebesgue(u8, r, psi)
    assert average_haar(u8, r, psi, HaarDensity("ps", measure=m_sch, exponent=DELTA_SCH)) == average_ps(
        u8, r, psi, m_sch, DELTA_SCH
    )
    dens = lambda x, y: 1.0 / y
    w = average_haar(u8, r, psi, HaarDensity("weighted", density=dens))
    assert math.isfinite(w) and w >= 0.0
    flat = average_haar(u8, r, psi, HaarDensity("weighted", density=lambda x, y: np.ones_like(x)))
    assert flat == pytest.approx(average_lebesgue(u8, r, psi), rel=1e-12)


def test_haar_density_validation(m_sch):
    with pytest.raises(AveragesError):
        HaarDensity("bogus")
    with pytest.raises(AveragesError):
        HaarDensity("ps", measure=m_sch)
    with pytest.raises(AveragesError):
        HaarDensity("weighted")


def test_ratio_series_self_is_one(cus, u9, m_cus):
    psi = _bumps(cus, "cusped")[0]
    alpha = HaarDensity("constant", measure=m_cus, exponent=DELTA_CUS)
    ser = ratio_series(u9, psi, psi, (math.e ** 2, math.e ** 3), alpha)
    assert np.allclose(ser.values, 1.0, atol=1e-12)
    assert ser.reference == pytest.approx(1.0, abs=1e-12)


def test_ratio_series_frozen(cus, u9, m_cus):
    psi, phi = [
        TestFunction(cus, pointed_frame(*cd), base_width=WB, angle_width=WA)
        for cd in RATIO_BUMPS
    ]
    alpha = HaarDensity("constant", measure=m_cus, exponent=DELTA_CUS)
    ser = ratio_series(u9, psi, phi, EQUIDIST_RADII, alpha)
    assert ser.reference == pytest.approx(1.0580421745799589, rel=1e-9)
    assert ser.values[0] == pytest.approx(1.092454880785772, rel=1e-8)
    assert ser.values[1] == pytest.approx(1.0925087918535341, rel=1e-8)
    assert ser.values[2] == pytest.approx(1.0174496187650133, rel=1e-8)
    flipped = ratio_series(u9, phi, psi, EQUIDIST_RADII, alpha)
    assert np.allclose(np.asarray(flipped.values) * np.asarray(ser.values), 1.0, atol=1e-10)
    assert flipped.reference * ser.reference == pytest.approx(1.0, abs=1e-12)


def test_ratio_series_zero_denominator(cus, u9, m_cus):
    psi = _bumps(cus, "cusped")[0]
    far = TestFunction(cus, pointed_frame(0.0, 50.0, 0.0), base_width=0.4, angle_width=0.8)
    alpha = HaarDensity("constant", measure=m_cus, exponent=DELTA_CUS)
    with pytest.raises(AveragesError):
        ratio_series(u9, psi, far, (math.e ** 2, math.e ** 4), alpha)


def test_mixing_series_frozen(sch, m_sch):
    pm, pp = EXPERIMENT_PERIODS["schottky"]
    u10, _ = build_vector(
        sch,
        sample_limit_point(sch, WordSpec(period=pm)),
        sample_limit_point(sch, WordSpec(period=pp)),
        s=MIXING_LEAF_COORDINATE,
    )
    psi = _bumps(sch, "schottky")[0]
    ser = mixing_series(u10, 1.0, psi, MIXING_TIMES, m_sch, DELTA_SCH)
    assert ser.reference == pytest.approx(0.060547058378818276, rel=1e-9)
    assert ser.values[0] == average_ps(u10, 1.0, psi, m_sch, DELTA_SCH)
    assert abs(ser.values[-1] / ser.reference - 1.0) == pytest.approx(0.004363106882944895, abs=1e-6)


def test_mass_in_compact(sch, cus, u8, u9, m_sch, m_cus):
    radii = (math.e ** 2, math.e ** 4, math.e ** 6)
    flat = mass_in_compact(u8, radii, 6.0, m_sch, DELTA_SCH)
    assert np.allclose(flat.values, 1.0, atol=1e-15)  # no cusps, cap is identically one
    huge = mass_in_compact(u9, radii, 1e9, m_cus, DELTA_CUS)
    assert np.allclose(huge.values, 1.0, atol=1e-15)
    ser = mass_in_compact(u9, radii, NONDIV_HEIGHT, m_cus, DELTA_CUS)
    assert ser.values[0] == pytest.approx(1.0, abs=1e-12)
    assert ser.values[1] == pytest.approx(0.8822752368771217, rel=1e-8)
    assert ser.values[2] == pytest.approx(0.9660028006131066, rel=1e-8)
    assert min(ser.values) >= 0.8


def test_cusp_height_cap_values(cus):
    cap = CuspHeightCap(cus, 6.0, 0.1)
    assert cap(pointed_frame(0.0, 1.0, 0.0)) == pytest.approx(1.0, abs=1e-12)
    assert cap(pointed_frame(0.0, 1e-4, 0.0)) == 0.0


def test_periodic_closure_frozen(cus):
    t0, res = periodic_closure(cus, "p")
    assert t0 == pytest.approx(-4.0, abs=1e-7)
    assert res < 1e-8


def test_periodic_closure_dilation(cus):
    fp = BoundaryPoint(0.0)
    u0 = from_coordinates(fp, INFINITY, 0.0)
    t_base, _ = periodic_closure(cus, "p", u=u0)
    for s in (0.5, 1.0, 2.0):
        t_s, res = periodic_closure(cus, "p", u=geodesic_flow(u0, -s))
        assert res < 1e-8
        assert t_s == pytest.approx(math.exp(-s) * t_base, rel=1e-8)


def test_periodic_closure_rejects_hyperbolic(sch, cus):
    with pytest.raises(AveragesError):
        periodic_closure(sch, "a")
    with pytest.raises(AveragesError):
        periodic_closure(cus, "b")


def test_series_validation():
    with pytest.raises(AveragesError):
        AverageSeries(np.array([1.0, 2.0]), np.array([0.5]), 1.0)
    with pytest.raises(AveragesError):
        AverageSeries(np.array([2.0, 1.0]), np.array([0.5, 0.6]), 1.0)
    with pytest.raises(AveragesError):
        AverageSeries(np.array([1.0, 2.0]), np.array([0.5, math.nan]), 1.0)
    with pytest.raises(AveragesError):
        HoroBall(pointed_frame(0.0, 1.0, 0.0), 0.0)


def test_shifted_and_weighted_functions(sch, u8):
    psi = _bumps(sch, "schottky")[0]
    sh = ShiftedFunction(psi, 1.7)
    assert sh(u8) == pytest.approx(psi(geodesic_flow(u8, 1.7)), abs=1e-12)
    wf = WeightedFunction(psi, lambda x, y: 2.0 * np.ones_like(x))
    v = pointed_frame(0.0, 1.4, 0.0)
    frames = np.array([np.array(v.frame.entries()).reshape(2, 2)])
    assert wf.evaluate_frames(frames)[0] == pytest.approx(2.0 * psi.evaluate_frames(frames)[0], rel=1e-12)