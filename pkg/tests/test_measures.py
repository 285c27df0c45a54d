import math

import numpy as np
import pytest

from horolab.defaults import (
    DEFECT_LADDER,
    EXPERIMENT_PERIODS,
    EXPONENT_RADIUS,
    PATTERSON_RADIUS,
    cusped_group,
    schottky_group,
)
from horolab.groups import WordSpec, critical_exponent, sample_limit_point
from horolab.measures import (
    AtomicBoundaryMeasure,
    MeasureError,
    PattersonConfig,
    br_integral,
    build_patterson,
    conditional_on_horocycle,
    conformality_defect,
    horoball_mass,
    ps_integral,
)
from horolab.averages import TestFunction, build_vector, pointed_frame
from horolab.geometry import geodesic_flow, horocycle_flow

DELTA_SCH = 0.4322791205538202
DELTA_CUS = 0.646822563859683


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


def test_deltas_still_match_frozen(sch, cus):
    assert critical_exponent(sch, t_max=EXPONENT_RADIUS["schottky"]).delta == pytest.approx(DELTA_SCH, rel=1e-12)
    assert critical_exponent(cus, t_max=EXPONENT_RADIUS["cusped"]).delta == pytest.approx(DELTA_CUS, rel=1e-12)


def test_build_basic(m_sch, m_cus):
    assert isinstance(m_sch, AtomicBoundaryMeasure)
    assert len(m_sch) == 8298
    assert len(m_cus) == 2248
    assert m_sch.total_mass() == pytest.approx(1.0, abs=1e-12)
    assert m_cus.total_mass() == pytest.approx(1.0, abs=1e-12)
    assert np.all(np.diff(m_sch.points) > 0)


def test_atoms_inside_hull(sch, m_sch):
    ivs = sch.hull_intervals()
    lo = min(a for a, _ in ivs) - 1e-9
    hi = max(b for _, b in ivs) + 1e-9
    assert m_sch.points.min() >= lo and m_sch.points.max() <= hi
    # and inside some component interval, not just the hull's span
    inside = np.zeros(len(m_sch), dtype=bool)
    for a, b in ivs:
        inside |= (m_sch.points >= a - 1e-9) & (m_sch.points <= b + 1e-9)
    assert inside.all()


def test_too_shallow_rejected(sch):
    with pytest.raises(MeasureError):
        build_patterson(sch, PattersonConfig(DELTA_SCH, 4, 5.0))


def test_config_validation():
    with pytest.raises(MeasureError):
        PattersonConfig(0.0, 14)
    with pytest.raises(MeasureError):
        PattersonConfig(float("nan"), 14)
    with pytest.raises(MeasureError):
        PattersonConfig(0.5, 3)


def test_mirror_symmetry(m_sch):
    # x -> -x conjugates the interval pairings to themselves
    pts = m_sch.points
    wts = m_sch.log_weights
    order = np.argsort(-pts)
    assert np.allclose(pts, -pts[order], atol=1e-9)
    assert np.allclose(wts, wts[order], atol=1e-8)


def test_ray_projection_collinear(m_sch, sch):
    # the atom of a one-letter word must lie past the orbit point on the
    # geodesic ray from i: distances along the circle through i and g(i)
    # should be additive
    from horolab.geometry import PlanePoint, hyperbolic_distance

    for lab in ("a", "b"):
        g = sch.generator(lab).matrix
        z = g.apply_complex(1j)
        x, y = z.real, z.imag
        c = (x * x + y * y - 1.0) / (2.0 * x)
        r = math.hypot(c, 1.0)
        xi = c + math.copysign(r, x)
        # walk toward the boundary along the circle
        phi_z = math.atan2(y, x - c)
        phi_b = 0.0 if xi > c else math.pi
        phi_w = phi_b + 0.12 * (phi_z - phi_b)
        w = PlanePoint(c + r * math.cos(phi_w), r * math.sin(phi_w))
        o = PlanePoint(0.0, 1.0)
        zz = PlanePoint(x, y)
        gap = hyperbolic_distance(o, w) - (hyperbolic_distance(o, zz) + hyperbolic_distance(zz, w))
        assert abs(gap) < 1e-9
        assert np.min(np.abs(m_sch.points - xi)) < 1e-12


def test_heaviest_is_stable_and_heavy(m_sch):
    idx = m_sch.heaviest(50)
    assert len(idx) == 50
    cut = np.sort(m_sch.log_weights)[::-1][49]
    assert m_sch.log_weights[idx].min() >= cut - 1e-12


def test_defect_identity_and_word(m_sch, sch):
    assert conformality_defect(m_sch, (), DELTA_SCH) == 0.0
    d1 = conformality_defect(m_sch, "a", DELTA_SCH)
    d2 = conformality_defect(m_sch, ("a", "b"), DELTA_SCH)
    assert d1 < 1e-8 and d2 < 1e-6


def test_defect_ladder_trends():
    for name, group, delta in (
        ("schottky", schottky_group(), DELTA_SCH),
        ("cusped", cusped_group(), DELTA_CUS),
    ):
        meds = []
        for cutoff, radius in DEFECT_LADDER[name]:
            m = build_patterson(group, PattersonConfig(delta, cutoff, radius))
            meds.append({g: conformality_defect(m, g, delta) for g in group.order})
        for g in group.order:
            seq = [m[g] for m in meds]
            assert seq[0] > seq[1] > seq[2], (name, g, seq)


def test_defect_inverse_pair_symmetry(m_cus):
    a = conformality_defect(m_cus, "p", DELTA_CUS)
    b = conformality_defect(m_cus, "P", DELTA_CUS)
    assert max(a, b) <= 2.5 * min(a, b) + 1e-12


@pytest.fixture(scope="module")
def u8(sch):
    pm, pp = EXPERIMENT_PERIODS["schottky"]
    u, _ = build_vector(
        sch,
        sample_limit_point(sch, WordSpec(period=pm)),
        sample_limit_point(sch, WordSpec(period=pp)),
    )
    return u


@pytest.fixture(scope="module")
def cond8(u8, m_sch):
    return conditional_on_horocycle(u8, m_sch, DELTA_SCH)


def test_conditional_parameter_map(u8, cond8, m_sch):
    # h^{s_j} u must point forward at the atom that generated s_j
    for k in np.linspace(0, len(cond8.params) - 1, 25).astype(int):
        v = horocycle_flow(u8, float(cond8.params[k]))
        a, _, c, _ = v.frame.entries()
        assert abs(c) > 0
        assert np.min(np.abs(m_sch.points - a / c)) < 1e-9


def test_conditional_reweighting_exact(sch, m_sch):
    # a wandering leaf keeps every atom away from the parameter pole, so the
    # pullback law (s, lam) -> (s e^-t, lam - s t) holds to float noise
    from horolab.geometry import BoundaryPoint
    from horolab.averages import VectorClass

    u, cls = build_vector(sch, BoundaryPoint(30.0), BoundaryPoint(0.55))
    assert cls is VectorClass.WANDERING
    cond = conditional_on_horocycle(u, m_sch, DELTA_SCH)
    for t in (1.0, 2.0, 3.0):
        pulled = conditional_on_horocycle(geodesic_flow(u, -t), m_sch, DELTA_SCH)
        assert len(pulled) == len(cond)
        assert np.max(np.abs(pulled.params - cond.params * math.exp(-t))) < 1e-10
        drift = pulled.log_weights - (cond.log_weights - DELTA_SCH * t)
        assert np.max(np.abs(drift)) < 1e-10


def test_conditional_reweighting_radial_relative(u8, m_sch, cond8):
    # on a radial leaf the pole amplifies float error in the largest params;
    # the law still holds to relative precision
    t = 1.0
    pulled = conditional_on_horocycle(geodesic_flow(u8, -t), m_sch, DELTA_SCH)
    a = np.sort(pulled.params)
    b = np.sort(cond8.params * math.exp(-t))
    assert len(a) == len(b)
    assert np.max(np.abs(a - b) / (np.abs(b) + 1.0)) < 1e-6


def test_flow_by_zero_is_identity(u8, m_sch, cond8):
    again = conditional_on_horocycle(geodesic_flow(u8, 0.0), m_sch, DELTA_SCH)
    assert np.array_equal(again.params, cond8.params)
    assert np.array_equal(again.log_weights, cond8.log_weights)


def test_horoball_mass_monotone_and_frozen(cond8):
    e2, e4 = math.e ** 2, math.e ** 4
    masses = [horoball_mass(cond8, r) for r in (1.0, e2, e4)]
    assert masses[0] < masses[1] < masses[2]
    assert masses[1] == pytest.approx(1.155412925010575, rel=1e-9)
    assert masses[2] == pytest.approx(4.122445697587423, rel=1e-9)


class _One:
    def evaluate_points(self, x, y, theta):
        return np.ones_like(np.asarray(x, dtype=float))


def test_ps_integral_normalizes_constants(m_sch):
    assert ps_integral(_One(), m_sch, DELTA_SCH) == pytest.approx(1.0, abs=1e-14)


def test_ps_integral_frozen_values(sch, m_sch):
    vals = []
    for cd in ((0.0, 1.4, 0.0), (0.0, 1.7, 1.57), (3.25, 0.6, 0.0)):
        psi = TestFunction(sch, pointed_frame(*cd), base_width=1.2, angle_width=1.8)
        vals.append(ps_integral(psi, m_sch, DELTA_SCH))
    assert vals[0] == pytest.approx(0.060547058378818276, rel=1e-9)
    assert vals[1] == pytest.approx(0.03228879597493137, rel=1e-9)
    assert vals[2] == pytest.approx(0.02839286337351398, rel=1e-9)


def test_ps_integral_mirror_pair(sch, m_sch):
    a = ps_integral(TestFunction(sch, pointed_frame(1.5, 1.3, 0.7)), m_sch, DELTA_SCH)
    b = ps_integral(TestFunction(sch, pointed_frame(-1.5, 1.3, math.pi - 0.7)), m_sch, DELTA_SCH)
    assert a == pytest.approx(b, rel=1e-9)


def test_ps_integral_vanishes_off_support(sch, m_sch):
    psi = TestFunction(sch, pointed_frame(0.0, 60.0, 0.0), base_width=0.4, angle_width=0.8)
    assert ps_integral(psi, m_sch, DELTA_SCH) == 0.0


def test_br_integral_normalization_and_frozen(cus, m_cus):
    # reference window mass is 1 by construction once the window covers
    # the whole sigma range
    one = br_integral(_One(), m_cus, DELTA_CUS, sigma_span=8.0, window_span=9.0)
    assert one == pytest.approx(1.0, abs=1e-12)
    wb, wa = 1.2, 1.8
    psi = TestFunction(cus, pointed_frame(-2.4, math.exp(-0.9), -5 * math.pi / 8), base_width=wb, angle_width=wa)
    phi = TestFunction(cus, pointed_frame(-2.8, math.exp(-0.6), -5 * math.pi / 8), base_width=wb, angle_width=wa)
    assert br_integral(psi, m_cus, DELTA_CUS) == pytest.approx(0.025992940134935968, rel=1e-9)
    assert br_integral(phi, m_cus, DELTA_CUS) == pytest.approx(0.02456701704282736, rel=1e-9)


def test_br_ratio_window_independent(cus, m_cus):
    psi = TestFunction(cus, pointed_frame(-2.4, math.exp(-0.9), -5 * math.pi / 8), base_width=1.2, angle_width=1.8)
    phi = TestFunction(cus, pointed_frame(-2.8, math.exp(-0.6), -5 * math.pi / 8), base_width=1.2, angle_width=1.8)
    r1 = br_integral(psi, m_cus, DELTA_CUS, window_span=3.0) / br_integral(phi, m_cus, DELTA_CUS, window_span=3.0)
    r2 = br_integral(psi, m_cus, DELTA_CUS, window_span=9.0) / br_integral(phi, m_cus, DELTA_CUS, window_span=9.0)
    assert r1 == pytest.approx(r2, rel=1e-12)


def test_mass_in_interval(m_sch):
    full = m_sch.mass_in_interval(m_sch.points[0] - 1, m_sch.points[-1] + 1)
    assert full == pytest.approx(1.0, abs=1e-12)
    left = m_sch.mass_in_interval(-10.0, 0.0)
    right = m_sch.mass_in_interval(0.0, 10.0)
    assert left == pytest.approx(right, rel=1e-8)  # mirror symmetry again
    assert left + right == pytest.approx(1.0, abs=1e-10)
