import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import causalq as cq
from causalq import oplib
from causalq.quantum import dagger, frobenius


def test_pure_state_norm_enforced():
    with pytest.raises(ValueError):
        cq.PureState(np.array([1.0, 1.0]))
    s = oplib.uniform_superposition(4)
    assert s.dim == 4


def test_density_operator_invariants():
    rho = oplib.bell_phi_plus().density()
    assert abs(np.trace(rho.matrix) - 1) < 1e-12
    with pytest.raises(ValueError):
        cq.DensityOperator(np.array([[0.5, 0.6], [0.6, 0.5]]))  # not PSD


def test_validate_measurement_projective_and_unitary():
    rep = cq.validate_measurement(oplib.projective_family("z"))
    assert rep.passed and rep.evidence["completeness_residual"] == 0
    rep = cq.validate_measurement(oplib.unitary_family(oplib.pauli_x()))
    assert rep.passed


def test_validate_measurement_weak():
    rep = cq.validate_measurement(oplib.weak_family(0.3))
    assert rep.passed
    assert rep.evidence["completeness_residual"] < 1e-12
    assert rep.evidence["worst_two_block_residual"] < 1e-12


def test_incomplete_family_rejected():
    with pytest.raises(ValueError):
        cq.MeasurementFamily((np.eye(2) * 0.5,))


def test_povm_from_measurement():
    z = cq.povm_from_measurement(oplib.projective_family("z"))
    assert np.allclose(z.effects[0], oplib.projector("z", 0))
    unit = cq.povm_from_measurement(oplib.unitary_family(oplib.pauli_x()))
    assert np.allclose(unit.effects[0], np.eye(2))
    weak = cq.povm_from_measurement(oplib.weak_family(0.3))
    assert np.allclose(weak.effects[0], (np.eye(2) + 0.3 * oplib.pauli_z()) / 2)


def test_measurement_from_povm_diagonal():
    povm = cq.Povm((np.diag([0.25, 1.0]), np.diag([0.75, 0.0])))
    fam = cq.measurement_from_povm(povm)
    assert np.allclose(fam.kraus[0], np.diag([0.5, 1.0]))


def test_measurement_from_povm_x_axis():
    e = (np.eye(2) + 0.3 * oplib.pauli_x()) / 2
    m = cq.hermitian_sqrt(e)
    vals = np.linalg.eigvalsh(m)
    assert np.allclose(sorted(vals), [np.sqrt(0.35), np.sqrt(0.65)])


def test_povm_roundtrip():
    rng = np.random.default_rng(0)
    for _ in range(20):
        d = int(rng.integers(2, 6))
        fam = cq.random_family(rng, d, int(rng.integers(1, 4)))
        povm = cq.povm_from_measurement(fam)
        back = cq.povm_from_measurement(cq.measurement_from_povm(povm))
        for e1, e2 in zip(povm.effects, back.effects):
            assert frobenius(e1 - e2) < 1e-9


def test_not_psd_effect_rejected():
    with pytest.raises(cq.NotPSD):
        cq.hermitian_sqrt(np.diag([1.0, -0.1]))


def test_conjugate_measurement_examples():
    z = oplib.projective_family("z")
    ident = cq.Unitary(np.eye(2))
    assert all(
        np.allclose(a, b)
        for a, b in zip(cq.conjugate_measurement(ident, z, ident).kraus, z.kraus)
    )
    h = cq.Unitary(oplib.hadamard())
    rotated = cq.conjugate_measurement(h, z, ident)
    assert cq.validate_measurement(rotated).passed
    assert np.allclose(rotated.kraus[0], oplib.hadamard() @ oplib.projector("z", 0))


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10**6), d=st.integers(2, 6), k=st.integers(1, 4))
def test_conjugation_preserves_completeness(seed, d, k):
    rng = np.random.default_rng(seed)
    fam = cq.random_family(rng, d, k)
    u1 = cq.haar_unitary(rng, d)
    u2 = cq.haar_unitary(rng, d)
    out = cq.conjugate_measurement(u1, fam, u2)
    total = sum(dagger(m) @ m for m in out.kraus)
    assert frobenius(total - np.eye(d)) < 1e-10


def test_born_probabilities():
    z = oplib.projective_family("z")
    plus = oplib.uniform_superposition(2)
    assert abs(cq.born_probability(z, 0, plus) - 0.5) < 1e-12
    assert abs(cq.born_probability(z, 1, plus) - 0.5) < 1e-12
    x = oplib.unitary_family(oplib.pauli_x())
    assert abs(cq.born_probability(x, 0, plus) - 1.0) < 1e-12
    weak = oplib.weak_family(0.3)
    assert abs(cq.born_probability(weak, 0, oplib.basis_state(0, 2)) - 0.65) < 1e-12
    with pytest.raises(cq.UnknownOutcome):
        cq.born_probability(z, 5, plus)


def test_born_probabilities_sum_to_one():
    rng = np.random.default_rng(1)
    for _ in range(20):
        d = int(rng.integers(2, 7))
        fam = cq.random_family(rng, d, int(rng.integers(1, 5)))
        v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        psi = cq.PureState(v / np.linalg.norm(v))
        total = sum(cq.born_probability(fam, k, psi) for k in range(fam.num_outcomes))
        assert abs(total - 1) < 1e-10


def test_selective_update_examples():
    z = oplib.projective_family("z")
    plus = oplib.uniform_superposition(2)
    out = cq.selective_update(z, 0, plus)
    assert np.allclose(out.amplitudes, [1, 0])
    x = oplib.unitary_family(oplib.pauli_x())
    out = cq.selective_update(x, 0, oplib.basis_state(0, 2))
    assert np.allclose(out.amplitudes, [0, 1])
    weak = oplib.weak_family(0.3)
    out = cq.selective_update(weak, 0, plus)
    assert np.allclose(out.amplitudes, [np.sqrt(0.65), np.sqrt(0.35)])


def test_selective_update_zero_probability_branch():
    z = oplib.projective_family("z")
    with pytest.raises(cq.ZeroProbabilityBranch):
        cq.selective_update(z, 1, oplib.basis_state(0, 2))


def test_nonselective_update_examples():
    z = oplib.projective_family("z")
    plus_rho = oplib.uniform_superposition(2).density()
    out = cq.nonselective_update(z, plus_rho)
    assert np.allclose(out.matrix, np.eye(2) / 2)
    x = oplib.unitary_family(oplib.pauli_x())
    rho0 = oplib.basis_state(0, 2).density()
    out = cq.nonselective_update(x, rho0)
    assert np.allclose(out.matrix, oplib.basis_state(1, 2).density().matrix)
    weak = oplib.weak_family(0.3)
    out = cq.nonselective_update(weak, plus_rho)
    assert abs(out.matrix[0, 1] - np.sqrt(0.65 * 0.35)) < 1e-12


def test_nonselective_preserves_trace_and_positivity():
    rng = np.random.default_rng(2)
    for _ in range(20):
        d = int(rng.integers(2, 9))
        fam = cq.random_family(rng, d, int(rng.integers(1, 4)))
        g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        rho = cq.DensityOperator(g @ dagger(g) / np.trace(g @ dagger(g)).real)
        out = cq.nonselective_update(fam, rho)
        assert abs(np.trace(out.matrix).real - 1) < 1e-12
        assert np.linalg.eigvalsh(out.matrix).min() > -1e-10


def test_embed_local_examples():
    x_on_0 = cq.embed(oplib.pauli_x(), 0, (2, 2))
    assert np.allclose(x_on_0, np.kron(oplib.pauli_x(), np.eye(2)))
    assert np.allclose(cq.embed(np.eye(2), 1, (2, 2)), np.eye(4))
    z_on_1 = cq.embed(oplib.pauli_z(), 1, (2, 2))
    fit = cq.extract_phase(x_on_0, z_on_1)
    assert fit.proportional and fit.phi == 0.0


def test_embed_layout_mismatch():
    with pytest.raises(cq.LayoutMismatch):
        cq.embed(oplib.pauli_x(), 0, (3, 2))
    with pytest.raises(cq.LayoutMismatch):
        cq.embed(oplib.pauli_x(), 2, (2, 2))


def test_dimension_mismatch_errors():
    z2 = oplib.projective_family("z")
    with pytest.raises(cq.DimensionMismatch):
        cq.conjugate_measurement(cq.Unitary(np.eye(3)), z2, cq.Unitary(np.eye(2)))
    with pytest.raises(cq.DimensionMismatch):
        cq.nonselective_update(z2, oplib.bell_phi_plus().density())
    with pytest.raises(cq.DimensionMismatch):
        cq.born_probability(z2, 0, oplib.basis_state(0, 3))
    with pytest.raises(cq.DimensionMismatch):
        cq.anyonic_commutator(np.eye(2), np.eye(3), 0.0)
