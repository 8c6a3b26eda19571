import io
import math

import numpy as np
import pytest

from urdd.ensemble import (
    DDRun,
    EnsembleSpec,
    compare_storage,
    pryso_like_run,
    pryso_like_spec,
    sample_ensemble,
    storage_curves,
    storage_efficiency,
    write_storage_csv,
)
from urdd.pulses import PulseShape
from urdd.sequences import DomainError, by_name, symmetric_ur

RUN = pryso_like_run(40e-6)


def test_sampling_deterministic_and_counter_based():
    spec = pryso_like_spec(n_qubits=300, seed=7)
    a, b = sample_ensemble(spec), sample_ensemble(spec)
    assert np.array_equal(a.detuning, b.detuning)
    assert np.array_equal(a.amplitude_error, b.amplitude_error)
    prefix = sample_ensemble(pryso_like_spec(n_qubits=40, seed=7))
    assert np.array_equal(prefix.detuning, a.detuning[:40])
    other = sample_ensemble(pryso_like_spec(n_qubits=300, seed=8))
    assert not np.array_equal(other.detuning, a.detuning)


def test_sampling_degenerate_spreads():
    s = sample_ensemble(EnsembleSpec(n_qubits=50, detuning_sigma=0, rabi_spread=0, rabi_offset=0.05))
    assert np.all(s.detuning == 0)
    assert np.all(s.amplitude_error == 0.05)


def test_sampling_statistics():
    spec = pryso_like_spec(n_qubits=4000, seed=3)
    s = sample_ensemble(spec)
    sigma = spec.detuning_sigma
    assert abs(s.detuning.mean()) < 5 * sigma / math.sqrt(spec.n_qubits)
    assert s.detuning.std() == pytest.approx(sigma, rel=0.05)
    assert np.all(np.abs(s.amplitude_error) <= 3 * spec.rabi_spread + 1e-15)
    assert np.all((s.coherence_phase >= 0) & (s.coherence_phase < 2 * math.pi))


def test_fixed_phase_mode():
    s = sample_ensemble(pryso_like_spec(n_qubits=20, coherence_phase="fixed"))
    assert np.all(s.coherence_phase == 0)


@pytest.mark.parametrize("mode", ["random", "fixed"])
@pytest.mark.parametrize("name", ["UR10", "CPMG", "KDD_XY4"])
def test_perfect_pulses_only_t2(mode, name):
    spec = EnsembleSpec(n_qubits=64, detuning_sigma=0, rabi_spread=0, coherence_phase=mode)
    t = 120 * RUN.cycle_time
    res = storage_efficiency(spec, by_name(name), RUN, t)
    assert res.efficiency_proxy == pytest.approx(math.exp(-2 * t / spec.T2), rel=1e-9)


def test_free_induction_decay_oracle():
    spec = pryso_like_spec(n_qubits=10_000, seed=11, T2=1.0)
    s = sample_ensemble(spec)
    for t in (2e-6, 5e-6, 13e-6, 25e-6):
        res = storage_efficiency(spec, None, RUN, t, sample=s)
        # empirical oracle on the same draws, then the Gaussian limit
        emp = abs(np.mean(np.exp(1j * s.detuning * t))) ** 2 * math.exp(-2 * t / spec.T2)
        assert res.efficiency_proxy == pytest.approx(emp, abs=1e-12)
        gauss = math.exp(-(spec.detuning_sigma * t) ** 2) * math.exp(-2 * t / spec.T2)
        assert res.efficiency_proxy == pytest.approx(gauss, abs=0.03)


def test_ideal_pulses_zero_error_limit():
    spec = pryso_like_spec(n_qubits=10_000)
    run = pryso_like_run(40e-6, ideal=True)
    for t in (1e-3, 6e-3):
        res = storage_efficiency(spec, symmetric_ur(8), run, t)
        assert res.efficiency_proxy == pytest.approx(math.exp(-2 * t / spec.T2), rel=0.02)


def test_ideal_pulses_monotone_in_time():
    spec = pryso_like_spec(n_qubits=200)
    run = pryso_like_run(40e-6, ideal=True)
    times = [0.6e-3, 1e-3, 2e-3, 4e-3, 6e-3]
    vals = [storage_efficiency(spec, symmetric_ur(12), run, t).efficiency_proxy for t in times]
    assert all(b <= a for a, b in zip(vals, vals[1:]))


def test_storage_time_too_short():
    with pytest.raises(DomainError):
        storage_efficiency(pryso_like_spec(n_qubits=4), symmetric_ur(20), RUN, 100e-6)
    with pytest.raises(DomainError):
        storage_efficiency(pryso_like_spec(n_qubits=4), None, RUN, 0.0)


def test_ur_order_improves_proxy():
    spec = pryso_like_spec(n_qubits=1000)
    t = 120 * RUN.cycle_time
    seqs = [symmetric_ur(n) for n in (4, 8, 12, 20)]
    vals = [v for _, v in compare_storage(spec, seqs, RUN, t).per_sequence]
    assert all(b > a for a, b in zip(vals, vals[1:])), vals


def test_threads_bit_identical():
    spec = pryso_like_spec(n_qubits=2500)
    t = 120 * RUN.cycle_time
    a = storage_efficiency(spec, symmetric_ur(10), RUN, t, threads=1).efficiency_proxy
    b = storage_efficiency(spec, symmetric_ur(10), RUN, t, threads=4).efficiency_proxy
    assert a == b


def test_spec_json():
    spec = pryso_like_spec(n_qubits=10)
    d = spec.to_json_dict()
    assert set(d) >= {"nQubits", "detuningSigma", "rabiSpread", "rabiOffset", "driveDetuning", "T2", "seed"}
    assert EnsembleSpec.from_json_dict(d) == spec
    with pytest.raises(DomainError):
        EnsembleSpec.from_json_dict({"nQubits": 3, "bogus": 1})
    with pytest.raises(DomainError):
        EnsembleSpec(n_qubits=0)
    with pytest.raises(DomainError):
        EnsembleSpec(T2=0)


def test_storage_csv():
    spec = pryso_like_spec(n_qubits=8)
    rows = storage_curves(spec, [symmetric_ur(4), None], RUN, [1e-3, 2e-3])
    buf = io.StringIO()
    write_storage_csv(rows, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "storage_time_s,sequence,efficiency_proxy"
    assert len(lines) == 5
    assert lines[3].split(",")[1] == "none"


def test_drive_detuning_shifts_all_qubits():
    base = EnsembleSpec(n_qubits=16, detuning_sigma=0, rabi_spread=0)
    shifted = EnsembleSpec(n_qubits=16, detuning_sigma=0, rabi_spread=0, drive_detuning=5e4)
    t = 40 * RUN.cycle_time
    a = storage_efficiency(base, by_name("XY4"), RUN, t).efficiency_proxy
    b = storage_efficiency(shifted, by_name("XY4"), RUN, t).efficiency_proxy
    assert b < a
