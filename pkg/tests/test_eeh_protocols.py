import json

import numpy as np
import pytest

from hyperent.channels import identity_channel, unitary_channel
from hyperent.eeh import EehTrace, diff_traces, run_trace
from hyperent.measures import pairwise_concurrences
from hyperent.protocols import (
    NoiseSpec,
    ProtocolSpec,
    preset,
    qkd_w_pipeline,
    teleportation_pipeline,
)
from hyperent.qstate import CNOT, EPR, H, basis_state, preset_state

TELEPORT_IDEAL = ["Separable", "Biseparable({2,3})", "GhzFamily", "GhzFamily"]


def test_empty_pipeline():
    tr = run_trace(basis_state("000"), [])
    assert tr.labels() == ["Separable"] and tr.transitions == ()


def test_teleport_manual_pipeline():
    pipe = [unitary_channel(EPR, [2, 3]), unitary_channel(CNOT, [1, 2]), unitary_channel(H, [1])]
    tr = run_trace(preset_state("plus_q1"), pipe)
    assert tr.labels() == TELEPORT_IDEAL
    assert tr.transitions == ("E_EPR", "E_CNOT", "E_H")


def test_identity_pipelines_constant():
    for name in ("w", "ghz", "bell0_23"):
        tr = run_trace(preset_state(name), [identity_channel()] * 3)
        assert len(set(tr.labels())) == 1


def test_w_identity():
    assert run_trace(preset_state("w"), [identity_channel()]).labels() == ["WType", "WType"]


def test_preset_traces(traces):
    assert traces["teleport"].labels() == TELEPORT_IDEAL
    noisy = traces["teleport-noisy"]
    assert noisy.labels() == ["Separable", "Biseparable({2,3})", "Separable", "Separable"]
    last = noisy.layers[-1]
    assert last.hypergraph.mixed and not last.hypergraph.has_hyperedge
    assert traces["qkd-w"].labels() == ["WType"] * 4
    eve = traces["qkd-w-eve"].layers[-1]
    assert str(eve.label) == "Biseparable({1,2})" and eve.hypergraph.mixed
    assert (eve.report.c12, eve.report.c13, eve.report.c23) == pytest.approx((2 / 3, 0, 0), abs=1e-9)


def test_diffs(traces):
    assert diff_traces(traces["teleport"], traces["teleport"]) == []
    assert diff_traces(traces["teleport"], traces["teleport-noisy"]) == [2, 3]
    assert diff_traces(traces["qkd-w"], traces["qkd-w-eve"]) == [3]
    with pytest.raises(ValueError):
        diff_traces(traces["teleport"], run_trace(basis_state("000"), []))


def test_layer_reports_respect_invariants(traces):
    for tr in traces.values():
        for layer in tr.layers:
            r = layer.report
            assert r.c12**2 + r.c13**2 <= r.c1_23**2 + 1e-8
            if not layer.hypergraph.mixed:
                assert layer.label.kind != "Forbidden"


def test_determinism():
    a = preset("teleport-noisy").run()
    b = preset("teleport-noisy").run()
    for la, lb in zip(a.layers, b.layers):
        assert np.array_equal(la.rho.entries, lb.rho.entries)
    assert json.dumps(a.to_dict(True)) == json.dumps(b.to_dict(True))


def test_prefix_consistency():
    spec = preset("teleport-noisy")
    chans = spec.channels()
    full = run_trace(spec.initial_state(), chans)
    for k in range(len(chans) + 1):
        part = run_trace(spec.initial_state(), chans[:k])
        assert part.labels() == full.labels()[: k + 1]
        for la, lb in zip(part.layers, full.layers):
            assert np.array_equal(la.rho.entries, lb.rho.entries)


def test_trace_json_round_trip(traces):
    for tr in traces.values():
        for rho in (False, True):
            d = json.loads(json.dumps(tr.to_dict(include_rho=rho)))
            back = EehTrace.from_dict(d)
            assert back.to_dict(include_rho=rho) == tr.to_dict(include_rho=rho)
            assert diff_traces(back, tr) == []


def test_trace_json_rejects_inconsistent_class(traces):
    d = traces["teleport"].to_dict()
    d["layers"][0]["class"] = "WType"
    with pytest.raises(ValueError):
        EehTrace.from_dict(d)
    d = traces["teleport"].to_dict()
    d["transitions"].pop()
    with pytest.raises(ValueError):
        EehTrace.from_dict(d)


def test_folded_noise_keeps_layer_count():
    ideal = teleportation_pipeline().run()
    for noise in (True, {"channel": "phase_flip", "p": 0.2, "targets": [3]}):
        assert len(teleportation_pipeline(noise).run().layers) == len(ideal.layers)
    unfolded = teleportation_pipeline(NoiseSpec({"channel": "phase_flip", "p": 0.5, "targets": [2]}, 0, False))
    assert len(unfolded.run().layers) == len(ideal.layers) + 1


def test_invalid_noise_placement():
    noise = {"channel": "phase_flip", "p": 0.5, "targets": [2]}
    for spec in (NoiseSpec(noise, 5), NoiseSpec(noise, 2, True), NoiseSpec(noise, -1)):
        with pytest.raises(ValueError):
            teleportation_pipeline(spec)


def test_basis_input_warns():
    with pytest.warns(UserWarning):
        spec = teleportation_pipeline(initial="basis:000")
    assert spec.run().labels()[2] != "GhzFamily"


def test_qkd_wrong_target():
    with pytest.raises(ValueError):
        qkd_w_pipeline([{"channel": "identity", "targets": [2]}] * 3)
    with pytest.raises(ValueError):
        qkd_w_pipeline([{"channel": "identity", "targets": [1]}])


def test_w_robust_ghz_fragile():
    from hyperent.qstate import density_from_pure

    assert all(c > 0.66 for c in pairwise_concurrences(density_from_pure(preset_state("w"))))
    assert all(c < 1e-9 for c in pairwise_concurrences(density_from_pure(preset_state("ghz"))))


def test_protocol_spec_round_trip():
    for name in ("teleport", "teleport-noisy", "qkd-w", "qkd-w-eve"):
        spec = preset(name)
        d = json.loads(json.dumps(spec.to_dict()))
        assert ProtocolSpec.from_dict(d) == spec
    assert preset("qkd-w").notes
    with pytest.raises(ValueError):
        preset("bb84")
