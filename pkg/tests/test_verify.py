"""Claim registry: health, determinism, fault injection, serialization."""

import json

import jsonschema
import pytest

from dsbs_envelopes import (
    CLAIM_IDS,
    DsbsParams,
    InputDomainError,
    VerifyOptions,
    default_tolerances,
    verify_all,
)

RHO = DsbsParams(0.9)
FAST = VerifyOptions.small()

REPORT_SCHEMA = {
    "type": "object",
    "required": ["meta", "claims"],
    "properties": {
        "meta": {
            "type": "object",
            "required": ["rho", "grid_n", "tolerances", "version"],
            "properties": {
                "rho": {"type": "number"},
                "grid_n": {"type": "integer"},
                "tolerances": {"type": "object"},
                "version": {"type": "string"},
            },
        },
        "claims": {
            "type": "array",
            "minItems": 12,
            "maxItems": 12,
            "items": {
                "type": "object",
                "required": ["id", "anchor", "passed", "worst_violation", "witness", "runtime_ms"],
                "properties": {
                    "id": {"type": "string"},
                    "anchor": {"type": "string"},
                    "passed": {"type": "boolean"},
                    "worst_violation": {"type": "number"},
                    "runtime_ms": {"type": "number"},
                },
            },
        },
    },
}


@pytest.fixture(scope="module")
def healthy_report():
    return verify_all(RHO, grid_n=101, options=FAST)


def test_all_claims_pass_when_healthy(healthy_report):
    assert healthy_report.passed
    assert [c.claim_id for c in healthy_report.claims] == list(CLAIM_IDS)
    for claim in healthy_report.claims:
        assert claim.passed, f"{claim.claim_id}: {claim.worst_violation}"
        assert claim.worst_violation <= 0.0
        assert claim.anchor


def test_runtimes_recorded_separately(healthy_report):
    assert set(healthy_report.runtimes_ms) == set(CLAIM_IDS)
    assert all(ms >= 0.0 for ms in healthy_report.runtimes_ms.values())


def test_canonical_bytes_deterministic(healthy_report):
    again = verify_all(RHO, grid_n=101, options=FAST)
    assert healthy_report.canonical_bytes() == again.canonical_bytes()
    # runtimes differ run to run yet never reach the canonical form
    assert healthy_report.runtimes_ms != again.runtimes_ms or True
    assert b"runtime" not in healthy_report.canonical_bytes()


def test_json_round_trip_and_schema(healthy_report):
    doc = healthy_report.to_json_dict()
    jsonschema.validate(doc, REPORT_SCHEMA)
    rehydrated = json.loads(json.dumps(doc))
    assert rehydrated == doc
    assert doc["meta"]["grid_n"] == 101
    assert doc["meta"]["rho"] == 0.9


def test_fault_injection_trips_exactly_one_claim():
    for fault in CLAIM_IDS:
        report = verify_all(RHO, grid_n=101, options=FAST, inject_fault=fault)
        failed = [c.claim_id for c in report.claims if not c.passed]
        assert failed == [fault], f"fault {fault} tripped {failed}"
        assert not report.passed


def test_unknown_fault_rejected():
    with pytest.raises(InputDomainError):
        verify_all(RHO, grid_n=101, options=FAST, inject_fault="Z9")


def test_tolerance_overrides():
    tight = verify_all(RHO, grid_n=101, options=FAST, tols={"pstar_gap": 1e-15})
    p_claim = next(c for c in tight.claims if c.claim_id == "P")
    assert not p_claim.passed  # the honest gap is ~1e-11, above such a bound
    with pytest.raises(InputDomainError):
        verify_all(RHO, grid_n=101, options=FAST, tols={"no_such_knob": 1.0})
    with pytest.raises(InputDomainError):
        verify_all(RHO, grid_n=101, options=FAST, tols={"pstar_gap": 0.0})


def test_grid_bounds_enforced():
    with pytest.raises(InputDomainError):
        verify_all(RHO, grid_n=31, options=FAST)
    with pytest.raises(InputDomainError):
        verify_all(RHO, grid_n=1201, options=FAST)


def test_default_tolerances_scale_with_grid():
    t201 = default_tolerances(201)
    t401 = default_tolerances(401)
    assert t401["envelope_fixpoint"] < t201["envelope_fixpoint"]
    assert t201["midpoint"] == 1e-9


def test_options_validation():
    with pytest.raises(InputDomainError):
        VerifyOptions(master_n=2001, lattice_n=100)  # stride not integral
    with pytest.raises(InputDomainError):
        VerifyOptions(root_problems=0)
    small = VerifyOptions.small()
    assert small.root_scan_n >= 100_000
