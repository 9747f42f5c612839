import json

import pytest
from hypothesis import given

from strategies import series, signed_perms
from doublegroth.coeffring import A, B, X, Context, Series, bar
from doublegroth.genfun import gt_coeff
from doublegroth.localization import (
    LocalizationTable,
    gkm_check,
    loc_product_formula,
    phi_v,
    psi_n,
    support_triangularity,
)
from doublegroth.pfaffengine import gx_lambda, required_num_b
from doublegroth.weylcomb import KStrictPartition, SignedPermutation, enumerate_spk, partition_to_w, simple_reflection

CTX = Context(4, 2, 1, 2)


def test_phi_examples():
    s0 = simple_reflection(0)
    b1 = Series.var(CTX, B(1))
    assert phi_v(Series.var(CTX, A(1)), s0) == b1
    assert phi_v(Series.var(CTX, X(1)), s0) == bar(b1)
    assert phi_v(Series.var(CTX, X(1)), SignedPermutation.identity()).is_zero()
    assert phi_v(Series.var(CTX, A(1)), SignedPermutation.identity()) == bar(b1)
    assert phi_v(b1, s0) == b1


def test_phi_needs_enough_b():
    with pytest.raises(IndexError):
        phi_v(Series.one(CTX), SignedPermutation((1, 2, -3)))


LOC_CTX = Context(3, 2, 1, 3)


@given(series(LOC_CTX), series(LOC_CTX), signed_perms(3))
def test_phi_is_an_algebra_map(f, g, v):
    assert phi_v(f * g, v) == phi_v(f, v) * phi_v(g, v)
    assert phi_v(f + g, v) == phi_v(f, v) + phi_v(g, v)
    assert not phi_v(f, v).families_used() - {"b"}


def test_psi_of_constants():
    ctx = Context(3, 2, 1, 2)
    table = psi_n(Series.one(ctx), 2, 1)
    assert set(table.entries) == set(enumerate_spk(2, 1))
    assert all(val == Series.one(ctx) for val in table.entries.values())
    assert gkm_check(table, "C").ok
    empty = gx_lambda(KStrictPartition(1, ()), "C", ctx)
    assert all(val == Series.one(ctx) for val in psi_n(empty, 2, 1).entries.values())


def test_psi_drops_high_b():
    ctx = Context(3, 1, 0, 3)
    table = psi_n(Series.var(ctx, B(3)) + 1, 2, 0)
    assert all(val == Series.one(ctx) for val in table.entries.values())


def test_gkm_detects_perturbation():
    n, k = 2, 0
    lam = KStrictPartition(0, (1,))
    ctx = Context(4, n, k, max(n, required_num_b(lam)))
    table = psi_n(gx_lambda(lam, "C", ctx), n, k)
    assert gkm_check(table, "C").ok
    target = KStrictPartition(0, (2, 1))
    entries = dict(table.entries)
    entries[target] = entries[target] + 1
    report = gkm_check(LocalizationTable(n, k, entries), "C")
    assert not report.ok
    assert {str(v.mu) for v in report.violations} | {str(v.target) for v in report.violations} >= {"2,1"}
    assert report.to_json()["violations"]


def test_gkm_requires_complete_table():
    with pytest.raises(KeyError):
        gkm_check(LocalizationTable(2, 0, {}), "B")


@pytest.mark.parametrize("typ", ["B", "C"])
@pytest.mark.parametrize("n,k", [(2, 0), (2, 1), (3, 1)])
def test_gkm_and_triangularity(typ, n, k):
    tables = {}
    for lam in enumerate_spk(n, k):
        ctx = Context(5, n, k, max(n, required_num_b(lam)))
        tables[lam] = psi_n(gx_lambda(lam, typ, ctx), n, k)
        assert gkm_check(tables[lam], typ).ok, str(lam)
    assert support_triangularity(tables) == []


def test_table_json_roundtrip():
    lam = KStrictPartition(1, (2,))
    ctx = Context(4, 2, 1, required_num_b(lam))
    table = psi_n(gx_lambda(lam, "B", ctx), 2, 1)
    data = json.loads(json.dumps(table.to_json()))
    assert [row["partition"] for row in data["entries"]] == [str(p) for p in enumerate_spk(2, 1)]
    back = LocalizationTable.from_json(data)
    assert back.entries == table.entries and (back.n, back.k) == (2, 1)


# -- closed product -------------------------------------------------------------------


def test_product_formula_trivial_case():
    ctx = Context(4, 1, 0, 1)
    closed = loc_product_formula(KStrictPartition(0, ()), 0, 0, 1, "C", ctx, -3, 3)
    mb = -Series.beta(ctx)
    for m in range(-3, 4):
        want = mb ** (-m) if m <= 0 else Series.zero(ctx)
        assert closed.coeff(m) == want


@pytest.mark.parametrize("typ", ["B", "C"])
@pytest.mark.parametrize("n,k", [(2, 0), (2, 1), (3, 1)])
def test_product_formula_matches_localization(typ, n, k):
    ctx = Context(4, n, k, n)
    for mu in enumerate_spk(n, k):
        w = partition_to_w(mu, n)
        for ell in range(-n, n + 1):
            closed = loc_product_formula(mu, ell, k, n, typ, ctx, -2, 4)
            for m in range(-2, 5):
                assert phi_v(gt_coeff(m, ell, k, typ, ctx), w) == closed.coeff(m)


def test_product_formula_type_independent_for_negative_ell():
    ctx = Context(4, 2, 1, 2)
    for mu in enumerate_spk(2, 1):
        b = loc_product_formula(mu, -2, 1, 2, "B", ctx, -2, 4)
        c = loc_product_formula(mu, -2, 1, 2, "C", ctx, -2, 4)
        assert b == c


def test_product_formula_errors():
    ctx = Context(4, 2, 1, 2)
    with pytest.raises(IndexError):
        loc_product_formula(KStrictPartition(1, ()), 3, 1, 2, "C", ctx, 0, 1)
    with pytest.raises(ValueError):
        loc_product_formula(KStrictPartition(0, ()), 0, 1, 2, "C", ctx, 0, 1)


def test_thread_pool_is_deterministic(monkeypatch):
    lam = KStrictPartition(1, (2, 1))
    ctx = Context(4, 3, 1, 3)
    f = gx_lambda(lam, "C", ctx)
    serial = psi_n(f, 3, 1)
    monkeypatch.setenv("GROTH_THREADS", "4")
    parallel = psi_n(f, 3, 1)
    assert json.dumps(serial.to_json()) == json.dumps(parallel.to_json())
    assert gkm_check(parallel, "C").to_json() == gkm_check(serial, "C").to_json()
