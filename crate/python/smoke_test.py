"""Smoke test for the jetvar Python extension.

Build the extension first:

    cargo build --release -p jetvar-py --features extension-module

then run `python3 python/smoke_test.py`. Set JETVAR_LIB to point at a
different build of libjetvar_py.so.
"""

import importlib.util
import os
import pathlib
import shutil
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load():
    lib = pathlib.Path(os.environ.get("JETVAR_LIB", ROOT / "target" / "release" / "libjetvar_py.so"))
    if not lib.exists():
        sys.exit(f"extension not found at {lib}; build it first (see module docstring)")
    tmp = pathlib.Path(tempfile.mkdtemp())
    target = tmp / "jetvar.so"
    shutil.copy(lib, target)
    spec = importlib.util.spec_from_file_location("jetvar", target)
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


def main():
    jv = load()

    ctx = jv.JetContext(2, base=["x"], fields=["u"])
    el = jv.euler_lagrange(jv.JetContext(1, base=["x"], fields=["u"]), "1/2*u_{1}^2 + u^3")
    assert [str(e) for e in el] == ["3*u^2 - u_{1,1}"], el

    report = jv.helmholtz(ctx, ["u_{1,1}"])
    assert report["verdict"] == "variational", report
    assert str(jv.tonti(ctx, ["u_{1,1}"])) == "1/2*u*u_{1,1}"

    report = jv.helmholtz(jv.JetContext(1, base=["x"], fields=["u"]), ["u_{1}"])
    assert report["verdict"] == "not_variational"
    assert report["residuals"][0]["residual"] == "2"

    u = ctx.parse("u")
    u1 = ctx.parse("u_{1}")
    assert (u * u1).total_derivative(1) == u1 ** 2 + u * ctx.parse("u_{1,1}")
    assert jv.is_null_lagrangian(jv.JetContext(1, base=["x"], fields=["u"]), u * u1)

    raw, contact = jv.cartan_form(jv.JetContext(1, base=["x"], fields=["u"]), "1/2*u_{1}^2")
    assert contact == "1/2*u_{1}^2 dx + u_{1} w^1", contact

    eta_ctx = jv.JetContext(1, n=2, m=1)
    null = jv.null_lagrangian_from_eta(eta_ctx, ["y*x2 | dx1", "y_{1}^2 | dx2"])
    assert jv.is_null_lagrangian(jv.JetContext(2, n=2, m=1), null)

    fv = jv.first_variation_check(
        jv.JetContext(1, base=["x"], fields=["u"]),
        "1/2*u_{1}^2 + u^3",
        ["x^2"],
        ["x^2*(1 - x)^2"],
    )
    assert fv["relative_error"] <= 1e-6, fv

    try:
        ctx.parse("u +")
    except jv.JetvarError as e:
        assert "syntax" in str(e).lower() or "expected" in str(e).lower(), e
    else:
        raise AssertionError("parse error not raised")

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
