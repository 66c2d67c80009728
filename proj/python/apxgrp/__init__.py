"""Set algebra and refinement certificates for approximate subgroups.

The C++ core does all the work; this package adds JSON conveniences on top of
the raw bindings.
"""

import json as _json

from ._core import (  # noqa: F401
    ApxgrpError,
    Instance,
    approx_constant,
    chain,
    generated,
    inverse_set,
    make_certificate,
    measure,
    normalize,
    oracle_exact_f,
    oracle_min_cover,
    power,
    product_set,
    ruzsa_cover,
    sanders,
    sym_diff,
    translate,
    verify_certificate,
    verify_certificate_file,
)


def instance(spec):
    """Materialize an instance from a dict or JSON string."""
    if isinstance(spec, dict):
        spec = _json.dumps(spec)
    return Instance(spec)


def sanders_cert(inst, m, **kwargs):
    """Run the refinement and return the certificate payload as a dict."""
    return _json.loads(sanders(inst, m, **kwargs))


def normalize_cert(inst, r, **kwargs):
    return _json.loads(normalize(inst, r, **kwargs))


def chain_report(inst, mode="plain", steps=16, **kwargs):
    return _json.loads(chain(inst, mode, steps, **kwargs))
