"""JSON Schemas for the ``--format json`` output of each subcommand."""

_num = {"type": "number"}
_int = {"type": "integer"}
_str = {"type": "string"}
_bool = {"type": "boolean"}
_elem = {"type": "string", "pattern": r"^-?\d+,-?\d+$"}


def _obj(props: dict, required: list[str] | None = None, extra: bool = True) -> dict:
    return {
        "type": "object",
        "properties": props,
        "required": list(props) if required is None else required,
        "additionalProperties": extra,
    }


_META = _obj(
    {
        "program": {"const": "heegner-gaps"},
        "version": _str,
        "command": _str,
        "d": _int,
        "basis": {"type": "array", "items": _str, "minItems": 2, "maxItems": 2},
    },
    required=["program", "version", "command"],
    extra=False,
)

_DATA = {
    "field-info": _obj(
        {
            "d": _int,
            "disc": _int,
            "omega": _str,
            "omega_min_poly": _str,
            "w_K": _int,
            "m_K": _str,
            "h_K": _int,
            "R_K": _str,
            "r1": _int,
            "r2": _int,
            "c_K": _obj({"exact": _str, "value": _num}),
        }
    ),
    "sieve": _obj(
        {
            "N": _str,
            "shell": {"enum": ["full", "dyadic"]},
            "total": _int,
            "primes": _int,
            "g2": _int,
            "beta_ones": _int,
            "bands": {
                "type": "array",
                "items": _obj({"band": _int, "total": _int, "primes": _int, "g2": _int, "beta_ones": _int}),
            },
        }
    ),
    "classify": _obj(
        {
            "element": _elem,
            "norm": _int,
            "class": {"enum": ["zero", "unit", "prime", "G2", "composite"]},
            "big_omega": {"type": ["integer", "null"]},
            "unit": _elem,
            "factors": {"type": "array", "items": _obj({"prime": _elem, "exponent": _int, "norm": _int})},
        },
        required=["element", "norm", "class", "big_omega"],
    ),
    "gaps": _obj(
        {
            "Nmax": _str,
            "tuple": {"type": "array", "items": _elem},
            "count": _int,
            "pairs": {
                "type": "array",
                "items": _obj(
                    {
                        "alpha1": _elem,
                        "alpha2": _elem,
                        "diff": _elem,
                        "norms1": {"type": "array", "items": _int},
                        "norms2": {"type": "array", "items": _int},
                        "inert": _bool,
                        "identity_holds": {"type": ["boolean", "null"]},
                        "decomposition": {"type": "object"},
                    }
                ),
            },
        }
    ),
    "admissible": _obj(
        {
            "tuple": {"type": "array", "items": _elem},
            "admissible": _bool,
            "witness": {"oneOf": [{"type": "null"}, _obj({"generator": _elem, "norm": _int})]},
            "admissible_in_Z": _bool,
            "D0": _int,
            "modulus": _elem,
            "v0": {"oneOf": [{"type": "null"}, _elem]},
        },
        required=["tuple", "admissible", "witness", "D0", "modulus", "v0"],
    ),
    "functional": _obj(
        {
            "I1": _obj({"exact": _str, "value": _num}),
            "I2": {"type": "array", "items": _obj({"m": _int, "rational": _str, "closed_form": _str, "value": _num})},
            "I3": {"type": "array", "items": _obj({"m": _int, "closed_form": _str, "value": _num})},
            "Itilde": _num,
            "positive": _bool,
            "params": {"type": "object"},
            "F": _str,
        }
    ),
    "weights": _obj(
        {
            "R": _str,
            "support_size": _int,
            "inversion_discrepancy": _num,
            "lambda_max": _num,
            "y_max": _num,
            "growth": {"type": ["number", "null"]},
            "N": _str,
            "S1": _num,
            "S2": _num,
            "n_alpha": _int,
            "v0": _elem,
        },
        required=["R", "support_size", "inversion_discrepancy", "lambda_max", "y_max", "growth"],
    ),
    "equidist": _obj(
        {
            "N": _str,
            "Q": _int,
            "which": {"enum": ["primes", "beta"]},
            "sample_M": {"type": "array", "items": _str},
            "total_max_eps": _num,
            "total_eps_star": _num,
            "partition_ok": _bool,
            "rows": {
                "type": "array",
                "items": _obj(
                    {
                        "norm": _int,
                        "generator": _elem,
                        "phi": _int,
                        "max_eps": _num,
                        "eps_star": _num,
                        "main": _num,
                        "total": _int,
                        "partition_ok": _bool,
                    }
                ),
            },
        }
    ),
}

SCHEMAS = {
    name: {
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "type": "object",
        "properties": {"meta": _META, "data": data},
        "required": ["meta", "data"],
        "additionalProperties": False,
    }
    for name, data in _DATA.items()
}
