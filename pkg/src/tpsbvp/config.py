"""INI run configuration: problem, initial iterates, solver and output settings.

Example::

    [problem]
    alpha = 1
    delta = 3
    eta = 1/7
    f = "(alpha*(exp(y)-1)-x)/4"
    m = "exp(1)*alpha/4"
    fy_sign = pos

    [order]
    upper = "-1"
    upper_d1 = "0"
    upper_d2 = "0"
    lower = "1"
    lower_d1 = "0"
    lower_d2 = "0"

    [solver]
    lambda = 0.75

Numeric fields accept constant expressions, which may use ``alpha``.
"""

from __future__ import annotations

import configparser
import io
import math
from dataclasses import dataclass, fields
from importlib import resources
from pathlib import Path
from typing import Optional

from .classify import admissible_lambda_window, classify_alpha, normalize_sign
from .errors import ConfigError, ExprEvalError, ExprSyntaxError, SbvpError, UnknownIdentifierError
from .expr import compile_field, compile_profile, evaluate, parse_expr, variables
from .model import DEFAULT_GRID_N, BoundaryFunction, ProblemSpec

ORDER_KEYS = ("upper", "upper_d1", "upper_d2", "lower", "lower_d1", "lower_d2")
BUNDLED = ("ex1", "ex2", "ex3", "ex4")


@dataclass(frozen=True)
class RunConfig:
    alpha: float
    delta: float
    eta: float
    f: str
    upper: str
    upper_d1: str
    upper_d2: str
    lower: str
    lower_d1: str
    lower_d2: str
    b: float = 0.0
    m: Optional[float] = None
    m_unique: Optional[float] = None
    fy_sign: Optional[str] = None
    name: str = ""
    lam: object = "auto"  # float or "auto"
    n: int = DEFAULT_GRID_N
    tol: float = 1e-8
    max_iter: int = 200
    solution: Optional[str] = None
    trace: Optional[str] = None

    def problem(self) -> ProblemSpec:
        a = self.alpha

        def prof(src):
            return compile_profile(parse_expr(src), a)

        return ProblemSpec(
            alpha=a,
            delta=self.delta,
            eta=self.eta,
            f=compile_field(parse_expr(self.f), a),
            upper0=BoundaryFunction(prof(self.upper), prof(self.upper_d1), prof(self.upper_d2)),
            lower0=BoundaryFunction(prof(self.lower), prof(self.lower_d1), prof(self.lower_d2)),
            f_y_bound=0.0 if self.m is None else self.m,
            b=self.b,
            uniqueness_bound=self.m_unique,
            name=self.name,
        )

    def resolve_lambda(self) -> float:
        """The configured lambda, or for "auto" the admissible-window endpoint nearest M."""
        if self.lam != "auto":
            return float(self.lam)
        sign = self.fy_sign
        _, regime, _ = classify_alpha(self.alpha, sign)
        w = admissible_lambda_window(self.alpha, self.delta, self.eta, self.m, regime, sign)
        if not w.nonempty:
            raise ConfigError(f"no admissible lambda for alpha={self.alpha}, M={self.m}")
        if normalize_sign(sign) == "positive" and regime.value == "ReverseOrdered":
            return w.lo
        return w.hi

    def dump(self) -> str:
        cp = configparser.ConfigParser(interpolation=None)
        prob = {"alpha": repr(self.alpha), "delta": repr(self.delta), "eta": repr(self.eta),
                "b": repr(self.b), "f": _quote(self.f)}
        if self.m is not None:
            prob["m"] = repr(self.m)
        if self.m_unique is not None:
            prob["m_unique"] = repr(self.m_unique)
        if self.fy_sign is not None:
            prob["fy_sign"] = self.fy_sign
        if self.name:
            prob["name"] = self.name
        cp["problem"] = prob
        cp["order"] = {k: _quote(getattr(self, k)) for k in ORDER_KEYS}
        cp["solver"] = {"lambda": self.lam if self.lam == "auto" else repr(float(self.lam)),
                        "n": str(self.n), "tol": repr(self.tol), "max_iter": str(self.max_iter)}
        out = {k: getattr(self, k) for k in ("solution", "trace") if getattr(self, k)}
        cp["output"] = out
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()


def _quote(s: str) -> str:
    return '"' + s + '"'


def _unquote(s: str) -> str:
    s = s.strip()
    if len(s) >= 2 and s[0] == s[-1] and s[0] in "\"'":
        return s[1:-1]
    return s


def _number(src: str, key: str, alpha=None) -> float:
    try:
        e = parse_expr(_unquote(src))
        allowed = {"alpha"} if alpha is not None else set()
        bad = variables(e) - allowed
        if bad:
            raise ConfigError(f"{key}: constant expression may not use {sorted(bad)}")
        v = float(evaluate(e, {"alpha": alpha} if alpha is not None else {}))
    except (ExprSyntaxError, UnknownIdentifierError, ExprEvalError) as exc:
        raise ConfigError(f"{key}: {exc}") from exc
    if not math.isfinite(v):
        raise ConfigError(f"{key}: value is not finite")
    return v


def _expression(src: str, key: str, allowed) -> str:
    text = _unquote(src)
    try:
        e = parse_expr(text)
    except (ExprSyntaxError, UnknownIdentifierError) as exc:
        raise ConfigError(f"{key}: {exc}") from exc
    bad = variables(e) - set(allowed)
    if bad:
        raise ConfigError(f"{key}: may not use {sorted(bad)}")
    return text


def loads(text: str) -> RunConfig:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",), comment_prefixes=("#", ";"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    if not cp.has_section("problem") or not cp.has_section("order"):
        raise ConfigError("config needs [problem] and [order] sections")
    pr = cp["problem"]
    for key in ("alpha", "delta", "eta", "f"):
        if key not in pr:
            raise ConfigError(f"[problem] is missing {key!r}")
    alpha = _number(pr["alpha"], "alpha")
    kw = {
        "alpha": alpha,
        "delta": _number(pr["delta"], "delta", alpha),
        "eta": _number(pr["eta"], "eta", alpha),
        "b": _number(pr.get("b", "0"), "b", alpha),
        "f": _expression(pr["f"], "f", ("x", "y", "alpha")),
        "name": _unquote(pr.get("name", "")),
    }
    if "m" in pr:
        kw["m"] = _number(pr["m"], "m", alpha)
    if "m_unique" in pr:
        kw["m_unique"] = _number(pr["m_unique"], "m_unique", alpha)
    if "fy_sign" in pr:
        try:
            kw["fy_sign"] = normalize_sign(_unquote(pr["fy_sign"]))
        except SbvpError as exc:
            raise ConfigError(f"fy_sign: {exc}") from exc
    od = cp["order"]
    for key in ORDER_KEYS:
        if key not in od:
            raise ConfigError(f"[order] is missing {key!r}")
        kw[key] = _expression(od[key], key, ("x", "alpha"))
    if cp.has_section("solver"):
        sv = cp["solver"]
        lam = _unquote(sv.get("lambda", "auto"))
        kw["lam"] = "auto" if lam.lower() == "auto" else _number(lam, "lambda", alpha)
        try:
            kw["n"] = int(sv.get("n", str(DEFAULT_GRID_N)))
            kw["max_iter"] = int(sv.get("max_iter", "200"))
        except ValueError as exc:
            raise ConfigError(f"[solver]: {exc}") from exc
        kw["tol"] = _number(sv.get("tol", "1e-8"), "tol")
    if cp.has_section("output"):
        for key in ("solution", "trace"):
            if key in cp["output"]:
                kw[key] = _unquote(cp["output"][key])
    if kw.get("lam", "auto") == "auto":
        if "m" not in kw:
            raise ConfigError('lambda = "auto" needs m in [problem]')
        if "fy_sign" not in kw:
            raise ConfigError('lambda = "auto" needs fy_sign in [problem]')
    cfg = RunConfig(**kw)
    try:
        cfg.problem()
    except SbvpError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg


def load(path) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    return loads(text)


def bundled_text(name: str) -> str:
    if name not in BUNDLED:
        raise ConfigError(f"unknown bundled example {name!r}")
    return resources.files("tpsbvp").joinpath("data", f"{name}.cfg").read_text(encoding="utf-8")


def bundled(name: str) -> RunConfig:
    return loads(bundled_text(name))


def same_config(a: RunConfig, b: RunConfig) -> bool:
    """Field-wise equality with expressions compared as parsed trees."""
    for fdef in fields(RunConfig):
        x, y = getattr(a, fdef.name), getattr(b, fdef.name)
        if fdef.name in ("f",) + ORDER_KEYS:
            if parse_expr(x) != parse_expr(y):
                return False
        elif x != y:
            return False
    return True
