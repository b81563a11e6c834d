"""Experiment configuration: key=value files, flag overrides and parameter guards."""
from dataclasses import asdict, dataclass, field, fields

from ..discretization import CENTRAL4, STENCILS
from ..integrators import TABLEAUX
from ..stability import UnstablePairingError, select_parameters
from ..velocity_space import KINDS, build_quadrature
from .problems import DEFAULT_QUADRATURE, LINEAR, PROBLEMS, SEMICONDUCTOR

BRUTE_FORCE = "brute"
LIMIT = "limit"
EXACT = "exact"
NO_REFERENCE = "none"
REFERENCE_MODES = (BRUTE_FORCE, LIMIT, EXACT, NO_REFERENCE)

# the initial temperature used by each problem when none is given
DEFAULT_T = {LINEAR: 1.0, "burgers": 1.0, SEMICONDUCTOR: 1e-2}


class ValidationError(ValueError):
    """A configuration that is inconsistent or outside the guaranteed-stable range."""


def _parse_list(text):
    if isinstance(text, (list, tuple)):
        return [int(v) for v in text]
    return [int(v) for v in str(text).replace(";", ",").split(",") if v.strip()]


def _parse_bool(text):
    if isinstance(text, bool):
        return text
    s = str(text).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ValidationError(f"not a boolean: {text!r}")


def _optional(kind):
    def parse(text):
        if text is None or str(text).strip().lower() in ("", "none", "auto"):
            return None
        return kind(text)
    return parse


@dataclass
class ExperimentConfig:
    problem: str = LINEAR
    eps: float = 1e-3
    gamma: int = 1
    dx: float = 0.1
    dt: float = 1e-3
    k_inner: int = None
    delta_t: float = None
    J: int = 20
    quadrature: str = None
    stencil: str = CENTRAL4
    tableau: str = "rk4"
    steps: int = 1000
    T: float = None
    reference: str = NO_REFERENCE
    dt_ref: float = None
    snapshots: list = field(default_factory=list)
    phi_left: float = -2.0
    phi_right: float = 0.0
    out: str = "out"
    force: bool = False

    def __post_init__(self):
        if self.quadrature is None:
            self.quadrature = DEFAULT_QUADRATURE.get(self.problem, "legendre")
        if self.T is None:
            self.T = DEFAULT_T.get(self.problem, 1.0)
        if self.delta_t is None:
            self.delta_t = self.eps ** (self.gamma + 1)
        if not self.snapshots:
            self.snapshots = [self.steps]

    def resolved_dt_ref(self):
        if self.dt_ref is not None:
            return self.dt_ref
        return self.eps ** (self.gamma + 2)

    def as_dict(self):
        return asdict(self)


_PARSERS = {
    "problem": str, "eps": float, "gamma": int, "dx": float, "dt": float,
    "k_inner": _optional(int), "delta_t": _optional(float), "J": int,
    "quadrature": _optional(str), "stencil": str, "tableau": str, "steps": int,
    "T": _optional(float), "reference": str, "dt_ref": _optional(float),
    "snapshots": _parse_list, "phi_left": float, "phi_right": float,
    "out": str, "force": _parse_bool,
}
_ALIASES = {"epsilon": "eps", "k": "k_inner", "K": "k_inner", "n_outer": "steps",
            "T_init": "T", "Delta_t": "dt", "j": "J"}


def parse_items(items):
    """Map raw (key, text) pairs to typed config fields."""
    known = {f.name for f in fields(ExperimentConfig)}
    values = {}
    for key, text in items:
        key = _ALIASES.get(key, key).replace("-", "_")
        if key not in known:
            raise ValidationError(f"unknown configuration key {key!r}")
        try:
            values[key] = _PARSERS[key](text)
        except (TypeError, ValueError) as err:
            raise ValidationError(f"bad value for {key}: {text!r} ({err})") from err
    return values


def read_config_file(path):
    """Parse a flat key=value file; '#' starts a comment."""
    items = []
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as err:
        raise OSError(f"cannot read {path}: {err.strerror}") from err
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"{path}:{lineno}: expected key=value")
        key, text = line.split("=", 1)
        items.append((key.strip(), text.strip()))
    return parse_items(items)


def build_config(file_values=None, overrides=None):
    """File values first, then flag overrides; derived defaults fill the rest."""
    merged = dict(file_values or {})
    merged.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return ExperimentConfig(**merged)


def check_basic(cfg: ExperimentConfig):
    if cfg.problem not in PROBLEMS:
        raise ValidationError(f"problem must be one of {PROBLEMS}, got {cfg.problem!r}")
    if cfg.gamma not in (0, 1):
        raise ValidationError("gamma must be 0 or 1")
    if not 0 < cfg.eps <= 1:
        raise ValidationError("eps must lie in (0, 1]")
    if cfg.quadrature not in KINDS:
        raise ValidationError(f"quadrature must be one of {KINDS}")
    if cfg.stencil not in STENCILS:
        raise ValidationError(f"stencil must be one of {STENCILS}")
    if cfg.tableau not in TABLEAUX:
        raise ValidationError(f"tableau must be one of {sorted(TABLEAUX)}")
    if cfg.reference not in REFERENCE_MODES:
        raise ValidationError(f"reference must be one of {REFERENCE_MODES}")
    if cfg.steps < 1 or any(n < 0 or n > cfg.steps for n in cfg.snapshots):
        raise ValidationError("snapshots must lie in 0..steps and steps must be positive")
    if cfg.dt <= 0 or cfg.delta_t <= 0 or cfg.dx <= 0:
        raise ValidationError("dx, dt and delta_t must be positive")
    if cfg.k_inner is not None and cfg.k_inner < 0:
        raise ValidationError("k_inner must be non-negative")
    if cfg.reference == LIMIT and cfg.gamma != 1:
        raise ValidationError("the limit comparison needs the diffusive scaling gamma=1")
    if cfg.reference == LIMIT and cfg.problem == SEMICONDUCTOR:
        raise ValidationError("the limit comparison is available for the flux problems only")
    if cfg.reference == EXACT and cfg.problem != LINEAR:
        raise ValidationError("the exact reference exists only for the linear problem")


def validate(cfg: ExperimentConfig):
    """Check the configuration and fill in K when it was left open.

    Returns the ParameterSelection (or None when the selector refused and
    ``force`` was set) plus a list of notes.  Outer steps above the bound,
    too few inner steps or an inner step other than eps^(gamma+1) are refused
    unless ``force`` is set.
    """
    check_basic(cfg)
    notes = []
    sel = None
    try:
        q = build_quadrature(cfg.quadrature, cfg.J)
        sel = select_parameters(cfg.eps, cfg.gamma, cfg.dx, cfg.stencil, q)
    except UnstablePairingError as err:
        if not cfg.force:
            raise ValidationError(str(err)) from err
        notes.append(f"forced past selector refusal: {err}")
    if sel is not None:
        notes.extend(sel.warnings)
        if cfg.k_inner is None:
            if sel.K_min is None:
                if not cfg.force:
                    raise ValidationError("no K keeps the fast modes damped; pass k_inner with --force")
            else:
                cfg.k_inner = sel.K_min
                notes.append(f"k_inner set to K_min = {sel.K_min}")
        problems = []
        if cfg.dt > sel.Delta_t_max:
            problems.append(f"dt = {cfg.dt:g} exceeds Delta_t_max = {sel.Delta_t_max:.6g}")
        if sel.K_min is not None and cfg.k_inner is not None and cfg.k_inner < sel.K_min:
            problems.append(f"k_inner = {cfg.k_inner} is below K_min = {sel.K_min}")
        if abs(cfg.delta_t - sel.delta_t) > 1e-12 * sel.delta_t:
            problems.append(f"delta_t = {cfg.delta_t:g} differs from eps^(gamma+1) = {sel.delta_t:g}")
        if problems:
            if not cfg.force:
                raise ValidationError("; ".join(problems) + " (use --force to run anyway)")
            notes.extend("forced: " + p for p in problems)
    if cfg.k_inner is None:
        raise ValidationError("k_inner could not be determined; set it explicitly")
    if cfg.dt < (cfg.k_inner + 1) * cfg.delta_t * (1 - 1e-12):
        raise ValidationError("dt must be at least (k_inner + 1) * delta_t")
    return sel, notes
