"""Figure descriptions shipped as data files.

A FigureSpec says how one figure is laid out: which metric to pull from
the CSV rows, the plot kind, and the axis text.  Contour specs addition-
ally name the two parameters that the series labels encode, since the
harness flattens a parameter grid into labels like
``EV tau_g=0.01 gamma_tj_db=30``.
"""

import re
from dataclasses import dataclass
from importlib import resources

import yaml

KINDS = ("line-logy", "line-linear", "contour-log10")


class SpecError(ValueError):
    """A figure spec file or lookup is invalid."""


@dataclass(frozen=True)
class FigureSpec:
    id: str
    kind: str
    metric: str
    x_label: str
    y_label: str
    title: str = ""
    overlay_metric: str = ""
    panel_param: str = ""
    y_param: str = ""
    value_label: str = ""

    def __post_init__(self):
        if not re.fullmatch(r"[a-z0-9][a-z0-9-]*", self.id):
            raise SpecError(f"spec id {self.id!r} must be lowercase kebab case")
        if self.kind not in KINDS:
            raise SpecError(f"spec {self.id}: kind {self.kind!r} not one of {KINDS}")
        if not self.metric:
            raise SpecError(f"spec {self.id}: metric is required")
        if self.kind == "contour-log10":
            if not (self.panel_param and self.y_param):
                raise SpecError(
                    f"spec {self.id}: contour needs panel_param and y_param"
                )
            if self.overlay_metric:
                raise SpecError(f"spec {self.id}: contours cannot overlay")
        elif self.panel_param or self.y_param:
            raise SpecError(f"spec {self.id}: panel/y params are contour-only")


def _load_file(text: str, name: str) -> FigureSpec:
    data = yaml.safe_load(text)
    if not isinstance(data, dict):
        raise SpecError(f"{name}: expected a mapping")
    try:
        return FigureSpec(**data)
    except TypeError as exc:
        raise SpecError(f"{name}: {exc}") from exc


def load_specs() -> dict:
    """All bundled figure specs keyed by id."""
    specs = {}
    root = resources.files("cajplot").joinpath("figspecs")
    for entry in sorted(root.iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".yaml"):
            spec = _load_file(entry.read_text(encoding="utf-8"), entry.name)
            if spec.id in specs:
                raise SpecError(f"duplicate spec id {spec.id}")
            specs[spec.id] = spec
    return specs


def find_spec(figure_id: str) -> FigureSpec:
    """Exact id match, or a unique prefix like ``fig3`` for ``fig3-msad``."""
    specs = load_specs()
    if figure_id in specs:
        return specs[figure_id]
    matches = [s for key, s in specs.items() if key.startswith(figure_id + "-")]
    if len(matches) == 1:
        return matches[0]
    raise SpecError(
        f"no figure spec {figure_id!r}; available: {', '.join(sorted(specs))}"
    )
