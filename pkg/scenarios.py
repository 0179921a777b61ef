import logging
import math
from enum import Enum
from pathlib import Path
from typing import Dict, List, NamedTuple, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, ValidationError, model_validator

import config as settings
from junction import (
    BoundaryTag,
    ExtendedLength,
    InvalidParameter,
    JunctionParams,
    classify_junction,
    junction_from_angles,
    junction_from_lengths,
)
from resonance import (
    NotApplicable,
    RelationTag,
    ResonanceError,
    ResonanceRoot,
    SingularPeak,
    analyze_resonances,
    delta_potential_case,
    peak_width,
    relation_memberships,
    resonance_residual_grid,
    resonance_roots_case_i,
    tan_condition_curves,
)
from scattering_double import DoubleConfig, double_transmission_grid
from scattering_single import perfect_transmission_wavenumber, single_transmission_grid, t1

logger = logging.getLogger(__name__)

# |cos ka| or |1 − k²L⁺L⁻| below this marks a pole in the curve data
POLE_GAP = 1e-2


class ScenarioError(Exception):
    """Custom exception for scenario handling errors"""
    pass


class ParseError(ScenarioError):
    """A scenario document could not be parsed; line and column are 1-based, 0 for the whole document"""
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(str(self))

    def __str__(self) -> str:
        if self.line:
            return f"line {self.line}, column {self.column}: {self.message}"
        return self.message


class NumericFailure(ScenarioError):
    """A numeric evaluation failed; k is the offending wavenumber when known"""
    def __init__(self, message: str, k: Optional[float] = None):
        self.k = k
        super().__init__(message if k is None else f"{message} (k={k!r})")


class ScanMode(str, Enum):
    SINGLE = "single"
    DOUBLE = "double"


class OutputKind(str, Enum):
    CSV = "csv"
    PLOTSCRIPT = "plotscript"
    REPORT = "report"


class Scenario(BaseModel):
    model_config = ConfigDict(frozen=True)

    mode: ScanMode
    junctions: List[JunctionParams]
    a: Optional[float] = None
    k_min: float = settings.DEFAULT_K_MIN
    k_max: float = settings.DEFAULT_K_MAX
    samples: int = settings.DEFAULT_SAMPLES
    outputs: List[OutputKind] = [OutputKind.CSV, OutputKind.PLOTSCRIPT]
    residuals: bool = False

    @model_validator(mode="after")
    def _check_consistency(self):
        if not (math.isfinite(self.k_min) and math.isfinite(self.k_max)):
            raise ValueError("k range must be finite")
        if self.k_min <= 0.0:
            raise ValueError(f"k_min must be positive, got {self.k_min}")
        if self.k_min >= self.k_max:
            raise ValueError(f"k_min ({self.k_min}) must be below k_max ({self.k_max})")
        if self.samples < 2:
            raise ValueError(f"samples must be at least 2, got {self.samples}")
        if self.mode == ScanMode.DOUBLE:
            if len(self.junctions) != 2:
                raise ValueError("double mode needs two junctions")
            if self.a is None or not math.isfinite(self.a) or self.a <= 0.0:
                raise ValueError("double mode needs a positive separation a")
        elif len(self.junctions) != 1:
            raise ValueError("single mode takes exactly one junction")
        return self

    @property
    def double_config(self) -> DoubleConfig:
        if self.mode != ScanMode.DOUBLE:
            raise ScenarioError("Scenario is not a double-junction scenario")
        return DoubleConfig(j1=self.junctions[0], j2=self.junctions[1], a=self.a)

    def metadata(self) -> List[Tuple[str, str]]:
        """Scenario echo for output headers, in a fixed order."""
        entries = [("tool_version", settings.TOOL_VERSION), ("mode", self.mode.value)]
        for index, junction in enumerate(self.junctions, start=1):
            entries.append((f"L{index}_plus", str(junction.l_plus)))
            entries.append((f"L{index}_minus", str(junction.l_minus)))
        if self.a is not None:
            entries.append(("a", repr(self.a)))
        entries += [("k_min", repr(self.k_min)), ("k_max", repr(self.k_max)), ("samples", str(self.samples))]
        return entries


class ScanTable(BaseModel):
    model_config = ConfigDict(frozen=True)

    metadata: List[Tuple[str, str]] = []
    columns: List[str]
    rows: List[List[float]]

    def column(self, name: str) -> np.ndarray:
        index = self.columns.index(name)
        return np.array([row[index] for row in self.rows], dtype=float)


_GLOBAL_KEYS = {"mode", "L0", "a", "k_min", "k_max", "samples", "outputs", "residuals"}
_JUNCTION_KEYS = {
    f"{prefix}{index}_{channel}"
    for prefix in ("L", "theta")
    for index in (1, 2)
    for channel in ("plus", "minus")
}
_TRUE_TOKENS = {"true", "yes", "on", "1"}
_FALSE_TOKENS = {"false", "no", "off", "0"}


def _strip_quotes(value: str) -> str:
    if len(value) >= 2 and value[0] == value[-1] and value[0] in ("'", '"'):
        return value[1:-1].strip()
    return value


class _Entry(NamedTuple):
    value: str
    line: int
    column: int
    key_column: int


def _tokenize(text: str) -> Dict[str, _Entry]:
    entries: Dict[str, _Entry] = {}
    for line_number, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0]
        if not content.strip():
            continue
        if "=" not in content:
            column = len(content) - len(content.lstrip()) + 1
            raise ParseError("expected 'key = value'", line_number, column)

        key_part, value_part = content.split("=", 1)
        key = key_part.strip()
        key_column = len(key_part) - len(key_part.lstrip()) + 1
        if key not in _GLOBAL_KEYS and key not in _JUNCTION_KEYS:
            raise ParseError(f"unknown key {key!r}", line_number, key_column)
        if key in entries:
            raise ParseError(f"duplicate key {key!r}", line_number, key_column)

        value_column = len(key_part) + 2 + len(value_part) - len(value_part.lstrip())
        value = _strip_quotes(value_part.strip())
        if not value:
            raise ParseError(f"missing value for {key!r}", line_number, value_column)
        entries[key] = _Entry(value, line_number, value_column, key_column)
    return entries


def _number(entries, key: str, cast=float):
    value, line, column, _ = entries[key]
    try:
        number = cast(value)
    except ValueError:
        raise ParseError(f"{key} must be numeric, got {value!r}", line, column)
    if isinstance(number, float) and not math.isfinite(number):
        raise ParseError(f"{key} must be finite, got {value!r}", line, column)
    return number


def _length(entries, key: str) -> ExtendedLength:
    entry = entries[key]
    try:
        return ExtendedLength.from_value(entry.value)
    except InvalidParameter as e:
        raise ParseError(str(e), entry.line, entry.column)


def _build_junction(entries, index: int, l0: float) -> Optional[JunctionParams]:
    length_keys = (f"L{index}_plus", f"L{index}_minus")
    angle_keys = (f"theta{index}_plus", f"theta{index}_minus")
    lengths = [key for key in length_keys if key in entries]
    angles = [key for key in angle_keys if key in entries]

    if lengths and angles:
        # the conflict starts at the first key of whichever form appears second
        first_length = min(lengths, key=lambda k: entries[k].line)
        first_angle = min(angles, key=lambda k: entries[k].line)
        entry = max(entries[first_length], entries[first_angle], key=lambda e: e.line)
        raise ParseError(f"junction {index} mixes length and angle keys", entry.line, entry.key_column)
    present = lengths or angles
    if not present:
        return None

    keys = length_keys if lengths else angle_keys
    missing = [key for key in keys if key not in entries]
    if missing:
        entry = entries[present[0]]
        raise ParseError(f"junction {index} is missing {missing[0]}", entry.line, entry.key_column)

    if lengths:
        plus, minus = _length(entries, keys[0]), _length(entries, keys[1])
        return junction_from_lengths(plus, minus, l0)

    theta_plus, theta_minus = _number(entries, keys[0]), _number(entries, keys[1])
    try:
        return junction_from_angles(theta_plus, theta_minus, l0)
    except InvalidParameter as e:
        entry = entries[keys[0]]
        raise ParseError(str(e), entry.line, entry.column)


def parse_scenario(text: str, overrides: Optional[Dict[str, Union[float, int]]] = None) -> Scenario:
    """
    Parse a scenario document into a validated Scenario.

    The document is UTF-8 `key = value` lines with `#` comments. Each junction
    is given either by its lengths (L1_plus, L1_minus, ...) or by its angles
    (theta1_plus, ...), never both; length values accept the token "inf".
    `overrides` (k_max, samples, k_min) replace document values, the way CLI
    flags do.

    Example:
        mode = double
        L1_plus = 2
        L1_minus = -1
        L2_plus = -2
        L2_minus = 1
        a = 1

    Raises:
        ParseError: Unknown, duplicate or conflicting keys, non-numeric values,
                    or a scenario that fails validation.
    """

    entries = _tokenize(text)

    l0 = _number(entries, "L0") if "L0" in entries else 1.0
    if l0 <= 0.0:
        _, line, column, _ = entries["L0"]
        raise ParseError("L0 must be positive", line, column)

    first = _build_junction(entries, 1, l0)
    second = _build_junction(entries, 2, l0)
    if first is None:
        if second is not None:
            key = min((k for k in entries if k.endswith(("_plus", "_minus"))), key=lambda k: entries[k][1])
            _, line, column, _ = entries[key]
            raise ParseError("junction 2 given without junction 1", line, column)
        raise ParseError("scenario defines no junction")

    fields: Dict[str, object] = {}
    if "mode" in entries:
        value, line, column, _ = entries["mode"]
        try:
            fields["mode"] = ScanMode(value.lower())
        except ValueError:
            raise ParseError(f"mode must be 'single' or 'double', got {value!r}", line, column)
    else:
        fields["mode"] = ScanMode.DOUBLE if second is not None else ScanMode.SINGLE

    fields["junctions"] = [first] if fields["mode"] == ScanMode.SINGLE else [j for j in (first, second) if j]
    if fields["mode"] == ScanMode.SINGLE and second is not None:
        logger.warning("Junction 2 ignored in single mode")

    for key in ("a", "k_min", "k_max"):
        if key in entries:
            fields[key] = _number(entries, key)
    if "samples" in entries:
        fields["samples"] = _number(entries, "samples", int)

    if "outputs" in entries:
        value, line, column, _ = entries["outputs"]
        try:
            fields["outputs"] = sorted({OutputKind(token.strip().lower()) for token in value.split(",") if token.strip()},
                                       key=lambda kind: kind.value)
        except ValueError:
            raise ParseError(f"outputs must be drawn from csv, plotscript, report; got {value!r}", line, column)

    if "residuals" in entries:
        value, line, column, _ = entries["residuals"]
        token = value.lower()
        if token not in _TRUE_TOKENS | _FALSE_TOKENS:
            raise ParseError(f"residuals must be true or false, got {value!r}", line, column)
        fields["residuals"] = token in _TRUE_TOKENS

    for key, value in (overrides or {}).items():
        if value is not None:
            fields[key] = value

    try:
        scenario = Scenario(**fields)
    except ValidationError as e:
        message = "; ".join(error["msg"] for error in e.errors())
        raise ParseError(message)

    logger.debug(f"Parsed {scenario.mode.value} scenario with {len(entries)} keys")
    return scenario


def run_scan(scenario: Scenario) -> ScanTable:
    """
    Sample T1 (single mode) or T2 (double mode) uniformly on [k_min, k_max].

    With `residuals` set on a finite double scenario the normalised M-matrix
    residuals r1 and r2 are added as columns.

    Raises:
        NumericFailure: A non-finite value, annotated with the first bad k.
    """

    ks = np.linspace(scenario.k_min, scenario.k_max, scenario.samples)

    try:
        if scenario.mode == ScanMode.SINGLE:
            columns = ["k", "T"]
            data = [ks, single_transmission_grid(scenario.junctions[0], ks)]
        else:
            config = scenario.double_config
            columns = ["k", "T"]
            data = [ks, double_transmission_grid(config, ks)]
            if scenario.residuals:
                if config.is_finite:
                    r1, r2 = resonance_residual_grid(config, ks)
                    columns += ["r1", "r2"]
                    data += [r1, r2]
                else:
                    logger.warning("Residual columns skipped: infinite lengths")
    except InvalidParameter as e:
        raise NumericFailure(str(e))

    stacked = np.column_stack(data)
    bad = ~np.all(np.isfinite(stacked), axis=1)
    if np.any(bad):
        raise NumericFailure("Non-finite transmission", k=float(ks[np.argmax(bad)]))

    # rounding can push T a few ulps outside [0, 1]
    stacked[:, 1] = np.clip(stacked[:, 1], 0.0, 1.0)

    logger.info(f"Scanned {scenario.samples} points on [{scenario.k_min}, {scenario.k_max}]")
    return ScanTable(metadata=scenario.metadata(), columns=columns, rows=stacked.tolist())


def format_scan_csv(table: ScanTable) -> str:
    lines = [f"# {key}: {value}" for key, value in table.metadata]
    lines.append(",".join(table.columns))
    for row in table.rows:
        lines.append(",".join(repr(float(value)) for value in row))
    return "\n".join(lines) + "\n"


def write_scan_csv(table: ScanTable, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(format_scan_csv(table))
    logger.info(f"Wrote {len(table.rows)} rows to {path}")
    return path


def read_scan_csv(path: Union[str, Path]) -> ScanTable:
    """Inverse of write_scan_csv: metadata comments, header, float rows."""
    metadata: List[Tuple[str, str]] = []
    columns: Optional[List[str]] = None
    rows: List[List[float]] = []

    with open(path, "r", encoding="utf-8") as f:
        for line_number, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition(": ")
                metadata.append((key, value))
            elif columns is None:
                columns = line.split(",")
            else:
                try:
                    rows.append([float(field) for field in line.split(",")])
                except ValueError:
                    raise ParseError("non-numeric CSV field", line_number, 1)

    if columns is None:
        raise ParseError(f"{path} has no header line")
    return ScanTable(metadata=metadata, columns=columns, rows=rows)


def write_roots_csv(roots: List[ResonanceRoot], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = ["k,kind,residual,tangent"]
    lines += [f"{root.k!r},{root.kind.value},{root.residual!r},{int(root.tangent)}" for root in roots]
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("\n".join(lines) + "\n")
    logger.info(f"Wrote {len(roots)} roots to {path}")
    return path


def write_plot_script(path: Union[str, Path], table: ScanTable, csv_name: str, title: str,
                      ylabel: str = "T", yrange: Optional[Tuple[float, float]] = None) -> Path:
    """
    Emit a gnuplot script plotting every non-k column of `table` against k.

    The CSV is referenced by its relative name; the metadata and header
    lines are skipped by count.
    """
    path = Path(path)
    skip = len(table.metadata) + 1
    lines = [
        f"# generated by resonance-transmission {settings.TOOL_VERSION}",
        'set datafile separator ","',
        f'set title "{title}"',
        'set xlabel "k"',
        f'set ylabel "{ylabel}"',
        "set key top right",
    ]
    if yrange is not None:
        lines.append(f"set yrange [{yrange[0]!r}:{yrange[1]!r}]")

    curves = []
    for index, name in enumerate(table.columns[1:], start=2):
        source = f'"{csv_name}" skip {skip}' if not curves else '""'
        style = "lines" if index == 2 else f"lines dashtype {index}"
        curves.append(f'{source} using 1:{index} with {style} title "{name}"')
    lines.append("plot " + ", \\\n     ".join(curves))

    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("\n".join(lines) + "\n")
    return path


class Preset(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    kind: str  # "tan": tan ka vs f(k); "scan": T2 and T1 curves
    description: str
    a: float = 1.0
    j1: Tuple[float, float]
    j2: Optional[Tuple[float, float]] = None
    k_min: float = 1e-3
    k_max: float = 10.0
    samples: int = 2000


PRESETS: Dict[str, Preset] = {
    preset.name: preset
    for preset in (
        Preset(name="fig3", kind="tan", j1=(1.0, 0.5), description="tan ka = f(k), L+ = 1, L- = 0.5"),
        Preset(name="fig4", kind="tan", j1=(-1.0, -0.5), description="tan ka = f(k), L+ = -1, L- = -0.5"),
        Preset(name="fig5", kind="tan", j1=(5.0, -0.5), description="tan ka = f(k), L+ = 5, L- = -0.5"),
        Preset(name="fig6", kind="tan", j1=(-5.0, 0.5), description="tan ka = f(k), L+ = -5, L- = 0.5"),
        Preset(name="fig7", kind="scan", j1=(1.0, 0.5), j2=(1.0, 0.5),
               description="T2 for L1 = L2 = (1, 0.5), with the single barrier"),
        Preset(name="fig8", kind="scan", j1=(2.0, -1.0), j2=(-2.0, 1.0),
               description="T2 for L1 = (2, -1), L2 = (-2, 1), with the single barrier"),
    )
}


def _pole_masked(values: np.ndarray, gap: np.ndarray) -> np.ndarray:
    return np.where(np.abs(gap) < POLE_GAP, np.nan, values)


def run_preset(name: str, out_dir: Union[str, Path, None] = None) -> List[Path]:
    """
    Regenerate the data behind one of the reference figures.

    Writes <name>_curves.csv, <name>_roots.csv and <name>.gp into out_dir.
    The "tan" presets tabulate both sides of tan ka = f(k) (NaN next to the
    poles so plotted branches stay separate) and list the case (i) roots; the
    "scan" presets tabulate T2 and T1 and list the perfect-transmission roots
    of the pair.

    Returns:
        List[Path]: The three files written, in that order.

    Raises:
        ScenarioError: Unknown preset name.
    """

    if name not in PRESETS:
        raise ScenarioError(f"Unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    preset = PRESETS[name]
    out_dir = Path(out_dir if out_dir is not None else settings.OUTPUT_DIR)
    out_dir.mkdir(parents=True, exist_ok=True)

    j1 = junction_from_lengths(*preset.j1)
    ks = np.linspace(preset.k_min, preset.k_max, preset.samples)
    metadata = [("tool_version", settings.TOOL_VERSION), ("preset", preset.name),
                ("description", preset.description), ("a", repr(preset.a)),
                ("L1_plus", str(j1.l_plus)), ("L1_minus", str(j1.l_minus))]

    if preset.kind == "tan":
        tan_ka, f_k = tan_condition_curves(j1, preset.a, ks)
        product = j1.l_plus.value * j1.l_minus.value
        tan_ka = _pole_masked(tan_ka, np.cos(ks * preset.a))
        f_k = _pole_masked(f_k, 1.0 - ks ** 2 * product)
        table = ScanTable(metadata=metadata, columns=["k", "tan_ka", "f_k"],
                          rows=np.column_stack([ks, tan_ka, f_k]).tolist())
        roots = resonance_roots_case_i(j1, preset.a, preset.k_max)
        ylabel, yrange = "tan ka, f(k)", (-10.0, 10.0)
    else:
        j2 = junction_from_lengths(*preset.j2)
        config = DoubleConfig(j1=j1, j2=j2, a=preset.a)
        metadata += [("L2_plus", str(j2.l_plus)), ("L2_minus", str(j2.l_minus))]
        table = ScanTable(metadata=metadata, columns=["k", "T2", "T1"],
                          rows=np.column_stack([ks, double_transmission_grid(config, ks),
                                                single_transmission_grid(j1, ks)]).tolist())
        roots = analyze_resonances(config, preset.k_max).roots
        ylabel, yrange = "T", (0.0, 1.05)

    curves_path = write_scan_csv(table, out_dir / f"{name}_curves.csv")
    roots_path = write_roots_csv(roots, out_dir / f"{name}_roots.csv")
    script_path = write_plot_script(out_dir / f"{name}.gp", table, curves_path.name,
                                    preset.description, ylabel=ylabel, yrange=yrange)

    logger.info(f"Preset {name}: {len(roots)} roots, files in {out_dir}")
    return [curves_path, roots_path, script_path]


def _junction_line(label: str, junction: JunctionParams) -> str:
    boundary = classify_junction(junction)
    return (f"{label}: L+={junction.l_plus}, L-={junction.l_minus}, "
            f"theta+={junction.theta_plus!r}, theta-={junction.theta_minus!r}, class={boundary.tag.value}")


def emit_report(scenario: Scenario) -> str:
    """
    Human-readable summary of a scenario.

    Lists each junction's boundary class, then for one junction its
    perfect-transmission wavenumber, and for two junctions the relation, the
    delta-potential case if any, the quartic coefficients, the roots in
    (0, k_max], peak widths for the anti-symmetric pair and any incidental
    candidates.
    """

    lines = [f"Scenario: mode={scenario.mode.value}, k in [{scenario.k_min!r}, {scenario.k_max!r}]"]
    for index, junction in enumerate(scenario.junctions, start=1):
        lines.append(_junction_line(f"j{index}", junction))

    if scenario.mode == ScanMode.SINGLE:
        junction = scenario.junctions[0]
        k_star = perfect_transmission_wavenumber(junction)
        if k_star is None:
            lines.append("Perfect transmission: none (L+ L- >= 0)")
        else:
            lines.append(f"Perfect transmission: k={k_star!r}, T1={t1(junction, k_star)!r}")
        if classify_junction(junction).tag == BoundaryTag.DECOUPLING:
            lines.append("Opaque junction: T1 = 0 for every k")
        return "\n".join(lines) + "\n"

    config = scenario.double_config
    lines.append(f"Separation: a={config.a!r}")
    memberships = relation_memberships(config)

    try:
        report = analyze_resonances(config, scenario.k_max)
    except (ResonanceError, InvalidParameter) as e:
        lines.append(f"Relation: {', '.join(sorted(tag.value for tag in memberships)) or 'None'}")
        lines.append(f"Resonance analysis unavailable: {e}")
        return "\n".join(lines) + "\n"

    lines.append(f"Relation: {report.relation.tag.value}")
    if len(memberships) > 1:
        lines.append(f"Also satisfies: {', '.join(sorted(tag.value for tag in memberships if tag != report.relation.tag))}")

    case = delta_potential_case(config)
    if case is not None:
        lines.append(f"Delta-potential case ({case}): infinitely many resonant peaks")

    if report.quartic is not None:
        q = report.quartic
        lines.append(f"Quartic: alpha={q.alpha!r}, beta={q.beta!r}, gamma={q.gamma!r}")
    if report.relation.tag != RelationTag.NONE:
        lines.append("Root family: infinite (universal resonance)")

    lines.append(f"Roots in (0, {scenario.k_max!r}]: {len(report.roots)}")
    for root in report.roots:
        flag = ", tangent" if root.tangent else ""
        lines.append(f"  k={root.k!r} kind={root.kind.value} |T2-1|={root.residual:.3e}{flag}")

    if RelationTag.ANTI_SAME in memberships:
        for n in range(1, 4):
            if n * math.pi / config.a > scenario.k_max:
                break
            try:
                width = peak_width(config.j1, config.a, n)
                lines.append(f"  peak n={n}: k_n={width.k_n!r}, w={width.w!r}")
            except (SingularPeak, NotApplicable) as e:
                lines.append(f"  peak n={n}: {e}")

    for candidate in report.incidental:
        status = "verified" if candidate.verified else "not realised at this a"
        separations = ", ".join(repr(a) for a in candidate.separations) or "none"
        lines.append(f"Incidental candidate k={candidate.k!r} ({status}); separations: {separations}")

    return "\n".join(lines) + "\n"
