"""Key=value property files for grids, users and jobs.

The three file formats are line-oriented ``key=value`` with a trailing
comma on every line except (optionally) the last.  Keys are matched
exactly, including the historical ``max_*`` spellings of two keys; all
values are integers.  ``format_*`` reproduces the canonical layout so that
``parse(format(record)) == record``.
"""
from __future__ import annotations

from dataclasses import dataclass


class PropertiesError(ValueError):
    """Parse failure with a kind, the offending key and a line number."""

    def __init__(self, kind: str, message: str, line: int | None = None,
                 key: str | None = None):
        self.kind = kind
        self.line = line
        self.key = key
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"{kind}: {message}{where}")


@dataclass(frozen=True)
class GridProperties:
    """Ranges describing a family of grids: sites, links, machines, speeds."""

    number_of_resources: int
    min_resource_bandwidth: int
    max_resource_bandwidth: int
    min_resource_net_mtbf: int
    max_resource_net_mtbf: int
    min_machines: int
    max_machines: int
    min_machine_mtbf: int
    max_machine_mtbf: int
    min_proc_speed: int
    max_proc_speed: int
    min_procs: int
    max_procs: int


@dataclass(frozen=True)
class UserProperties:
    """Ranges describing the user population."""

    number_of_users: int
    min_net_mtbf: int
    max_net_mtbf: int
    min_bandwidth: int
    max_bandwidth: int
    min_qos: int
    max_qos: int


@dataclass(frozen=True)
class JobProperties:
    """Ranges describing job lengths and input volumes."""

    min_length: int
    max_length: int
    min_volume: int
    max_volume: int


# File key -> dataclass field, in canonical file order.
GRID_SCHEMA = [
    ("number_of_resources", "number_of_resources"),
    ("minimum_resource_bandwidth", "min_resource_bandwidth"),
    ("maximum_resource_bandwidth", "max_resource_bandwidth"),
    ("minimum_resource_bandwidth_fail_rate", "min_resource_net_mtbf"),
    ("max_resource_bandwidth_fail_rate", "max_resource_net_mtbf"),
    ("minimum_number_of_machines_in_each_resource", "min_machines"),
    ("maximum_number_of_machines_in_each_resource", "max_machines"),
    ("minimum_machine_fail_rate", "min_machine_mtbf"),
    ("maximum_machine_fail_rate", "max_machine_mtbf"),
    ("minimum_processor_speed", "min_proc_speed"),
    ("maximum_processor_speed", "max_proc_speed"),
    ("minimum_number_of_processors_in_each_machine", "min_procs"),
    ("maximum_number_of_processors_in_each_machine", "max_procs"),
]

USER_SCHEMA = [
    ("number_of_users", "number_of_users"),
    ("minimum_user_bandwidth_fail_rate", "min_net_mtbf"),
    ("maximum_user_bandwidth_fail_rate", "max_net_mtbf"),
    ("minimum_user_bandwidth", "min_bandwidth"),
    ("maximum_user_bandwidth", "max_bandwidth"),
    ("minimum_user_quality_of_service", "min_qos"),
    ("max_user_quality_of_service", "max_qos"),
]

JOB_SCHEMA = [
    ("minimum_job_length", "min_length"),
    ("maximum_job_length", "max_length"),
    ("minimum_job_input_volume", "min_volume"),
    ("maximum_job_input_volume", "max_volume"),
]

_SCHEMAS = {
    "grid": (GRID_SCHEMA, GridProperties),
    "user": (USER_SCHEMA, UserProperties),
    "job": (JOB_SCHEMA, JobProperties),
}


def _range_pairs(schema):
    """(min_key, max_key) pairs inferred from the field names."""
    by_field = {f: k for k, f in schema}
    pairs = []
    for key, field_name in schema:
        if field_name.startswith("min_"):
            partner = "max_" + field_name[4:]
            if partner in by_field:
                pairs.append(((key, field_name), (by_field[partner], partner)))
    return pairs


def _parse(text: str, schema, cls):
    keymap = dict(schema)
    seen: dict[str, int] = {}
    lines: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.endswith(","):
            line = line[:-1].rstrip()
        key, sep, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not sep:
            raise PropertiesError("bad-line", f"expected key=value, got {raw!r}",
                                  lineno)
        if key not in keymap:
            raise PropertiesError("unknown-key", f"unknown key {key!r}",
                                  lineno, key)
        if key in seen:
            raise PropertiesError("duplicate-key", f"duplicate key {key!r}",
                                  lineno, key)
        try:
            seen[key] = int(value)
        except ValueError:
            raise PropertiesError(
                "bad-value", f"value for {key!r} is not an integer: {value!r}",
                lineno, key) from None
        lines[key] = lineno
    for key, _ in schema:
        if key not in seen:
            raise PropertiesError("missing-key", f"missing key {key!r}",
                                  key=key)
    for key in seen:
        if seen[key] < 1:
            raise PropertiesError("bad-value",
                                  f"{key!r} must be >= 1, got {seen[key]}",
                                  lines[key], key)
    for (min_key, _), (max_key, _) in _range_pairs(schema):
        if seen[min_key] > seen[max_key]:
            raise PropertiesError(
                "range", f"{min_key!r}={seen[min_key]} exceeds "
                f"{max_key!r}={seen[max_key]}", lines[max_key], max_key)
    return cls(**{field_name: seen[key] for key, field_name in schema})


def parse_properties(text: str, kind: str):
    """Parse one of the three property formats; ``kind`` is ``grid``,
    ``user`` or ``job``."""
    if kind not in _SCHEMAS:
        raise PropertiesError("bad-kind", f"unknown schema {kind!r}")
    schema, cls = _SCHEMAS[kind]
    return _parse(text, schema, cls)


def parse_grid_properties(text: str) -> GridProperties:
    return _parse(text, GRID_SCHEMA, GridProperties)


def parse_user_properties(text: str) -> UserProperties:
    return _parse(text, USER_SCHEMA, UserProperties)


def parse_job_properties(text: str) -> JobProperties:
    return _parse(text, JOB_SCHEMA, JobProperties)


def format_properties(record) -> str:
    """Render a record in the canonical file layout (comma after every
    line but the last)."""
    for kind, (schema, cls) in _SCHEMAS.items():
        if isinstance(record, cls):
            break
    else:
        raise PropertiesError("bad-kind",
                              f"not a properties record: {type(record)!r}")
    parts = [f"{key}={getattr(record, field_name)}"
             for key, field_name in schema]
    return ",\n".join(parts) + "\n"


def schema_kind(record) -> str:
    """``grid`` / ``user`` / ``job`` for a given record."""
    for kind, (_, cls) in _SCHEMAS.items():
        if isinstance(record, cls):
            return kind
    raise PropertiesError("bad-kind", f"not a properties record: {type(record)!r}")
