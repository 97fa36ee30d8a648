"""File interfaces: long-format choice data (CSV) and model files (JSON).

All parse failures raise :class:`DataError` carrying the source path and a
1-based line number, so callers can print line-precise messages.
"""

from __future__ import annotations

import csv
import json

import numpy as np

from .errors import DataError
from .model import Dataset, ModelSpec, Observation, ParameterDef, UtilityTerm

RESERVED_COLUMNS = ("person_id", "obs_id", "alt_id", "avail", "chosen")


def _flag(raw, column, source, line):
    value = raw.strip()
    if value == "0":
        return False
    if value == "1":
        return True
    raise DataError(f"column '{column}' must be 0 or 1, got '{raw}'", source=source, line=line)


def load_dataset(path):
    """Read a long-format CSV: one row per (observation, alternative).

    Required columns: person_id, obs_id, alt_id, avail, chosen. Every other
    column is an attribute; empty cells mean the attribute does not apply to
    that alternative. Exactly one chosen row per observation, and every
    observation must carry a row for every alternative seen in the file.
    """
    source = str(path)
    try:
        fh = open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise DataError(f"cannot read file: {exc}", source=source) from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError("file is empty; a header row is mandatory", source=source, line=1)
        header = [h.strip() for h in header]
        missing = [c for c in RESERVED_COLUMNS if c not in header]
        if missing:
            raise DataError(f"missing required columns: {missing}", source=source, line=1)
        if len(set(header)) != len(header):
            raise DataError("duplicate column names in header", source=source, line=1)
        col = {name: header.index(name) for name in RESERVED_COLUMNS}
        attr_cols = [(i, name) for i, name in enumerate(header) if name not in RESERVED_COLUMNS]

        alternatives = []
        alt_pos = {}
        # obs_id -> [person_id, first_line, {alt: (line, avail, chosen, attrs)}]
        groups = {}
        order = []
        for line, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                raise DataError(
                    f"expected {len(header)} fields, got {len(row)}", source=source, line=line
                )
            person_id = row[col["person_id"]].strip()
            obs_id = row[col["obs_id"]].strip()
            alt_id = row[col["alt_id"]].strip()
            if not person_id or not obs_id or not alt_id:
                raise DataError(
                    "person_id, obs_id and alt_id must be non-empty", source=source, line=line
                )
            if alt_id not in alt_pos:
                alt_pos[alt_id] = len(alternatives)
                alternatives.append(alt_id)
            avail = _flag(row[col["avail"]], "avail", source, line)
            chosen = _flag(row[col["chosen"]], "chosen", source, line)
            attrs = {}
            for i, name in attr_cols:
                cell = row[i].strip()
                if not cell:
                    continue
                try:
                    attrs[name] = float(cell)
                except ValueError:
                    raise DataError(
                        f"column '{name}' is not numeric: '{row[i]}'", source=source, line=line
                    )
            group = groups.get(obs_id)
            if group is None:
                group = [person_id, line, {}]
                groups[obs_id] = group
                order.append(obs_id)
            elif group[0] != person_id:
                raise DataError(
                    f"observation '{obs_id}' appears under two persons "
                    f"('{group[0]}' and '{person_id}')",
                    source=source,
                    line=line,
                )
            if alt_id in group[2]:
                raise DataError(
                    f"duplicate row for observation '{obs_id}', alternative '{alt_id}'",
                    source=source,
                    line=line,
                )
            group[2][alt_id] = (line, avail, chosen, attrs)

    if not order:
        raise DataError("file contains a header but no data rows", source=source, line=1)

    observations = []
    for obs_id in order:
        person_id, first_line, rows = groups[obs_id]
        for alt in alternatives:
            if alt not in rows:
                raise DataError(
                    f"observation '{obs_id}' has no row for alternative '{alt}'",
                    source=source,
                    line=first_line,
                )
        chosen_alts = [alt for alt in alternatives if rows[alt][2]]
        if len(chosen_alts) != 1:
            raise DataError(
                f"observation '{obs_id}' must have exactly one chosen row, "
                f"got {len(chosen_alts)}",
                source=source,
                line=first_line,
            )
        observations.append(
            Observation(
                person_id=person_id,
                obs_id=obs_id,
                chosen=alt_pos[chosen_alts[0]],
                availability=tuple(rows[alt][1] for alt in alternatives),
                attributes=tuple(dict(rows[alt][3]) for alt in alternatives),
            )
        )

    dataset = Dataset(alternatives, observations)
    try:
        dataset.validate()
    except Exception as exc:
        raise DataError(str(exc), source=source) from exc
    return dataset


def save_dataset(dataset, path):
    """Write a dataset back to the long CSV format accepted by load_dataset."""
    names = sorted({name for obs in dataset.observations for attrs in obs.attributes for name in attrs})
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(RESERVED_COLUMNS) + names)
        for obs in dataset.observations:
            for j, alt in enumerate(dataset.alternatives):
                attrs = obs.attributes[j]
                writer.writerow(
                    [
                        obs.person_id,
                        obs.obs_id,
                        alt,
                        int(obs.availability[j]),
                        int(obs.chosen == j),
                    ]
                    + [repr(attrs[name]) if name in attrs else "" for name in names]
                )


def read_json(path):
    source = str(path)
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise DataError(f"invalid JSON: {exc.msg}", source=source, line=exc.lineno) from exc
    except OSError as exc:
        raise DataError(f"cannot read file: {exc}", source=source) from exc


def model_spec_from_doc(doc):
    """Build a ModelSpec from its JSON document form (fields verbatim)."""
    if not isinstance(doc, dict):
        raise ValueError("model document must be a JSON object")
    alternatives = [str(a) for a in doc["alternatives"]]
    parameters = [
        ParameterDef(
            name=str(p["name"]),
            start=float(p.get("start", 0.0)),
            fixed=bool(p.get("fixed", False)),
            fixed_value=float(p.get("fixed_value", 0.0)),
            h0_value=float(p.get("h0_value", 0.0)),
            alternative=str(p.get("alternative", "auto")),
        )
        for p in doc["parameters"]
    ]
    utilities = {
        str(alt): [UtilityTerm(param=str(t["param"]), attribute=str(t["attribute"])) for t in terms]
        for alt, terms in doc.get("utilities", {}).items()
    }
    return ModelSpec(alternatives, parameters, utilities)


def model_spec_to_doc(spec):
    return {
        "alternatives": list(spec.alternatives),
        "parameters": [
            {
                "name": p.name,
                "start": p.start,
                "fixed": p.fixed,
                "fixed_value": p.fixed_value,
                "h0_value": p.h0_value,
                "alternative": p.alternative,
            }
            for p in spec.parameters
        ],
        "utilities": {
            alt: [{"param": t.param, "attribute": t.attribute} for t in terms]
            for alt, terms in spec.utilities.items()
        },
    }


def load_model_spec(path):
    """Read a model file: alternatives, parameter declarations, utilities."""
    doc = read_json(path)
    source = str(path)
    try:
        spec = model_spec_from_doc(doc)
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"malformed model file: {exc!r}", source=source) from exc
    try:
        spec.validate()
    except Exception as exc:
        raise DataError(str(exc), source=source) from exc
    return spec


def save_model_spec(spec, path):
    write_json(model_spec_to_doc(spec), path)


def write_json(doc, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, indent=2)
        fh.write("\n")


def encode_matrix(matrix, rows, cols):
    """JSON form of a labelled matrix: {"rows", "cols", "data"}."""
    m = np.asarray(matrix, dtype=float)
    return {"rows": list(rows), "cols": list(cols), "data": [[float(x) for x in r] for r in m]}


def decode_matrix(doc):
    return np.asarray(doc["data"], dtype=float), list(doc["rows"]), list(doc["cols"])
