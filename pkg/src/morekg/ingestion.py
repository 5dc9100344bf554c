"""Load tabular study bundles, validate them, mint deterministic IRIs,
and emit the knowledge graph.

Emission follows the plan/process/datum pattern: each result row yields
an executed plan, a test process with an evaluant role for the
participant, a scalar measurement datum, and a value specification that
specifies the value of the participant's disposition.  Direct
query-facing shortcuts (``more:hasAge``, the decimal object on
``obi:has_value_specification``) are emitted alongside the full pattern.
"""

from __future__ import annotations

import csv
import re
import urllib.parse
from pathlib import Path
from typing import Optional

from . import vocab
from .bundle import (
    BundleError,
    IngestConfig,
    ParticipantRecord,
    ResultRecord,
    StudyBundle,
    StudyMetadata,
    TestItemDef,
    ValidationReport,
)
from .ontology import OntologySchema
from .rdf import Graph, IRI, Literal


_COMPONENT_RE = re.compile(r"[A-Za-z0-9_.~-]+\Z")

REQUIRED_HEADERS = {
    "study": ["id", "title", "year_start", "year_end", "doi"],
    "participants": ["participant_id", "age", "sex", "height_cm", "weight_kg", "bmi"],
    "test_items": ["key", "label", "disposition_label", "unit", "datatype"],
    "results": ["participant_id", "test_item", "value", "session_date", "trial"],
}


def mint_iri(study_id: str, kind: str, local: str) -> IRI:
    """Deterministic entity IRI under the knowledge-graph namespace."""
    for name, component in (("study", study_id), ("kind", kind), ("local", local)):
        if not component:
            raise BundleError("empty %s component for minted IRI" % name)
    parts = [urllib.parse.quote(c, safe="_-.~") for c in (study_id, kind, local)]
    for c in parts:
        if not _COMPONENT_RE.match(c):
            raise BundleError("invalid IRI component after encoding: %r" % c)
    return IRI(vocab.KG_BASE + "/".join(parts))


def _read_rows(path: Path, table: str) -> list[dict]:
    if not path.exists():
        raise BundleError("missing bundle file: %s" % path)
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        header = reader.fieldnames or []
        expected = REQUIRED_HEADERS[table]
        if list(header) != expected:
            raise BundleError(
                "%s: header mismatch, expected %s, got %s"
                % (path, ",".join(expected), ",".join(header))
            )
        return list(reader)


def _req(row: dict, field: str, path, rownum: int) -> str:
    value = (row.get(field) or "").strip()
    if not value:
        raise BundleError("%s row %d: missing %s" % (path, rownum, field))
    return value


def _opt(row: dict, field: str) -> Optional[str]:
    value = (row.get(field) or "").strip()
    return value or None


def _int(value: str, what: str, path, rownum: int) -> int:
    try:
        return int(value)
    except ValueError:
        raise BundleError("%s row %d: non-integer %s: %r" % (path, rownum, what, value)) from None


def _decimal(value: str, what: str, path, rownum: int) -> str:
    if not re.match(r"[+-]?[0-9]+(\.[0-9]+)?\Z", value):
        raise BundleError("%s row %d: non-numeric %s: %r" % (path, rownum, what, value))
    return value


def load_bundle(dir_path, config: Optional[IngestConfig] = None) -> StudyBundle:
    config = config or IngestConfig()
    base = Path(dir_path)

    study_rows = _read_rows(base / config.study_file, "study")
    if len(study_rows) != 1:
        raise BundleError("%s: expected exactly 1 study row, got %d"
                          % (base / config.study_file, len(study_rows)))
    row = study_rows[0]
    spath = base / config.study_file
    metadata = StudyMetadata(
        id=_req(row, "id", spath, 2),
        title=_req(row, "title", spath, 2),
        year_start=_int(_req(row, "year_start", spath, 2), "year_start", spath, 2),
        year_end=_int(_req(row, "year_end", spath, 2), "year_end", spath, 2),
        doi=_opt(row, "doi"),
    )

    ppath = base / config.participants_file
    participants = []
    seen_pids: set[str] = set()
    for i, row in enumerate(_read_rows(ppath, "participants"), start=2):
        pid = _req(row, "participant_id", ppath, i)
        if pid in seen_pids:
            raise BundleError("%s row %d: duplicate participant_id %r" % (ppath, i, pid))
        seen_pids.add(pid)
        participants.append(ParticipantRecord(
            participant_id=pid,
            age=_int(_req(row, "age", ppath, i), "age", ppath, i),
            sex=_opt(row, "sex"),
            height_cm=_decimal(_req(row, "height_cm", ppath, i), "height_cm", ppath, i),
            weight_kg=_decimal(_req(row, "weight_kg", ppath, i), "weight_kg", ppath, i),
            bmi=_decimal(_req(row, "bmi", ppath, i), "bmi", ppath, i),
        ))

    ipath = base / config.items_file
    items = []
    seen_keys: set[str] = set()
    for i, row in enumerate(_read_rows(ipath, "test_items"), start=2):
        key = _req(row, "key", ipath, i)
        if key in seen_keys:
            raise BundleError("%s row %d: duplicate test item key %r" % (ipath, i, key))
        seen_keys.add(key)
        items.append(TestItemDef(
            key=key,
            label=_req(row, "label", ipath, i),
            disposition_label=_req(row, "disposition_label", ipath, i),
            unit=_req(row, "unit", ipath, i),
            datatype=_opt(row, "datatype") or vocab.XSD_DECIMAL.value,
        ))

    rpath = base / config.results_file
    results = []
    seen_results: set[tuple] = set()
    for i, row in enumerate(_read_rows(rpath, "results"), start=2):
        pid = _req(row, "participant_id", rpath, i)
        if pid not in seen_pids:
            raise BundleError("%s row %d: unknown participant %r" % (rpath, i, pid))
        item = _req(row, "test_item", rpath, i)
        if item not in seen_keys:
            raise BundleError("%s row %d: unknown test item %r" % (rpath, i, item))
        record = ResultRecord(
            participant_id=pid,
            item=item,
            value=_decimal(_req(row, "value", rpath, i), "value", rpath, i),
            session_date=_opt(row, "session_date"),
            trial=_opt(row, "trial"),
        )
        dedup_key = (pid, item, record.session_date, record.trial)
        if dedup_key in seen_results:
            raise BundleError(
                "%s row %d: duplicate result for %s" % (rpath, i, dedup_key,)
            )
        seen_results.add(dedup_key)
        results.append(record)

    return StudyBundle(metadata=metadata, participants=participants,
                       items=items, results=results)


def validate_bundle(b: StudyBundle) -> ValidationReport:
    """Report-only consistency checks; never mutates the bundle."""
    report = ValidationReport()
    for p in b.participants:
        loc = "participant %s" % p.participant_id
        height_m = float(p.height_cm) / 100.0
        if height_m > 0:
            computed = float(p.weight_kg) / (height_m * height_m)
            if abs(computed - float(p.bmi)) > 0.5:
                report.add("warning", loc,
                           "BMI %s inconsistent with weight/height (computed %.2f)"
                           % (p.bmi, computed))
        if p.age > 120:
            report.add("warning", loc, "age outlier: %d" % p.age)

    seen_sessions: set[tuple] = set()
    for idx, r in enumerate(b.results, start=1):
        key = (r.participant_id, r.item, r.session_date, r.trial)
        if key in seen_sessions:
            report.add("warning", "result %d" % idx, "duplicate session %s" % (key,))
        seen_sessions.add(key)
    return report


def _value_literal(lexical: str, datatype: str) -> Literal:
    return Literal(lexical, datatype)


def emit_kg(b: StudyBundle, schema: OntologySchema) -> Graph:
    """Emit the data-level graph for one study (schema triples not
    included; merge with ``schema.graph`` for a queryable KG)."""
    g = Graph()
    study_id = b.metadata.id
    study = mint_iri(study_id, "study", study_id)
    part_of = vocab.MORE_PART_OF_STUDY

    g.add(study, vocab.RDF_TYPE, vocab.MORE_STUDY)
    g.add(study, vocab.MORE_HAS_TITLE, Literal(b.metadata.title))
    for year in b.metadata.years:
        g.add(study, vocab.MORE_CONDUCTED_IN_YEAR,
              Literal(str(year), vocab.XSD_INTEGER.value))
    if b.metadata.doi:
        g.add(study, vocab.MORE_HAS_DOI, Literal(b.metadata.doi))

    for item in b.items:
        g.add(schema.item_iri(item.key), part_of, study)

    persons: dict[str, IRI] = {}
    dispositions: dict[tuple[str, str], IRI] = {}
    for p in b.participants:
        person = mint_iri(study_id, "person", p.participant_id)
        persons[p.participant_id] = person
        g.add(person, vocab.RDF_TYPE, vocab.MORE_PERSON)
        g.add(person, vocab.MORE_HAS_AGE, Literal(str(p.age), vocab.XSD_INTEGER.value))
        if p.sex:
            g.add(person, vocab.MORE_HAS_SEX, Literal(p.sex))
        g.add(person, vocab.MORE_HAS_HEIGHT, _value_literal(p.height_cm, vocab.XSD_DECIMAL.value))
        g.add(person, vocab.MORE_HAS_WEIGHT, _value_literal(p.weight_kg, vocab.XSD_DECIMAL.value))
        g.add(person, vocab.MORE_HAS_BMI, _value_literal(p.bmi, vocab.XSD_DECIMAL.value))
        g.add(person, part_of, study)
        for item in b.items:
            disp = mint_iri(study_id, "disposition",
                            "%s_%s" % (p.participant_id, item.key))
            dispositions[(p.participant_id, item.key)] = disp
            g.add(disp, vocab.RDF_TYPE, schema.disposition_kind(item.key).iri)
            g.add(disp, vocab.BFO_INHERES_IN, person)
            g.add(disp, part_of, study)

    counters: dict[tuple[str, str], int] = {}
    for r in b.results:
        n = counters.get((r.participant_id, r.item), 0) + 1
        counters[(r.participant_id, r.item)] = n
        local = "%s_%s_%d" % (r.participant_id, r.item, n)
        item_def = schema.items[r.item]
        item_iri = schema.item_iri(r.item)
        person = persons[r.participant_id]
        disp = dispositions[(r.participant_id, r.item)]

        plan = mint_iri(study_id, "plan", local)
        proc = mint_iri(study_id, "process", local)
        role = mint_iri(study_id, "role", local)
        datum = mint_iri(study_id, "datum", local)
        vspec = mint_iri(study_id, "valuespec", local)
        value = _value_literal(r.value, item_def.datatype)

        g.add(plan, vocab.RDF_TYPE, vocab.IAO_PLAN)
        g.add(plan, vocab.BFO_CONCRETIZES, item_iri)
        g.add(plan, part_of, study)

        g.add(proc, vocab.RDF_TYPE, schema.process_class(r.item))
        g.add(proc, vocab.OBI_REALIZES, plan)
        g.add(proc, vocab.PATO_EXECUTES, item_iri)
        g.add(proc, vocab.OBI_HAS_PARTICIPANT, person)
        g.add(proc, part_of, study)
        if r.trial:
            g.add(proc, vocab.MORE_HAS_TRIAL, Literal(r.trial))
        if r.session_date:
            g.add(proc, vocab.MORE_HAS_SESSION_DATE,
                  Literal(r.session_date, vocab.XSD_DATE.value))

        g.add(role, vocab.RDF_TYPE, vocab.OBI_EVALUANT_ROLE)
        g.add(person, vocab.OBI_HAS_ROLE, role)
        g.add(proc, vocab.OBI_REALIZES, role)
        g.add(role, part_of, study)

        g.add(datum, vocab.RDF_TYPE, vocab.IAO_SCALAR_MEASUREMENT_DATUM)
        g.add(proc, vocab.OBI_HAS_SPECIFIED_OUTPUT, datum)
        g.add(datum, vocab.OBI_HAS_VALUE_SPECIFICATION, vspec)
        g.add(datum, vocab.OBI_HAS_VALUE_SPECIFICATION, value)
        g.add(datum, part_of, study)

        g.add(vspec, vocab.RDF_TYPE, vocab.OBI_VALUE_SPECIFICATION)
        g.add(vspec, vocab.MORE_HAS_VALUE, value)
        g.add(vspec, vocab.MORE_HAS_UNIT, Literal(item_def.unit))
        g.add(vspec, vocab.OBI_SPECIFIES_VALUE_OF, disp)
        g.add(vspec, part_of, study)

    return g
