"""Tabular study-bundle data model and ingest configuration."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from . import vocab


class BundleError(Exception):
    """Raised for structurally invalid bundles or configs."""


_STUDY_ID_RE = re.compile(r"[a-z0-9_-]+\Z")


@dataclass(frozen=True)
class StudyMetadata:
    id: str
    title: str
    year_start: int
    year_end: int
    doi: Optional[str] = None

    def __post_init__(self):
        if not _STUDY_ID_RE.match(self.id):
            raise BundleError("study id must match [a-z0-9_-]+: %r" % self.id)
        if self.year_start > self.year_end:
            raise BundleError(
                "study %s: year_start %d > year_end %d"
                % (self.id, self.year_start, self.year_end)
            )

    @property
    def years(self) -> range:
        return range(self.year_start, self.year_end + 1)


@dataclass(frozen=True)
class ParticipantRecord:
    participant_id: str
    age: int
    sex: Optional[str]
    height_cm: str  # lexical decimal forms preserved for bit-exact output
    weight_kg: str
    bmi: str

    def __post_init__(self):
        if self.age < 0:
            raise BundleError("participant %s: negative age" % self.participant_id)
        if float(self.height_cm) <= 0 or float(self.weight_kg) <= 0:
            raise BundleError("participant %s: non-positive height/weight" % self.participant_id)


@dataclass(frozen=True)
class TestItemDef:
    key: str
    label: str
    disposition_label: str
    unit: str
    datatype: str = vocab.XSD_DECIMAL.value

    @property
    def item_iri_local(self) -> str:
        return vocab.camel_case(self.key)

    @property
    def process_class_local(self) -> str:
        return vocab.camel_case(self.key) + "TestProcess"

    @property
    def disposition_kind_local(self) -> str:
        local = vocab.camel_case(self.disposition_label)
        if not local.endswith("Disposition"):
            local += "Disposition"
        return local


@dataclass(frozen=True)
class ResultRecord:
    participant_id: str
    item: str
    value: str  # lexical form under the item datatype
    session_date: Optional[str] = None
    trial: Optional[str] = None


@dataclass
class StudyBundle:
    metadata: StudyMetadata
    participants: list[ParticipantRecord]
    items: list[TestItemDef]
    results: list[ResultRecord]

    def participant_ids(self) -> set[str]:
        return {p.participant_id for p in self.participants}

    def item_keys(self) -> set[str]:
        return {i.key for i in self.items}


@dataclass
class IngestConfig:
    study_file: str = "study.csv"
    participants_file: str = "participants.csv"
    items_file: str = "test_items.csv"
    results_file: str = "results.csv"
    alias_table: Optional[str] = None
    fixture_seed: int = 42

    @classmethod
    def from_dict(cls, data: dict) -> "IngestConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise BundleError("unknown ingest config keys: %s" % ", ".join(sorted(unknown)))
        return cls(**data)


@dataclass
class ValidationIssue:
    severity: str  # warning | error
    location: str  # file/row or entity context
    message: str


@dataclass
class ValidationReport:
    issues: list[ValidationIssue] = field(default_factory=list)

    def add(self, severity: str, location: str, message: str) -> None:
        self.issues.append(ValidationIssue(severity, location, message))

    @property
    def warnings(self) -> list[ValidationIssue]:
        return [i for i in self.issues if i.severity == "warning"]

    def __len__(self):
        return len(self.issues)

    def __bool__(self):
        return bool(self.issues)
