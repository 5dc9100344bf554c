"""Schema axioms for the motor-test knowledge graph and an RDFS-subset
closure (subclass transitivity plus type propagation)."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from . import vocab
from .bundle import BundleError, TestItemDef
from .rdf import Graph, IRI, Literal, Triple


class SubclassCycleError(Exception):
    def __init__(self, cycle: list[IRI]):
        super().__init__(
            "subclass cycle: " + " -> ".join(c.value for c in cycle)
        )
        self.cycle = cycle


@dataclass(frozen=True)
class DispositionKind:
    iri: IRI
    label: str
    unit: str
    datatype: str


@dataclass
class OntologySchema:
    graph: Graph
    items: dict[str, TestItemDef]
    annotations: Graph = field(default_factory=Graph)  # filled by the privacy layer

    def item_iri(self, key: str) -> IRI:
        return IRI(vocab.MORE + self.items[key].item_iri_local)

    def process_class(self, key: str) -> IRI:
        return IRI(vocab.MORE + self.items[key].process_class_local)

    def disposition_kind(self, key: str) -> DispositionKind:
        item = self.items[key]
        return DispositionKind(
            iri=IRI(vocab.MORE + item.disposition_kind_local),
            label=item.disposition_label,
            unit=item.unit,
            datatype=item.datatype,
        )


_FIXED_SUBCLASS_AXIOMS = (
    (vocab.MORE_STUDY, vocab.IAO_PLAN_SPECIFICATION),
    (vocab.IAO_PLAN_SPECIFICATION, vocab.IAO_INFORMATION_CONTENT_ENTITY),
    (vocab.MORE_TEST_ITEM, vocab.IAO_PLAN_SPECIFICATION),
    (vocab.MORE_TEST_PROCESS, vocab.OBI_ASSAY),
    (vocab.MORE_TEST_PROCESS, vocab.BFO_PROCESS),
    (vocab.MORE_PERSON, vocab.BFO_MATERIAL_ENTITY),
    (vocab.MORE_HANDGRIP_TEST_PROCESS, vocab.MORE_TEST_PROCESS),
)


def build_schema(item_registry: Sequence[TestItemDef]) -> OntologySchema:
    """Fixed axioms plus, per item, a process subclass, a test-item
    individual, and a disposition kind."""
    items: dict[str, TestItemDef] = {}
    for item in item_registry:
        if item.key in items:
            raise BundleError("duplicate test item key: %r" % item.key)
        items[item.key] = item

    g = Graph()
    for sub, sup in _FIXED_SUBCLASS_AXIOMS:
        g.add(sub, vocab.RDFS_SUBCLASSOF, sup)
    for prop in vocab.DECLARED_PROPERTIES:
        g.add(prop, vocab.RDF_TYPE, vocab.RDF_PROPERTY)

    schema = OntologySchema(graph=g, items=items)
    for key, item in items.items():
        item_iri = schema.item_iri(key)
        proc_cls = schema.process_class(key)
        kind = schema.disposition_kind(key)
        g.add(proc_cls, vocab.RDFS_SUBCLASSOF, vocab.MORE_TEST_PROCESS)
        g.add(item_iri, vocab.RDF_TYPE, vocab.MORE_TEST_ITEM)
        g.add(item_iri, vocab.RDFS_LABEL, Literal(item.label))
        g.add(kind.iri, vocab.RDFS_SUBCLASSOF, vocab.BFO_DISPOSITION)

    _subclass_supers(g)  # raises on cycles
    return schema


def _subclass_supers(g: Graph) -> dict:
    """Map each class to its set of strict superclasses; cycle-checked."""
    direct: dict = {}
    for t in g.match(None, vocab.RDFS_SUBCLASSOF, None):
        if t.subject != t.object:
            direct.setdefault(t.subject, set()).add(t.object)

    supers: dict = {}
    state: dict = {}  # 1 = in progress, 2 = done
    path: list = []

    def visit(c):
        st = state.get(c)
        if st == 2:
            return supers[c]
        if st == 1:
            cycle = path[path.index(c):] + [c]
            raise SubclassCycleError(cycle)
        state[c] = 1
        path.append(c)
        acc = set()
        for d in direct.get(c, ()):
            acc.add(d)
            acc |= visit(d)
        path.pop()
        state[c] = 2
        supers[c] = acc
        return acc

    for c in list(direct):
        visit(c)
    return supers


def rdfs_closure(g: Graph, schema: Optional[OntologySchema] = None) -> Graph:
    """Graph plus transitive subclass triples and propagated rdf:type
    triples.  Monotone and idempotent."""
    combined = g.copy()
    if schema is not None:
        combined.update(schema.graph)
    supers = _subclass_supers(combined)

    out = combined
    for sub, sups in supers.items():
        for sup in sups:
            out.add(sub, vocab.RDFS_SUBCLASSOF, sup)
    for t in list(out.match(None, vocab.RDF_TYPE, None)):
        for sup in supers.get(t.object, ()):
            out.add(t.subject, vocab.RDF_TYPE, sup)
    return out


def apply_aliases(g: Graph, aliases: dict[str, str]) -> Graph:
    """Rewrite IRIs per an alias table (old IRI -> replacement IRI)."""
    if not aliases:
        return g

    def swap(term):
        if isinstance(term, IRI) and term.value in aliases:
            return IRI(aliases[term.value])
        return term

    out = Graph()
    for s, p, o in g:
        out.add(swap(s), swap(p), swap(o))
    return out
