import pytest
from hypothesis import given, strategies as st

from morekg.rdf import (Graph, IRI, Literal, MalformedTripleError, PrefixMap,
                        RdfError, Triple, UnresolvedPrefixError)
from morekg import vocab

from strategies import graphs, triples

EX_S = IRI("http://example.org/s")
EX_P = IRI("http://example.org/p")
EX_O = IRI("http://example.org/o")
DECIMAL_ONE_FIVE = Literal("1.5", vocab.XSD_DECIMAL.value)


class TestTerms:
    def test_plain_literal_defaults_to_xsd_string(self):
        assert Literal("hi").datatype == vocab.XSD_STRING.value

    def test_lang_literal_uses_langstring(self):
        lit = Literal("hallo", lang="de")
        assert lit.datatype == "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString"

    def test_lang_literal_rejects_other_datatype(self):
        with pytest.raises(RdfError):
            Literal("hallo", vocab.XSD_INTEGER.value, lang="de")

    def test_iri_rejects_whitespace_and_empty(self):
        with pytest.raises(RdfError):
            IRI("http://example.org/a b")
        with pytest.raises(RdfError):
            IRI("")

    def test_term_equality_is_type_aware(self):
        assert IRI("http://example.org/x") != Literal("http://example.org/x")


class TestGraph:
    def test_insert_twice_returns_false_and_keeps_size(self):
        g = Graph()
        t = Triple(EX_S, EX_P, DECIMAL_ONE_FIVE)
        assert g.insert(t) is True
        assert g.insert(t) is False
        assert len(g) == 1

    def test_insert_decimal_literal(self):
        g = Graph()
        assert g.add(EX_S, EX_P, Literal("1", vocab.XSD_DECIMAL.value))
        assert len(g) == 1

    def test_literal_subject_rejected(self):
        g = Graph()
        with pytest.raises(MalformedTripleError):
            g.insert(Triple(Literal("x"), EX_P, EX_O))

    def test_non_iri_predicate_rejected(self):
        g = Graph()
        with pytest.raises(MalformedTripleError):
            g.insert(Triple(EX_S, Literal("p"), EX_O))

    def test_match_empty_graph(self):
        assert list(Graph().match()) == []

    def test_match_predicate_wildcard(self):
        g = Graph()
        for i in range(3):
            g.add(IRI("http://example.org/s%d" % i), vocab.RDF_TYPE, EX_O)
        assert len(list(g.match(None, vocab.RDF_TYPE, None))) == 3

    def test_match_study_individuals(self, fixture_graph, fixture_bundle):
        studies = list(fixture_graph.match(None, vocab.RDF_TYPE, vocab.MORE_STUDY))
        assert len(studies) == 1  # one study row in the bundle CSV
        assert fixture_bundle.metadata.id in studies[0].subject.value

    @given(graphs())
    def test_index_coherence(self, g):
        # every pattern answered via an index equals a full-scan filter
        all_triples = set(g.match())
        for s, p, o in list(all_triples)[:5]:
            for pattern in [(s, None, None), (None, p, None), (None, None, o),
                            (s, p, None), (s, None, o), (None, p, o), (s, p, o)]:
                via_index = set(g.match(*pattern))
                scan = {t for t in all_triples
                        if (pattern[0] is None or t.subject == pattern[0])
                        and (pattern[1] is None or t.predicate == pattern[1])
                        and (pattern[2] is None or t.object == pattern[2])}
                assert via_index == scan

    @given(st.lists(triples))
    def test_cardinality_is_distinct_count(self, ts):
        g = Graph()
        for t in ts:
            g.insert(t)
        assert len(g) == len(set(ts))


class TestPrefixMap:
    def test_expand_more_has_age(self):
        pm = PrefixMap.default()
        assert pm.expand("more:hasAge") == IRI("https://w3id.org/more#hasAge")

    def test_expand_obi(self):
        pm = PrefixMap.default()
        assert pm.expand("obi:has_specified_output") == IRI(
            "http://purl.obolibrary.org/obo/OBI_has_specified_output")

    def test_expand_xsd_decimal(self):
        assert PrefixMap.default().expand("xsd:decimal") == IRI(
            "http://www.w3.org/2001/XMLSchema#decimal")

    def test_expand_unknown_prefix(self):
        with pytest.raises(UnresolvedPrefixError):
            PrefixMap.default().expand("zzz:thing")

    def test_compact(self):
        pm = PrefixMap.default()
        assert pm.compact(IRI("https://w3id.org/more#study")) == "more:study"

    def test_compact_unregistered(self):
        assert PrefixMap.default().compact(IRI("http://example.org/x")) == \
            "<http://example.org/x>"

    def test_compact_longest_match(self):
        pm = PrefixMap({"a": "http://x.org/", "b": "http://x.org/deep/"})
        assert pm.compact(IRI("http://x.org/deep/z")) == "b:z"

    @pytest.mark.parametrize("curie", [
        "iao:plan_specification", "more:hasAge", "bfo:Process", "pato:executes",
    ])
    def test_round_trip(self, curie):
        pm = PrefixMap.default()
        assert pm.compact(pm.expand(curie)) == curie

    @given(st.sampled_from(sorted(vocab.DEFAULT_PREFIXES)),
           st.text(alphabet="abcXYZ019_", min_size=1, max_size=10))
    def test_round_trip_property(self, prefix, local):
        pm = PrefixMap.default()
        curie = "%s:%s" % (prefix, local)
        expanded = pm.expand(curie)
        # longest-match may pick another prefix only if namespaces nest
        assert pm.expand(pm.compact(expanded)) == expanded
