import pytest
from hypothesis import given, settings

from morekg import vocab
from morekg.rdf import Graph, IRI, Literal
from morekg.rdf import Triple
from morekg.rules import (Rule, RuleError, RuleSet, Var, builtin_ruleset,
                          builtin_rules, builtin_shortcut_rule, export_rules,
                          match_pattern, materialize, materialize_naive,
                          parse_rules)

from oracles import naive_shortcut_inferences
from strategies import graphs

EX = "http://example.org/"


def iri(local):
    return IRI(EX + local)


class TestRuleValidation:
    def test_unbound_head_variable(self):
        r = Rule("bad", ((Var("x"), vocab.RDF_TYPE, Var("c")),),
                 ((Var("x"), vocab.RDF_TYPE, Var("d")),))
        with pytest.raises(RuleError, match="d"):
            r.validate()

    def test_empty_body(self):
        r = Rule("bad", (), ((Var("x"), vocab.RDF_TYPE, Var("x")),))
        with pytest.raises(RuleError, match="empty body"):
            r.validate()

    def test_duplicate_names_rejected(self):
        r = builtin_shortcut_rule()
        with pytest.raises(RuleError, match="duplicate"):
            RuleSet([r, r])

    def test_builtin_shortcut_shape(self):
        r = builtin_shortcut_rule()
        assert len(r.body) == 4
        assert [p[1] for p in r.body] == [
            vocab.PATO_EXECUTES, vocab.OBI_HAS_SPECIFIED_OUTPUT,
            vocab.OBI_HAS_VALUE_SPECIFICATION, vocab.OBI_SPECIFIES_VALUE_OF]
        assert r.head == ((r.body[0][2], vocab.MORE_MEASURES_DISPOSITION,
                           r.body[3][2]),)

    def test_builtins_all_valid(self):
        for r in builtin_rules():
            r.validate()


class TestMatchPattern:
    def test_binds_free_variables(self):
        g = Graph()
        g.add(iri("s"), vocab.RDF_TYPE, iri("C"))
        out = list(match_pattern(g, (Var("x"), vocab.RDF_TYPE, Var("c")), {}))
        assert out == [{"x": iri("s"), "c": iri("C")}]

    def test_respects_existing_bindings(self):
        g = Graph()
        g.add(iri("s1"), vocab.RDF_TYPE, iri("C"))
        g.add(iri("s2"), vocab.RDF_TYPE, iri("C"))
        out = list(match_pattern(g, (Var("x"), vocab.RDF_TYPE, Var("c")),
                                 {"x": iri("s2")}))
        assert out == [{"x": iri("s2"), "c": iri("C")}]

    def test_repeated_variable_must_agree(self):
        g = Graph()
        g.add(iri("a"), iri("p"), iri("a"))
        g.add(iri("a"), iri("p"), iri("b"))
        out = list(match_pattern(g, (Var("x"), iri("p"), Var("x")), {}))
        assert out == [{"x": iri("a")}]


class TestMaterialize:
    def test_subclass_chain(self):
        g = Graph()
        a, b, c, d = (iri(n) for n in "ABCD")
        g.add(a, vocab.RDFS_SUBCLASSOF, b)
        g.add(b, vocab.RDFS_SUBCLASSOF, c)
        g.add(c, vocab.RDFS_SUBCLASSOF, d)
        out = materialize(g, builtin_ruleset())
        assert Triple(a, vocab.RDFS_SUBCLASSOF, d) in out

    def test_type_propagated_to_all_ancestors(self):
        g = Graph()
        x, a, b, c = iri("x"), iri("A"), iri("B"), iri("C")
        g.add(x, vocab.RDF_TYPE, a)
        g.add(a, vocab.RDFS_SUBCLASSOF, b)
        g.add(b, vocab.RDFS_SUBCLASSOF, c)
        out = materialize(g, builtin_ruleset())
        assert Triple(x, vocab.RDF_TYPE, b) in out
        assert Triple(x, vocab.RDF_TYPE, c) in out

    def test_shortcut_on_minimal_chain(self):
        g = Graph()
        proc, item, datum, vs, disp = (iri(n) for n in
                                       ("proc", "item", "datum", "vs", "disp"))
        g.add(proc, vocab.PATO_EXECUTES, item)
        g.add(proc, vocab.OBI_HAS_SPECIFIED_OUTPUT, datum)
        g.add(datum, vocab.OBI_HAS_VALUE_SPECIFICATION, vs)
        g.add(vs, vocab.OBI_SPECIFIES_VALUE_OF, disp)
        out = materialize(g, builtin_ruleset())
        assert Triple(item, vocab.MORE_MEASURES_DISPOSITION, disp) in out
        assert len(out) == 5

    def test_broken_chain_yields_nothing(self):
        g = Graph()
        g.add(iri("proc"), vocab.PATO_EXECUTES, iri("item"))
        g.add(iri("proc"), vocab.OBI_HAS_SPECIFIED_OUTPUT, iri("datum"))
        out = materialize(g, builtin_ruleset())
        assert not list(out.match(None, vocab.MORE_MEASURES_DISPOSITION, None))

    def test_literal_head_subject_skipped(self):
        # a rule instantiation that would need a literal subject is dropped
        r = Rule("flip", ((Var("s"), iri("p"), Var("o")),),
                 ((Var("o"), iri("q"), Var("s")),))
        g = Graph()
        g.add(iri("s"), iri("p"), Literal("v"))
        out = materialize(g, RuleSet([r]))
        assert len(out) == 1

    def test_input_graph_unchanged(self, fixture_graph):
        before = len(fixture_graph)
        materialize(fixture_graph, builtin_ruleset())
        assert len(fixture_graph) == before

    def test_idempotent(self, fixture_materialized):
        again = materialize(fixture_materialized, builtin_ruleset())
        assert again == fixture_materialized

    def test_shortcut_count_matches_nested_loop_oracle(self, fixture_graph,
                                                       fixture_materialized):
        oracle = naive_shortcut_inferences(list(fixture_graph))
        got = set(fixture_materialized.match(
            None, vocab.MORE_MEASURES_DISPOSITION, None))
        assert got == oracle
        # two items, one disposition per participant and item
        assert len(got) == 2 * 30

    def test_semi_naive_equals_naive_on_fixture(self, fixture_graph,
                                                fixture_materialized):
        assert fixture_materialized == materialize_naive(fixture_graph,
                                                         builtin_ruleset())

    @settings(max_examples=40, deadline=None)
    @given(graphs(max_size=15))
    def test_semi_naive_equals_naive_property(self, g):
        rs = builtin_ruleset()
        try:
            semi = materialize(g, rs)
        except RecursionError:  # pragma: no cover
            return
        assert semi == materialize_naive(g, rs)


RULE_TEXT = """
# transitive part-of
partof-trans: ?a more:partOfStudy ?b & ?b more:partOfStudy ?c
  => ?a more:partOfStudy ?c .
"""


class TestRuleSyntax:
    def test_parse_custom_rule(self):
        rs = parse_rules(RULE_TEXT, include_builtins=False)
        assert len(rs) == 1
        r = rs.rules[0]
        assert r.name == "partof-trans"
        assert r.body[0][1] == vocab.MORE_PART_OF_STUDY

    def test_builtins_merged_by_default(self):
        rs = parse_rules(RULE_TEXT)
        names = {r.name for r in rs}
        assert "partof-trans" in names
        assert "measures-disposition" in names

    def test_custom_rule_overrides_builtin_of_same_name(self):
        text = ("measures-disposition: ?i a more:TestItem "
                "=> ?i a more:TestItem .")
        rs = parse_rules(text)
        rules = [r for r in rs if r.name == "measures-disposition"]
        assert len(rules) == 1
        assert len(rules[0].body) == 1

    def test_a_keyword_and_literals(self):
        rs = parse_rules(
            'r1: ?x a more:Person & ?x more:hasAge 9 => ?x more:hasBmi 16.5 .',
            include_builtins=False)
        body = rs.rules[0].body
        assert body[0][1] == vocab.RDF_TYPE
        assert body[1][2] == Literal("9", vocab.XSD_INTEGER.value)
        assert rs.rules[0].head[0][2] == Literal("16.5", vocab.XSD_DECIMAL.value)

    def test_missing_arrow(self):
        with pytest.raises(RuleError, match="=>"):
            parse_rules("r1: ?x a more:Person .", include_builtins=False)

    def test_unbound_head_var_rejected(self):
        with pytest.raises(RuleError, match="not bound"):
            parse_rules("r1: ?x a more:Person => ?y a more:Person .",
                        include_builtins=False)

    def test_error_reports_line(self):
        with pytest.raises(RuleError, match="line 2"):
            parse_rules("r1: ?x a more:Person => ?x a more:Person .\n"
                        "r2: ?x a more:Person => ?x a .",
                        include_builtins=False)

    def test_export_round_trip(self):
        rs = builtin_ruleset()
        again = parse_rules(export_rules(rs), include_builtins=False)
        assert list(again) == list(rs)

    def test_custom_rule_round_trip(self):
        rs = parse_rules(RULE_TEXT, include_builtins=False)
        assert list(parse_rules(export_rules(rs), include_builtins=False)) == \
            list(rs)

    def test_parsed_rules_evaluate(self, fixture_graph):
        rs = parse_rules(RULE_TEXT, include_builtins=False)
        out = materialize(fixture_graph, rs)
        # partOfStudy is flat in the emitted KG, so nothing new derives
        assert out == fixture_graph
