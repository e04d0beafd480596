import json

import pytest

from nilsoliton.documents import (
    BracketDocument,
    DocumentError,
    GraphDocument,
    bracket_to_document,
    emit_json,
    parse_coefficient,
    parse_document,
    parse_edge_list,
    parse_manifest,
)
from fixtures_lie import chain_soliton


class TestCoefficients:
    def test_plain_integers(self):
        assert parse_coefficient(3) == (3.0, True)
        assert parse_coefficient("-2") == (-2.0, True)

    def test_rationals(self):
        value, exact = parse_coefficient("1/2")
        assert value == 0.5 and exact
        value, exact = parse_coefficient("1/3")
        assert value == pytest.approx(1 / 3) and not exact

    def test_square_roots(self):
        value, exact = parse_coefficient("sqrt(5)")
        assert value == pytest.approx(5**0.5) and not exact
        value, exact = parse_coefficient("sqrt(4)")
        assert value == 2.0 and exact
        value, exact = parse_coefficient("-sqrt(1/2)")
        assert value == pytest.approx(-(0.5**0.5))

    def test_garbage_rejected(self):
        with pytest.raises(DocumentError):
            parse_coefficient("five")


BRACKET_TEXT = """{
  "kind": "bracket",
  "dim": 7,
  "name": "demo",
  "entries": [
    {"i": 1, "j": 2, "k": 3, "c": "sqrt(5)"},
    {"i": 1, "j": 3, "k": 4, "c": "2/3"},
    {"i": 1, "j": 4, "k": 5, "c": 3}
  ]
}"""


class TestBracketDocuments:
    def test_parse_and_convert(self):
        doc = parse_document(BRACKET_TEXT)
        assert isinstance(doc, BracketDocument)
        b = doc.to_bracket()
        assert b.dim == 7 and len(b) == 3
        assert b.coeff(1, 3, 4) == pytest.approx(2 / 3)

    def test_round_trip_preserves_tokens(self):
        doc = parse_document(BRACKET_TEXT)
        emitted = doc.emit()
        again = parse_document(json.dumps(emitted))
        assert again.emit() == emitted
        assert emitted["entries"][0]["c"] == "sqrt(5)"
        assert emitted["entries"][1]["c"] == "2/3"

    def test_exactness_flags(self):
        doc = parse_document(BRACKET_TEXT)
        assert [e.exact for e in doc.entries] == [False, False, True]

    def test_bad_indices_reported(self):
        text = '{"kind": "bracket", "dim": 3, "entries": [{"i": 2, "j": 1, "k": 1, "c": 1}]}'
        with pytest.raises(DocumentError):
            parse_document(text)

    def test_json_error_carries_position(self):
        with pytest.raises(DocumentError) as exc:
            parse_document('{"kind": "bracket",\n  broken')
        assert exc.value.line == 2

    def test_bracket_to_document_round_trip(self):
        doc = bracket_to_document(chain_soliton(), name="x")
        assert doc.to_bracket() == chain_soliton()
        again = parse_document(emit_json(doc))
        assert again.to_bracket() == chain_soliton()


class TestGraphDocuments:
    def test_parse(self):
        doc = parse_document('{"kind": "graph", "vertices": 3, "edges": [[1,2],[2,3]]}')
        assert isinstance(doc, GraphDocument)
        assert doc.to_graph().edge_count == 2

    def test_unknown_kind(self):
        with pytest.raises(DocumentError):
            parse_document('{"kind": "matrix"}')

    def test_edge_list(self):
        doc = parse_edge_list("1 2\n# comment\n2 3\n")
        assert doc.vertex_count == 3 and doc.edges == ((1, 2), (2, 3))

    def test_edge_list_errors_carry_line(self):
        with pytest.raises(DocumentError) as exc:
            parse_edge_list("1 2\n1 2 3\n")
        assert exc.value.line == 2


class TestManifests:
    def test_parse(self):
        items = parse_manifest(
            '{"items": [{"path": "a.json"}, {"path": "b.txt", "command": "graph"}]}'
        )
        assert len(items) == 2
        assert items[0].command == "analyze"
        assert items[1].command == "graph"

    def test_missing_path_rejected(self):
        with pytest.raises(DocumentError):
            parse_manifest('{"items": [{"command": "flow"}]}')
