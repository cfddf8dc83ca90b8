import pytest
from hypothesis import given, settings, strategies as st

from cdm import cql, storage
from cdm.cql.lexer import ARROW, KEYWORD, SEMICOLON, STRING
from cdm.errors import DuplicateAssociation, UnknownLabel

from strategies import statements


def kinds(source):
    return [(t.kind, t.value) for t in cql.tokenize(source)]


def test_tokenize_assoc():
    assert kinds('ASSOC "Chair" -> "Furniture";') == [
        (KEYWORD, "ASSOC"), (STRING, "Chair"), (ARROW, None), (STRING, "Furniture"), (SEMICOLON, None),
    ]


def test_tokenize_skips_comments_and_folds_keywords():
    assert kinds("-- note\nvalidate;") == [(KEYWORD, "VALIDATE"), (SEMICOLON, None)]
    tokens = cql.tokenize("-- note\nvalidate;")
    assert tokens[0].position == (2, 1) and tokens[0].text == "validate"


def test_tokenize_escapes():
    [token] = cql.tokenize(r'"a \"b\" \\ c\nd"')
    assert token.value == 'a "b" \\ c\nd'


def test_tokenize_errors():
    with pytest.raises(cql.UnterminatedString) as info:
        cql.tokenize('"unclosed')
    assert info.value.position == (1, 1)
    with pytest.raises(cql.IllegalCharacter) as info:
        cql.tokenize("THING\n  @")
    assert info.value.position == (2, 3)
    with pytest.raises(cql.IllegalCharacter) as info:
        cql.tokenize('THING "a\\tb";')
    assert info.value.position == (1, 9)
    with pytest.raises(cql.IllegalCharacter):
        cql.tokenize("ASSOC - ")


def test_positions_non_decreasing():
    tokens = cql.tokenize('THING "a";\nASSOC "a" -> "b";  -- x\n  STATS;')
    positions = [t.position for t in tokens]
    assert positions == sorted(positions)


def test_parse_basic():
    assert cql.parse_source('THING "Chair"; ASSOC "Chair" -> "Furniture";') == [
        cql.CreateThing("Chair"), cql.Assoc("Chair", "Furniture"),
    ]
    assert cql.parse_source('ASOF 2 { OWNERS OF "Chair"; }') == [cql.AsOf(2, cql.Owners("Chair"))]
    assert cql.parse_source('drop assoc "a" -> "b"; Reach "x" any; paths "a" to "b";') == [
        cql.DropAssoc("a", "b"), cql.Reach("x", "ANY"), cql.Paths("a", "b"),
    ]


def test_parse_keeps_positions():
    stmts = cql.parse_source('STATS;\n  TRACE "x";')
    assert stmts[1].position == (2, 3)


@pytest.mark.parametrize("source,position,fragment", [
    ('ASOF 2 { THING "X"; }', (1, 10), "mutation not allowed inside ASOF"),
    ('ASOF 2 { ASOF 3 { STATS; } }', (1, 10), "nested"),
    ('ASOF 2 { VALIDATE; }', (1, 10), "expected"),
    ('THING Chair;', (1, 7), "string literal"),
    ('OWNERS "x";', (1, 8), "OF"),
    ('ASSOC "a" "b";', (1, 11), "'->'"),
    ('STATS', (1, 6), "end of input"),
    ('THING "a"; bogus', (1, 12), "statement keyword"),
    ('REACH "a" SIDEWAYS;', (1, 11), "UP or DOWN or ANY"),
])
def test_parse_errors(source, position, fragment):
    with pytest.raises(cql.ParseError) as info:
        cql.parse_source(source)
    assert info.value.position == position
    assert fragment in str(info.value)


def test_format_examples():
    assert cql.format([cql.Assoc("Chair", "Furniture")]) == 'ASSOC "Chair" -> "Furniture";\n'
    assert cql.format([cql.CreateThing('He said "hi"')]) == 'THING "He said \\"hi\\"";\n'
    assert cql.format([cql.AsOf(2, cql.Members("F"))]) == 'ASOF 2 { MEMBERS OF "F"; }\n'


@settings(max_examples=500)
@given(st.lists(statements, max_size=6))
def test_format_round_trip(stmts):
    assert cql.parse_source(cql.format(stmts)) == stmts


@settings(max_examples=300)
@given(st.text(max_size=200))
def test_parser_is_total(source):
    try:
        cql.parse_source(source)
    except (cql.ParseError, cql.LexError) as exc:
        line, col = exc.position
        assert 1 <= line <= source.count("\n") + 1
        assert col >= 1


def test_large_input_terminates():
    source = 'THING "x"; OWNERS OF "x";\n' * 20000
    assert len(cql.parse_source(source)) == 40000


def test_evaluate_reads(fig1):
    assert cql.evaluate(fig1, cql.Owners("Chair")) == cql.Names(("Furniture", "Made of wood"))
    assert cql.evaluate(fig1, cql.AsOf(2, cql.Members("Furniture"))) == cql.Names(("Chair",))
    with pytest.raises(UnknownLabel) as info:
        cql.evaluate(fig1, cql.Owners("Sofa"))
    assert info.value.label == "Sofa"


def test_evaluate_mutations_return_ticks():
    from cdm import Model

    model = Model()
    results = cql.execute(model, 'THING "Chair"; THING "Furniture"; ASSOC "Chair" -> "Furniture";')
    assert results == [cql.Ack(0), cql.Ack(1), cql.Ack(2)]
    assert cql.execute(model, 'DROP ASSOC "Chair" -> "Furniture"; DROP THING "Chair";') == [
        cql.Ack(3), cql.Ack(4),
    ]


def test_errors_carry_statement_position(fig1):
    with pytest.raises(DuplicateAssociation) as info:
        cql.execute(fig1, 'STATS;\nASSOC "Chair" -> "Furniture";')
    assert info.value.position == (2, 1)


def test_asof_resolves_labels_in_the_past(fig1):
    with pytest.raises(UnknownLabel):
        cql.evaluate(fig1, cql.AsOf(2, cql.Owners("Table")))


def test_rendering(fig1, fig2):
    [paths] = cql.execute(fig1, 'PATHS "Table" TO "Made of wood";')
    assert paths.lines() == ["Table - Furniture - Chair - Made of wood", "1 path(s), unique: yes"]
    [trace] = cql.execute(fig1, 'TRACE "Chair";')
    assert trace.lines() == ["0 created", "2 became-member Furniture", "4 became-member Made of wood"]
    [report] = cql.execute(fig2, "VALIDATE;")
    assert "warning: non-unique path: Chair / Table" in report.lines()
    assert report.to_json()["components"] == 1
    [table] = cql.execute(fig1, "STATS;")
    assert dict(table.rows)["clock"] == 7


def test_read_statements_keep_hash_and_mutations_change_it(fig1, tmp_path):
    reads = [
        'OWNERS OF "Chair";', 'MEMBERS OF "Furniture";', 'REACH "Chair" ANY;',
        'PATHS "Chair" TO "Table";', 'TRACE "Chair";', 'ASOF 3 { OWNERS OF "Chair"; }',
        "VALIDATE;", "STATS;", f'EXPORT DOT "{tmp_path / "a.dot"}";',
        f'EXPORT SQL "{tmp_path / "a.sql"}";',
    ]
    before = fig1.state_hash()
    for source in reads:
        cql.execute(fig1, source)
        assert fig1.state_hash() == before
    for source in ['THING "Sofa";', 'ASSOC "Sofa" -> "Furniture";',
                   'DROP ASSOC "Sofa" -> "Furniture";', 'DROP THING "Sofa";']:
        cql.execute(fig1, source)
        assert fig1.state_hash() != before
        before = fig1.state_hash()


def test_exports_write_files(fig1, tmp_path):
    dot, sql = tmp_path / "m.dot", tmp_path / "m.sql"
    cql.execute(fig1, f'EXPORT DOT "{dot}"; EXPORT SQL "{sql}";')
    assert dot.read_text() == storage.render_dot(fig1)
    assert sql.read_text().startswith("CREATE TABLE thing")
