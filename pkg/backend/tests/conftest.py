import json
from pathlib import Path

import pytest

REPO = Path(__file__).resolve().parent.parent.parent
FIXTURES = REPO / "fixtures"


@pytest.fixture(scope="session")
def conformance_vectors():
    path = FIXTURES / "decode_conformance.json"
    if not path.is_file():
        pytest.skip("shared conformance vectors not generated")
    return json.loads(path.read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def fixture_graph_linearized():
    path = FIXTURES / "us_covid_linearized.txt"
    if not path.is_file():
        pytest.skip("fixture graph linearization not generated")
    return path.read_text(encoding="utf-8").strip()


@pytest.fixture
def smoke_dataset_path(tmp_path):
    """Deterministic 100-record JSONL corpus in the training format."""
    subjects = ["Alpha Station", "Beta Array", "Gamma Relay", "Delta Grid"]
    relations = ["located in", "operated by", "measures", "reports to"]
    objects = ["the northern sector", "the survey team", "daily throughput",
               "the control hub"]
    rows = []
    for i in range(100):
        head = subjects[i % len(subjects)]
        relation = relations[(i // 4) % len(relations)]
        tail = objects[(i // 16) % len(objects)]
        triples = [[head, relation, tail]]
        if i % 3 == 0:
            triples.append([head, "commissioned in", f"19{50 + i % 50}"])
        text = f"{head} {relation} {tail}."
        rows.append(json.dumps({"triples": triples, "text": text}))
    path = tmp_path / "webnlg.jsonl"
    path.write_text("\n".join(rows) + "\n", encoding="utf-8")
    return tmp_path
