#!/usr/bin/env python3
"""
Test the quadrule command line: output formats, backend explanation and exit codes
"""

import io
import json
import logging
import math

import pytest

from services.quadrature.cli import EXIT_NOT_COMPUTABLE, EXIT_OK, EXIT_USAGE, run
from services.quadrature.legendre import TABLE_HEADER, parse_table

# Configure logging
logging.basicConfig(level=logging.INFO)


def run_cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_compute_json():
    code, out, err = run_cli("compute", "--family", "hermite", "-n", "1", "--format", "json")
    assert code == EXIT_OK, err
    payload = json.loads(out)
    assert payload["spec"] == {"family": "hermite", "n": 1}
    assert payload["records"][0]["node"] == 0.0
    assert payload["records"][0]["weight"] == pytest.approx(math.sqrt(math.pi), rel=1e-15)


def test_compute_csv():
    code, out, _ = run_cli("compute", "--family", "legendre", "-n", "3", "--scaled")
    assert code == EXIT_OK
    lines = out.strip().splitlines()
    assert lines[0] == "index,node,weight,scaled_weight"
    assert len(lines) == 4
    index, node, weight, _ = lines[2].split(",")
    assert (index, float(node)) == ("2", 0.0)
    assert float(weight) == pytest.approx(8 / 9, rel=1e-15)


def test_compute_csv_barycentric():
    code, out, _ = run_cli("compute", "--family", "legendre", "-n", "2", "--lobatto", "--barycentric")
    assert code == EXIT_OK
    lines = out.strip().splitlines()
    assert lines[0] == "index,node,weight,barycentric"
    assert len(lines) == 5


def test_numbers_round_trip():
    code, out, _ = run_cli("compute", "--family", "laguerre", "-n", "5", "--alpha", "0.3", "--format", "json")
    assert code == EXIT_OK
    text = out
    for record in json.loads(text)["records"]:
        assert repr(record["weight"]) in text


def test_explain():
    code, out, _ = run_cli("compute", "--family", "jacobi", "-n", "300", "--alpha", "0.9", "--beta", "0.9", "--explain")
    assert code == EXIT_OK
    assert out.splitlines()[0] == "backend: asymptotic"
    assert out.splitlines()[1].startswith("reason: ")


def test_usage_errors():
    code, out, err = run_cli("compute", "--family", "bessel", "-n", "5")
    assert code == EXIT_USAGE
    assert err.startswith("error:")
    assert out == ""

    code, _, err = run_cli("compute", "--family", "jacobi", "-n", "0")
    assert code == EXIT_USAGE
    assert err.startswith("error:")

    code, _, err = run_cli("compute", "--family", "hermite", "-n", "4", "--radau", "left")
    assert code == EXIT_USAGE


def test_not_computable():
    code, _, err = run_cli("compute", "--family", "hermite", "-n", "20", "--method", "asymptotic")
    assert code == EXIT_NOT_COMPUTABLE
    assert err.startswith("error:")


def test_validate():
    code, out, err = run_cli("validate", "--family", "hermite", "-n", "30", "--tolerance", "1e-12")
    assert code == EXIT_OK, err
    assert "reference: newton_extended" in out
    assert out.strip().endswith("status: passed")


def test_gentable_to_stdout():
    code, out, _ = run_cli("gentable", "--output", "-", "--max-n", "3")
    assert code == EXIT_OK
    assert out.splitlines()[0] == TABLE_HEADER
    table = parse_table(out)
    assert sorted(table) == [1, 2, 3]
    nodes, weights = table[3]
    assert list(nodes) == pytest.approx([0.0, math.sqrt(0.6)], abs=4e-16)
    assert list(weights) == pytest.approx([8 / 9, 5 / 9], rel=1e-15)


def main():
    """Run all CLI tests"""
    print("🧪 Testing quadrule CLI")
    print("=" * 50)
    tests = [
        test_compute_json,
        test_compute_csv,
        test_compute_csv_barycentric,
        test_numbers_round_trip,
        test_explain,
        test_usage_errors,
        test_not_computable,
        test_validate,
        test_gentable_to_stdout,
    ]
    for test in tests:
        test()
        print(f"✅ {test.__name__}")


if __name__ == "__main__":
    main()
