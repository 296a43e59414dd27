"""Regenerate the bundled corpus test suites from golden runs of the unmutated programs.

    python scripts/build_corpus_suites.py
"""

from pathlib import Path

from ppdgfl.minilang import parse_file
from ppdgfl.tracer import golden_suite

CORPUS = Path(__file__).resolve().parents[1] / "src" / "ppdgfl" / "corpus"

INPUTS = {
    "linecount": [{"lines": n} for n in (0, 1, 2, 3, 4, 5, 7, 9, -1, 12)],
    "gcd": [
        {"a": 12, "b": 18}, {"a": 17, "b": 5}, {"a": 0, "b": 9}, {"a": 9, "b": 0},
        {"a": -24, "b": 36}, {"a": 100, "b": -75}, {"a": 7, "b": 7}, {"a": 81, "b": 27},
        {"a": 35, "b": 64}, {"a": -8, "b": -12},
    ],
    "bubblesort": [
        {"a": 1, "b": 2, "c": 3}, {"a": 3, "b": 2, "c": 1}, {"a": 2, "b": 3, "c": 1},
        {"a": 2, "b": 1, "c": 3}, {"a": 5, "b": 5, "c": 1}, {"a": -4, "b": 0, "c": -9},
        {"a": 7, "b": -7, "c": 0}, {"a": 0, "b": 0, "c": 0}, {"a": 10, "b": 30, "c": 20},
        {"a": 3, "b": 1, "c": 2},
    ],
    "triangle": [
        {"a": 3, "b": 3, "c": 3}, {"a": 3, "b": 4, "c": 5}, {"a": 5, "b": 5, "c": 8},
        {"a": 2, "b": 7, "c": 7}, {"a": 1, "b": 2, "c": 3}, {"a": 0, "b": 4, "c": 4},
        {"a": 6, "b": 5, "c": 6}, {"a": 10, "b": 2, "c": 3}, {"a": 4, "b": 6, "c": 9},
        {"a": -1, "b": 2, "c": 2},
    ],
    "grade": [{"marks": m} for m in (95, 90, 80, 75, 60, 65, 45, 40, 39, 10, 0, 100)],
    "salary": [
        {"basic": 10000, "years": 1, "rating": 3}, {"basic": 20000, "years": 6, "rating": 5},
        {"basic": 40000, "years": 10, "rating": 4}, {"basic": 30000, "years": 2, "rating": 4},
        {"basic": 5000, "years": 0, "rating": 5}, {"basic": 50000, "years": 3, "rating": 2},
        {"basic": 35000, "years": 7, "rating": 1}, {"basic": 1000, "years": 8, "rating": 4},
        {"basic": 60000, "years": 6, "rating": 5},
    ],
    "discount": [
        {"amount": 200, "member": 0}, {"amount": 200, "member": 1}, {"amount": 800, "member": 0},
        {"amount": 800, "member": 1}, {"amount": 1500, "member": 0}, {"amount": 1500, "member": 1},
        {"amount": 30, "member": 1}, {"amount": 1000, "member": 0}, {"amount": 501, "member": 1},
        {"amount": 0, "member": 0},
    ],
    "caesar": [
        {"x": 123, "k": 1}, {"x": 909, "k": 3}, {"x": 0, "k": 5}, {"x": 45678, "k": 12},
        {"x": 111, "k": -1}, {"x": 7, "k": 0}, {"x": 5050, "k": 5}, {"x": 89, "k": -13},
        {"x": 1000, "k": 9},
    ],
    "diffiehellman": [
        {"g": 5, "secret": 6, "p": 23}, {"g": 5, "secret": 15, "p": 23}, {"g": 2, "secret": 10, "p": 1000},
        {"g": 3, "secret": 0, "p": 7}, {"g": 7, "secret": 1, "p": 13}, {"g": 10, "secret": 5, "p": 3},
        {"g": 4, "secret": 13, "p": 497}, {"g": 9, "secret": 7, "p": 11}, {"g": 6, "secret": 2, "p": 6},
    ],
    "primes": [{"n": n} for n in (0, 1, 2, 3, 10, 13, 20, 25, 30, 4)],
    "transposition": [{"x": x} for x in (123, -456, 0, 7, 1200, 9001, -5, 10, 86420)],
    "hillcipher": [
        {"p1": 7, "p2": 4, "k1": 3, "k2": 3, "k3": 2, "k4": 5},
        {"p1": 11, "p2": 11, "k1": 3, "k2": 3, "k3": 2, "k4": 5},
        {"p1": 0, "p2": 0, "k1": 9, "k2": 4, "k3": 5, "k4": 7},
        {"p1": 25, "p2": 1, "k1": 6, "k2": 24, "k3": 1, "k4": 13},
        {"p1": 3, "p2": 19, "k1": -2, "k2": 5, "k3": 4, "k4": -7},
        {"p1": 12, "p2": 20, "k1": 1, "k2": 0, "k3": 0, "k4": 1},
        {"p1": 5, "p2": 17, "k1": -3, "k2": -8, "k3": 11, "k4": 2},
        {"p1": 8, "p2": 8, "k1": 2, "k2": 3, "k3": 1, "k4": 4},
    ],
    "keystream": [
        {"seed": 0, "n": 3}, {"seed": 1, "n": 4}, {"seed": 200, "n": 2}, {"seed": 300, "n": 5},
        {"seed": 42, "n": 0}, {"seed": 7, "n": 1}, {"seed": 255, "n": 6}, {"seed": 99, "n": 3},
        {"seed": 128, "n": 4},
    ],
    "distancevector": [
        {"d1": 10, "d2": 3, "d3": 1, "via": 2}, {"d1": 5, "d2": 9, "d3": 9, "via": 1},
        {"d1": 20, "d2": 15, "d3": 2, "via": 4}, {"d1": 150, "d2": 140, "d3": 130, "via": 5},
        {"d1": 50, "d2": 10, "d3": 30, "via": 10}, {"d1": 7, "d2": 7, "d3": 7, "via": 0},
        {"d1": 120, "d2": 60, "d3": 90, "via": 30}, {"d1": 0, "d2": 0, "d3": 0, "via": 0},
        {"d1": 30, "d2": 25, "d3": 5, "via": 6},
    ],
}


def main():
    for name, cases in sorted(INPUTS.items()):
        ast = parse_file(CORPUS / f"{name}.mini")
        suite = golden_suite(ast, [(f"t{i:02d}", case) for i, case in enumerate(cases, start=1)], program=f"{name}.mini")
        suite.save(CORPUS / f"{name}.suite.json")
        print(f"{name}: {len(suite)} cases")


if __name__ == "__main__":
    main()
