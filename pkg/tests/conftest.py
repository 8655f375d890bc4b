import itertools

import pytest

from lefkit.finite import CayleyTable, semigroups_of_order


def raw_associative_count(n: int) -> int:
    """Count associative n x n tables by brute force over all n^(n^2) fillings."""
    count = 0
    for flat in itertools.product(range(n), repeat=n * n):
        rows = [flat[i * n:(i + 1) * n] for i in range(n)]
        if all(rows[rows[i][j]][k] == rows[i][rows[j][k]]
               for i in range(n) for j in range(n) for k in range(n)):
            count += 1
    return count


def naive_power(table: CayleyTable, s: int, k: int) -> int:
    x = s
    for _ in range(k - 1):
        x = table.rows[x][s]
    return x


@pytest.fixture(scope="session")
def labeled_upto4():
    return [t for n in range(1, 5) for t in semigroups_of_order(n)]


@pytest.fixture(scope="session")
def iso_upto4():
    return [t for n in range(1, 5) for t in semigroups_of_order(n, "iso")]


# one line per acceptance criterion, printed after the run
ACCEPTANCE: list[str] = []


def record(number: int, title: str, ok: bool, detail: str = "") -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d}: {title}" + (f" ({detail})" if detail else "")
    ACCEPTANCE.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
