import pytest

from circorder.freegroup import ReducedWord
from circorder.pingpong import klift, preset_schottky, preset_three_boundary, realize_moebius, realize_pl

AC_RESULTS: dict[str, str] = {}


def W(text: str, rank: int = 2) -> ReducedWord:
    return ReducedWord.parse(text, rank)


@pytest.fixture(scope="session")
def schottky1():
    return preset_schottky(1)


@pytest.fixture(scope="session")
def schottky2():
    return preset_schottky(2)


@pytest.fixture(scope="session")
def three_boundary():
    return preset_three_boundary()


@pytest.fixture(scope="session")
def moebius1(schottky1):
    return realize_moebius(schottky1)


@pytest.fixture(scope="session")
def pl1(schottky1):
    return realize_pl(schottky1)


@pytest.fixture(scope="session")
def lifted_moebius():
    cache = {}

    def get(n, k):
        if (n, k) not in cache:
            cache[n, k] = realize_moebius(klift(preset_schottky(n), k))
        return cache[n, k]

    return get


@pytest.fixture
def ac_record(request):
    """Record a one-line verdict for an acceptance criterion."""
    name = request.node.name.split("_")[1].replace("ac", "AC-")
    AC_RESULTS[name] = f"{name}: FAIL (did not complete)"

    def record(ok: bool, detail: str = ""):
        AC_RESULTS[name] = f"{name}: {'PASS' if ok else 'FAIL'}" + (f" ({detail})" if detail else "")
        print(AC_RESULTS[name])

    return record


def pytest_terminal_summary(terminalreporter):
    if AC_RESULTS:
        terminalreporter.section("acceptance criteria")
        for key in sorted(AC_RESULTS, key=lambda k: int(k.split("-")[1])):
            terminalreporter.write_line(AC_RESULTS[key])
