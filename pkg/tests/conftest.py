import pytest

from softq.data.mnist import fetch_mnist, load_from_dir


@pytest.fixture(scope="session")
def mnist_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("mnist")
    try:
        fetch_mnist(root, timeout=5.0)
    except FileNotFoundError as exc:
        pytest.skip(f"MNIST unavailable: {exc}")
    return root


@pytest.fixture(scope="session")
def mnist_images(mnist_dir):
    return load_from_dir(mnist_dir)[0]


_CRITERIA: list[str] = []


@pytest.fixture
def criterion(capsys):
    """``report(n, ok, detail)`` prints one pass/fail line and returns ``ok``."""

    def report(n: int, ok: bool, detail: str) -> bool:
        line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
        _CRITERIA.append(line)
        with capsys.disabled():
            print(f"\n{line}")
        return ok

    return report


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_CRITERIA, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
