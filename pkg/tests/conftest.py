import sys

from phifix.scenario import corpus_paths, load_scenario

CORPUS = {p.stem: p for p in corpus_paths()}


def corpus_system(stem: str, **kw):
    return load_scenario(CORPUS[stem]).system(**kw)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
