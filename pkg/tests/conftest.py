import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from nearcut.generators import gen_fig2  # noqa: E402
from nearcut.graph import enumerate_near_min_cuts  # noqa: E402
from nearcut.pipeline import InstanceSpec, RunConfig, analyze, corpus, run_pipeline  # noqa: E402
from nearcut.structure import build_polygon, components  # noqa: E402

# boundary <= 8 with minimum cut 7
FIG2_ETA = Fraction(1, 5)


@pytest.fixture(scope="session")
def fig2():
    return gen_fig2()


@pytest.fixture(scope="session")
def fig2_structure(fig2):
    cuts = enumerate_near_min_cuts(fig2, FIG2_ETA)
    comps = components(cuts, fig2.n)
    big = max(comps, key=len)
    P = build_polygon(big, fig2, k=7)
    return cuts, comps, big, P


def stress_specs():
    """Heavy cycles plus light random cycles, at three values of eta.

    Unlike most of the corpus these have real crossing components, so covers
    and the laminar recursion get exercised beyond single cuts.
    """
    out = []
    for eta in (Fraction(1, 40), Fraction(1, 20), Fraction(1, 10)):
        for s in range(40):
            out.append((InstanceSpec("heavy-cycle", n=6 + s % 7, k=20 + 3 * (s % 7), c=1 + s % 3, seed=s), eta))
    return out


@pytest.fixture(scope="session")
def corpus_runs():
    """(spec, graph, analysis, report) for every corpus instance at eta = 1/40."""
    out = []
    for spec in corpus():
        G = spec.build()
        an = analyze(G, RunConfig())
        rep = run_pipeline(G, RunConfig(), kind=spec.kind)
        out.append((spec, G, an, rep))
    return out


@pytest.fixture(scope="session")
def stress_runs():
    out = []
    for spec, eta in stress_specs():
        G = spec.build()
        an = analyze(G, RunConfig(eta=eta))
        rep = run_pipeline(G, RunConfig(eta=eta), kind=spec.kind)
        out.append((spec, G, an, rep))
    return out
