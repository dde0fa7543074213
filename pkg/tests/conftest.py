import glob
import os

import pytest

from minicpp_bmc.lowering import lower
from minicpp_bmc.parser import parse_source
from minicpp_bmc.sema import synthesize_defaults, typecheck
from minicpp_bmc.symex import UnwindConfig, symex
from minicpp_bmc.templates import monomorphize

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
CORPUS = os.path.join(ROOT, "corpus")

BIRD_PENGUIN = os.path.join(CORPUS, "polymorphism-sub", "bird_penguin.cpp")
FRIEND18 = os.path.join(CORPUS, "gcc-template-tests-sub", "friend18.cpp")


def frontend(source: str, name: str = "test.cpp"):
    """parse -> typecheck -> defaults -> monomorphize."""
    ast, _ = typecheck(parse_source(source, name))
    return monomorphize(synthesize_defaults(ast))


def build_model(source: str, name: str = "test.cpp"):
    return lower(frontend(source, name))


def run_symex(source: str, name: str = "test.cpp", **cfg):
    model = build_model(source, name)
    return model, symex(model, UnwindConfig(**cfg))


def corpus_cases():
    out = []
    for cpp in sorted(glob.glob(os.path.join(CORPUS, "*", "*.cpp"))):
        lines = open(cpp[:-4] + ".expect").read().splitlines()
        expect = lines[0].strip()
        flags = lines[1].split() if len(lines) > 1 and lines[1].strip() else []
        out.append((cpp, expect, flags))
    return out


def unwind_from_flags(flags):
    k, ua, ov, bd, mem = 10, False, False, False, False
    it = iter(flags)
    for f in it:
        if f == "--unwind":
            k = int(next(it))
        elif f == "--unwinding-assertions":
            ua = True
        elif f == "--overflow-check":
            ov = True
        elif f == "--bounds-check":
            bd = True
        elif f == "--memory-check":
            mem = True
    return UnwindConfig(k=k, unwinding_assertions=ua, overflow=ov, bounds=bd, memory=mem)


@pytest.fixture(scope="session")
def bird_source():
    return open(BIRD_PENGUIN).read()


@pytest.fixture(scope="session")
def friend18_source():
    return open(FRIEND18).read()
