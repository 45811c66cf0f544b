import hashlib
import struct

from hypothesis import given
from hypothesis import strategies as st

from autotrace.generators import jacobi
from autotrace.tokens import (
    UNTRACEABLE_BIT,
    Privilege,
    RegionArg,
    TaskDescriptor,
    canonical_bytes,
    hash_task,
    is_untraceable,
    period_of,
    task,
    tokenize_stream,
)

BASE = task("DOT", ("R", "read", "f"), ("x1", "read", ("f", "g"), "p0"))


def test_hash_matches_hand_built_encoding():
    # name "A", zero arguments
    raw = struct.pack("<I", 1) + b"A" + struct.pack("<I", 0)
    assert canonical_bytes(task("A")) == raw
    expected = int.from_bytes(hashlib.blake2b(raw, digest_size=8).digest(), "little") & (UNTRACEABLE_BIT - 1)
    assert hash_task(task("A")) == expected


def test_hash_of_region_argument_encoding():
    def s(x):
        return struct.pack("<I", len(x)) + x

    raw = s(b"T") + struct.pack("<I", 1) + s(b"r") + s(b"write") + struct.pack("<I", 2) + s(b"a") + s(b"b")
    raw += b"\x01" + s(b"p")
    t = task("T", ("r", "write", ("a", "b"), "p"))
    assert canonical_bytes(t) == raw


def flips(t: TaskDescriptor):
    a0 = t.args[0]
    yield TaskDescriptor("DOT2", t.args)
    yield TaskDescriptor(t.task_name, (RegionArg("R2", a0.fields, a0.privilege),) + t.args[1:])
    yield TaskDescriptor(t.task_name, (RegionArg(a0.region_id, a0.fields, Privilege.WRITE),) + t.args[1:])
    yield TaskDescriptor(t.task_name, (RegionArg(a0.region_id, ("g",), a0.privilege),) + t.args[1:])
    yield TaskDescriptor(t.task_name, (RegionArg(a0.region_id, a0.fields, a0.privilege, "p1"),) + t.args[1:])
    yield TaskDescriptor(t.task_name, t.args[::-1])
    yield TaskDescriptor(t.task_name, t.args[:1])
    yield TaskDescriptor(t.task_name, t.args, untraceable=True)


def test_every_single_field_change_changes_the_token():
    tokens = [hash_task(BASE)] + [hash_task(v) for v in flips(BASE)]
    assert len(set(tokens)) == len(tokens)


def test_identical_descriptors_hash_identically():
    again = task("DOT", ("R", "read", "f"), ("x1", "read", ["f", "g"], "p0"))
    assert again == BASE
    assert hash_task(again) == hash_task(BASE)


def test_encoding_is_unambiguous_across_name_boundaries():
    assert hash_task(task("ab", ("c", "read", "f"))) != hash_task(task("a", ("bc", "read", "f")))


def test_untraceable_tokens_live_in_their_own_namespace():
    plain = hash_task(BASE)
    marked = hash_task(TaskDescriptor(BASE.task_name, BASE.args, untraceable=True))
    assert not is_untraceable(plain)
    assert is_untraceable(marked)
    assert marked & ~UNTRACEABLE_BIT == plain


def test_jacobi_stream_has_period_six():
    toks = tokenize_stream(jacobi(4))
    assert len(toks) == 12
    assert period_of(toks) == 6
    assert all(toks[i] == toks[i + 6] for i in range(6))
    assert len(set(toks[:6])) == 5  # SUB is the same in both halves
    assert toks[1] == toks[4]


def test_period_of_edge_cases():
    assert period_of([]) == 0
    assert period_of([7]) == 1
    assert period_of([1, 2, 3]) == 3
    assert period_of([1, 2, 1, 2, 1]) == 2


names = st.text(alphabet="abcXYZ_0", min_size=1, max_size=6)
args = st.tuples(
    names,
    st.sampled_from([p.value for p in Privilege]),
    st.lists(names, min_size=1, max_size=3, unique=True),
    st.one_of(st.none(), names),
)


@given(names, st.lists(args, max_size=3), st.booleans())
def test_hash_is_deterministic_and_64_bit(name, arg_list, untraceable):
    t = task(name, *[(r, p, f) if part is None else (r, p, f, part) for r, p, f, part in arg_list],
             untraceable=untraceable)
    h = hash_task(t)
    assert h == hash_task(t)
    assert 0 <= h < 1 << 64
    assert is_untraceable(h) == untraceable
