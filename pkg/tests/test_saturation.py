import pytest

from gsc.errors import ResourceLimit
from gsc.fields import FieldSpec
from gsc.quotient import QuotientConfig, block_dimension
from gsc.saturation import saturation_oracle
from gsc.tensor import multidegrees, n_triangle_entries

Q = FieldSpec.rational()


def test_guards():
    with pytest.raises(ResourceLimit):
        saturation_oracle(3, 4)
    with pytest.raises(ResourceLimit):
        saturation_oracle(2, 6)


def test_single_letter_closure():
    rep = saturation_oracle(1, 4)
    assert [(a.arity, a.relation_rank, a.quotient_dim) for a in rep.arities] == [
        (1, 0, 1),
        (2, 0, 1),
        (3, 0, 1),
        (4, 1, 0),
    ]
    assert rep.arity(4).block_ranks == (((3,), 1),)


def test_two_letter_closure_matches_published_dims():
    rep = saturation_oracle(2, 5)
    dims = [a.quotient_dim for a in rep.arities]
    assert dims == [1, 1, 2, 4, 1]
    assert rep.arity(4).relation_rank == 4
    assert rep.arity(5).relation_rank == 63


def test_oracle_blocks_match_relation_model(tmp_path):
    """The two independent routes agree block by block."""
    cfg = QuotientConfig(cache_dir=tmp_path / "cache", no_shortcut=True)
    for d, max_arity in ((1, 4), (2, 5)):
        rep = saturation_oracle(d, max_arity)
        for arity_rep in rep.arities:
            n = arity_rep.arity - 1
            oracle = dict(arity_rep.block_ranks)
            for k in multidegrees(n_triangle_entries(n), d):
                model_rank = block_dimension(n, k, d, Q, config=cfg).rank
                assert model_rank == oracle.get(k, 0), (d, n, k)
