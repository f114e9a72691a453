# backend/tests/test_linear_ca.py
import random
from itertools import product

import numpy as np
import pytest
from hypothesis import given, strategies as st

from workbench import finite_field as ff
from workbench.marked_groups import FreeWord, cyclic_group, symmetric_group
from workbench.shift_space import PeriodicConfiguration
from workbench.ca_engine import ca_apply
from workbench.linear_ca import (
    GroupAlgebraElement,
    GroupAlgebraMatrix,
    LinearKernel,
    VectorConfiguration,
    WitnessVerdict,
    decode_symbol,
    encode_configuration,
    encode_vector,
    identity_kernel,
    kernel_convolution,
    kernel_to_ca,
    lin_apply,
    lin_decide,
    lin_inverse_kernel,
    lin_matrix,
    random_unit_pair,
    scalar_kernel,
    shift_kernel,
    stable_finiteness_witness,
    zero_kernel,
)
from workbench.shared.error_handler import DimensionMismatch, NotInvertible, NotOneSidedInverse

WORDS = [FreeWord.parse("A"), FreeWord.identity(), FreeWord.parse("a")]
SCALAR_KERNELS = [
    scalar_kernel(2, {w: c for w, c in zip(WORDS, coeffs)})
    for coeffs in product((0, 1), repeat=3)
]
S3 = symmetric_group(3)
s3_elements = st.tuples(*[st.integers(0, 2)] * 6).map(lambda c: GroupAlgebraElement(S3, 3, c))


def test_build_merges_and_drops_zero():
    kernel = LinearKernel.build(2, 1, [(WORDS[2], [[1]]), (WORDS[2], [[1]]), (WORDS[1], [[1]])])
    assert kernel.support == (FreeWord.identity(),)
    assert zero_kernel().support == ()


def test_kernel_dimension_checks():
    with pytest.raises(DimensionMismatch):
        LinearKernel(2, 2, (FreeWord.identity(),), (((1,),),))


def test_lin_apply_matches_matrix():
    kernel = scalar_kernel(3, {WORDS[0]: 1, WORDS[2]: 2})
    group = cyclic_group(5)
    x = VectorConfiguration.scalar(group, 3, [0, 1, 2, 0, 1])
    y = lin_apply(kernel, x)
    assert np.array_equal(y.flatten(), ff.matmul(lin_matrix(kernel, group), x.flatten(), 3))
    # y(g) = x(g-1) + 2 x(g+1)
    assert str(y) == "0,1,1,1,0"


@pytest.mark.parametrize("n", range(1, 9))
@pytest.mark.parametrize("kernel", SCALAR_KERNELS, ids=str)
def test_scalar_kernels_are_surjunctive(kernel, n):
    group = cyclic_group(n)
    decision = lin_decide(kernel, group)
    assert decision.injective == decision.surjective
    if decision.injective:
        inverse = lin_inverse_kernel(kernel, group)
        round_trip = lin_matrix(kernel_convolution(inverse, kernel), group)
        assert np.array_equal(round_trip, ff.identity(n))
    else:
        with pytest.raises(NotInvertible):
            lin_inverse_kernel(kernel, group)


def test_sum_of_neighbours_verdicts():
    kernel = scalar_kernel(2, {w: 1 for w in WORDS})
    # x(g-1) + x(g) + x(g+1) 은 3 | n 일 때만 특이
    assert lin_decide(kernel, cyclic_group(4)).verdict == "bijective"
    assert lin_decide(kernel, cyclic_group(6)).verdict == "non-injective, non-surjective"


def test_identity_and_zero_kernel():
    group = cyclic_group(3)
    assert lin_decide(identity_kernel(), group).rank == 3
    assert lin_decide(zero_kernel(), group).rank == 0


def test_inverse_on_vector_alphabet():
    kernel = LinearKernel.build(2, 2, [(FreeWord.identity(), [[1, 1], [0, 1]]), (WORDS[2], [[0, 1], [0, 0]])])
    group = cyclic_group(3)
    inverse = lin_inverse_kernel(kernel, group)
    x = VectorConfiguration.periodic([[1, 0], [0, 1], [1, 1]], 2)
    assert lin_apply(inverse, lin_apply(kernel, x)) == x


def test_symbol_encoding():
    assert encode_vector((1, 0, 1), 2) == 5
    assert decode_symbol(5, 2, 3) == (1, 0, 1)
    assert decode_symbol(encode_vector((2, 1), 3), 3, 2) == (2, 1)


@pytest.mark.parametrize("kernel", SCALAR_KERNELS, ids=str)
def test_kernel_to_ca_agrees_with_lin_apply(kernel):
    if not kernel.support:
        return
    x = VectorConfiguration.scalar(cyclic_group(5), 2, [1, 0, 0, 1, 1])
    tau = kernel_to_ca(kernel, rank=1)
    y = ca_apply(tau, PeriodicConfiguration(encode_configuration(x)))
    assert y.values == encode_configuration(lin_apply(kernel, x))


@given(s3_elements, s3_elements, s3_elements)
def test_group_algebra_is_associative(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


@given(s3_elements, s3_elements)
def test_regular_representation_is_multiplicative(a, b):
    assert np.array_equal((a * b).regular_matrix(), ff.matmul(a.regular_matrix(), b.regular_matrix(), 3))


def test_random_unit_pairs_are_two_sided_over_s3():
    rng = random.Random(0)
    for _ in range(100):
        M, L = random_unit_pair(S3, 2, 2, rng)
        witness = stable_finiteness_witness(M, L, "left")
        assert witness.verdict == WitnessVerdict.TWO_SIDED_CONFIRMED
        assert witness.representation_size == 12


def test_right_inverse_side():
    rng = random.Random(7)
    M, L = random_unit_pair(S3, 3, 2, rng)
    assert stable_finiteness_witness(L, M, "right").verdict == WitnessVerdict.TWO_SIDED_CONFIRMED


def test_witness_rejects_non_inverse():
    M = GroupAlgebraMatrix.identity(S3, 2, 2)
    L = GroupAlgebraMatrix.diagonal([GroupAlgebraElement.element(S3, 2, 1)] * 2)
    with pytest.raises(NotOneSidedInverse):
        stable_finiteness_witness(M, L, "left")


@pytest.mark.parametrize("n", range(1, 9))
def test_convolution_is_matrix_product(n):
    group = cyclic_group(n)
    matrices = {kernel: lin_matrix(kernel, group) for kernel in SCALAR_KERNELS}
    for k1 in SCALAR_KERNELS:
        for k2 in SCALAR_KERNELS:
            expected = ff.matmul(matrices[k1], matrices[k2], 2)
            assert np.array_equal(lin_matrix(kernel_convolution(k1, k2), group), expected)


def test_lin_matrix_examples():
    both = scalar_kernel(2, {FreeWord.identity(): 1, WORDS[2]: 1})
    z2 = cyclic_group(2)
    assert lin_matrix(both, z2).tolist() == [[1, 1], [1, 1]]
    decision = lin_decide(both, z2)
    assert (decision.rank, decision.injective, decision.surjective) == (1, False, False)
    assert lin_matrix(shift_kernel(WORDS[2]), cyclic_group(3)).tolist() == [[0, 1, 0], [0, 0, 1], [1, 0, 0]]
    assert np.array_equal(lin_matrix(identity_kernel(), cyclic_group(5)), ff.identity(5))


def test_inverse_of_shift_kernel():
    inverse = lin_inverse_kernel(shift_kernel(WORDS[2]), cyclic_group(4))
    assert inverse.support == (WORDS[0],)
    assert inverse.matrices == (((1,),),)
    assert lin_inverse_kernel(identity_kernel(), cyclic_group(4)).support == (FreeWord.identity(),)


def test_self_inverse_kernel():
    kernel = LinearKernel.build(2, 2, [(FreeWord.identity(), [[1, 1], [0, 1]])])
    inverse = lin_inverse_kernel(kernel, cyclic_group(3))
    assert inverse.support == (FreeWord.identity(),)
    assert inverse.matrices == kernel.matrices


def test_group_element_units_over_z3():
    z3 = cyclic_group(3)
    M = GroupAlgebraMatrix.diagonal([GroupAlgebraElement.element(z3, 2, 1)])
    L = GroupAlgebraMatrix.diagonal([GroupAlgebraElement.element(z3, 2, 2)])
    witness = stable_finiteness_witness(M, L, "left")
    assert witness.verdict == WitnessVerdict.TWO_SIDED_CONFIRMED
    assert witness.inverse == L
    assert witness.representation_size == 3
    identity = GroupAlgebraMatrix.identity(z3, 2, 1)
    assert stable_finiteness_witness(identity, identity).verdict == WitnessVerdict.TWO_SIDED_CONFIRMED
