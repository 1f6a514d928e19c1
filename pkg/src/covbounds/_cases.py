"""Closed forms of zeta_1 for the seven index-coincidence cases.

Each case is written over canonical variables ``a, b, c, d`` standing for the
positions ``i, j, k, l`` of ``Cov(S_ij, S_kl)``; a position that repeats an
earlier variable reuses that variable's letter.  ``E(*letters)`` is the raw
sample mean of the product of the named variables.  The expressions are the
expanded covariance of the centred kernels, with every population expectation
replaced by its sample moment.
"""

PATTERNS = {
    1: "abcd",
    2: "aacc",
    3: "aacd",
    4: "abad",
    5: "abab",
    6: "aaad",
    7: "aaaa",
}


def _case1(E):
    return 0.25 * (
        E("a", "b", "c", "d") - E("a") * E("b", "c", "d") - E("b") * E("a", "c", "d")
        - E("c") * E("a", "b", "d") + E("a") * E("c") * E("b", "d")
        + E("b") * E("c") * E("a", "d")
        - E("a", "b", "c") * E("d") + E("a") * E("d") * E("b", "c")
        + E("b") * E("d") * E("a", "c")
        - (E("a", "b") - 2 * E("a") * E("b")) * (E("c", "d") - 2 * E("c") * E("d"))
    )


def _case2(E):
    return 0.25 * (
        E("a", "a", "c", "c") - 2 * E("a") * E("a", "c", "c")
        - 2 * E("a", "a", "c") * E("c") + 4 * E("a", "c") * E("a") * E("c")
        - (E("a", "a") - 2 * E("a") ** 2) * (E("c", "c") - 2 * E("c") ** 2)
    )


def _case3(E):
    return 0.25 * (
        E("a", "a", "c", "d") - 2 * E("a", "c", "d") * E("a") - E("a", "a", "d") * E("c")
        + 2 * E("a", "d") * E("a") * E("c") - E("a", "a", "c") * E("d")
        + 2 * E("a", "c") * E("a") * E("d")
        - (E("a", "a") - 2 * E("a") ** 2) * (E("c", "d") - 2 * E("c") * E("d"))
    )


def _case4(E):
    return 0.25 * (
        E("a", "a", "b", "d") - E("a") * E("b", "a", "d") - E("a", "a", "d") * E("b")
        - E("a", "b", "d") * E("a") + E("a") ** 2 * E("b", "d")
        + E("a", "d") * E("b") * E("a")
        - E("a", "a", "b") * E("d") + E("a") * E("b", "a") * E("d")
        + E("a", "a") * E("b") * E("d")
        - (E("a", "b") - 2 * E("a") * E("b")) * (E("a", "d") - 2 * E("a") * E("d"))
    )


def _case5(E):
    return 0.25 * (
        E("a", "a", "b", "b") - 2 * E("a", "b", "b") * E("a") + E("a") ** 2 * E("b", "b")
        - 2 * E("a", "a", "b") * E("b") + 2 * E("a") * E("b") * E("b", "a")
        + E("a", "a") * E("b") ** 2
        - (E("a", "b") - 2 * E("a") * E("b")) ** 2
    )


def _case6(E):
    return 0.25 * (
        E("a", "a", "a", "d") - 3 * E("a", "a", "d") * E("a") + 2 * E("a", "d") * E("a") ** 2
        - E("a", "a", "a") * E("d") + 2 * E("a", "a") * E("a") * E("d")
        - (E("a", "a") - 2 * E("a") ** 2) * (E("a", "d") - 2 * E("a") * E("d"))
    )


def _case7(E):
    return 0.25 * (
        E("a", "a", "a", "a") - 4 * E("a", "a", "a") * E("a") + 4 * E("a", "a") * E("a") ** 2
        - (E("a", "a") - 2 * E("a") ** 2) ** 2
    )


FORMULAS = {
    1: _case1,
    2: _case2,
    3: _case3,
    4: _case4,
    5: _case5,
    6: _case6,
    7: _case7,
}
