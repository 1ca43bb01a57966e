"""Hypothesis strategies for well-sorted terms."""

from hypothesis import strategies as st

from syguskit.terms import Apply, Let, Var, mk_bool, mk_bv, mk_int, mk_str

INT_VARS = ["x", "y", "z"]


def int_terms(max_leaves: int = 12, vars=INT_VARS, allow_let: bool = False):
    leaves = st.one_of(
        st.integers(-20, 20).map(mk_int),
        st.sampled_from(vars).map(Var),
    )

    def extend(children):
        bools = st.one_of(
            st.tuples(st.sampled_from(["<=", "<", ">=", ">", "="]), children, children).map(
                lambda t: Apply(t[0], (t[1], t[2]))),
            st.booleans().map(mk_bool),
        )
        options = [
            st.tuples(st.sampled_from(["+", "-", "*"]), children, children).map(
                lambda t: Apply(t[0], (t[1], t[2]))),
            st.tuples(children).map(lambda t: Apply("-", t)),
            st.tuples(bools, children, children).map(lambda t: Apply("ite", t)),
            st.tuples(st.sampled_from(["div", "mod"]), children, children).map(
                lambda t: Apply(t[0], (t[1], t[2]))),
        ]
        if allow_let:
            options.append(st.tuples(children, children).map(
                lambda t: Let((("w", t[0]),), Apply("+", (Var("w"), t[1])))))
        return st.one_of(*options)

    return st.recursive(leaves, extend, max_leaves=max_leaves)


def int_envs(vars=INT_VARS):
    return st.fixed_dictionaries({v: st.integers(-50, 50) for v in vars})


def bv_literals(width: int):
    return st.integers(0, (1 << width) - 1).map(lambda v: mk_bv(v, width))


def str_literals():
    return st.text(alphabet="ab \"\\", max_size=4).map(mk_str)
