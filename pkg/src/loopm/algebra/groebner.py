"""Buchberger's algorithm with Gebauer-Moeller criteria, reduced bases,
ideal membership and lex-order variable elimination."""

from ..errors import ResourceLimit
from ..limits import DEFAULT_LIMITS
from .poly import LEX, Ideal, MonomialOrder, convert, poly_ring, ring_names, variables_of


def _lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def _divides(a, b):
    return all(x <= y for x, y in zip(a, b))


def _coprime(a, b):
    return all(not (x and y) for x, y in zip(a, b))


def _quo(a, b):
    return tuple(x - y for x, y in zip(a, b))


def s_polynomial(f, g):
    m = _lcm(f.LM, g.LM)
    one = f.ring.domain.one
    return (f.mul_term((_quo(m, f.LM), one / f.LC))
            - g.mul_term((_quo(m, g.LM), one / g.LC)))


def _check_size(h, limits):
    if len(h) > limits.max_terms:
        raise ResourceLimit(f"intermediate polynomial has {len(h)} terms "
                            f"(limit {limits.max_terms})")


def groebner_basis(gens, order=None, limits=DEFAULT_LIMITS):
    """Reduced Groebner basis of the ideal generated by ``gens``.

    ``order`` is a :class:`MonomialOrder`; when omitted the ring of the
    first generator (and its order) is used.  The result is monic,
    inter-reduced and sorted by descending leading monomial.
    """
    gens = list(gens)
    if not gens:
        raise ValueError("groebner_basis needs at least one generator")
    ring = order.ring(gens[0].ring.domain) if order is not None else gens[0].ring
    polys = [convert(g, ring) for g in gens]
    polys = [p.monic() for p in polys if p]
    if not polys:
        return []

    key = ring.order
    f = []
    sugar = []
    G = set()
    B = set()

    def degree(m):
        return sum(m)

    def pair_key(pair):
        i, j = pair
        m = _lcm(f[i].LM, f[j].LM)
        s = max(sugar[i] + degree(m) - degree(f[i].LM), sugar[j] + degree(m) - degree(f[j].LM))
        return (s, key(m), i, j)

    def update(G, B, ih):
        mh = f[ih].LM
        C = [ig for ig in G]
        D = []
        while C:
            ig = C.pop()
            mg = f[ig].LM
            lcm_hg = _lcm(mh, mg)

            def dominated(ip):
                return _divides(_lcm(mh, f[ip].LM), lcm_hg)

            if _coprime(mh, mg) or (not any(dominated(ip) for ip in C)
                                    and not any(dominated(ip) for ip in D)):
                D.append(ig)
        E = {tuple(sorted((ih, ig))) for ig in D if not _coprime(mh, f[ig].LM)}
        B_new = set()
        for i, j in B:
            mi, mj = f[i].LM, f[j].LM
            lcm_ij = _lcm(mi, mj)
            if (not _divides(mh, lcm_ij) or _lcm(mi, mh) == lcm_ij
                    or _lcm(mj, mh) == lcm_ij):
                B_new.add((i, j))
        B_new |= E
        G_new = {ig for ig in G if not _divides(mh, f[ig].LM)}
        G_new.add(ih)
        return G_new, B_new

    polys.sort(key=lambda p: key(p.LM))
    for p in polys:
        if G:
            p = p.rem([f[i] for i in sorted(G)])
            if not p:
                continue
            p = p.monic()
        f.append(p)
        sugar.append(p.degree() if ring.ngens else 0)
        sugar[-1] = max(sum(m) for m in p.monoms())
        G, B = update(G, B, len(f) - 1)

    processed = 0
    while B:
        pair = min(B, key=pair_key)
        B.remove(pair)
        processed += 1
        if processed > limits.max_pairs:
            raise ResourceLimit(f"Buchberger pair queue exceeded {limits.max_pairs} S-pairs")
        i, j = pair
        s_sugar = pair_key(pair)[0]
        h = s_polynomial(f[i], f[j]).rem([f[k] for k in sorted(G)])
        if not h:
            continue
        _check_size(h, limits)
        h = h.monic()
        f.append(h)
        sugar.append(max(s_sugar, max(sum(m) for m in h.monoms())))
        G, B = update(G, B, len(f) - 1)

    return reduce_basis([f[i] for i in G])


def reduce_basis(G):
    """Turn a Groebner basis into the unique reduced one, sorted by LM (descending)."""
    G = [g.monic() for g in G if g]
    minimal = []
    for g in sorted(G, key=lambda p: p.ring.order(p.LM)):
        if not any(_divides(h.LM, g.LM) for h in minimal):
            minimal.append(g)
    reduced = []
    for i, g in enumerate(minimal):
        others = minimal[:i] + minimal[i + 1:]
        r = g.rem(others) if others else g
        reduced.append(r.monic())
    reduced.sort(key=lambda p: p.ring.order(p.LM), reverse=True)
    return reduced


def normal_form(f, basis):
    if not basis:
        return f
    return convert(f, basis[0].ring).rem(basis)


def is_groebner(G):
    """Buchberger's criterion: every S-polynomial reduces to zero."""
    for i in range(len(G)):
        for j in range(i + 1, len(G)):
            if s_polynomial(G[i], G[j]).rem(G):
                return False
    return True


def is_member(f, basis):
    return not normal_form(f, basis)


def eliminate_vars(ideal, kill, limits=DEFAULT_LIMITS):
    """Generators of ``ideal`` intersected with the ring without ``kill``.

    A lex basis is computed with the variables to eliminate ranked
    highest; the basis elements free of them generate the elimination
    ideal (and are a reduced Groebner basis of it).
    """
    kill = set(kill)
    unknown = kill - set(ideal.variables)
    if unknown:
        raise ValueError(f"cannot eliminate non-ambient variables {sorted(unknown)}")
    keep = tuple(v for v in ideal.variables if v not in kill)
    high = tuple(v for v in ideal.variables if v in kill)
    order = MonomialOrder(LEX, high + keep)
    if not ideal.generators:
        return Ideal([], keep, LEX, ideal.domain)
    basis = groebner_basis(ideal.generators, order, limits)
    kept = [g for g in basis if not (variables_of(g) & kill)]
    target = poly_ring(keep, ideal.domain, LEX)
    return Ideal([convert(g, target) for g in kept], keep, LEX, ideal.domain)


__all__ = ["groebner_basis", "reduce_basis", "normal_form", "is_groebner", "is_member",
           "eliminate_vars", "s_polynomial", "ring_names"]
