"""Shared bits for the test suite: seeded data generators and comparers."""


def random_sequence(rng, n, sigma):
    """Uniform random symbols; rng is a random.Random."""
    return [rng.randrange(sigma) for _ in range(n)]


def skewed_sequence(rng, n, sigma):
    """Zipf-flavoured symbols so entropy-shaped structures get uneven codes."""
    weights = [1.0 / (k + 1) for k in range(sigma)]
    total = sum(weights)
    out = []
    for _ in range(n):
        r = rng.random() * total
        acc = 0.0
        for a, w in enumerate(weights):
            acc += w
            if r <= acc:
                out.append(a)
                break
        else:
            out.append(sigma - 1)
    return out


def random_bitmap(rng, n, density):
    return [1 if rng.random() < density else 0 for _ in range(n)]


def assert_query_equal(structs, seq, sigma, rng, queries_per_op=12):
    """Every structure answers access/rank/select like a direct scan."""
    from wvx.errors import NotEnoughOccurrences
    from wvx.oracle import naive_rank, naive_select

    n = len(seq)
    positions = list(range(1, n + 1))
    if n > 40:
        positions = [rng.randrange(1, n + 1) for _ in range(queries_per_op)] + [1, n]
    rank_queries = [(rng.randrange(sigma), rng.randrange(n + 1)) for _ in range(queries_per_op)]
    rank_queries += [(rng.randrange(sigma), 0), (rng.randrange(sigma), n)]
    select_symbols = [rng.randrange(sigma) for _ in range(queries_per_op)]
    expected_access = {i: seq[i - 1] for i in positions}
    expected_rank = {q: naive_rank(seq, *q) for q in rank_queries}
    occs = {a: naive_rank(seq, a, n) for a in select_symbols}
    select_queries = []
    for a in select_symbols:
        if occs[a]:
            j = rng.randrange(1, occs[a] + 1)
            select_queries.append((a, j, naive_select(seq, a, j)))
    for name, st in structs:
        for i in positions:
            assert st.access(i) == expected_access[i], (name, i, seq)
        for q, want in expected_rank.items():
            assert st.rank(*q) == want, (name, q, seq)
        for a, j, want in select_queries:
            assert st.select(a, j) == want, (name, a, j, seq)
        for a in select_symbols:
            try:
                st.select(a, occs[a] + 1)
            except NotEnoughOccurrences:
                pass
            else:
                raise AssertionError(f"{name}: select past the last occurrence of {a}")
