"""Pure-Python maximin-share search; reference twin of ``_mms_kernel.pyx``."""


class _Done(Exception):
    pass


def mms_int(values, n):
    """Best achievable minimum bundle sum over partitions into ``n`` bundles.

    ``values`` are non-negative ints sorted in descending order.  Items are
    placed in restricted-growth order (an item may open at most one new
    bundle), which enumerates each set partition once; item 0 always lands in
    bundle 0.  A branch is cut when it can no longer beat the incumbent.
    """
    m = len(values)
    if n <= 0:
        raise ValueError("n must be positive")
    if m < n:
        return 0
    suffix = [0] * (m + 1)
    for k in range(m - 1, -1, -1):
        suffix[k] = suffix[k + 1] + values[k]
    cap = suffix[0] // n
    sums = [0] * n
    best = 0

    def rec(k, opened):
        nonlocal best
        if k == m:
            lo = min(sums)
            if lo > best:
                best = lo
                if best >= cap:
                    raise _Done
            return
        empty = n - opened
        if m - k < empty:
            return
        if empty:
            # every empty bundle needs best + 1 from what is left
            if suffix[k] < (best + 1) * empty:
                return
        elif min(sums) + suffix[k] <= best:
            return
        v = values[k]
        for b in range(opened + 1 if empty else n):
            sums[b] += v
            rec(k + 1, opened + 1 if b == opened else opened)
            sums[b] -= v

    try:
        rec(0, 0)
    except _Done:
        pass
    return best
