"""Optional figure for ``dsk bv-profile --figure``; the data rows never depend on it."""

import numpy as np


def bv_profile_figure(sp, rows, path):
    """Real and imaginary parts of F(x + i0), F(x - i0) and the jump against x."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    data = np.asarray(rows, float).reshape(-1, 7)
    x = data[:, 0]
    fig, (top, bottom) = plt.subplots(2, 1, sharex=True, figsize=(6, 6))
    top.plot(x, data[:, 1], label="Re F(x+i0)")
    top.plot(x, data[:, 3], "--", label="Re F(x-i0)")
    top.legend()
    bottom.plot(x, data[:, 2], label="Im F(x+i0)")
    bottom.plot(x, data[:, 4], "--", label="Im F(x-i0)")
    bottom.plot(x, data[:, 6], ":", label="Im jump")
    bottom.set_xlabel("x")
    bottom.legend()
    fig.suptitle(f"2F1 boundary values, {sp}")
    fig.savefig(path)
    plt.close(fig)
    return path
