"""Plain-text complex files.

Format: a header line ``dim n embed N``, one ``v x1 ... xN`` line per vertex,
one ``s i0 ... in [sign]`` line per top simplex (the orientation sign is
optional; when every top simplex carries one, those signs are used verbatim).
"""

from __future__ import annotations

from .complexes import SimplicialComplex, build_complex


def write_complex(X: SimplicialComplex, path: str) -> None:
    lines = [f"dim {X.dim} embed {X.vertices.shape[1]}"]
    for row in X.vertices:
        lines.append("v " + " ".join(f"{x:.17g}" for x in row))
    n = X.dim
    for i, simp in enumerate(X.simplices[n]):
        sign = int(X.orientation[n][i])
        lines.append("s " + " ".join(str(v) for v in simp) + f" {sign}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def read_complex(path: str, strict: bool = True) -> SimplicialComplex:
    """Parse a complex file; ``strict`` enforces the closed-oriented-manifold
    checks of build_complex."""
    verts = []
    tops = []
    signs = []
    dim = embed = None
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if parts[0] == "dim":
                dim = int(parts[1])
                embed = int(parts[3])
            elif parts[0] == "v":
                verts.append([float(x) for x in parts[1:]])
            elif parts[0] == "s":
                vals = parts[1:]
                if dim is not None and len(vals) == dim + 2:
                    tops.append(tuple(int(v) for v in vals[:-1]))
                    signs.append(int(vals[-1]))
                else:
                    tops.append(tuple(int(v) for v in vals))
                    signs.append(None)
            else:
                raise ValueError(f"unrecognised line: {line!r}")
    if embed is not None and verts and len(verts[0]) != embed:
        raise ValueError("embedding dimension mismatch in header")
    use_signs = None
    if signs and all(s is not None for s in signs):
        use_signs = signs
    if strict:
        return build_complex(verts, tops, top_signs=use_signs)
    return SimplicialComplex(
        verts, tops, require_closed=False, require_orientable=False,
        top_signs=use_signs,
    )
