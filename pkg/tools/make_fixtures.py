"""Regenerate the bundled FCIDUMP fixtures.

Hydrogen-only systems in s-type Gaussian bases: restricted Hartree-Fock with
DIIS, AO->MO transformation, Molpro-convention FCIDUMP output in chemists'
notation.  Uses only numpy, so the fixtures are reproducible anywhere:

    python3 tools/make_fixtures.py [outdir]

The 1s integrals follow the standard closed forms for contracted s
primitives (overlap, kinetic, nuclear attraction and repulsion via the Boys
function F0).
"""

import math
import sys
from pathlib import Path

import numpy as np

ANGSTROM_TO_BOHR = 1.8897259886

# Hydrogen basis sets: list of contracted functions, each a list of
# (exponent, contraction coefficient) primitives.
STO3G_H = [
    [
        (3.425250914, 0.1543289673),
        (0.6239137298, 0.5353281423),
        (0.1688554040, 0.4446345422),
    ]
]
SIX31G_H = [
    [
        (18.7311370, 0.03349460),
        (2.8253937, 0.23472695),
        (0.6401217, 0.81375733),
    ],
    [(0.1612778, 1.0)],
]


def boys_f0(t):
    if t < 1e-12:
        return 1.0 - t / 3.0
    return 0.5 * math.sqrt(math.pi / t) * math.erf(math.sqrt(t))


def build_basis(centers, shells_per_atom):
    """Flatten to a list of contracted functions [(center, [(a, d_norm)...])]."""
    basis = []
    for center in centers:
        for shell in shells_per_atom:
            prims = [
                (a, d * (2.0 * a / math.pi) ** 0.75) for a, d in shell
            ]
            # normalize the contracted function
            s_self = 0.0
            for a, da in prims:
                for b, db in prims:
                    s_self += da * db * (math.pi / (a + b)) ** 1.5
            scale = 1.0 / math.sqrt(s_self)
            basis.append(
                (np.asarray(center, dtype=float), [(a, d * scale) for a, d in prims])
            )
    return basis


def overlap_kinetic(basis):
    nbf = len(basis)
    s_mat = np.zeros((nbf, nbf))
    t_mat = np.zeros((nbf, nbf))
    for i, (ra, prims_a) in enumerate(basis):
        for j, (rb, prims_b) in enumerate(basis):
            rab2 = float(np.dot(ra - rb, ra - rb))
            s = t = 0.0
            for a, da in prims_a:
                for b, db in prims_b:
                    p = a + b
                    mu = a * b / p
                    pref = da * db * (math.pi / p) ** 1.5 * math.exp(-mu * rab2)
                    s += pref
                    t += mu * (3.0 - 2.0 * mu * rab2) * pref
            s_mat[i, j] = s
            t_mat[i, j] = t
    return s_mat, t_mat


def nuclear_attraction(basis, centers, charges):
    nbf = len(basis)
    v_mat = np.zeros((nbf, nbf))
    for i, (ra, prims_a) in enumerate(basis):
        for j, (rb, prims_b) in enumerate(basis):
            rab2 = float(np.dot(ra - rb, ra - rb))
            v = 0.0
            for a, da in prims_a:
                for b, db in prims_b:
                    p = a + b
                    mu = a * b / p
                    rp = (a * ra + b * rb) / p
                    k = math.exp(-mu * rab2)
                    for rc, zc in zip(centers, charges):
                        rpc2 = float(np.dot(rp - rc, rp - rc))
                        v -= zc * da * db * (2.0 * math.pi / p) * k * boys_f0(p * rpc2)
            v_mat[i, j] = v
    return v_mat


def electron_repulsion(basis):
    """(ij|kl) in chemists' notation over contracted s functions."""
    nbf = len(basis)
    eri = np.zeros((nbf, nbf, nbf, nbf))
    for i, (ra, prims_a) in enumerate(basis):
        for j, (rb, prims_b) in enumerate(basis):
            rab2 = float(np.dot(ra - rb, ra - rb))
            for k, (rc, prims_c) in enumerate(basis):
                for l, (rd, prims_d) in enumerate(basis):
                    if eri[i, j, k, l] != 0.0:
                        continue
                    rcd2 = float(np.dot(rc - rd, rc - rd))
                    value = 0.0
                    for a, da in prims_a:
                        for b, db in prims_b:
                            p = a + b
                            rp = (a * ra + b * rb) / p
                            kab = math.exp(-a * b / p * rab2)
                            for c, dc in prims_c:
                                for d, dd in prims_d:
                                    q = c + d
                                    rq = (c * rc + d * rd) / q
                                    kcd = math.exp(-c * d / q * rcd2)
                                    rpq2 = float(np.dot(rp - rq, rp - rq))
                                    value += (
                                        da * db * dc * dd
                                        * 2.0 * math.pi ** 2.5
                                        / (p * q * math.sqrt(p + q))
                                        * kab * kcd
                                        * boys_f0(p * q / (p + q) * rpq2)
                                    )
                    for idx in (
                        (i, j, k, l), (j, i, k, l), (i, j, l, k), (j, i, l, k),
                        (k, l, i, j), (l, k, i, j), (k, l, j, i), (l, k, j, i),
                    ):
                        eri[idx] = value
    return eri


def rhf(s_mat, hcore, eri, n_occ, max_iter=200, conv=1e-12):
    """Closed-shell RHF with DIIS; returns (E_elec, MO coefficients)."""
    vals, vecs = np.linalg.eigh(s_mat)
    x = vecs @ np.diag(vals ** -0.5) @ vecs.T

    def fock(dm):
        j = np.einsum("pqrs,rs->pq", eri, dm)
        k = np.einsum("prqs,rs->pq", eri, dm)
        return hcore + j - 0.5 * k

    dm = np.zeros_like(s_mat)
    fock_hist, err_hist = [], []
    energy = 0.0
    for _ in range(max_iter):
        f = fock(dm)
        err = f @ dm @ s_mat - s_mat @ dm @ f
        fock_hist.append(f)
        err_hist.append(err)
        if len(fock_hist) > 8:
            fock_hist.pop(0)
            err_hist.pop(0)
        if len(fock_hist) > 1:
            m = len(fock_hist)
            b = -np.ones((m + 1, m + 1))
            b[m, m] = 0.0
            for p in range(m):
                for q in range(m):
                    b[p, q] = np.sum(err_hist[p] * err_hist[q])
            rhs = np.zeros(m + 1)
            rhs[m] = -1.0
            try:
                weights = np.linalg.solve(b, rhs)[:m]
                f = sum(w * fh for w, fh in zip(weights, fock_hist))
            except np.linalg.LinAlgError:
                pass
        f_ortho = x.T @ f @ x
        _, c_ortho = np.linalg.eigh(f_ortho)
        coeff = x @ c_ortho
        occ = coeff[:, :n_occ]
        dm_new = 2.0 * occ @ occ.T
        energy_new = 0.5 * np.sum(dm_new * (hcore + fock(dm_new)))
        if abs(energy_new - energy) < conv and np.abs(dm_new - dm).max() < 1e-10:
            dm, energy = dm_new, energy_new
            break
        dm, energy = dm_new, energy_new
    # fix MO sign: largest-magnitude coefficient positive
    coeff = coeff.copy()
    for col in range(coeff.shape[1]):
        pivot = np.argmax(np.abs(coeff[:, col]))
        if coeff[pivot, col] < 0:
            coeff[:, col] *= -1.0
    return float(energy), coeff


def mo_integrals(hcore, eri, coeff):
    h1 = coeff.T @ hcore @ coeff
    mo_eri = np.einsum(
        "pqrs,pi,qj,rk,sl->ijkl", eri, coeff, coeff, coeff, coeff, optimize=True
    )
    return h1, mo_eri


def write_fcidump(path, h1, h2, e_core, n_electrons, ms2=0, tol=1e-12):
    n = h1.shape[0]
    lines = [
        f" &FCI NORB={n:3d},NELEC={n_electrons:3d},MS2={ms2},",
        "  ORBSYM=" + "1," * n,
        "  ISYM=1,",
        " &END",
    ]
    pair = lambda a, b: a * (a + 1) // 2 + b  # a >= b
    for p in range(n):
        for q in range(p + 1):
            for r in range(p + 1):
                s_top = q if r == p else r
                for s in range(s_top + 1):
                    value = h2[p, q, r, s]
                    if abs(value) > tol:
                        lines.append(
                            f"{value: 23.16e} {p+1:3d} {q+1:3d} {r+1:3d} {s+1:3d}"
                        )
    for p in range(n):
        for q in range(p + 1):
            if abs(h1[p, q]) > tol:
                lines.append(f"{h1[p, q]: 23.16e} {p+1:3d} {q+1:3d}   0   0")
    lines.append(f"{e_core: 23.16e}   0   0   0   0")
    Path(path).write_text("\n".join(lines) + "\n")


def hydrogen_system(positions_angstrom, shells, n_electrons):
    centers = [
        np.array([0.0, 0.0, z * ANGSTROM_TO_BOHR]) for z in positions_angstrom
    ]
    charges = [1.0] * len(centers)
    basis = build_basis(centers, shells)
    s_mat, t_mat = overlap_kinetic(basis)
    v_mat = nuclear_attraction(basis, centers, charges)
    eri = electron_repulsion(basis)
    hcore = t_mat + v_mat
    e_nuc = 0.0
    for i in range(len(centers)):
        for j in range(i + 1, len(centers)):
            e_nuc += 1.0 / float(np.linalg.norm(centers[i] - centers[j]))
    e_elec, coeff = rhf(s_mat, hcore, eri, n_electrons // 2)
    h1, h2 = mo_integrals(hcore, eri, coeff)
    return h1, h2, e_nuc, e_elec


def main(outdir="fixtures"):
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)

    for r in (0.7414, 1.2, 2.0):
        h1, h2, e_nuc, e_rhf = hydrogen_system([0.0, r], STO3G_H, 2)
        write_fcidump(out / f"h2_sto3g_{r}.fcidump", h1, h2, e_nuc, 2)
        print(f"H2/STO-3G R={r} A: E_RHF = {e_rhf + e_nuc:.8f}")
        if r == 0.7414:
            write_fcidump(
                out / "h2_sto3g_1orb_0.7414.fcidump",
                h1[:1, :1],
                h2[:1, :1, :1, :1],
                e_nuc,
                2,
            )
            print(
                f"  1-orbital slice: h1[0,0] = {h1[0,0]:.6f}, "
                f"(00|00) = {h2[0,0,0,0]:.6f}, e_core = {e_nuc:.6f}"
            )

    h1, h2, e_nuc, e_rhf = hydrogen_system([0.0, 2.0], SIX31G_H, 2)
    write_fcidump(out / "h2_631g_2.0.fcidump", h1, h2, e_nuc, 2)
    print(f"H2/6-31G R=2.0 A: E_RHF = {e_rhf + e_nuc:.8f}")

    h1, h2, e_nuc, e_rhf = hydrogen_system([0.0, 2.0, 4.0, 6.0], STO3G_H, 4)
    write_fcidump(out / "h4_sto3g_linear_2.0.fcidump", h1, h2, e_nuc, 4)
    print(f"H4 chain/STO-3G d=2.0 A: E_RHF = {e_rhf + e_nuc:.8f}")


if __name__ == "__main__":
    main(*sys.argv[1:])
