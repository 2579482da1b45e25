"""Command-line pipeline: ingest a Hamiltonian, prepare a state, expand, report.

Subcommands
-----------
fci     exact spectrum (lowest 8 levels) of the qubit Hamiltonian
energy  moment-expansion energies (CMX/PDS) for one prepared state
scan    energy runs over a list of Hamiltonian files keyed by a coordinate

Exit codes: 0 success, 2 when a numerical guard tripped (degenerate CMX or
a PDS order fallback), 1 on errors.  All output is CSV/JSON and fully
deterministic for a fixed configuration.
"""

import argparse
import csv
import json
import sys
from pathlib import Path

from .exact import exact_spectrum, sum_to_matrix
from .fermion import (
    build_fermionic_singlet_pool,
    build_pauli_pool,
    hf_bitstring,
    jordan_wigner,
    parse_fcidump,
)
from .moments import (
    ExpectationCache,
    cache_load,
    cache_save,
    cmx_energy,
    measurement_report,
    pds_energy,
    raw_moments,
)
from .pauli import read_hamiltonian_file
from .simulate import (
    AnsatzProgram,
    estimate_depth,
    load_amplitudes,
    prepare_ansatz_state,
    prepare_basis_state,
)
from .vqe import adapt_run

ENERGY_COLUMNS = [
    "method", "K", "epsilon", "energy", "error_vs_fci",
    "depth", "cache_hits", "cache_misses",
]
DEFAULT_EPSILONS = "0,1e-2,1e-3,1e-4,1e-5"


class _Parser(argparse.ArgumentParser):
    """argparse with exit code 1 on usage errors (2 is reserved for guards)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse_orders(text):
    orders = [int(tok) for tok in text.split(",") if tok.strip()]
    if not orders or any(k < 1 for k in orders):
        raise ValueError("orders must be positive integers")
    return orders


def _parse_epsilons(text):
    epsilons = [float(tok) for tok in text.split(",") if tok.strip()]
    if not epsilons or any(e < 0 for e in epsilons):
        raise ValueError("epsilons must be >= 0")
    return epsilons


def _load_problem(args):
    """Returns (qubit Hamiltonian, FermionHamiltonian or None)."""
    if args.fcidump:
        fham = parse_fcidump(args.fcidump)
        return jordan_wigner(fham), fham
    return read_hamiltonian_file(args.qubit_ham), None


def _prepare_state(args, hamiltonian, fham):
    """Returns (state, program or None, trace or None)."""
    if args.state == "file":
        if not args.state_file:
            raise ValueError("--state file requires --state-file PATH")
        state = load_amplitudes(args.state_file)
        if state.n_qubits != hamiltonian.n_qubits:
            raise ValueError(
                f"state file has {state.n_qubits} qubits, "
                f"Hamiltonian has {hamiltonian.n_qubits}"
            )
        return state, None, None
    if fham is None:
        raise ValueError(f"--state {args.state} requires --fcidump input")
    reference = hf_bitstring(fham)
    if args.state == "hf":
        program = AnsatzProgram(reference, ())
        return prepare_basis_state(reference), program, None
    if args.pool == "pauli":
        pool = build_pauli_pool(hamiltonian.n_qubits)
    else:
        pool = build_fermionic_singlet_pool(fham)
    max_iter = 1 if args.state == "adapt1" else args.max_adapt_iter
    program, trace = adapt_run(
        hamiltonian,
        pool,
        reference,
        grad_stop=args.grad_stop,
        max_iter=max_iter,
        vqe_tol=args.vqe_tol,
    )
    return prepare_ansatz_state(program), program, trace


def _energy_rows(args, hamiltonian, fham, cache, outdir=None):
    """Core of the energy pipeline; returns (rows, excited_rows, run_info)."""
    fci = float(exact_spectrum(sum_to_matrix(hamiltonian))[0])
    state, program, trace = _prepare_state(args, hamiltonian, fham)
    depth = estimate_depth(program) if program is not None else None

    orders = _parse_orders(args.order)
    epsilons = _parse_epsilons(args.epsilon)
    horizon = 2 * max(orders) - 1

    guard_tripped = False
    rows, excited_rows = [], []
    reports = {}
    fallbacks, degenerates = [], []
    for epsilon in epsilons:
        table = raw_moments(state, hamiltonian, horizon, cache, epsilon)
        hits, misses = cache.hits, cache.misses
        rows.append(
            ["expval", "", epsilon, table.raw[0], table.raw[0] - fci,
             depth, hits, misses]
        )
        for order in orders:
            cmx = cmx_energy(table.connected, order)
            if cmx.degenerate:
                guard_tripped = True
                degenerates.append({"K": order, "epsilon": epsilon})
            rows.append(
                ["cmx", order, epsilon, cmx.energy, cmx.energy - fci,
                 depth, hits, misses]
            )
            pds = pds_energy(table.raw, order)
            if pds.fallback_from is not None or pds.failed:
                guard_tripped = True
                fallbacks.append(
                    {"K": order, "epsilon": epsilon, "used_order": pds.order,
                     "failed": pds.failed}
                )
            energy = pds.ground_estimate
            error = None if energy is None else energy - fci
            rows.append(
                ["pds", order, epsilon, energy, error, depth, hits, misses]
            )
            for index, root in enumerate(pds.excited_estimates, start=1):
                excited_rows.append(["pds", order, epsilon, index, root])
        reports[epsilon] = measurement_report(table, hamiltonian, max(orders))

    if outdir is not None:
        for epsilon, report in reports.items():
            report.to_csv(outdir / f"measurement_eps{epsilon:g}.csv")
        if trace is not None:
            trace.to_csv(outdir / "trace.csv")

    run_info = {
        "fci": fci,
        "n_qubits": hamiltonian.n_qubits,
        "n_terms": len(hamiltonian),
        "state": args.state,
        "depth": depth,
        "orders": orders,
        "epsilons": epsilons,
        "cache_hits": cache.hits,
        "cache_misses": cache.misses,
        "skipped_by_threshold": cache.skipped_by_threshold,
        "cmx_degenerate": degenerates,
        "pds_fallbacks": fallbacks,
        "guard_tripped": guard_tripped,
    }
    if trace is not None:
        run_info["adapt_converged"] = trace.converged
        run_info["adapt_iterations"] = len(trace.iterations) - 1
        run_info["adapt_final_grad_norm"] = trace.iterations[-1].grad_norm
        if not trace.converged:
            print(
                "warning: ADAPT stopped at max iterations without meeting "
                "the gradient threshold", file=sys.stderr,
            )
    return rows, excited_rows, run_info


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(value) for value in row])


def cmd_fci(args) -> int:
    hamiltonian, _ = _load_problem(args)
    values = exact_spectrum(sum_to_matrix(hamiltonian))
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    _write_csv(
        outdir / "spectrum.csv",
        ["level", "energy"],
        [[level, float(value)] for level, value in enumerate(values[:8])],
    )
    return 0


def cmd_energy(args) -> int:
    hamiltonian, fham = _load_problem(args)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)

    cache = ExpectationCache()
    if args.cache and Path(args.cache).exists():
        cache = cache_load(args.cache)
    cache.reset_counters()  # counters describe this run

    rows, excited_rows, run_info = _energy_rows(
        args, hamiltonian, fham, cache, outdir
    )
    _write_csv(outdir / "energy.csv", ENERGY_COLUMNS, rows)
    _write_csv(
        outdir / "excited.csv",
        ["method", "K", "epsilon", "root_index", "energy"],
        excited_rows,
    )
    with open(outdir / "run.json", "w") as fh:
        json.dump(run_info, fh, indent=1, sort_keys=True)
        fh.write("\n")
    if args.cache:
        cache_save(cache, args.cache)
    return 2 if run_info["guard_tripped"] else 0


def cmd_scan(args) -> int:
    points = []
    with open(args.points) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(
                    f"{args.points}:{lineno}: expected '<coord> <path>'"
                )
            points.append((parts[0], parts[1]))

    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)

    all_rows = []
    guard_tripped = False
    n_qubits = None
    for coord, path in points:
        if args.source == "fcidump":
            fham = parse_fcidump(path)
            hamiltonian = jordan_wigner(fham)
        else:
            fham = None
            hamiltonian = read_hamiltonian_file(path)
        if n_qubits is None:
            n_qubits = hamiltonian.n_qubits
        elif hamiltonian.n_qubits != n_qubits:
            raise ValueError(
                f"{path}: {hamiltonian.n_qubits} qubits, scan started "
                f"with {n_qubits}"
            )
        cache = ExpectationCache()  # isolated per scan point
        rows, _, run_info = _energy_rows(args, hamiltonian, fham, cache)
        guard_tripped |= run_info["guard_tripped"]
        for row in rows:
            all_rows.append([coord] + row)

    _write_csv(outdir / "scan.csv", ["coord"] + ENERGY_COLUMNS, all_rows)
    return 2 if guard_tripped else 0


def _add_source_flags(parser, required=True):
    group = parser.add_mutually_exclusive_group(required=required)
    group.add_argument("--fcidump", help="FCIDUMP input file")
    group.add_argument("--qubit-ham", help="qubit-Hamiltonian text file")


def _add_energy_flags(parser):
    parser.add_argument(
        "--state", choices=["hf", "adapt1", "adapt-full", "file"], default="hf"
    )
    parser.add_argument("--state-file", help="amplitude dump for --state file")
    parser.add_argument("--pool", choices=["pauli", "fermionic"], default="pauli")
    parser.add_argument("--order", default="2", help="comma list of K values")
    parser.add_argument(
        "--epsilon", default=DEFAULT_EPSILONS,
        help="comma list of coefficient thresholds",
    )
    parser.add_argument("--grad-stop", type=float, default=1e-2)
    parser.add_argument("--vqe-tol", type=float, default=1e-7)
    parser.add_argument("--max-adapt-iter", type=int, default=50)
    parser.add_argument(
        "--ordering", choices=["interleaved"], default="interleaved",
        help="spin-orbital-to-qubit ordering (v1 supports interleaved only)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qmx", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_fci = sub.add_parser("fci", help="exact spectrum to CSV")
    _add_source_flags(p_fci)
    p_fci.add_argument("--out", required=True)
    p_fci.set_defaults(func=cmd_fci)

    p_energy = sub.add_parser("energy", help="CMX/PDS energies for one state")
    _add_source_flags(p_energy)
    _add_energy_flags(p_energy)
    p_energy.add_argument("--cache", help="expectation cache file (JSON)")
    p_energy.add_argument("--out", required=True)
    p_energy.set_defaults(func=cmd_energy)

    p_scan = sub.add_parser(
        "scan", help="energy runs over a coordinate-keyed file list"
    )
    p_scan.add_argument(
        "--points", required=True, help="file of '<coord> <path>' lines"
    )
    p_scan.add_argument(
        "--source", choices=["fcidump", "qubit"], default="fcidump"
    )
    _add_energy_flags(p_scan)
    p_scan.add_argument("--out", required=True)
    p_scan.set_defaults(func=cmd_scan)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except Exception as exc:  # noqa: BLE001 - uniform CLI error surface
        print(f"qmx: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
