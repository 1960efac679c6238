"""Seeded command-line demos with deterministic JSON reports.

Usage::

    python -m qsimkit grover --n 2 --t 1 --seed 7
    python -m qsimkit trotter --csv trotter.csv

Exit codes: 0 on success, 2 for unknown demos or parameter/promise errors,
3 for internal failures.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import circuit as circ
from . import fourier, games, hamsim, hhl, protocols, qec, qkd, query, walks
from .classical import dft_matrix, gf2_solve, Gf2Matrix
from .numeric import X, Y, Z, H, herm_expm
from .state import CapacityError, StateVector, check_capacity, make_rng

DEFAULT_SEED = 20240611
EXIT_OK, EXIT_USAGE, EXIT_INTERNAL = 0, 2, 3


class ParameterError(ValueError):
    """Bad demo name or parameter."""


@dataclass
class DemoReport:
    """Result of one demo run.

    ``duration`` is wall-clock seconds; it is left out of :meth:`to_json`
    unless requested so that identical invocations give identical bytes.
    """

    name: str
    params: dict
    seed: int
    results: dict
    reference: dict = field(default_factory=dict)
    tolerance: dict = field(default_factory=dict)
    series: list = field(default_factory=list)
    series_columns: list = field(default_factory=list)
    state: StateVector | None = None
    duration: float = 0.0

    def to_dict(self, timing: bool = False) -> dict:
        out = {
            "demo": self.name,
            "params": self.params,
            "seed": self.seed,
            "results": self.results,
            "reference": self.reference,
            "tolerance": self.tolerance,
        }
        if self.series:
            out["series"] = {"columns": self.series_columns, "rows": self.series}
        if timing:
            out["duration_s"] = self.duration
        return _plain(out)

    def to_json(self, timing: bool = False) -> str:
        return json.dumps(self.to_dict(timing), sort_keys=True, indent=2)


def _plain(obj):
    """Convert numpy scalars/arrays and tuples into JSON-ready values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def emit_plot_data(report: DemoReport, path) -> None:
    """Write the report's series as CSV with a header row (header only if empty)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(report.series_columns)
        for row in report.series:
            w.writerow([_plain(v) for v in row])


# -- demos -------------------------------------------------------------------
# Each demo takes (params, rng, ctx) and returns a DemoReport without name/seed.

DEMOS: dict = {}


def demo(name: str, topic: str, **defaults):
    def wrap(fn: Callable):
        DEMOS[name] = (fn, topic, defaults)
        return fn

    return wrap


def _bits_param(value, width: int | None = None) -> str:
    s = str(value)
    if set(s) - {"0", "1"}:
        raise ParameterError(f"expected a bit string, got {value!r}")
    if width is not None and len(s) != width:
        raise ParameterError(f"expected {width} bits, got {s!r}")
    return s


@demo("dj", "Deutsch-Jozsa: constant vs balanced with one query", n=4, kind="balanced")
def _dj(p, rng, ctx):
    n = int(p["n"])
    check_capacity(n)
    size = 1 << n
    if p["kind"] == "constant":
        bits = np.full(size, int(rng.integers(2)))
    elif p["kind"] == "balanced":
        bits = np.zeros(size, dtype=int)
        bits[rng.choice(size, size // 2, replace=False)] = 1
    else:
        raise ParameterError("kind must be constant or balanced")
    o = query.BitOracle(bits)
    verdict = query.deutsch_jozsa(o, rng)
    return dict(results={"verdict": verdict, "queries": o.query_count}, reference={"verdict": p["kind"], "queries": 1})


@demo("bv", "Bernstein-Vazirani: recover a from x_i = a.i with one query", n=6, a=None)
def _bv(p, rng, ctx):
    n = int(p["n"])
    check_capacity(n)
    a = int(rng.integers(1 << n)) if p["a"] is None else int(_bits_param(p["a"], n), 2)
    o = query.parity_oracle(n, a)
    got = query.bernstein_vazirani(o, rng)
    return dict(results={"a": format(got, f"0{n}b"), "queries": o.query_count}, reference={"a": format(a, f"0{n}b"), "queries": 1})


@demo("simon", "Simon's algorithm with GF(2) post-processing", n=4, s=None)
def _simon(p, rng, ctx):
    n = int(p["n"])
    check_capacity(2 * n)
    s = int(rng.integers(1, 1 << n)) if p["s"] is None else int(_bits_param(p["s"], n), 2)
    f = query.simon_oracle(n, s, rng)
    res = query.simon(f, rng)
    return dict(results={"s": format(res.s, f"0{n}b"), "runs": res.runs}, reference={"s": format(s, f"0{n}b"), "expected_runs_at_most": 2 * n})


@demo("grover", "Grover search with t known solutions; sweep of success vs iterations", n=2, t=1, kmax=10)
def _grover(p, rng, ctx):
    n, t = int(p["n"]), int(p["t"])
    check_capacity(n)
    size = 1 << n
    if not 0 < t <= size:
        raise ParameterError("need 0 < t <= 2^n")
    marked = sorted(rng.choice(size, t, replace=False).tolist())
    o = query.BitOracle.from_indices(n, marked)
    res = query.grover(o, t, rng)
    theta = query.grover_angle(size, t)
    series = []
    for k in range(int(p["kmax"]) + 1):
        amps = query.grover_state(query.BitOracle.from_indices(n, marked), k)
        probs = np.abs(amps) ** 2
        draws = rng.choice(size, size=ctx.trials, p=probs / probs.sum())
        emp = float(np.isin(draws, marked).mean())
        series.append([k, math.sin((2 * k + 1) * theta) ** 2, emp])
    return dict(
        results={"index": res.index, "found": res.index in marked, "iterations": res.iterations, "success_probability": round(res.success_probability, 12)},
        reference={"success_probability": math.sin((2 * res.iterations + 1) * theta) ** 2},
        tolerance={"success_probability": 1e-9},
        series=series,
        series_columns=["k", "sin2((2k+1)theta)", "empirical"],
    )


@demo("qft", "Quantum Fourier transform circuit and its truncated approximation", n=4, cutoff=None)
def _qft(p, rng, ctx):
    n = int(p["n"])
    if not 1 <= n <= 12:
        raise ParameterError("n must be in 1..12")
    err = float(np.max(np.abs(circ.circuit_unitary(fourier.qft_circuit(n)) - dft_matrix(1 << n)))) if n <= 10 else None
    cutoff = math.ceil(math.log2(n)) + 3 if p["cutoff"] is None else int(p["cutoff"])
    dist = fourier.qft_distance(n, cutoff)
    return dict(
        results={"max_entry_error": err, "cutoff": cutoff, "approx_distance": dist, "gates": len(fourier.qft_circuit(n)), "approx_gates": len(fourier.approx_qft_circuit(n, cutoff))},
        reference={"max_entry_error": 0.0, "approx_distance_target": 1 / n},
        tolerance={"max_entry_error": 1e-10},
    )


@demo("period", "Period finding of f(a) = x^a mod N", N=10, x=7)
def _period(p, rng, ctx):
    N, x = int(p["N"]), int(p["x"])
    if N < 3 or math.gcd(x, N) != 1:
        raise ParameterError("need N >= 3 and gcd(x, N) = 1")
    res = fourier.find_period(lambda a: pow(x, a, N), N, rng)
    true = next(r for r in range(1, N + 1) if pow(x, r, N) == 1)
    return dict(results={"period": res.period, "q": res.q, "attempts": res.attempts}, reference={"period": true})


@demo("shor", "Shor factoring via quantum period finding", N=15)
def _shor(p, rng, ctx):
    N = int(p["N"])
    if N < 4 or N > 255:
        raise ParameterError("N must be in 4..255 for simulation")
    res = fourier.shor_factor(N, rng)
    return dict(results={"factor": res.factor, "cofactor": N // res.factor if res.factor else None, "attempts": res.attempts, "used_quantum": res.used_quantum})


@demo("hsp", "Abelian hidden subgroup problem: Fourier sampling and GF(2) recovery", cycles="2,2,2", generator="110")
def _hsp(p, rng, ctx):
    cycles = tuple(int(c) for c in str(p["cycles"]).split(","))
    group = fourier.AbelianGroupSpec(cycles)
    gen = tuple(int(c) for c in str(p["generator"]))
    if len(gen) != len(cycles):
        raise ParameterError("generator must have one digit per cycle")
    f = fourier.hiding_oracle(group, [gen])
    samples = [fourier.abelian_hsp_sample(group, f, rng) for _ in range(4 * len(cycles))]
    hidden = group.subgroup([gen])
    orth = group.annihilator(hidden)
    result = {"samples": samples, "all_in_annihilator": all(tuple(s) in set(map(tuple, orth)) for s in samples)}
    if set(cycles) == {2}:
        rows = ["".join(map(str, s)) for s in samples]
        basis = gf2_solve(Gf2Matrix(rows, len(cycles)))
        result["recovered_generators"] = [format(b, f"0{len(cycles)}b") for b in basis]
    return dict(results=result, reference={"hidden_subgroup": sorted(hidden)})


def _graph_from(p) -> walks.RegularGraph:
    kind, size = p["graph"], int(p["N"])
    marked = [int(m) for m in str(p["marked"]).split(",") if m != ""]
    if kind == "complete":
        return walks.complete_graph(size, marked)
    if kind == "cycle":
        return walks.cycle_graph(size, marked)
    if kind == "hypercube":
        return walks.hypercube_graph(size, marked)
    raise ParameterError("graph must be complete, cycle or hypercube")


@demo("walk", "Random-walk spectral gap and MNRS quantum-walk search", graph="complete", N=8, marked="0", rounds=20)
def _walk(p, rng, ctx):
    g = _graph_from(p)
    if g.n_vertices ** 2 > 1 << 16:
        raise ParameterError("edge space too large for the demo")
    eigs, delta = walks.spectral_gap(g)
    wins = 0
    w = walks.WalkOperator(g)
    for _ in range(int(p["rounds"])):
        res = walks.mnrs_round(g, g.epsilon, rng, walk=w)
        wins += res.vertex in g.marked
    return dict(
        results={"spectral_gap": delta, "eigenvalues": eigs, "epsilon": g.epsilon, "rounds_per_search": walks.mnrs_rounds(g.epsilon), "success_frequency": wins / int(p["rounds"])},
        reference={"success_frequency_at_least": 0.5},
    )


@demo("trotter", "Product-formula simulation of H = X + Z; error vs steps", t=1.0, rmax=256)
def _trotter(p, rng, ctx):
    h = hamsim.PauliHamiltonian.from_dict({"X": 1.0, "Z": 1.0})
    t = float(p["t"])
    rs = [1 << k for k in range(int(math.log2(int(p["rmax"]))) + 1)]
    errs = [hamsim.trotter_error(h, t, r) for r in rs]
    slope = float(np.polyfit(np.log(rs), np.log(errs), 1)[0]) if len(rs) > 1 else None
    return dict(
        results={"slope": slope, "errors": errs},
        reference={"slope": -1.0},
        tolerance={"slope": 0.15},
        series=[[r, e] for r, e in zip(rs, errs)],
        series_columns=["r", "operator_norm_error"],
    )


@demo("lcu", "Truncated-Taylor LCU Hamiltonian simulation with oblivious amplification", t=1.0, eps=1e-4, hx=0.5, hz=0.3)
def _lcu(p, rng, ctx):
    terms = {k: float(p[f"h{k.lower()}"]) for k in ("X", "Z") if float(p[f"h{k.lower()}"]) != 0}
    if not terms:
        raise ParameterError("need a nonzero coefficient")
    h = hamsim.PauliHamiltonian.from_dict(terms)
    psi = StateVector.random(1, rng)
    rep = hamsim.HamSimReport(0, 0)
    out = hamsim.lcu_hamsim(h, float(p["t"]), float(p["eps"]), psi, rng, rep)
    exact = herm_expm(h.matrix(), float(p["t"])) @ psi.amplitudes
    return dict(
        results={"error": float(np.linalg.norm(out.amplitudes - exact)), "blocks": rep.blocks, "truncation_order": rep.order, "rounds": rep.rounds},
        reference={"error_at_most": float(p["eps"])},
        state=out,
    )


@demo("hhl", "HHL linear-system solver on a diagonal toy instance", lambdas="1,0.5", b="+", t=math.pi / 2, n_p=3)
def _hhl(p, rng, ctx):
    lam = np.array([float(v) for v in str(p["lambdas"]).split(",")])
    if len(lam) & (len(lam) - 1):
        raise ParameterError("number of eigenvalues must be a power of two")
    n = len(lam).bit_length() - 1
    if p["b"] == "+":
        b = StateVector(np.ones(len(lam)) / math.sqrt(len(lam)))
    else:
        b = StateVector.from_unnormalized([float(v) for v in str(p["b"]).split(",")])
    kappa = 1 / np.min(np.abs(lam))
    rep = hhl.HhlReport()
    x = hhl.hhl_solve(np.diag(lam), b, kappa, int(p["n_p"]), rng, t=float(p["t"]), report=rep)
    ref = b.amplitudes / lam
    ref /= np.linalg.norm(ref)
    return dict(
        results={"solution": x.amplitudes.real, "fidelity": abs(np.vdot(ref, x.amplitudes)) ** 2, "rounds": rep.rounds, "success_probability": rep.success_probability, "attempts": rep.attempts, "qubits": n},
        reference={"solution": ref.real, "fidelity": 1.0},
        tolerance={"fidelity": 1e-6},
        state=x,
    )


@demo("teleport", "Teleportation of a random qubit")
def _teleport(p, rng, ctx):
    q = StateVector.random(1, rng)
    fids, bits = [], []
    out = None
    for _ in range(ctx.trials):
        ab, out = protocols.teleport(q, rng)
        fids.append(out.fidelity(q))
        bits.append(2 * ab[0] + ab[1])
    counts = np.bincount(bits, minlength=4) / ctx.trials
    return dict(results={"min_fidelity": min(fids), "message_frequencies": counts}, reference={"min_fidelity": 1.0, "message_frequencies": [0.25] * 4}, tolerance={"min_fidelity": 1e-10}, state=out)


@demo("superdense", "Superdense coding of two bits in one qubit", bits="10")
def _superdense(p, rng, ctx):
    bits = _bits_param(p["bits"], 2)
    got = protocols.superdense(bits, rng)
    return dict(results={"decoded": "".join(map(str, got))}, reference={"decoded": bits})


@demo("chsh", "CHSH game: exact quantum win probabilities and sampled rounds")
def _chsh(p, rng, ctx):
    rep = games.play_chsh(games.chsh_reference_strategy(), ctx.trials, rng)
    return dict(
        results={"exact_per_input": rep.exact, "empirical_per_input": rep.empirical, "best_classical": games.best_classical_chsh()},
        reference={"exact_per_input": [math.cos(math.pi / 8) ** 2] * 4, "best_classical": 0.75},
        tolerance={"exact_per_input": 1e-9},
    )


@demo("magicsquare", "Magic-square game with two shared singlets", x=None, y=None)
def _magic(p, rng, ctx):
    pairs = [(int(p["x"]), int(p["y"]))] if p["x"] is not None else [(x, y) for x in range(1, 4) for y in range(1, 4)]
    wins, last = 0, {}
    for x, y in pairs:
        for _ in range(ctx.trials):
            a, b = games.play_magic_square(x, y, rng)
            wins += games.magic_square_wins(x, y, a, b)
        last[f"{x}{y}"] = {"alice": a, "bob": b}
    return dict(
        results={"win_rate": wins / (len(pairs) * ctx.trials), "last_outputs": last, "classical_rate": games.classical_magic_square_rate()},
        reference={"win_rate": 1.0, "classical_rate": 8 / 9},
    )


@demo("mermin", "Mermin's three-player game")
def _mermin(p, rng, ctx):
    rates = {}
    for x, y, z in games.MERMIN_INPUTS:
        ok = 0
        for _ in range(ctx.trials):
            a, b, c = games.play_mermin(x, y, z, rng)
            ok += (a ^ b ^ c) == int(x or y or z)
        rates[f"{x}{y}{z}"] = ok / ctx.trials
    best, _ = games.classical_mermin_best()
    return dict(results={"win_rates": rates, "best_classical_inputs_won": best}, reference={"win_rates": {k: 1.0 for k in rates}, "best_classical_inputs_won": 3})


@demo("bb84", "BB84 key distribution with an optional intercept-resend eavesdropper", n=1024, eve="none", p=0.05)
def _bb84(p, rng, ctx):
    eves = {"none": None, "breidbart": qkd.BREIDBART_ANGLE, "computational": 0.0}
    if p["eve"] not in eves:
        raise ParameterError("eve must be none, breidbart or computational")
    theta = eves[p["eve"]]
    eve = None if theta is None else qkd.InterceptResend(theta)
    tr = qkd.bb84_run(int(p["n"]), eve, float(p["p"]), rng)
    res = {"verdict": tr.verdict, "matched": len(tr.matched), "tested": len(tr.tested), "observed_error": tr.error_fraction, "matched_error_rate": tr.matched_error_rate, "key_length": len(tr.key), "keys_agree": bool(np.array_equal(tr.key, tr.bob_key))}
    ref = {"key_length_approx": int(p["n"]) / 4}
    if eve is not None:
        res["eve_guess_accuracy"] = float(np.mean(tr.eve_guesses == tr.alice_bits))
        ref["matched_error_rate"] = qkd.intercept_resend_error_rate(theta)
        ref["eve_guess_accuracy"] = qkd.intercept_resend_guess_accuracy(theta)
    return dict(results=res, reference=ref)


@demo("fingerprint", "Quantum fingerprinting with SWAP tests on Hadamard codewords", x="0110", y="0111", k=10)
def _fingerprint(p, rng, ctx):
    x, y = _bits_param(p["x"]), _bits_param(p["y"])
    if len(x) != len(y) or len(x) > 12:
        raise ParameterError("x and y need equal length <= 12")
    res = protocols.fingerprint_equality(x, y, int(p["k"]), rng)
    return dict(results={"verdict": res.verdict, "inner_product": res.inner_product, "outcomes": res.outcomes}, reference={"verdict": "equal" if x == y else "different"})


@demo("ddj", "Distributed Deutsch-Jozsa (equality vs distance n/2)", x="01100110", y="01101001", mode="communication")
def _ddj(p, rng, ctx):
    res = protocols.distributed_dj(_bits_param(p["x"]), _bits_param(p["y"]), rng, mode=p["mode"], check_promise=True)
    return dict(results={"verdict": res.verdict, "alice": res.alice, "bob": res.bob}, reference={"verdict": "equal" if p["x"] == p["y"] else "far"})


@demo("ldc", "Hadamard code: encoding and 2-query local decoding under corruption", x="10", i=0, delta=0.0)
def _ldc(p, rng, ctx):
    x = _bits_param(p["x"])
    i = int(p["i"])
    if not 0 <= i < len(x):
        raise ParameterError("bit index out of range")
    code = protocols.hadamard_ldc(x)
    y = protocols.corrupt(code, float(p["delta"]), rng)
    ok = sum(protocols.ldc_decode(y, i, rng) == int(x[i]) for _ in range(ctx.trials))
    return dict(
        results={"codeword": "".join(map(str, code)) if len(code) <= 64 else None, "decode_success": ok / ctx.trials},
        reference={"decode_success_at_least": 1 - 2 * float(p["delta"])},
    )


@demo("qec", "Shor 9-qubit code: encode, single-qubit error, syndrome, correction", error="x", position=1)
def _qec(p, rng, ctx):
    mats = {"x": X, "y": Y, "z": Z, "h": H}
    kind = str(p["error"]).lower()
    if kind == "random":
        err = qec.random_single_qubit_unitary(rng)
    elif kind in mats:
        err = mats[kind]
    else:
        raise ParameterError("error must be x, y, z, h or random")
    pos = int(p["position"])
    if not 1 <= pos <= 9:
        raise ParameterError("position must be in 1..9")
    q = StateVector.random(1, rng)
    enc = qec.shor9_encode(q)
    syn, fixed = qec.shor9_correct(qec.SingleQubitError(pos, err).apply(enc), rng)
    return dict(
        results={"syndrome": {"bitflip": syn.bitflip, "phaseflip": syn.phaseflip}, "fidelity": fixed.fidelity(enc)},
        reference={"fidelity": 1.0},
        tolerance={"fidelity": 1e-9},
        state=fixed,
    )


@demo("pathsum", "Path-sum amplitude evaluation vs state-vector simulation", n=3, depth=8, input=0, output=None)
def _pathsum(p, rng, ctx):
    if ctx.circuit is not None:
        c = ctx.circuit
    else:
        c = circ.random_circuit(int(p["n"]), int(p["depth"]), rng)
    inp = int(p["input"])
    outs = range(1 << c.n_qubits) if p["output"] is None else [int(p["output"])]
    sim = circ.simulate(c, inp).amplitudes
    amps = {o: circ.path_sum_amplitude(c, inp, o) for o in outs}
    diff = max(abs(a - sim[o]) for o, a in amps.items())
    return dict(
        results={"amplitudes": {str(o): a for o, a in amps.items()}, "max_difference": diff, "gates": len(c)},
        reference={"max_difference": 0.0},
        tolerance={"max_difference": 1e-9},
        state=StateVector(sim),
    )


# -- driver --------------------------------------------------------------------


@dataclass
class _Context:
    trials: int
    circuit: circ.Circuit | None = None


def _coerce(value: str):
    for cast in (int, float):
        try:
            return cast(value)
        except ValueError:
            pass
    return value


def run_demo(name: str, params: dict | None = None, seed: int = DEFAULT_SEED, trials: int = 100, circuit: circ.Circuit | None = None) -> DemoReport:
    """Run one demo.  Unknown names or parameters raise :class:`ParameterError`."""
    if name not in DEMOS:
        raise ParameterError(f"unknown demo {name!r}; choose from {', '.join(sorted(DEMOS))}")
    fn, _, defaults = DEMOS[name]
    params = dict(params or {})
    unknown = set(params) - set(defaults)
    if unknown:
        raise ParameterError(f"unknown parameter(s) for {name}: {', '.join(sorted(unknown))}")
    if trials < 1:
        raise ParameterError("trials must be positive")
    merged = {**defaults, **params}
    rng = make_rng(seed)
    start = time.perf_counter()
    out = fn(merged, rng, _Context(trials, circuit))
    report = DemoReport(name=name, params=merged, seed=seed, duration=time.perf_counter() - start, **out)
    return report


def _help_text() -> str:
    lines = ["demos:"]
    for name, (_, topic, defaults) in sorted(DEMOS.items()):
        opts = " ".join(f"--{k} {v}" for k, v in defaults.items())
        lines.append(f"  {name:<12} {topic}" + (f"  [{opts}]" if opts else ""))
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="qsimkit",
        allow_abbrev=False,
        description="Seeded quantum-algorithm demos emitting JSON reports.",
        epilog=_help_text(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    ap.add_argument("demo", help="demo name (see list below)")
    ap.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"RNG seed (default {DEFAULT_SEED})")
    ap.add_argument("--trials", type=int, default=100, help="repetitions for sampled statistics")
    ap.add_argument("--out", help="write the JSON report here instead of stdout")
    ap.add_argument("--csv", help="write the report's data series as CSV")
    ap.add_argument("--dump-state", help="write the demo's final state vector as JSON")
    ap.add_argument("--circuit-file", help="circuit in text format (pathsum demo)")
    ap.add_argument("--timing", action="store_true", help="include wall-clock duration in the report")
    return ap


def _parse_extra(extra: list) -> dict:
    params = {}
    i = 0
    while i < len(extra):
        key = extra[i]
        if not key.startswith("--") or i + 1 >= len(extra):
            raise ParameterError(f"expected '--name value' pairs, got {extra[i:]}")
        params[key[2:].replace("-", "_")] = _coerce(extra[i + 1])
        i += 2
    return params


def main(argv=None) -> int:
    ap = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] in ("-h", "--help"):
        ap.print_help()
        return EXIT_OK if argv else EXIT_USAGE
    try:
        args, extra = ap.parse_known_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        params = _parse_extra(extra)
        circuit = None
        if args.circuit_file:
            with open(args.circuit_file) as fh:
                circuit = circ.parse_circuit(fh.read())
        report = run_demo(args.demo, params, args.seed, args.trials, circuit)
    except (ParameterError, query.PromiseError, CapacityError, hhl.ConditioningError, ValueError, OSError) as exc:
        print(f"qsimkit: error: {exc}", file=sys.stderr)
        if isinstance(exc, ParameterError) and args.demo not in DEMOS:
            print(_help_text(), file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001 - anything else is an internal failure
        print(f"qsimkit: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    text = report.to_json(timing=args.timing)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    if args.csv:
        emit_plot_data(report, args.csv)
    if args.dump_state and report.state is not None:
        with open(args.dump_state, "w") as fh:
            fh.write(report.state.to_json())
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
