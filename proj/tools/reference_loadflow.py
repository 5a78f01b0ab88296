#!/usr/bin/env python3
"""Independent three-phase load-flow reference, used to produce the bundled
benchmark CSVs (data/*_benchmark.csv).

This is a standalone numpy implementation of the same component models the
C++ engine builds: it parses the feeder JSON on its own, assembles the bus
admittance matrix its own way, runs a fixed-point iteration, and then
verifies/polishes the solution with scipy's nonlinear root finder on the
current-balance equations. Agreement between this script and the engine is
what the benchmark-deviation acceptance check measures.

Usage:
  python3 tools/reference_loadflow.py --feeder data/ieee37.json \
      --epsilon 1e-6 --out data/ieee37_benchmark.csv [--ideal-svr]
"""

import argparse
import functools
import json
import math

import numpy as np
from scipy.optimize import root

SQRT3 = math.sqrt(3.0)
PAIRS = {"ab": ("a", "b"), "bc": ("b", "c"), "ca": ("c", "a")}


def cpx(v):
    if isinstance(v, (int, float)):
        return complex(v, 0.0)
    return complex(v[0], v[1])


def matrix(rows):
    return np.array([[cpx(v) for v in row] for row in rows], dtype=complex)


def phase_positions(phases):
    return {p: i for i, p in enumerate(phases)}


def embed(block, block_phases, row_phases, col_phases):
    out = np.zeros((len(row_phases), len(col_phases)), dtype=complex)
    rp, cp = phase_positions(row_phases), phase_positions(col_phases)
    for i, p in enumerate(block_phases):
        for j, q in enumerate(block_phases):
            out[rp[p], cp[q]] = block[i, j]
    return out


def line_blocks(spec, omega_n, omega_m):
    phases = spec["phases"]
    z = matrix(spec["z"])
    ys = matrix(spec.get("y_shunt", [[[0, 0]] * len(phases)] * len(phases)))
    zinv = np.linalg.inv(z)
    zinv = 0.5 * (zinv + zinv.T)
    self_block = 0.5 * ys + zinv
    return {
        "self_n": embed(self_block, phases, omega_n, omega_n),
        "mut_n": embed(zinv, phases, omega_n, omega_m),
        "self_m": embed(self_block, phases, omega_m, omega_m),
        "mut_m": embed(zinv, phases, omega_m, omega_n),
    }


def transformer_core(y_t):
    y1 = y_t * np.eye(3, dtype=complex)
    y2 = (y_t / 3.0) * np.array([[2, -1, -1], [-1, 2, -1], [-1, -1, 2]], dtype=complex)
    y3 = (y_t / SQRT3) * np.array([[-1, 1, 0], [0, -1, 1], [1, 0, -1]], dtype=complex)
    y4 = (y_t / 3.0) * np.array([[1, -1, 0], [-1, 2, -1], [0, -1, 1]], dtype=complex)
    y5 = y_t * np.eye(2, dtype=complex)
    y6 = (y_t / SQRT3) * np.array([[-1, 1, 0], [0, -1, 1]], dtype=complex)
    return y1, y2, y3, y4, y5, y6


def transformer_blocks(edge, omega_n, omega_m, eps_rel, reactive=False):
    y_t = cpx(edge["y_t"]) if "y_t" in edge else 1.0 / cpx(edge["z_t"])
    conn = edge["connection"]
    y1, y2, y3, y4, y5, y6 = transformer_core(y_t)
    eps = eps_rel * abs(y_t)
    e1 = -1j * eps if reactive else eps
    e2 = e1 / 2.0
    i3 = np.eye(3, dtype=complex)
    if conn == "delta:delta" or conn in ("wyeg:wye", "wye:wye"):
        b = (y2 + e1 * i3, y2 + e2 * i3, y2 + e1 * i3)
        return {"self_n": b[0], "mut_n": b[1], "self_m": b[2], "mut_m": b[1].T}
    if conn == "wyeg:wyeg":
        return {"self_n": y1, "mut_n": y1, "self_m": y1, "mut_m": y1.T}
    if conn == "wyeg:delta":
        return {"self_n": y1, "mut_n": -y3, "self_m": y2 + e1 * i3, "mut_m": (-y3).T}
    if conn == "wye:delta":
        return {"self_n": y2 + e1 * i3, "mut_n": -y3, "self_m": y2 + e1 * i3, "mut_m": (-y3).T}
    if conn == "open-delta:open-delta":
        return {"self_n": y4 + e1 * i3, "mut_n": y4 + e2 * i3, "self_m": y4 + e1 * i3,
                "mut_m": (y4 + e2 * i3).T}
    if conn == "open-wye:open-delta":
        self_n = embed(y5, "ab", omega_n, omega_n)
        mut_n = np.zeros((len(omega_n), 3), dtype=complex)
        pos = phase_positions(omega_n)
        mut_n[pos["a"], :] = -y6[0, :]
        mut_n[pos["b"], :] = -y6[1, :]
        return {"self_n": self_n, "mut_n": mut_n, "self_m": y4 + e1 * i3, "mut_m": mut_n.T}
    raise ValueError("unknown connection " + conn)


def regulator_ratio(tap, svr_type):
    step = 0.00625 * tap
    return 1.0 - step if svr_type == "B" else 1.0 + step


def svr_gains(edge):
    config = edge.get("config", "wye")
    svr_type = edge.get("svr_type", "B")
    taps = edge.get("taps", {})
    z_r = {k: cpx(v) for k, v in edge.get("z_r", {}).items()}
    phases = edge["phases"]

    if config == "wye":
        a = {p: regulator_ratio(taps.get(p, 0), svr_type) for p in "abc"}
        av = np.diag([a["a"], a["b"], a["c"]]).astype(complex)
        ai = np.diag([1 / a["a"], 1 / a["b"], 1 / a["c"]]).astype(complex)
        zr = np.diag([z_r.get(p, 0) for p in "abc"]).astype(complex)
    elif config == "closed-delta":
        aab = regulator_ratio(taps.get("ab", 0), svr_type)
        abc_ = regulator_ratio(taps.get("bc", 0), svr_type)
        aca = regulator_ratio(taps.get("ca", 0), svr_type)
        av = np.array([[aab, 1 - aab, 0], [0, abc_, 1 - abc_], [1 - aca, 0, aca]], dtype=complex)
        pre = np.array([[aab, 0, 1 - aca], [1 - aab, abc_, 0], [0, 1 - abc_, aca]], dtype=complex)
        ai = np.linalg.inv(pre)
        zr = np.diag([z_r.get("ab", 0), z_r.get("bc", 0), z_r.get("ca", 0)]).astype(complex)
    elif config == "open-delta":
        aab = regulator_ratio(taps.get("ab", 0), svr_type)
        acb = regulator_ratio(taps.get("cb", 0), svr_type)
        av = np.array([[aab, 1 - aab, 0], [0, 1, 0], [0, 1 - acb, acb]], dtype=complex)
        ai = np.array([[1 / aab, 0, 0], [1 - 1 / aab, 1, 1 - 1 / acb], [0, 0, 1 / acb]],
                      dtype=complex)
        zr = np.diag([z_r.get("ab", 0), 0, z_r.get("cb", 0)]).astype(complex)
    else:
        raise ValueError("unknown config " + config)

    if svr_type == "A":
        av, ai = ai.T.copy(), av.T.copy()

    sel = ["abc".index(p) for p in phases]
    return av[np.ix_(sel, sel)], ai[np.ix_(sel, sel)], zr[np.ix_(sel, sel)]


def svr_blocks(edge, omega_n, omega_m, ideal):
    phases = edge["phases"]
    lb = line_blocks(edge["line"], phases, omega_m)
    av, ai, zr = svr_gains(edge)
    use_ideal = ideal or not np.any(zr)
    if use_ideal:
        self_n = ai @ lb["self_n"] @ ai.T
        mut_n = ai @ lb["mut_n"]
        self_m = lb["self_m"]
    else:
        atza = ai.T @ zr @ ai
        f = np.eye(len(phases), dtype=complex) + lb["self_n"] @ atza
        finv = np.linalg.inv(f)
        self_n = ai @ finv @ lb["self_n"] @ ai.T
        mut_n = ai @ finv @ lb["mut_n"]
        self_m = lb["self_m"] - lb["mut_m"] @ atza @ finv @ lb["mut_n"]
    out_self = embed(self_n, phases, omega_n, omega_n)
    out_mut = np.zeros((len(omega_n), len(omega_m)), dtype=complex)
    pos = phase_positions(omega_n)
    for i, p in enumerate(phases):
        out_mut[pos[p], :] = mut_n[i, :]
    return {"self_n": out_self, "mut_n": out_mut, "self_m": self_m, "mut_m": out_mut.T}


class Network:
    def __init__(self, doc, eps_rel, ideal_svr):
        self.doc = doc
        self.slack_id = doc["slack"]["bus"]
        volt = doc["slack"].get("voltage", {})
        if "phasors" in volt:
            self.v_slack = np.array([cpx(v) for v in volt["phasors"]])
        else:
            mag = volt.get("magnitude_pu", 1.0)
            ang = volt.get("angles_deg", [0.0, -120.0, 120.0])
            self.v_slack = np.array([mag * np.exp(1j * math.radians(a)) for a in ang])

        self.buses = {b["id"]: b for b in doc["buses"]}
        self.order = [b["id"] for b in doc["buses"] if b["connection"] != "slack"]
        self.offset = {}
        j = 0
        for bid in self.order:
            self.offset[bid] = j
            j += len(self.buses[bid]["phases"])
        self.J = j

        self.Y = np.zeros((j, j), dtype=complex)
        self.YNS = np.zeros((j, 3), dtype=complex)
        for edge in doc["edges"]:
            n, m = edge["from"], edge["to"]
            on, om = self.buses[n]["phases"], self.buses[m]["phases"]
            if edge["kind"] == "line":
                blocks = line_blocks(edge, on, om)
            elif edge["kind"] == "transformer":
                blocks = transformer_blocks(edge, on, om, eps_rel)
            else:
                blocks = svr_blocks(edge, on, om, ideal_svr)
            self._stamp(n, m, blocks)

        self.YL = np.zeros((j, j), dtype=complex)
        for bid in self.order:
            self._stamp_load_admittance(bid)

    def _slice(self, bid):
        return slice(self.offset[bid], self.offset[bid] + len(self.buses[bid]["phases"]))

    def _stamp(self, n, m, blocks):
        ns, nm = n == self.slack_id, m == self.slack_id
        if not ns:
            self.Y[self._slice(n), self._slice(n)] += blocks["self_n"]
        if not nm:
            self.Y[self._slice(m), self._slice(m)] += blocks["self_m"]
        if not ns and not nm:
            self.Y[self._slice(n), self._slice(m)] += -blocks["mut_n"]
            self.Y[self._slice(m), self._slice(n)] += -blocks["mut_m"]
        elif nm:
            self.YNS[self._slice(n), :] += -blocks["mut_n"]
        else:
            self.YNS[self._slice(m), :] += -blocks["mut_m"]

    def _load_terms(self, bid):
        bus = self.buses[bid]
        load = dict(bus.get("load", {}))
        terms = {"s": dict(load.get("s", {})), "i": dict(load.get("i", {})),
                 "y": {k: cpx(v) for k, v in load.get("y", {}).items()}}
        cap = bus.get("capacitor", {}).get("q", {})
        delta = bus["connection"] == "delta"
        for key, q in cap.items():
            add = 1j * q / 3.0 if delta else 1j * q
            terms["y"][key] = terms["y"].get(key, 0) + add
        return terms, delta, load.get("fixed_phasor_current", False)

    def _stamp_load_admittance(self, bid):
        terms, delta, _ = self._load_terms(bid)
        phases = self.buses[bid]["phases"]
        pos = phase_positions(phases)
        blk = np.zeros((len(phases), len(phases)), dtype=complex)
        for key, y in terms["y"].items():
            if delta:
                p, q = PAIRS[key]
                blk[pos[p], pos[p]] += y
                blk[pos[q], pos[q]] += y
                blk[pos[p], pos[q]] -= y
                blk[pos[q], pos[p]] -= y
            else:
                blk[pos[key], pos[key]] += y
        self.YL[self._slice(bid), self._slice(bid)] += blk

    def injections_pqi(self, v):
        out = np.zeros(self.J, dtype=complex)
        for bid in self.order:
            terms, delta, fixed = self._load_terms(bid)
            phases = self.buses[bid]["phases"]
            pos = phase_positions(phases)
            vb = v[self._slice(bid)]
            ib = np.zeros(len(phases), dtype=complex)
            for key, sv in terms["s"].items():
                s = cpx(sv)
                if delta:
                    p, q = PAIRS[key]
                    d = vb[pos[p]] - vb[pos[q]]
                    c = np.conj(s / d)
                    ib[pos[p]] -= c
                    ib[pos[q]] += c
                else:
                    ib[pos[key]] -= np.conj(s / vb[pos[key]])
            for key, iv in terms["i"].items():
                i = cpx(iv)
                if delta:
                    p, q = PAIRS[key]
                    d = vb[pos[p]] - vb[pos[q]]
                    c = i if fixed else (d / abs(d)) * i
                    ib[pos[p]] -= 0 if fixed else c
                    ib[pos[q]] += 0 if fixed else c
                    if fixed:
                        ib[pos[p]] += i
                        ib[pos[q]] -= i
                else:
                    ib[pos[key]] += i if fixed else -(vb[pos[key]] / abs(vb[pos[key]])) * i
            out[self._slice(bid)] += ib
        return out

    def flat_start(self):
        v = np.zeros(self.J, dtype=complex)
        for bid in self.order:
            phases = self.buses[bid]["phases"]
            for k, p in enumerate(phases):
                v[self.offset[bid] + k] = self.v_slack["abc".index(p)]
        return v

    def mismatch(self, v):
        return self.injections_pqi(v) - (self.Y + self.YL) @ v - self.YNS @ self.v_slack

    def solve(self, tol=1e-13, max_iter=400):
        a = self.Y + self.YL
        w = np.linalg.solve(a, -self.YNS @ self.v_slack)
        v = self.flat_start()
        for _ in range(max_iter):
            nxt = np.linalg.solve(a, self.injections_pqi(v)) + w
            if np.max(np.abs(nxt - v)) < tol:
                v = nxt
                break
            v = nxt

        # Independent polish: hand the current-balance equations to scipy's
        # root finder in stacked real coordinates.
        def residual(x):
            vv = x[: self.J] + 1j * x[self.J:]
            f = self.mismatch(vv)
            return np.concatenate([f.real, f.imag])

        x0 = np.concatenate([v.real, v.imag])
        sol = root(residual, x0, method="hybr", tol=1e-13)
        vv = sol.x[: self.J] + 1j * sol.x[self.J:]
        res = np.max(np.abs(self.mismatch(vv)))
        if res > 1e-9:
            raise RuntimeError(f"reference solve did not converge: residual {res}")
        drift = np.max(np.abs(vv - v))
        return vv, res, drift

    def internal_voltages(self, v, ideal_svr):
        out = {}
        for edge in self.doc["edges"]:
            if edge["kind"] != "svr":
                continue
            phases = edge["phases"]
            n, m = edge["from"], edge["to"]
            vn_full = self.v_slack if n == self.slack_id else v[self._slice(n)]
            n_phases = self.buses[n]["phases"]
            pos = phase_positions(n_phases)
            vn = np.array([vn_full[pos[p]] for p in phases])
            vm = self.v_slack if m == self.slack_id else v[self._slice(m)]
            lb = line_blocks(edge["line"], phases, self.buses[m]["phases"])
            av, ai, zr = svr_gains(edge)
            if ideal_svr or not np.any(zr):
                out[edge.get("internal_id", edge["id"] + "_sec")] = (ai.T @ vn, phases)
                continue
            i_line = lb["self_n"] @ (ai.T @ vn) - lb["mut_n"] @ vm
            f = np.eye(len(phases), dtype=complex) + lb["self_n"] @ ai.T @ zr @ ai
            i_line = np.linalg.solve(f, i_line)
            out[edge.get("internal_id", edge["id"] + "_sec")] = (ai.T @ (vn - zr @ (ai @ i_line)), phases)
        return out


def natural_cmp(a, b):
    i = j = 0
    while i < len(a) and j < len(b):
        if a[i].isdigit() and b[j].isdigit():
            i2, j2 = i, j
            while i2 < len(a) and a[i2].isdigit():
                i2 += 1
            while j2 < len(b) and b[j2].isdigit():
                j2 += 1
            da, db = int(a[i:i2]), int(b[j:j2])
            if da != db:
                return -1 if da < db else 1
            i, j = i2, j2
        else:
            if a[i] != b[j]:
                return -1 if a[i] < b[j] else 1
            i += 1
            j += 1
    if len(a) - i != len(b) - j:
        return -1 if len(a) - i < len(b) - j else 1
    return 0


def emit_csv(net, v, internals, path, note):
    lines = [f"# reference load-flow benchmark ({note})", "bus,phase,vm_pu,va_deg"]
    ids = [b["id"] for b in net.doc["buses"]]
    for bid in sorted(ids, key=functools.cmp_to_key(natural_cmp)):
        phases = net.buses[bid]["phases"]
        for k, p in enumerate(phases):
            if bid == net.slack_id:
                val = net.v_slack["abc".index(p)]
            else:
                val = v[net.offset[bid] + k]
            lines.append("%s,%s,%.6f,%.6f" % (bid, p, abs(val), math.degrees(np.angle(val))))
    for label in sorted(internals, key=functools.cmp_to_key(natural_cmp)):
        vec, phases = internals[label]
        for k, p in enumerate(phases):
            lines.append("%s,%s,%.6f,%.6f" % (label, p, abs(vec[k]), math.degrees(np.angle(vec[k]))))
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--feeder", required=True)
    ap.add_argument("--epsilon", type=float, default=1e-6)
    ap.add_argument("--ideal-svr", action="store_true")
    ap.add_argument("--out", required=True)
    args = ap.parse_args()

    doc = json.load(open(args.feeder))
    net = Network(doc, args.epsilon, args.ideal_svr)
    v, res, drift = net.solve()
    print(f"J={net.J} residual={res:.3e} fixed-point-vs-root drift={drift:.3e}")
    internals = net.internal_voltages(v, args.ideal_svr)
    note = "%s epsilon=%g %s" % (doc.get("name", "?"), args.epsilon,
                                 "ideal SVR" if args.ideal_svr else "as-specified SVR")
    emit_csv(net, v, internals, args.out, note)
    print("wrote", args.out)


if __name__ == "__main__":
    main()
