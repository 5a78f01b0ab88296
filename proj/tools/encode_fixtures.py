#!/usr/bin/env python3
"""Generates the bundled feeder fixtures (data/ieee37.json, data/ieee123.json).

Raw tables below come from the public IEEE PES distribution test feeder
documentation: line configurations in ohm/mile and microsiemens/mile,
segment lengths in feet, spot loads in kW/kvar, transformer and regulator
nameplate data. This script converts everything to per-unit on the bases
declared per feeder and writes schema-version-1 feeder documents.

Conventions (documented in docs/feeder-format.md):
  - Z_base = kV_LL^2 / MVA_3ph; line Z_pu = Z_ohm_per_mile * miles / Z_base.
  - Line shunt Y_pu = j * B_uS_per_mile * 1e-6 * miles * Z_base.
  - Per-phase power base S_1ph = MVA_3ph / 3. Wye load s_pu = S_load / S_1ph;
    delta pair loads use the same base.
  - Constant-current loads store the rated current phasor: wye i = conj(s_pu),
    delta i = conj(s_pu)/sqrt(3) (unit pair voltage magnitude is sqrt(3)).
  - Constant-impedance loads: wye y = conj(s_pu), delta y = conj(s_pu)/3.
  - Capacitors store q_pu = kvar / S_1ph (vars supplied at 1 pu voltage).
  - Transformer z percent values are converted from the nameplate MVA to the
    system base.
"""

import json
import math
import os

FT_PER_MILE = 5280.0


def cpx(z):
    return [z.real, z.imag]


def zmatrix(rows):
    return [[cpx(z) for z in row] for row in rows]


def scale(rows, k):
    return [[z * k for z in row] for row in rows]


# ---------------------------------------------------------------------------
# IEEE 37-bus feeder: 4.8 kV delta system, underground cables, delta loads.
# ---------------------------------------------------------------------------

CFG37 = {
    721: dict(
        phases="abc",
        z=[
            [0.2926 + 0.1973j, 0.0673 - 0.0368j, 0.0337 - 0.0417j],
            [0.0673 - 0.0368j, 0.2646 + 0.1900j, 0.0673 - 0.0368j],
            [0.0337 - 0.0417j, 0.0673 - 0.0368j, 0.2926 + 0.1973j],
        ],
        b=159.7919,
    ),
    722: dict(
        phases="abc",
        z=[
            [0.4751 + 0.2973j, 0.1629 - 0.0326j, 0.1234 - 0.0607j],
            [0.1629 - 0.0326j, 0.4488 + 0.2678j, 0.1629 - 0.0326j],
            [0.1234 - 0.0607j, 0.1629 - 0.0326j, 0.4751 + 0.2973j],
        ],
        b=127.8306,
    ),
    723: dict(
        phases="abc",
        z=[
            [1.2936 + 0.6713j, 0.4871 + 0.2111j, 0.4585 + 0.1521j],
            [0.4871 + 0.2111j, 1.3022 + 0.6326j, 0.4871 + 0.2111j],
            [0.4585 + 0.1521j, 0.4871 + 0.2111j, 1.2936 + 0.6713j],
        ],
        b=74.8405,
    ),
    724: dict(
        phases="abc",
        z=[
            [2.0952 + 0.7758j, 0.5204 + 0.2738j, 0.4926 + 0.2123j],
            [0.5204 + 0.2738j, 2.1068 + 0.7398j, 0.5204 + 0.2738j],
            [0.4926 + 0.2123j, 0.5204 + 0.2738j, 2.0952 + 0.7758j],
        ],
        b=60.2483,
    ),
}

SEGMENTS37 = [
    # (from, to, feet, config)
    ("701", "702", 960, 722),
    ("702", "705", 400, 724),
    ("702", "713", 360, 723),
    ("702", "703", 1320, 722),
    ("703", "727", 240, 724),
    ("703", "730", 600, 723),
    ("704", "714", 80, 724),
    ("704", "720", 800, 723),
    ("705", "742", 320, 724),
    ("705", "712", 240, 724),
    ("706", "725", 280, 724),
    ("707", "724", 760, 724),
    ("707", "722", 120, 724),
    ("708", "733", 320, 723),
    ("708", "732", 320, 724),
    ("709", "731", 600, 723),
    ("709", "708", 320, 723),
    ("710", "735", 200, 724),
    ("710", "736", 1280, 724),
    ("711", "741", 400, 723),
    ("711", "740", 200, 724),
    ("713", "704", 520, 723),
    ("714", "718", 520, 724),
    ("720", "707", 920, 724),
    ("720", "706", 600, 723),
    ("727", "744", 280, 723),
    ("730", "709", 200, 723),
    ("733", "734", 560, 723),
    ("734", "737", 640, 723),
    ("734", "710", 520, 724),
    ("737", "738", 400, 723),
    ("738", "711", 400, 723),
    ("744", "728", 200, 724),
    ("744", "729", 280, 724),
]

# Spot loads: bus -> (model, {pair: (kW, kvar)}); all delta connected.
LOADS37 = {
    "701": ("PQ", {"ab": (140, 70), "bc": (140, 70), "ca": (350, 175)}),
    "712": ("PQ", {"ca": (85, 40)}),
    "713": ("PQ", {"ca": (85, 40)}),
    "714": ("I", {"ab": (17, 8), "bc": (21, 10)}),
    "718": ("Z", {"ab": (85, 40)}),
    "720": ("PQ", {"ca": (85, 40)}),
    "722": ("I", {"bc": (140, 70), "ca": (21, 10)}),
    "724": ("Z", {"bc": (42, 21)}),
    "725": ("PQ", {"bc": (42, 21)}),
    "727": ("PQ", {"ca": (42, 21)}),
    "728": ("PQ", {"ab": (42, 21), "bc": (42, 21), "ca": (42, 21)}),
    "729": ("I", {"ab": (42, 21)}),
    "730": ("Z", {"ca": (85, 40)}),
    "731": ("Z", {"bc": (85, 40)}),
    "732": ("PQ", {"ca": (42, 21)}),
    "733": ("I", {"ab": (85, 40)}),
    "734": ("PQ", {"ca": (42, 21)}),
    "735": ("PQ", {"ca": (85, 40)}),
    "736": ("Z", {"bc": (42, 21)}),
    "737": ("I", {"ab": (140, 70)}),
    "738": ("PQ", {"ab": (126, 62)}),
    "740": ("PQ", {"ca": (85, 40)}),
    "741": ("PQ", {"ca": (42, 21)}),
    "742": ("Z", {"ab": (8, 4), "bc": (85, 40)}),
    "744": ("PQ", {"ab": (42, 21)}),
}


def line_edge(eid, frm, to, feet, cfg, zbase, phases=None):
    miles = feet / FT_PER_MILE
    z = scale(cfg["z"], miles / zbase)
    n = len(cfg["z"])
    bmat = cfg.get("bmat")
    if bmat is None:
        bmat = [[cfg["b"] if r == c else 0.0 for c in range(n)] for r in range(n)]
    ys = [[1j * bmat[r][c] * 1e-6 * miles * zbase for c in range(n)] for r in range(n)]
    return {
        "id": eid,
        "kind": "line",
        "from": frm,
        "to": to,
        "phases": phases or cfg["phases"],
        "z": zmatrix(z),
        "y_shunt": zmatrix(ys),
    }


def line_spec(feet, cfg, zbase, phases=None):
    e = line_edge("x", "x", "x", feet, cfg, zbase, phases)
    return {"phases": e["phases"], "z": e["z"], "y_shunt": e["y_shunt"]}


def delta_load(model, pairs, s1ph_kva):
    load = {}
    terms = {}
    for pair, (kw, kvar) in pairs.items():
        s = complex(kw, kvar) / s1ph_kva
        if model == "PQ":
            terms[pair] = s
        elif model == "I":
            terms[pair] = s.conjugate() / math.sqrt(3.0)
        else:
            terms[pair] = s.conjugate() / 3.0
    key = {"PQ": "s", "I": "i", "Z": "y"}[model]
    load[key] = {pair: cpx(v) for pair, v in terms.items()}
    return load


def wye_load(model, phases_kw, s1ph_kva):
    terms = {}
    for phase, (kw, kvar) in phases_kw.items():
        s = complex(kw, kvar) / s1ph_kva
        if model == "PQ":
            terms[phase] = s
        elif model == "I":
            terms[phase] = s.conjugate()
        else:
            terms[phase] = s.conjugate()
    key = {"PQ": "s", "I": "i", "Z": "y"}[model]
    return {key: {phase: cpx(v) for phase, v in terms.items()}}


def build_ieee37():
    mva = 2.5
    kv = 4.8
    zbase = kv * kv / mva  # 9.216 ohm
    s1ph_kva = mva * 1000.0 / 3.0

    buses = [{"id": "sourcebus", "connection": "slack", "phases": "abc"}]
    bus_ids = sorted({b for seg in SEGMENTS37 for b in seg[:2]} | {"799", "775"}, key=int)
    for bid in bus_ids:
        bus = {"id": bid, "connection": "delta" if bid in LOADS37 else "wye", "phases": "abc"}
        if bid in LOADS37:
            model, pairs = LOADS37[bid]
            bus["load"] = delta_load(model, pairs, s1ph_kva)
        buses.append(bus)

    edges = []
    # Substation transformer: 230 kV / 4.8 kV, 2500 kVA, z = 2 + j8 %.
    edges.append(
        {
            "id": "SUBXF",
            "kind": "transformer",
            "from": "sourcebus",
            "to": "799",
            "phases": "abc",
            "connection": "delta:delta",
            "z_t": cpx(complex(0.02, 0.08)),
        }
    )
    # Open-delta regulator at the substation, in series with the 1850 ft
    # feed to 701; z_R = j1% per arm. Tap selection is out of scope (taps are
    # inputs); these values meet the published 122 V / 120 V set point at the
    # regulator output to within half a tap step.
    edges.append(
        {
            "id": "RG11",
            "kind": "svr",
            "from": "799",
            "to": "701",
            "phases": "abc",
            "config": "open-delta",
            "svr_type": "B",
            "taps": {"ab": 16, "cb": 10},
            "z_r": {"ab": [0.0, 0.01], "cb": [0.0, 0.01]},
            "internal_id": "799r",
            "line": line_spec(1850, CFG37[721], zbase),
        }
    )
    for frm, to, feet, cfg in SEGMENTS37:
        edges.append(line_edge("L%s-%s" % (frm, to), frm, to, feet, CFG37[cfg], zbase))
    # In-feeder transformer XFM-1: 4.8 kV / 480 V, 500 kVA, z = 0.09 + j1.81 %
    # on its own rating (converted to the 2.5 MVA system base).
    zt = complex(0.0009, 0.0181) * (mva * 1000.0 / 500.0)
    edges.append(
        {
            "id": "XFM1",
            "kind": "transformer",
            "from": "709",
            "to": "775",
            "phases": "abc",
            "connection": "delta:delta",
            "z_t": cpx(zt),
        }
    )

    return {
        "schema_version": 1,
        "name": "ieee37",
        "base": {"s_mva": mva, "kv_ll": {"source": 230.0, "feeder": kv, "xfm1_secondary": 0.48}},
        "slack": {"bus": "sourcebus", "voltage": {"magnitude_pu": 1.0, "angles_deg": [0.0, -120.0, 120.0]}},
        "buses": buses,
        "edges": edges,
    }


# ---------------------------------------------------------------------------
# IEEE 123-bus feeder: 4.16 kV, one-, two-, and three-phase laterals.
# ---------------------------------------------------------------------------

B1 = [[5.6765, -1.8319, -0.6982], [-1.8319, 5.9809, -1.1645], [-0.6982, -1.1645, 5.3971]]

CFG123 = {
    1: dict(
        phases="abc",
        z=[
            [0.4576 + 1.0780j, 0.1560 + 0.5017j, 0.1535 + 0.3849j],
            [0.1560 + 0.5017j, 0.4666 + 1.0482j, 0.1580 + 0.4236j],
            [0.1535 + 0.3849j, 0.1580 + 0.4236j, 0.4615 + 1.0651j],
        ],
        bmat=B1,
    ),
    2: dict(
        phases="abc",
        z=[
            [0.4666 + 1.0482j, 0.1580 + 0.4236j, 0.1560 + 0.5017j],
            [0.1580 + 0.4236j, 0.4615 + 1.0651j, 0.1535 + 0.3849j],
            [0.1560 + 0.5017j, 0.1535 + 0.3849j, 0.4576 + 1.0780j],
        ],
        bmat=[[5.9809, -1.1645, -1.8319], [-1.1645, 5.3971, -0.6982], [-1.8319, -0.6982, 5.6765]],
    ),
    3: dict(
        phases="abc",
        z=[
            [0.4615 + 1.0651j, 0.1535 + 0.3849j, 0.1580 + 0.4236j],
            [0.1535 + 0.3849j, 0.4576 + 1.0780j, 0.1560 + 0.5017j],
            [0.1580 + 0.4236j, 0.1560 + 0.5017j, 0.4666 + 1.0482j],
        ],
        bmat=[[5.3971, -0.6982, -1.1645], [-0.6982, 5.6765, -1.8319], [-1.1645, -1.8319, 5.9809]],
    ),
    4: dict(
        phases="abc",
        z=[
            [0.4615 + 1.0651j, 0.1580 + 0.4236j, 0.1535 + 0.3849j],
            [0.1580 + 0.4236j, 0.4666 + 1.0482j, 0.1560 + 0.5017j],
            [0.1535 + 0.3849j, 0.1560 + 0.5017j, 0.4576 + 1.0780j],
        ],
        bmat=[[5.3971, -1.1645, -0.6982], [-1.1645, 5.9809, -1.8319], [-0.6982, -1.8319, 5.6765]],
    ),
    5: dict(
        phases="abc",
        z=[
            [0.4666 + 1.0482j, 0.1560 + 0.5017j, 0.1580 + 0.4236j],
            [0.1560 + 0.5017j, 0.4576 + 1.0780j, 0.1535 + 0.3849j],
            [0.1580 + 0.4236j, 0.1535 + 0.3849j, 0.4615 + 1.0651j],
        ],
        bmat=[[5.9809, -1.8319, -1.1645], [-1.8319, 5.6765, -0.6982], [-1.1645, -0.6982, 5.3971]],
    ),
    6: dict(
        phases="abc",
        z=[
            [0.4576 + 1.0780j, 0.1535 + 0.3849j, 0.1560 + 0.5017j],
            [0.1535 + 0.3849j, 0.4615 + 1.0651j, 0.1580 + 0.4236j],
            [0.1560 + 0.5017j, 0.1580 + 0.4236j, 0.4666 + 1.0482j],
        ],
        bmat=[[5.6765, -0.6982, -1.8319], [-0.6982, 5.3971, -1.1645], [-1.8319, -1.1645, 5.9809]],
    ),
    7: dict(
        phases="ac",
        z=[[0.4576 + 1.0780j, 0.1535 + 0.3849j], [0.1535 + 0.3849j, 0.4615 + 1.0651j]],
        bmat=[[5.6990, -1.0817], [-1.0817, 5.1795]],
    ),
    8: dict(
        phases="ab",
        z=[[0.4576 + 1.0780j, 0.1535 + 0.3849j], [0.1535 + 0.3849j, 0.4615 + 1.0651j]],
        bmat=[[5.6990, -1.0817], [-1.0817, 5.1795]],
    ),
    9: dict(phases="a", z=[[1.3292 + 1.3475j]], b=4.5193),
    10: dict(phases="b", z=[[1.3292 + 1.3475j]], b=4.5193),
    11: dict(phases="c", z=[[1.3292 + 1.3475j]], b=4.5193),
    12: dict(
        phases="abc",
        z=[
            [1.5209 + 0.7521j, 0.5198 + 0.2775j, 0.4924 + 0.2157j],
            [0.5198 + 0.2775j, 1.5329 + 0.7162j, 0.5198 + 0.2775j],
            [0.4924 + 0.2157j, 0.5198 + 0.2775j, 1.5209 + 0.7521j],
        ],
        b=88.9912,
    ),
}

# Closed switches merge their endpoints: 152->13, 135->18, 160->60, 197->97.
SEGMENTS123 = [
    ("1", "2", 175, 10),
    ("1", "3", 250, 11),
    ("1", "7", 300, 1),
    ("3", "4", 200, 11),
    ("3", "5", 325, 11),
    ("5", "6", 250, 11),
    ("7", "8", 200, 1),
    ("8", "12", 225, 10),
    ("8", "9", 225, 9),
    ("8", "13", 300, 1),
    ("13", "34", 150, 11),
    ("13", "18", 825, 2),
    ("14", "11", 250, 9),
    ("14", "10", 250, 9),
    ("15", "16", 375, 11),
    ("15", "17", 350, 11),
    ("18", "19", 250, 9),
    ("18", "21", 300, 2),
    ("19", "20", 325, 9),
    ("21", "22", 525, 10),
    ("21", "23", 250, 2),
    ("23", "24", 550, 11),
    ("23", "25", 275, 2),
    ("25", "28", 200, 2),
    ("26", "27", 275, 7),
    ("26", "31", 225, 11),
    ("27", "33", 500, 9),
    ("28", "29", 300, 2),
    ("29", "30", 350, 2),
    ("30", "250", 200, 2),
    ("31", "32", 300, 11),
    ("34", "15", 100, 11),
    ("35", "36", 650, 8),
    ("35", "40", 250, 1),
    ("36", "37", 300, 9),
    ("36", "38", 250, 10),
    ("38", "39", 325, 10),
    ("40", "41", 325, 11),
    ("40", "42", 250, 1),
    ("42", "43", 500, 10),
    ("42", "44", 200, 1),
    ("44", "45", 200, 9),
    ("44", "47", 250, 1),
    ("45", "46", 300, 9),
    ("47", "48", 150, 4),
    ("47", "49", 250, 4),
    ("49", "50", 250, 4),
    ("50", "51", 250, 4),
    ("52", "53", 200, 1),
    ("53", "54", 125, 1),
    ("54", "55", 275, 1),
    ("54", "57", 350, 3),
    ("55", "56", 275, 1),
    ("57", "58", 250, 10),
    ("57", "60", 750, 3),
    ("58", "59", 250, 10),
    ("60", "61", 550, 5),
    ("60", "62", 250, 12),
    ("62", "63", 175, 12),
    ("63", "64", 350, 12),
    ("64", "65", 425, 12),
    ("65", "66", 325, 12),
    ("67", "68", 200, 9),
    ("67", "72", 275, 3),
    ("67", "97", 250, 3),
    ("68", "69", 275, 9),
    ("69", "70", 325, 9),
    ("70", "71", 275, 9),
    ("72", "73", 275, 11),
    ("72", "76", 200, 3),
    ("73", "74", 350, 11),
    ("74", "75", 400, 11),
    ("76", "77", 400, 6),
    ("76", "86", 700, 3),
    ("77", "78", 100, 6),
    ("78", "79", 225, 6),
    ("78", "80", 475, 6),
    ("80", "81", 475, 6),
    ("81", "82", 250, 6),
    ("81", "84", 675, 11),
    ("82", "83", 250, 6),
    ("84", "85", 475, 11),
    ("86", "87", 450, 6),
    ("87", "88", 175, 9),
    ("87", "89", 275, 6),
    ("89", "90", 225, 10),
    ("89", "91", 225, 6),
    ("91", "92", 300, 11),
    ("91", "93", 225, 6),
    ("93", "94", 275, 9),
    ("93", "95", 300, 6),
    ("95", "96", 200, 10),
    ("97", "98", 275, 3),
    ("98", "99", 550, 3),
    ("99", "100", 300, 3),
    ("100", "450", 800, 3),
    ("101", "102", 225, 11),
    ("101", "105", 275, 3),
    ("102", "103", 325, 11),
    ("103", "104", 700, 11),
    ("105", "106", 225, 10),
    ("105", "108", 325, 3),
    ("106", "107", 575, 10),
    ("108", "109", 450, 9),
    ("108", "300", 1000, 3),
    ("109", "110", 300, 9),
    ("110", "111", 575, 9),
    ("110", "112", 125, 9),
    ("112", "113", 525, 9),
    ("113", "114", 325, 9),
    ("18", "35", 375, 4),
    ("13", "52", 400, 1),
    ("97", "101", 250, 3),
]

# bus -> (connection, model, {phase-or-pair: (kW, kvar)})
LOADS123 = {
    "1": ("wye", "PQ", {"a": (40, 20)}),
    "2": ("wye", "PQ", {"b": (20, 10)}),
    "4": ("wye", "PQ", {"c": (40, 20)}),
    "5": ("wye", "I", {"c": (20, 10)}),
    "6": ("wye", "Z", {"c": (40, 20)}),
    "7": ("wye", "PQ", {"a": (20, 10)}),
    "9": ("wye", "PQ", {"a": (40, 20)}),
    "10": ("wye", "I", {"a": (20, 10)}),
    "11": ("wye", "Z", {"a": (40, 20)}),
    "12": ("wye", "PQ", {"b": (20, 10)}),
    "16": ("wye", "PQ", {"c": (40, 20)}),
    "17": ("wye", "PQ", {"c": (20, 10)}),
    "19": ("wye", "PQ", {"a": (40, 20)}),
    "20": ("wye", "I", {"a": (40, 20)}),
    "22": ("wye", "Z", {"b": (40, 20)}),
    "24": ("wye", "PQ", {"c": (40, 20)}),
    "28": ("wye", "I", {"a": (40, 20)}),
    "29": ("wye", "Z", {"a": (40, 20)}),
    "30": ("wye", "PQ", {"c": (40, 20)}),
    "31": ("wye", "PQ", {"c": (20, 10)}),
    "32": ("wye", "PQ", {"c": (20, 10)}),
    "33": ("wye", "I", {"a": (40, 20)}),
    "34": ("wye", "Z", {"c": (40, 20)}),
    "35": ("delta", "PQ", {"ab": (40, 20)}),
    "37": ("wye", "Z", {"a": (40, 20)}),
    "38": ("wye", "I", {"b": (20, 10)}),
    "39": ("wye", "PQ", {"b": (20, 10)}),
    "41": ("wye", "PQ", {"c": (20, 10)}),
    "42": ("wye", "PQ", {"a": (20, 10)}),
    "43": ("wye", "Z", {"b": (40, 20)}),
    "45": ("wye", "I", {"a": (20, 10)}),
    "46": ("wye", "PQ", {"a": (20, 10)}),
    "47": ("wye", "I", {"a": (35, 25), "b": (35, 25), "c": (35, 25)}),
    "48": ("wye", "Z", {"a": (70, 50), "b": (70, 50), "c": (70, 50)}),
    "49": ("wye", "PQ", {"a": (35, 25), "b": (70, 50), "c": (35, 20)}),
    "50": ("wye", "PQ", {"c": (40, 20)}),
    "51": ("wye", "PQ", {"a": (20, 10)}),
    "52": ("wye", "PQ", {"a": (40, 20)}),
    "53": ("wye", "PQ", {"a": (40, 20)}),
    "55": ("wye", "Z", {"a": (20, 10)}),
    "56": ("wye", "PQ", {"b": (20, 10)}),
    "58": ("wye", "I", {"b": (20, 10)}),
    "59": ("wye", "PQ", {"b": (20, 10)}),
    "60": ("wye", "PQ", {"a": (20, 10)}),
    "62": ("wye", "Z", {"c": (40, 20)}),
    "63": ("wye", "PQ", {"a": (40, 20)}),
    "64": ("wye", "I", {"b": (75, 35)}),
    "65": ("delta", "Z", {"ab": (35, 25), "bc": (35, 25), "ca": (70, 50)}),
    "66": ("wye", "PQ", {"c": (75, 35)}),
    "68": ("wye", "PQ", {"a": (20, 10)}),
    "69": ("wye", "PQ", {"a": (40, 20)}),
    "70": ("wye", "PQ", {"a": (20, 10)}),
    "71": ("wye", "PQ", {"a": (40, 20)}),
    "73": ("wye", "PQ", {"c": (40, 20)}),
    "74": ("wye", "Z", {"c": (40, 20)}),
    "75": ("wye", "PQ", {"c": (40, 20)}),
    "76": ("delta", "I", {"ab": (105, 80), "bc": (70, 50), "ca": (70, 50)}),
    "77": ("wye", "PQ", {"b": (40, 20)}),
    "79": ("wye", "Z", {"a": (40, 20)}),
    "80": ("wye", "PQ", {"b": (40, 20)}),
    "82": ("wye", "PQ", {"a": (40, 20)}),
    "83": ("wye", "PQ", {"c": (20, 10)}),
    "84": ("wye", "PQ", {"c": (20, 10)}),
    "85": ("wye", "PQ", {"c": (40, 20)}),
    "86": ("wye", "PQ", {"b": (20, 10)}),
    "87": ("wye", "PQ", {"b": (40, 20)}),
    "88": ("wye", "PQ", {"a": (40, 20)}),
    "90": ("wye", "I", {"b": (40, 20)}),
    "92": ("wye", "PQ", {"c": (40, 20)}),
    "94": ("wye", "PQ", {"a": (40, 20)}),
    "95": ("wye", "PQ", {"b": (20, 10)}),
    "96": ("wye", "PQ", {"b": (20, 10)}),
    "98": ("wye", "PQ", {"a": (40, 20)}),
    "99": ("wye", "PQ", {"b": (40, 20)}),
    "100": ("wye", "Z", {"c": (40, 20)}),
    "102": ("wye", "PQ", {"c": (20, 10)}),
    "103": ("wye", "PQ", {"c": (40, 20)}),
    "104": ("wye", "PQ", {"c": (40, 20)}),
    "106": ("wye", "PQ", {"b": (40, 20)}),
    "107": ("wye", "PQ", {"b": (40, 20)}),
    "109": ("wye", "PQ", {"a": (40, 20)}),
    "111": ("wye", "PQ", {"a": (20, 10)}),
    "112": ("wye", "I", {"a": (20, 10)}),
    "113": ("wye", "Z", {"a": (40, 20)}),
    "114": ("wye", "PQ", {"a": (20, 10)}),
}

CAPS123 = {
    "83": {"a": 200, "b": 200, "c": 200},
    "88": {"a": 50},
    "90": {"b": 50},
    "92": {"c": 50},
}


def build_ieee123():
    mva = 5.0
    kv = 4.16
    zbase = kv * kv / mva
    s1ph_kva = mva * 1000.0 / 3.0

    # Bus phase sets come from the incident segments plus the regulator and
    # transformer edges.
    phases = {}

    def widen(bus, ph):
        phases[bus] = "".join(sorted(set(phases.get(bus, "")) | set(ph)))

    for frm, to, _feet, cfg in SEGMENTS123:
        widen(frm, CFG123[cfg]["phases"])
        widen(to, CFG123[cfg]["phases"])
    widen("1", "abc")   # regulator 1 feed
    widen("14", "a")    # regulator 2 feed
    widen("25", "ac")
    widen("26", "ac")   # regulator 3 feed
    widen("60", "abc")
    widen("67", "abc")  # regulator 4 feed
    widen("61", "abc")
    widen("610", "abc")  # transformer secondary

    def buskey(b):
        return int(b)

    buses = [{"id": "150", "connection": "slack", "phases": "abc"}]
    for bid in sorted(phases, key=buskey):
        conn = "wye"
        if bid in LOADS123:
            conn = {"wye": "wye", "delta": "delta"}[LOADS123[bid][0]]
        bus = {"id": bid, "connection": conn, "phases": phases[bid]}
        if bid in LOADS123:
            lconn, model, entries = LOADS123[bid]
            if lconn == "delta":
                bus["load"] = delta_load(model, {k: v for k, v in entries.items()}, s1ph_kva)
            else:
                bus["load"] = wye_load(model, entries, s1ph_kva)
        if bid in CAPS123:
            bus["capacitor"] = {"q": {ph: kvar / s1ph_kva for ph, kvar in CAPS123[bid].items()}}
        buses.append(bus)

    edges = []
    # Substation regulator: three-phase wye, gang-operated, in series with
    # the 400 ft feed from the eliminated node 149 to bus 1.
    edges.append(
        {
            "id": "RG1",
            "kind": "svr",
            "from": "150",
            "to": "1",
            "phases": "abc",
            "config": "wye",
            "svr_type": "B",
            "taps": {"a": 7, "b": 7, "c": 7},
            "internal_id": "149",
            "line": line_spec(400, CFG123[1], zbase),
        }
    )
    edges.append(
        {
            "id": "RG2",
            "kind": "svr",
            "from": "9",
            "to": "14",
            "phases": "a",
            "config": "wye",
            "svr_type": "B",
            "taps": {"a": 10},
            "internal_id": "9r",
            "line": line_spec(425, CFG123[9], zbase),
        }
    )
    edges.append(
        {
            "id": "RG3",
            "kind": "svr",
            "from": "25",
            "to": "26",
            "phases": "ac",
            "config": "wye",
            "svr_type": "B",
            "taps": {"a": 0, "c": -1},
            "internal_id": "25r",
            "line": line_spec(350, CFG123[7], zbase),
        }
    )
    edges.append(
        {
            "id": "RG4",
            "kind": "svr",
            "from": "60",
            "to": "67",
            "phases": "abc",
            "config": "wye",
            "svr_type": "B",
            "taps": {"a": 8, "b": 1, "c": 5},
            "internal_id": "160r",
            "line": line_spec(350, CFG123[6], zbase),
        }
    )
    for frm, to, feet, cfg in SEGMENTS123:
        edges.append(line_edge("L%s-%s" % (frm, to), frm, to, feet, CFG123[cfg], zbase))
    # XFM-1: 4.16 kV / 480 V, 150 kVA, z = 1.27 + j2.72 % on its rating.
    zt = complex(0.0127, 0.0272) * (mva * 1000.0 / 150.0)
    edges.append(
        {
            "id": "XFM1",
            "kind": "transformer",
            "from": "61",
            "to": "610",
            "phases": "abc",
            "connection": "delta:delta",
            "z_t": cpx(zt),
        }
    )

    return {
        "schema_version": 1,
        "name": "ieee123",
        "base": {"s_mva": mva, "kv_ll": {"feeder": kv, "xfm1_secondary": 0.48}},
        "slack": {"bus": "150", "voltage": {"magnitude_pu": 1.0, "angles_deg": [0.0, -120.0, 120.0]}},
        "buses": buses,
        "edges": edges,
    }


def main():
    out_dir = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "data")
    os.makedirs(out_dir, exist_ok=True)
    for name, doc in [("ieee37", build_ieee37()), ("ieee123", build_ieee123())]:
        path = os.path.join(out_dir, name + ".json")
        with open(path, "w") as f:
            json.dump(doc, f, indent=1)
            f.write("\n")
        print("wrote", path)


if __name__ == "__main__":
    main()
