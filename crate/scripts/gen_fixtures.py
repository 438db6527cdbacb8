#!/usr/bin/env python3
"""Generate the frozen evaluation fixtures in crates/core/tests/fixtures/.

The test set and prediction files are synthetic. Every headline number is
recomputed here with standalone scorers (quadratic LCS, set Jaccard, plain
label matching) and asserted before anything is written, so the Rust
pipeline is checked against an implementation that shares no code with it.

Usage: python3 scripts/gen_fixtures.py [--out DIR] [--seed N]
"""

import argparse
import json
import random
from collections import Counter
from pathlib import Path

THINK = "<think>\n\n</think>\n\n"

# ---------------------------------------------------------------- scorers


def tokenize(text):
    out = []
    for tok in text.split():
        tok = tok.lower()
        lo, hi = 0, len(tok)
        ok = lambda ch: ("a" <= ch <= "z") or ("0" <= ch <= "9")
        while lo < hi and not ok(tok[lo]):
            lo += 1
        while hi > lo and not ok(tok[hi - 1]):
            hi -= 1
        if lo < hi:
            out.append(tok[lo:hi])
    return out


def lcs(a, b):
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b):
            cur.append(prev[j] + 1 if x == y else max(prev[j + 1], cur[j]))
        prev = cur
    return prev[-1]


def rouge_f1(pred, ref):
    p, r = tokenize(pred), tokenize(ref)
    if not p or not r:
        return 0.0
    m = lcs(p, r)
    if m == 0:
        return 0.0
    prec, rec = m / len(p), m / len(r)
    return 2 * prec * rec / (prec + rec)


def temporal_items(text):
    items = set()
    for line in text.replace(";", "\n").split("\n"):
        line = line.strip()
        if ":" not in line:
            continue
        finding, label = line.rsplit(":", 1)
        label = label.strip().strip(".").lower()
        if label in TEMPORAL_LABELS and finding.strip():
            items.add((" ".join(finding.lower().split()), label))
    return items


def jaccard(a, b):
    if not a and not b:
        return 1.0
    return len(a & b) / len(a | b)


def abnormality_map(text):
    out = {}
    for line in text.split("\n"):
        if ":" not in line:
            continue
        cond, status = line.rsplit(":", 1)
        cond, status = cond.strip(), status.strip().lower()
        if cond in CONDITIONS and status in STATUSES and cond not in out:
            out[cond] = status
    return out


def strip_think(raw):
    while "<think>" in raw:
        start = raw.index("<think>")
        end = raw.find("</think>", start)
        raw = raw[:start] if end < 0 else raw[:start] + raw[end + len("</think>"):]
    return raw.strip()


# ---------------------------------------------------------------- vocabularies

RADS_CODES = {
    # system: ordered (code, rank) list; unordered codes are never used as truth
    "BI-RADS": [("1", 1), ("2", 2), ("3", 3), ("4", 4), ("4A", 4), ("4B", 5), ("4C", 6), ("5", 7), ("6", 8)],
    "CAD-RADS": [("0", 0), ("1", 1), ("2", 2), ("3", 3), ("4", 4), ("5", 5)],
    "GB-RADS": [(str(i), i) for i in range(1, 6)],
    "LI-RADS": [("LR-1", 1), ("LR-2", 2), ("LR-3", 3), ("LR-4", 4), ("LR-5", 5)],
    "Lung-RADS": [("1", 1), ("2", 2), ("3", 3), ("4A", 4), ("4B", 5), ("4X", 6)],
    "NI-RADS": [("1", 1), ("2a", 2), ("2b", 2), ("3", 3), ("4", 4)],
    "O-RADS": [(str(i), i) for i in range(1, 6)],
    "PI-RADS": [(str(i), i) for i in range(1, 6)],
    "TI-RADS": [("TR%d" % i, i) for i in range(1, 6)],
    "VI-RADS": [(str(i), i) for i in range(1, 6)],
}
LR_TR = ["Nonviable", "Equivocal", "Viable"]

# Per-system (n, A correct, B correct, B 3-shot correct). LI-RADS holds 8 LR-TR cases.
RADS_PLAN = {
    "BI-RADS": (165, 115, 127, 120),
    "CAD-RADS": (15, 4, 6, 6),
    "GB-RADS": (3, 1, 1, 2),
    "LI-RADS": (80, 60, 53, 50),
    "Lung-RADS": (8, 7, 4, 5),
    "NI-RADS": (9, 6, 7, 5),
    "O-RADS": (33, 26, 22, 25),
    "PI-RADS": (71, 61, 60, 50),
    "TI-RADS": (86, 76, 73, 70),
    "VI-RADS": (30, 29, 29, 24),
}
LR_TR_COUNT = 8

# Error mix per system: (under, over, safe, cross, invalid).
A_ERRORS = {
    "BI-RADS": (12, 16, 18, 2, 2),
    "CAD-RADS": (4, 6, 0, 1, 0),
    "GB-RADS": (1, 1, 0, 0, 0),
    "LI-RADS": (7, 11, 0, 1, 1),
    "Lung-RADS": (0, 1, 0, 0, 0),
    "NI-RADS": (1, 2, 0, 0, 0),
    "O-RADS": (3, 3, 0, 0, 1),
    "PI-RADS": (3, 6, 0, 1, 0),
    "TI-RADS": (3, 6, 0, 0, 1),
    "VI-RADS": (0, 1, 0, 0, 0),
}
B_ERRORS = {
    "BI-RADS": (14, 9, 15, 0, 0),
    "CAD-RADS": (5, 3, 0, 1, 0),
    "GB-RADS": (1, 1, 0, 0, 0),
    "LI-RADS": (12, 12, 0, 3, 0),
    "Lung-RADS": (2, 2, 0, 0, 0),
    "NI-RADS": (1, 1, 0, 0, 0),
    "O-RADS": (5, 5, 0, 1, 0),
    "PI-RADS": (4, 6, 0, 1, 0),
    "TI-RADS": (5, 6, 0, 2, 0),
    "VI-RADS": (0, 1, 0, 0, 0),
}
RADS_INPUT = {
    "BI-RADS": "Mammogram: {n} mm irregular mass in the {side} breast at {clock} o'clock.",
    "CAD-RADS": "Coronary CTA: {n}% stenosis of the proximal {vessel}.",
    "GB-RADS": "Gallbladder ultrasound: wall thickening {n} mm, {extra}.",
    "LI-RADS": "Liver MRI: {n} mm observation in segment {seg} with arterial enhancement.",
    "LR-TR": "Post-ablation liver MRI: treated observation in segment {seg}, {n} mm.",
    "Lung-RADS": "Low-dose chest CT: {n} mm solid nodule in the {lobe}.",
    "NI-RADS": "Post-treatment neck CT: {n} mm enhancement at the primary site, {extra}.",
    "O-RADS": "Pelvic ultrasound: {n} mm adnexal cyst on the {side}, {extra}.",
    "PI-RADS": "Prostate MRI: {n} mm lesion in the {zone} zone, DWI {extra}.",
    "TI-RADS": "Thyroid ultrasound: {n} mm nodule in the {side} lobe, {extra}.",
    "VI-RADS": "Bladder MRI: {n} mm tumor at the {wall} wall, {extra}.",
}
FILL = {
    "side": ["left", "right"],
    "clock": [str(i) for i in range(1, 13)],
    "vessel": ["LAD", "RCA", "LCx"],
    "extra": ["no prior", "stable since prior", "new since prior", "follow-up requested"],
    "seg": [str(i) for i in range(1, 9)],
    "lobe": ["right upper lobe", "left lower lobe", "right middle lobe"],
    "zone": ["peripheral", "transition"],
    "wall": ["posterior", "lateral", "dome"],
}
INVALID_RADS = [
    "Assessment incomplete; recommend correlation with prior imaging.",
    "Findings are indeterminate and need further evaluation.",
]

NLI = ["entailment", "contradiction", "neutral"]
TEMPORAL_LABELS = ["new", "worsened", "improved", "resolved", "unchanged"]
FINDINGS = [
    "pleural effusion", "pneumothorax", "cardiomegaly", "atelectasis", "consolidation",
    "pulmonary edema", "lung opacity", "pulmonary nodule", "hilar adenopathy", "rib fracture",
]
CONDITIONS = [
    "Enlarged Cardiomediastinum", "Cardiomegaly", "Lung Opacity", "Lung Lesion", "Edema",
    "Consolidation", "Pneumonia", "Atelectasis", "Pneumothorax", "Pleural Effusion",
    "Pleural Other", "Fracture", "Support Devices", "No Finding",
]
STATUSES = ["positive", "negative", "uncertain"]
WORDS = (
    "no acute cardiopulmonary process stable mild bibasilar atelectasis small left pleural effusion "
    "right lower lobe consolidation unchanged cardiomediastinal silhouette within normal limits "
    "interval improvement pulmonary edema moderate hiatal hernia degenerative changes thoracic spine "
    "enteric tube tip stomach central venous catheter superior vena cava lymph node enlarged hepatic "
    "lesion renal cyst nodule mass ground glass opacity emphysema scarring apex"
).split()
# Disjoint from WORDS so inserted filler never lengthens the LCS.
FILLER = "perhaps likely overall noted seen otherwise there here also then given".split()


# ---------------------------------------------------------------- helpers


def sample(sid, task, inp, target, source, modality, rads_system=None):
    rec = {
        "id": sid,
        "task": task,
        "input": inp,
        "target": target,
        "source_dataset": source,
        "modality": modality,
    }
    if rads_system is not None:
        rec["rads_system"] = rads_system
    rec["tier"] = "gold"
    return rec


def prediction(rng, s, model, raw):
    return {
        "sample_id": s["id"],
        "task": s["task"],
        "model_id": model,
        "raw_output": raw,
        "normalized_output": strip_think(raw),
        "latency_ms": round(rng.uniform(400.0, 4000.0), 1),
        "tokens_generated": max(1, len(raw.split())),
        "prompt_tokens": len(s["input"].split()) + 12,
    }


def canonical(system, code):
    return "LR-TR " + code if system == "LR-TR" else system + " " + code


def codes_at(system, rank):
    return [c for c, r in RADS_CODES[system] if r == rank]


def rads_error_pred(rng, system, truth_code, kind):
    rank = dict(RADS_CODES[system])[truth_code]
    if kind == "under":
        return canonical(system, rng.choice(codes_at(system, rank - 1)))
    if kind == "over":
        return canonical(system, rng.choice(codes_at(system, rank + 1)))
    if kind == "safe":
        return canonical(system, next(c for c in codes_at(system, rank) if c != truth_code))
    if kind == "cross":
        other = rng.choice([s for s in RADS_CODES if s != system])
        codes = [c for c, r in RADS_CODES[other]]
        return canonical(other, rng.choice(codes))
    return rng.choice(INVALID_RADS)


def expand(mix):
    kinds = ["under", "over", "safe", "cross", "invalid"]
    return [k for k, n in zip(kinds, mix) for _ in range(n)]


def rads_dress(rng, text):
    """Surface variation the parser must tolerate."""
    r = rng.random()
    if r < 0.6:
        return text
    if r < 0.8:
        return "Category: " + text
    return text + "."


# ---------------------------------------------------------------- tasks


def gen_rads(rng):
    gt, preds = [], {"a": [], "b": [], "s": []}
    idx = 0
    for system, (n, na, nb, ns) in RADS_PLAN.items():
        a_err, b_err = expand(A_ERRORS[system]), expand(B_ERRORS[system])
        assert len(a_err) == n - na and len(b_err) == n - nb, system
        # Minimal discordance: a common correct prefix, then the larger model's extras.
        a_ok = [i < na for i in range(n)]
        b_ok = [i < nb for i in range(n)]
        # 3-shot prefers B's correct cases first, then B's misses.
        order = [i for i in range(n) if b_ok[i]] + [i for i in range(n) if not b_ok[i]]
        s_ok = [False] * n
        for i in order[:ns]:
            s_ok[i] = True
        rng.shuffle(a_err)
        rng.shuffle(b_err)
        a_it, b_it = iter(a_err), iter(b_err)
        for i in range(n):
            idx += 1
            sys_i = "LR-TR" if system == "LI-RADS" and i < LR_TR_COUNT else system
            ka = None if a_ok[i] else next(a_it)
            kb = None if b_ok[i] else next(b_it)
            ks = None if s_ok[i] else rng.choice(["under", "over"])
            need = {ka, kb, ks} - {None}
            if sys_i == "LR-TR":
                assert not need
                code = rng.choice(LR_TR)
            elif "safe" in need:
                code = rng.choice([c for c, r in RADS_CODES[system] if len(codes_at(system, r)) > 1])
            else:
                ranks = [r for _, r in RADS_CODES[system]]
                lo, hi = min(ranks), max(ranks)
                code = rng.choice([c for c, r in RADS_CODES[system] if lo < r < hi])
            fields = {k: rng.choice(v) for k, v in FILL.items()}
            fields["n"] = rng.randint(3, 60)
            s = sample(
                "rads-%04d" % idx,
                "rads_assignment",
                RADS_INPUT[sys_i].format(**fields) + " Case %d." % idx,
                canonical(sys_i, code),
                "synthetic-rads",
                "MRI" if sys_i in ("LI-RADS", "LR-TR", "PI-RADS", "VI-RADS") else "US",
                sys_i,
            )
            gt.append(s)
            for key, kind, think in (("a", ka, False), ("b", kb, True), ("s", ks, True)):
                text = s["target"] if kind is None else rads_error_pred(rng, system, code, kind)
                text = rads_dress(rng, text)
                if think and rng.random() < 0.3:
                    text = THINK + text
                preds[key].append((s, text))
    return gt, preds


def gen_nli(rng):
    # Per truth label: (both correct, A only, B only, A wrong labels, B wrong labels)
    plan = {
        "entailment": (65, 5, 8, {"contradiction": 2, "neutral": 21}, {"contradiction": 1, "neutral": 19}),
        "contradiction": (70, 6, 10, {"entailment": 2, "neutral": 28}, {"entailment": 2, "neutral": 24}),
        "neutral": (226, 24, 12, {"entailment": 14, "contradiction": 17}, {"entailment": 28, "contradiction": 15}),
    }
    counts = {"entailment": 93, "contradiction": 106, "neutral": 281}
    rows = []
    for label, (both, a_only, b_only, a_wrong, b_wrong) in plan.items():
        n = counts[label]
        a_ok = [i < both + a_only for i in range(n)]
        b_ok = [i < both or both + a_only <= i < both + a_only + b_only for i in range(n)]
        a_bad = [l for l, k in a_wrong.items() for _ in range(k)]
        b_bad = [l for l, k in b_wrong.items() for _ in range(k)]
        assert len(a_bad) == a_ok.count(False) and len(b_bad) == b_ok.count(False), label
        rng.shuffle(a_bad)
        rng.shuffle(b_bad)
        ai, bi = iter(a_bad), iter(b_bad)
        for i in range(n):
            rows.append((label, label if a_ok[i] else next(ai), label if b_ok[i] else next(bi)))
    rng.shuffle(rows)
    gt, pa, pb = [], [], []
    for i, (truth, a, b) in enumerate(rows, 1):
        s = sample(
            "nli-%04d" % i,
            "nli",
            "Premise: %s. Hypothesis: %s. Pair %d." % (rng.choice(FINDINGS), rng.choice(FINDINGS), i),
            truth,
            "synthetic-nli",
            "CXR",
        )
        gt.append(s)
        pa.append((s, a if rng.random() < 0.8 else "The relationship is %s." % a))
        pb.append((s, (THINK if rng.random() < 0.3 else "") + b))
    return gt, pa, pb


def gen_staging(rng, task, labels, weights, correct, prefix):
    n = 500
    truth = rng.choices(labels, weights, k=n)
    ok = [True] * correct + [False] * (n - correct)
    rng.shuffle(ok)
    gt, p = [], []
    for i in range(n):
        s = sample(
            "%s-%04d" % (prefix, i + 1),
            task,
            "CT abdomen and pelvis. %s Study %d." % (rng.choice(FINDINGS).capitalize(), i + 1),
            truth[i],
            "synthetic-ct",
            "CT",
        )
        gt.append(s)
        pred = truth[i] if ok[i] else rng.choice([l for l in labels if l != truth[i]])
        p.append((s, pred))
    return gt, p, list(p)


def render_temporal(items):
    return "\n".join("%s: %s" % it for it in items)


def gen_temporal(rng):
    n = 500
    # (A outcome, B outcome, ground-truth size)
    plan = [("third", "full", 2)] * 145 + [("full", "full", None)] * 98
    rest = [("zero", "two_thirds", 3)] * 30 + [("zero", "half", 2)] * 3 + [("zero", "zero", None)] * 27
    rest += [("zero", "full", None)] * (n - len(plan) - len(rest))
    plan += rest
    rng.shuffle(plan)
    gt, pa, pb = [], [], []
    for i, (oa, ob, size) in enumerate(plan, 1):
        size = size or rng.randint(1, 3)
        finds = rng.sample(FINDINGS, size + 2)
        items = [(f, rng.choice(TEMPORAL_LABELS)) for f in finds[:size]]
        spare = [(f, rng.choice(TEMPORAL_LABELS)) for f in finds[size:]]

        def out(kind):
            if kind == "full":
                return items
            if kind == "third":
                return [items[0], spare[0]]
            if kind == "two_thirds":
                return items[:2]
            if kind == "half":
                return items[:1]
            return spare

        s = sample(
            "temporal-%04d" % i,
            "temporal",
            "Prior: %s. Current: %s. Exam %d." % (finds[0], finds[-1], i),
            render_temporal(items),
            "synthetic-temporal",
            "CXR",
        )
        gt.append(s)
        pa.append((s, render_temporal(out(oa))))
        pb.append((s, render_temporal(out(ob))))
    return gt, pa, pb


def gen_abnormality(rng):
    n, total_correct = 500, 4242
    hits = [8] * n
    for i in rng.sample(range(n), total_correct - 8 * n):
        hits[i] += 1
    for _ in range(2000):
        i, j = rng.randrange(n), rng.randrange(n)
        if hits[i] < 14 and hits[j] > 3:
            hits[i] += 1
            hits[j] -= 1
    assert sum(hits) == total_correct
    gt, pa, pb = [], [], []
    for i in range(n):
        truth = [(c, rng.choice(STATUSES)) for c in CONDITIONS]
        wrong = set(rng.sample(range(14), 14 - hits[i]))
        lines = []
        for k, (c, st) in enumerate(truth):
            if k not in wrong:
                lines.append("%s: %s" % (c, st))
            elif rng.random() < 0.8:
                lines.append("%s: %s" % (c, rng.choice([x for x in STATUSES if x != st])))
        s = sample(
            "abnormality-%04d" % (i + 1),
            "abnormality",
            "Chest radiograph report %d. %s." % (i + 1, rng.choice(FINDINGS).capitalize()),
            "\n".join("%s: %s" % t for t in truth),
            "synthetic-cxr",
            "CXR",
        )
        gt.append(s)
        pa.append((s, "No acute cardiopulmonary process. Study %d reviewed." % (i + 1)))
        pb.append((s, (THINK if rng.random() < 0.3 else "") + "\n".join(lines)))
    return gt, pa, pb


def text_with_overlap(rng, ref_tokens, m, k):
    keep = sorted(rng.sample(range(len(ref_tokens)), m))
    toks = [ref_tokens[i] for i in keep]
    for _ in range(k):
        toks.insert(rng.randint(0, len(toks)), rng.choice(FILLER))
    return " ".join(toks)


def f1_of(m, k, length):
    return 0.0 if m == 0 else 2 * m / (m + k + length)


def fit_overlaps(rng, lengths, target, lo, hi, cap=None):
    """Per-sample (m, k) whose mean F1 rounds to `target`; optional per-sample upper bounds."""

    def draw(length, bound):
        for _ in range(200):
            f = min(1.0, max(0.0, rng.gauss(target, (hi - lo) / 4)))
            m = max(0, min(length, round(f * length)))
            k = rng.randint(0, max(1, length // 3)) if m < length else rng.choice([0, 0, 1])
            if m == 0 and k == 0:
                k = 1
            if bound is None or f1_of(m, k, length) <= bound:
                return (m, k)
        return (0, 1)

    cap = cap or [None] * len(lengths)
    mk = [draw(L, b) for L, b in zip(lengths, cap)]
    total = sum(f1_of(m, k, L) for (m, k), L in zip(mk, lengths))
    goal = target * len(lengths)
    for _ in range(200000):
        if abs(total - goal) < 1e-4 * len(lengths):
            break
        i = rng.randrange(len(lengths))
        cand = draw(lengths[i], cap[i])
        new = total - f1_of(*mk[i], lengths[i]) + f1_of(*cand, lengths[i])
        if abs(new - goal) < abs(total - goal):
            mk[i], total = cand, new
    assert abs(total / len(lengths) - target) < 2e-4, (target, total / len(lengths))
    return mk


def gen_rouge_task(rng, task, prefix, target_a, target_b, a_dominates):
    n = 500
    refs = [[rng.choice(WORDS) for _ in range(rng.randint(12, 30))] for _ in range(n)]
    lengths = [len(r) for r in refs]
    mk_a = fit_overlaps(rng, lengths, target_a, 0.0, min(1.0, target_a * 2 + 0.05))
    cap = None
    if a_dominates:
        cap = [f1_of(m, k, L) for (m, k), L in zip(mk_a, lengths)]
    mk_b = fit_overlaps(rng, lengths, target_b, 0.0, min(1.0, target_b * 2 + 0.05), cap)
    gt, pa, pb = [], [], []
    for i in range(n):
        ref = " ".join(refs[i])
        s = sample(
            "%s-%04d" % (prefix, i + 1),
            task,
            "Report %d: %s." % (i + 1, " ".join(rng.sample(WORDS, 10))),
            ref,
            "synthetic-" + prefix,
            "CXR",
        )
        gt.append(s)
        pa.append((s, text_with_overlap(rng, refs[i], *mk_a[i]) or "unremarkable"))
        text_b = text_with_overlap(rng, refs[i], *mk_b[i]) or "unremarkable"
        pb.append((s, (THINK if rng.random() < 0.3 else "") + text_b))
    return gt, pa, pb


# ---------------------------------------------------------------- checks


def score(s, norm):
    task = s["task"]
    if task == "rads_assignment":
        return None
    if task in ("impression", "ner", "qa"):
        return rouge_f1(norm, s["target"])
    if task == "temporal":
        return jaccard(temporal_items(norm), temporal_items(s["target"]))
    if task == "abnormality":
        truth, got = abnormality_map(s["target"]), abnormality_map(norm)
        return sum(got.get(c) == st for c, st in truth.items()) / len(truth)
    return float(norm.strip().rstrip(".").split()[-1].lower() == s["target"].lower())


def check(gt, files):
    by_task = {}
    for s in gt:
        by_task.setdefault(s["task"], []).append(s)
    expected = {
        "a": {"impression": 0.502, "ner": 0.030, "qa": 0.107, "temporal": 0.293, "abnormality": 0.000,
              "n_staging": 0.890, "m_staging": 0.730, "nli": 0.825},
        "b": {"impression": 0.274, "ner": 0.950, "qa": 0.093, "temporal": 0.923, "abnormality": 0.606,
              "n_staging": 0.890, "m_staging": 0.730, "nli": 0.815},
    }
    for key in ("a", "b"):
        recs = {r["sample_id"]: r for r in files[key]}
        for task, want in expected[key].items():
            scores = [score(s, recs[s["id"]]["normalized_output"]) for s in by_task[task]]
            got = sum(scores) / len(scores)
            assert round(got, 3) == want, (key, task, got, want)
    nli = Counter()
    a = {r["sample_id"]: r["normalized_output"] for r in files["a"]}
    b = {r["sample_id"]: r["normalized_output"] for r in files["b"]}
    for s in by_task["nli"]:
        pa = a[s["id"]].rstrip(".").split()[-1]
        pb = b[s["id"]].rstrip(".").split()[-1]
        nli[(s["target"], pa, pb)] += 1
    rows_a = {t: Counter() for t in NLI}
    rows_b = {t: Counter() for t in NLI}
    for (t, pa, pb), k in nli.items():
        rows_a[t][pa] += k
        rows_b[t][pb] += k
    assert [rows_a["entailment"][l] for l in NLI] == [70, 2, 21]
    assert [rows_b["neutral"][l] for l in NLI] == [28, 15, 238]
    disc_b = sum(k for (t, pa, pb), k in nli.items() if pa == t and pb != t)
    disc_c = sum(k for (t, pa, pb), k in nli.items() if pa != t and pb == t)
    assert (disc_b, disc_c) == (35, 30)
    rads = [s for s in gt if s["task"] == "rads_assignment"]
    a_hits = sum(strip_think(a[s["id"]]).rstrip(".").removeprefix("Category: ") == s["target"] for s in rads)
    b_hits = sum(strip_think(b[s["id"]]).rstrip(".").removeprefix("Category: ") == s["target"] for s in rads)
    assert (a_hits, b_hits) == (385, 382), (a_hits, b_hits)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "crates/core/tests/fixtures"))
    ap.add_argument("--seed", type=int, default=20240611)
    args = ap.parse_args()
    rng = random.Random(args.seed)

    gt, files = [], {"a": [], "b": [], "s": []}
    rads_gt, rads_preds = gen_rads(rng)
    gt += rads_gt
    for key in "abs":
        files[key] += [prediction(rng, s, MODEL[key], raw) for s, raw in rads_preds[key]]

    def add(task_gt, pa, pb):
        gt.extend(task_gt)
        files["a"].extend(prediction(rng, s, MODEL["a"], raw) for s, raw in pa)
        files["b"].extend(prediction(rng, s, MODEL["b"], raw) for s, raw in pb)

    add(*gen_rouge_task(rng, "impression", "impression", 0.502, 0.274, False))
    add(*gen_temporal(rng))
    add(*gen_rouge_task(rng, "ner", "ner", 0.030, 0.950, False))
    add(*gen_staging(rng, "n_staging", ["N0", "N1", "N2"], [5, 3, 2], 445, "nstage"))
    add(*gen_abnormality(rng))
    add(*gen_rouge_task(rng, "qa", "qa", 0.107, 0.093, True))
    add(*gen_staging(rng, "m_staging", ["M0", "M1"], [7, 3], 365, "mstage"))
    add(*gen_nli(rng))

    assert len(gt) == 4480 and len({s["id"] for s in gt}) == 4480
    check(gt, files)

    out = Path(args.out)
    (out / "preds").mkdir(parents=True, exist_ok=True)

    def dump(path, rows):
        with open(path, "w", encoding="utf-8") as fh:
            for r in sorted(rows, key=lambda r: r.get("id", r.get("sample_id"))):
                fh.write(json.dumps(r, ensure_ascii=False) + "\n")

    dump(out / "test.jsonl", gt)
    dump(out / "preds/a_ft.jsonl", files["a"])
    dump(out / "preds/b_ft.jsonl", files["b"])
    dump(out / "preds/b_ft_3shot.jsonl", files["s"])
    print("wrote %d samples to %s" % (len(gt), out))


MODEL = {"a": "model-a", "b": "model-b", "s": "model-b-3shot"}

if __name__ == "__main__":
    main()
