#!/usr/bin/env python3
"""Writes scripted LLM replies whose selection counts equal MATRIX.

Run from this directory. Output: transcripts/<domain>/<run>.txt,
transcripts_alt/satellite/<run>.txt and expected_matrix.json.
"""
import json
import os

KINDS = ["Shadow", "PerspectiveTransformation", "GridDistortion", "ImageFlipHorizontal",
         "ImageFlipVertical", "SaltPepperNoise", "Contrast", "Brightness", "ImageRotation",
         "GaussianNoise", "GridElasticDeformation", "MotionBlur", "GaussianBlur",
         "GlobalColourShift", "Rain", "CloudGenerator"]

MATRIX = {
    "driving":       [5, 2, 1, 7, 0, 3, 10, 10, 4, 9, 0, 10, 8, 6, 6, 1],
    "handheld":      [3, 9, 2, 8, 1, 4, 10, 10, 9, 8, 1, 7, 10, 5, 0, 0],
    "manufacturing": [0, 3, 4, 0, 2, 9, 9, 9, 5, 9, 6, 2, 7, 4, 0, 0],
    "medical":       [0, 9, 3, 5, 3, 4, 10, 10, 2, 10, 5, 0, 9, 1, 9, 0],
    "people":        [4, 9, 1, 10, 0, 3, 10, 9, 2, 8, 0, 8, 6, 4, 1, 0],
    "satellite":     [2, 4, 3, 9, 7, 5, 10, 10, 8, 9, 3, 6, 7, 5, 0, 10],
}
ALT = {"satellite": MATRIX["satellite"][:15] + [5]}
N_RUNS = 10
# The last manufacturing run is a refusal with no list; its counts stay <= 9.
EMPTY_RUNS = {("manufacturing", 9)}


def selected(domain_index, kind_index, run, count, usable):
    return (run + 3 * kind_index + domain_index) % usable < count


def reply(domain, domain_index, run, counts):
    if (domain, run) in EMPTY_RUNS:
        return "I am unable to provide a list for this request.\n"
    usable = N_RUNS - sum(1 for d, _ in EMPTY_RUNS if d == domain)
    lines = ["Here are the augmentations I would apply:", ""]
    n = 0
    first = None
    for k, kind in enumerate(KINDS):
        if not selected(domain_index, k, run, counts[k], usable):
            continue
        n += 1
        first = first or kind
        rationale = f"{kind} reflects conditions seen in {domain} images (run {run})."
        style = (run + k) % 3
        if style == 0:
            lines.append(f"{n}. {kind}: {rationale}")
        elif style == 1:
            lines.append(f"{n}. **{kind}**: {rationale}")
        else:
            lines.append(f"{n}. **{kind}:** {rationale}")
    if run % 4 == 1:
        n += 1
        lines.append(f"{n}. HistEqualization: not in the catalog, must be ignored.")
    if run % 5 == 2 and first:
        n += 1
        lines.append(f"{n}. {first}: listed twice, counted once.")
    lines += ["", "These choices cover the main sources of variation."]
    return "\n".join(lines) + "\n"


def write(root, matrix):
    for d_index, (domain, counts) in enumerate(sorted(MATRIX.items())):
        if domain not in matrix:
            continue
        counts = matrix[domain]
        os.makedirs(os.path.join(root, domain), exist_ok=True)
        tally = [0] * len(KINDS)
        for run in range(N_RUNS):
            text = reply(domain, d_index, run, counts)
            with open(os.path.join(root, domain, f"{run}.txt"), "w") as f:
                f.write(text)
            for k, kind in enumerate(KINDS):
                if (domain, run) not in EMPTY_RUNS and selected(
                        d_index, k, run, counts[k],
                        N_RUNS - sum(1 for d, _ in EMPTY_RUNS if d == domain)):
                    tally[k] += 1
        assert tally == counts, (domain, tally, counts)


write("transcripts", MATRIX)
write("transcripts_alt", ALT)
with open("expected_matrix.json", "w") as f:
    json.dump({"kinds": KINDS, "n_runs": N_RUNS, "counts": MATRIX}, f, indent=2)
    f.write("\n")
