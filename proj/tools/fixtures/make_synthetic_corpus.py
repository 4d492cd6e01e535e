#!/usr/bin/env python3
"""Writes the synthetic CT report corpus with its known ground truth.

Every report is assembled from organ-level sentence templates whose tri-state
labels are fixed by construction, so the reference labels need no human
review. Output (in --out):

  reports.jsonl           report_id, patient_id, text
  annotations.jsonl       report_id, labels{label: negative|positive|subjective_mention}
  truth_actionable.csv    subjective mentions counted as 0
  truth_mention.csv       subjective mentions counted as 1
"""

import argparse
import csv
import json
import os
import random

ORGANS = [
    ("Kidneys/Ureters", "KIDNEYS/URETERS",
     ["Kidney Stone", "Kidney Atrophy", "Kidney Lesion", "Kidney Cyst"], "Normal Kidney"),
    ("Liver/Gallbladder", "LIVER/GALLBLADDER",
     ["Gallstones", "Liver Lesion", "Biliary Dilatation", "Fatty Liver"], "Normal Liver"),
    ("Lungs/Pleura", "LUNGS/PLEURA",
     ["Lung Atelectasis", "Lung Nodules", "Lung Emphysema", "Lung Pleural Effusion"],
     "Normal Lung"),
]
LABELS = [label for _, _, diseases, normal in ORGANS for label in diseases + [normal]]

SIDES = ["right", "left"]

POSITIVE = {
    "Kidney Stone": ["A {mm} mm nonobstructing calculus in the {side} kidney.",
                     "Punctate {side} renal calculus.",
                     "Bilateral nephrolithiasis, largest {mm} mm."],
    "Kidney Atrophy": ["The {side} kidney is atrophic.",
                       "Moderate {side} renal atrophy."],
    "Kidney Lesion": ["A {cm} cm enhancing mass in the {side} kidney.",
                      "Solid {side} renal lesion measuring {cm} cm."],
    "Kidney Cyst": ["Simple cyst in the {side} kidney measuring {cm} cm.",
                    "Several bilateral renal cysts."],
    "Gallstones": ["Cholelithiasis.", "Multiple gallstones within the gallbladder."],
    "Liver Lesion": ["A {cm} cm hypodensity in hepatic segment {seg}.",
                     "Multiple hepatic metastases, largest {cm} cm."],
    "Biliary Dilatation": ["Intrahepatic biliary ductal dilatation.",
                           "Mild biliary dilatation to the level of the ampulla."],
    "Fatty Liver": ["Diffuse hepatic steatosis.", "Fatty infiltration of the liver."],
    "Lung Atelectasis": ["Linear atelectasis in the {side} lower lobe.",
                         "Bibasilar atelectasis."],
    "Lung Nodules": ["A {mm} mm pulmonary nodule in the {side} upper lobe.",
                     "Scattered {side} lung micronodules."],
    "Lung Emphysema": ["Centrilobular emphysema.", "Moderate upper lobe predominant emphysema."],
    "Lung Pleural Effusion": ["Small {side} pleural effusion.",
                              "Moderate bilateral pleural effusions."],
}

NEGATED = {
    "Kidney Stone": "No nephrolithiasis.",
    "Kidney Lesion": "No suspicious renal mass.",
    "Gallstones": "No cholelithiasis.",
    "Biliary Dilatation": "No biliary ductal dilatation.",
    "Lung Nodules": "No pulmonary nodule.",
    "Lung Pleural Effusion": "No pleural effusion.",
}

NORMAL = {
    "Kidneys/Ureters": ["The kidneys are unremarkable.", "Kidneys and ureters are normal."],
    "Liver/Gallbladder": ["The liver and gallbladder are unremarkable.",
                          "Liver is within normal limits."],
    "Lungs/Pleura": ["The lungs are clear.", "Lungs are clear bilaterally."],
}

# Findings an annotator would flag as mentioned but not clinically actionable.
SUBJECTIVE = {
    "Kidneys/Ureters": ("Kidney Lesion",
                        ["Too small to characterize hypodensity in the {side} kidney."]),
    "Liver/Gallbladder": ("Liver Lesion",
                          ["Subcentimeter hepatic hypodensity, too small to characterize."]),
    "Lungs/Pleura": ("Lung Atelectasis", ["Mild dependent atelectasis.",
                                          "Dependent atelectasis in the lung bases."]),
}

# True positives phrased without any lexicon term.
UNLISTED = {
    "Lungs/Pleura": ("Lung Atelectasis", ["Subsegmental collapse of the {side} lower lobe."]),
    "Liver/Gallbladder": ("Fatty Liver", ["Liver attenuation is diffusely decreased."]),
}


def fill(template, rng):
    return template.format(side=rng.choice(SIDES), mm=rng.randint(2, 9),
                           cm=f"{rng.randint(1, 4)}.{rng.randint(0, 9)}",
                           seg=rng.randint(2, 8))


def organ_block(organ, diseases, normal, rng):
    """Returns (sentences, {label: tri-state}) for one organ system."""
    labels = {label: "negative" for label in diseases + [normal]}
    roll = rng.random()
    sentences = []
    if roll < 0.55:
        sentences.append(rng.choice(NORMAL[organ]))
        labels[normal] = "positive"
        negatable = [d for d in diseases if d in NEGATED]
        if negatable and rng.random() < 0.4:
            sentences.append(NEGATED[rng.choice(negatable)])
    elif roll < 0.85:
        for label in rng.sample(diseases, rng.choice([1, 1, 2])):
            sentences.append(fill(rng.choice(POSITIVE[label]), rng))
            labels[label] = "positive"
    elif roll < 0.95 or organ not in UNLISTED:
        label, templates = SUBJECTIVE[organ]
        sentences.append(fill(rng.choice(templates), rng))
        labels[label] = "subjective_mention"
    else:
        label, templates = UNLISTED[organ]
        sentences.append(fill(rng.choice(templates), rng))
        labels[label] = "positive"
    return sentences, labels


def make_report(index, patient, rng, sectioned):
    labels = {}
    lines = ["EXAM: CT chest, abdomen and pelvis with contrast.", ""]
    lines.append(rng.choice(["FINDINGS:", "Findings:"]) if sectioned else "")
    order = list(ORGANS)
    if rng.random() < 0.3:
        rng.shuffle(order)
    for organ, header, diseases, normal in order:
        sentences, organ_labels = organ_block(organ, diseases, normal, rng)
        labels.update(organ_labels)
        lines.append(f"{header}: " + " ".join(sentences))
    lines.append("OTHER: Bones are intact. No lymphadenopathy.")
    lines.append("")
    lines.append("IMPRESSION:")
    lines.append("See findings.")
    return {"report_id": f"SYN{index:04d}", "patient_id": patient,
            "text": "\n".join(lines)}, labels


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", required=True)
    parser.add_argument("--reports", type=int, default=200)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--unsectioned", type=int, default=2,
                        help="reports written without a findings header")
    args = parser.parse_args()
    rng = random.Random(args.seed)

    patients = []
    while len(patients) < args.reports:
        pid = f"P{len(set(patients)) + 1:04d}"
        patients.extend([pid] * rng.choice([1, 1, 1, 2, 2, 3]))
    patients = patients[:args.reports]
    unsectioned = set(rng.sample(range(args.reports), args.unsectioned))

    os.makedirs(args.out, exist_ok=True)
    reports, truth = [], []
    for i in range(args.reports):
        report, labels = make_report(i + 1, patients[i], rng, i not in unsectioned)
        reports.append(report)
        truth.append((report["report_id"], labels))

    with open(os.path.join(args.out, "reports.jsonl"), "w", newline="\n") as f:
        for r in reports:
            f.write(json.dumps(r) + "\n")
    with open(os.path.join(args.out, "annotations.jsonl"), "w", newline="\n") as f:
        for rid, labels in truth:
            f.write(json.dumps({"report_id": rid,
                                "labels": {l: labels[l] for l in LABELS}}) + "\n")
    for view, subjective_value in (("actionable", "0"), ("mention", "1")):
        with open(os.path.join(args.out, f"truth_{view}.csv"), "w", newline="") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(["report_id"] + LABELS)
            for rid, labels in truth:
                row = [{"positive": "1", "negative": "0"}.get(labels[l], subjective_value)
                       for l in LABELS]
                w.writerow([rid] + row)


if __name__ == "__main__":
    main()
