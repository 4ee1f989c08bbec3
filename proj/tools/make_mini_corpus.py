#!/usr/bin/env python3
"""Writes the synthetic mini corpus used by the sample config and tests.

The text is generated, not excerpted: chapter names follow the category
list of the sample taxonomy, the prose is template filler with enough
vocabulary spread for retrieval and near-dup checks to be meaningful.

    python3 tools/make_mini_corpus.py data/corpus/mini_manual.tei.xml
"""
import random
import sys
from xml.sax.saxutils import escape

CHAPTERS = [
    ("Use of the Manual", ["Clinical Case Formulation", "Cultural Formulation"]),
    ("Neurodevelopmental Disorders", ["Intellectual Developmental Disorder", "Autism Spectrum Disorder"]),
    ("Schizophrenia Spectrum and Other Psychotic Disorders", ["Delusional Disorder", "Schizoaffective Disorder"]),
    ("Bipolar and Related Disorders", ["Bipolar I Disorder", "Cyclothymic Disorder"]),
    ("Depressive Disorders", ["Major Depressive Disorder", "Persistent Depressive Disorder"]),
    ("Anxiety Disorders", ["Separation Anxiety Disorder", "Generalized Anxiety Disorder"]),
    ("Obsessive-Compulsive and Related Disorders", ["Obsessive-Compulsive Disorder", "Hoarding Disorder"]),
    ("Trauma- and Stressor-Related Disorders", ["Posttraumatic Stress Disorder", "Adjustment Disorders"]),
    ("Dissociative Disorders", ["Dissociative Identity Disorder", "Dissociative Amnesia"]),
    ("Somatic Symptom and Related Disorders", ["Somatic Symptom Disorder", "Illness Anxiety Disorder"]),
    ("Feeding and Eating Disorders", ["Anorexia Nervosa", "Binge-Eating Disorder"]),
    ("Elimination Disorders", ["Enuresis", "Encopresis"]),
    ("Sleep-Wake Disorders", ["Insomnia Disorder", "Narcolepsy"]),
    ("Sexual Dysfunctions", ["Delayed Ejaculation", "Female Orgasmic Disorder"]),
    ("Gender Dysphoria", ["Gender Dysphoria in Children", "Gender Dysphoria in Adolescents and Adults"]),
    ("Disruptive, Impulse-Control, and Conduct Disorders", ["Oppositional Defiant Disorder", "Intermittent Explosive Disorder"]),
    ("Substance-Related and Addictive Disorders", ["Alcohol Use Disorder", "Gambling Disorder"]),
    ("Neurocognitive Disorders", ["Delirium", "Major Neurocognitive Disorder"]),
    ("Personality Disorders", ["Borderline Personality Disorder", "Avoidant Personality Disorder"]),
    ("Paraphilic Disorders", ["Voyeuristic Disorder", "Exhibitionistic Disorder"]),
    ("Other Mental Disorders", ["Other Specified Mental Disorder", "Unspecified Mental Disorder"]),
    ("Medication-Induced Movement Disorders", ["Neuroleptic-Induced Parkinsonism", "Tardive Dyskinesia"]),
    ("Other Adverse Effects of Medication", ["Antidepressant Discontinuation Syndrome", "Other Adverse Effect of Medication"]),
]

ASPECTS = ["Diagnostic Criteria", "Diagnostic Features", "Prevalence", "Development and Course",
           "Risk and Prognostic Factors", "Differential Diagnosis"]

SUBJECTS = ["symptoms", "episodes", "clinical presentations", "observed behaviors", "reported complaints",
            "functional impairments", "family histories", "associated features", "onset patterns",
            "course specifiers", "cognitive changes", "mood disturbances", "sleep changes",
            "social difficulties", "occupational problems", "physiological signs"]
VERBS = ["must persist for", "typically emerge within", "are usually assessed over", "tend to fluctuate across",
         "should be documented during", "are often reported after", "commonly intensify during",
         "may remit after", "are evaluated across", "become more evident in"]
SPANS = ["at least six months", "the first two weeks", "early adulthood", "late adolescence",
         "periods of acute stress", "several settings", "the preceding year", "childhood",
         "a single month", "repeated clinical interviews", "the postpartum period", "later life"]
QUALIFIERS = ["Clinicians should", "The examiner is advised to", "It is important to", "Careful review is needed to",
              "Collateral information helps to", "Structured interviews can", "Serial observation may"]
ACTIONS = ["distinguish these features from normal variation", "exclude the effects of a substance or medication",
           "consider cultural context before assigning significance", "rate severity using the specified thresholds",
           "record whether insight is good, poor, or absent", "note the degree of distress and impairment",
           "consider another medical condition as the cause", "document the temporal relation to stressors",
           "check whether criteria for a related disorder are better met", "separate transient reactions from persistent change"]
FACTS = ["Estimates of twelve-month prevalence vary between {a} and {b} percent across surveys.",
         "Rates are roughly {a} times higher in clinical samples than in community samples.",
         "Onset before age {n} is associated with a more chronic course.",
         "About {a} in {n} individuals show partial remission within the first year.",
         "Heritability estimates from twin studies range from {a}0 to {b}0 percent.",
         "Comorbid conditions are found in more than {a}0 percent of referred cases."]


def sentence(rng, name, aspect):
    kind = rng.randrange(4)
    if kind == 0:
        return f"In {name}, {rng.choice(SUBJECTS)} {rng.choice(VERBS)} {rng.choice(SPANS)}."
    if kind == 1:
        return f"{rng.choice(QUALIFIERS)} {rng.choice(ACTIONS)} when assessing {aspect.lower()} of {name}."
    if kind == 2:
        a, b = sorted(rng.sample(range(1, 9), 2))
        return rng.choice(FACTS).format(a=a, b=b, n=rng.choice([12, 14, 18, 25, 30]))
    return (f"The {rng.choice(SUBJECTS)} seen in {name} {rng.choice(VERBS)} {rng.choice(SPANS)}, "
            f"and {rng.choice(QUALIFIERS).lower()} {rng.choice(ACTIONS)}.")


def paragraph(rng, name, aspect):
    return " ".join(sentence(rng, name, aspect) for _ in range(rng.randint(4, 6)))


def div(depth, head, body_lines):
    pad = "  " * depth
    out = [f"{pad}<div>", f"{pad}  <head>{escape(head)}</head>"]
    out += body_lines
    out.append(f"{pad}</div>")
    return out


def main(path):
    rng = random.Random(20240601)
    lines = ['<?xml version="1.0" encoding="UTF-8"?>',
             '<TEI xmlns="http://www.tei-c.org/ns/1.0">',
             "  <teiHeader><fileDesc><titleStmt><title>Mini Diagnostic Reference (synthetic)</title>"
             "</titleStmt></fileDesc></teiHeader>",
             "  <text>", "    <body>"]
    for chapter, disorders in CHAPTERS:
        ch_body = [f"        <p>{escape(paragraph(rng, chapter, 'overview'))}</p>"]
        for disorder in disorders:
            d_body = [f"          <p>{escape(paragraph(rng, disorder, 'overview'))}</p>"]
            for aspect in ASPECTS:
                a_body = [f"            <p>{escape(paragraph(rng, disorder, aspect))}</p>" for _ in range(2)]
                if aspect == "Diagnostic Criteria":
                    a_body += div(6, "Specifiers",
                                  [f"              <p>{escape(paragraph(rng, disorder, 'specifiers'))}</p>"])
                d_body += div(5, aspect, a_body)
            ch_body += div(4, disorder, d_body)
        lines += div(3, chapter, ch_body)
    lines += ["    </body>", "  </text>", "</TEI>"]
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/corpus/mini_manual.tei.xml")
