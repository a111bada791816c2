"""Synthetic corpora with planted structure.

The real job-ad collection is not redistributable, so everything here is
generated from a seed: a corpus shaped like the published one (nine
occupation families, five skill-set topics, attribute rates), plus small
planted corpora for topic recovery, duplicate detection, title matching and
classification checks. Every generator reports the truth it planted.
"""
from __future__ import annotations

import datetime as dt
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .ingest import JobPosting
from .lda import ContextDoc, extract_context
from .onet import Occupation, OnetTaxonomy
from .text import tokenize_normalize

# ---------------------------------------------------------------------------
# skill-set vocabularies (raw surface forms; disjoint after normalization)

TOPIC_LABELS = ("General Familiarity", "Creative Content Generation", "Marketing",
                "Advanced Functionalities", "AI Product Development")
TOPIC_WORDS = (
    ("familiarity", "work", "tool", "experience", "technology", "productivity", "generative", "skill",
     "ability", "team", "plus", "new", "management", "similar", "google", "efficiency", "daily", "task",
     "knowledge", "comfortable", "awareness", "basic"),
    ("content", "writing", "creation", "proficiency", "adobe", "video", "editing", "drafting", "project",
     "engaging", "summarizing", "blog", "copy", "caption", "story", "image", "creative", "presentation",
     "newsletter", "article", "podcast", "storyboard"),
    ("marketing", "seo", "branding", "crm", "email", "customer", "strategy", "business", "campaign",
     "communication", "sales", "conversion", "networking", "social", "media", "audience", "brand",
     "promotion", "traffic", "keyword", "engagement", "funnel"),
    ("coding", "prompt", "evaluate", "python", "data", "optimize", "azure", "automating", "bert",
     "analysis", "platform", "microsoft", "sql", "performance", "engineering", "template", "copilot",
     "aws", "cloud", "query", "pipeline", "api"),
    ("llms", "solution", "product", "ml", "nlp", "model", "fine-tuning", "design", "integration",
     "application", "technique", "commercialize", "build", "algorithms", "adaptation", "deploy",
     "architecture", "training", "research", "inference", "scalable", "transformer"),
)
# dominant-skill-set share of job ads, skill sets 1..5
PAPER_TOPIC_SHARES = (0.418, 0.145, 0.127, 0.163, 0.148)


def topic_vocabularies() -> list[set[str]]:
    """Normalized token sets of the planted skill-set vocabularies."""
    return [{tok for w in words for tok in tokenize_normalize(w)} for words in TOPIC_WORDS]


# ---------------------------------------------------------------------------
# occupations: code, title, family levels, postings in the full synthetic corpus,
# duty words for descriptions, paraphrased titles no string matcher should catch

FAMILIES = ("Architecture and Engineering", "Arts, Design, Entertainment, Sports, and Media",
            "Business and Financial Operations", "Computer and Mathematical",
            "Educational Instruction and Library", "Legal", "Management",
            "Office and Administrative Support", "Sales and Related")
FAMILY_COUNTS = (10, 90, 217, 456, 26, 8, 244, 64, 13)

_A, _ART, _BUS, _CM, _EDU, _LEG, _MGT, _OFF, _SAL = FAMILIES

OCCUPATIONS = (
    ("17-2061.00", "Computer Hardware Engineers", _A, "Engineers", "Computer Hardware Engineers", 3,
     "circuit firmware chip prototype hardware motherboard", ("Embedded Systems Designer", "Chip Design Specialist")),
    ("17-2071.00", "Electrical Engineers", _A, "Engineers", "Electrical and Electronics Engineers", 3,
     "voltage wiring power grid substation schematic", ("Power Systems Designer", "Controls Specialist")),
    ("17-2141.00", "Mechanical Engineers", _A, "Engineers", "Mechanical Engineers", 4,
     "cad thermal machinery gear tolerance fabrication", ("CAD Design Specialist", "HVAC Designer")),
    ("27-3043.00", "Writers and Authors", _ART, "Media and Communication Workers", "Writers and Editors", 35,
     "manuscript narrative author publish fiction chapter", ("Content Creator", "Storyteller")),
    ("27-3041.00", "Editors", _ART, "Media and Communication Workers", "Writers and Editors", 15,
     "proofread grammar style copyedit publication deadline", ("Proofreader", "Copy Chief")),
    ("27-1024.00", "Graphic Designers", _ART, "Art and Design Workers", "Artists and Related Workers", 20,
     "illustration typography layout logo photoshop mockup", ("Visual Artist", "Brand Illustrator")),
    ("27-3031.00", "Public Relations Specialists", _ART, "Media and Communication Workers",
     "Public Relations Specialists", 12,
     "press release journalist publicity spokesperson announcement", ("Communications Coordinator", "Publicist")),
    ("27-3042.00", "Technical Writers", _ART, "Media and Communication Workers", "Writers and Editors", 8,
     "documentation manual guide specification procedure tutorial", ("Documentation Specialist", "Docs Author")),
    ("13-1161.00", "Market Research Analysts and Marketing Specialists", _BUS, "Business Operations Specialists",
     "Market Research Analysts and Marketing Specialists", 70,
     "survey segmentation competitor forecast insight pricing", ("Growth Hacker", "Consumer Insights Manager")),
    ("13-1161.01", "Search Marketing Strategists", _BUS, "Business Operations Specialists",
     "Market Research Analysts and Marketing Specialists", 45,
     "ranking backlink serp metadata crawl organic", ("SEO Specialist", "Search Optimization Consultant")),
    ("13-1111.00", "Management Analysts", _BUS, "Business Operations Specialists", "Management Analysts", 35,
     "restructuring assessment recommendation stakeholder benchmark consulting",
     ("Business Process Consultant", "Operations Improvement Advisor")),
    ("13-2011.00", "Accountants and Auditors", _BUS, "Financial Specialists", "Accountants and Auditors", 25,
     "ledger audit reconciliation tax gaap invoice", ("Bookkeeping Specialist", "CPA")),
    ("13-1071.00", "Human Resources Specialists", _BUS, "Business Operations Specialists",
     "Human Resources Workers", 22,
     "recruiting onboarding payroll benefit hiring candidate", ("Talent Acquisition Partner", "People Operations Coordinator")),
    ("13-2051.00", "Financial and Investment Analysts", _BUS, "Financial Specialists",
     "Financial Analysts and Advisors", 20,
     "portfolio valuation equity dividend investment spreadsheet", ("Equity Research Associate", "Portfolio Strategist")),
    ("15-1252.00", "Software Developers", _CM, "Computer Occupations",
     "Software and Web Developers, Programmers, and Testers", 225,
     "backend frontend repository debugging microservice javascript",
     ("Full Stack Engineer", "Backend Programmer", "Code Ninja")),
    ("15-2051.00", "Data Scientists", _CM, "Mathematical Science Occupations", "Data Scientists", 80,
     "regression statistic dataset experiment visualization hypothesis",
     ("Machine Learning Researcher", "Quantitative Modeler")),
    ("15-1211.00", "Computer Systems Analysts", _CM, "Computer Occupations", "Computer Systems Analysts", 30,
     "requirement erp configuration gap mapping legacy", ("Business Systems Consultant", "ERP Functional Lead")),
    ("15-1254.00", "Web Developers", _CM, "Computer Occupations",
     "Software and Web Developers, Programmers, and Testers", 35,
     "html css wordpress responsive browser website", ("Website Builder", "Frontend Web Programmer")),
    ("15-1221.00", "Computer and Information Research Scientists", _CM, "Computer Occupations",
     "Computer and Information Research Scientists", 20,
     "theorem conference novel reinforcement simulation thesis", ("AI Research Scientist", "Research Fellow")),
    ("15-1253.00", "Software Quality Assurance Analysts and Testers", _CM, "Computer Occupations",
     "Software and Web Developers, Programmers, and Testers", 25,
     "defect testcase selenium smoke acceptance triage", ("QA Engineer", "Test Automation Specialist")),
    ("15-1255.00", "Web and Digital Interface Designers", _CM, "Computer Occupations",
     "Software and Web Developers, Programmers, and Testers", 15,
     "wireframe usability figma persona accessibility interaction", ("UX Designer", "UI Designer")),
    ("15-1299.08", "Computer Systems Engineers/Architects", _CM, "Computer Occupations",
     "Computer Occupations, All Other", 14,
     "infrastructure network server virtualization redundancy topology", ("Solutions Architect", "Platform Architect")),
    ("15-1232.00", "Computer User Support Specialists", _CM, "Computer Occupations",
     "Computer Support Specialists", 12,
     "helpdesk ticket troubleshoot password laptop printer", ("IT Help Desk Technician", "Desktop Support Tech")),
    ("25-1011.00", "Business Teachers, Postsecondary", _EDU, "Postsecondary Teachers",
     "Business Teachers, Postsecondary", 8,
     "lecture syllabus course student curriculum semester", ("Business School Lecturer", "Entrepreneurship Instructor")),
    ("25-1021.00", "Computer Science Teachers, Postsecondary", _EDU, "Postsecondary Teachers",
     "Math and Computer Science Teachers, Postsecondary", 6,
     "classroom assignment lab grading tutoring exam", ("Programming Instructor", "Coding Bootcamp Instructor")),
    ("25-2031.00", "Secondary School Teachers, Except Special and Career/Technical Education", _EDU,
     "Preschool, Elementary, Middle, Secondary, and Special Education Teachers", "Secondary School Teachers", 7,
     "lesson homework pupil parent worksheet algebra", ("High School Math Teacher", "Classroom Educator")),
    ("25-9031.00", "Instructional Coordinators", _EDU, "Other Educational Instruction and Library Occupations",
     "Instructional Coordinators", 5,
     "elearning module accreditation standard rubric microlearning", ("Curriculum Developer", "Learning Experience Architect")),
    ("23-2011.00", "Paralegals and Legal Assistants", _LEG, "Legal Support Workers",
     "Paralegals and Legal Assistants", 5,
     "litigation filing discovery deposition docket affidavit", ("Litigation Support Specialist", "Legal Document Clerk")),
    ("23-1011.00", "Lawyers", _LEG, "Lawyers, Judges, and Related Workers", "Lawyers", 3,
     "counsel statute negotiation compliance regulatory courtroom", ("Corporate Counsel", "Attorney")),
    ("11-2021.00", "Marketing Managers", _MGT, "Advertising, Marketing, Promotions, Public Relations, and Sales Managers",
     "Marketing Managers", 90,
     "budget roadmap agency oversee quarterly revenue", ("Head of Growth", "Demand Generation Director")),
    ("11-3021.00", "Computer and Information Systems Managers", _MGT, "Operations Specialties Managers",
     "Computer and Information Systems Managers", 45,
     "vendor governance cybersecurity sprint uptime procurement", ("IT Director", "Head of Technology")),
    ("11-1021.00", "General and Operations Managers", _MGT, "Top Executives", "General and Operations Managers", 50,
     "logistics headcount facility kpi supervise scheduling", ("Chief Operating Officer", "Operations Director")),
    ("11-2032.00", "Public Relations Managers", _MGT,
     "Advertising, Marketing, Promotions, Public Relations, and Sales Managers", "Public Relations Managers", 20,
     "crisis reputation outreach coverage interview messaging", ("Communications Director", "Head of Corporate Affairs")),
    ("11-9041.00", "Architectural and Engineering Managers", _MGT, "Other Management Occupations",
     "Architectural and Engineering Managers", 15,
     "plant safety blueprint commissioning hazard inspection", ("VP of Engineering", "Chief Engineer")),
    ("11-3121.00", "Human Resources Managers", _MGT, "Operations Specialties Managers", "Human Resources Managers", 12,
     "workforce retention compensation grievance succession policy", ("People Operations Director", "Talent Director")),
    ("11-2022.00", "Sales Managers", _MGT,
     "Advertising, Marketing, Promotions, Public Relations, and Sales Managers", "Sales Managers", 12,
     "quota territory account commission coaching forecasting", ("Regional Sales Director", "Revenue Team Head")),
    ("43-6011.00", "Executive Secretaries and Executive Administrative Assistants", _OFF,
     "Secretaries and Administrative Assistants", "Secretaries and Administrative Assistants", 30,
     "calendar travel memo correspondence itinerary minutes", ("Executive Assistant to the CEO", "Chief of Staff")),
    ("43-4051.00", "Customer Service Representatives", _OFF, "Information and Record Clerks",
     "Customer Service Representatives", 20,
     "inquiry complaint refund caller resolution escalation", ("Client Support Associate", "Call Center Agent")),
    ("43-9061.00", "Office Clerks, General", _OFF, "Other Office and Administrative Support Workers",
     "Office Clerks, General", 14,
     "photocopy mail receptionist errand supply typing", ("Front Desk Receptionist", "Administrative Coordinator")),
    ("41-3091.00", "Sales Representatives of Services, Except Advertising, Insurance, Financial Services, and Travel",
     _SAL, "Sales Representatives, Services", "Sales Representatives, Services", 6,
     "prospect demo renewal upsell subscription closing", ("Account Executive", "Business Development Representative")),
    ("41-9031.00", "Sales Engineers", _SAL, "Other Sales and Related Workers", "Sales Engineers", 4,
     "rfp proposal quote presales onsite benchmarking", ("Solutions Consultant", "Presales Engineer")),
    ("41-4012.00", "Sales Representatives, Wholesale and Manufacturing, Except Technical and Scientific Products",
     _SAL, "Sales Representatives, Wholesale and Manufacturing",
     "Sales Representatives, Wholesale and Manufacturing", 3,
     "wholesale distributor catalog route retailer order", ("Territory Sales Rep", "Distributor Account Manager")),
)

# planted dominant skill-set mix per family (rows follow FAMILIES)
FAMILY_TOPIC_MIX = (
    (0.60, 0.10, 0.00, 0.20, 0.10),
    (0.30, 0.50, 0.15, 0.05, 0.00),
    (0.55, 0.16, 0.25, 0.04, 0.00),
    (0.252, 0.04, 0.02, 0.344, 0.344),
    (0.65, 0.20, 0.00, 0.10, 0.05),
    (0.625, 0.125, 0.00, 0.25, 0.00),
    (0.55, 0.19, 0.20, 0.03, 0.03),
    (0.65, 0.20, 0.15, 0.00, 0.00),
    (0.45, 0.00, 0.55, 0.00, 0.00),
)

# annual salary midpoints by family (low, high of the midpoint draw)
FAMILY_SALARY = (
    (110_000, 150_000), (55_000, 85_000), (70_000, 105_000), (115_000, 165_000), (50_000, 80_000),
    (60_000, 120_000), (95_000, 150_000), (40_000, 60_000), (100_000, 140_000),
)

TITLE_PREFIXES = ("Junior", "Principal", "Staff", "Associate", "Entry Level")
TITLE_SUFFIXES = (" - Growth Team", " (Contract)", " - Hybrid", ", Level II", " - Night Shift",
                  " - Healthcare", " (Bilingual)", " - Fintech")
NOISE_PREFIXES = ("Senior ", "Sr. ", "Lead ", "")

FOUR_STATES = ("CA", "TX", "NY", "FL")
CITIES = {
    "CA": ("San Francisco", "Los Angeles", "San Diego"), "TX": ("Austin", "Dallas", "Houston"),
    "NY": ("New York", "Brooklyn", "Albany"), "FL": ("Miami", "Tampa", "Orlando"),
    "WA": ("Seattle",), "MA": ("Boston",), "IL": ("Chicago",), "GA": ("Atlanta",), "CO": ("Denver",),
    "NC": ("Charlotte",), "VA": ("Arlington",), "NJ": ("Newark",), "PA": ("Philadelphia",),
    "OH": ("Columbus",), "AZ": ("Phoenix",), "MN": ("Minneapolis",), "OR": ("Portland",),
    "MI": ("Detroit",), "UT": ("Salt Lake City",), "MD": ("Baltimore",),
}
EMPLOYERS = ("Northwind Labs", "Bluepeak Media", "Harbor Analytics", "Cedar Health", "Quanta Retail",
             "Ironwood Partners", "Lumen Education", "Atlas Logistics", "Vertex Legal", "Summit Finance",
             "Brightline Studio", "Nimbus Software", "Keystone Foods", "Orchid Biotech", "Pioneer Energy")

DEGREE_PLAN = {"bachelor": 0.65, "master": 0.206, "phd": 0.094, "associate": 0.05}
DEGREE_STATED = 0.85
EXPERIENCE_YEARS = (1, 2, 3, 4, 5, 6, 7, 8, 10, 12, 15)
EXPERIENCE_P = (0.12, 0.18, 0.20, 0.12, 0.14, 0.06, 0.04, 0.04, 0.03, 0.04, 0.03)
EXPERIENCE_STATED = 0.90
REMOTE_SHARE = 0.38
FOUR_STATE_SHARE = 0.50
SALARY_STATED = 0.60
CONTRACT_PLAN = {"full_time": 0.80, "contract": 0.08, "part_time": 0.07, "internship": 0.03, "other": 0.02}
EXPERIENCE_BUCKETS = ((0, 2), (3, 5), (6, 10), (11, None))


def exact_counts(total: int, shares) -> np.ndarray:
    """Largest-remainder apportionment of ``total`` by ``shares``."""
    shares = np.asarray(shares, dtype=float)
    shares = shares / shares.sum()
    raw = shares * total
    base = np.floor(raw).astype(int)
    rem = total - base.sum()
    order = np.argsort(-(raw - base), kind="stable")
    base[order[:rem]] += 1
    return base


def _shuffled_labels(rng, total: int, plan: dict) -> list:
    counts = exact_counts(total, list(plan.values()))
    labels = [k for k, c in zip(plan, counts) for _ in range(c)]
    return [labels[i] for i in rng.permutation(total)]


def taxonomy() -> OnetTaxonomy:
    return OnetTaxonomy([Occupation(c, t, f1, f2, f3) for c, t, f1, f2, f3, *_ in OCCUPATIONS])


# ---------------------------------------------------------------------------
# sentence rendering

_CONNECT = ("with", "and", "for", "to", "in", "of")


def _sentence(rng, words, lead: str | None = None) -> str:
    parts = []
    for i, w in enumerate(words):
        if i and rng.random() < 0.3:
            parts.append(_CONNECT[rng.integers(len(_CONNECT))])
        parts.append(w)
    if lead:
        parts.insert(0, lead)
    text = " ".join(parts)
    return text[0].upper() + text[1:] + "."


def _topic_words(rng, mix, n: int) -> list[str]:
    topics = rng.choice(len(TOPIC_WORDS), size=n, p=mix)
    return [TOPIC_WORDS[k][rng.integers(len(TOPIC_WORDS[k]))] for k in topics]


def _doc_mix(rng, dominant: int, weight: float = 0.8) -> np.ndarray:
    K = len(TOPIC_WORDS)
    rest = rng.dirichlet(np.ones(K - 1)) * (1 - weight)
    mix = np.insert(rest, dominant, 0.0)
    mix[dominant] = weight
    return mix


_ANCHOR_LEADS = ("Using ChatGPT", "With ChatGPT", "ChatGPT", "Using ChatGPT and similar GPT-4 tools for")


def context_sentences(rng, dominant: int, n_words=(8, 11)) -> list[str]:
    """Topic sentence, anchor sentence, topic sentence for one document."""
    mix = _doc_mix(rng, dominant)
    lead = _ANCHOR_LEADS[rng.integers(len(_ANCHOR_LEADS))]
    return [
        _sentence(rng, _topic_words(rng, mix, int(rng.integers(*n_words)))),
        _sentence(rng, _topic_words(rng, mix, int(rng.integers(*n_words))), lead=lead),
        _sentence(rng, _topic_words(rng, mix, int(rng.integers(*n_words)))),
    ]


# ---------------------------------------------------------------------------
# small planted corpora


def planted_topic_contexts(n_docs: int = 1000, seed: int = 0, shares=PAPER_TOPIC_SHARES):
    """Context documents from the five planted skill-set vocabularies.

    Each document leans on one dominant topic (weight 0.8). Returns
    ``(contexts, labels, vocabularies)``.
    """
    rng = np.random.default_rng(seed)
    labels = np.array(_shuffled_labels(rng, n_docs, dict(enumerate(shares))))
    contexts = []
    for i, k in enumerate(labels):
        body = ["Join our team today."] + context_sentences(rng, int(k)) + ["Apply now."]
        post = JobPosting(f"T{i:05d}", "Planted", " ".join(body))
        contexts.append(extract_context(post))
    return contexts, labels, topic_vocabularies()


def planted_two_topics(n_per_topic: int = 100, vocab_size: int = 50, doc_len: int = 40, seed: int = 0):
    """Two disjoint pseudo-word vocabularies; each document uses exactly one."""
    rng = np.random.default_rng(seed)
    words = pseudo_words(2 * vocab_size, rng)
    vocabs = [words[:vocab_size], words[vocab_size:]]
    docs, labels = [], []
    for k in (0, 1):
        for _ in range(n_per_topic):
            docs.append(list(rng.choice(vocabs[k], doc_len)))
            labels.append(k)
    return docs, np.array(labels), [set(v) for v in vocabs]


_CONS = "bdfgklmnprtvz"
_VOW = "aiou"


def pseudo_words(n: int, rng) -> list[str]:
    """Distinct lowercase pseudo-words that the token pipeline leaves unchanged."""
    out, seen = [], set()
    while len(out) < n:
        syl = int(rng.integers(2, 4))
        w = "".join(_CONS[rng.integers(len(_CONS))] + _VOW[rng.integers(len(_VOW))] for _ in range(syl))
        if w not in seen and tokenize_normalize(w) == [w]:
            seen.add(w)
            out.append(w)
    return out


def separable_corpus(n_classes: int = 10, per_class: int = 30, doc_len: int = 20, own_vocab: int = 15,
                     noise_vocab: int = 50, own_weight: float = 0.7, seed: int = 0):
    """Token lists whose class is revealed by a private vocabulary, mixed with shared noise."""
    rng = np.random.default_rng(seed)
    words = pseudo_words(n_classes * own_vocab + noise_vocab, rng)
    noise = words[n_classes * own_vocab:]
    docs, labels = [], []
    for c in range(n_classes):
        own = words[c * own_vocab:(c + 1) * own_vocab]
        for _ in range(per_class):
            n_own = int(rng.binomial(doc_len, own_weight))
            doc = list(rng.choice(own, n_own)) + list(rng.choice(noise, doc_len - n_own))
            docs.append([doc[i] for i in rng.permutation(len(doc))])
            labels.append(f"C{c:02d}")
    return docs, labels


@dataclass
class DuplicateFixture:
    postings: list[JobPosting]
    pairs: list[tuple[str, str]]  # (original id, duplicate id)
    distinct_ids: list[str]


def planted_duplicates(n_distinct: int = 60, n_pairs: int = 20, doc_len: int = 60, seed: int = 0) -> DuplicateFixture:
    """Distinct documents over a large pseudo-word vocabulary plus near copies.

    A copy swaps one token of its original for a fresh word; with ``doc_len``
    tokens that keeps the TF-IDF cosine around ``1 - 1/doc_len``.
    """
    rng = np.random.default_rng(seed)
    vocab = pseudo_words(3000, rng)
    base = vocab[:2500]
    fresh = vocab[2500:]
    postings, pairs = [], []
    start = dt.date(2023, 5, 1)
    texts = []
    for i in range(n_distinct):
        words = list(rng.choice(base, doc_len, replace=False))
        texts.append(words)
        postings.append(JobPosting(f"U{i:04d}", "Planted", " ".join(words) + ".",
                                   posted_date=start + dt.timedelta(days=int(i % 30))))
    for j, i in enumerate(rng.choice(n_distinct, n_pairs, replace=False)):
        words = list(texts[i])
        words[int(rng.integers(doc_len))] = fresh[j]
        orig = postings[i]
        dup = JobPosting(f"V{j:04d}", "Planted", " ".join(words) + ".", source="board_b",
                         posted_date=orig.posted_date + dt.timedelta(days=3))
        postings.append(dup)
        pairs.append((orig.id, dup.id))
    order = rng.permutation(len(postings))
    return DuplicateFixture([postings[k] for k in order], pairs, [p.id for p in postings[:n_distinct]])


def variant_title(rng, title: str) -> str:
    """A prefixed or suffixed form carrying at least one word the taxonomy title lacks."""
    noise = NOISE_PREFIXES[rng.integers(len(NOISE_PREFIXES))]
    if rng.random() < 0.5:
        return noise + TITLE_PREFIXES[rng.integers(len(TITLE_PREFIXES))] + " " + title
    return noise + title + TITLE_SUFFIXES[rng.integers(len(TITLE_SUFFIXES))]


def _description(rng, occ_row, dominant: int | None, employer: str, extra: list[str] | None = None) -> str:
    duties = occ_row[6].split()
    parts = [f"Join {employer} and help us grow."]
    for _ in range(2):
        parts.append(_sentence(rng, [duties[i] for i in rng.integers(len(duties), size=4)], lead="You will handle"))
    if dominant is not None:
        parts += context_sentences(rng, dominant)
    parts += extra or []
    return " ".join(parts)


@dataclass
class TitleFixture:
    postings: list[JobPosting]
    truth: dict[str, str]  # posting id -> soc code
    kind: dict[str, str]  # posting id -> verbatim | variant | paraphrase


def title_fixture(n: int = 600, fractions=(0.7, 0.2, 0.1), seed: int = 0) -> TitleFixture:
    """Postings whose titles are verbatim taxonomy titles, variants, or paraphrases."""
    rng = np.random.default_rng(seed)
    kinds = _shuffled_labels(rng, n, dict(zip(("verbatim", "variant", "paraphrase"), fractions)))
    postings, truth, kind = [], {}, {}
    for i, k in enumerate(kinds):
        occ = OCCUPATIONS[int(rng.integers(len(OCCUPATIONS)))]
        if k == "verbatim":
            title = occ[1]
        elif k == "variant":
            title = variant_title(rng, occ[1])
        else:
            title = occ[7][rng.integers(len(occ[7]))]
        pid = f"J{i:05d}"
        employer = EMPLOYERS[rng.integers(len(EMPLOYERS))]
        postings.append(JobPosting(pid, title, _description(rng, occ, None, employer)))
        truth[pid], kind[pid] = occ[0], k
    return TitleFixture(postings, truth, kind)


# ---------------------------------------------------------------------------
# full synthetic corpus


def _salary_text(rng, fam: int, hourly: bool) -> tuple[str, int, int]:
    lo, hi = FAMILY_SALARY[fam]
    mid = rng.uniform(lo, hi)
    spread = rng.uniform(0.08, 0.2) * mid
    a, b = mid - spread / 2, mid + spread / 2
    if hourly:
        ha, hb = int(round(a / 2080)), int(round(b / 2080))
        return f"${ha} - ${hb} an hour", ha * 2080, hb * 2080
    a, b = int(round(a, -3)), int(round(b, -3))
    return f"${a:,} - ${b:,} a year", a, b


_DEGREE_TEXT = {
    "associate": ("Associate degree required.",),
    "bachelor": ("Bachelor's degree in a related field required.",
                 "Bachelor's degree required; Master's preferred."),
    "master": ("Master's degree required.", "Master's degree required; PhD preferred."),
    "phd": ("PhD in a quantitative field required.", "PhD preferred."),
}


def paper_corpus(seed: int = 0, n_duplicates: int = 120, n_irrelevant: int = 30):
    """Records (JSON-ready dicts) for a corpus shaped like the published one.

    Returns ``(records, taxonomy, manifest)``. The manifest holds the planted
    truth over the unique, relevant postings.
    """
    rng = np.random.default_rng(seed)
    occ_rows = []
    for row in OCCUPATIONS:
        occ_rows += [row] * row[5]
    n = len(occ_rows)
    fam_index = [FAMILIES.index(r[2]) for r in occ_rows]

    # dominant topics: exact counts per family
    dominant = np.empty(n, dtype=int)
    for f, mix in enumerate(FAMILY_TOPIC_MIX):
        idx = [i for i in range(n) if fam_index[i] == f]
        labels = _shuffled_labels(rng, len(idx), dict(enumerate(mix)))
        dominant[idx] = labels

    title_kind = _shuffled_labels(rng, n, {"verbatim": 0.7, "variant": 0.2, "paraphrase": 0.1})
    remote = np.array(_shuffled_labels(rng, n, {True: REMOTE_SHARE, False: 1 - REMOTE_SHARE}))
    other_states = [s for s in CITIES if s not in FOUR_STATES]
    in_four = np.array(_shuffled_labels(rng, n, {True: FOUR_STATE_SHARE, False: 1 - FOUR_STATE_SHARE}))
    contract = _shuffled_labels(rng, n, CONTRACT_PLAN)
    has_salary = np.array(_shuffled_labels(rng, n, {True: SALARY_STATED, False: 1 - SALARY_STATED}))
    has_exp = np.array(_shuffled_labels(rng, n, {True: EXPERIENCE_STATED, False: 1 - EXPERIENCE_STATED}))

    # degrees: exact counts, PhD drawn preferentially from research-heavy occupations
    n_stated = int(round(DEGREE_STATED * n))
    deg_counts = dict(zip(DEGREE_PLAN, exact_counts(n_stated, list(DEGREE_PLAN.values()))))
    degree = np.array([None] * n, dtype=object)
    research = {"15-2051.00", "15-1221.00"}
    w = np.array([6.0 if r[0] in research else 1.0 for r in occ_rows])
    pool = np.arange(n)
    phd_idx = rng.choice(pool, deg_counts["phd"], replace=False, p=w / w.sum())
    degree[phd_idx] = "phd"
    rest = np.array([i for i in rng.permutation(n) if degree[i] is None])
    cursor = 0
    for lvl in ("bachelor", "master", "associate"):
        degree[rest[cursor:cursor + deg_counts[lvl]]] = lvl
        cursor += deg_counts[lvl]

    start, end = dt.date(2023, 5, 1), dt.date(2023, 12, 31)
    span = (end - start).days + 1
    day_w = np.linspace(1.0, 3.0, span)
    days = rng.choice(span, size=n, p=day_w / day_w.sum())

    records, truth = [], []
    for i, row in enumerate(occ_rows):
        f = fam_index[i]
        kind = title_kind[i]
        if kind == "verbatim":
            title = row[1]
        elif kind == "variant":
            title = variant_title(rng, row[1])
        else:
            title = row[7][rng.integers(len(row[7]))]
        state = FOUR_STATES[rng.integers(4)] if in_four[i] else other_states[rng.integers(len(other_states))]
        city = CITIES[state][rng.integers(len(CITIES[state]))]
        extra = []
        if degree[i] is not None:
            opts = _DEGREE_TEXT[degree[i]]
            extra.append(opts[rng.integers(len(opts))])
        exp = None
        if has_exp[i]:
            exp = int(rng.choice(EXPERIENCE_YEARS, p=EXPERIENCE_P))
            extra.append(f"Requires {exp}+ years of relevant experience." if rng.random() < 0.5
                         else f"We look for {exp}-{exp + 2} years of experience.")
        extra.append("This is a fully remote position." if remote[i] else f"This role is based on site in {city}.")
        employer = EMPLOYERS[rng.integers(len(EMPLOYERS))]
        desc = _description(rng, row, int(dominant[i]), employer, extra)
        rec = {
            "id": f"P{i:05d}", "source": ("board_a", "board_b", "board_c")[rng.integers(3)], "title": title,
            "employer": employer, "location": f"{city}, {state}", "description": desc,
            "posted_date": (start + dt.timedelta(days=int(days[i]))).isoformat(),
            "contract_type": contract[i],
        }
        sal = None
        if has_salary[i]:
            hourly = f in (FAMILIES.index(_OFF),) and rng.random() < 0.7
            rec["salary_text"], lo, hi = _salary_text(rng, f, hourly)
            sal = (lo, hi)
        records.append(rec)
        truth.append({"id": rec["id"], "soc_code": row[0], "family_l1": row[2], "title_kind": kind,
                      "dominant_topic": int(dominant[i]), "remote": bool(remote[i]), "state": state,
                      "degree": degree[i], "experience": exp, "salary": sal})

    originals = list(records)
    # near-copies posted a few days later on another board
    dup_records = []
    for j, i in enumerate(rng.choice(n, n_duplicates, replace=False)):
        rec = dict(originals[i])
        rec["id"] = f"D{j:05d}"
        rec["source"] = ("board_a", "board_b", "board_c")[(["board_a", "board_b", "board_c"].index(rec["source"]) + 1) % 3]
        d = dt.date.fromisoformat(rec["posted_date"]) + dt.timedelta(days=int(rng.integers(1, 10)))
        rec["posted_date"] = d.isoformat()
        rec["description"] = rec["description"] + " Apply today."
        dup_records.append(rec)

    irrelevant = []
    reject_sentences = (
        "Please note that the use of ChatGPT is forbidden for preparing resumes or cover letters.",
        "This job posting was written with ChatGPT.",
        "Candidates must not use ChatGPT to write your cover letter.",
        "We used ChatGPT to draft this job description.",
    )
    for j in range(n_irrelevant):
        row = OCCUPATIONS[int(rng.integers(len(OCCUPATIONS)))]
        employer = EMPLOYERS[rng.integers(len(EMPLOYERS))]
        desc = _description(rng, row, None, employer, [reject_sentences[j % len(reject_sentences)]])
        irrelevant.append({"id": f"X{j:05d}", "source": "board_c", "title": row[1], "employer": employer,
                           "location": "Chicago, IL", "description": desc,
                           "posted_date": "2023-06-15", "contract_type": "full_time"})

    all_records = originals + dup_records + irrelevant
    order = rng.permutation(len(all_records))
    all_records = [all_records[k] for k in order]
    manifest = _manifest(truth, n_duplicates, n_irrelevant, seed)
    return all_records, taxonomy(), manifest


def _manifest(truth: list[dict], n_dup: int, n_irr: int, seed: int) -> dict:
    n = len(truth)
    fam = {f: sum(t["family_l1"] == f for t in truth) for f in FAMILIES}
    topics = np.bincount([t["dominant_topic"] for t in truth], minlength=5) / n
    by_family = {}
    for f in FAMILIES:
        ts = [t["dominant_topic"] for t in truth if t["family_l1"] == f]
        by_family[f] = (np.bincount(ts, minlength=5) / len(ts)).tolist()
    stated = [t["degree"] for t in truth if t["degree"] is not None]
    exps = [t["experience"] for t in truth if t["experience"] is not None]
    buckets = {}
    for lo, hi in EXPERIENCE_BUCKETS:
        key = f"{lo}-{hi}" if hi is not None else f">{lo - 1}"
        buckets[key] = sum(1 for e in exps if e >= lo and (hi is None or e <= hi)) / len(exps)
    return {
        "seed": seed,
        "n_unique": n,
        "n_duplicates": n_dup,
        "n_irrelevant": n_irr,
        "n_records": n + n_dup + n_irr,
        "family_counts": fam,
        "topic_shares": topics.tolist(),
        "topic_shares_by_family": by_family,
        "remote_share": sum(t["remote"] for t in truth) / n,
        "four_state_share": sum(t["state"] in FOUR_STATES for t in truth) / n,
        "degree_shares": {lvl: stated.count(lvl) / len(stated) for lvl in ("associate", "bachelor", "master", "phd")},
        "degree_stated": len(stated),
        "experience_buckets": buckets,
        "title_kinds": {k: sum(t["title_kind"] == k for t in truth) for k in ("verbatim", "variant", "paraphrase")},
        "truth": truth,
    }


def default_config(out_dir: str = "out") -> dict:
    """Pipeline configuration matching the files written by :func:`write_fixture`.

    The generator mixes each document's minor topics with a flat Dirichlet,
    so the configured alpha is 1.
    """
    return {
        "corpus": "corpus.jsonl",
        "taxonomy": "taxonomy.tsv",
        "output_dir": out_dir,
        "seed": 0,
        "thresholds": {"dedup": 0.9, "cosine_match": 0.95, "fuzzy_match": 0.95},
        "lda": {"K": [4, 5, 6], "alpha": [1.0], "beta": [0.01], "seeds": [0],
                "iterations": 400, "burn_in": 200, "thin": 10, "restarts": 4},
        "svm": {"C": 1.0, "epochs": 20, "cv_folds": 5},
        "anchor_terms": ["chatgpt", "chat gpt", "gpt-4", "gpt-3.5"],
        "context_window": 1,
        "topic_labels": [],
    }


def topics_config(out_dir: str = "out") -> dict:
    cfg = default_config(out_dir)
    cfg["lda"] = {"K": [5], "alpha": [1.0], "beta": [0.01], "seeds": [0],
                  "iterations": 500, "burn_in": 250, "thin": 10, "restarts": 6}
    return cfg


def write_fixture(out_dir: str | Path, seed: int = 0, kind: str = "paper") -> dict:
    """Write a fixture to ``out_dir``; returns the manifest.

    ``paper``: corpus.jsonl, taxonomy.tsv, config.json, manifest.json.
    ``topics``: contexts.jsonl (planted five-topic contexts), config.json, manifest.json.
    ``two-topic``: contexts.jsonl with the planted two-topic corpus, config.json, manifest.json.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if kind == "paper":
        records, tax, manifest = paper_corpus(seed)
        with open(out / "corpus.jsonl", "w", encoding="utf-8") as fh:
            for r in records:
                fh.write(json.dumps(r, sort_keys=True, ensure_ascii=False) + "\n")
        (out / "taxonomy.tsv").write_text(tax.to_tsv(), encoding="utf-8")
        cfg = default_config()
        cfg["seed"] = seed
        (out / "config.json").write_text(json.dumps(cfg, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    elif kind in ("topics", "two-topic"):
        if kind == "topics":
            contexts, labels, vocabs = planted_topic_contexts(seed=seed)
        else:
            docs, labels, vocabs = planted_two_topics(seed=seed)
            contexts = [ContextDoc(f"T{i:05d}", (), tuple(d)) for i, d in enumerate(docs)]
        with open(out / "contexts.jsonl", "w", encoding="utf-8") as fh:
            for c in contexts:
                fh.write(json.dumps({"posting_id": c.posting_id, "sentences": list(c.sentences),
                                     "tokens": list(c.tokens)}, sort_keys=True) + "\n")
        manifest = {"seed": seed, "kind": kind, "labels": [int(x) for x in labels],
                    "vocabularies": [sorted(v) for v in vocabs]}
        cfg = topics_config()
        cfg["seed"] = seed
        if kind == "two-topic":
            cfg["lda"].update(K=[1, 2, 4], restarts=1, iterations=300, burn_in=150)
        (out / "config.json").write_text(json.dumps(cfg, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    else:
        raise ValueError(f"unknown fixture kind {kind!r}")
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return manifest
