"""Posting ingestion: record parsing, irrelevant-document filtering and
attribute extraction from free text."""
from __future__ import annotations

import dataclasses
import datetime as dt
import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Sequence

logger = logging.getLogger(__name__)

SOURCES = ("board_a", "board_b", "board_c", "synthetic")
CONTRACT_TYPES = ("full_time", "part_time", "contract", "internship", "other")
DEGREES = ("none_stated", "associate", "bachelor", "master", "phd")
HOURS_PER_YEAR = 2080

STATE_NAMES = {
    "AL": "Alabama", "AK": "Alaska", "AZ": "Arizona", "AR": "Arkansas", "CA": "California",
    "CO": "Colorado", "CT": "Connecticut", "DE": "Delaware", "DC": "District of Columbia",
    "FL": "Florida", "GA": "Georgia", "HI": "Hawaii", "ID": "Idaho", "IL": "Illinois",
    "IN": "Indiana", "IA": "Iowa", "KS": "Kansas", "KY": "Kentucky", "LA": "Louisiana",
    "ME": "Maine", "MD": "Maryland", "MA": "Massachusetts", "MI": "Michigan", "MN": "Minnesota",
    "MS": "Mississippi", "MO": "Missouri", "MT": "Montana", "NE": "Nebraska", "NV": "Nevada",
    "NH": "New Hampshire", "NJ": "New Jersey", "NM": "New Mexico", "NY": "New York",
    "NC": "North Carolina", "ND": "North Dakota", "OH": "Ohio", "OK": "Oklahoma", "OR": "Oregon",
    "PA": "Pennsylvania", "RI": "Rhode Island", "SC": "South Carolina", "SD": "South Dakota",
    "TN": "Tennessee", "TX": "Texas", "UT": "Utah", "VT": "Vermont", "VA": "Virginia",
    "WA": "Washington", "WV": "West Virginia", "WI": "Wisconsin", "WY": "Wyoming",
    "PR": "Puerto Rico",
}
USPS_CODES = frozenset(STATE_NAMES)


@dataclass(frozen=True)
class JobPosting:
    id: str
    title_raw: str
    description: str
    source: str = "synthetic"
    employer: str | None = None
    location_raw: str | None = None
    state: str | None = None
    posted_date: dt.date | None = None
    contract_type: str | None = None
    remote: bool | None = None
    salary_text: str | None = None
    salary_min_usd_year: int | None = None
    salary_max_usd_year: int | None = None
    degree_req: str | None = None
    experience_years_min: int | None = None

    def __post_init__(self):
        if not self.id:
            raise ValueError("posting id must be non-empty")
        if not self.description or not self.description.strip():
            raise ValueError(f"posting {self.id}: description must be non-empty")
        if self.source not in SOURCES:
            raise ValueError(f"posting {self.id}: unknown source {self.source!r}")
        if self.state is not None and self.state not in USPS_CODES:
            raise ValueError(f"posting {self.id}: invalid state code {self.state!r}")
        if self.contract_type is not None and self.contract_type not in CONTRACT_TYPES:
            raise ValueError(f"posting {self.id}: invalid contract type {self.contract_type!r}")
        if self.degree_req is not None and self.degree_req not in DEGREES:
            raise ValueError(f"posting {self.id}: invalid degree {self.degree_req!r}")
        lo, hi = self.salary_min_usd_year, self.salary_max_usd_year
        for v in (lo, hi):
            if v is not None and v <= 0:
                raise ValueError(f"posting {self.id}: salary must be positive")
        if lo is not None and hi is not None and lo > hi:
            raise ValueError(f"posting {self.id}: salary_min > salary_max")
        if self.experience_years_min is not None and self.experience_years_min < 0:
            raise ValueError(f"posting {self.id}: negative experience")

    def to_record(self) -> dict:
        d = dataclasses.asdict(self)
        if self.posted_date is not None:
            d["posted_date"] = self.posted_date.isoformat()
        return d

    @classmethod
    def from_record(cls, d: dict) -> "JobPosting":
        d = dict(d)
        if d.get("posted_date"):
            d["posted_date"] = dt.date.fromisoformat(d["posted_date"])
        return cls(**d)


@dataclass(frozen=True)
class Diagnostic:
    """One structured event: where it happened, what kind, and a message."""

    stage: str
    kind: str
    message: str
    line: int | None = None
    posting_id: str | None = None
    field: str | None = None

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), sort_keys=True)


class DiagnosticLog:
    """Append-only log; one JSON object per line."""

    def __init__(self, path: str | Path | None = None):
        self.path = Path(path) if path is not None else None
        self.events: list[Diagnostic] = []

    def add(self, diag: Diagnostic) -> None:
        self.events.append(diag)
        logger.debug("%s/%s: %s", diag.stage, diag.kind, diag.message)
        if self.path is not None:
            with self.path.open("a", encoding="utf-8") as fh:
                fh.write(diag.to_json() + "\n")

    def extend(self, diags: Iterable[Diagnostic]) -> None:
        for d in diags:
            self.add(d)

    def __len__(self):
        return len(self.events)


# ---------------------------------------------------------------------------
# parsing

REQUIRED_FIELDS = ("id", "title", "description")


def _norm_contract(value: str | None) -> str | None:
    if value is None:
        return None
    v = re.sub(r"[\s\-]+", "_", value.strip().lower())
    aliases = {"fulltime": "full_time", "parttime": "part_time", "contractor": "contract",
               "intern": "internship", "temporary": "other", "temp": "other"}
    v = aliases.get(v, v)
    return v if v in CONTRACT_TYPES else "other"


def _record_to_posting(rec: dict) -> JobPosting:
    posted = rec.get("posted_date")
    state = rec.get("state")
    remote = rec.get("remote")
    return JobPosting(
        id=str(rec["id"]),
        title_raw=str(rec["title"]),
        description=str(rec["description"]),
        source=rec.get("source") or "synthetic",
        employer=rec.get("employer"),
        location_raw=rec.get("location"),
        state=state.upper() if isinstance(state, str) else None,
        posted_date=dt.date.fromisoformat(posted) if posted else None,
        contract_type=_norm_contract(rec.get("contract_type")),
        remote=bool(remote) if remote is not None else None,
        salary_text=rec.get("salary_text"),
    )


def parse_postings(stream: IO[str] | Iterable[str], diagnostics: list | None = None) -> list[JobPosting]:
    """Parse JSON-lines records into postings.

    Lines that are blank are ignored; lines that fail to decode, miss a
    required field, or violate a posting invariant are skipped and reported
    in ``diagnostics`` (if given). Input order is preserved.
    """
    diags = diagnostics if diagnostics is not None else []
    out: list[JobPosting] = []
    seen: set[str] = set()
    for lineno, line in enumerate(stream, start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            diags.append(Diagnostic("ingest", "bad_json", str(exc), line=lineno))
            continue
        if not isinstance(rec, dict):
            diags.append(Diagnostic("ingest", "bad_record", "record is not an object", line=lineno))
            continue
        missing = [f for f in REQUIRED_FIELDS if not rec.get(f)]
        if missing:
            diags.append(Diagnostic("ingest", "missing_field", f"missing required field {missing[0]!r}",
                                    line=lineno, posting_id=rec.get("id"), field=missing[0]))
            continue
        try:
            posting = _record_to_posting(rec)
        except (ValueError, TypeError) as exc:
            diags.append(Diagnostic("ingest", "invalid_record", str(exc), line=lineno,
                                    posting_id=str(rec.get("id"))))
            continue
        if posting.id in seen:
            diags.append(Diagnostic("ingest", "duplicate_id", f"id {posting.id!r} seen before",
                                    line=lineno, posting_id=posting.id))
            continue
        seen.add(posting.id)
        out.append(posting)
    return out


def read_postings(path: str | Path, diagnostics: list | None = None) -> list[JobPosting]:
    with open(path, encoding="utf-8") as fh:
        return parse_postings(fh, diagnostics)


def write_postings(postings: Sequence[JobPosting], path: str | Path) -> None:
    """Persist postings (all fields, including extracted ones) as JSON lines."""
    with open(path, "w", encoding="utf-8") as fh:
        for p in postings:
            fh.write(json.dumps(p.to_record(), sort_keys=True, ensure_ascii=False) + "\n")


def load_posting_records(path: str | Path) -> list[JobPosting]:
    """Inverse of :func:`write_postings`."""
    with open(path, encoding="utf-8") as fh:
        return [JobPosting.from_record(json.loads(line)) for line in fh if line.strip()]


# ---------------------------------------------------------------------------
# irrelevant-document filter


@dataclass(frozen=True)
class FilterRule:
    rule_id: str
    pattern: str
    reason: str

    def compiled(self) -> re.Pattern:
        return re.compile(self.pattern, re.IGNORECASE)


_TOOL = r"(?:chat\s?gpt|gpt-?[34](?:\.5)?|generative ai|ai)(?:\s+tools?)?"

DEFAULT_RULES = (
    FilterRule(
        "applicant_use_forbidden",
        r"(?:use|using)\s+(?:of\s+)?" + _TOOL + r"\s+(?:is|are)\s+(?:strictly\s+)?"
        r"(?:forbidden|prohibited|not\s+(?:allowed|permitted))",
        "applicants are told not to use the tool; the posting does not demand the skill",
    ),
    FilterRule(
        "applicant_use_forbidden_2",
        r"(?:do\s+not|don'?t|must\s+not|may\s+not|should\s+not)\s+use\s+" + _TOOL +
        r"\s+(?:to\s+(?:write|draft|prepare|generate)|for)\s+(?:your\s+)?"
        r"(?:resumes?|cover\s+letters?|applications?|responses?|answers?)",
        "applicants are told not to use the tool for application materials",
    ),
    FilterRule(
        "ad_written_with_tool",
        r"(?:this|the)\s+(?:job\s+)?(?:posting|description|ad|advertisement|listing)\s+"
        r"(?:was\s+)?(?:written|generated|created|drafted)\s+(?:with|by|using)\s+"
        r"(?:the\s+help\s+of\s+)?" + _TOOL,
        "the advertisement itself was produced with the tool",
    ),
    FilterRule(
        "ad_written_with_tool_2",
        r"used\s+" + _TOOL + r"\s+to\s+(?:write|draft|create|generate)\s+(?:this|the)\s+"
        r"(?:job\s+)?(?:posting|description|ad|advertisement|listing)",
        "the advertisement itself was produced with the tool",
    ),
)


@dataclass(frozen=True)
class FilterRuleSet:
    rules: tuple[FilterRule, ...] = DEFAULT_RULES

    def __post_init__(self):
        for r in self.rules:
            try:
                r.compiled()
            except re.error as exc:
                raise ValueError(f"rule {r.rule_id}: bad pattern: {exc}") from exc

    def first_match(self, text: str) -> str | None:
        for r in self.rules:
            if r.compiled().search(text):
                return r.rule_id
        return None

    @classmethod
    def from_file(cls, path: str | Path, include_defaults: bool = True) -> "FilterRuleSet":
        """Read ``rule_id<TAB>pattern<TAB>reason`` lines (``#`` comments allowed)."""
        rules = list(DEFAULT_RULES) if include_defaults else []
        for line in Path(path).read_text("utf-8").splitlines():
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) < 2:
                raise ValueError(f"bad rule line: {line!r}")
            rules.append(FilterRule(parts[0], parts[1], parts[2] if len(parts) > 2 else ""))
        return cls(tuple(rules))

    @classmethod
    def from_config(cls, entries: Sequence[dict], include_defaults: bool = True) -> "FilterRuleSet":
        rules = list(DEFAULT_RULES) if include_defaults else []
        rules += [FilterRule(e["id"], e["pattern"], e.get("reason", "")) for e in entries]
        return cls(tuple(rules))


def filter_irrelevant(postings: Sequence[JobPosting], rules: FilterRuleSet | None = None):
    """Split postings into ``(kept, removed)``; ``removed`` pairs each posting
    with the id of the first rule whose pattern matches its description."""
    rules = rules if rules is not None else FilterRuleSet()
    kept, removed = [], []
    for p in postings:
        rid = rules.first_match(p.description)
        if rid is None:
            kept.append(p)
        else:
            removed.append((p, rid))
    return kept, removed


# ---------------------------------------------------------------------------
# attribute extraction


@dataclass(frozen=True)
class Gazetteer:
    degree_patterns: dict = field(default_factory=lambda: {
        "associate": r"associate'?s?\s+(?:degree|of\s+(?:arts|science))|\ba\.?a\.?s\.?\s+degree",
        "bachelor": r"bachelor'?s?|\bb\.[sa]\.|\bbs/ba\b|\bba/bs\b|four-year\s+(?:college\s+)?degree|undergraduate\s+degree",
        "master": r"master'?s?(?:\s+degree|\s+of|\s+in)|\bm\.s\.|\bmba\b|graduate\s+degree",
        "phd": r"\bph\.?\s?d\b|doctorate|doctoral\s+degree",
    })
    preferred_terms: tuple = ("prefer", "a plus", "nice to have", "desired", "bonus", "ideally")
    contract_patterns: dict = field(default_factory=lambda: {
        "internship": r"\binternship\b|\bintern\s+(?:role|position)\b",
        "part_time": r"\bpart[\s-]time\b",
        "contract": r"\bcontract\s+(?:role|position|job|basis|assignment)\b|\bcontractor\b|\b1099\b",
        "full_time": r"\bfull[\s-]time\b",
    })
    remote_pattern: str = r"\bremote\b|work\s+from\s+home|\bwfh\b|telecommut|fully\s+distributed"
    hours_per_year: int = HOURS_PER_YEAR


_AMOUNT = r"\$\s?(\d[\d,]*(?:\.\d+)?)\s*([kK])?"
_UNIT = r"(?:\s*(?:/|per|an?)\s*(hour|hr|year|yr|annum|annually))?"
_RANGE_RE = re.compile(_AMOUNT + r"\s*(?:-|–|—|to)\s*" + _AMOUNT + _UNIT, re.IGNORECASE)
_UPTO_RE = re.compile(r"up\s+to\s+" + _AMOUNT + _UNIT, re.IGNORECASE)
_SINGLE_RE = re.compile(_AMOUNT + _UNIT, re.IGNORECASE)

_EXP_PATTERNS = (
    re.compile(r"(\d{1,2})\s*\+\s*(?:years?|yrs?)", re.IGNORECASE),
    re.compile(r"(\d{1,2})\s*(?:-|–|to)\s*\d{1,2}\s*(?:years?|yrs?)", re.IGNORECASE),
    re.compile(r"(?:at\s+least|minimum\s+(?:of\s+)?)\s*(\d{1,2})\s*(?:years?|yrs?)", re.IGNORECASE),
    re.compile(r"(\d{1,2})\s+(?:years?|yrs?)\s+(?:of\s+)?(?:\w+\s+){0,3}?experience", re.IGNORECASE),
)


def _amount(num: str, k: str | None) -> float:
    v = float(num.replace(",", ""))
    return v * 1000 if k else v


def _annualize(v: float, unit: str | None, hours: int) -> int:
    unit = (unit or "").lower()
    hourly = unit in ("hour", "hr") or (not unit and v < 200)
    return int(round(v * hours)) if hourly else int(round(v))


def parse_salary(text: str, hours_per_year: int = HOURS_PER_YEAR):
    """All salary mentions in ``text`` as ``(min, max)`` annual USD, in order of appearance."""
    found = []
    taken: list[tuple[int, int]] = []

    def free(m):
        return all(m.end() <= a or m.start() >= b for a, b in taken)

    for m in _RANGE_RE.finditer(text):
        unit = m.group(5)
        lo = _annualize(_amount(m.group(1), m.group(2)), unit, hours_per_year)
        hi = _annualize(_amount(m.group(3), m.group(4)), unit, hours_per_year)
        found.append((m.start(), min(lo, hi), max(lo, hi)))
        taken.append((m.start(), m.end()))
    for m in _UPTO_RE.finditer(text):
        if free(m):
            v = _annualize(_amount(m.group(1), m.group(2)), m.group(3), hours_per_year)
            found.append((m.start(), v, v))
            taken.append((m.start(), m.end()))
    for m in _SINGLE_RE.finditer(text):
        if free(m) and m.group(3):
            v = _annualize(_amount(m.group(1), m.group(2)), m.group(3), hours_per_year)
            found.append((m.start(), v, v))
            taken.append((m.start(), m.end()))
    found.sort()
    return [(lo, hi) for _, lo, hi in found if lo > 0]


def parse_degree(text: str, gaz: Gazetteer | None = None) -> str | None:
    """Minimum required degree; preferred-only mentions count when nothing is required."""
    gaz = gaz or Gazetteer()
    required, preferred = set(), set()
    for clause in re.split(r"[;\n]|(?<=[.!?])\s+", text):
        low = clause.lower()
        hits = {lvl for lvl, pat in gaz.degree_patterns.items() if re.search(pat, low)}
        if not hits:
            continue
        if any(t in low for t in gaz.preferred_terms):
            preferred |= hits
        else:
            required |= hits
    pool = required or preferred
    if not pool:
        return None
    return min(pool, key=DEGREES.index)


def parse_experience(text: str) -> int | None:
    years = [int(m.group(1)) for pat in _EXP_PATTERNS for m in pat.finditer(text)]
    return min(years) if years else None


_STATE_NAME_RE = re.compile(
    r"\b(" + "|".join(sorted((re.escape(n) for n in STATE_NAMES.values()), key=len, reverse=True)) + r")\b")
_NAME_TO_CODE = {n: c for c, n in STATE_NAMES.items()}


def parse_state(text: str | None) -> str | None:
    """A USPS code from ``City, ST`` forms or a full state name."""
    if not text:
        return None
    for m in re.finditer(r",\s*([A-Z]{2})\b", text):
        if m.group(1) in USPS_CODES:
            return m.group(1)
    m = _STATE_NAME_RE.search(text)
    if m:
        return _NAME_TO_CODE[m.group(1)]
    stripped = text.strip()
    if stripped in USPS_CODES:
        return stripped
    return None


def parse_contract(text: str, gaz: Gazetteer | None = None) -> str | None:
    gaz = gaz or Gazetteer()
    for kind, pat in gaz.contract_patterns.items():
        if re.search(pat, text, re.IGNORECASE):
            return kind
    return None


def extract_attributes(posting: JobPosting, gazetteer: Gazetteer | None = None,
                       diagnostics: list | None = None) -> JobPosting:
    """Fill empty attribute fields from the salary text, location and description.

    Returns a new posting; values already present on ``posting`` are kept.
    """
    gaz = gazetteer or Gazetteer()
    diags = diagnostics if diagnostics is not None else []
    updates: dict = {}
    text = posting.description

    if posting.salary_min_usd_year is None and posting.salary_max_usd_year is None:
        salaries = []
        if posting.salary_text:
            salaries = parse_salary(posting.salary_text, gaz.hours_per_year)
        if not salaries:
            salaries = parse_salary(text, gaz.hours_per_year)
        if salaries:
            if len(set(salaries)) > 1:
                diags.append(Diagnostic("extract", "salary_conflict",
                                        f"{len(set(salaries))} distinct salary patterns; kept the first",
                                        posting_id=posting.id, field="salary"))
            updates["salary_min_usd_year"], updates["salary_max_usd_year"] = salaries[0]

    if posting.degree_req is None:
        deg = parse_degree(text, gaz)
        if deg is not None:
            updates["degree_req"] = deg
    if posting.experience_years_min is None:
        exp = parse_experience(text)
        if exp is not None:
            updates["experience_years_min"] = exp
    if posting.remote is None:
        hay = " ".join(filter(None, (posting.location_raw, text)))
        # no remote cue counts as on-site, so every posting gets a value
        updates["remote"] = bool(re.search(gaz.remote_pattern, hay, re.IGNORECASE))
    if posting.state is None:
        st = parse_state(posting.location_raw) or parse_state(text)
        if st is not None:
            updates["state"] = st
    if posting.contract_type is None:
        ct = parse_contract(text, gaz)
        if ct is not None:
            updates["contract_type"] = ct

    return dataclasses.replace(posting, **updates) if updates else posting
