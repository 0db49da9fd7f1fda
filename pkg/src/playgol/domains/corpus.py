"""Synthetic build tasks for the string domain.

Each task extracts or re-cases one or more fields of a structured random input (a name,
a date, a phone number, a code, an e-mail address). Fields vary in length, so
most tasks need a recursive program; the transformations are left to right,
so the string primitives can express every one of them.
"""
from __future__ import annotations

import random
from importlib import resources
from typing import Callable

FIRST = ["john", "mary", "alice", "robert", "linda", "james", "susan", "peter", "karen", "oliver",
         "emma", "noah", "sophia", "liam", "grace", "henry", "chloe", "oscar", "ruby", "felix"]
LAST = ["smith", "jones", "taylor", "brown", "wilson", "evans", "thomas", "roberts", "walker",
        "wright", "green", "hall", "wood", "clarke", "hughes", "turner", "parker", "cooper"]
MONTHS = ["January", "February", "March", "April", "May", "June", "July", "August", "September",
          "October", "November", "December"]
WORDS = ["apple", "river", "stone", "cloud", "paper", "tiger", "lemon", "piano", "eagle", "maple",
         "ocean", "pearl", "robin", "candle", "forest", "garden", "silver", "winter"]


def _name(r):
    return f"{r.choice(FIRST)} {r.choice(LAST)}"


def _cap(w):
    return w[0].upper() + w[1:]


def _date(r):
    age = r.randint(18, 90)
    return f"{r.randint(1, 28)} {r.choice(MONTHS)},{2018 - age} ({age} years old)"


def _code(r):
    letters = "".join(r.choice("abcdefghijklmnopqrstuvwxyz") for _ in range(r.randint(2, 4)))
    return f"{letters}-{r.randint(10, 9999)}"


def _phone(r):
    return f"({r.randint(200, 999)}) {r.randint(200, 999)}-{r.randint(1000, 9999)}"


def _sentence(r):
    return " ".join(r.choice(WORDS) for _ in range(r.randint(2, 4)))


def _email(r):
    return f"{r.choice(FIRST)}@{r.choice(WORDS)}.com"


def _month_abbrev(r):
    x = _date(r)
    return x, x.split(" ")[1].split(",")[0][:3].upper()


def _day_month(r):
    x = _date(r)
    day, rest = x.split(" ", 1)
    return x, day + rest.split(",")[0]


def _month_year(r):
    x = _date(r)
    month, rest = x.split(" ")[1].split(",")
    return x, month + rest


def _year(r):
    x = _date(r)
    return x, x.split(",")[1][:4]


def _age_years(r):
    x = _date(r)
    return x, " ".join(x.split("(")[1].split(" ")[:2])


def _username(r):
    x = " ".join(_cap(w) for w in _name(r).split())
    first, last = x.split()
    return x, (first[0] + last).lower()


def _first_cap_last_initial(r):
    x = _name(r)
    first, last = x.split()
    return x, f"{_cap(first)} {last[0].upper()}"


def _initial_last_upper(r):
    x = _name(r)
    first, last = x.split()
    return x, f"{first[0].upper()} {last.upper()}"


def _first_upper_last_cap(r):
    x = _name(r)
    first, last = x.split()
    return x, f"{first.upper()} {_cap(last)}"


def _sentence_initials(r):
    x = _sentence(r)
    return x, "".join(w[0].upper() for w in x.split())


def _title_sentence(r):
    x = _sentence(r)
    return x, " ".join(_cap(w) for w in x.split())


def _second_word(r):
    x = _sentence(r)
    return x, x.split()[1]


def _last_word(r):
    x = _sentence(r)
    return x, x.split()[-1]


def _phone_digits(r):
    x = _phone(r)
    return x, "".join(c for c in x if c.isdigit())


def _phone_area_last(r):
    x = _phone(r)
    return x, x[1:4] + x.split("-")[1]


def _area_exchange(r):
    x = _phone(r)
    return x, x[1:4] + x[6:9]


def _serial_letters(r):
    x = f"{_code(r)}-{''.join(r.choice('abcdefghijklmnopqrstuvwxyz') for _ in range(r.randint(2, 3)))}"
    head, _, tail = x.split("-")
    return x, f"{head.upper()}-{tail.upper()}"


def _code_compact(r):
    x = _code(r)
    return x, x.replace("-", "").upper()


def _email_user_host(r):
    x = _email(r)
    user, rest = x.split("@")
    return x, user + rest.split(".")[0]


def _email_domain(r):
    x = _email(r)
    return x, x.split("@")[1]


TEMPLATES: dict[str, Callable[[random.Random], tuple[str, str]]] = {
    "month_abbrev": _month_abbrev,
    "day_month": _day_month,
    "month_year": _month_year,
    "year": _year,
    "age_years": _age_years,
    "username": _username,
    "first_cap_last_initial": _first_cap_last_initial,
    "initial_last_upper": _initial_last_upper,
    "first_upper_last_cap": _first_upper_last_cap,
    "sentence_initials": _sentence_initials,
    "title_sentence": _title_sentence,
    "second_word": _second_word,
    "last_word": _last_word,
    "phone_digits": _phone_digits,
    "phone_area_last": _phone_area_last,
    "area_exchange": _area_exchange,
    "serial_letters": _serial_letters,
    "code_compact": _code_compact,
    "email_user_host": _email_user_host,
    "email_domain": _email_domain,
}


def synthetic_records(seed: int = 2019, examples: int = 10) -> list[dict]:
    rng = random.Random(seed)
    out = []
    for i, (label, fn) in enumerate(TEMPLATES.items(), 1):
        pairs, seen = [], set()
        while len(pairs) < examples:
            x, y = fn(rng)
            if x not in seen and y:
                seen.add(x)
                pairs.append([x, y])
        out.append({"name": f"build_{i}", "label": label, "examples": pairs})
    return out


def corpus_path():
    return resources.files("playgol").joinpath("data/synthetic_strings.jsonl")


def render_corpus(seed: int = 2019) -> str:
    import json
    return "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in synthetic_records(seed))
