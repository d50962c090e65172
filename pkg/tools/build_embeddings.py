#!/usr/bin/env python3
"""Generate the bundled token-vector file used for semantic keyword matching.

Vectors are synthetic: each token gets a unit vector near the direction of its
semantic cluster, so tokens that mean the same thing (phone/cell/mobile) score
high cosine similarity while unrelated tokens score near zero. Deterministic by
construction; rerunning overwrites src/secretrisk/data/vectors.txt in place.

A real pre-trained subword model can replace this file: keep the same format
(first line = dimension, then "token v1 .. vd" per line, lowercase tokens).
"""

from __future__ import annotations

import hashlib
import math
import random
from pathlib import Path

DIM = 64
NOISE = 0.18
OUT = Path(__file__).resolve().parents[1] / "src" / "secretrisk" / "data" / "vectors.txt"

# Tokens that share a meaning live in one cluster; the cluster key is arbitrary
# but stable (it seeds the cluster direction).
CLUSTERS: dict[str, list[str]] = {
    "person": ["person", "name", "fullname", "surname", "forename", "people", "nickname", "alias"],
    "first": ["first", "given"],
    "last": ["last", "family"],
    "maiden": ["maiden"],
    "email": ["email", "mail", "inbox"],
    "phone": ["phone", "cell", "mobile", "telephone", "tel", "msisdn", "landline"],
    "fax": ["fax"],
    "address": ["address", "addr", "street", "residence"],
    "city": ["city", "town"],
    "state": ["state", "province", "region"],
    "postal": ["postal", "zip", "zipcode", "postcode"],
    "country": ["country"],
    "geo": ["geo", "latitude", "longitude", "coordinates", "coordinate", "lat", "lng", "lon", "gps"],
    "ip": ["ip", "ipv4", "ipv6"],
    "mac": ["mac"],
    "device": ["device", "hardware", "gadget"],
    "imei": ["imei"],
    "license": ["license", "licence", "permit"],
    "plate": ["plate"],
    "vehicle": ["vehicle", "car", "automobile"],
    "identification": ["identification", "identity"],
    "social": ["social"],
    "media": ["media"],
    "handle": ["handle"],
    "photo": ["photograph", "photo", "picture", "image", "avatar", "selfie"],
    "passport": ["passport"],
    "security": ["security"],
    "ssn": ["ssn"],
    "financial": ["financial", "finance", "fiscal"],
    "account": ["account", "acct", "acc"],
    "number": ["number", "no", "num", "nbr", "nr"],
    "credit": ["credit", "debit"],
    "card": ["card"],
    "expiration": ["expiration", "expiry", "expires"],
    "cvv": ["cvv", "cvc"],
    "iban": ["iban"],
    "swift": ["swift", "bic"],
    "bank": ["bank", "banking"],
    "routing": ["routing"],
    "crypto": ["crypto", "wallet", "blockchain", "bitcoin", "ethereum", "btc", "eth", "ledger"],
    "coin": ["coin", "currency"],
    "patient": ["patient"],
    "medical": ["medical", "disease", "diagnosis", "illness", "condition", "health", "clinical", "symptom"],
    "record": ["record", "chart"],
    "insurance": ["insurance", "insurer"],
    "prescription": ["prescription", "medication", "drug", "medicine", "dosage"],
    "blood": ["blood"],
    "type": ["type", "kind"],
    "genetic": ["genetic", "dna", "genome"],
    "biometric": ["biometric", "fingerprint", "iris", "retina", "faceprint"],
    "sexual": ["sexual"],
    "orientation": ["orientation"],
    "criminal": ["criminal", "felony", "offense", "conviction"],
    "immigration": ["immigration", "visa"],
    "salary": ["salary", "wage", "pay", "income", "compensation", "earnings"],
    "tax": ["tax", "taxpayer"],
    "policy": ["policy"],
    "gender": ["gender", "sex"],
    "birth": ["birth", "dob", "born", "birthday", "birthdate"],
    "date": ["date", "day", "datetime"],
    "age": ["age"],
    "ethnicity": ["ethnicity", "ethnic"],
    "race": ["race", "racial"],
    "religion": ["religion", "faith", "religious"],
    "nationality": ["nationality", "citizenship"],
    "marital": ["marital", "married"],
    "political": ["political", "politics"],
    "affiliation": ["affiliation", "membership"],
    "education": ["education", "degree", "school", "university", "qualification"],
    "level": ["level", "grade", "tier"],
    "occupation": ["occupation", "profession", "job", "employment"],
    "language": ["language", "locale", "lang"],
    "disability": ["disability", "impairment"],
    "veteran": ["veteran", "military", "army"],
    "status": ["status"],
    "auth": ["auth", "token", "oauth", "bearer", "credential", "authentication", "jwt"],
    "password": ["password", "pwd", "passwd", "pass", "secret", "passphrase"],
    "user": ["user", "username", "login", "member", "uid", "uname"],
    "api": ["api"],
    "key": ["key"],
    "encryption": ["encryption", "cipher", "encrypted"],
    "private": ["private"],
    "client": ["client"],
    "session": ["session"],
    "cookie": ["cookie"],
    "answer": ["answer"],
    "pin": ["pin"],
    "certificate": ["certificate", "cert"],
    "national": ["national"],
    "id": ["id", "identifier", "ident"],
    "vat": ["vat"],
    "driver": ["driver", "driving"],
    "voter": ["voter", "voting", "electoral"],
    "registration": ["registration", "registry", "enrollment"],
    "work": ["work"],
    "marriage": ["marriage", "spouse", "wedding"],
    "business": ["business", "company", "enterprise", "firm"],
    "customs": ["customs"],
    "declaration": ["declaration"],
    "pension": ["pension", "retirement"],
    "resume": ["resume", "cv", "curriculum"],
    "contract": ["contract", "agreement"],
    "invoice": ["invoice", "bill", "billing", "receipt"],
    "statement": ["statement"],
    "payslip": ["payslip", "payroll", "paycheck"],
    "report": ["report"],
    "legal": ["legal", "law", "court"],
    "source": ["source"],
    "code": ["code"],
    "correspondence": ["correspondence", "letter", "memo"],
    "meeting": ["meeting"],
    "minutes": ["minutes"],
    "organization": ["organization", "organisation", "org", "institution", "employer"],
    "title": ["title"],
    "department": ["department", "dept", "division", "unit"],
    "url": ["url", "uri", "link", "href", "hyperlink", "weblink"],
    "domain": ["domain"],
    "time": ["time", "timestamp", "clock", "event"],
    "zone": ["zone", "timezone", "tz"],
    "product": ["product", "item", "goods", "sku"],
    "price": ["price", "cost", "fee", "rate", "amount"],
    "quantity": ["quantity", "qty", "count"],
    "order": ["order"],
    "tracking": ["tracking", "shipment", "shipping"],
    "serial": ["serial"],
    "hostname": ["hostname", "host", "server"],
    "file": ["file", "filename"],
    "path": ["path", "filepath", "directory", "folder"],
    "agent": ["agent"],
    "comment": ["comment", "remark", "feedback", "note"],
    "video": ["video", "movie", "clip", "footage", "film"],
    "location": ["location", "place", "position", "venue"],
    "contact": ["contact"],
    "document": ["document", "doc", "paperwork"],
    "message": ["message", "msg", "text", "sms", "chat"],
}

# Common schema/database vocabulary; each word is its own singleton cluster so
# it stays far from every sensitive category unless listed above.
SCHEMA_TERMS = """
test tests testing demo sample example data info details meta metadata config
configuration settings options params parameters args value values entry entries
field fields column columns row rows table tables index indexes schema database
db log logs audit history archive backup temp tmp cache buffer queue stack list
array map hash dictionary string integer float double boolean bool byte bytes
created updated deleted modified inserted removed added changed start end begin
finish open closed active inactive enabled disabled visible hidden public
internal external global local default custom primary secondary foreign unique
null empty blank missing unknown none total sum average minimum maximum
threshold limit offset page size length width height depth weight volume
color colour shape style theme font icon logo banner header footer sidebar
menu button form input output widget component module plugin extension
service endpoint route controller model view template layout script stylesheet
asset resource bucket blob object storage disk memory cpu gpu network socket
port protocol packet request response payload body header cookie? session?
version release build patch revision branch tag commit merge push pull clone
repository project workspace environment stage production development sandbox
debug trace error warning notice fatal critical exception failure success
result outcome summary detail description label caption tooltip hint
placeholder sentinel marker flag toggle switch mode state phase step task
job worker thread process daemon scheduler cron timer interval duration
frequency period cycle epoch era season quarter month week year hour minute
second millisecond microsecond nanosecond
customer supplier vendor partner merchant seller buyer shopper guest visitor
subscriber follower friend contact? neighbor colleague manager admin
administrator operator moderator editor author publisher owner tenant
landlord resident citizen applicant candidate employee staff intern contractor
freelancer consultant student teacher professor instructor pupil trainee
doctor nurse surgeon therapist pharmacist dentist
cart basket checkout payment transaction transfer deposit withdrawal refund
charge discount coupon voucher promotion campaign offer deal subscription
plan package bundle licence?
shipment? delivery dispatch courier freight cargo warehouse inventory stock
catalog catalogue category subcategory brand manufacturer origin destination
departure arrival journey trip flight train bus taxi hotel booking
reservation ticket seat gate terminal runway
movie? music song album artist band genre playlist track episode series
channel broadcast stream podcast audio sound image? picture? gallery
thumbnail preview snapshot frame scene subtitle caption?
weather temperature humidity pressure wind rain snow storm forecast climate
sensor reading measurement metric gauge counter meter probe signal sample?
lesson course curriculum? module? assignment exam quiz question answer? score
grade? mark certificate? diploma transcript semester term enrollment?
kitchen recipe ingredient cuisine dish meal menu? restaurant cafe bar pub
drink beverage food snack dessert breakfast lunch dinner
animal pet dog cat bird fish horse farm crop plant tree flower garden soil
seed harvest fertilizer pesticide
engine motor wheel tire brake gear clutch chassis battery fuel gasoline
diesel electric hybrid
mountain river lake ocean sea island forest desert valley canyon beach coast
border capital continent planet star galaxy universe
atom molecule electron proton neutron photon quark particle element compound
reaction catalyst enzyme protein cell? tissue organ muscle bone nerve brain
heart lung liver kidney stomach skin hair eye ear nose mouth tooth
algorithm function method procedure routine variable constant literal
expression operator operand keyword token? identifier? syntax semantics
compiler interpreter runtime library framework toolkit sdk ide editor
terminal? console shell prompt command argument option? flag?
""".split()


def _seed_rng(tag: str) -> random.Random:
    digest = hashlib.sha256(tag.encode("utf-8")).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def _unit(vec: list[float]) -> list[float]:
    norm = math.sqrt(sum(x * x for x in vec)) or 1.0
    return [x / norm for x in vec]


def _random_unit(tag: str) -> list[float]:
    rng = _seed_rng(tag)
    return _unit([rng.gauss(0.0, 1.0) for _ in range(DIM)])


def token_vector(cluster: str, token: str) -> list[float]:
    base = _random_unit("cluster::" + cluster)
    noise = _random_unit("token::" + token)
    return _unit([b + NOISE * n for b, n in zip(base, noise)])


def build_vocab() -> dict[str, str]:
    """token -> cluster key; singletons cluster on themselves."""
    vocab: dict[str, str] = {}
    for cluster, tokens in CLUSTERS.items():
        for tok in tokens:
            vocab.setdefault(tok, cluster)
    for raw in SCHEMA_TERMS:
        tok = raw.rstrip("?")  # '?' marks words already claimed by a cluster
        if raw.endswith("?") or not tok.isalpha():
            continue
        vocab.setdefault(tok, tok)
    # Plural variants stay inside the cluster of their singular form.
    for tok, cluster in list(vocab.items()):
        if not tok.endswith("s"):
            vocab.setdefault(tok + "s", cluster)
    return vocab


def main() -> None:
    vocab = build_vocab()
    lines = [str(DIM)]
    for tok in sorted(vocab):
        vec = token_vector(vocab[tok], tok)
        lines.append(tok + " " + " ".join(f"{x:.6f}" for x in vec))
    OUT.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {len(vocab)} vectors (dim {DIM}) to {OUT}")


if __name__ == "__main__":
    main()
