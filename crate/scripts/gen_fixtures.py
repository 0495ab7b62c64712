#!/usr/bin/env python3
"""Regenerate the synthetic fixture corpus under fixtures/.

Output is fully determined by SEED. The JP laws are JLS XML, the KR and FR
laws are Akoma Ntoso. Texts are English renderings built from a phrase
bank; a share of KR and FR provisions are close variants of JP ones so the
offline pipeline finds correspondences.
"""

import random
from pathlib import Path
from xml.sax.saxutils import escape

SEED = 20240917
ROOT = Path(__file__).resolve().parent.parent / "fixtures"
AKN_NS = "http://docs.oasis-open.org/legaldocml/ns/akn/3.0"

SUBJECTS = [
    "The seller", "The buyer", "A lessee", "A lessor", "The obligor", "The obligee",
    "A guardian", "The contractor", "A depositary", "An agent", "The principal",
    "A surety", "The mandatary", "An heir", "The executor", "A co-owner",
]
ACTIONS = [
    "deliver", "return", "pay for", "preserve", "inspect", "register", "disclose",
    "insure", "repair", "transfer", "account for", "store", "hand over", "maintain",
]
OBJECTS = [
    "the thing sold", "the leased property", "the deposited goods", "the entrusted funds",
    "the estate of the ward", "the completed work", "the documents of title",
    "the common property", "the pledged movables", "the inherited assets",
    "the fruits of the property", "the secured claim",
]
CONDITIONS = [
    "within a reasonable period", "without delay after receiving notice",
    "at the place agreed upon by the parties", "unless otherwise provided by contract",
    "in accordance with the custom of the trade", "before the due date arrives",
    "with the care of a prudent manager", "at the expense of the other party",
    "upon the demand of the counterparty", "for the duration of the agreement",
]
TITLES = [
    "General Provisions", "Persons", "Juridical Acts", "Obligations", "Contracts",
    "Sales", "Leases", "Mandate", "Deposit", "Succession", "Property", "Security Interests",
]


def sentence(rng):
    return (
        f"{rng.choice(SUBJECTS)} shall {rng.choice(ACTIONS)} "
        f"{rng.choice(OBJECTS)} {rng.choice(CONDITIONS)}."
    )


def variant_close(text, rng):
    """Small edit: the lexical score usually stays at or above 0.95."""
    edits = [
        lambda t: t,
        lambda t: t[:-1] + ";",
        lambda t: t.replace(" shall ", " shall also ", 1),
        lambda t: t.replace("The ", "Each ", 1),
    ]
    return rng.choice(edits)(text)


def variant_loose(text, rng):
    """Paraphrase: the lexical score usually lands between 0.6 and 0.95."""
    edits = [
        lambda t: t.replace(" shall ", " must ", 1),
        lambda t: t.replace(" shall ", " is obliged to ", 1),
        lambda t: t[:-1] + ", save where the law provides otherwise.",
    ]
    return rng.choice(edits)(text)


# ---------------------------------------------------------------- JLS


class Jls:
    def __init__(self, rng):
        self.rng = rng
        self.paragraph_texts = []
        self.article_no = 0

    def sentence(self, text, indent):
        return f"{indent}<Sentence>{escape(text)}</Sentence>\n"

    def items(self, indent, depth=0):
        out = []
        tag = "Item" if depth == 0 else f"Subitem{depth}"
        for i in range(1, self.rng.randint(2, 3) + 1):
            text = sentence(self.rng)
            out.append(f'{indent}<{tag} Num="{i}">\n')
            out.append(f"{indent}  <{tag}Title>({i})</{tag}Title>\n")
            out.append(f"{indent}  <{tag}Sentence>\n")
            out.append(self.sentence(text, indent + "    "))
            out.append(f"{indent}  </{tag}Sentence>\n")
            if depth == 0 and self.rng.random() < 0.2:
                out.extend(self.items(indent + "  ", depth + 1))
            out.append(f"{indent}</{tag}>\n")
        return out

    def article(self, indent, paragraphs=None, with_items=True):
        self.article_no += 1
        n = self.article_no
        out = [f'{indent}<Article Num="{n}">\n']
        if self.rng.random() < 0.6:
            out.append(f"{indent}  <ArticleCaption>({escape(self.rng.choice(TITLES))})</ArticleCaption>\n")
        out.append(f"{indent}  <ArticleTitle>Article {n}</ArticleTitle>\n")
        count = paragraphs or self.rng.choice([1, 1, 2, 2, 3])
        for p in range(1, count + 1):
            text = sentence(self.rng)
            self.paragraph_texts.append(text)
            out.append(f'{indent}  <Paragraph Num="{p}">\n')
            out.append(f"{indent}    <ParagraphNum>{p if p > 1 else ''}</ParagraphNum>\n")
            out.append(f"{indent}    <ParagraphSentence>\n")
            out.append(self.sentence(text, indent + "      "))
            out.append(f"{indent}    </ParagraphSentence>\n")
            if with_items and self.rng.random() < 0.15:
                out.extend(self.items(indent + "    "))
            out.append(f"{indent}  </Paragraph>\n")
        out.append(f"{indent}</Article>\n")
        return out


def jls_law(era, year, num, month, day, title, lawnum, body, suppl=False):
    head = (
        f'<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<Law Era="{era}" Year="{year}" Num="{num}" LawType="Act" '
        f'PromulgateMonth="{month}" PromulgateDay="{day}" Lang="en">\n'
        f"  <LawNum>{escape(lawnum)}</LawNum>\n"
        f"  <LawBody>\n"
        f"    <LawTitle>{escape(title)}</LawTitle>\n"
        f"    <MainProvision>\n"
    )
    tail = "    </MainProvision>\n"
    if suppl:
        tail += (
            "    <SupplProvision>\n"
            "      <SupplProvisionLabel>Supplementary Provisions</SupplProvisionLabel>\n"
            "      <Paragraph Num=\"1\"><ParagraphSentence><Sentence>"
            "This Act comes into force on the day of promulgation.</Sentence>"
            "</ParagraphSentence></Paragraph>\n"
            "    </SupplProvision>\n"
        )
    tail += "  </LawBody>\n</Law>\n"
    return head + "".join(body) + tail


def civil_code(rng):
    """232 articles in Part > Chapter > Section > Article."""
    g = Jls(rng)
    body = []
    per_part = [120, 112]
    for part, total in enumerate(per_part, 1):
        body.append(f'      <Part Num="{part}">\n        <PartTitle>Part {part} {TITLES[part]}</PartTitle>\n')
        chapters = 4
        left = total
        for ch in range(1, chapters + 1):
            in_chapter = left if ch == chapters else total // chapters
            left -= in_chapter
            body.append(f'        <Chapter Num="{ch}">\n          <ChapterTitle>Chapter {ch}</ChapterTitle>\n')
            sec_sizes = [in_chapter // 2, in_chapter - in_chapter // 2]
            for sec, size in enumerate(sec_sizes, 1):
                body.append(f'          <Section Num="{sec}">\n            <SectionTitle>Section {sec}</SectionTitle>\n')
                for _ in range(size):
                    body.extend(g.article("            ", with_items=True))
                body.append("          </Section>\n")
            body.append("        </Chapter>\n")
        body.append("      </Part>\n")
    assert g.article_no == 232
    return jls_law("Meiji", 29, "89", 4, 27, "Civil Code", "Act No. 89 of 1896", body), g.paragraph_texts


def part_chapter_fixture(rng):
    """One Part, one Chapter, three Articles with two Paragraphs each."""
    g = Jls(rng)
    body = ['      <Part Num="1">\n        <PartTitle>Part 1</PartTitle>\n',
            '        <Chapter Num="1">\n          <ChapterTitle>Chapter 1</ChapterTitle>\n']
    for _ in range(3):
        body.extend(g.article("          ", paragraphs=2, with_items=False))
    body.append("        </Chapter>\n      </Part>\n")
    return jls_law("Heisei", 11, "87", 7, 16, "Act on Trust Deposits", "Act No. 87 of 1999", body), g.paragraph_texts


def small_law(rng, era, year, num, month, day, title, shape, suppl=False):
    g = Jls(rng)
    body = []
    if shape == "flat":
        for _ in range(rng.randint(4, 9)):
            body.extend(g.article("      "))
    elif shape == "chapters":
        for ch in range(1, rng.randint(2, 4) + 1):
            body.append(f'      <Chapter Num="{ch}">\n        <ChapterTitle>{escape(rng.choice(TITLES))}</ChapterTitle>\n')
            for _ in range(rng.randint(2, 5)):
                body.extend(g.article("        "))
            body.append("      </Chapter>\n")
    elif shape == "sections":
        body.append('      <Chapter Num="1">\n        <ChapterTitle>General Rules</ChapterTitle>\n')
        for sec in range(1, 3):
            body.append(f'        <Section Num="{sec}">\n          <SectionTitle>Section {sec}</SectionTitle>\n')
            for _ in range(rng.randint(2, 4)):
                body.extend(g.article("          "))
            body.append("        </Section>\n")
        body.append("      </Chapter>\n")
    lawnum = f"Act No. {num} of {year}"
    return jls_law(era, year, num, month, day, title, lawnum, body, suppl), g.paragraph_texts


# ---------------------------------------------------------------- AKN


def akn_law(country, lang, date, number, title, chapters):
    """chapters: list of (heading, [paragraph texts per article])."""
    work = f"/akn/{country}/act/{date}/{number}"
    expr = f"{work}/{lang}@{date}"
    manif = f"{expr}.xml"
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>\n',
        f'<akomaNtoso xmlns="{AKN_NS}">\n',
        '  <act name="act">\n',
        "    <meta>\n",
        '      <identification source="#fixture">\n',
        "        <FRBRWork>\n",
        f'          <FRBRthis value="{work}/!main"/>\n',
        f'          <FRBRuri value="{work}"/>\n',
        f'          <FRBRdate date="{date}" name="enactment"/>\n',
        '          <FRBRauthor href="#parliament"/>\n',
        f'          <FRBRcountry value="{country}"/>\n',
        f'          <FRBRnumber value="{number}"/>\n',
        "        </FRBRWork>\n",
        "        <FRBRExpression>\n",
        f'          <FRBRthis value="{expr}/!main"/>\n',
        f'          <FRBRuri value="{expr}"/>\n',
        f'          <FRBRdate date="{date}" name="version"/>\n',
        '          <FRBRauthor href="#parliament"/>\n',
        f'          <FRBRlanguage language="{lang}"/>\n',
        "        </FRBRExpression>\n",
        "        <FRBRManifestation>\n",
        f'          <FRBRthis value="{manif}"/>\n',
        f'          <FRBRuri value="{manif}"/>\n',
        f'          <FRBRdate date="{date}" name="generation"/>\n',
        '          <FRBRauthor href="#fixture"/>\n',
        "        </FRBRManifestation>\n",
        "      </identification>\n",
        "    </meta>\n",
        f"    <preface>\n      <longTitle>\n        <p>{escape(title)}</p>\n      </longTitle>\n    </preface>\n",
        "    <body>\n",
    ]
    art = 0
    for ch, (heading, articles) in enumerate(chapters, 1):
        cid = f"chp_{ch}"
        out.append(f'      <chapter eId="{cid}">\n        <num>{ch}</num>\n        <heading>{escape(heading)}</heading>\n')
        for paras in articles:
            art += 1
            aid = f"{cid}.art_{art}"
            out.append(f'        <article eId="{aid}">\n          <num>{art}</num>\n')
            for p, text in enumerate(paras, 1):
                out.append(
                    f'          <paragraph eId="{aid}.para_{p}">\n'
                    f"            <num>{p}</num>\n"
                    f"            <content>\n              <p>{escape(text)}</p>\n            </content>\n"
                    f"          </paragraph>\n"
                )
            out.append("        </article>\n")
        out.append("      </chapter>\n")
    out.append("    </body>\n  </act>\n</akomaNtoso>\n")
    return "".join(out)


def foreign_texts(rng, jp_texts, close_share, loose_share, fillers):
    texts = []
    for t in jp_texts:
        r = rng.random()
        if r < close_share:
            texts.append(variant_close(t, rng))
        elif r < close_share + loose_share:
            texts.append(variant_loose(t, rng))
    texts.extend(sentence(rng) for _ in range(fillers))
    rng.shuffle(texts)
    return texts


def chunk_laws(rng, texts, n_laws):
    """Split paragraph texts into laws of chapters of articles."""
    laws = []
    per_law = -(-len(texts) // n_laws)
    for i in range(n_laws):
        part = texts[i * per_law:(i + 1) * per_law]
        chapters, articles, k = [], [], 0
        while k < len(part):
            n = rng.choice([1, 1, 2, 2, 3])
            articles.append(part[k:k + n])
            k += n
            if len(articles) == 12:
                chapters.append((rng.choice(TITLES), articles))
                articles = []
        if articles:
            chapters.append((rng.choice(TITLES), articles))
        laws.append(chapters)
    return laws


def write(path, text):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8", newline="\n")


def main():
    rng = random.Random(SEED)
    jp = []
    xml, texts = civil_code(rng)
    write(ROOT / "jp" / "01_civil_code.xml", xml)
    jp.extend(texts)
    xml, texts = part_chapter_fixture(rng)
    write(ROOT / "jp" / "02_trust_deposits.xml", xml)
    jp.extend(texts)
    smalls = [
        ("Showa", 22, "33", 3, 31, "Basic Act on Contracts", "flat", False),
        ("Showa", 39, "125", 7, 11, "Act on Leases of Buildings", "chapters", True),
        ("Heisei", 3, "90", 10, 4, "Act on Land and Building Leases", "sections", False),
        ("Heisei", 18, "48", 6, 2, "Act on General Incorporated Associations", "chapters", False),
        ("Taisho", 11, "62", 4, 21, "Trust Act", "flat", True),
        ("Reiwa", 2, "45", 6, 12, "Act on Deposit Services", "sections", False),
        ("Showa", 46, "80", 5, 31, "Act on Guarantees", "chapters", False),
        ("Heisei", 29, "44", 6, 2, "Act on Succession Procedure", "flat", False),
    ]
    for i, (era, year, num, m, d, title, shape, suppl) in enumerate(smalls, 3):
        xml, texts = small_law(rng, era, year, num, m, d, title, shape, suppl)
        slug = title.lower().replace("act on ", "").replace(" ", "_")
        write(ROOT / "jp" / f"{i:02d}_{slug}.xml", xml)
        jp.extend(texts)

    kr = foreign_texts(rng, jp, 0.35, 0.15, 160)
    for i, chapters in enumerate(chunk_laws(rng, kr, 2), 1):
        date, number = [("1958-02-22", "471"), ("1984-04-10", "3725")][i - 1]
        title = ["Civil Act", "Housing Lease Protection Act"][i - 1]
        write(ROOT / "kr" / f"{i:02d}_{number}.xml", akn_law("kr", "en", date, number, title, chapters))

    fr = foreign_texts(rng, jp, 0.10, 0.40, 240)
    for i, chapters in enumerate(chunk_laws(rng, fr, 3), 1):
        date, number = [("1804-03-21", "1804-03"), ("1989-07-06", "89-462"), ("2016-02-10", "2016-131")][i - 1]
        title = ["Civil Code", "Act on Residential Leases", "Ordinance Reforming Contract Law"][i - 1]
        write(ROOT / "fr" / f"{i:02d}_{number}.xml", akn_law("fr", "en", date, number, title, chapters))


if __name__ == "__main__":
    main()
